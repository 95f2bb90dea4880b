// Copyright 2026 The sgflm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Brute-force Go legality used to cross-check the rules engine. Positions are
// plain strings of '.', 'X', 'O', row-major. Every decision recomputes groups
// from scratch with a queue flood fill; no hashing.

#ifndef SGFLM_TESTS_NAIVE_RULES_H_
#define SGFLM_TESTS_NAIVE_RULES_H_

#include <deque>
#include <set>
#include <string>
#include <vector>

namespace naive {

enum class Verdict { kLegal, kOccupied, kSuicide, kSuperko };

struct Game {
  int n;
  std::string grid;
  std::set<std::string> history;

  explicit Game(int size) : n(size), grid(size * size, '.') {
    history.insert(grid);
  }

  std::vector<int> adjacent(int i) const {
    std::vector<int> out;
    int r = i / n, c = i % n;
    if (r > 0) out.push_back(i - n);
    if (r < n - 1) out.push_back(i + n);
    if (c > 0) out.push_back(i - 1);
    if (c < n - 1) out.push_back(i + 1);
    return out;
  }

  // Group containing `start` in `g`, and its liberty count.
  std::vector<int> group(const std::string& g, int start, int* liberties) const {
    std::vector<bool> seen(g.size(), false), lib(g.size(), false);
    std::deque<int> queue{start};
    std::vector<int> stones;
    seen[start] = true;
    *liberties = 0;
    while (!queue.empty()) {
      int i = queue.front();
      queue.pop_front();
      stones.push_back(i);
      for (int j : adjacent(i)) {
        if (g[j] == '.' && !lib[j]) {
          lib[j] = true;
          ++*liberties;
        } else if (g[j] == g[start] && !seen[j]) {
          seen[j] = true;
          queue.push_back(j);
        }
      }
    }
    return stones;
  }

  // Resulting grid in `*after` when legal.
  Verdict try_play(char stone, int point, std::string* after) const {
    if (grid[point] != '.') return Verdict::kOccupied;
    std::string g = grid;
    g[point] = stone;
    char enemy = stone == 'X' ? 'O' : 'X';
    for (int i = 0; i < n * n; ++i) {
      if (g[i] != enemy) continue;
      int libs = 0;
      auto stones = group(g, i, &libs);
      if (libs == 0) {
        for (int s : stones) g[s] = '.';
      }
    }
    int libs = 0;
    group(g, point, &libs);
    if (libs == 0) return Verdict::kSuicide;
    if (history.count(g)) return Verdict::kSuperko;
    *after = g;
    return Verdict::kLegal;
  }

  void commit(const std::string& after) {
    grid = after;
    history.insert(grid);
  }
};

}  // namespace naive

#endif  // SGFLM_TESTS_NAIVE_RULES_H_
