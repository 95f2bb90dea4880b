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

#ifndef SGFLM_RULES_H_
#define SGFLM_RULES_H_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "sgflm/sgf.h"

namespace sgflm {

enum class Cell : uint8_t { kEmpty, kBlack, kWhite };

inline Cell to_cell(Color c) {
  return c == Color::kBlack ? Cell::kBlack : Cell::kWhite;
}

enum class RuleError { kOccupied, kSuicide, kSuperko, kWrongTurn, kOffBoard };

std::string_view to_string(RuleError e);

// Go position with positional-superko history. Suicide is illegal.
//
// Moves are applied with play(), which leaves the board untouched when the
// move is rejected. Copies are cheap enough for value-style use through
// apply_move().
class Board {
 public:
  explicit Board(int size = 19);

  // Rows of '.', 'X' (black), 'O' (white), top row first. The resulting
  // position is the only entry in the history.
  static Board from_diagram(std::string_view diagram,
                            Color to_move = Color::kBlack);

  int size() const { return size_; }
  bool on_board(Point p) const {
    return p.col >= 0 && p.row >= 0 && p.col < size_ && p.row < size_;
  }
  Cell at(Point p) const { return grid_[index(p)]; }
  Color to_move() const { return to_move_; }
  void set_to_move(Color c) { to_move_ = c; }
  int captures(Color by) const {
    return by == Color::kBlack ? captures_by_black_ : captures_by_white_;
  }
  int stones_on_board() const;
  uint64_t fingerprint() const { return hash_; }
  bool seen(uint64_t fingerprint) const {
    return history_.count(fingerprint) != 0;
  }
  size_t history_size() const { return history_.size(); }
  const std::vector<Cell>& cells() const { return grid_; }

  // Why `move` would be rejected, or nullopt when it is legal.
  std::optional<RuleError> check(const Move& move) const;

  // Applies a legal move; on error the board is unchanged.
  std::optional<RuleError> play(const Move& move);

  std::string to_diagram() const;

  friend bool operator==(const Board& a, const Board& b) {
    return a.size_ == b.size_ && a.grid_ == b.grid_ && a.to_move_ == b.to_move_;
  }

 private:
  int index(Point p) const { return p.row * size_ + p.col; }
  Point point(int idx) const { return {idx % size_, idx / size_}; }
  int neighbors(int idx, int out[4]) const;

  // Stones of the group at `idx`, and whether it has a liberty other than
  // `ignore` (-1 for none).
  bool group_has_liberty(int idx, int ignore, std::vector<int>* stones) const;

  int size_;
  std::vector<Cell> grid_;
  Color to_move_ = Color::kBlack;
  int captures_by_black_ = 0;
  int captures_by_white_ = 0;
  uint64_t hash_ = 0;
  std::unordered_set<uint64_t> history_;
};

// Value-semantics wrapper around Board::play.
std::variant<Board, RuleError> apply_move(const Board& board, const Move& move);

// Every point the side to move may legally play, plus a pass (last).
std::vector<Move> legal_moves(const Board& board);

enum class Region { kCorner, kSide, kCenter };

std::string_view to_string(Region r);

// Distance to the nearest edge along one axis, counted from 1 on the edge.
inline int line_number(int coord, int size) {
  return std::min(coord, size - 1 - coord) + 1;
}

// Corner iff both line numbers are <= 5, Center iff both are > 5.
Region classify_region(Point p, int size);

struct ReplayResult {
  Board final_board;
  std::optional<size_t> first_illegal_index;
  std::optional<RuleError> violation;
  std::vector<Region> per_move_regions;  // one per played non-pass move

  size_t legal_prefix_length(size_t total_moves) const {
    return first_illegal_index.value_or(total_moves);
  }
};

// Applies moves in order from an empty board, stopping at the first
// violation.
ReplayResult replay(const GameRecord& record);

struct Score {
  int black_area = 0;
  int white_area = 0;
  int black_territory = 0;
  int white_territory = 0;
  int neutral = 0;  // empty points reaching both colors or neither
  double komi = 0.0;
  std::string result_text;  // from area + komi: "B+n", "W+n" or "Draw"

  double margin() const { return black_area - (white_area + komi); }
};

// Tromp-Taylor area and the territory component of the same flood fill.
// No dead-stone removal. Both functions return the full Score.
Score score_area(const Board& board, double komi);
Score score_territory(const Board& board, double komi);

std::string format_result(double margin);

}  // namespace sgflm

#endif  // SGFLM_RULES_H_
