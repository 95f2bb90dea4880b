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

#include "sgflm/rules.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace sgflm {

namespace {

constexpr int kMaxSize = 25;

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Zobrist keys indexed by [row * kMaxSize + col][color].
const std::array<std::array<uint64_t, 2>, kMaxSize * kMaxSize>& zobrist() {
  static const auto table = [] {
    std::array<std::array<uint64_t, 2>, kMaxSize * kMaxSize> t{};
    uint64_t state = 0x5347464c4d5a4f42ULL;
    for (auto& entry : t) {
      entry[0] = splitmix64(state);
      entry[1] = splitmix64(state);
    }
    return t;
  }();
  return table;
}

uint64_t key(Point p, Cell c) {
  return zobrist()[p.row * kMaxSize + p.col][c == Cell::kBlack ? 0 : 1];
}

}  // namespace

std::string_view to_string(RuleError e) {
  switch (e) {
    case RuleError::kOccupied: return "Occupied";
    case RuleError::kSuicide: return "Suicide";
    case RuleError::kSuperko: return "Superko";
    case RuleError::kWrongTurn: return "WrongTurn";
    case RuleError::kOffBoard: return "OffBoard";
  }
  return "Unknown";
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::kCorner: return "corner";
    case Region::kSide: return "side";
    case Region::kCenter: return "center";
  }
  return "unknown";
}

Board::Board(int size) : size_(size), grid_(size * size, Cell::kEmpty) {
  if (size < 2 || size > kMaxSize) {
    throw Error("InvalidBoardSize", "unsupported board size " +
                                        std::to_string(size));
  }
  history_.insert(hash_);
}

Board Board::from_diagram(std::string_view diagram, Color to_move) {
  std::vector<std::string> rows;
  std::string row;
  for (char c : diagram) {
    if (c == '\n') {
      if (!row.empty()) rows.push_back(row);
      row.clear();
    } else if (c == '.' || c == 'X' || c == 'O') {
      row.push_back(c);
    }
  }
  if (!row.empty()) rows.push_back(row);
  Board board(static_cast<int>(rows.size()));
  for (int r = 0; r < board.size_; ++r) {
    if (static_cast<int>(rows[r].size()) != board.size_) {
      throw Error("InvalidDiagram", "diagram is not square");
    }
    for (int c = 0; c < board.size_; ++c) {
      Cell cell = rows[r][c] == 'X'   ? Cell::kBlack
                  : rows[r][c] == 'O' ? Cell::kWhite
                                      : Cell::kEmpty;
      board.grid_[r * board.size_ + c] = cell;
      if (cell != Cell::kEmpty) board.hash_ ^= key({c, r}, cell);
    }
  }
  board.to_move_ = to_move;
  board.history_ = {board.hash_};
  return board;
}

int Board::stones_on_board() const {
  return static_cast<int>(
      std::count_if(grid_.begin(), grid_.end(),
                    [](Cell c) { return c != Cell::kEmpty; }));
}

int Board::neighbors(int idx, int out[4]) const {
  int n = 0;
  int col = idx % size_;
  int row = idx / size_;
  if (col > 0) out[n++] = idx - 1;
  if (col < size_ - 1) out[n++] = idx + 1;
  if (row > 0) out[n++] = idx - size_;
  if (row < size_ - 1) out[n++] = idx + size_;
  return n;
}

bool Board::group_has_liberty(int idx, int ignore,
                              std::vector<int>* stones) const {
  Cell color = grid_[idx];
  std::vector<int> stack{idx};
  std::vector<int> members;
  std::vector<bool> seen(grid_.size(), false);
  seen[idx] = true;
  bool liberty = false;
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    members.push_back(cur);
    int nbrs[4];
    int n = neighbors(cur, nbrs);
    for (int i = 0; i < n; ++i) {
      int nb = nbrs[i];
      if (grid_[nb] == Cell::kEmpty) {
        if (nb != ignore) {
          liberty = true;
          if (stones == nullptr) return true;
        }
      } else if (grid_[nb] == color && !seen[nb]) {
        seen[nb] = true;
        stack.push_back(nb);
      }
    }
  }
  if (stones != nullptr) *stones = std::move(members);
  return liberty;
}

std::optional<RuleError> Board::check(const Move& move) const {
  if (move.color != to_move_) return RuleError::kWrongTurn;
  if (move.is_pass()) return std::nullopt;
  if (!on_board(*move.point)) return RuleError::kOffBoard;
  int idx = index(*move.point);
  if (grid_[idx] != Cell::kEmpty) return RuleError::kOccupied;

  Cell mine = to_cell(move.color);
  Cell theirs = to_cell(other(move.color));
  uint64_t hash = hash_ ^ key(*move.point, mine);

  // The new stone is treated as occupying idx: an opponent group adjacent
  // to it is captured iff its only liberty is idx.
  std::vector<int> captured;
  int nbrs[4];
  int n = neighbors(idx, nbrs);
  for (int i = 0; i < n; ++i) {
    int nb = nbrs[i];
    if (grid_[nb] != theirs) continue;
    if (std::find(captured.begin(), captured.end(), nb) != captured.end()) {
      continue;
    }
    std::vector<int> stones;
    if (!group_has_liberty(nb, idx, &stones)) {
      for (int s : stones) {
        captured.push_back(s);
        hash ^= key(point(s), theirs);
      }
    }
  }

  if (captured.empty()) {
    bool liberty = false;
    for (int i = 0; i < n && !liberty; ++i) {
      int nb = nbrs[i];
      if (grid_[nb] == Cell::kEmpty) {
        liberty = true;
      } else if (grid_[nb] == mine) {
        liberty = group_has_liberty(nb, idx, nullptr);
      }
    }
    if (!liberty) return RuleError::kSuicide;
  }
  if (history_.count(hash) != 0) return RuleError::kSuperko;
  return std::nullopt;
}

std::optional<RuleError> Board::play(const Move& move) {
  if (auto err = check(move)) return err;
  if (!move.is_pass()) {
    int idx = index(*move.point);
    Cell mine = to_cell(move.color);
    Cell theirs = to_cell(other(move.color));
    grid_[idx] = mine;
    hash_ ^= key(*move.point, mine);
    int nbrs[4];
    int n = neighbors(idx, nbrs);
    int removed = 0;
    for (int i = 0; i < n; ++i) {
      int nb = nbrs[i];
      if (grid_[nb] != theirs) continue;
      std::vector<int> stones;
      if (!group_has_liberty(nb, -1, &stones)) {
        for (int s : stones) {
          grid_[s] = Cell::kEmpty;
          hash_ ^= key(point(s), theirs);
        }
        removed += static_cast<int>(stones.size());
      }
    }
    (move.color == Color::kBlack ? captures_by_black_ : captures_by_white_) +=
        removed;
  }
  to_move_ = other(to_move_);
  history_.insert(hash_);
  return std::nullopt;
}

std::string Board::to_diagram() const {
  std::string out;
  for (int r = 0; r < size_; ++r) {
    for (int c = 0; c < size_; ++c) {
      Cell cell = grid_[r * size_ + c];
      out.push_back(cell == Cell::kBlack   ? 'X'
                    : cell == Cell::kWhite ? 'O'
                                           : '.');
    }
    out.push_back('\n');
  }
  return out;
}

std::variant<Board, RuleError> apply_move(const Board& board, const Move& move) {
  Board next = board;
  if (auto err = next.play(move)) return *err;
  return next;
}

std::vector<Move> legal_moves(const Board& board) {
  std::vector<Move> moves;
  Color c = board.to_move();
  for (int row = 0; row < board.size(); ++row) {
    for (int col = 0; col < board.size(); ++col) {
      Move m = Move::play(c, col, row);
      if (!board.check(m)) moves.push_back(m);
    }
  }
  moves.push_back(Move::pass(c));
  return moves;
}

Region classify_region(Point p, int size) {
  int lr = line_number(p.row, size);
  int lc = line_number(p.col, size);
  if (lr <= 5 && lc <= 5) return Region::kCorner;
  if (lr > 5 && lc > 5) return Region::kCenter;
  return Region::kSide;
}

ReplayResult replay(const GameRecord& record) {
  ReplayResult result{Board(record.board_size()), std::nullopt, std::nullopt, {}};
  for (size_t i = 0; i < record.moves.size(); ++i) {
    const Move& m = record.moves[i];
    if (auto err = result.final_board.play(m)) {
      result.first_illegal_index = i;
      result.violation = *err;
      break;
    }
    if (!m.is_pass()) {
      result.per_move_regions.push_back(
          classify_region(*m.point, result.final_board.size()));
    }
  }
  return result;
}

std::string format_result(double margin) {
  if (margin == 0.0) return "Draw";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), std::fabs(margin));
  return std::string(margin > 0 ? "B+" : "W+") + std::string(buf, end);
}

Score score_area(const Board& board, double komi) {
  Score score;
  score.komi = komi;
  const int n = board.size();
  const auto& cells = board.cells();
  std::vector<bool> seen(cells.size(), false);
  for (int i = 0; i < n * n; ++i) {
    if (cells[i] == Cell::kBlack) {
      ++score.black_area;
      continue;
    }
    if (cells[i] == Cell::kWhite) {
      ++score.white_area;
      continue;
    }
    if (seen[i]) continue;
    // Flood the empty region, noting which colors border it.
    int region = 0;
    bool touches_black = false;
    bool touches_white = false;
    std::vector<int> stack{i};
    seen[i] = true;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      ++region;
      int col = cur % n;
      int row = cur / n;
      const int nbrs[4] = {col > 0 ? cur - 1 : -1, col < n - 1 ? cur + 1 : -1,
                           row > 0 ? cur - n : -1, row < n - 1 ? cur + n : -1};
      for (int nb : nbrs) {
        if (nb < 0) continue;
        if (cells[nb] == Cell::kBlack) {
          touches_black = true;
        } else if (cells[nb] == Cell::kWhite) {
          touches_white = true;
        } else if (!seen[nb]) {
          seen[nb] = true;
          stack.push_back(nb);
        }
      }
    }
    if (touches_black && !touches_white) {
      score.black_territory += region;
    } else if (touches_white && !touches_black) {
      score.white_territory += region;
    } else {
      score.neutral += region;
    }
  }
  score.black_area += score.black_territory;
  score.white_area += score.white_territory;
  score.result_text = format_result(score.margin());
  return score;
}

Score score_territory(const Board& board, double komi) {
  return score_area(board, komi);
}

}  // namespace sgflm
