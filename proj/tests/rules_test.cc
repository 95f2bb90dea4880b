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

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "oracles/naive_rules.h"
#include "scoring_fixtures.h"

namespace sgflm {
namespace {

Move B(int col, int row) { return Move::play(Color::kBlack, col, row); }
Move W(int col, int row) { return Move::play(Color::kWhite, col, row); }

TEST(Board, FirstMoveOnEmptyBoard) {
  Board board;
  ASSERT_FALSE(board.play(B(16, 3)));
  EXPECT_EQ(board.at({16, 3}), Cell::kBlack);
  EXPECT_EQ(board.captures(Color::kBlack), 0);
  EXPECT_EQ(board.to_move(), Color::kWhite);
  EXPECT_EQ(board.stones_on_board(), 1);
}

TEST(Board, CornerCapture) {
  Board board = Board::from_diagram(
      "O....\n.....\n.....\n.....\n.....", Color::kBlack);
  ASSERT_FALSE(board.play(B(0, 1)));
  board.set_to_move(Color::kBlack);
  ASSERT_FALSE(board.play(B(1, 0)));
  EXPECT_EQ(board.captures(Color::kBlack), 1);
  EXPECT_EQ(board.at({0, 0}), Cell::kEmpty);
}

TEST(Board, KoRecaptureIsSuperko) {
  Board board = Board::from_diagram(
      ".XO..\n"
      "XO.O.\n"
      ".XO..\n"
      ".....\n"
      ".....",
      Color::kBlack);
  const std::string before = board.to_diagram();
  ASSERT_FALSE(board.play(B(2, 1)));
  EXPECT_EQ(board.captures(Color::kBlack), 1);
  EXPECT_EQ(board.at({1, 1}), Cell::kEmpty);
  auto err = board.check(W(1, 1));
  ASSERT_TRUE(err);
  EXPECT_EQ(*err, RuleError::kSuperko);
  // Rejected moves leave the board as it was.
  EXPECT_EQ(board.play(W(1, 1)), RuleError::kSuperko);
  EXPECT_NE(board.to_diagram(), before);
  EXPECT_EQ(board.to_move(), Color::kWhite);
}

TEST(Board, ErrorKinds) {
  Board board(9);
  ASSERT_FALSE(board.play(B(4, 4)));
  EXPECT_EQ(board.check(W(4, 4)), RuleError::kOccupied);
  EXPECT_EQ(board.check(B(0, 0)), RuleError::kWrongTurn);
  EXPECT_EQ(board.check(W(9, 0)), RuleError::kOffBoard);
  Board eye = Board::from_diagram(".X\nX.", Color::kWhite);
  EXPECT_EQ(eye.check(W(0, 0)), RuleError::kSuicide);
}

TEST(Board, PassFlipsTurnOnly) {
  Board board(9);
  ASSERT_FALSE(board.play(B(2, 2)));
  Board before = board;
  ASSERT_FALSE(board.play(Move::pass(Color::kWhite)));
  EXPECT_EQ(board.cells(), before.cells());
  EXPECT_EQ(board.to_move(), Color::kBlack);
}

TEST(ApplyMove, ValueSemantics) {
  Board board(9);
  auto next = apply_move(board, B(3, 3));
  ASSERT_TRUE(std::holds_alternative<Board>(next));
  EXPECT_EQ(board.stones_on_board(), 0);
  EXPECT_EQ(std::get<Board>(next).stones_on_board(), 1);
  auto bad = apply_move(std::get<Board>(next), W(3, 3));
  ASSERT_TRUE(std::holds_alternative<RuleError>(bad));
  EXPECT_EQ(std::get<RuleError>(bad), RuleError::kOccupied);
}

TEST(LegalMoves, EmptyBoard) {
  auto moves = legal_moves(Board());
  EXPECT_EQ(moves.size(), 362u);
  EXPECT_TRUE(moves.back().is_pass());
}

TEST(LegalMoves, ExcludesSuicidePoint) {
  Board board = Board::from_diagram(
      ".OOOO\n"
      "OOOOO\n"
      "OOXXX\n"
      "OOX.X\n"
      "OOXXX",
      Color::kBlack);
  auto moves = legal_moves(board);
  ASSERT_EQ(moves.size(), 2u);
  EXPECT_EQ(moves[0], B(0, 0));  // captures the whole white group
  EXPECT_TRUE(moves[1].is_pass());
  EXPECT_EQ(board.check(B(3, 3)), RuleError::kSuicide);
}

TEST(LegalMoves, AgreesWithApplyMoveOnRandomPositions) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    Board board(9);
    int plies = std::uniform_int_distribution<int>(0, 80)(rng);
    for (int i = 0; i < plies; ++i) {
      auto moves = legal_moves(board);
      std::uniform_int_distribution<size_t> pick(0, moves.size() - 1);
      ASSERT_FALSE(board.play(moves[pick(rng)]));
    }
    std::vector<Move> brute;
    for (int r = 0; r < 9; ++r) {
      for (int c = 0; c < 9; ++c) {
        Move m = Move::play(board.to_move(), c, r);
        if (std::holds_alternative<Board>(apply_move(board, m))) {
          brute.push_back(m);
        }
      }
    }
    brute.push_back(Move::pass(board.to_move()));
    ASSERT_EQ(legal_moves(board), brute) << board.to_diagram();
  }
}

naive::Verdict to_verdict(std::optional<RuleError> e) {
  if (!e) return naive::Verdict::kLegal;
  switch (*e) {
    case RuleError::kOccupied: return naive::Verdict::kOccupied;
    case RuleError::kSuicide: return naive::Verdict::kSuicide;
    case RuleError::kSuperko: return naive::Verdict::kSuperko;
    default: return static_cast<naive::Verdict>(-1);
  }
}

TEST(Board, MatchesNaiveOracle) {
  std::mt19937_64 rng(5);
  size_t decisions = 0;
  std::map<naive::Verdict, size_t> seen;
  while (decisions < 10000) {
    Board board(9);
    naive::Game oracle(9);
    for (int ply = 0; ply < 200; ++ply) {
      int point = std::uniform_int_distribution<int>(0, 80)(rng);
      Move m = Move::play(board.to_move(), point % 9, point / 9);
      std::string after;
      char stone = board.to_move() == Color::kBlack ? 'X' : 'O';
      naive::Verdict expected = oracle.try_play(stone, point, &after);
      auto err = board.play(m);
      ++decisions;
      ++seen[expected];
      ASSERT_EQ(to_verdict(err), expected) << board.to_diagram();
      if (!err) {
        oracle.commit(after);
      } else {
        ASSERT_FALSE(board.play(Move::pass(board.to_move())));
      }
      std::string grid;
      for (Cell c : board.cells()) {
        grid += c == Cell::kEmpty ? '.' : c == Cell::kBlack ? 'X' : 'O';
      }
      ASSERT_EQ(grid, oracle.grid);
    }
  }
  EXPECT_GT(seen[naive::Verdict::kSuicide], 0u);
  EXPECT_GT(seen[naive::Verdict::kSuperko], 0u);
}

TEST(Board, RandomGameInvariants) {
  std::mt19937_64 rng(7);
  for (int game = 0; game < 50; ++game) {
    Board board(9);
    std::map<uint64_t, std::string> by_hash;
    by_hash[board.fingerprint()] = board.to_diagram();
    int stones_played = 0;
    for (int ply = 0; ply < 150; ++ply) {
      auto moves = legal_moves(board);
      Move m = moves[std::uniform_int_distribution<size_t>(0, moves.size() - 1)(rng)];
      ASSERT_FALSE(board.play(m));
      if (!m.is_pass()) ++stones_played;
      // Conservation.
      ASSERT_EQ(board.stones_on_board() + board.captures(Color::kBlack) +
                    board.captures(Color::kWhite),
                stones_played);
      // Fingerprint equality coincides with grid equality.
      std::string diagram = board.to_diagram();
      auto [it, inserted] = by_hash.emplace(board.fingerprint(), diagram);
      if (!inserted) ASSERT_EQ(it->second, diagram);
    }
  }
}

TEST(Board, NoZeroLibertyGroupsAfterMoves) {
  std::mt19937_64 rng(8);
  for (int game = 0; game < 30; ++game) {
    Board board(9);
    naive::Game view(9);
    for (int ply = 0; ply < 120; ++ply) {
      auto moves = legal_moves(board);
      Move m = moves[std::uniform_int_distribution<size_t>(0, moves.size() - 1)(rng)];
      ASSERT_FALSE(board.play(m));
      std::string grid;
      for (Cell c : board.cells()) {
        grid += c == Cell::kEmpty ? '.' : c == Cell::kBlack ? 'X' : 'O';
      }
      for (int i = 0; i < 81; ++i) {
        if (grid[i] == '.') continue;
        int libs = 0;
        view.group(grid, i, &libs);
        ASSERT_GT(libs, 0) << board.to_diagram();
      }
    }
  }
}

TEST(Replay, TwoMoves) {
  GameRecord record;
  record.moves = {B(16, 3), W(15, 15)};
  ReplayResult r = replay(record);
  EXPECT_FALSE(r.first_illegal_index);
  EXPECT_EQ(r.final_board.stones_on_board(), 2);
  EXPECT_EQ(r.per_move_regions,
            (std::vector<Region>{Region::kCorner, Region::kCorner}));
}

TEST(Replay, RepeatedPointStopsAtIndexOne) {
  GameRecord record;
  record.moves = {B(16, 3), W(16, 3), B(3, 3)};
  ReplayResult r = replay(record);
  ASSERT_TRUE(r.first_illegal_index);
  EXPECT_EQ(*r.first_illegal_index, 1u);
  EXPECT_EQ(r.violation, RuleError::kOccupied);
  EXPECT_EQ(r.legal_prefix_length(record.moves.size()), 1u);
  EXPECT_EQ(r.final_board.stones_on_board(), 1);
}

TEST(Replay, WrongTurnIsAViolation) {
  GameRecord record;
  record.moves = {B(3, 3), B(4, 4)};
  ReplayResult r = replay(record);
  ASSERT_TRUE(r.first_illegal_index);
  EXPECT_EQ(*r.first_illegal_index, 1u);
  EXPECT_EQ(r.violation, RuleError::kWrongTurn);
}

TEST(Score, SingleBlackStone) {
  Board board;
  ASSERT_FALSE(board.play(B(3, 3)));
  Score s = score_area(board, 6.5);
  EXPECT_EQ(s.black_area, 361);
  EXPECT_EQ(s.white_area, 0);
  EXPECT_EQ(s.black_territory, 360);
  EXPECT_EQ(s.result_text, "B+354.5");
}

TEST(Score, EmptyBoard) {
  Score s = score_area(Board(), 6.5);
  EXPECT_EQ(s.black_area, 0);
  EXPECT_EQ(s.white_area, 0);
  EXPECT_EQ(s.neutral, 361);
  EXPECT_EQ(s.result_text, "W+6.5");
}

TEST(Score, HandComputedFixtures) {
  for (const auto& f : testing_fixtures::kScoringFixtures) {
    SCOPED_TRACE(f.name);
    Board board = Board::from_diagram(f.diagram);
    Score s = score_area(board, f.komi);
    EXPECT_EQ(s.black_area, f.black_area);
    EXPECT_EQ(s.white_area, f.white_area);
    EXPECT_EQ(s.black_territory, f.black_territory);
    EXPECT_EQ(s.white_territory, f.white_territory);
    EXPECT_EQ(s.neutral, f.neutral);
    EXPECT_EQ(s.result_text, f.result);
    EXPECT_EQ(s.black_area + s.white_area + s.neutral, 25);
    Score t = score_territory(board, f.komi);
    EXPECT_EQ(t.black_territory, f.black_territory);
    EXPECT_EQ(t.white_territory, f.white_territory);
  }
}

TEST(Score, AreaPartitionOnRandomPositions) {
  std::mt19937_64 rng(9);
  for (int game = 0; game < 200; ++game) {
    Board board(9);
    int plies = std::uniform_int_distribution<int>(0, 120)(rng);
    for (int i = 0; i < plies; ++i) {
      auto moves = legal_moves(board);
      ASSERT_FALSE(board.play(
          moves[std::uniform_int_distribution<size_t>(0, moves.size() - 1)(rng)]));
    }
    Score s = score_area(board, 6.5);
    EXPECT_EQ(s.black_area + s.white_area + s.neutral, 81);
    EXPECT_DOUBLE_EQ(s.margin(), s.black_area - s.white_area - 6.5);
  }
}

TEST(FormatResult, Forms) {
  EXPECT_EQ(format_result(354.5), "B+354.5");
  EXPECT_EQ(format_result(-7.5), "W+7.5");
  EXPECT_EQ(format_result(3.0), "B+3");
  EXPECT_EQ(format_result(0.0), "Draw");
}

TEST(Region, Examples) {
  EXPECT_EQ(classify_region({0, 0}, 19), Region::kCorner);
  EXPECT_EQ(classify_region({9, 9}, 19), Region::kCenter);
  EXPECT_EQ(classify_region({9, 0}, 19), Region::kSide);
  EXPECT_EQ(classify_region({4, 4}, 19), Region::kCorner);
  EXPECT_EQ(classify_region({5, 4}, 19), Region::kSide);
  EXPECT_EQ(classify_region({14, 14}, 19), Region::kCorner);
}

TEST(Region, CountsOn19x19) {
  std::map<Region, int> counts;
  for (int r = 0; r < 19; ++r) {
    for (int c = 0; c < 19; ++c) ++counts[classify_region({c, r}, 19)];
  }
  EXPECT_EQ(counts[Region::kCorner], 100);
  EXPECT_EQ(counts[Region::kCenter], 81);
  EXPECT_EQ(counts[Region::kSide], 180);
}

}  // namespace
}  // namespace sgflm
