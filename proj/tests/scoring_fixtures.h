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

// 5x5 positions with area and territory counted by hand.

#ifndef SGFLM_TESTS_SCORING_FIXTURES_H_
#define SGFLM_TESTS_SCORING_FIXTURES_H_

#include <array>

namespace testing_fixtures {

struct ScoringFixture {
  const char* name;
  const char* diagram;
  double komi;
  int black_area, white_area, black_territory, white_territory, neutral;
  const char* result;
};

inline constexpr std::array<ScoringFixture, 5> kScoringFixtures{{
    // Nothing on the board: every point reaches neither color.
    {"empty", ".....\n.....\n.....\n.....\n.....", 6.5, 0, 0, 0, 0, 25,
     "W+6.5"},
    // 24 empties all reach only the black stone.
    {"lone_stone", ".....\n.....\n..X..\n.....\n.....", 6.5, 25, 0, 24, 0, 0,
     "B+18.5"},
    // Column 0 is black's, column 4 white's, column 2 touches both.
    {"walls", ".X.O.\n.X.O.\n.X.O.\n.X.O.\n.X.O.", 6.5, 10, 10, 5, 5, 5,
     "W+6.5"},
    // Black eyes at (col,row) (1,0) and (0,3); white at (4,0), (4,2), (3,3).
    {"eyes", "X.XO.\nXXXOO\nXXOO.\n.XO.O\nXXOOO", 6.5, 12, 13, 2, 3, 0,
     "W+7.5"},
    // One eye each plus a 13-point region touching both colors.
    {"dame", "XX.OO\n.X.O.\nXX.OO\n.....\n.....", 0.0, 6, 6, 1, 1, 13,
     "Draw"},
}};

}  // namespace testing_fixtures

#endif  // SGFLM_TESTS_SCORING_FIXTURES_H_
