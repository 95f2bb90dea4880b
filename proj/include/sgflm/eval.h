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

#ifndef SGFLM_EVAL_H_
#define SGFLM_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgflm/rules.h"
#include "sgflm/sgf.h"
#include "sgflm/tokenizer.h"

namespace sgflm {

// A game to evaluate plus what decoding had to throw away to recover it.
struct GameInput {
  GameRecord record;
  DecodeReport report;
};

// Wraps a lenient SGF parse; malformed two-letter coordinates count as
// out-of-range moves.
GameInput game_input_from_sgf(std::string_view text, std::string source = {});

struct EvalReport {
  size_t n_games = 0;
  int opening_n = 10;

  struct Syntactic {
    double black_first_rate = 0;
    double alternation_rate = 0;  // first min(30, length) moves, Black first
    double coord_in_range_rate = 0;
    double mean_recovered_moves = 0;
  } syntactic;

  struct Legality {
    double mean_legal_prefix_length = 0;
    double fraction_fully_legal = 0;
    std::map<std::string, size_t> violation_histogram;
  } legality;

  // Pooled over each game's first opening_n non-pass moves.
  struct Opening {
    size_t moves = 0;
    size_t corner = 0;
    size_t side = 0;
    size_t center = 0;
    size_t line_1_2 = 0;
    double corner_fraction = 0;
    double side_fraction = 0;
    double center_fraction = 0;
    double line_1_2_fraction = 0;
  } opening;

  // Final boards of the legal prefixes. Reported only; never used in verdicts.
  struct Scores {
    double komi = 6.5;
    double mean_black_area = 0;
    double mean_white_area = 0;
    double mean_black_territory = 0;
    double mean_white_territory = 0;
    size_t black_leads = 0;
  };
  std::optional<Scores> scores;

  struct OpeningDelta {
    double corner_fraction = 0;
    double side_fraction = 0;
    double center_fraction = 0;
    double line_1_2_fraction = 0;
  };
  std::optional<OpeningDelta> baseline_delta;

  std::string to_json() const;
  static EvalReport from_json(std::string_view text);
  std::string to_table() const;
};

inline constexpr int kAlternationWindow = 30;

// Throws Error("EmptySet") when `games` is empty.
EvalReport evaluate(std::span<const GameInput> games, int opening_n = 10,
                    double komi = 6.5);

// Fills model.baseline_delta with model minus baseline opening fractions.
void attach_baseline(EvalReport& model, const EvalReport& baseline);

// Games whose every move is drawn uniformly from the legal points (a pass
// only when none remain).
std::vector<GameRecord> random_baseline(int n_games, int moves_per_game,
                                        int size, uint64_t seed);

struct ComparisonReport {
  int opening_n = 10;
  std::map<std::string, double> deltas;  // model minus baseline
  double model_corner_fraction = 0;
  double baseline_corner_fraction = 0;
  size_t model_opening_moves = 0;
  size_t baseline_opening_moves = 0;
  double pooled_sigma = 0;  // two-proportion standard error
  bool corner_preference_confirmed = false;

  std::string to_json() const;
  std::string to_table() const;
};

// corner_preference_confirmed iff the model corner fraction exceeds the
// baseline's by more than twice the pooled standard error. Throws
// Error("MismatchedN") when the opening windows differ.
ComparisonReport compare(const EvalReport& model, const EvalReport& baseline);

}  // namespace sgflm

#endif  // SGFLM_EVAL_H_
