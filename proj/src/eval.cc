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

#include "sgflm/eval.h"

#include <cctype>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"

namespace sgflm {

namespace {

using json = nlohmann::ordered_json;

double ratio(size_t num, size_t den, double empty = 0.0) {
  return den == 0 ? empty : static_cast<double>(num) / static_cast<double>(den);
}

bool alternates_from_black(const std::vector<Move>& moves) {
  if (moves.empty()) return false;
  size_t n = std::min<size_t>(kAlternationWindow, moves.size());
  for (size_t i = 0; i < n; ++i) {
    Color expected = i % 2 == 0 ? Color::kBlack : Color::kWhite;
    if (moves[i].color != expected) return false;
  }
  return true;
}

}  // namespace

GameInput game_input_from_sgf(std::string_view text, std::string source) {
  ParseResult parsed = parse_game(text);
  GameInput in{std::move(parsed.record), {}};
  in.record.source = std::move(source);
  for (const auto& d : parsed.diagnostics) {
    if (d.kind == ParseDiagnostic::Kind::kMalformedMove &&
        d.payload.size() == 2 && std::islower(static_cast<unsigned char>(d.payload[0])) &&
        std::islower(static_cast<unsigned char>(d.payload[1]))) {
      ++in.report.out_of_range_moves;
    }
  }
  return in;
}

EvalReport evaluate(std::span<const GameInput> games, int opening_n,
                    double komi) {
  if (games.empty()) throw Error("EmptySet", "no games to evaluate");
  if (opening_n < 1) throw Error("InvalidArgument", "opening_n must be >= 1");

  EvalReport r;
  r.n_games = games.size();
  r.opening_n = opening_n;

  size_t black_first = 0, alternating = 0, in_range = 0, out_of_range = 0;
  size_t recovered = 0, legal_prefix = 0, fully_legal = 0;
  int64_t black_area = 0, white_area = 0, black_terr = 0, white_terr = 0;
  size_t black_leads = 0;

  for (const auto& g : games) {
    const auto& moves = g.record.moves;
    const int size = g.record.board_size();
    recovered += moves.size();
    in_range += moves.size();
    out_of_range += g.report.out_of_range_moves;
    if (!moves.empty() && moves.front().color == Color::kBlack) ++black_first;
    if (alternates_from_black(moves)) ++alternating;

    ReplayResult rep = replay(g.record);
    legal_prefix += rep.legal_prefix_length(moves.size());
    if (!rep.first_illegal_index) {
      ++fully_legal;
    } else {
      ++r.legality.violation_histogram[std::string(to_string(*rep.violation))];
    }

    int taken = 0;
    for (const auto& m : moves) {
      if (taken >= opening_n) break;
      if (m.is_pass()) continue;
      ++taken;
      ++r.opening.moves;
      switch (classify_region(*m.point, size)) {
        case Region::kCorner: ++r.opening.corner; break;
        case Region::kSide: ++r.opening.side; break;
        case Region::kCenter: ++r.opening.center; break;
      }
      if (std::min(line_number(m.point->col, size),
                   line_number(m.point->row, size)) <= 2) {
        ++r.opening.line_1_2;
      }
    }

    Score s = score_area(rep.final_board, komi);
    black_area += s.black_area;
    white_area += s.white_area;
    black_terr += s.black_territory;
    white_terr += s.white_territory;
    if (s.margin() > 0) ++black_leads;
  }

  const size_t n = games.size();
  r.syntactic.black_first_rate = ratio(black_first, n);
  r.syntactic.alternation_rate = ratio(alternating, n);
  r.syntactic.coord_in_range_rate = ratio(in_range, in_range + out_of_range, 1.0);
  r.syntactic.mean_recovered_moves = ratio(recovered, n);
  r.legality.mean_legal_prefix_length = ratio(legal_prefix, n);
  r.legality.fraction_fully_legal = ratio(fully_legal, n);
  r.opening.corner_fraction = ratio(r.opening.corner, r.opening.moves);
  r.opening.side_fraction = ratio(r.opening.side, r.opening.moves);
  r.opening.center_fraction = ratio(r.opening.center, r.opening.moves);
  r.opening.line_1_2_fraction = ratio(r.opening.line_1_2, r.opening.moves);

  EvalReport::Scores scores;
  scores.komi = komi;
  scores.mean_black_area = static_cast<double>(black_area) / n;
  scores.mean_white_area = static_cast<double>(white_area) / n;
  scores.mean_black_territory = static_cast<double>(black_terr) / n;
  scores.mean_white_territory = static_cast<double>(white_terr) / n;
  scores.black_leads = black_leads;
  r.scores = scores;
  return r;
}

void attach_baseline(EvalReport& model, const EvalReport& baseline) {
  if (model.opening_n != baseline.opening_n) {
    throw Error("MismatchedN", "reports use different opening windows");
  }
  model.baseline_delta = EvalReport::OpeningDelta{
      model.opening.corner_fraction - baseline.opening.corner_fraction,
      model.opening.side_fraction - baseline.opening.side_fraction,
      model.opening.center_fraction - baseline.opening.center_fraction,
      model.opening.line_1_2_fraction - baseline.opening.line_1_2_fraction};
}

std::vector<GameRecord> random_baseline(int n_games, int moves_per_game,
                                        int size, uint64_t seed) {
  if (n_games < 1) throw Error("InvalidArgument", "n_games must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<GameRecord> games;
  games.reserve(n_games);
  for (int g = 0; g < n_games; ++g) {
    GameRecord record;
    record.header.set("GM", "1");
    record.header.set("FF", "4");
    record.header.set("SZ", std::to_string(size));
    record.header.set("KM", "6.5");
    record.header.set("PB", "random");
    record.header.set("PW", "random");
    record.source = "random_baseline#" + std::to_string(g + 1);
    Board board(size);
    for (int i = 0; i < moves_per_game; ++i) {
      std::vector<Move> legal = legal_moves(board);
      legal.pop_back();  // the pass
      Move m = Move::pass(board.to_move());
      if (!legal.empty()) {
        std::uniform_int_distribution<size_t> pick(0, legal.size() - 1);
        m = legal[pick(rng)];
      }
      board.play(m);
      record.moves.push_back(m);
    }
    games.push_back(std::move(record));
  }
  return games;
}

ComparisonReport compare(const EvalReport& model, const EvalReport& baseline) {
  if (model.opening_n != baseline.opening_n) {
    throw Error("MismatchedN", "reports use different opening windows (" +
                                   std::to_string(model.opening_n) + " vs " +
                                   std::to_string(baseline.opening_n) + ")");
  }
  ComparisonReport c;
  c.opening_n = model.opening_n;
  auto delta = [&c](const char* name, double a, double b) {
    c.deltas[name] = a - b;
  };
  delta("black_first_rate", model.syntactic.black_first_rate,
        baseline.syntactic.black_first_rate);
  delta("alternation_rate", model.syntactic.alternation_rate,
        baseline.syntactic.alternation_rate);
  delta("coord_in_range_rate", model.syntactic.coord_in_range_rate,
        baseline.syntactic.coord_in_range_rate);
  delta("mean_recovered_moves", model.syntactic.mean_recovered_moves,
        baseline.syntactic.mean_recovered_moves);
  delta("mean_legal_prefix_length", model.legality.mean_legal_prefix_length,
        baseline.legality.mean_legal_prefix_length);
  delta("fraction_fully_legal", model.legality.fraction_fully_legal,
        baseline.legality.fraction_fully_legal);
  delta("corner_fraction", model.opening.corner_fraction,
        baseline.opening.corner_fraction);
  delta("side_fraction", model.opening.side_fraction,
        baseline.opening.side_fraction);
  delta("center_fraction", model.opening.center_fraction,
        baseline.opening.center_fraction);
  delta("line_1_2_fraction", model.opening.line_1_2_fraction,
        baseline.opening.line_1_2_fraction);

  c.model_corner_fraction = model.opening.corner_fraction;
  c.baseline_corner_fraction = baseline.opening.corner_fraction;
  c.model_opening_moves = model.opening.moves;
  c.baseline_opening_moves = baseline.opening.moves;
  const auto n1 = static_cast<double>(model.opening.moves);
  const auto n2 = static_cast<double>(baseline.opening.moves);
  if (n1 > 0 && n2 > 0) {
    double pooled = (static_cast<double>(model.opening.corner) +
                     static_cast<double>(baseline.opening.corner)) /
                    (n1 + n2);
    c.pooled_sigma = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    c.corner_preference_confirmed =
        c.model_corner_fraction - c.baseline_corner_fraction >
        2.0 * c.pooled_sigma;
  }
  return c;
}

std::string EvalReport::to_json() const {
  json j;
  j["n_games"] = n_games;
  j["opening_n"] = opening_n;
  j["syntactic"] = {{"black_first_rate", syntactic.black_first_rate},
                    {"alternation_rate", syntactic.alternation_rate},
                    {"coord_in_range_rate", syntactic.coord_in_range_rate},
                    {"mean_recovered_moves", syntactic.mean_recovered_moves}};
  j["legality"] = {
      {"mean_legal_prefix_length", legality.mean_legal_prefix_length},
      {"fraction_fully_legal", legality.fraction_fully_legal},
      {"violation_histogram", legality.violation_histogram}};
  j["opening"] = {{"moves", opening.moves},
                  {"corner", opening.corner},
                  {"side", opening.side},
                  {"center", opening.center},
                  {"line_1_2", opening.line_1_2},
                  {"corner_fraction", opening.corner_fraction},
                  {"side_fraction", opening.side_fraction},
                  {"center_fraction", opening.center_fraction},
                  {"line_1_2_fraction", opening.line_1_2_fraction}};
  if (scores) {
    j["scores"] = {{"komi", scores->komi},
                   {"mean_black_area", scores->mean_black_area},
                   {"mean_white_area", scores->mean_white_area},
                   {"mean_black_territory", scores->mean_black_territory},
                   {"mean_white_territory", scores->mean_white_territory},
                   {"black_leads", scores->black_leads}};
  } else {
    j["scores"] = nullptr;
  }
  if (baseline_delta) {
    j["baseline_delta"] = {{"corner_fraction", baseline_delta->corner_fraction},
                           {"side_fraction", baseline_delta->side_fraction},
                           {"center_fraction", baseline_delta->center_fraction},
                           {"line_1_2_fraction", baseline_delta->line_1_2_fraction}};
  } else {
    j["baseline_delta"] = nullptr;
  }
  return j.dump(2);
}

EvalReport EvalReport::from_json(std::string_view text) {
  EvalReport r;
  try {
    json j = json::parse(text);
    r.n_games = j.at("n_games");
    r.opening_n = j.at("opening_n");
    const auto& s = j.at("syntactic");
    r.syntactic.black_first_rate = s.at("black_first_rate");
    r.syntactic.alternation_rate = s.at("alternation_rate");
    r.syntactic.coord_in_range_rate = s.at("coord_in_range_rate");
    r.syntactic.mean_recovered_moves = s.at("mean_recovered_moves");
    const auto& l = j.at("legality");
    r.legality.mean_legal_prefix_length = l.at("mean_legal_prefix_length");
    r.legality.fraction_fully_legal = l.at("fraction_fully_legal");
    r.legality.violation_histogram =
        l.at("violation_histogram").get<std::map<std::string, size_t>>();
    const auto& o = j.at("opening");
    r.opening.moves = o.at("moves");
    r.opening.corner = o.at("corner");
    r.opening.side = o.at("side");
    r.opening.center = o.at("center");
    r.opening.line_1_2 = o.at("line_1_2");
    r.opening.corner_fraction = o.at("corner_fraction");
    r.opening.side_fraction = o.at("side_fraction");
    r.opening.center_fraction = o.at("center_fraction");
    r.opening.line_1_2_fraction = o.at("line_1_2_fraction");
    if (j.contains("scores") && !j["scores"].is_null()) {
      const auto& sc = j["scores"];
      r.scores = Scores{sc.at("komi"),
                        sc.at("mean_black_area"),
                        sc.at("mean_white_area"),
                        sc.at("mean_black_territory"),
                        sc.at("mean_white_territory"),
                        sc.at("black_leads")};
    }
    if (j.contains("baseline_delta") && !j["baseline_delta"].is_null()) {
      const auto& d = j["baseline_delta"];
      r.baseline_delta = OpeningDelta{d.at("corner_fraction"), d.at("side_fraction"),
                                      d.at("center_fraction"),
                                      d.at("line_1_2_fraction")};
    }
  } catch (const json::exception& e) {
    throw Error("InvalidReport", std::string("cannot read eval report: ") + e.what());
  }
  return r;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  auto row = [&out](const std::string& name, auto value) {
    out << std::left << std::setw(28) << name << value << "\n";
  };
  row("games", n_games);
  row("black_first_rate", syntactic.black_first_rate);
  row("alternation_rate", syntactic.alternation_rate);
  row("coord_in_range_rate", syntactic.coord_in_range_rate);
  row("mean_recovered_moves", syntactic.mean_recovered_moves);
  row("mean_legal_prefix_length", legality.mean_legal_prefix_length);
  row("fraction_fully_legal", legality.fraction_fully_legal);
  for (const auto& [kind, count] : legality.violation_histogram) {
    row("  violation " + kind, count);
  }
  row("opening_n", opening_n);
  row("opening_moves", opening.moves);
  row("corner_fraction", opening.corner_fraction);
  row("side_fraction", opening.side_fraction);
  row("center_fraction", opening.center_fraction);
  row("line_1_2_fraction", opening.line_1_2_fraction);
  if (scores) {
    row("mean_black_area", scores->mean_black_area);
    row("mean_white_area", scores->mean_white_area);
    row("mean_black_territory", scores->mean_black_territory);
    row("mean_white_territory", scores->mean_white_territory);
  }
  if (baseline_delta) {
    row("delta corner_fraction", baseline_delta->corner_fraction);
    row("delta line_1_2_fraction", baseline_delta->line_1_2_fraction);
  }
  return out.str();
}

std::string ComparisonReport::to_json() const {
  json j;
  j["opening_n"] = opening_n;
  j["deltas"] = deltas;
  j["model_corner_fraction"] = model_corner_fraction;
  j["baseline_corner_fraction"] = baseline_corner_fraction;
  j["model_opening_moves"] = model_opening_moves;
  j["baseline_opening_moves"] = baseline_opening_moves;
  j["pooled_sigma"] = pooled_sigma;
  j["corner_preference_confirmed"] = corner_preference_confirmed;
  return j.dump(2);
}

std::string ComparisonReport::to_table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const auto& [name, d] : deltas) {
    out << std::left << std::setw(28) << ("delta " + name) << d << "\n";
  }
  out << std::left << std::setw(28) << "model corner" << model_corner_fraction
      << " (n=" << model_opening_moves << ")\n";
  out << std::left << std::setw(28) << "baseline corner"
      << baseline_corner_fraction << " (n=" << baseline_opening_moves << ")\n";
  out << std::left << std::setw(28) << "2 x pooled sigma" << 2 * pooled_sigma
      << "\n";
  out << "verdict: corner preference "
      << (corner_preference_confirmed ? "confirmed" : "not confirmed") << "\n";
  return out.str();
}

}  // namespace sgflm
