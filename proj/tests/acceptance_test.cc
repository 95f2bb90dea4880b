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

// End-to-end acceptance checks. Prints one PASS/FAIL line per check and
// exits nonzero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles/finite_diff.h"
#include "oracles/naive_rules.h"
#include "scoring_fixtures.h"
#include "sgflm/error.h"
#include "sgflm/eval.h"
#include "sgflm/rules.h"
#include "sgflm/sgf.h"
#include "sgflm/tokenizer.h"
#include "sgflm/train.h"
#include "test_paths.h"

namespace fs = std::filesystem;
using namespace sgflm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

struct Options {
  fs::path work_dir = fs::temp_directory_path() / "sgflm-acceptance";
  fs::path games_dir = test_paths::kGamesDir;
  double learning_rate = 1e-3;
  std::string window_align = "game";
  double temperature = 0.7;
  int64_t steps = 2000;
  uint64_t seed = 1;
};

// State shared between criteria: the corpus and the long training run.
struct Shared {
  std::vector<fs::path> files;
  std::string corpus;
  std::vector<int32_t> stream;
  std::optional<Checkpoint> step_100, step_200, final_ckpt;
  std::optional<Outcome> training_failure;
};

ModelConfig default_model(uint64_t seed) {
  ModelConfig c;
  c.seed = seed;
  return c;
}

TrainConfig default_train(const Options& opt) {
  TrainConfig t;
  t.learning_rate = opt.learning_rate;
  t.total_steps = opt.steps;
  t.seed = opt.seed;
  t.window_align = opt.window_align;
  return t;
}

std::string checkpoint_bytes(const Checkpoint& ckpt, const fs::path& path) {
  save_checkpoint(ckpt, path);
  return read_file(path);
}

Outcome round_trip(const Shared& s) {
  auto start = Clock::now();
  size_t identical = 0;
  std::string first_bad;
  for (const auto& f : s.files) {
    ParseResult a = parse_game(read_file(f));
    ParseResult b = parse_game(serialize_game(a.record));
    if (a.record == b.record && serialize_game(b.record) == serialize_game(a.record)) {
      ++identical;
    } else if (first_bad.empty()) {
      first_bad = f.filename().string();
    }
  }
  double t = seconds_since(start);
  bool pass = s.files.size() >= 100 && identical == s.files.size() && t < 5.0;
  return {pass, fmt("%zu/%zu games identical in %.2f s%s%s", identical, s.files.size(),
                    t, first_bad.empty() ? "" : ", first mismatch ", first_bad.c_str())};
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

Outcome rules_oracle() {
  auto start = Clock::now();
  std::mt19937_64 rng(2020);
  size_t decisions = 0, agree = 0;
  std::map<naive::Verdict, size_t> seen;
  while (decisions < 20000) {
    Board board(9);
    naive::Game oracle(9);
    for (int ply = 0; ply < 200; ++ply) {
      int point = std::uniform_int_distribution<int>(0, 80)(rng);
      Move m = Move::play(board.to_move(), point % 9, point / 9);
      char stone = board.to_move() == Color::kBlack ? 'X' : 'O';
      std::string after;
      naive::Verdict expected = oracle.try_play(stone, point, &after);
      auto err = board.play(m);
      ++decisions;
      ++seen[expected];
      if (to_verdict(err) == expected) ++agree;
      if (!err) {
        oracle.commit(after);
      } else {
        board.play(Move::pass(board.to_move()));
      }
      std::string grid;
      for (Cell c : board.cells()) {
        grid += c == Cell::kEmpty ? '.' : c == Cell::kBlack ? 'X' : 'O';
      }
      // Start a fresh game on divergence so one bug does not cascade.
      if (grid != oracle.grid) break;
    }
  }
  double t = seconds_since(start);
  bool pass = agree == decisions && t < 120.0;
  return {pass, fmt("%zu/%zu decisions agree (%zu suicide, %zu superko) in %.1f s", agree,
                    decisions, seen[naive::Verdict::kSuicide],
                    seen[naive::Verdict::kSuperko], t)};
}

Outcome corpus_legality(const Shared& s) {
  std::vector<GameInput> games;
  for (const auto& f : s.files) games.push_back(game_input_from_sgf(read_file(f), f.string()));
  EvalReport r = evaluate(games);
  return {r.legality.fraction_fully_legal == 1.0,
          fmt("fraction_fully_legal %.4f over %zu games, mean legal prefix %.1f",
              r.legality.fraction_fully_legal, r.n_games,
              r.legality.mean_legal_prefix_length)};
}

Outcome gradient() {
  auto start = Clock::now();
  ModelConfig c;
  c.vocab_size = 11;
  c.context_length = 8;
  c.embed_dim = 8;
  c.num_layers = 1;
  c.num_heads = 2;
  finite_diff::GradCheck r = finite_diff::gradient_check(c);
  double t = seconds_since(start);
  return {r.max_rel_error < 1e-4 && t < 60.0,
          fmt("max relative error %.3g (%s) in %.2f s", r.max_rel_error,
              r.worst_tensor.c_str(), t)};
}

Outcome initial_loss(const Shared& s, const Options& opt) {
  Transformer<float> model(default_model(opt.seed));
  model.init(opt.seed);
  const size_t len = model.config().context_length;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<size_t> start(0, s.stream.size() - len - 1);
  std::vector<float> grad(model.params().size());
  double total = 0;
  const int batches = 16;
  for (int b = 0; b < batches; ++b) {
    size_t at = start(rng);
    std::span<const int32_t> window(s.stream.data() + at, len + 1);
    total += model.forward_backward(window.first(len), window.last(len), grad);
  }
  double loss = total / batches;
  double target = std::log(727.0);
  double rel = std::abs(loss - target) / target;
  return {rel <= 0.05, fmt("mean loss %.4f vs ln 727 = %.4f (%.2f%% off)", loss, target,
                           100 * rel)};
}

// Cross-entropy of the MoveLevel stream under its own token frequencies,
// counted from the corpus text with a regex rather than the tokenizer.
double unigram_entropy(std::string_view corpus) {
  static const std::regex move(";([BW])\\[([a-s][a-s]|tt|)\\]");
  std::map<std::string, double> counts;
  double total = 0;
  for (std::string_view line : corpus_lines(corpus)) {
    std::string text(line);
    counts["<bos>"] += 1;
    counts["<eos>"] += 1;
    total += 2;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), move);
         it != std::sregex_iterator(); ++it) {
      std::string key = (*it)[1].str() + (*it)[2].str();
      if (key.size() == 1 || key.substr(1) == "tt") key = key.substr(0, 1) + "pass";
      counts[key] += 1;
      total += 1;
    }
  }
  double h = 0;
  for (const auto& [k, n] : counts) h -= n / total * std::log(n / total);
  return h;
}

void run_training(Shared& s, const Options& opt) {
  try {
    Trainer trainer(default_model(opt.seed), default_train(opt),
                    Vocabulary::move_level(), s.stream);
    while (trainer.step_count() < opt.steps) {
      trainer.step();
      if (trainer.step_count() == 100) s.step_100 = trainer.checkpoint();
      if (trainer.step_count() == 200) s.step_200 = trainer.checkpoint();
      if (trainer.step_count() % 250 == 0) {
        const auto& h = trainer.loss_history();
        double recent = std::accumulate(h.end() - 100, h.end(), 0.0) / 100;
        std::fprintf(stderr, "  training step %lld, last-100 mean loss %.4f\n",
                     static_cast<long long>(trainer.step_count()), recent);
      }
    }
    s.final_ckpt = trainer.checkpoint();
    save_checkpoint(*s.final_ckpt, opt.work_dir / "step-final.ckpt");
  } catch (const Error& e) {
    s.training_failure = Outcome{false, std::string("training failed: ") + e.what()};
  }
}

Outcome training_progress(Shared& s, const Options& opt) {
  auto start = Clock::now();
  run_training(s, opt);
  double t = seconds_since(start);
  if (s.training_failure) return *s.training_failure;
  const auto& h = s.final_ckpt->loss_history;
  if (h.size() < 200) return {false, "fewer than 200 steps"};
  double first = std::accumulate(h.begin(), h.begin() + 100, 0.0) / 100;
  double last = std::accumulate(h.end() - 100, h.end(), 0.0) / 100;
  double entropy = unigram_entropy(s.corpus);
  bool pass = last < 0.6 * first && last < entropy && t < 1800.0;
  return {pass, fmt("%zu steps at lr %g, %s windows: first-100 %.4f, final-100 %.4f (bound %.4f), "
                    "unigram entropy %.4f, %.0f s",
                    h.size(), opt.learning_rate, opt.window_align.c_str(), first, last, 0.6 * first, entropy, t)};
}

std::vector<GameInput> sample_games(const Shared& s, const Options& opt, int n) {
  Transformer<float> model = model_from_checkpoint(*s.final_ckpt);
  Vocabulary vocab = s.final_ckpt->vocab;
  std::vector<GameInput> games;
  for (int i = 0; i < n; ++i) {
    SampleOptions so;
    so.max_length = model.config().context_length;
    so.temperature = opt.temperature;
    so.top_k = 0;
    so.seed = mix_seed(opt.seed, static_cast<uint64_t>(i));
    DecodeResult d = decode(sample(model, vocab, so), vocab);
    games.push_back({d.record, d.report});
  }
  return games;
}

Outcome rhythm(const std::vector<GameInput>& games) {
  size_t good = 0;
  for (const auto& g : games) {
    const auto& moves = g.record.moves;
    bool ok = !moves.empty() && moves[0].color == Color::kBlack;
    size_t window = std::min<size_t>(moves.size(), kAlternationWindow);
    for (size_t i = 1; ok && i < window; ++i) ok = moves[i].color != moves[i - 1].color;
    good += ok;
  }
  double rate = static_cast<double>(good) / games.size();
  return {rate >= 0.8, fmt("%zu/%zu games Black first and alternating over 30 moves",
                           good, games.size())};
}

Outcome corner_preference(const std::vector<GameInput>& games, const Options& opt) {
  EvalReport model = evaluate(games, 10);
  std::vector<GameInput> base;
  for (auto& r : random_baseline(100, 10, 19, mix_seed(opt.seed, 8))) base.push_back({r, {}});
  EvalReport baseline = evaluate(base, 10);
  ComparisonReport c = compare(model, baseline);
  const double p = 100.0 / 361.0;
  double sigma = std::sqrt(p * (1 - p) / baseline.opening.moves);
  bool baseline_ok = std::abs(baseline.opening.corner_fraction - p) <= 3 * sigma;
  return {c.corner_preference_confirmed && baseline_ok,
          fmt("model %.4f (%zu moves) vs baseline %.4f (%zu moves), delta %.4f, "
              "2 sigma %.4f; baseline %.2f sigma from 100/361",
              c.model_corner_fraction, c.model_opening_moves, c.baseline_corner_fraction,
              c.baseline_opening_moves,
              c.model_corner_fraction - c.baseline_corner_fraction, 2 * c.pooled_sigma,
              (baseline.opening.corner_fraction - p) / sigma)};
}

Outcome resume(Shared& s, const Options& opt) {
  if (!s.step_100 || !s.step_200) return {false, "training run did not reach step 200"};
  Trainer resumed(load_checkpoint(opt.work_dir / "step-100.ckpt"), s.stream);
  while (resumed.step_count() < 200) resumed.step();
  Checkpoint r = resumed.checkpoint();
  bool losses = r.loss_history == s.step_200->loss_history;
  bool bytes = checkpoint_bytes(r, opt.work_dir / "resumed-200.ckpt") ==
               checkpoint_bytes(*s.step_200, opt.work_dir / "straight-200.ckpt");
  return {losses && bytes, fmt("loss sequence %s, step-200 checkpoint %s",
                               losses ? "identical" : "differs",
                               bytes ? "byte-identical" : "differs")};
}

Outcome scoring() {
  size_t exact = 0;
  std::string first_bad;
  for (const auto& f : testing_fixtures::kScoringFixtures) {
    Score a = score_area(Board::from_diagram(f.diagram), f.komi);
    Score t = score_territory(Board::from_diagram(f.diagram), f.komi);
    bool ok = a.black_area == f.black_area && a.white_area == f.white_area &&
              a.black_territory == f.black_territory &&
              a.white_territory == f.white_territory && a.neutral == f.neutral &&
              a.result_text == f.result && t.black_territory == f.black_territory &&
              t.white_territory == f.white_territory;
    if (ok) {
      ++exact;
    } else if (first_bad.empty()) {
      first_bad = f.name;
    }
  }
  return {exact == testing_fixtures::kScoringFixtures.size(),
          fmt("%zu/%zu fixtures exact%s%s", exact, testing_fixtures::kScoringFixtures.size(),
              first_bad.empty() ? "" : ", first mismatch ", first_bad.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"sgflm acceptance checks"};
  app.add_option("--work-dir", opt.work_dir, "scratch directory for checkpoints");
  app.add_option("--games", opt.games_dir, "directory of .sgf files");
  app.add_option("--lr", opt.learning_rate, "learning rate of the training run");
  app.add_option("--steps", opt.steps, "training steps")->check(CLI::Range(200, 1000000));
  app.add_option("--seed", opt.seed, "model and training seed");
  app.add_option("--window-align", opt.window_align, "token or game");
  app.add_option("--temperature", opt.temperature, "sampling temperature");
  CLI11_PARSE(app, argc, argv);

  fs::create_directories(opt.work_dir);
  Shared s;
  s.files = list_sgf_files(opt.games_dir);
  s.corpus = preprocess_corpus(s.files).corpus;
  s.stream = build_token_stream(s.corpus, Vocabulary::move_level(), nullptr);

  int failures = 0;
  auto report = [&](int n, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "sgf round trip", [&] { return round_trip(s); });
  report(2, "rules oracle equivalence", rules_oracle);
  report(3, "corpus legality", [&] { return corpus_legality(s); });
  report(4, "gradient check", gradient);
  report(5, "initial loss", [&] { return initial_loss(s, opt); });
  report(6, "training progress", [&] {
    Outcome o = training_progress(s, opt);
    if (s.step_100) save_checkpoint(*s.step_100, opt.work_dir / "step-100.ckpt");
    return o;
  });

  std::vector<GameInput> games;
  if (s.final_ckpt) games = sample_games(s, opt, 100);
  report(7, "rhythm", [&] {
    return games.empty() ? Outcome{false, "no checkpoint"} : rhythm(games);
  });
  report(8, "corner preference", [&] {
    return games.empty() ? Outcome{false, "no checkpoint"} : corner_preference(games, opt);
  });
  report(9, "resume equivalence", [&] { return resume(s, opt); });
  report(10, "scoring fixtures", scoring);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
