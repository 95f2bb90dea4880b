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

#include "sgflm/cli.h"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgflm/eval.h"
#include "sgflm/rules.h"
#include "sgflm/sgf.h"
#include "sgflm/tokenizer.h"
#include "sgflm/train.h"

namespace sgflm {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "sgflm 1.0.0";

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("IoError", "write failed for " + path.string());
  }
  fs::rename(tmp, path);
}

// Records what a run did, next to its outputs. A run that fails leaves a
// manifest with status "failed".
class RunManifest {
 public:
  RunManifest(std::string subcommand, fs::path path)
      : path_(std::move(path)), start_(utc_now()) {
    doc_["subcommand"] = std::move(subcommand);
    doc_["tool_version"] = kToolVersion;
    doc_["options"] = json::object();
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
    doc_["seeds"] = json::object();
  }

  template <typename V>
  void option(const std::string& key, const V& value) {
    doc_["options"][key] = value;
  }
  void input(const fs::path& p) { doc_["inputs"].push_back(p.string()); }
  void output(const fs::path& p) { doc_["outputs"].push_back(p.string()); }
  void seed(const std::string& key, uint64_t s) { doc_["seeds"][key] = s; }

  void finish(const std::string& status) {
    doc_["status"] = status;
    doc_["start_time"] = start_;
    doc_["end_time"] = utc_now();
    write_text(path_, doc_.dump(2) + "\n");
  }

 private:
  fs::path path_;
  std::string start_;
  json doc_;
};

// Runs `body`, then finalizes the manifest either way.
template <typename F>
void with_manifest(RunManifest& manifest, F&& body) {
  try {
    body();
  } catch (...) {
    try {
      manifest.finish("failed");
    } catch (...) {
    }
    throw;
  }
  manifest.finish("complete");
}

fs::path manifest_for_file(const fs::path& out) {
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

GameRecord load_sgf(const fs::path& path) {
  GameRecord record = parse_game(read_file(path)).record;
  record.source = path.string();
  return record;
}

// Flat "key = value" config mirroring ModelConfig and TrainConfig. Lines
// starting with '#' are comments.
void apply_config_file(const fs::path& path, ModelConfig& model,
                       TrainConfig& train, bool* model_seed_set) {
  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto eq = line.find('=');
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) {
      throw Error("InvalidConfig", path.string() + ":" +
                                       std::to_string(line_no) +
                                       ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "context_length") model.context_length = std::stoi(value);
      else if (key == "embed_dim") model.embed_dim = std::stoi(value);
      else if (key == "num_layers") model.num_layers = std::stoi(value);
      else if (key == "num_heads") model.num_heads = std::stoi(value);
      else if (key == "mlp_ratio") model.mlp_ratio = std::stoi(value);
      else if (key == "model_seed") {
        model.seed = std::stoull(value);
        *model_seed_set = true;
      } else if (key == "vocab_size") {
        // Derived from the vocabulary mode; accepted for completeness.
        model.vocab_size = std::stoi(value);
      } else if (key == "learning_rate") train.learning_rate = std::stod(value);
      else if (key == "batch_size") train.batch_size = std::stoi(value);
      else if (key == "beta1") train.beta1 = std::stod(value);
      else if (key == "beta2") train.beta2 = std::stod(value);
      else if (key == "epsilon") train.epsilon = std::stod(value);
      else if (key == "total_steps") train.total_steps = std::stoll(value);
      else if (key == "checkpoint_every") train.checkpoint_every = std::stoll(value);
      else if (key == "sample_length") train.sample_length = std::stoi(value);
      else if (key == "sample_temperature") train.sample_temperature = std::stod(value);
      else if (key == "sample_top_k") train.sample_top_k = std::stoi(value);
      else if (key == "lr_schedule") train.lr_schedule = value;
      else if (key == "grad_clip") train.grad_clip = std::stod(value);
      else if (key == "window_align") train.window_align = value;
      else if (key == "seed") train.seed = std::stoull(value);
      else {
        throw Error("InvalidConfig", path.string() + ":" +
                                         std::to_string(line_no) +
                                         ": unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error("InvalidConfig", path.string() + ":" +
                                       std::to_string(line_no) +
                                       ": bad value for '" + key + "'");
    }
  }
}

void write_loss_csv(const fs::path& path, const std::vector<double>& losses) {
  std::ostringstream out;
  out << "step,loss\n" << std::setprecision(17);
  for (size_t i = 0; i < losses.size(); ++i) {
    out << (i + 1) << "," << losses[i] << "\n";
  }
  write_text(path, out.str());
}

struct Options {
  // preprocess / lint
  std::string in_dir, out_path, corpus;
  bool json_output = false;
  // train
  std::string mode = "move", config_path, resume;
  int64_t steps = 1000;
  int64_t checkpoint_every = 100;
  uint64_t seed = 1;
  double learning_rate = 1e-4;
  int batch_size = 1;
  // Flags given on the command line, which take precedence over --config.
  std::set<std::string> given;
  // generate
  std::string checkpoint;
  int n_games = 10;
  int max_len = 1024;
  double temperature = 1.0;
  int top_k = 0;
  // replay / score
  std::string sgf;
  double komi = 6.5;
  // baseline
  int moves = 10;
  int size = 19;
  // eval / compare
  std::string games_dir, baseline_report, model_report;
  int opening_n = 10;
};

int cmd_preprocess(const Options& o, std::ostream& out) {
  fs::path dest(o.out_path);
  RunManifest manifest("preprocess", manifest_for_file(dest));
  manifest.option("in", o.in_dir);
  manifest.option("out", o.out_path);
  with_manifest(manifest, [&] {
    auto files = list_sgf_files(o.in_dir);
    for (const auto& f : files) manifest.input(f);
    PreprocessResult result = preprocess_corpus(files);
    for (const auto& d : result.diagnostics) out << "warning: " << d << "\n";
    write_text(dest, result.corpus);
    manifest.output(dest);
    manifest.option("games", result.games);
    out << "wrote " << result.games << " games to " << dest.string() << "\n";
  });
  return 0;
}

int cmd_lint(const Options& o, std::ostream& out) {
  LintReport report = lint_corpus(read_file(o.corpus));
  out << (o.json_output ? report.to_json() + "\n" : report.to_text());
  return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
  Vocabulary vocab = parse_vocab_mode(o.mode) == VocabMode::kMoveLevel
                         ? Vocabulary::move_level(19)
                         : Vocabulary::char_level();
  ModelConfig model;
  TrainConfig train;
  bool model_seed_set = false;
  if (!o.config_path.empty()) {
    apply_config_file(o.config_path, model, train, &model_seed_set);
  }
  auto flag = [&](const char* name) { return o.given.count(name) > 0; };
  if (flag("--lr")) train.learning_rate = o.learning_rate;
  if (flag("--batch-size")) train.batch_size = o.batch_size;
  if (flag("--steps")) train.total_steps = o.steps;
  if (flag("--checkpoint-every")) train.checkpoint_every = o.checkpoint_every;
  if (flag("--seed")) train.seed = o.seed;
  if (!model_seed_set) model.seed = train.seed;
  model.vocab_size = vocab.size();

  fs::path out_dir(o.out_path);
  fs::create_directories(out_dir / "checkpoints");
  fs::create_directories(out_dir / "samples");
  RunManifest manifest("train", out_dir / "manifest.json");
  manifest.input(o.corpus);
  if (!o.config_path.empty()) manifest.input(o.config_path);
  manifest.option("mode", o.mode);
  manifest.option("steps", train.total_steps);
  manifest.option("checkpoint_every", train.checkpoint_every);
  manifest.option("learning_rate", train.learning_rate);
  manifest.option("batch_size", train.batch_size);
  manifest.option("window_align", train.window_align);
  manifest.option("context_length", model.context_length);
  manifest.option("embed_dim", model.embed_dim);
  manifest.option("num_layers", model.num_layers);
  manifest.option("num_heads", model.num_heads);
  manifest.seed("train", train.seed);
  manifest.seed("model", model.seed);

  with_manifest(manifest, [&] {
    std::vector<std::string> skipped;
    std::vector<int32_t> stream =
        build_token_stream(read_file(o.corpus), vocab, &skipped);
    for (const auto& s : skipped) out << "warning: skipped " << s << "\n";

    std::unique_ptr<Trainer> trainer;
    if (!o.resume.empty()) {
      Checkpoint ckpt = load_checkpoint(o.resume);
      if (!(ckpt.vocab == vocab)) {
        throw Error("VocabularyMismatch",
                    "checkpoint vocabulary does not match --mode");
      }
      ckpt.train.total_steps = train.total_steps;
      ckpt.train.checkpoint_every = train.checkpoint_every;
      manifest.input(o.resume);
      trainer = std::make_unique<Trainer>(ckpt, std::move(stream));
    } else {
      trainer = std::make_unique<Trainer>(model, train, vocab, std::move(stream));
    }

    TrainCallbacks callbacks;
    callbacks.on_checkpoint = [&](const Checkpoint& ckpt,
                                  const TokenSequence& s) {
      std::string name = "step-" + std::to_string(ckpt.step);
      fs::path ckpt_path = out_dir / "checkpoints" / (name + ".ckpt");
      save_checkpoint(ckpt, ckpt_path);
      fs::path sample_path = out_dir / "samples" / (name + ".txt");
      write_text(sample_path, sample_log_line(s, vocab) + "\n");
      write_loss_csv(out_dir / "loss.csv", ckpt.loss_history);
      manifest.output(ckpt_path);
      manifest.output(sample_path);
      const auto& h = ckpt.loss_history;
      size_t window = std::min<size_t>(h.size(), ckpt.train.checkpoint_every);
      double mean = 0;
      for (size_t i = h.size() - window; i < h.size(); ++i) mean += h[i];
      out << "step " << ckpt.step << " mean loss " << std::fixed
          << std::setprecision(4) << mean / std::max<size_t>(window, 1) << "\n"
          << std::defaultfloat;
    };
    int64_t remaining = train.total_steps - trainer->step_count();
    if (remaining > 0) sgflm::train(*trainer, remaining, callbacks);
    write_loss_csv(out_dir / "loss.csv", trainer->loss_history());
    manifest.output(out_dir / "loss.csv");
  });
  return 0;
}

int cmd_generate(const Options& o, std::ostream& out) {
  fs::path out_dir(o.out_path);
  fs::create_directories(out_dir);
  RunManifest manifest("generate", out_dir / "manifest.json");
  manifest.input(o.checkpoint);
  manifest.option("n_games", o.n_games);
  manifest.option("max_len", o.max_len);
  manifest.option("temperature", o.temperature);
  manifest.option("top_k", o.top_k);
  manifest.seed("generate", o.seed);
  with_manifest(manifest, [&] {
    Checkpoint ckpt = load_checkpoint(o.checkpoint);
    Transformer<float> model = model_from_checkpoint(ckpt);
    json reports = json::object();
    for (int i = 0; i < o.n_games; ++i) {
      SampleOptions opts;
      opts.max_length = o.max_len;
      opts.temperature = o.temperature;
      opts.top_k = o.top_k;
      opts.seed = mix_seed(o.seed, static_cast<uint64_t>(i));
      TokenSequence tokens = sample(model, ckpt.vocab, opts);
      DecodeResult decoded = decode(tokens, ckpt.vocab);
      char name[32];
      std::snprintf(name, sizeof(name), "game-%04d.sgf", i + 1);
      fs::path path = out_dir / name;
      write_text(path, serialize_game(decoded.record) + "\n");
      manifest.output(path);
      reports[name] = {{"tokens", tokens.ids.size()},
                       {"discarded_bytes", decoded.report.discarded_bytes},
                       {"truncated", decoded.report.truncated},
                       {"out_of_range_moves", decoded.report.out_of_range_moves},
                       {"ignored_tokens", decoded.report.ignored_tokens}};
    }
    write_text(out_dir / "decode_reports.json", reports.dump(2) + "\n");
    out << "wrote " << o.n_games << " games to " << out_dir.string() << "\n";
  });
  return 0;
}

int cmd_replay(const Options& o, std::ostream& out) {
  GameRecord record = load_sgf(o.sgf);
  ReplayResult result = replay(record);
  size_t limit = result.first_illegal_index ? *result.first_illegal_index + 1
                                            : record.moves.size();
  size_t region_i = 0;
  for (size_t i = 0; i < limit; ++i) {
    const Move& m = record.moves[i];
    out << (i + 1) << " " << to_char(m.color) << " "
        << (m.is_pass() ? "pass" : to_sgf_coord(m)) << " ";
    if (result.first_illegal_index && i == *result.first_illegal_index) {
      out << "illegal " << to_string(*result.violation) << "\n";
      break;
    }
    out << (m.is_pass() ? "-" : to_string(result.per_move_regions[region_i++]))
        << " ok\n";
  }
  out << "moves " << record.moves.size() << "\n";
  out << "legal_prefix " << result.legal_prefix_length(record.moves.size())
      << "\n";
  if (result.first_illegal_index) {
    out << "first_illegal_index " << *result.first_illegal_index << " "
        << to_string(*result.violation) << "\n";
  } else {
    out << "fully_legal\n";
  }
  return 0;
}

int cmd_score(const Options& o, std::ostream& out) {
  GameRecord record = load_sgf(o.sgf);
  ReplayResult result = replay(record);
  Score s = score_area(result.final_board, o.komi);
  out << s.result_text << "\n"
      << "black_area " << s.black_area << "\n"
      << "white_area " << s.white_area << "\n"
      << "black_territory " << s.black_territory << "\n"
      << "white_territory " << s.white_territory << "\n"
      << "neutral " << s.neutral << "\n"
      << "komi " << s.komi << "\n";
  if (result.first_illegal_index) {
    out << "note: scored the legal prefix of "
        << *result.first_illegal_index << " moves\n";
  }
  return 0;
}

int cmd_baseline(const Options& o, std::ostream& out) {
  fs::path out_dir(o.out_path);
  fs::create_directories(out_dir);
  RunManifest manifest("baseline", out_dir / "manifest.json");
  manifest.option("n_games", o.n_games);
  manifest.option("moves", o.moves);
  manifest.option("size", o.size);
  manifest.seed("baseline", o.seed);
  with_manifest(manifest, [&] {
    auto games = random_baseline(o.n_games, o.moves, o.size, o.seed);
    for (size_t i = 0; i < games.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "game-%04zu.sgf", i + 1);
      write_text(out_dir / name, serialize_game(games[i]) + "\n");
      manifest.output(out_dir / name);
    }
    out << "wrote " << games.size() << " games to " << out_dir.string() << "\n";
  });
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  fs::path dest(o.out_path);
  RunManifest manifest("eval", manifest_for_file(dest));
  manifest.option("opening_n", o.opening_n);
  manifest.option("komi", o.komi);
  with_manifest(manifest, [&] {
    fs::path dir(o.games_dir);
    json reports = json::object();
    if (fs::exists(dir / "decode_reports.json")) {
      reports = json::parse(read_file(dir / "decode_reports.json"));
    }
    std::vector<GameInput> games;
    for (const auto& f : list_sgf_files(dir)) {
      manifest.input(f);
      GameInput in = game_input_from_sgf(read_file(f), f.string());
      std::string name = f.filename().string();
      if (reports.contains(name)) {
        const auto& r = reports[name];
        in.report.discarded_bytes = r.value("discarded_bytes", size_t{0});
        in.report.truncated = r.value("truncated", false);
        in.report.out_of_range_moves += r.value("out_of_range_moves", size_t{0});
        in.report.ignored_tokens = r.value("ignored_tokens", size_t{0});
      }
      games.push_back(std::move(in));
    }
    EvalReport report = evaluate(games, o.opening_n, o.komi);
    if (!o.baseline_report.empty()) {
      attach_baseline(report, EvalReport::from_json(read_file(o.baseline_report)));
      manifest.input(o.baseline_report);
    }
    write_text(dest, report.to_json() + "\n");
    manifest.output(dest);
    out << report.to_table();
  });
  return 0;
}

int cmd_compare(const Options& o, std::ostream& out) {
  EvalReport model = EvalReport::from_json(read_file(o.model_report));
  EvalReport baseline = EvalReport::from_json(read_file(o.baseline_report));
  ComparisonReport c = compare(model, baseline);
  if (!o.out_path.empty()) {
    fs::path dest(o.out_path);
    RunManifest manifest("compare", manifest_for_file(dest));
    manifest.input(o.model_report);
    manifest.input(o.baseline_report);
    with_manifest(manifest, [&] {
      write_text(dest, c.to_json() + "\n");
      manifest.output(dest);
    });
  }
  out << c.to_table();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Go game records as a language-modeling corpus", "sgflm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  auto* pre = app.add_subcommand("preprocess", "SGF directory to one-line-per-game corpus");
  pre->add_option("--in", o.in_dir, "directory of .sgf files")->required();
  pre->add_option("--out", o.out_path, "corpus file")->required();

  auto* lint = app.add_subcommand("lint", "diagnose a corpus");
  lint->add_option("--corpus", o.corpus)->required();
  lint->add_flag("--json", o.json_output, "machine-readable report");

  auto* tr = app.add_subcommand("train", "train a model on a corpus");
  tr->add_option("--corpus", o.corpus)->required();
  tr->add_option("--mode", o.mode, "move or char")->capture_default_str();
  tr->add_option("--config", o.config_path, "key = value model/train config");
  tr->add_option("--steps", o.steps, "total training steps")->capture_default_str();
  tr->add_option("--checkpoint-every", o.checkpoint_every)->capture_default_str();
  tr->add_option("--lr", o.learning_rate, "Adam learning rate")->capture_default_str();
  tr->add_option("--batch-size", o.batch_size)->capture_default_str();
  tr->add_option("--out", o.out_path, "output directory")->required();
  tr->add_option("--seed", o.seed)->capture_default_str();
  tr->add_option("--resume", o.resume, "checkpoint to continue from");
  tr->final_callback([&o, tr] {
    for (const char* name : {"--lr", "--batch-size", "--steps", "--checkpoint-every", "--seed"}) {
      if (tr->get_option(name)->count() > 0) o.given.insert(name);
    }
  });

  auto* gen = app.add_subcommand("generate", "sample unconditional games");
  gen->add_option("--checkpoint", o.checkpoint)->required();
  gen->add_option("--n-games", o.n_games)->capture_default_str();
  gen->add_option("--max-len", o.max_len)->capture_default_str();
  gen->add_option("--temperature", o.temperature)->capture_default_str();
  gen->add_option("--top-k", o.top_k, "0 disables")->capture_default_str();
  gen->add_option("--seed", o.seed)->capture_default_str();
  gen->add_option("--out", o.out_path)->required();

  auto* rep = app.add_subcommand("replay", "legality trace of one game");
  rep->add_option("--sgf", o.sgf)->required();

  auto* sc = app.add_subcommand("score", "area and territory of a game's final position");
  sc->add_option("--sgf", o.sgf)->required();
  sc->add_option("--komi", o.komi)->capture_default_str();

  auto* base = app.add_subcommand("baseline", "uniform random legal games");
  base->add_option("--n-games", o.n_games)->capture_default_str();
  base->add_option("--moves", o.moves)->capture_default_str();
  base->add_option("--size", o.size)->capture_default_str();
  base->add_option("--seed", o.seed)->capture_default_str();
  base->add_option("--out", o.out_path)->required();

  auto* ev = app.add_subcommand("eval", "evaluate a directory of games");
  ev->add_option("--games", o.games_dir)->required();
  ev->add_option("--opening-n", o.opening_n)->capture_default_str();
  ev->add_option("--komi", o.komi)->capture_default_str();
  ev->add_option("--baseline", o.baseline_report, "baseline report to diff against");
  ev->add_option("--out", o.out_path, "report file")->required();

  auto* cmp = app.add_subcommand("compare", "model report vs baseline report");
  cmp->add_option("--model", o.model_report)->required();
  cmp->add_option("--baseline", o.baseline_report)->required();
  cmp->add_option("--out", o.out_path, "comparison report file");

  std::vector<std::string> argv_store{"sgflm"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e, out, err);
    }
    err << "error: UsageError: " << e.what() << "\n";
    return 64;
  }

  try {
    if (pre->parsed()) return cmd_preprocess(o, out);
    if (lint->parsed()) return cmd_lint(o, out);
    if (tr->parsed()) return cmd_train(o, out);
    if (gen->parsed()) return cmd_generate(o, out);
    if (rep->parsed()) return cmd_replay(o, out);
    if (sc->parsed()) return cmd_score(o, out);
    if (base->parsed()) return cmd_baseline(o, out);
    if (ev->parsed()) return cmd_eval(o, out);
    if (cmp->parsed()) return cmd_compare(o, out);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: InternalError: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace sgflm
