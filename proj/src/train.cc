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

#include "sgflm/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace sgflm {

uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
  uint64_t z = a * 0x9e3779b97f4a7c15ULL ^ (b + 0x632be59bd9b4e019ULL) ^
               (c * 0xd1b54a32d192ed03ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error("InvalidConfig", msg); };
  if (!(learning_rate > 0)) fail("learning_rate must be positive");
  if (batch_size < 1) fail("batch_size must be positive");
  if (!(beta1 > 0 && beta1 < 1 && beta2 > 0 && beta2 < 1)) {
    fail("Adam betas must be in (0, 1)");
  }
  if (!(epsilon > 0)) fail("epsilon must be positive");
  if (total_steps < 1 || checkpoint_every < 1) {
    fail("total_steps and checkpoint_every must be positive");
  }
  if (sample_length < 0) fail("sample_length must be non-negative");
  if (!(sample_temperature > 0)) fail("sample_temperature must be positive");
  if (sample_top_k < 0) fail("sample_top_k must be non-negative");
  if (lr_schedule != "constant" && lr_schedule != "cosine") {
    fail("lr_schedule must be constant or cosine");
  }
  if (grad_clip < 0) fail("grad_clip must be non-negative");
  if (window_align != "token" && window_align != "game") {
    fail("window_align must be token or game");
  }
}

std::vector<int32_t> build_token_stream(std::string_view corpus,
                                        const Vocabulary& vocab,
                                        std::vector<std::string>* skipped) {
  std::vector<int32_t> stream;
  size_t line_no = 0;
  for (std::string_view line : corpus_lines(corpus)) {
    ++line_no;
    try {
      TokenSequence seq;
      if (vocab.mode == VocabMode::kCharLevel) {
        seq = encode_text(line, vocab);
      } else {
        GameRecord record = parse_game(line).record;
        if (record.board_size() != vocab.board_size) {
          throw Error("BoardSizeMismatch",
                      "game is " + std::to_string(record.board_size()) + "x" +
                          std::to_string(record.board_size()));
        }
        seq = encode(record, vocab);
      }
      stream.insert(stream.end(), seq.ids.begin(), seq.ids.end());
    } catch (const Error& e) {
      if (skipped != nullptr) {
        skipped->push_back("line " + std::to_string(line_no) + ": " +
                           e.kind() + ": " + e.what());
      }
    }
  }
  return stream;
}

Trainer::Trainer(const ModelConfig& model_config,
                 const TrainConfig& train_config, const Vocabulary& vocab,
                 std::vector<int32_t> stream)
    : train_config_(train_config),
      vocab_(vocab),
      stream_(std::move(stream)),
      model_(model_config) {
  train_config_.validate();
  if (model_config.vocab_size != vocab.size()) {
    throw Error("VocabularyMismatch",
                "model vocab_size " + std::to_string(model_config.vocab_size) +
                    " != vocabulary size " + std::to_string(vocab.size()));
  }
  prepare_stream();
  model_.init(model_config.seed);
  grad_.assign(model_.params().size(), 0.0F);
  adam_m_.assign(grad_.size(), 0.0F);
  adam_v_.assign(grad_.size(), 0.0F);
}

Trainer::Trainer(const Checkpoint& ckpt, std::vector<int32_t> stream)
    : train_config_(ckpt.train),
      vocab_(ckpt.vocab),
      stream_(std::move(stream)),
      model_(model_from_checkpoint(ckpt)),
      adam_m_(ckpt.adam_m),
      adam_v_(ckpt.adam_v),
      step_(ckpt.step),
      loss_history_(ckpt.loss_history) {
  train_config_.validate();
  prepare_stream();
  grad_.assign(model_.params().size(), 0.0F);
  if (adam_m_.size() != grad_.size() || adam_v_.size() != grad_.size()) {
    throw Error("CorruptCheckpoint", "optimizer state does not match model");
  }
}

void Trainer::prepare_stream() {
  if (stream_.empty()) throw Error("EmptyCorpus", "no tokens to train on");
  const size_t window = static_cast<size_t>(model_.config().context_length) + 1;
  if (stream_.size() < window) {
    throw Error("ContextLongerThanCorpus",
                "corpus has " + std::to_string(stream_.size()) +
                    " tokens, one window needs " + std::to_string(window));
  }
  for (size_t i = 0; i + window <= stream_.size(); ++i) {
    if (stream_[i] == Vocabulary::kBos) game_starts_.push_back(i);
  }
  if (train_config_.window_align == "game" && game_starts_.empty()) {
    throw Error("ContextLongerThanCorpus",
                "no game start is followed by a full window of " +
                    std::to_string(window) + " tokens");
  }
}

size_t Trainer::window_start(int64_t step, int b) const {
  const size_t window = static_cast<size_t>(model_.config().context_length) + 1;
  std::mt19937_64 rng(mix_seed(train_config_.seed, static_cast<uint64_t>(step),
                               static_cast<uint64_t>(b)));
  if (train_config_.window_align == "game") {
    std::uniform_int_distribution<size_t> pick(0, game_starts_.size() - 1);
    return game_starts_[pick(rng)];
  }
  std::uniform_int_distribution<size_t> dist(0, stream_.size() - window);
  return dist(rng);
}

double Trainer::step() {
  const int T = model_.config().context_length;
  std::fill(grad_.begin(), grad_.end(), 0.0F);
  double loss = 0.0;
  for (int b = 0; b < train_config_.batch_size; ++b) {
    size_t start = window_start(step_, b);
    std::span<const int32_t> window(stream_.data() + start, T + 1);
    loss += model_.forward_backward(window.first(T), window.subspan(1, T),
                                    grad_);
  }
  const int B = train_config_.batch_size;
  if (B > 1) {
    loss /= B;
    for (float& g : grad_) g /= static_cast<float>(B);
  }
  if (train_config_.grad_clip > 0) {
    double norm = 0.0;
    for (float g : grad_) norm += static_cast<double>(g) * g;
    norm = std::sqrt(norm);
    if (norm > train_config_.grad_clip) {
      auto s = static_cast<float>(train_config_.grad_clip / norm);
      for (float& g : grad_) g *= s;
    }
  }

  double lr = train_config_.learning_rate;
  if (train_config_.lr_schedule == "cosine") {
    double progress = std::min(
        1.0, static_cast<double>(step_) / train_config_.total_steps);
    lr *= 0.5 * (1.0 + std::cos(M_PI * progress));
  }
  const double t = static_cast<double>(step_ + 1);
  const auto b1 = static_cast<float>(train_config_.beta1);
  const auto b2 = static_cast<float>(train_config_.beta2);
  const auto eps = static_cast<float>(train_config_.epsilon);
  const auto c1 = static_cast<float>(1.0 - std::pow(train_config_.beta1, t));
  const auto c2 = static_cast<float>(1.0 - std::pow(train_config_.beta2, t));
  const auto step_lr = static_cast<float>(lr);
  auto params = model_.params();
  for (size_t i = 0; i < params.size(); ++i) {
    const float g = grad_[i];
    adam_m_[i] = b1 * adam_m_[i] + (1.0F - b1) * g;
    adam_v_[i] = b2 * adam_v_[i] + (1.0F - b2) * g * g;
    const float m_hat = adam_m_[i] / c1;
    const float v_hat = adam_v_[i] / c2;
    params[i] -= step_lr * m_hat / (std::sqrt(v_hat) + eps);
  }
  ++step_;
  loss_history_.push_back(loss);
  return loss;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint ckpt;
  ckpt.model = model_.config();
  ckpt.train = train_config_;
  ckpt.vocab = vocab_;
  ckpt.step = step_;
  ckpt.loss_history = loss_history_;
  ckpt.params.assign(model_.params().begin(), model_.params().end());
  ckpt.adam_m = adam_m_;
  ckpt.adam_v = adam_v_;
  return ckpt;
}

Transformer<float> model_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.model.vocab_size != ckpt.vocab.size()) {
    throw Error("VocabularyMismatch",
                "checkpoint model vocab_size does not match its vocabulary");
  }
  Transformer<float> model(ckpt.model);
  if (ckpt.params.size() != model.params().size()) {
    throw Error("CorruptCheckpoint", "parameter count does not match config");
  }
  std::copy(ckpt.params.begin(), ckpt.params.end(), model.params().begin());
  return model;
}

TokenSequence sample(const Transformer<float>& model, const Vocabulary& vocab,
                     const SampleOptions& options) {
  if (!(options.temperature > 0)) {
    throw Error("InvalidTemperature", "temperature must be positive");
  }
  if (options.top_k < 0) throw Error("InvalidTopK", "top_k must be >= 0");
  if (model.config().vocab_size != vocab.size()) {
    throw Error("VocabularyMismatch", "model and vocabulary sizes differ");
  }
  const int context = model.config().context_length;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  TokenSequence out{vocab.mode, {Vocabulary::kBos}};
  std::vector<int> order(vocab.size());
  KvCache<float> cache(model);
  while (static_cast<int>(out.ids.size()) < options.max_length) {
    size_t n = out.ids.size();
    std::vector<float> logits;
    if (n <= static_cast<size_t>(context)) {
      logits = cache.push(out.ids.back());
    } else {
      // Positions shift once the window slides, so the cache no longer applies.
      std::span<const int32_t> window(out.ids.data() + n - context, context);
      logits = model.last_logits(window);
    }
    std::vector<double> probs =
        softmax(std::span<const float>(logits), options.temperature);

    std::iota(order.begin(), order.end(), 0);
    size_t keep = order.size();
    if (options.top_k > 0 && static_cast<size_t>(options.top_k) < keep) {
      keep = options.top_k;
      std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                        [&probs](int a, int b) {
                          return probs[a] > probs[b] ||
                                 (probs[a] == probs[b] && a < b);
                        });
    }
    double mass = 0.0;
    for (size_t i = 0; i < keep; ++i) mass += probs[order[i]];
    double u = uniform(rng) * mass;
    int32_t next = order[keep - 1];
    double acc = 0.0;
    for (size_t i = 0; i < keep; ++i) {
      acc += probs[order[i]];
      if (u < acc) {
        next = order[i];
        break;
      }
    }
    out.ids.push_back(next);
    if (next == Vocabulary::kEos) break;
  }
  return out;
}

std::string sample_log_line(const TokenSequence& tokens,
                            const Vocabulary& vocab) {
  DecodeResult decoded = decode(tokens, vocab);
  if (vocab.mode == VocabMode::kCharLevel) return decoded.text;
  return serialize_game(decoded.record);
}

void train(Trainer& trainer, int64_t steps, const TrainCallbacks& callbacks) {
  const TrainConfig& cfg = trainer.train_config();
  for (int64_t i = 0; i < steps; ++i) {
    double loss = trainer.step();
    if (callbacks.on_step) callbacks.on_step(trainer.step_count(), loss);
    if (trainer.step_count() % cfg.checkpoint_every == 0 &&
        callbacks.on_checkpoint) {
      SampleOptions opts;
      opts.max_length = cfg.sample_length > 0
                            ? cfg.sample_length
                            : std::min(trainer.model().config().context_length,
                                       1024);
      opts.temperature = cfg.sample_temperature;
      opts.top_k = cfg.sample_top_k;
      opts.seed = mix_seed(cfg.seed, static_cast<uint64_t>(trainer.step_count()),
                           0x73616d706c65ULL);
      TokenSequence s = sample(trainer.model(), trainer.vocab(), opts);
      callbacks.on_checkpoint(trainer.checkpoint(), s);
    }
  }
}

}  // namespace sgflm
