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

#ifndef SGFLM_TRAIN_H_
#define SGFLM_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sgflm/model.h"
#include "sgflm/tokenizer.h"

namespace sgflm {

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int64_t total_steps = 1000;
  int64_t checkpoint_every = 100;
  int sample_length = 0;  // 0: min(context_length, 1024)
  double sample_temperature = 1.0;
  int sample_top_k = 0;
  std::string lr_schedule = "constant";  // constant | cosine
  double grad_clip = 0.0;                // max global L2 norm, 0 disables
  // Where training windows may start: "token" draws any stream offset,
  // "game" draws only offsets of a BOS, so position 0 sees game starts the
  // way unconditional sampling does.
  std::string window_align = "token";
  uint64_t seed = 1;

  // Throws Error("InvalidConfig").
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Everything needed to sample from or resume a run.
struct Checkpoint {
  static constexpr uint32_t kFormatVersion = 1;

  ModelConfig model;
  TrainConfig train;
  Vocabulary vocab;
  int64_t step = 0;
  std::vector<double> loss_history;
  std::vector<float> params;
  std::vector<float> adam_m;
  std::vector<float> adam_v;
};

// Binary container, little-endian:
//
//   "SGFLMCKP"                 8-byte magic
//   u32 format version         currently 1
//   u64 n, then n bytes        JSON header: model, train, vocabulary, step,
//                              loss_history
//   u32 tensor count
//   per tensor: u32 name length, name bytes, u32 rank, rank x u32 dims,
//               prod(dims) x f32 values
//
// Tensors are the parameters by layout name, then "adam.m/<name>" and
// "adam.v/<name>" for the optimizer moments.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// Validates magic, version, every tensor shape against the config and the
// vocabulary descriptor. Throws Error("CorruptCheckpoint") or
// Error("VocabularyMismatch").
Checkpoint load_checkpoint(const std::filesystem::path& path);

Transformer<float> model_from_checkpoint(const Checkpoint& ckpt);

// Concatenation of every encoded game (BOS/EOS included) in corpus order.
// Lines that cannot be encoded are skipped and reported in `skipped`.
std::vector<int32_t> build_token_stream(std::string_view corpus,
                                        const Vocabulary& vocab,
                                        std::vector<std::string>* skipped);

class Trainer {
 public:
  // Fresh run; model initialized from model_config.seed.
  Trainer(const ModelConfig& model_config, const TrainConfig& train_config,
          const Vocabulary& vocab, std::vector<int32_t> stream);
  // Resumes from a checkpoint.
  Trainer(const Checkpoint& ckpt, std::vector<int32_t> stream);

  // One Adam step on batch_size random windows; returns the mean loss.
  double step();

  Checkpoint checkpoint() const;
  const Transformer<float>& model() const { return model_; }
  int64_t step_count() const { return step_; }
  const std::vector<double>& loss_history() const { return loss_history_; }
  const TrainConfig& train_config() const { return train_config_; }
  const Vocabulary& vocab() const { return vocab_; }

  // Start offset of the window used by batch element `b` at `step`.
  size_t window_start(int64_t step, int b) const;

 private:
  void prepare_stream();

  TrainConfig train_config_;
  Vocabulary vocab_;
  std::vector<int32_t> stream_;
  std::vector<size_t> game_starts_;  // BOS offsets with a full window after them
  Transformer<float> model_;
  std::vector<float> grad_, adam_m_, adam_v_;
  int64_t step_ = 0;
  std::vector<double> loss_history_;
};

struct SampleOptions {
  int max_length = 1024;   // total tokens including the leading BOS
  double temperature = 1.0;
  int top_k = 0;           // 0 keeps every id
  uint64_t seed = 1;
};

// Unconditional generation from BOS. Draws from softmax(logits / T)
// restricted to the top_k ids (ties broken by lower id) until EOS or
// max_length. Past the context length the window slides: only the most
// recent context_length tokens are fed to the model.
TokenSequence sample(const Transformer<float>& model, const Vocabulary& vocab,
                     const SampleOptions& options);

// Text for one generated game in the sample-log format: the decoded text for
// CharLevel, serialized SGF for MoveLevel.
std::string sample_log_line(const TokenSequence& tokens, const Vocabulary& vocab);

struct TrainCallbacks {
  std::function<void(int64_t step, double loss)> on_step;
  std::function<void(const Checkpoint&, const TokenSequence& sample)>
      on_checkpoint;
};

// Runs `steps` more steps. Every checkpoint_every steps the callback gets a
// checkpoint plus one unconditional sample seeded from (seed, step).
void train(Trainer& trainer, int64_t steps, const TrainCallbacks& callbacks);

// Deterministic 64-bit mix used to derive per-step seeds.
uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c = 0);

}  // namespace sgflm

#endif  // SGFLM_TRAIN_H_
