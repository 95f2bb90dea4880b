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

#ifndef SGFLM_MODEL_H_
#define SGFLM_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgflm/error.h"

namespace sgflm {

struct ModelConfig {
  int vocab_size = 727;
  int context_length = 256;
  int embed_dim = 128;
  int num_layers = 4;
  int num_heads = 4;
  int mlp_ratio = 4;
  uint64_t seed = 1;

  // Throws Error("InvalidConfig").
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TensorInfo {
  std::string name;
  std::vector<int> shape;
  size_t offset = 0;  // into the flat parameter vector
  size_t size = 0;
};

// Tensor layout for a config. Names: wte, wpe, h{i}.ln1.g, h{i}.ln1.b,
// h{i}.attn.w_qkv, h{i}.attn.b_qkv, h{i}.attn.w_proj, h{i}.attn.b_proj,
// h{i}.ln2.g, h{i}.ln2.b, h{i}.mlp.w_fc, h{i}.mlp.b_fc, h{i}.mlp.w_proj,
// h{i}.mlp.b_proj, ln_f.g, ln_f.b. Weight matrices are stored (in, out),
// row-major. The output projection is tied to wte.
std::vector<TensorInfo> tensor_layout(const ModelConfig& config);

// Pre-norm GPT-style decoder: token + learned position embeddings, causal
// multi-head self-attention and a GELU MLP per block, final layer norm and
// tied output embedding. All parameters live in one flat vector.
template <typename T>
class Transformer {
 public:
  explicit Transformer(const ModelConfig& config);

  // N(0, 0.02) weights (0.01 for wpe, residual projections scaled by
  // 1/sqrt(2 * layers)), zero biases, unit gains. Bit-identical per seed.
  void init(uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const std::vector<TensorInfo>& layout() const { return layout_; }
  std::span<T> params() { return params_; }
  std::span<const T> params() const { return params_; }
  const TensorInfo& info(std::string_view name) const;
  std::span<T> tensor(std::string_view name);
  std::span<const T> tensor(std::string_view name) const;

  // Row-major (tokens.size() x vocab_size) logits. Row i depends only on
  // tokens[0..i]. Throws Error("ContextOverflow"/"InvalidToken").
  std::vector<T> forward(std::span<const int32_t> tokens) const;

  // Logits for the last position only.
  std::vector<T> last_logits(std::span<const int32_t> tokens) const;

  // Mean cross-entropy of next-token predictions over non-PAD targets, with
  // its gradient added into `grad` (same layout as params()).
  T forward_backward(std::span<const int32_t> inputs,
                     std::span<const int32_t> targets, std::span<T> grad) const;

 private:
  struct Activations;

  void run_forward(std::span<const int32_t> tokens, Activations& acts,
                   bool last_only) const;

  ModelConfig config_;
  std::vector<TensorInfo> layout_;
  std::vector<T> params_;
};

extern template class Transformer<float>;
extern template class Transformer<double>;

// Incremental decoding: caches each layer's keys and values so that feeding
// token i costs one position instead of i + 1. The logits returned by push()
// equal the last row of forward() on the tokens pushed so far.
template <typename T>
class KvCache {
 public:
  explicit KvCache(const Transformer<T>& model);

  // Appends a token and returns the logits for the next position. Throws
  // Error("ContextOverflow") past context_length tokens.
  std::vector<T> push(int32_t token);
  int size() const { return length_; }

 private:
  const Transformer<T>& model_;
  std::vector<std::vector<T>> keys_, values_;  // per layer, context x embed
  int length_ = 0;
};

extern template class KvCache<float>;
extern template class KvCache<double>;

// Mean of -ln softmax(logits[i])[targets[i]] over targets that are not PAD.
// Returns 0 when every target is PAD. Throws Error("ShapeMismatch").
template <typename T>
double cross_entropy(std::span<const T> logits, int vocab_size,
                     std::span<const int32_t> targets);

// Numerically stable softmax of one logit row, in double.
template <typename T>
std::vector<double> softmax(std::span<const T> row, double temperature = 1.0);

}  // namespace sgflm

#endif  // SGFLM_MODEL_H_
