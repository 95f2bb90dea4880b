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

#include "sgflm/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sgflm {

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error("InvalidConfig", msg); };
  if (vocab_size < 4) fail("vocab_size must be at least 4");
  if (context_length < 2 || context_length > 1024) {
    fail("context_length must be in [2, 1024]");
  }
  if (embed_dim < 1 || num_layers < 1 || num_heads < 1 || mlp_ratio < 1) {
    fail("embed_dim, num_layers, num_heads and mlp_ratio must be positive");
  }
  if (embed_dim % num_heads != 0) {
    fail("embed_dim must be divisible by num_heads");
  }
}

std::vector<TensorInfo> tensor_layout(const ModelConfig& config) {
  config.validate();
  const int C = config.embed_dim;
  const int F = config.mlp_ratio * C;
  std::vector<TensorInfo> layout;
  size_t offset = 0;
  auto add = [&](std::string name, std::vector<int> shape) {
    size_t n = 1;
    for (int d : shape) n *= static_cast<size_t>(d);
    layout.push_back({std::move(name), std::move(shape), offset, n});
    offset += n;
  };
  add("wte", {config.vocab_size, C});
  add("wpe", {config.context_length, C});
  for (int l = 0; l < config.num_layers; ++l) {
    std::string p = "h" + std::to_string(l) + ".";
    add(p + "ln1.g", {C});
    add(p + "ln1.b", {C});
    add(p + "attn.w_qkv", {C, 3 * C});
    add(p + "attn.b_qkv", {3 * C});
    add(p + "attn.w_proj", {C, C});
    add(p + "attn.b_proj", {C});
    add(p + "ln2.g", {C});
    add(p + "ln2.b", {C});
    add(p + "mlp.w_fc", {C, F});
    add(p + "mlp.b_fc", {F});
    add(p + "mlp.w_proj", {F, C});
    add(p + "mlp.b_proj", {C});
  }
  add("ln_f.g", {C});
  add("ln_f.b", {C});
  return layout;
}

namespace {

constexpr double kLayerNormEps = 1e-5;

// Indices of one block's tensors within the layout.
struct BlockIndex {
  int ln1_g, ln1_b, w_qkv, b_qkv, w_attn_proj, b_attn_proj;
  int ln2_g, ln2_b, w_fc, b_fc, w_mlp_proj, b_mlp_proj;
};

BlockIndex block_index(int layer) {
  int base = 2 + 12 * layer;
  return {base,     base + 1, base + 2, base + 3,  base + 4,  base + 5,
          base + 6, base + 7, base + 8, base + 9, base + 10, base + 11};
}

// out[t, :] = bias + in[t, :] * w, for t in [0, rows).
template <typename T>
void matmul(const T* in, const T* w, const T* bias, T* out, int rows, int k_dim,
            int n_dim) {
  for (int t = 0; t < rows; ++t) {
    T* o = out + static_cast<size_t>(t) * n_dim;
    if (bias != nullptr) {
      std::copy(bias, bias + n_dim, o);
    } else {
      std::fill(o, o + n_dim, T(0));
    }
    const T* x = in + static_cast<size_t>(t) * k_dim;
    for (int k = 0; k < k_dim; ++k) {
      const T xk = x[k];
      const T* wr = w + static_cast<size_t>(k) * n_dim;
      for (int j = 0; j < n_dim; ++j) o[j] += xk * wr[j];
    }
  }
}

// Gradients of matmul: d_in += d_out * w^T, d_w += in^T * d_out,
// d_bias += column sums of d_out.
template <typename T>
void matmul_backward(const T* in, const T* w, const T* d_out, T* d_in, T* d_w,
                     T* d_bias, int rows, int k_dim, int n_dim) {
  for (int t = 0; t < rows; ++t) {
    const T* g = d_out + static_cast<size_t>(t) * n_dim;
    const T* x = in + static_cast<size_t>(t) * k_dim;
    T* dx = d_in + static_cast<size_t>(t) * k_dim;
    for (int k = 0; k < k_dim; ++k) {
      const T* wr = w + static_cast<size_t>(k) * n_dim;
      T* dwr = d_w + static_cast<size_t>(k) * n_dim;
      T acc = 0;
      const T xk = x[k];
      for (int j = 0; j < n_dim; ++j) {
        acc += g[j] * wr[j];
        dwr[j] += xk * g[j];
      }
      dx[k] += acc;
    }
    if (d_bias != nullptr) {
      for (int j = 0; j < n_dim; ++j) d_bias[j] += g[j];
    }
  }
}

template <typename T>
void layer_norm(const T* in, const T* gain, const T* bias, T* out, T* xhat,
                T* rstd, int rows, int dim) {
  for (int t = 0; t < rows; ++t) {
    const T* x = in + static_cast<size_t>(t) * dim;
    T mean = 0;
    for (int i = 0; i < dim; ++i) mean += x[i];
    mean /= dim;
    T var = 0;
    for (int i = 0; i < dim; ++i) var += (x[i] - mean) * (x[i] - mean);
    var /= dim;
    T r = T(1) / std::sqrt(var + T(kLayerNormEps));
    rstd[t] = r;
    T* xh = xhat + static_cast<size_t>(t) * dim;
    T* o = out + static_cast<size_t>(t) * dim;
    for (int i = 0; i < dim; ++i) {
      xh[i] = (x[i] - mean) * r;
      o[i] = xh[i] * gain[i] + bias[i];
    }
  }
}

template <typename T>
void layer_norm_backward(const T* d_out, const T* xhat, const T* rstd,
                         const T* gain, T* d_in, T* d_gain, T* d_bias, int rows,
                         int dim) {
  for (int t = 0; t < rows; ++t) {
    const T* g = d_out + static_cast<size_t>(t) * dim;
    const T* xh = xhat + static_cast<size_t>(t) * dim;
    T* dx = d_in + static_cast<size_t>(t) * dim;
    T mean_dxhat = 0;
    T mean_dxhat_xhat = 0;
    for (int i = 0; i < dim; ++i) {
      T dxh = g[i] * gain[i];
      mean_dxhat += dxh;
      mean_dxhat_xhat += dxh * xh[i];
      d_gain[i] += g[i] * xh[i];
      d_bias[i] += g[i];
    }
    mean_dxhat /= dim;
    mean_dxhat_xhat /= dim;
    for (int i = 0; i < dim; ++i) {
      T dxh = g[i] * gain[i];
      dx[i] += rstd[t] * (dxh - mean_dxhat - xh[i] * mean_dxhat_xhat);
    }
  }
}

template <typename T>
constexpr T kGeluScale = T(0.7978845608028654);  // sqrt(2 / pi)

template <typename T>
T gelu(T x) {
  T inner = kGeluScale<T> * (x + T(0.044715) * x * x * x);
  return T(0.5) * x * (T(1) + std::tanh(inner));
}

template <typename T>
T gelu_grad(T x) {
  T inner = kGeluScale<T> * (x + T(0.044715) * x * x * x);
  T th = std::tanh(inner);
  T d_inner = kGeluScale<T> * (T(1) + T(3) * T(0.044715) * x * x);
  return T(0.5) * (T(1) + th) + T(0.5) * x * (T(1) - th * th) * d_inner;
}

}  // namespace

template <typename T>
struct Transformer<T>::Activations {
  struct Block {
    std::vector<T> x_in, ln1_xhat, ln1_rstd, ln1_out, qkv, att, y, x_mid;
    std::vector<T> ln2_xhat, ln2_rstd, ln2_out, fc, fc_act;
  };
  int rows = 0;
  std::vector<Block> blocks;
  std::vector<T> x_out, lnf_xhat, lnf_rstd, lnf_out, logits;
};

template <typename T>
Transformer<T>::Transformer(const ModelConfig& config)
    : config_(config), layout_(tensor_layout(config)) {
  const auto& last = layout_.back();
  params_.assign(last.offset + last.size, T(0));
}

template <typename T>
void Transformer<T>::init(uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double residual_std = 0.02 / std::sqrt(2.0 * config_.num_layers);
  for (const auto& t : layout_) {
    T* p = params_.data() + t.offset;
    auto ends_with = [&t](std::string_view suffix) {
      return t.name.size() >= suffix.size() &&
             t.name.compare(t.name.size() - suffix.size(), suffix.size(),
                            suffix) == 0;
    };
    if (ends_with(".g")) {
      std::fill(p, p + t.size, T(1));
    } else if (t.shape.size() == 1) {
      std::fill(p, p + t.size, T(0));
    } else {
      double stddev = 0.02;
      if (t.name == "wpe") stddev = 0.01;
      if (ends_with("attn.w_proj") || ends_with("mlp.w_proj")) {
        stddev = residual_std;
      }
      std::normal_distribution<double> dist(0.0, stddev);
      for (size_t i = 0; i < t.size; ++i) p[i] = static_cast<T>(dist(rng));
    }
  }
}

template <typename T>
const TensorInfo& Transformer<T>::info(std::string_view name) const {
  for (const auto& t : layout_) {
    if (t.name == name) return t;
  }
  throw Error("UnknownTensor", "no tensor named " + std::string(name));
}

template <typename T>
std::span<T> Transformer<T>::tensor(std::string_view name) {
  const auto& t = info(name);
  return std::span<T>(params_).subspan(t.offset, t.size);
}

template <typename T>
std::span<const T> Transformer<T>::tensor(std::string_view name) const {
  const auto& t = info(name);
  return std::span<const T>(params_).subspan(t.offset, t.size);
}

template <typename T>
void Transformer<T>::run_forward(std::span<const int32_t> tokens,
                                 Activations& acts, bool last_only) const {
  const int L = static_cast<int>(tokens.size());
  const int C = config_.embed_dim;
  const int H = config_.num_heads;
  const int D = C / H;
  const int F = config_.mlp_ratio * C;
  const int V = config_.vocab_size;
  if (L < 1) throw Error("EmptyInput", "forward needs at least one token");
  if (L > config_.context_length) {
    throw Error("ContextOverflow", "sequence of " + std::to_string(L) +
                                       " tokens exceeds context length " +
                                       std::to_string(config_.context_length));
  }
  for (int32_t id : tokens) {
    if (id < 0 || id >= V) {
      throw Error("InvalidToken", "token id " + std::to_string(id) +
                                      " outside vocabulary of " +
                                      std::to_string(V));
    }
  }

  const T* P = params_.data();
  const T* wte = P + layout_[0].offset;
  const T* wpe = P + layout_[1].offset;
  auto at = [&](int idx) { return P + layout_[idx].offset; };

  acts.rows = L;
  acts.blocks.resize(config_.num_layers);
  std::vector<T> x(static_cast<size_t>(L) * C);
  for (int t = 0; t < L; ++t) {
    const T* te = wte + static_cast<size_t>(tokens[t]) * C;
    const T* pe = wpe + static_cast<size_t>(t) * C;
    for (int c = 0; c < C; ++c) x[static_cast<size_t>(t) * C + c] = te[c] + pe[c];
  }

  const T scale = T(1) / std::sqrt(static_cast<T>(D));
  std::vector<T> tmp(static_cast<size_t>(L) * C);
  for (int l = 0; l < config_.num_layers; ++l) {
    auto& b = acts.blocks[l];
    const BlockIndex bi = block_index(l);
    b.x_in = x;
    b.ln1_xhat.resize(static_cast<size_t>(L) * C);
    b.ln1_rstd.resize(L);
    b.ln1_out.resize(static_cast<size_t>(L) * C);
    layer_norm(x.data(), at(bi.ln1_g), at(bi.ln1_b), b.ln1_out.data(),
               b.ln1_xhat.data(), b.ln1_rstd.data(), L, C);
    b.qkv.resize(static_cast<size_t>(L) * 3 * C);
    matmul(b.ln1_out.data(), at(bi.w_qkv), at(bi.b_qkv), b.qkv.data(), L, C,
           3 * C);

    b.att.assign(static_cast<size_t>(H) * L * L, T(0));
    b.y.assign(static_cast<size_t>(L) * C, T(0));
    for (int h = 0; h < H; ++h) {
      for (int t = 0; t < L; ++t) {
        const T* q = b.qkv.data() + static_cast<size_t>(t) * 3 * C + h * D;
        T* p = b.att.data() + (static_cast<size_t>(h) * L + t) * L;
        T max_s = -std::numeric_limits<T>::infinity();
        for (int u = 0; u <= t; ++u) {
          const T* k = b.qkv.data() + static_cast<size_t>(u) * 3 * C + C + h * D;
          T s = 0;
          for (int d = 0; d < D; ++d) s += q[d] * k[d];
          s *= scale;
          p[u] = s;
          max_s = std::max(max_s, s);
        }
        T sum = 0;
        for (int u = 0; u <= t; ++u) {
          p[u] = std::exp(p[u] - max_s);
          sum += p[u];
        }
        T* y = b.y.data() + static_cast<size_t>(t) * C + h * D;
        for (int u = 0; u <= t; ++u) {
          p[u] /= sum;
          const T* v =
              b.qkv.data() + static_cast<size_t>(u) * 3 * C + 2 * C + h * D;
          for (int d = 0; d < D; ++d) y[d] += p[u] * v[d];
        }
      }
    }
    matmul(b.y.data(), at(bi.w_attn_proj), at(bi.b_attn_proj), tmp.data(), L, C,
           C);
    for (size_t i = 0; i < x.size(); ++i) x[i] += tmp[i];
    b.x_mid = x;

    b.ln2_xhat.resize(static_cast<size_t>(L) * C);
    b.ln2_rstd.resize(L);
    b.ln2_out.resize(static_cast<size_t>(L) * C);
    layer_norm(x.data(), at(bi.ln2_g), at(bi.ln2_b), b.ln2_out.data(),
               b.ln2_xhat.data(), b.ln2_rstd.data(), L, C);
    b.fc.resize(static_cast<size_t>(L) * F);
    b.fc_act.resize(static_cast<size_t>(L) * F);
    matmul(b.ln2_out.data(), at(bi.w_fc), at(bi.b_fc), b.fc.data(), L, C, F);
    for (size_t i = 0; i < b.fc.size(); ++i) b.fc_act[i] = gelu(b.fc[i]);
    matmul(b.fc_act.data(), at(bi.w_mlp_proj), at(bi.b_mlp_proj), tmp.data(), L,
           F, C);
    for (size_t i = 0; i < x.size(); ++i) x[i] += tmp[i];
  }

  const int first = last_only ? L - 1 : 0;
  const int rows = L - first;
  const size_t lnf_g = layout_.size() - 2;
  acts.x_out = std::move(x);
  acts.lnf_xhat.resize(static_cast<size_t>(rows) * C);
  acts.lnf_rstd.resize(rows);
  acts.lnf_out.resize(static_cast<size_t>(rows) * C);
  layer_norm(acts.x_out.data() + static_cast<size_t>(first) * C,
             at(static_cast<int>(lnf_g)), at(static_cast<int>(lnf_g + 1)),
             acts.lnf_out.data(), acts.lnf_xhat.data(), acts.lnf_rstd.data(),
             rows, C);
  acts.logits.assign(static_cast<size_t>(rows) * V, T(0));
  for (int t = 0; t < rows; ++t) {
    const T* f = acts.lnf_out.data() + static_cast<size_t>(t) * C;
    T* out = acts.logits.data() + static_cast<size_t>(t) * V;
    for (int v = 0; v < V; ++v) {
      const T* e = wte + static_cast<size_t>(v) * C;
      T acc = 0;
      for (int c = 0; c < C; ++c) acc += f[c] * e[c];
      out[v] = acc;
    }
  }
}

template <typename T>
std::vector<T> Transformer<T>::forward(std::span<const int32_t> tokens) const {
  Activations acts;
  run_forward(tokens, acts, false);
  return std::move(acts.logits);
}

template <typename T>
std::vector<T> Transformer<T>::last_logits(
    std::span<const int32_t> tokens) const {
  Activations acts;
  run_forward(tokens, acts, true);
  return std::move(acts.logits);
}

template <typename T>
T Transformer<T>::forward_backward(std::span<const int32_t> inputs,
                                   std::span<const int32_t> targets,
                                   std::span<T> grad) const {
  if (inputs.size() != targets.size()) {
    throw Error("ShapeMismatch", "inputs and targets differ in length");
  }
  if (grad.size() != params_.size()) {
    throw Error("ShapeMismatch", "gradient buffer does not match parameters");
  }
  Activations acts;
  run_forward(inputs, acts, false);

  const int L = acts.rows;
  const int C = config_.embed_dim;
  const int H = config_.num_heads;
  const int D = C / H;
  const int F = config_.mlp_ratio * C;
  const int V = config_.vocab_size;
  const T* P = params_.data();
  T* G = grad.data();
  auto at = [&](int idx) { return P + layout_[idx].offset; };
  auto gat = [&](int idx) { return G + layout_[idx].offset; };

  // Loss and d(loss)/d(logits).
  int counted = 0;
  for (int32_t t : targets) {
    if (t < 0 || t >= V) {
      throw Error("InvalidToken", "target id " + std::to_string(t) +
                                      " outside vocabulary");
    }
    if (t != 0) ++counted;
  }
  std::vector<T> d_logits(static_cast<size_t>(L) * V, T(0));
  double loss = 0.0;
  for (int t = 0; t < L && counted > 0; ++t) {
    if (targets[t] == 0) continue;
    const T* row = acts.logits.data() + static_cast<size_t>(t) * V;
    T max_l = *std::max_element(row, row + V);
    T sum = 0;
    for (int v = 0; v < V; ++v) sum += std::exp(row[v] - max_l);
    T log_z = max_l + std::log(sum);
    loss += static_cast<double>(log_z - row[targets[t]]);
    T* d = d_logits.data() + static_cast<size_t>(t) * V;
    for (int v = 0; v < V; ++v) d[v] = std::exp(row[v] - log_z) / counted;
    d[targets[t]] -= T(1) / counted;
  }
  if (counted == 0) return T(0);
  loss /= counted;

  // Tied output embedding.
  T* d_wte = gat(0);
  std::vector<T> d_lnf(static_cast<size_t>(L) * C, T(0));
  for (int t = 0; t < L; ++t) {
    const T* d = d_logits.data() + static_cast<size_t>(t) * V;
    const T* f = acts.lnf_out.data() + static_cast<size_t>(t) * C;
    T* df = d_lnf.data() + static_cast<size_t>(t) * C;
    for (int v = 0; v < V; ++v) {
      const T dv = d[v];
      if (dv == T(0)) continue;
      const T* e = P + static_cast<size_t>(v) * C;
      T* de = d_wte + static_cast<size_t>(v) * C;
      for (int c = 0; c < C; ++c) {
        df[c] += dv * e[c];
        de[c] += dv * f[c];
      }
    }
  }

  const int lnf_g = static_cast<int>(layout_.size()) - 2;
  std::vector<T> dx(static_cast<size_t>(L) * C, T(0));
  layer_norm_backward(d_lnf.data(), acts.lnf_xhat.data(), acts.lnf_rstd.data(),
                      at(lnf_g), dx.data(), gat(lnf_g), gat(lnf_g + 1), L, C);

  const T scale = T(1) / std::sqrt(static_cast<T>(D));
  std::vector<T> d_fc_act, d_fc, d_ln2(static_cast<size_t>(L) * C),
      d_y(static_cast<size_t>(L) * C), d_qkv, d_ln1(static_cast<size_t>(L) * C),
      dp(L);
  for (int l = config_.num_layers - 1; l >= 0; --l) {
    const auto& b = acts.blocks[l];
    const BlockIndex bi = block_index(l);

    // MLP: x += proj(gelu(fc(ln2(x)))).
    d_fc_act.assign(static_cast<size_t>(L) * F, T(0));
    matmul_backward(b.fc_act.data(), at(bi.w_mlp_proj), dx.data(),
                    d_fc_act.data(), gat(bi.w_mlp_proj), gat(bi.b_mlp_proj), L,
                    F, C);
    d_fc.resize(d_fc_act.size());
    for (size_t i = 0; i < d_fc.size(); ++i) {
      d_fc[i] = d_fc_act[i] * gelu_grad(b.fc[i]);
    }
    std::fill(d_ln2.begin(), d_ln2.end(), T(0));
    matmul_backward(b.ln2_out.data(), at(bi.w_fc), d_fc.data(), d_ln2.data(),
                    gat(bi.w_fc), gat(bi.b_fc), L, C, F);
    layer_norm_backward(d_ln2.data(), b.ln2_xhat.data(), b.ln2_rstd.data(),
                        at(bi.ln2_g), dx.data(), gat(bi.ln2_g), gat(bi.ln2_b),
                        L, C);

    // Attention: x += proj(attn(ln1(x))).
    std::fill(d_y.begin(), d_y.end(), T(0));
    matmul_backward(b.y.data(), at(bi.w_attn_proj), dx.data(), d_y.data(),
                    gat(bi.w_attn_proj), gat(bi.b_attn_proj), L, C, C);
    d_qkv.assign(static_cast<size_t>(L) * 3 * C, T(0));
    for (int h = 0; h < H; ++h) {
      for (int t = 0; t < L; ++t) {
        const T* p = b.att.data() + (static_cast<size_t>(h) * L + t) * L;
        const T* dy = d_y.data() + static_cast<size_t>(t) * C + h * D;
        T dot = 0;
        for (int u = 0; u <= t; ++u) {
          const T* v =
              b.qkv.data() + static_cast<size_t>(u) * 3 * C + 2 * C + h * D;
          T* dv = d_qkv.data() + static_cast<size_t>(u) * 3 * C + 2 * C + h * D;
          T acc = 0;
          for (int d = 0; d < D; ++d) {
            acc += dy[d] * v[d];
            dv[d] += p[u] * dy[d];
          }
          dp[u] = acc;
          dot += p[u] * acc;
        }
        const T* q = b.qkv.data() + static_cast<size_t>(t) * 3 * C + h * D;
        T* dq = d_qkv.data() + static_cast<size_t>(t) * 3 * C + h * D;
        for (int u = 0; u <= t; ++u) {
          T ds = p[u] * (dp[u] - dot) * scale;
          const T* k = b.qkv.data() + static_cast<size_t>(u) * 3 * C + C + h * D;
          T* dk = d_qkv.data() + static_cast<size_t>(u) * 3 * C + C + h * D;
          for (int d = 0; d < D; ++d) {
            dq[d] += ds * k[d];
            dk[d] += ds * q[d];
          }
        }
      }
    }
    std::fill(d_ln1.begin(), d_ln1.end(), T(0));
    matmul_backward(b.ln1_out.data(), at(bi.w_qkv), d_qkv.data(), d_ln1.data(),
                    gat(bi.w_qkv), gat(bi.b_qkv), L, C, 3 * C);
    layer_norm_backward(d_ln1.data(), b.ln1_xhat.data(), b.ln1_rstd.data(),
                        at(bi.ln1_g), dx.data(), gat(bi.ln1_g), gat(bi.ln1_b),
                        L, C);
  }

  T* d_wpe = gat(1);
  for (int t = 0; t < L; ++t) {
    const T* g = dx.data() + static_cast<size_t>(t) * C;
    T* de = d_wte + static_cast<size_t>(inputs[t]) * C;
    T* dpe = d_wpe + static_cast<size_t>(t) * C;
    for (int c = 0; c < C; ++c) {
      de[c] += g[c];
      dpe[c] += g[c];
    }
  }
  return static_cast<T>(loss);
}

template class Transformer<float>;
template class Transformer<double>;

template <typename T>
KvCache<T>::KvCache(const Transformer<T>& model)
    : model_(model),
      keys_(model.config().num_layers),
      values_(model.config().num_layers) {
  const size_t n = static_cast<size_t>(model.config().context_length) *
                   model.config().embed_dim;
  for (auto& k : keys_) k.resize(n);
  for (auto& v : values_) v.resize(n);
}

template <typename T>
std::vector<T> KvCache<T>::push(int32_t token) {
  const ModelConfig& cfg = model_.config();
  const int C = cfg.embed_dim;
  const int H = cfg.num_heads;
  const int D = C / H;
  const int F = cfg.mlp_ratio * C;
  const int V = cfg.vocab_size;
  if (length_ >= cfg.context_length) {
    throw Error("ContextOverflow", "cache already holds " +
                                       std::to_string(length_) + " tokens");
  }
  if (token < 0 || token >= V) {
    throw Error("InvalidToken", "token id " + std::to_string(token) +
                                    " outside vocabulary of " +
                                    std::to_string(V));
  }
  const auto& layout = model_.layout();
  const T* P = model_.params().data();
  auto at = [&](size_t idx) { return P + layout[idx].offset; };
  const int t = length_;

  std::vector<T> x(C), h(C), xhat(C), qkv(3 * C), y(C), tmp(C), fc(F);
  std::vector<T> scores(t + 1);
  T rstd;
  for (int c = 0; c < C; ++c) {
    x[c] = at(0)[static_cast<size_t>(token) * C + c] +
           at(1)[static_cast<size_t>(t) * C + c];
  }
  const T scale = T(1) / std::sqrt(static_cast<T>(D));
  for (int l = 0; l < cfg.num_layers; ++l) {
    const BlockIndex bi = block_index(l);
    layer_norm(x.data(), at(bi.ln1_g), at(bi.ln1_b), h.data(), xhat.data(),
               &rstd, 1, C);
    matmul(h.data(), at(bi.w_qkv), at(bi.b_qkv), qkv.data(), 1, C, 3 * C);
    T* keys = keys_[l].data();
    T* values = values_[l].data();
    std::copy(qkv.begin() + C, qkv.begin() + 2 * C,
              keys + static_cast<size_t>(t) * C);
    std::copy(qkv.begin() + 2 * C, qkv.end(),
              values + static_cast<size_t>(t) * C);

    std::fill(y.begin(), y.end(), T(0));
    for (int hd = 0; hd < H; ++hd) {
      const T* q = qkv.data() + hd * D;
      T max_s = -std::numeric_limits<T>::infinity();
      for (int u = 0; u <= t; ++u) {
        const T* k = keys + static_cast<size_t>(u) * C + hd * D;
        T s = 0;
        for (int d = 0; d < D; ++d) s += q[d] * k[d];
        s *= scale;
        scores[u] = s;
        max_s = std::max(max_s, s);
      }
      T sum = 0;
      for (int u = 0; u <= t; ++u) {
        scores[u] = std::exp(scores[u] - max_s);
        sum += scores[u];
      }
      T* yh = y.data() + hd * D;
      for (int u = 0; u <= t; ++u) {
        T p = scores[u] / sum;
        const T* v = values + static_cast<size_t>(u) * C + hd * D;
        for (int d = 0; d < D; ++d) yh[d] += p * v[d];
      }
    }
    matmul(y.data(), at(bi.w_attn_proj), at(bi.b_attn_proj), tmp.data(), 1, C, C);
    for (int c = 0; c < C; ++c) x[c] += tmp[c];

    layer_norm(x.data(), at(bi.ln2_g), at(bi.ln2_b), h.data(), xhat.data(),
               &rstd, 1, C);
    matmul(h.data(), at(bi.w_fc), at(bi.b_fc), fc.data(), 1, C, F);
    for (auto& v : fc) v = gelu(v);
    matmul(fc.data(), at(bi.w_mlp_proj), at(bi.b_mlp_proj), tmp.data(), 1, F, C);
    for (int c = 0; c < C; ++c) x[c] += tmp[c];
  }
  ++length_;

  const size_t lnf = layout.size() - 2;
  layer_norm(x.data(), at(lnf), at(lnf + 1), h.data(), xhat.data(), &rstd, 1, C);
  std::vector<T> logits(V);
  const T* wte = at(0);
  for (int v = 0; v < V; ++v) {
    const T* e = wte + static_cast<size_t>(v) * C;
    T acc = 0;
    for (int c = 0; c < C; ++c) acc += h[c] * e[c];
    logits[v] = acc;
  }
  return logits;
}

template class KvCache<float>;
template class KvCache<double>;

template <typename T>
double cross_entropy(std::span<const T> logits, int vocab_size,
                     std::span<const int32_t> targets) {
  if (vocab_size <= 0 ||
      logits.size() != targets.size() * static_cast<size_t>(vocab_size)) {
    throw Error("ShapeMismatch", "logits do not match targets x vocab_size");
  }
  double total = 0.0;
  size_t counted = 0;
  for (size_t t = 0; t < targets.size(); ++t) {
    if (targets[t] == 0) continue;
    if (targets[t] < 0 || targets[t] >= vocab_size) {
      throw Error("InvalidToken", "target outside vocabulary");
    }
    auto row = logits.subspan(t * vocab_size, vocab_size);
    double max_l = static_cast<double>(*std::max_element(row.begin(), row.end()));
    double sum = 0.0;
    for (T v : row) sum += std::exp(static_cast<double>(v) - max_l);
    total += max_l + std::log(sum) - static_cast<double>(row[targets[t]]);
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

template double cross_entropy<float>(std::span<const float>, int,
                                     std::span<const int32_t>);
template double cross_entropy<double>(std::span<const double>, int,
                                      std::span<const int32_t>);

template <typename T>
std::vector<double> softmax(std::span<const T> row, double temperature) {
  std::vector<double> p(row.size());
  double max_l = -std::numeric_limits<double>::infinity();
  for (T v : row) max_l = std::max(max_l, static_cast<double>(v) / temperature);
  double sum = 0.0;
  for (size_t i = 0; i < row.size(); ++i) {
    p[i] = std::exp(static_cast<double>(row[i]) / temperature - max_l);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

template std::vector<double> softmax<float>(std::span<const float>, double);
template std::vector<double> softmax<double>(std::span<const double>, double);

}  // namespace sgflm
