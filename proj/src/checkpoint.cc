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

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "sgflm/train.h"

namespace sgflm {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'G', 'F', 'L', 'M', 'C', 'K', 'P'};

using json = nlohmann::ordered_json;

json to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size},     {"context_length", c.context_length},
          {"embed_dim", c.embed_dim},       {"num_layers", c.num_layers},
          {"num_heads", c.num_heads},       {"mlp_ratio", c.mlp_ratio},
          {"seed", c.seed}};
}

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"total_steps", c.total_steps},
          {"checkpoint_every", c.checkpoint_every},
          {"sample_length", c.sample_length},
          {"sample_temperature", c.sample_temperature},
          {"sample_top_k", c.sample_top_k},
          {"lr_schedule", c.lr_schedule},
          {"grad_clip", c.grad_clip},
          {"window_align", c.window_align},
          {"seed", c.seed}};
}

[[noreturn]] void corrupt(const std::string& msg) {
  throw Error("CorruptCheckpoint", msg);
}

template <typename Int>
void put(std::ostream& out, Int v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename Int>
Int get(std::istream& in) {
  Int v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
    corrupt("unexpected end of file");
  }
  return v;
}

void put_tensor(std::ostream& out, const std::string& name,
                const std::vector<int>& shape, const float* data) {
  put<uint32_t>(out, static_cast<uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  put<uint32_t>(out, static_cast<uint32_t>(shape.size()));
  size_t n = 1;
  for (int d : shape) {
    put<uint32_t>(out, static_cast<uint32_t>(d));
    n *= static_cast<size_t>(d);
  }
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(n * sizeof(float)));
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  json header;
  header["format_version"] = Checkpoint::kFormatVersion;
  header["model"] = to_json(ckpt.model);
  header["train"] = to_json(ckpt.train);
  header["vocabulary"] = {{"mode", std::string(to_string(ckpt.vocab.mode))},
                          {"size", ckpt.vocab.size()},
                          {"board_size", ckpt.vocab.board_size},
                          {"id_formula_version", Vocabulary::kIdFormulaVersion}};
  header["step"] = ckpt.step;
  header["loss_history"] = ckpt.loss_history;
  std::string text = header.dump();

  const auto layout = tensor_layout(ckpt.model);
  const size_t total = layout.back().offset + layout.back().size;
  if (ckpt.params.size() != total || ckpt.adam_m.size() != total ||
      ckpt.adam_v.size() != total) {
    throw Error("CorruptCheckpoint", "tensor sizes do not match the config");
  }

  // Write to a sibling temp file so a failed write never leaves a partial
  // checkpoint under the final name.
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", "cannot write " + tmp.string());
    out.write(kMagic, sizeof(kMagic));
    put<uint32_t>(out, Checkpoint::kFormatVersion);
    put<uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put<uint32_t>(out, static_cast<uint32_t>(3 * layout.size()));
    for (const auto& t : layout) {
      put_tensor(out, t.name, t.shape, ckpt.params.data() + t.offset);
    }
    for (const auto& t : layout) {
      put_tensor(out, "adam.m/" + t.name, t.shape, ckpt.adam_m.data() + t.offset);
    }
    for (const auto& t : layout) {
      put_tensor(out, "adam.v/" + t.name, t.shape, ckpt.adam_v.data() + t.offset);
    }
    if (!out) throw Error("IoError", "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    corrupt("bad magic");
  }
  auto version = get<uint32_t>(in);
  if (version != Checkpoint::kFormatVersion) {
    corrupt("unsupported format version " + std::to_string(version));
  }
  auto header_size = get<uint64_t>(in);
  if (header_size > (64ULL << 20)) corrupt("header too large");
  std::string text(header_size, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_size))) {
    corrupt("truncated header");
  }

  Checkpoint ckpt;
  try {
    json h = json::parse(text);
    const auto& m = h.at("model");
    ckpt.model.vocab_size = m.at("vocab_size");
    ckpt.model.context_length = m.at("context_length");
    ckpt.model.embed_dim = m.at("embed_dim");
    ckpt.model.num_layers = m.at("num_layers");
    ckpt.model.num_heads = m.at("num_heads");
    ckpt.model.mlp_ratio = m.at("mlp_ratio");
    ckpt.model.seed = m.at("seed");
    const auto& t = h.at("train");
    ckpt.train.learning_rate = t.at("learning_rate");
    ckpt.train.batch_size = t.at("batch_size");
    ckpt.train.beta1 = t.at("beta1");
    ckpt.train.beta2 = t.at("beta2");
    ckpt.train.epsilon = t.at("epsilon");
    ckpt.train.total_steps = t.at("total_steps");
    ckpt.train.checkpoint_every = t.at("checkpoint_every");
    ckpt.train.sample_length = t.at("sample_length");
    ckpt.train.sample_temperature = t.at("sample_temperature");
    ckpt.train.sample_top_k = t.at("sample_top_k");
    ckpt.train.lr_schedule = t.at("lr_schedule");
    ckpt.train.grad_clip = t.at("grad_clip");
    ckpt.train.window_align = t.value("window_align", std::string("token"));
    ckpt.train.seed = t.at("seed");
    const auto& v = h.at("vocabulary");
    ckpt.vocab.mode = parse_vocab_mode(v.at("mode").get<std::string>());
    ckpt.vocab.board_size = v.at("board_size");
    if (v.at("id_formula_version").get<int>() != Vocabulary::kIdFormulaVersion) {
      throw Error("VocabularyMismatch", "unknown token id formula version");
    }
    if (v.at("size").get<int>() != ckpt.vocab.size()) {
      throw Error("VocabularyMismatch",
                  "recorded vocabulary size disagrees with its mode");
    }
    ckpt.step = h.at("step");
    ckpt.loss_history = h.at("loss_history").get<std::vector<double>>();
  } catch (const json::exception& e) {
    corrupt(std::string("bad header: ") + e.what());
  }
  if (ckpt.model.vocab_size != ckpt.vocab.size()) {
    throw Error("VocabularyMismatch",
                "model vocab_size does not match the vocabulary descriptor");
  }

  const auto layout = tensor_layout(ckpt.model);
  const size_t total = layout.back().offset + layout.back().size;
  ckpt.params.resize(total);
  ckpt.adam_m.resize(total);
  ckpt.adam_v.resize(total);

  auto count = get<uint32_t>(in);
  if (count != 3 * layout.size()) corrupt("unexpected tensor count");
  for (uint32_t i = 0; i < count; ++i) {
    auto name_len = get<uint32_t>(in);
    if (name_len > 256) corrupt("tensor name too long");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) corrupt("truncated tensor name");
    const auto& info = layout[i % layout.size()];
    static const char* kPrefixes[3] = {"", "adam.m/", "adam.v/"};
    std::string expected = kPrefixes[i / layout.size()] + info.name;
    if (name != expected) corrupt("expected tensor " + expected + ", got " + name);
    auto rank = get<uint32_t>(in);
    if (rank != info.shape.size()) corrupt("bad rank for " + name);
    for (uint32_t d = 0; d < rank; ++d) {
      if (get<uint32_t>(in) != static_cast<uint32_t>(info.shape[d])) {
        corrupt("bad shape for " + name);
      }
    }
    std::vector<float>& dest = i < layout.size()       ? ckpt.params
                               : i < 2 * layout.size() ? ckpt.adam_m
                                                       : ckpt.adam_v;
    if (!in.read(reinterpret_cast<char*>(dest.data() + info.offset),
                 static_cast<std::streamsize>(info.size * sizeof(float)))) {
      corrupt("truncated data for " + name);
    }
  }
  return ckpt;
}

}  // namespace sgflm
