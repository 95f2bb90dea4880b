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

#ifndef SGFLM_TOKENIZER_H_
#define SGFLM_TOKENIZER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sgflm/sgf.h"

namespace sgflm {

enum class VocabMode { kMoveLevel, kCharLevel };

std::string_view to_string(VocabMode mode);
VocabMode parse_vocab_mode(std::string_view text);  // "move" | "char"

// Token id table (id formula version 1):
//
//   0 PAD, 1 BOS, 2 EOS                               both modes
//   MoveLevel: 3 black pass, 4 white pass,
//              5 + (white ? size*size : 0) + row*size + col
//   CharLevel: 3 + (byte - 0x20) for printable ASCII 0x20..0x7E
//
// MoveLevel has 727 ids on 19x19 and 167 on 9x9; CharLevel has 98.
struct Vocabulary {
  static constexpr int32_t kPad = 0;
  static constexpr int32_t kBos = 1;
  static constexpr int32_t kEos = 2;
  static constexpr int kIdFormulaVersion = 1;

  VocabMode mode = VocabMode::kMoveLevel;
  int board_size = 19;

  static Vocabulary move_level(int board_size = 19) {
    return {VocabMode::kMoveLevel, board_size};
  }
  static Vocabulary char_level() { return {VocabMode::kCharLevel, 19}; }

  int size() const {
    return mode == VocabMode::kMoveLevel ? 5 + 2 * board_size * board_size
                                         : 3 + (0x7E - 0x20 + 1);
  }

  int32_t move_id(const Move& move) const;
  Move id_to_move(int32_t id) const;  // id must be a move id (>= 3)

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

struct TokenSequence {
  VocabMode mode = VocabMode::kMoveLevel;
  std::vector<int32_t> ids;
};

// MoveLevel: BOS, one id per move, EOS; the header is not encoded.
// CharLevel: the serialized single-line record text, see encode_text.
TokenSequence encode(const GameRecord& record, const Vocabulary& vocab);

// CharLevel encoding of one corpus line: BOS, one id per byte, EOS. Throws
// Error("OutOfAlphabet") on a byte outside 0x20..0x7E.
TokenSequence encode_text(std::string_view line, const Vocabulary& vocab);

struct DecodeReport {
  size_t discarded_bytes = 0;     // CharLevel bytes outside any match
  bool truncated = false;         // text ends inside a move pattern
  size_t out_of_range_moves = 0;  // ";B[xy]" with letters past the board
  size_t ignored_tokens = 0;      // MoveLevel PAD/BOS after the start
};

struct DecodeResult {
  GameRecord record;
  DecodeReport report;
  std::string text;  // CharLevel only: the reconstructed bytes
};

// MoveLevel: inverse of the id formula, stopping at the first EOS.
// CharLevel: rebuilds the text, then keeps every non-overlapping
// ";B[xy]" / ";W[xy]" (x, y on the board) and ";B[]" / ";W[]" match, left to
// right, ignoring all other bytes. Never throws on model output.
DecodeResult decode(const TokenSequence& tokens, const Vocabulary& vocab);

// The CharLevel move scan on raw text.
DecodeResult extract_moves(std::string_view text, int board_size = 19);

}  // namespace sgflm

#endif  // SGFLM_TOKENIZER_H_
