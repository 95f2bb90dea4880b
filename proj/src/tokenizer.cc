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

#include "sgflm/tokenizer.h"

namespace sgflm {

std::string_view to_string(VocabMode mode) {
  return mode == VocabMode::kMoveLevel ? "move" : "char";
}

VocabMode parse_vocab_mode(std::string_view text) {
  if (text == "move") return VocabMode::kMoveLevel;
  if (text == "char") return VocabMode::kCharLevel;
  throw Error("InvalidMode", "unknown vocabulary mode '" + std::string(text) +
                                 "' (expected move or char)");
}

int32_t Vocabulary::move_id(const Move& move) const {
  bool white = move.color == Color::kWhite;
  if (move.is_pass()) return white ? 4 : 3;
  int area = board_size * board_size;
  return 5 + (white ? area : 0) + move.point->row * board_size +
         move.point->col;
}

Move Vocabulary::id_to_move(int32_t id) const {
  if (id == 3) return Move::pass(Color::kBlack);
  if (id == 4) return Move::pass(Color::kWhite);
  int area = board_size * board_size;
  int offset = id - 5;
  Color color = offset >= area ? Color::kWhite : Color::kBlack;
  offset %= area;
  return Move::play(color, offset % board_size, offset / board_size);
}

TokenSequence encode(const GameRecord& record, const Vocabulary& vocab) {
  if (vocab.mode == VocabMode::kCharLevel) {
    return encode_text(serialize_game(record), vocab);
  }
  TokenSequence seq{vocab.mode, {}};
  seq.ids.reserve(record.moves.size() + 2);
  seq.ids.push_back(Vocabulary::kBos);
  for (const auto& m : record.moves) seq.ids.push_back(vocab.move_id(m));
  seq.ids.push_back(Vocabulary::kEos);
  return seq;
}

TokenSequence encode_text(std::string_view line, const Vocabulary& vocab) {
  if (vocab.mode != VocabMode::kCharLevel) {
    throw Error("InvalidMode", "encode_text needs a CharLevel vocabulary");
  }
  TokenSequence seq{vocab.mode, {}};
  seq.ids.reserve(line.size() + 2);
  seq.ids.push_back(Vocabulary::kBos);
  for (size_t i = 0; i < line.size(); ++i) {
    auto byte = static_cast<unsigned char>(line[i]);
    if (byte < 0x20 || byte > 0x7E) {
      throw Error("OutOfAlphabet", "byte " + std::to_string(byte) +
                                       " at offset " + std::to_string(i) +
                                       " is not printable ASCII");
    }
    seq.ids.push_back(3 + (byte - 0x20));
  }
  seq.ids.push_back(Vocabulary::kEos);
  return seq;
}

DecodeResult extract_moves(std::string_view text, int board_size) {
  DecodeResult out;
  if (board_size != 19) out.record.header.set("SZ", std::to_string(board_size));
  auto on_board = [board_size](char c) {
    return c >= 'a' && c < 'a' + board_size;
  };
  auto lower = [](char c) { return c >= 'a' && c <= 'z'; };

  size_t i = 0;
  size_t matched = 0;
  while (i < text.size()) {
    std::string_view rest = text.substr(i);
    if (rest.size() >= 4 && rest[0] == ';' && (rest[1] == 'B' || rest[1] == 'W') &&
        rest[2] == '[') {
      Color color = rest[1] == 'B' ? Color::kBlack : Color::kWhite;
      if (rest[3] == ']') {
        out.record.moves.push_back(Move::pass(color));
        matched += 4;
        i += 4;
        continue;
      }
      if (rest.size() >= 6 && rest[5] == ']' && on_board(rest[3]) &&
          on_board(rest[4])) {
        out.record.moves.push_back(
            Move::play(color, rest[3] - 'a', rest[4] - 'a'));
        matched += 6;
        i += 6;
        continue;
      }
      if (rest.size() >= 6 && rest[5] == ']' && lower(rest[3]) &&
          lower(rest[4])) {
        ++out.report.out_of_range_moves;
      }
    }
    ++i;
  }
  out.report.discarded_bytes = text.size() - matched;

  // A trailing proper prefix of a move pattern means the text was cut off.
  size_t last = text.rfind(';');
  if (last != std::string_view::npos) {
    std::string_view tail = text.substr(last);
    bool prefix = tail.size() < 6;
    if (tail.size() >= 2) prefix = prefix && (tail[1] == 'B' || tail[1] == 'W');
    if (tail.size() >= 3) prefix = prefix && tail[2] == '[';
    if (tail.size() >= 4) prefix = prefix && on_board(tail[3]);
    if (tail.size() >= 5) prefix = prefix && on_board(tail[4]);
    out.report.truncated = prefix;
  }
  out.text = std::string(text);
  return out;
}

DecodeResult decode(const TokenSequence& tokens, const Vocabulary& vocab) {
  if (vocab.mode == VocabMode::kCharLevel) {
    std::string text;
    text.reserve(tokens.ids.size());
    size_t ignored = 0;
    for (size_t i = 0; i < tokens.ids.size(); ++i) {
      int32_t id = tokens.ids[i];
      if (id == Vocabulary::kEos) break;
      if (id < 3 || id >= vocab.size()) {
        if (!(i == 0 && id == Vocabulary::kBos)) ++ignored;
        continue;
      }
      text.push_back(static_cast<char>(0x20 + (id - 3)));
    }
    DecodeResult out = extract_moves(text, vocab.board_size);
    out.report.ignored_tokens = ignored;
    return out;
  }

  DecodeResult out;
  if (vocab.board_size != 19) {
    out.record.header.set("SZ", std::to_string(vocab.board_size));
  }
  for (size_t i = 0; i < tokens.ids.size(); ++i) {
    int32_t id = tokens.ids[i];
    if (id == Vocabulary::kEos) break;
    if (id < 3 || id >= vocab.size()) {
      if (!(i == 0 && id == Vocabulary::kBos)) ++out.report.ignored_tokens;
      continue;
    }
    out.record.moves.push_back(vocab.id_to_move(id));
  }
  return out;
}

}  // namespace sgflm
