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

#ifndef SGFLM_SGF_H_
#define SGFLM_SGF_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgflm/error.h"

namespace sgflm {

enum class Color : uint8_t { kBlack, kWhite };

inline Color other(Color c) {
  return c == Color::kBlack ? Color::kWhite : Color::kBlack;
}
inline char to_char(Color c) { return c == Color::kBlack ? 'B' : 'W'; }

// Board intersection. The first SGF letter is the column, the second the row,
// origin at the top-left, 'a' = 0.
struct Point {
  int col = 0;
  int row = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Move {
  Color color = Color::kBlack;
  std::optional<Point> point;  // nullopt is a pass.

  static Move pass(Color c) { return {c, std::nullopt}; }
  static Move play(Color c, int col, int row) { return {c, Point{col, row}}; }

  bool is_pass() const { return !point.has_value(); }

  friend bool operator==(const Move&, const Move&) = default;
};

// SGF coordinate text for a move payload: "qd" for a stone, "" for a pass.
std::string to_sgf_coord(const Move& move);

struct Property {
  std::string id;
  std::vector<std::string> values;

  friend bool operator==(const Property&, const Property&) = default;
};

// Root-node properties in file order. Unknown ids are kept verbatim.
class Header {
 public:
  // First value of `id`, or nullptr.
  const std::string* find(std::string_view id) const;
  void set(std::string_view id, std::string value);
  void append(Property property) { entries_.push_back(std::move(property)); }

  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const Header&, const Header&) = default;

 private:
  std::vector<Property> entries_;
};

struct GameRecord {
  Header header;
  std::vector<Move> moves;
  std::string source;  // provenance, not part of equality

  // SZ from the header, 19 when absent or unparsable.
  int board_size() const;

  friend bool operator==(const GameRecord& a, const GameRecord& b) {
    return a.header == b.header && a.moves == b.moves;
  }
};

enum class ParseMode { kLenient, kStrict };

struct ParseDiagnostic {
  enum class Kind {
    kMalformedMove,
    kVariationSkipped,
    kUnexpectedByte,
    kUnterminated,
    kNoGameTree,
  };
  Kind kind;
  size_t offset;  // byte offset into the parsed text
  std::string message;
  std::string payload;  // offending bracket contents, for malformed moves
};

std::string_view to_string(ParseDiagnostic::Kind kind);

struct ParseResult {
  GameRecord record;
  std::vector<ParseDiagnostic> diagnostics;

  size_t count(ParseDiagnostic::Kind kind) const;
};

// Parses the first game tree in `text`. Lenient mode records problems as
// diagnostics and keeps going; strict mode throws Error on the first one
// (kind "MalformedMove", "Unterminated", ...).
//
// Only the main line is kept: at each branching the first subtree continues
// the line and its siblings are dropped with a kVariationSkipped diagnostic.
// Move payloads "" and "tt" are passes. Characters '|' and whitespace between
// nodes are ignored, so preprocessed corpus lines parse directly.
ParseResult parse_game(std::string_view text,
                       ParseMode mode = ParseMode::kLenient);

// "(;" + header properties + ";B[xy]" nodes + ")". An empty header with
// moves gives "(;;B[qd];W[pp])"; a record with neither gives "(;)".
std::string serialize_game(const GameRecord& record);

// Byte-level single-line transform of one game file: drop every byte >= 0x80,
// then replace each maximal run of CR/LF bytes with '|'. No trailing LF.
std::string preprocess_game_text(std::string_view raw);

struct PreprocessResult {
  std::string corpus;  // one LF-terminated line per game, input order
  size_t games = 0;
  std::vector<std::string> diagnostics;  // unreadable or empty files
};

PreprocessResult preprocess_corpus(std::span<const std::filesystem::path> files);

// All regular files ending in .sgf under `dir`, sorted by path.
std::vector<std::filesystem::path> list_sgf_files(
    const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);

struct LintDiagnostic {
  size_t line = 0;  // 1-based corpus line
  std::string kind;  // parse_error | non_alternating | out_of_range | missing_result
  std::string message;
};

struct LintReport {
  size_t games = 0;
  size_t moves = 0;
  double mean_game_length = 0.0;
  std::vector<LintDiagnostic> diagnostics;

  std::map<std::string, size_t> counts_by_kind() const;
  std::string to_text() const;
  std::string to_json() const;
};

LintReport lint_corpus(std::string_view corpus);

// Splits a corpus into its non-empty lines.
std::vector<std::string_view> corpus_lines(std::string_view corpus);

}  // namespace sgflm

#endif  // SGFLM_SGF_H_
