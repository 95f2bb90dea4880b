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

#include "sgflm/sgf.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sgflm {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '|' ||
         c == '\v' || c == '\f';
}

bool is_ident_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

std::string escape_value(std::string_view v) {
  std::string out;
  out.reserve(v.size());
  for (char c : v) {
    if (c == ']' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, ParseMode mode) : text_(text), mode_(mode) {}

  ParseResult run() {
    auto open = text_.find('(');
    if (open == std::string_view::npos) {
      report(ParseDiagnostic::Kind::kNoGameTree, text_.size(),
             "no game tree found");
      return std::move(result_);
    }
    pos_ = open + 1;
    game_tree();
    return std::move(result_);
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!eof() && is_space(text_[pos_])) ++pos_;
  }

  void report(ParseDiagnostic::Kind kind, size_t offset, std::string message,
              std::string payload = {}) {
    if (mode_ == ParseMode::kStrict &&
        kind != ParseDiagnostic::Kind::kVariationSkipped) {
      std::string kind_name;
      switch (kind) {
        case ParseDiagnostic::Kind::kMalformedMove: kind_name = "MalformedMove"; break;
        case ParseDiagnostic::Kind::kUnexpectedByte: kind_name = "UnexpectedByte"; break;
        case ParseDiagnostic::Kind::kUnterminated: kind_name = "Unterminated"; break;
        default: kind_name = "NoGameTree"; break;
      }
      throw Error(kind_name, message + " at byte " + std::to_string(offset));
    }
    result_.diagnostics.push_back(
        {kind, offset, std::move(message), std::move(payload)});
  }

  // Cursor is just past the opening '(' of the outermost tree. Each entry on
  // the stack records whether that level has already descended into its main
  // line child.
  void game_tree() {
    std::vector<bool> took_child{false};
    while (!took_child.empty()) {
      skip_space();
      if (eof()) {
        report(ParseDiagnostic::Kind::kUnterminated, pos_,
               "game tree not closed");
        return;
      }
      char c = text_[pos_];
      if (c == ';') {
        ++pos_;
        node();
      } else if (c == '(') {
        if (!took_child.back()) {
          took_child.back() = true;
          took_child.push_back(false);
          ++pos_;
        } else {
          size_t start = pos_;
          skip_subtree();
          report(ParseDiagnostic::Kind::kVariationSkipped, start,
                 "variation skipped");
        }
      } else if (c == ')') {
        ++pos_;
        took_child.pop_back();
      } else {
        report(ParseDiagnostic::Kind::kUnexpectedByte, pos_,
               std::string("unexpected byte '") + c + "'");
        ++pos_;
      }
    }
  }

  // Skips a balanced "( ... )", honoring bracketed values.
  void skip_subtree() {
    int depth = 0;
    while (!eof()) {
      char c = text_[pos_];
      if (c == '[') {
        std::string ignored;
        read_value(ignored);
        continue;
      }
      ++pos_;
      if (c == '(') {
        ++depth;
      } else if (c == ')') {
        if (--depth == 0) return;
      }
    }
  }

  // Cursor at '['. Leaves it past the closing ']'.
  bool read_value(std::string& out) {
    size_t start = pos_;
    ++pos_;
    while (!eof()) {
      char c = text_[pos_++];
      if (c == ']') return true;
      if (c == '\\' && !eof()) {
        char next = text_[pos_++];
        if (next == '\n' || next == '\r') {
          // Soft line break.
          if (!eof() && (text_[pos_] == '\n' || text_[pos_] == '\r') &&
              text_[pos_] != next) {
            ++pos_;
          }
          continue;
        }
        out.push_back(next);
        continue;
      }
      out.push_back(c);
    }
    report(ParseDiagnostic::Kind::kUnterminated, start,
           "property value not closed");
    return false;
  }

  void node() {
    bool is_root = !seen_node_;
    seen_node_ = true;
    while (true) {
      skip_space();
      if (eof() || !is_ident_char(text_[pos_])) return;
      size_t id_start = pos_;
      while (!eof() && is_ident_char(text_[pos_])) ++pos_;
      std::string id(text_.substr(id_start, pos_ - id_start));
      std::vector<std::string> values;
      std::vector<size_t> offsets;
      while (true) {
        skip_space();
        if (eof() || text_[pos_] != '[') break;
        offsets.push_back(pos_);
        std::string value;
        if (!read_value(value)) return;
        values.push_back(std::move(value));
      }
      if (values.empty()) {
        report(ParseDiagnostic::Kind::kUnexpectedByte, id_start,
               "property " + id + " has no value");
        continue;
      }
      if (id == "B" || id == "W") {
        Color color = id == "B" ? Color::kBlack : Color::kWhite;
        for (size_t i = 0; i < values.size(); ++i) {
          add_move(color, values[i], offsets[i]);
        }
      } else if (is_root) {
        result_.record.header.append({std::move(id), std::move(values)});
      }
    }
  }

  void add_move(Color color, const std::string& payload, size_t offset) {
    int size = result_.record.board_size();
    if (payload.empty() || (payload == "tt" && size <= 19)) {
      result_.record.moves.push_back(Move::pass(color));
      return;
    }
    auto in_range = [size](char c) { return c >= 'a' && c < 'a' + size; };
    if (payload.size() == 2 && in_range(payload[0]) && in_range(payload[1])) {
      result_.record.moves.push_back(
          Move::play(color, payload[0] - 'a', payload[1] - 'a'));
      return;
    }
    report(ParseDiagnostic::Kind::kMalformedMove, offset,
           std::string("malformed move ") + to_char(color) + "[" + payload +
               "]",
           payload);
  }

  std::string_view text_;
  ParseMode mode_;
  size_t pos_ = 0;
  bool seen_node_ = false;
  ParseResult result_;
};

}  // namespace

std::string to_sgf_coord(const Move& move) {
  if (move.is_pass()) return {};
  return {static_cast<char>('a' + move.point->col),
          static_cast<char>('a' + move.point->row)};
}

const std::string* Header::find(std::string_view id) const {
  for (const auto& p : entries_) {
    if (p.id == id && !p.values.empty()) return &p.values.front();
  }
  return nullptr;
}

void Header::set(std::string_view id, std::string value) {
  for (auto& p : entries_) {
    if (p.id == id) {
      p.values = {std::move(value)};
      return;
    }
  }
  entries_.push_back({std::string(id), {std::move(value)}});
}

int GameRecord::board_size() const {
  const std::string* sz = header.find("SZ");
  if (sz == nullptr) return 19;
  int n = 0;
  auto [ptr, ec] = std::from_chars(sz->data(), sz->data() + sz->size(), n);
  if (ec != std::errc() || n < 2 || n > 25) return 19;
  return n;
}

std::string_view to_string(ParseDiagnostic::Kind kind) {
  switch (kind) {
    case ParseDiagnostic::Kind::kMalformedMove: return "malformed_move";
    case ParseDiagnostic::Kind::kVariationSkipped: return "variation_skipped";
    case ParseDiagnostic::Kind::kUnexpectedByte: return "unexpected_byte";
    case ParseDiagnostic::Kind::kUnterminated: return "unterminated";
    case ParseDiagnostic::Kind::kNoGameTree: return "no_game_tree";
  }
  return "unknown";
}

size_t ParseResult::count(ParseDiagnostic::Kind kind) const {
  return std::count_if(diagnostics.begin(), diagnostics.end(),
                       [kind](const auto& d) { return d.kind == kind; });
}

ParseResult parse_game(std::string_view text, ParseMode mode) {
  return Parser(text, mode).run();
}

std::string serialize_game(const GameRecord& record) {
  std::string out = "(;";
  for (const auto& prop : record.header) {
    out += prop.id;
    for (const auto& v : prop.values) {
      out += '[';
      out += escape_value(v);
      out += ']';
    }
  }
  for (const auto& m : record.moves) {
    out += ';';
    out += to_char(m.color);
    out += '[';
    out += to_sgf_coord(m);
    out += ']';
  }
  out += ')';
  return out;
}

std::string preprocess_game_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool in_break = false;
  for (char ch : raw) {
    auto byte = static_cast<unsigned char>(ch);
    if (byte >= 0x80) continue;
    if (ch == '\r' || ch == '\n') {
      if (!in_break) out.push_back('|');
      in_break = true;
      continue;
    }
    in_break = false;
    out.push_back(ch);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PreprocessResult preprocess_corpus(std::span<const std::filesystem::path> files) {
  PreprocessResult result;
  for (const auto& path : files) {
    std::string raw;
    try {
      raw = read_file(path);
    } catch (const Error& e) {
      result.diagnostics.push_back("IoError: " + std::string(e.what()));
      continue;
    }
    std::string line = preprocess_game_text(raw);
    if (line.empty()) {
      result.diagnostics.push_back("EmptyGame: " + path.string());
      continue;
    }
    result.corpus += line;
    result.corpus += '\n';
    ++result.games;
  }
  return result;
}

std::vector<std::filesystem::path> list_sgf_files(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) {
    throw Error("IoError", "not a directory: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sgf") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<std::string_view> corpus_lines(std::string_view corpus) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start < corpus.size()) {
    size_t end = corpus.find('\n', start);
    if (end == std::string_view::npos) end = corpus.size();
    if (end > start) lines.push_back(corpus.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

LintReport lint_corpus(std::string_view corpus) {
  LintReport report;
  size_t line_no = 0;
  size_t start = 0;
  while (start < corpus.size()) {
    size_t end = corpus.find('\n', start);
    if (end == std::string_view::npos) end = corpus.size();
    std::string_view line = corpus.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;

    ++report.games;
    ParseResult parsed = parse_game(line);
    for (const auto& d : parsed.diagnostics) {
      bool out_of_range = d.kind == ParseDiagnostic::Kind::kMalformedMove &&
                          d.payload.size() == 2 &&
                          std::islower(static_cast<unsigned char>(d.payload[0])) &&
                          std::islower(static_cast<unsigned char>(d.payload[1]));
      report.diagnostics.push_back(
          {line_no, out_of_range ? "out_of_range" : "parse_error",
           std::string(to_string(d.kind)) + ": " + d.message + " at byte " +
               std::to_string(d.offset)});
    }
    const auto& moves = parsed.record.moves;
    report.moves += moves.size();
    if (!moves.empty() && moves.front().color != Color::kBlack) {
      report.diagnostics.push_back(
          {line_no, "non_alternating", "non-alternating at move 1"});
    }
    for (size_t i = 1; i < moves.size(); ++i) {
      if (moves[i].color == moves[i - 1].color) {
        report.diagnostics.push_back(
            {line_no, "non_alternating",
             "non-alternating at move " + std::to_string(i + 1)});
      }
    }
    if (parsed.record.header.find("RE") == nullptr) {
      report.diagnostics.push_back(
          {line_no, "missing_result", "missing result tag RE"});
    }
  }
  if (report.games > 0) {
    report.mean_game_length =
        static_cast<double>(report.moves) / static_cast<double>(report.games);
  }
  return report;
}

std::map<std::string, size_t> LintReport::counts_by_kind() const {
  std::map<std::string, size_t> counts;
  for (const auto& d : diagnostics) ++counts[d.kind];
  return counts;
}

std::string LintReport::to_text() const {
  std::ostringstream out;
  out << "games " << games << "\n"
      << "moves " << moves << "\n"
      << "mean_game_length " << mean_game_length << "\n"
      << "diagnostics " << diagnostics.size() << "\n";
  for (const auto& [kind, n] : counts_by_kind()) {
    out << "  " << kind << " " << n << "\n";
  }
  for (const auto& d : diagnostics) {
    out << "line " << d.line << ": " << d.kind << ": " << d.message << "\n";
  }
  return out.str();
}

std::string LintReport::to_json() const {
  nlohmann::ordered_json j;
  j["games"] = games;
  j["moves"] = moves;
  j["mean_game_length"] = mean_game_length;
  j["counts_by_kind"] = counts_by_kind();
  auto& list = j["diagnostics"] = nlohmann::ordered_json::array();
  for (const auto& d : diagnostics) {
    list.push_back({{"line", d.line}, {"kind", d.kind}, {"message", d.message}});
  }
  return j.dump(2);
}

}  // namespace sgflm
