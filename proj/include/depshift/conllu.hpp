// CoNLL-U reader for dependency-annotated corpora.
//
// Only the columns the slot extractor needs are kept: FORM, LEMMA, UPOS,
// HEAD and DEPREL. Multiword-token ranges ("3-4") and empty nodes ("3.1")
// are dropped; basic HEAD indices never point at them.
#pragma once

#include <charconv>
#include <cstddef>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <zlib.h>

#include "depshift/log.hpp"
#include "depshift/text.hpp"

namespace depshift {

struct Token {
  int index = 0;  // 1-based position
  std::string form;
  std::string lemma;
  std::string upos;
  int head = 0;  // 0 = root
  std::string deprel;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::string source_id;  // "# sent_id = ..." when present

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct ParseError {
  std::size_t line = 0;
  std::string message;
};

class ConlluError : public std::runtime_error {
 public:
  ConlluError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class ErrorPolicy { skip, strict };

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

inline std::string underscore_empty(std::string_view s) {
  return s == "_" ? std::string() : std::string(s);
}

}  // namespace detail

/// Source of text lines. Returns false at end of input.
using LineSource = std::function<bool(std::string&)>;

inline LineSource lines_from(std::istream& in) {
  return [&in](std::string& line) { return static_cast<bool>(std::getline(in, line)); };
}

/// Opens a plain or gzip-compressed file as a line source (zlib reads
/// uncompressed files transparently).
inline LineSource open_lines(const std::string& path) {
  gzFile raw = gzopen(path.c_str(), "rb");
  if (raw == nullptr) throw std::runtime_error("cannot open '" + path + "'");
  gzbuffer(raw, 1 << 17);
  auto handle = std::shared_ptr<gzFile_s>(raw, [](gzFile f) { gzclose(f); });
  auto chunk = std::make_shared<std::vector<char>>(1 << 16);
  return [handle, chunk](std::string& line) {
    line.clear();
    bool any = false;
    while (gzgets(handle.get(), chunk->data(), static_cast<int>(chunk->size())) != nullptr) {
      any = true;
      std::string_view piece(chunk->data());
      if (!piece.empty() && piece.back() == '\n') {
        piece.remove_suffix(1);
        line.append(piece);
        return true;
      }
      line.append(piece);
    }
    int err = 0;
    const char* msg = gzerror(handle.get(), &err);
    if (err != Z_OK && err != Z_STREAM_END) {
      throw std::runtime_error(std::string("decompression error: ") + msg);
    }
    return any;
  };
}

/// Lazy, single-pass CoNLL-U reader. Each call to next() yields the next
/// well-formed sentence block. Malformed blocks are either skipped and
/// recorded (ErrorPolicy::skip) or raise ConlluError (ErrorPolicy::strict).
class ConlluReader {
 public:
  explicit ConlluReader(LineSource source, ErrorPolicy policy = ErrorPolicy::skip)
      : source_(std::move(source)), policy_(policy) {}

  std::optional<Sentence> next() {
    Sentence current;
    bool in_block = false;
    std::optional<ParseError> block_error;
    std::string line;
    while (source_(line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) {
        if (!in_block) continue;
        if (block_error) {
          reject(*block_error);
          current = Sentence{};
          in_block = false;
          block_error.reset();
          continue;
        }
        return current;
      }
      in_block = true;
      if (block_error) continue;
      if (line.front() == '#') {
        read_comment(line, current);
        continue;
      }
      block_error = read_token_line(line, current);
    }
    if (in_block) {
      if (block_error) {
        reject(*block_error);
        return std::nullopt;
      }
      return current;
    }
    return std::nullopt;
  }

  const std::vector<ParseError>& errors() const noexcept { return errors_; }
  std::size_t lines_read() const noexcept { return line_no_; }

 private:
  void reject(const ParseError& e) {
    if (policy_ == ErrorPolicy::strict) throw ConlluError(e.line, e.message);
    log::warn("skipping sentence: line " + std::to_string(e.line) + ": " + e.message);
    errors_.push_back(e);
  }

  static void read_comment(std::string_view line, Sentence& s) {
    line.remove_prefix(1);
    line = trim(line);
    constexpr std::string_view key = "sent_id";
    if (line.substr(0, key.size()) != key) return;
    auto rest = trim(line.substr(key.size()));
    if (rest.empty() || rest.front() != '=') return;
    s.source_id = std::string(trim(rest.substr(1)));
  }

  std::optional<ParseError> read_token_line(std::string_view line, Sentence& s) {
    const auto cols = detail::split_tabs(line);
    if (cols.size() != 10) {
      return ParseError{line_no_, "expected 10 tab-separated columns, found " +
                                      std::to_string(cols.size())};
    }
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
      return std::nullopt;  // multiword range or empty node
    }
    const auto index = detail::parse_int(id);
    if (!index || *index < 1) {
      return ParseError{line_no_, "invalid token ID '" + std::string(id) + "'"};
    }
    const auto head = detail::parse_int(cols[6]);
    if (!head || *head < 0) {
      return ParseError{line_no_, "non-integer HEAD '" + std::string(cols[6]) + "'"};
    }
    Token t;
    t.index = *index;
    t.form = std::string(cols[1]);
    // "_" in LEMMA means empty, except for a literal underscore token.
    t.lemma = (cols[2] == "_" && cols[1] != "_") ? std::string() : std::string(cols[2]);
    t.upos = detail::underscore_empty(cols[3]);
    t.head = *head;
    t.deprel = detail::underscore_empty(cols[7]);
    s.tokens.push_back(std::move(t));
    return std::nullopt;
  }

  LineSource source_;
  ErrorPolicy policy_;
  std::size_t line_no_ = 0;
  std::vector<ParseError> errors_;
};

/// Reads every sentence of a document. Convenience over ConlluReader.
inline std::vector<Sentence> parse_document(std::istream& in,
                                            ErrorPolicy policy = ErrorPolicy::skip,
                                            std::vector<ParseError>* errors = nullptr) {
  ConlluReader reader(lines_from(in), policy);
  std::vector<Sentence> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  if (errors != nullptr) *errors = reader.errors();
  return out;
}

inline std::vector<Sentence> parse_document(std::string_view text,
                                            ErrorPolicy policy = ErrorPolicy::skip,
                                            std::vector<ParseError>* errors = nullptr) {
  std::istringstream in{std::string(text)};
  return parse_document(in, policy, errors);
}

enum class ViolationKind { head_out_of_range, self_loop, empty_lemma, empty_deprel, bad_index };

struct Violation {
  int token_index = 0;
  ViolationKind kind{};
  std::string message;
};

/// Structural checks on a parsed sentence. An empty result means well-formed.
inline std::vector<Violation> validate_sentence(const Sentence& s) {
  std::vector<Violation> out;
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[static_cast<std::size_t>(i)];
    if (t.index != i + 1) {
      out.push_back({t.index, ViolationKind::bad_index,
                     "token ID " + std::to_string(t.index) + " at position " +
                         std::to_string(i + 1)});
    }
    if (t.head < 0 || t.head > n) {
      out.push_back({t.index, ViolationKind::head_out_of_range,
                     "head out of range: " + std::to_string(t.head)});
    } else if (t.head == t.index) {
      out.push_back({t.index, ViolationKind::self_loop, "self-loop"});
    }
    if (t.lemma.empty()) out.push_back({t.index, ViolationKind::empty_lemma, "empty lemma"});
    if (t.deprel.empty()) out.push_back({t.index, ViolationKind::empty_deprel, "empty deprel"});
  }
  return out;
}

/// Serializes the retained columns back to a CoNLL-U block (10 columns,
/// unused ones as "_"), terminated by a blank line.
inline std::string write_conllu(const Sentence& s) {
  auto field = [](const std::string& v) -> const std::string& {
    static const std::string underscore = "_";
    return v.empty() ? underscore : v;
  };
  std::string out;
  if (!s.source_id.empty()) out += "# sent_id = " + s.source_id + "\n";
  for (const Token& t : s.tokens) {
    out += std::to_string(t.index) + '\t' + field(t.form) + '\t' + field(t.lemma) + '\t' +
           field(t.upos) + "\t_\t_\t" + std::to_string(t.head) + '\t' + field(t.deprel) +
           "\t_\t_\n";
  }
  out += '\n';
  return out;
}

}  // namespace depshift
