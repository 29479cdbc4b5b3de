#pragma once

// Minimal S-expression reader shared by the treebank and rule-file loaders.
// Atoms are runs of non-space, non-paren characters or double-quoted strings
// (with \" and \\ escapes). A ';' starts a comment running to end of line.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cutgram/error.hpp"

namespace cutgram::sexpr {

struct Node {
  bool is_atom = false;
  bool quoted = false;
  std::string atom;
  std::vector<Node> list;
  int line = 0;
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Node> read_all() {
    std::vector<Node> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  static bool is_delimiter(char c) {
    return c == '(' || c == ')' || c == ';' || c == '"' || c == ' ' || c == '\t' ||
           c == '\n' || c == '\r' || c == '\f' || c == '\v';
  }

  Node read() {
    Node node;
    node.line = line_;
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      skip_space();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        node.list.push_back(read());
        skip_space();
      }
      if (pos_ >= text_.size()) {
        throw Error(ErrorKind::MalformedLine, "unterminated list", node.line);
      }
      ++pos_;
      return node;
    }
    if (c == ')') throw Error(ErrorKind::MalformedLine, "unexpected ')'", line_);
    node.is_atom = true;
    if (c == '"') {
      node.quoted = true;
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        char ch = text_[pos_++];
        if (ch == '\\' && pos_ < text_.size()) ch = text_[pos_++];
        if (ch == '\n') ++line_;
        node.atom.push_back(ch);
      }
      if (pos_ >= text_.size()) {
        throw Error(ErrorKind::MalformedLine, "unterminated string", node.line);
      }
      ++pos_;
      return node;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
    node.atom = std::string(text_.substr(start, pos_ - start));
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace detail

inline std::vector<Node> read_all(std::string_view text) {
  return detail::Reader(text).read_all();
}

/// Writes `word` as a bare atom when possible, otherwise as a quoted string.
inline std::string quote_if_needed(std::string_view word) {
  bool bare = !word.empty();
  for (char c : word) {
    if (c == '(' || c == ')' || c == ';' || c == '"' || c == '\\' || c == ' ' ||
        c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      bare = false;
      break;
    }
  }
  if (bare) return std::string(word);
  std::string out = "\"";
  for (char c : word) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace cutgram::sexpr
