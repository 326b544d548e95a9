#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ipa/source.hpp"

namespace ipa {

struct Token {
  enum class Kind { Ident, Int, Key, Punct, Newline, End };
  Kind kind = Kind::End;
  std::string text;
  int64_t ival = 0;
  SourceSpan span;

  bool is_key(const char* k) const {
    return kind == Kind::Key && text == k;
  }
  bool is_punct(const char* p) const {
    return kind == Kind::Punct && text == p;
  }
};

// Tokenizes spec/manifest text. Line comments start with "\*". Newlines are
// significant except inside (), [], {} and << >>; runs of blank lines
// collapse into a single Newline token.
std::vector<Token> lex(const std::string& text, const std::string& file,
                       Diagnostics& diags);

bool is_keyword(const std::string& s);

}  // namespace ipa
