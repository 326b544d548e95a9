#include "ipa/lexer.hpp"

#include <array>
#include <cctype>

namespace ipa {

namespace {

const std::array<const char*, 27> kKeywords = {
    "spec",   "const",  "sort",    "vars",    "init",   "module", "action",
    "when",   "then",   "map",     "refine",  "invariant", "unchanged",
    "bool",   "set",    "seq",     "of",      "in",     "notin",  "and",
    "or",     "not",    "implies", "if",      "else",   "forall", "exists"};

const std::array<const char*, 4> kExtraKeywords = {"union", "except", "void",
                                                   "manifest"};

}  // namespace

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  for (const char* k : kExtraKeywords)
    if (s == k) return true;
  return s == "true" || s == "false";
}

std::vector<Token> lex(const std::string& text, const std::string& file,
                       Diagnostics& diags) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  int depth = 0;  // bracket nesting; newlines inside brackets are soft
  bool line_has_token = false;

  auto span_here = [&](int len) {
    SourceSpan s;
    s.file = file;
    s.line = line;
    s.column = col;
    s.length = len;
    return s;
  };
  auto push = [&](Token::Kind k, std::string t, int len, int64_t iv = 0) {
    Token tok;
    tok.kind = k;
    tok.text = std::move(t);
    tok.ival = iv;
    tok.span = span_here(len);
    out.push_back(std::move(tok));
    line_has_token = true;
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\\' && i + 1 < text.size() && text[i + 1] == '*') {
      while (i < text.size() && text[i] != '\n') i++;
      continue;
    }
    if (c == '\n') {
      if (depth == 0 && line_has_token) {
        push(Token::Kind::Newline, "\n", 1);
        line_has_token = false;
      }
      i++;
      line++;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      i++;
      col++;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
        j++;
      std::string num = text.substr(i, j - i);
      push(Token::Kind::Int, num, static_cast<int>(num.size()),
           std::stoll(num));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_'))
        j++;
      std::string word = text.substr(i, j - i);
      push(is_keyword(word) ? Token::Kind::Key : Token::Kind::Ident, word,
           static_cast<int>(word.size()));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (c == '"') {
      // Quoted path (manifest file references); kept as an Ident-like token.
      size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') j++;
      if (j >= text.size() || text[j] != '"') {
        diags.push_back(error("E-lex", "unterminated string", span_here(1)));
        i = j;
        continue;
      }
      std::string s = text.substr(i + 1, j - i - 1);
      Token tok;
      tok.kind = Token::Kind::Punct;
      tok.text = "\"" + s + "\"";
      tok.span = span_here(static_cast<int>(j - i + 1));
      out.push_back(std::move(tok));
      line_has_token = true;
      col += static_cast<int>(j - i + 1);
      i = j + 1;
      continue;
    }

    auto two = [&](const char* p) {
      return text.compare(i, 2, p) == 0;
    };
    auto three = [&](const char* p) {
      return text.compare(i, 3, p) == 0;
    };
    if (three("|->")) {
      push(Token::Kind::Punct, "|->", 3);
      i += 3;
      col += 3;
      continue;
    }
    if (two("<<") || two(">>")) {
      std::string p = text.substr(i, 2);
      if (p == "<<") depth++;
      else if (depth > 0) depth--;
      push(Token::Kind::Punct, p, 2);
      i += 2;
      col += 2;
      continue;
    }
    if (two("..") || two("->") || two("/=") || two("<=") || two(">=")) {
      push(Token::Kind::Punct, text.substr(i, 2), 2);
      i += 2;
      col += 2;
      continue;
    }
    switch (c) {
      case '(': case '[': case '{':
        depth++;
        push(Token::Kind::Punct, std::string(1, c), 1);
        break;
      case ')': case ']': case '}':
        if (depth > 0) depth--;
        push(Token::Kind::Punct, std::string(1, c), 1);
        break;
      case ',': case ':': case '=': case '<': case '>': case '+': case '-':
      case '*': case '.': case '\'':
        push(Token::Kind::Punct, std::string(1, c), 1);
        break;
      default:
        diags.push_back(error(
            "E-lex", std::string("unexpected character '") + c + "'",
            span_here(1)));
        break;
    }
    i++;
    col++;
  }
  if (line_has_token) push(Token::Kind::Newline, "\n", 1);
  Token end;
  end.kind = Token::Kind::End;
  end.span = span_here(0);
  out.push_back(end);
  return out;
}

}  // namespace ipa
