// SPDX-License-Identifier: Apache-2.0
//
// Shared lexer for source files and rule files. Comments survive as tokens
// (rule markup travels in them); consumers that want pure code filter them.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace patlock::ast::detail {

struct Token {
  enum class Type { Ident, Number, Str, CharLit, Punct, Comment, End };

  Type type = Type::End;
  std::string text;
  int line = 1;
  int col = 1;
  int end_line = 1;
  int end_col = 1;
  std::size_t begin = 0;  // byte offsets into the lexed text, for raw slices
  std::size_t end = 0;
  bool line_start = false;  // first non-whitespace token on its line
};

enum class LexMode { Source, Pattern };

// Multi-character operators, longest first so maximal munch works by scan
// order. "..." is a real token: rule files use it as the gap marker.
inline const char* const kPuncts[] = {
    "...", ">>>=", "<<=", ">>=", ">>>", "===", "!==", "==", "!=", "<=", ">=", "&&",
    "||", "++",  "--",  "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "<<",
    ">>", "->",  "::",  "+",   "-",   "*",   "/",   "%",  "=",  "<",  ">",  "!",
    "~",  "&",   "|",   "^",   "?",   ":",   ";",   ",",  ".",  "(",  ")",  "{",
    "}",  "[",   "]",   "@",   "#",
};

inline bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}

inline bool ident_part(char c) {
  return ident_start(c) || (c >= '0' && c <= '9');
}

inline std::vector<Token> lex(std::string_view text, LexMode mode) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  bool at_line_start = true;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  auto push = [&](Token::Type type, std::size_t begin, int bl, int bc) {
    Token t;
    t.type = type;
    t.text = std::string(text.substr(begin, i - begin));
    t.line = bl;
    t.col = bc;
    t.end_line = line;
    t.end_col = col;
    t.begin = begin;
    t.end = i;
    t.line_start = at_line_start;
    at_line_start = false;
    out.push_back(std::move(t));
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      advance(1);
      at_line_start = true;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
      advance(1);
      continue;
    }

    const std::size_t begin = i;
    const int bl = line;
    const int bc = col;

    // Rule-file trivia: '#' metadata lines and the '|' indentation gutter.
    if (mode == LexMode::Pattern && c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      push(Token::Type::Comment, begin, bl, bc);
      continue;
    }
    if (mode == LexMode::Pattern && c == '|' && at_line_start &&
        (i + 1 >= text.size() || text[i + 1] != '|')) {
      advance(1);  // dropped entirely; keeps at_line_start semantics intact
      continue;
    }

    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      push(Token::Type::Comment, begin, bl, bc);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      advance(2);
      while (i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/')) advance(1);
      advance(i + 1 < text.size() ? 2 : text.size() - i);
      push(Token::Type::Comment, begin, bl, bc);
      continue;
    }

    if (c == '"') {
      advance(1);
      while (i < text.size() && text[i] != '"' && text[i] != '\n') {
        if (text[i] == '\\' && i + 1 < text.size()) advance(1);
        advance(1);
      }
      if (i < text.size() && text[i] == '"') advance(1);
      push(Token::Type::Str, begin, bl, bc);
      continue;
    }
    if (c == '\'') {
      advance(1);
      while (i < text.size() && text[i] != '\'' && text[i] != '\n') {
        if (text[i] == '\\' && i + 1 < text.size()) advance(1);
        advance(1);
      }
      if (i < text.size() && text[i] == '\'') advance(1);
      push(Token::Type::CharLit, begin, bl, bc);
      continue;
    }

    if (c >= '0' && c <= '9') {
      while (i < text.size() &&
             (ident_part(text[i]) || text[i] == '.' ||
              ((text[i] == '+' || text[i] == '-') && i > 0 &&
               (text[i - 1] == 'e' || text[i - 1] == 'E')))) {
        // Stop before "..." so `1...` never swallows a gap marker.
        if (text[i] == '.' && i + 1 < text.size() && text[i + 1] == '.') break;
        advance(1);
      }
      push(Token::Type::Number, begin, bl, bc);
      continue;
    }

    if (ident_start(c)) {
      while (i < text.size() && ident_part(text[i])) advance(1);
      push(Token::Type::Ident, begin, bl, bc);
      continue;
    }

    bool matched = false;
    for (const char* p : kPuncts) {
      std::string_view pv(p);
      if (text.substr(i, pv.size()) == pv) {
        advance(pv.size());
        push(Token::Type::Punct, begin, bl, bc);
        matched = true;
        break;
      }
    }
    if (!matched) {
      advance(1);  // unknown byte: keep as a one-char punct, never drop input
      push(Token::Type::Punct, begin, bl, bc);
    }
  }

  Token end;
  end.type = Token::Type::End;
  end.line = line;
  end.col = col;
  end.end_line = line;
  end.end_col = col;
  end.begin = i;
  end.end = i;
  end.line_start = at_line_start;
  out.push_back(std::move(end));
  return out;
}

}  // namespace patlock::ast::detail
