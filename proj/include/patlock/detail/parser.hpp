// SPDX-License-Identifier: Apache-2.0
//
// Recursive-descent parser for the supported Java subset. One parser serves
// two modes: Source (plain files) and Pattern (rule files, which add gap
// markers, wildcard names and markup comments). Statements outside the
// subset are kept as opaque nodes with exact spans — input is never dropped.
//
// Internal header: include <patlock/source_ast.hpp>, which pulls this in
// after the node types it builds on are defined.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patlock/detail/lexer.hpp"

namespace patlock::ast::detail {

// Internal signal for speculative statement/expression parses; the statement
// that raised it is re-consumed as an opaque statement. Never escapes.
struct ParseFail {};

inline bool is_wildcard_name(std::string_view s) {
  static constexpr std::array<std::string_view, 3> prefixes = {"any", "some", "other"};
  for (std::string_view p : prefixes) {
    if (s.size() >= p.size() && s.substr(0, p.size()) == p) {
      bool ok = true;
      for (char c : s.substr(p.size())) {
        if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_')) {
          ok = false;
          break;
        }
      }
      if (ok) return true;
    }
  }
  return false;
}

inline bool is_any_type_name(std::string_view s) {
  return s.size() >= 3 && s.substr(0, 3) == "Any";
}

inline bool is_modifier(std::string_view s) {
  static constexpr std::array<std::string_view, 12> mods = {
      "public", "private",   "protected", "static", "final",    "abstract",
      "native", "transient", "volatile",  "strictfp", "default", "synchronized"};
  for (std::string_view m : mods) {
    if (s == m) return true;
  }
  return false;
}

struct MarkerEvent {
  NodeId node = kNoNode;
  std::string message;
  int line = 0;
};

struct HeaderMarkup {
  std::string name;  // "inAnyMethod" or "context"
  int line = 0;
  bool after_stmt = false;
};

struct MetaLine {
  std::string text;  // content after '#'
  bool after_stmt = false;
};

class Parser {
 public:
  Parser(std::string_view text, std::string file_id, bool pattern_mode)
      : text_(text), pattern_(pattern_mode) {
    tree_.file_id = std::move(file_id);
    tokens_ = lex(text_, pattern_ ? LexMode::Pattern : LexMode::Source);
  }

  // --- source mode entry ---------------------------------------------------

  Tree parse_unit() {
    std::vector<NodeId> types;
    for (;;) {
      const Token& t = cur();
      if (t.type == Token::Type::End) break;
      if (t.text == "package" || t.text == "import") {
        consume_to_semi();
        continue;
      }
      if (t.text == "@") {
        skip_annotation();
        continue;
      }
      if (t.type == Token::Type::Ident && is_modifier(t.text)) {
        take();
        continue;
      }
      if (t.text == "class" || t.text == "interface" || t.text == "enum") {
        types.push_back(parse_type_decl());
        continue;
      }
      if (t.text == ";") {
        take();
        continue;
      }
      throw SyntaxError("expected a type declaration", span_at(pos_index()));
    }
    Node unit;
    unit.kind = Kind::Unit;
    unit.span = whole_file_span();
    unit.data = UnitData{std::move(types)};
    tree_.root = add(std::move(unit));
    adopt(tree_.root);
    return std::move(tree_);
  }

  // --- pattern mode entry ----------------------------------------------------

  // Parses a statement sequence to end of input; returns a synthetic Block
  // holding the top-level elements. Markup markers are recorded on the side.
  NodeId parse_pattern_body() {
    std::vector<NodeId> elems;
    std::size_t first_idx = pos_;
    for (;;) {
      consume_markup();
      const Token& t = cur();
      if (t.type == Token::Type::End) {
        if (pending_active()) {
          dangling_lines_.push_back(pending_line_);
          clear_pending();
        }
        break;
      }
      elems.push_back(parse_stmt());
    }
    Node block;
    block.kind = Kind::Block;
    block.span = elems.empty() ? span_at(first_idx)
                               : span_join(tree_.nodes[elems.front()].span,
                                           tree_.nodes[elems.back()].span);
    block.data = BlockData{std::move(elems)};
    NodeId id = add(std::move(block));
    adopt(id);
    tree_.root = id;
    return id;
  }

  Tree take_tree() { return std::move(tree_); }

  const std::vector<MarkerEvent>& alerts() const { return alerts_; }
  const std::vector<NodeId>& anchors() const { return anchors_; }
  const std::vector<NodeId>& not_exists_nodes() const { return not_exists_; }
  const std::vector<HeaderMarkup>& headers() const { return headers_; }
  const std::vector<MetaLine>& meta_lines() const { return meta_lines_; }
  const std::vector<int>& dangling_marker_lines() const { return dangling_lines_; }

 private:
  // --- token cursor ----------------------------------------------------------

  void skipc() {
    while (tokens_[pos_].type == Token::Type::Comment) ++pos_;
  }

  const Token& cur() {
    skipc();
    return tokens_[pos_];
  }

  const Token& peek2() {
    skipc();
    std::size_t j = pos_ + 1;
    while (tokens_[j].type == Token::Type::Comment) ++j;
    return tokens_[j];
  }

  const Token& take() {
    skipc();
    last_sig_ = pos_;
    return tokens_[pos_++];
  }

  std::size_t pos_index() {
    skipc();
    return pos_;
  }

  bool at(std::string_view s) { return cur().text == s; }

  void expect_fail(std::string_view s) {
    if (!at(s)) throw ParseFail{};
    take();
  }

  struct Mark {
    std::size_t pos;
    std::size_t last_sig;
    std::size_t arena;
  };
  Mark mark() { return {pos_, last_sig_, tree_.nodes.size()}; }
  void restore(const Mark& m) {
    pos_ = m.pos;
    last_sig_ = m.last_sig;
    // Nodes created during an abandoned speculative parse are dropped so the
    // arena holds only reachable nodes.
    tree_.nodes.resize(m.arena);
  }

  // --- spans & raw text ------------------------------------------------------

  SourceSpan span_at(std::size_t tok_idx) const {
    const Token& t = tokens_[tok_idx];
    return {tree_.file_id, t.line, t.col, t.end_line, t.end_col};
  }

  SourceSpan span_tokens(std::size_t from, std::size_t to) const {
    const Token& a = tokens_[from];
    const Token& b = tokens_[to];
    return {tree_.file_id, a.line, a.col, b.end_line, b.end_col};
  }

  SourceSpan span_join(const SourceSpan& a, const SourceSpan& b) const {
    SourceSpan s = a;
    s.end_line = b.end_line;
    s.end_column = b.end_column;
    return s;
  }

  SourceSpan whole_file_span() const {
    const Token& last = tokens_.back();
    return {tree_.file_id, 1, 1, last.end_line, last.end_col};
  }

  std::string slice(std::size_t from_tok, std::size_t to_tok) const {
    std::size_t b = tokens_[from_tok].begin;
    std::size_t e = tokens_[to_tok].end;
    return std::string(text_.substr(b, e - b));
  }

  // --- arena -----------------------------------------------------------------

  NodeId add(Node n) {
    tree_.nodes.push_back(std::move(n));
    return static_cast<NodeId>(tree_.nodes.size() - 1);
  }

  void adopt(NodeId parent) {
    each_child(tree_, parent, [&](NodeId c) { tree_.nodes[c].parent = parent; });
  }

  NodeId make(Kind kind, SourceSpan span, NodeData data) {
    Node n;
    n.kind = kind;
    n.span = std::move(span);
    n.data = std::move(data);
    NodeId id = add(std::move(n));
    adopt(id);
    return id;
  }

  // --- rule markup -----------------------------------------------------------

  // Consumes comment tokens at a statement boundary, recording rule markup.
  void consume_markup() {
    while (tokens_[pos_].type == Token::Type::Comment) {
      if (pattern_) classify_markup(tokens_[pos_]);
      ++pos_;
    }
  }

  void classify_markup(const Token& t) {
    std::string_view s = t.text;
    if (!s.empty() && s.front() == '#') {
      std::string_view body = s.substr(1);
      meta_lines_.push_back({std::string(trim(body)), stmt_started_});
      return;
    }
    if (s.size() < 2 || s.substr(0, 2) != "//") return;
    std::string_view body = trim(s.substr(2));
    if (body == "inAnyMethod" || body == "context") {
      headers_.push_back({std::string(body), t.line, stmt_started_});
    } else if (body == "not_exists") {
      pending_not_exists_ = true;
      note_pending(t.line);
    } else if (body == "anchor") {
      pending_anchor_ = true;
      note_pending(t.line);
    } else if (body.size() >= 6 && body.substr(0, 6) == "Alert:") {
      pending_alerts_.push_back(std::string(trim(body.substr(6))));
      note_pending(t.line);
    }
    // Any other comment is trivia.
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.remove_suffix(1);
    return s;
  }

  void note_pending(int line) {
    if (pending_line_ == 0) pending_line_ = line;
  }

  bool pending_active() const {
    return pending_not_exists_ || pending_anchor_ || !pending_alerts_.empty();
  }

  void clear_pending() {
    pending_not_exists_ = false;
    pending_anchor_ = false;
    pending_alerts_.clear();
    pending_line_ = 0;
  }

  struct Captured {
    bool not_exists = false;
    bool anchor = false;
    std::vector<std::string> alerts;
    int line = 0;
  };

  Captured take_pending() {
    Captured c{pending_not_exists_, pending_anchor_, std::move(pending_alerts_), pending_line_};
    clear_pending();
    return c;
  }

  void apply_markers(const Captured& c, NodeId id) {
    if (c.not_exists) {
      tree_.nodes[id].mark_not_exists = true;
      not_exists_.push_back(id);
    }
    if (c.anchor) {
      tree_.nodes[id].mark_anchor = true;
      anchors_.push_back(id);
    }
    for (const std::string& msg : c.alerts) {
      alerts_.push_back({id, msg, c.line});
    }
  }

  // --- declarations ----------------------------------------------------------

  void consume_to_semi() {
    while (cur().type != Token::Type::End && !at(";")) take();
    if (at(";")) take();
  }

  void skip_annotation() {
    take();  // '@'
    if (cur().type == Token::Type::Ident) {
      take();
      while (at(".") && peek2().type == Token::Type::Ident) {
        take();
        take();
      }
    }
    if (at("(")) skip_balanced("(", ")");
  }

  // Consumes from an opening delimiter through its balanced close.
  void skip_balanced(std::string_view open, std::string_view close) {
    std::size_t open_idx = pos_index();
    expect_or_error(open, "expected delimiter");
    int depth = 1;
    while (depth > 0) {
      const Token& t = cur();
      if (t.type == Token::Type::End) {
        throw SyntaxError("unclosed '" + std::string(open) + "'", span_at(open_idx));
      }
      if (t.text == open) ++depth;
      if (t.text == close) --depth;
      take();
    }
  }

  void expect_or_error(std::string_view s, const char* what) {
    if (!at(s)) throw SyntaxError(std::string(what), span_at(pos_index()));
    take();
  }

  NodeId parse_type_decl() {
    take();  // class/interface/enum
    if (cur().type != Token::Type::Ident) {
      throw SyntaxError("expected a type name", span_at(pos_index()));
    }
    std::size_t name_idx = pos_index();
    std::string name = take().text;
    while (!at("{") && cur().type != Token::Type::End) take();  // extends/implements
    if (cur().type == Token::Type::End) {
      throw SyntaxError("expected '{'", span_at(name_idx));
    }
    std::size_t open_idx = pos_index();
    take();  // '{'
    std::vector<NodeId> methods;
    std::size_t close_idx;
    for (;;) {
      const Token& t = cur();
      if (t.type == Token::Type::End) {
        throw SyntaxError("unclosed '{'", span_at(open_idx));
      }
      if (t.text == "}") {
        close_idx = pos_index();
        take();
        break;
      }
      if (t.text == ";") {
        take();
        continue;
      }
      if (t.text == "@") {
        skip_annotation();
        continue;
      }
      if (t.type == Token::Type::Ident && is_modifier(t.text)) {
        take();
        continue;
      }
      if (t.text == "class" || t.text == "interface" || t.text == "enum") {
        skip_nested_type();
        continue;
      }
      if (t.text == "{") {
        skip_balanced("{", "}");  // instance/static initializer
        continue;
      }
      if (t.text == "<") {
        skip_balanced("<", ">");  // generic method type parameters
        continue;
      }
      parse_member(methods);
    }
    Node type;
    type.kind = Kind::TypeDecl;
    type.span = span_tokens(name_idx, close_idx);
    type.data = TypeData{std::move(name), std::move(methods)};
    NodeId id = add(std::move(type));
    adopt(id);
    return id;
  }

  void skip_nested_type() {
    take();  // keyword
    while (!at("{") && cur().type != Token::Type::End) take();
    if (cur().type == Token::Type::End) {
      throw SyntaxError("expected '{'", span_at(pos_index()));
    }
    skip_balanced("{", "}");
  }

  // Decides method vs field by the first structural token, then parses or
  // skips. Only methods with bodies produce nodes.
  void parse_member(std::vector<NodeId>& methods) {
    std::size_t member_start = pos_index();
    // Look ahead for the first of ( = ; { outside of generic angles.
    std::size_t j = pos_;
    int angle = 0;
    char decider = 0;
    std::size_t name_tok = static_cast<std::size_t>(-1);
    std::size_t last_ident = static_cast<std::size_t>(-1);
    for (; j < tokens_.size(); ++j) {
      const Token& t = tokens_[j];
      if (t.type == Token::Type::Comment) continue;
      if (t.type == Token::Type::End) break;
      if (t.text == "<") {
        ++angle;
        continue;
      }
      if (t.text == ">" && angle > 0) {
        --angle;
        continue;
      }
      if (t.text == ">>" && angle > 0) {
        angle -= 2;
        continue;
      }
      if (angle > 0) continue;
      if (t.type == Token::Type::Ident) last_ident = j;
      if (t.text == "(" || t.text == "=" || t.text == ";" || t.text == "{") {
        decider = t.text[0];
        name_tok = last_ident;
        break;
      }
    }
    if (decider == 0) {
      throw SyntaxError("unexpected end of class body", span_at(member_start));
    }
    if (decider != '(') {
      // Field (or stray construct): consume through ';' tracking braces for
      // array/anonymous-class initializers.
      int depth = 0;
      for (;;) {
        const Token& t = cur();
        if (t.type == Token::Type::End) {
          throw SyntaxError("unterminated member", span_at(member_start));
        }
        if (t.text == "{") ++depth;
        if (t.text == "}") --depth;
        take();
        if ((t.text == ";" && depth == 0) || (t.text == "}" && depth == 0)) break;
      }
      return;
    }

    // Method (or constructor). The name is the identifier before '('.
    std::string name = name_tok != static_cast<std::size_t>(-1) ? tokens_[name_tok].text : "";
    while (pos_index() != name_tok && cur().type != Token::Type::End) take();  // return type
    std::size_t name_idx = pos_index();
    take();  // name
    std::vector<Param> params = parse_params();
    while (!at("{") && !at(";") && cur().type != Token::Type::End) take();  // throws clause
    if (at(";")) {
      take();  // bodyless declaration: skipped
      return;
    }
    if (cur().type == Token::Type::End) {
      throw SyntaxError("expected a method body", span_at(name_idx));
    }
    NodeId body;
    try {
      body = parse_block();
    } catch (ParseFail&) {
      throw SyntaxError("malformed method body", span_at(name_idx));
    }
    Node m;
    m.kind = Kind::Method;
    m.span = span_join(span_at(name_idx), tree_.nodes[body].span);
    m.data = MethodData{std::move(name), std::move(params), body};
    NodeId id = add(std::move(m));
    adopt(id);
    methods.push_back(id);
  }

  std::vector<Param> parse_params() {
    std::vector<Param> params;
    expect_or_error("(", "expected '('");
    std::vector<const Token*> part;
    int depth = 0;
    auto flush = [&]() {
      if (part.empty()) return;
      // Drop leading 'final'; name is the last identifier, type the rest.
      std::size_t b = 0;
      while (b < part.size() && part[b]->text == "final") ++b;
      std::size_t name_i = part.size();
      for (std::size_t k = part.size(); k > b; --k) {
        if (part[k - 1]->type == Token::Type::Ident) {
          name_i = k - 1;
          break;
        }
      }
      Param p;
      if (name_i == part.size()) {
        p.type_name = join_tokens(part, b, part.size());
      } else {
        p.name = part[name_i]->text;
        p.type_name = join_tokens(part, b, name_i);
      }
      params.push_back(std::move(p));
      part.clear();
    };
    for (;;) {
      const Token& t = cur();
      if (t.type == Token::Type::End) {
        throw SyntaxError("unclosed '('", span_at(pos_index()));
      }
      if (t.text == "(" || t.text == "<" || t.text == "[") ++depth;
      if (t.text == ")" || t.text == ">" || t.text == "]") {
        if (t.text == ")" && depth == 0) {
          take();
          break;
        }
        --depth;
      }
      if (t.text == "," && depth == 0) {
        take();
        flush();
        continue;
      }
      part.push_back(&tokens_[pos_index()]);
      take();
    }
    flush();
    return params;
  }

  static std::string join_tokens(const std::vector<const Token*>& toks, std::size_t b,
                                 std::size_t e) {
    std::string out;
    auto wordy = [](const Token& t) {
      return t.type == Token::Type::Ident || t.type == Token::Type::Number;
    };
    for (std::size_t i = b; i < e; ++i) {
      if (!out.empty() && i > b && wordy(*toks[i]) && wordy(*toks[i - 1])) out += ' ';
      out += toks[i]->text;
    }
    return out;
  }

  // --- statements ------------------------------------------------------------

  NodeId parse_block() {
    if (!at("{")) throw ParseFail{};
    std::size_t open_idx = pos_index();
    take();
    std::vector<NodeId> stmts;
    std::size_t close_idx;
    for (;;) {
      consume_markup();
      const Token& t = cur();
      if (t.type == Token::Type::End) {
        throw SyntaxError("unclosed '{'", span_at(open_idx));
      }
      if (t.text == "}") {
        if (pending_active()) {
          dangling_lines_.push_back(pending_line_);
          clear_pending();
        }
        close_idx = pos_index();
        take();
        break;
      }
      stmts.push_back(parse_stmt());
    }
    Node b;
    b.kind = Kind::Block;
    b.span = span_tokens(open_idx, close_idx);
    b.data = BlockData{std::move(stmts)};
    NodeId id = add(std::move(b));
    adopt(id);
    return id;
  }

  NodeId parse_stmt() {
    consume_markup();
    Captured captured = take_pending();
    stmt_started_ = true;
    Mark m = mark();
    NodeId id;
    try {
      id = parse_stmt_core();
    } catch (ParseFail&) {
      restore(m);
      id = consume_opaque_stmt();
    }
    apply_markers(captured, id);
    return id;
  }

  NodeId parse_stmt_core() {
    const Token& t = cur();
    if (t.text == "{") return parse_block();
    if (t.text == "if") return parse_if();
    if (t.text == "try") {
      if (peek2().text == "(") throw ParseFail{};  // try-with-resources: opaque
      return parse_try();
    }
    if (t.text == "for" || t.text == "while") return parse_loop();
    if (t.text == "do" || t.text == "synchronized" || t.text == "break" || t.text == "continue" ||
        t.text == "assert" || t.text == "yield") {
      throw ParseFail{};  // handled by the opaque fallback
    }
    if (t.text == "switch") return parse_switch_raw();
    if (t.text == "return") {
      std::size_t kw = pos_index();
      take();
      if (at(";")) {
        std::size_t semi = pos_index();
        take();
        return make(Kind::Return, span_tokens(kw, semi), ReturnData{kNoNode});
      }
      NodeId v = parse_expr();
      std::size_t semi = pos_index();
      expect_fail(";");
      return make(Kind::Return, span_tokens(kw, semi), ReturnData{v});
    }
    if (t.text == "throw") {
      std::size_t kw = pos_index();
      take();
      NodeId v = parse_expr();
      std::size_t semi = pos_index();
      expect_fail(";");
      return make(Kind::Throw, span_tokens(kw, semi), ThrowData{v});
    }
    if (t.text == ";") {
      std::size_t semi = pos_index();
      take();
      return make(Kind::OpaqueStmt, span_at(semi), OpaqueStmtData{";"});
    }
    if (pattern_ && t.text == "...") {
      std::size_t dots = pos_index();
      std::size_t last = dots;
      take();
      if (at(";")) {
        last = pos_index();
        take();
      }
      return make(Kind::StmtEllipsis, span_tokens(dots, last), HoleData{});
    }
    if (auto var = try_var_decl()) return *var;
    std::size_t start = pos_index();
    NodeId e = parse_expr();
    std::size_t semi = pos_index();
    expect_fail(";");
    return make(Kind::ExprStmt, span_tokens(start, semi), ExprStmtData{e});
  }

  NodeId parse_if() {
    std::size_t kw = pos_index();
    expect_fail("if");
    NodeId cond = parse_paren_expr_or_opaque();
    NodeId then_b = parse_stmt();
    NodeId else_b = kNoNode;
    if (at("else")) {
      take();
      else_b = parse_stmt();
    }
    SourceSpan sp = span_join(span_at(kw),
                              tree_.nodes[else_b == kNoNode ? then_b : else_b].span);
    return make(Kind::If, std::move(sp), IfData{cond, then_b, else_b});
  }

  NodeId parse_try() {
    std::size_t kw = pos_index();
    expect_fail("try");
    NodeId body = parse_block();
    std::vector<NodeId> catches;
    NodeId fin = kNoNode;
    SourceSpan last = tree_.nodes[body].span;
    while (at("catch")) {
      std::size_t ckw = pos_index();
      take();
      expect_fail("(");
      std::vector<const Token*> inner;
      int depth = 0;
      for (;;) {
        const Token& t = cur();
        if (t.type == Token::Type::End) throw ParseFail{};
        if (t.text == "(") ++depth;
        if (t.text == ")") {
          if (depth == 0) {
            take();
            break;
          }
          --depth;
        }
        inner.push_back(&tokens_[pos_index()]);
        take();
      }
      std::size_t b = 0;
      while (b < inner.size() && inner[b]->text == "final") ++b;
      std::size_t name_i = inner.size();
      for (std::size_t k = inner.size(); k > b; --k) {
        if (inner[k - 1]->type == Token::Type::Ident) {
          name_i = k - 1;
          break;
        }
      }
      CatchData cd;
      if (name_i == inner.size() || name_i == b) {
        cd.type.text = join_tokens(inner, b, inner.size());
      } else {
        cd.binding.text = inner[name_i]->text;
        cd.binding.wildcard = pattern_ && is_wildcard_name(cd.binding.text);
        cd.type.text = join_tokens(inner, b, name_i);
      }
      cd.type.any = pattern_ && is_any_type_name(cd.type.text);
      cd.body = parse_block();
      SourceSpan csp = span_join(span_at(ckw), tree_.nodes[cd.body].span);
      last = csp;
      catches.push_back(make(Kind::Catch, std::move(csp), std::move(cd)));
    }
    if (at("finally")) {
      take();
      fin = parse_block();
      last = tree_.nodes[fin].span;
    }
    return make(Kind::Try, span_join(span_at(kw), last), TryData{body, std::move(catches), fin});
  }

  NodeId parse_loop() {
    std::size_t kw_idx = pos_index();
    std::string kw = take().text;
    if (!at("(")) throw ParseFail{};
    std::size_t open = pos_index();
    take();
    int depth = 1;
    std::size_t first_inner = pos_index();
    std::size_t last_inner = first_inner;
    bool any_inner = false;
    for (;;) {
      const Token& t = cur();
      if (t.type == Token::Type::End) {
        throw SyntaxError("unclosed '('", span_at(open));
      }
      if (t.text == "(") ++depth;
      if (t.text == ")") {
        --depth;
        if (depth == 0) {
          take();
          break;
        }
      }
      last_inner = pos_index();
      any_inner = true;
      take();
    }
    std::string header = any_inner ? slice(first_inner, last_inner) : "";
    NodeId body = parse_stmt();
    SourceSpan sp = span_join(span_at(kw_idx), tree_.nodes[body].span);
    return make(Kind::Loop, std::move(sp), LoopData{std::move(kw), std::move(header), body});
  }

  NodeId parse_switch_raw() {
    std::size_t kw = pos_index();
    expect_fail("switch");
    if (!at("(")) throw ParseFail{};
    skip_balanced("(", ")");
    if (!at("{")) throw ParseFail{};
    std::size_t open = pos_index();
    skip_balanced("{", "}");
    (void)open;
    std::size_t end = last_sig_;
    return make(Kind::Switch, span_tokens(kw, end), SwitchData{slice(kw, end)});
  }

  // Fallback: consume one statement's worth of tokens as raw text. Handles
  // ';'-terminated and block-shaped statements, including do/while and
  // try/catch continuations.
  NodeId consume_opaque_stmt() {
    std::size_t start = pos_index();
    const Token& first = cur();
    if (first.type == Token::Type::End) {
      throw SyntaxError("unexpected end of input", span_at(start));
    }
    bool starts_do = first.text == "do";
    int depth = 0;
    std::size_t open_idx = start;
    bool consumed_any = false;
    for (;;) {
      const Token& t = cur();
      if (t.type == Token::Type::End) {
        if (depth > 0) throw SyntaxError("unclosed '{'", span_at(open_idx));
        break;
      }
      if (t.text == "{") {
        if (depth == 0) open_idx = pos_index();
        ++depth;
        take();
        consumed_any = true;
        continue;
      }
      if (t.text == "}") {
        if (depth == 0) break;  // the enclosing block's close: not ours
        --depth;
        take();
        consumed_any = true;
        if (depth == 0) {
          const Token& nxt = cur();
          if (nxt.text == "catch" || nxt.text == "finally" || nxt.text == "else") continue;
          if (starts_do && nxt.text == "while") continue;
          break;
        }
        continue;
      }
      if (t.text == ";" && depth == 0) {
        take();
        consumed_any = true;
        break;
      }
      take();
      consumed_any = true;
    }
    if (!consumed_any) {
      throw SyntaxError("expected a statement", span_at(start));
    }
    return make(Kind::OpaqueStmt, span_tokens(start, last_sig_),
                OpaqueStmtData{slice(start, last_sig_)});
  }

  std::optional<NodeId> try_var_decl() {
    Mark m = mark();
    std::size_t start = pos_index();
    if (at("final")) take();
    if (cur().type != Token::Type::Ident) {
      restore(m);
      return std::nullopt;
    }
    std::string type_text = take().text;
    while (at(".") && peek2().type == Token::Type::Ident) {
      take();
      type_text += "." + take().text;
    }
    if (at("<")) {
      std::string generics;
      if (!try_generic_args(generics)) {
        restore(m);
        return std::nullopt;
      }
      type_text += generics;
    }
    while (at("[") && peek2().text == "]") {
      take();
      take();
      type_text += "[]";
    }
    if (cur().type != Token::Type::Ident) {
      restore(m);
      return std::nullopt;
    }
    Name name{cur().text, pattern_ && is_wildcard_name(cur().text)};
    take();
    TypeName type{std::move(type_text), false};
    type.any = pattern_ && is_any_type_name(type.text);
    if (at(";")) {
      std::size_t semi = pos_index();
      take();
      return make(Kind::VarDecl, span_tokens(start, semi),
                  VarDeclData{std::move(type), std::move(name), kNoNode});
    }
    if (at("=")) {
      take();
      // Committed: Type name '=' is definitely a declaration; a failing
      // initializer falls back to an opaque statement via parse_stmt.
      NodeId init = parse_expr();
      std::size_t semi = pos_index();
      expect_fail(";");
      return make(Kind::VarDecl, span_tokens(start, semi),
                  VarDeclData{std::move(type), std::move(name), init});
    }
    restore(m);
    return std::nullopt;
  }

  // Consumes a balanced generic-argument list after '<' if its contents look
  // like types; returns false (cursor untouched by caller's restore) when the
  // '<' is better read as a comparison.
  bool try_generic_args(std::string& out) {
    std::size_t first = pos_index();
    int depth = 0;
    std::size_t j = first;
    for (; j < tokens_.size(); ++j) {
      const Token& t = tokens_[j];
      if (t.type == Token::Type::Comment) continue;
      if (t.type == Token::Type::End) return false;
      const std::string& s = t.text;
      if (s == "<") {
        ++depth;
        continue;
      }
      if (s == ">" || s == ">>" || s == ">>>") {
        depth -= static_cast<int>(s.size());
        if (depth < 0) return false;
        if (depth == 0) break;
        continue;
      }
      if (t.type == Token::Type::Ident || s == "," || s == "." || s == "?" || s == "[" ||
          s == "]") {
        continue;
      }
      return false;  // expressions ('(', literals, '&&', ...) mean comparison
    }
    if (j >= tokens_.size()) return false;
    while (pos_index() <= j) take();
    out = slice(first, j);
    return true;
  }

  // --- expressions -----------------------------------------------------------

  NodeId parse_expr() { return parse_assign(); }

  static bool is_assign_op(std::string_view s) {
    static constexpr std::array<std::string_view, 12> ops = {
        "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="};
    for (std::string_view o : ops) {
      if (s == o) return true;
    }
    return false;
  }

  NodeId parse_assign() {
    NodeId lhs = parse_ternary();
    if (cur().type == Token::Type::Punct && is_assign_op(cur().text)) {
      std::string op = take().text;
      NodeId value = parse_assign();
      SourceSpan sp = span_join(tree_.nodes[lhs].span, tree_.nodes[value].span);
      return make(Kind::Assign, std::move(sp), AssignData{std::move(op), lhs, value});
    }
    return lhs;
  }

  NodeId parse_ternary() {
    std::size_t start = pos_index();
    std::size_t arena_start = tree_.nodes.size();
    NodeId c = parse_binary(1);
    if (!at("?")) return c;
    take();
    parse_expr();
    expect_fail(":");
    parse_ternary();
    // Conditional expressions are out of subset: kept opaque with full text.
    // The pieces parsed above only located the end; drop them from the arena.
    std::size_t end = last_sig_;
    tree_.nodes.resize(arena_start);
    return make(Kind::OpaqueExpr, span_tokens(start, end), OpaqueExprData{slice(start, end)});
  }

  static int bin_prec(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") return 7;
    if (op == "<<" || op == ">>" || op == ">>>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return 0;
  }

  NodeId parse_binary(int min_prec) {
    NodeId lhs = parse_unary();
    for (;;) {
      int prec = bin_prec(cur().text);
      if (prec == 0 || prec < min_prec) return lhs;
      std::string op = take().text;
      NodeId rhs = parse_binary(prec + 1);
      SourceSpan sp = span_join(tree_.nodes[lhs].span, tree_.nodes[rhs].span);
      lhs = make(Kind::Binary, std::move(sp), BinaryData{std::move(op), lhs, rhs});
    }
  }

  NodeId parse_unary() {
    const Token& t = cur();
    if (t.text == "!" || t.text == "~" || t.text == "-" || t.text == "+" || t.text == "++" ||
        t.text == "--") {
      std::size_t op_idx = pos_index();
      std::string op = take().text;
      NodeId operand = parse_unary();
      SourceSpan sp = span_join(span_at(op_idx), tree_.nodes[operand].span);
      return make(Kind::Unary, std::move(sp), UnaryData{std::move(op), operand, false});
    }
    if (t.text == "(") {
      if (auto cast = try_cast()) return *cast;
      std::size_t open = pos_index();
      std::size_t arena_start = tree_.nodes.size();
      take();
      NodeId inner = parse_expr();
      expect_fail(")");
      return parse_postfix_chain(inner, open, arena_start);
    }
    std::size_t start = pos_index();
    std::size_t arena_start = tree_.nodes.size();
    NodeId base = parse_primary();
    return parse_postfix_chain(base, start, arena_start);
  }

  std::optional<NodeId> try_cast() {
    Mark m = mark();
    std::size_t open = pos_index();
    take();  // '('
    if (cur().type != Token::Type::Ident) {
      restore(m);
      return std::nullopt;
    }
    std::string name = take().text;
    std::string last_seg = name;
    while (at(".") && peek2().type == Token::Type::Ident) {
      take();
      last_seg = take().text;
      name += "." + last_seg;
    }
    bool array = false;
    while (at("[") && peek2().text == "]") {
      take();
      take();
      name += "[]";
      array = true;
    }
    if (!at(")")) {
      restore(m);
      return std::nullopt;
    }
    static constexpr std::array<std::string_view, 8> primitives = {
        "int", "long", "short", "byte", "char", "float", "double", "boolean"};
    bool primitive = false;
    for (std::string_view p : primitives) {
      if (last_seg == p) primitive = true;
    }
    bool looks_type = primitive || array || (!last_seg.empty() && last_seg[0] >= 'A' &&
                                             last_seg[0] <= 'Z');
    const Token& nt = peek2();
    bool primary_next = nt.type == Token::Type::Ident || nt.type == Token::Type::Number ||
                        nt.type == Token::Type::Str || nt.type == Token::Type::CharLit ||
                        nt.text == "(" || nt.text == "!" || nt.text == "~";
    if (nt.type == Token::Type::Ident &&
        (nt.text == "instanceof" || bin_prec(nt.text) != 0)) {
      primary_next = false;
    }
    if (!looks_type || !primary_next) {
      restore(m);
      return std::nullopt;
    }
    take();  // ')'
    NodeId operand = parse_unary();
    TypeName type{std::move(name), pattern_ && is_any_type_name(last_seg)};
    SourceSpan sp = span_join(span_at(open), tree_.nodes[operand].span);
    return make(Kind::Cast, std::move(sp), CastData{std::move(type), operand});
  }

  NodeId parse_postfix_chain(NodeId base, std::size_t start_idx, std::size_t arena_start) {
    for (;;) {
      if (at(".") && peek2().type == Token::Type::Ident) {
        take();
        Name nm{cur().text, pattern_ && is_wildcard_name(cur().text)};
        std::size_t name_idx = pos_index();
        take();
        if (at("(")) {
          std::vector<NodeId> args = parse_args();
          SourceSpan sp = span_join(tree_.nodes[base].span, span_at(last_sig_));
          base = make(Kind::Call, std::move(sp), CallData{base, std::move(nm), std::move(args)});
        } else {
          SourceSpan sp = span_join(tree_.nodes[base].span, span_at(name_idx));
          base = make(Kind::Field, std::move(sp), FieldData{base, std::move(nm)});
        }
        continue;
      }
      if (at("[")) {
        // Array access is out of subset: the whole chain so far turns opaque,
        // and the chain's nodes are dropped in favour of the raw text.
        skip_balanced("[", "]");
        std::size_t end = last_sig_;
        tree_.nodes.resize(arena_start);
        base = make(Kind::OpaqueExpr, span_tokens(start_idx, end),
                    OpaqueExprData{slice(start_idx, end)});
        continue;
      }
      if (at("++") || at("--")) {
        std::string op = cur().text;
        std::size_t op_idx = pos_index();
        take();
        SourceSpan sp = span_join(tree_.nodes[base].span, span_at(op_idx));
        base = make(Kind::Unary, std::move(sp), UnaryData{std::move(op), base, true});
        break;
      }
      break;
    }
    return base;
  }

  NodeId parse_primary() {
    const Token& t = cur();
    if (t.type == Token::Type::Ident) {
      if (t.text == "true" || t.text == "false") {
        std::size_t idx = pos_index();
        take();
        return make(Kind::Literal, span_at(idx),
                    LiteralData{LiteralKind::Bool, tokens_[idx].text, false, ""});
      }
      if (t.text == "null") {
        std::size_t idx = pos_index();
        take();
        return make(Kind::Literal, span_at(idx), LiteralData{LiteralKind::Null, "null", false, ""});
      }
      if (t.text == "new") return parse_new_opaque();
      if (pattern_ && t.text == "any" && peek2().text != "(" && peek2().text != ".") {
        std::size_t idx = pos_index();
        take();
        return make(Kind::ExprHole, span_at(idx), HoleData{});
      }
      std::size_t idx = pos_index();
      Name nm{t.text, pattern_ && is_wildcard_name(t.text)};
      take();
      if (at("(")) {
        std::vector<NodeId> args = parse_args();
        return make(Kind::Call, span_tokens(idx, last_sig_),
                    CallData{kNoNode, std::move(nm), std::move(args)});
      }
      return make(Kind::Ident, span_at(idx), IdentData{std::move(nm)});
    }
    if (t.type == Token::Type::Number) {
      std::size_t idx = pos_index();
      std::string lex = take().text;
      bool decimal = lex.find('.') != std::string::npos ||
                     ((lex.find('e') != std::string::npos || lex.find('E') != std::string::npos) &&
                      lex.substr(0, 2) != "0x" && lex.substr(0, 2) != "0X");
      return make(Kind::Literal, span_at(idx),
                  LiteralData{decimal ? LiteralKind::Decimal : LiteralKind::Integer,
                              std::move(lex), false, ""});
    }
    if (t.type == Token::Type::Str) {
      std::size_t idx = pos_index();
      std::string lex = take().text;
      LiteralData d{LiteralKind::String, lex, false, ""};
      if (pattern_ && lex.size() >= 2) {
        std::string content = lex.substr(1, lex.size() - 2);
        if (is_wildcard_name(content)) {
          d.wildcard = true;
          d.wc_name = std::move(content);
        }
      }
      return make(Kind::Literal, span_at(idx), std::move(d));
    }
    if (t.type == Token::Type::CharLit) {
      std::size_t idx = pos_index();
      return make(Kind::Literal, span_at(idx),
                  LiteralData{LiteralKind::Char, take().text, false, ""});
    }
    throw ParseFail{};
  }

  NodeId parse_new_opaque() {
    std::size_t start = pos_index();
    take();  // 'new'
    if (cur().type != Token::Type::Ident) throw ParseFail{};
    take();
    while (at(".") && peek2().type == Token::Type::Ident) {
      take();
      take();
    }
    if (at("<")) {
      std::string unused;
      if (!try_generic_args(unused)) throw ParseFail{};
    }
    if (at("(")) {
      skip_balanced_fail("(", ")");
      if (at("{")) skip_balanced_fail("{", "}");  // anonymous class body
    } else if (at("[")) {
      while (at("[")) skip_balanced_fail("[", "]");
      if (at("{")) skip_balanced_fail("{", "}");  // array initializer
    } else {
      throw ParseFail{};
    }
    std::size_t end = last_sig_;
    return make(Kind::OpaqueExpr, span_tokens(start, end), OpaqueExprData{slice(start, end)});
  }

  void skip_balanced_fail(std::string_view open, std::string_view close) {
    if (!at(open)) throw ParseFail{};
    take();
    int depth = 1;
    while (depth > 0) {
      const Token& t = cur();
      if (t.type == Token::Type::End) throw ParseFail{};
      if (t.text == open) ++depth;
      if (t.text == close) --depth;
      take();
    }
  }

  NodeId parse_paren_expr_or_opaque() {
    if (!at("(")) throw ParseFail{};
    Mark m = mark();
    try {
      take();
      NodeId e = parse_expr();
      expect_fail(")");
      return e;
    } catch (ParseFail&) {
      restore(m);
    }
    std::size_t open = pos_index();
    take();
    int depth = 1;
    std::size_t first_inner = pos_index();
    std::size_t last_inner = first_inner;
    bool any_inner = false;
    for (;;) {
      const Token& t = cur();
      if (t.type == Token::Type::End) {
        throw SyntaxError("unclosed '('", span_at(open));
      }
      if (t.text == "(") ++depth;
      if (t.text == ")") {
        --depth;
        if (depth == 0) {
          take();
          break;
        }
      }
      last_inner = pos_index();
      any_inner = true;
      take();
    }
    std::string raw = any_inner ? slice(first_inner, last_inner) : "";
    SourceSpan sp = any_inner ? span_tokens(first_inner, last_inner) : span_at(open);
    return make(Kind::OpaqueExpr, std::move(sp), OpaqueExprData{std::move(raw)});
  }

  std::vector<NodeId> parse_args() {
    expect_fail("(");
    std::vector<NodeId> args;
    if (at(")")) {
      take();
      return args;
    }
    for (;;) {
      if (pattern_ && at("...")) {
        std::size_t idx = pos_index();
        take();
        args.push_back(make(Kind::ArgsEllipsis, span_at(idx), HoleData{}));
      } else {
        args.push_back(parse_expr());
      }
      if (at(",")) {
        take();
        continue;
      }
      if (at(")")) {
        take();
        return args;
      }
      throw ParseFail{};
    }
  }

  // --- state -----------------------------------------------------------------

  std::string_view text_;
  bool pattern_ = false;
  Tree tree_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t last_sig_ = 0;
  bool stmt_started_ = false;

  bool pending_not_exists_ = false;
  bool pending_anchor_ = false;
  std::vector<std::string> pending_alerts_;
  int pending_line_ = 0;

  std::vector<MarkerEvent> alerts_;
  std::vector<NodeId> anchors_;
  std::vector<NodeId> not_exists_;
  std::vector<HeaderMarkup> headers_;
  std::vector<MetaLine> meta_lines_;
  std::vector<int> dangling_lines_;
};

}  // namespace patlock::ast::detail
