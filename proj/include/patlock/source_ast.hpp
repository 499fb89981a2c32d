// SPDX-License-Identifier: Apache-2.0
//
// Immutable AST for the supported Java subset. Trees are arena-backed:
// a Tree owns a flat vector of nodes addressed by NodeId, every node
// carries a source span and a parent link. The same node vocabulary is
// reused by the pattern DSL, which adds wildcard/hole kinds; trees built
// by parse_source never contain those.

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace patlock::ast {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xFFFFFFFFu;

struct SourceSpan {
  std::string file_id;
  int line = 1;
  int column = 1;
  int end_line = 1;
  int end_column = 1;
};

inline bool span_contains(const SourceSpan& outer, const SourceSpan& inner) {
  const bool starts_ok = outer.line < inner.line ||
                         (outer.line == inner.line && outer.column <= inner.column);
  const bool ends_ok = outer.end_line > inner.end_line ||
                       (outer.end_line == inner.end_line && outer.end_column >= inner.end_column);
  return starts_ok && ends_ok;
}

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string message, SourceSpan span)
      : std::runtime_error(std::move(message)), span_(std::move(span)) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

enum class Kind : std::uint8_t {
  Unit,
  TypeDecl,
  Method,
  // statements
  Block,
  VarDecl,
  ExprStmt,
  If,
  Try,
  Catch,
  Loop,
  Switch,
  Return,
  Throw,
  OpaqueStmt,
  // expressions
  Call,
  Field,
  Ident,
  Literal,
  Binary,
  Unary,
  Assign,
  Cast,
  OpaqueExpr,
  // pattern-only holes
  StmtEllipsis,
  ArgsEllipsis,
  ExprHole,
};

inline bool is_stmt_kind(Kind k) {
  switch (k) {
    case Kind::Block:
    case Kind::VarDecl:
    case Kind::ExprStmt:
    case Kind::If:
    case Kind::Try:
    case Kind::Loop:
    case Kind::Switch:
    case Kind::Return:
    case Kind::Throw:
    case Kind::OpaqueStmt:
    case Kind::StmtEllipsis:
      return true;
    default:
      return false;
  }
}

inline bool is_expr_kind(Kind k) {
  switch (k) {
    case Kind::Call:
    case Kind::Field:
    case Kind::Ident:
    case Kind::Literal:
    case Kind::Binary:
    case Kind::Unary:
    case Kind::Assign:
    case Kind::Cast:
    case Kind::OpaqueExpr:
    case Kind::ExprHole:
      return true;
    default:
      return false;
  }
}

enum class LiteralKind : std::uint8_t { String, Char, Integer, Decimal, Bool, Null };

// An identifier occurrence: method/field/variable names and catch bindings.
// In pattern trees `wildcard` marks the any/some/other naming convention.
struct Name {
  std::string text;
  bool wildcard = false;
};

// A type-name occurrence, stored as canonical token-joined text (`UF[]`,
// `java.io.IOException`). In pattern trees `any` marks Any* type wildcards.
struct TypeName {
  std::string text;
  bool any = false;
};

struct Param {
  std::string type_name;
  std::string name;
};

struct UnitData {
  std::vector<NodeId> types;
};
struct TypeData {
  std::string name;
  std::vector<NodeId> methods;
};
struct MethodData {
  std::string name;
  std::vector<Param> params;
  NodeId body = kNoNode;
};
struct BlockData {
  std::vector<NodeId> stmts;
};
struct VarDeclData {
  TypeName type;
  Name name;
  NodeId init = kNoNode;
};
struct ExprStmtData {
  NodeId expr = kNoNode;
};
struct IfData {
  NodeId cond = kNoNode;
  NodeId then_branch = kNoNode;
  NodeId else_branch = kNoNode;
};
struct TryData {
  NodeId body = kNoNode;
  std::vector<NodeId> catches;
  NodeId finally_block = kNoNode;
};
struct CatchData {
  TypeName type;
  Name binding;
  NodeId body = kNoNode;
};
struct LoopData {
  std::string keyword;  // "for" or "while"
  std::string header;   // raw parenthesized header text
  NodeId body = kNoNode;
};
struct SwitchData {
  std::string raw;
};
struct ReturnData {
  NodeId value = kNoNode;
};
struct ThrowData {
  NodeId value = kNoNode;
};
struct OpaqueStmtData {
  std::string raw;
};
struct CallData {
  NodeId receiver = kNoNode;  // kNoNode for receiver-less calls
  Name name;
  std::vector<NodeId> args;
};
struct FieldData {
  NodeId receiver = kNoNode;
  Name name;
};
struct IdentData {
  Name name;
};
struct LiteralData {
  LiteralKind kind = LiteralKind::Null;
  std::string lexeme;
  bool wildcard = false;    // string literal whose content follows the wildcard convention
  std::string wc_name;
};
struct BinaryData {
  std::string op;
  NodeId lhs = kNoNode;
  NodeId rhs = kNoNode;
};
struct UnaryData {
  std::string op;
  NodeId operand = kNoNode;
  bool postfix = false;
};
struct AssignData {
  std::string op;  // "=", "+=", ...
  NodeId target = kNoNode;
  NodeId value = kNoNode;
};
struct CastData {
  TypeName type;
  NodeId operand = kNoNode;
};
struct OpaqueExprData {
  std::string raw;
};
struct HoleData {};

using NodeData =
    std::variant<UnitData, TypeData, MethodData, BlockData, VarDeclData, ExprStmtData, IfData,
                 TryData, CatchData, LoopData, SwitchData, ReturnData, ThrowData, OpaqueStmtData,
                 CallData, FieldData, IdentData, LiteralData, BinaryData, UnaryData, AssignData,
                 CastData, OpaqueExprData, HoleData>;

struct Node {
  Kind kind = Kind::OpaqueStmt;
  SourceSpan span;
  NodeId parent = kNoNode;
  NodeData data;
  // Pattern annotations; always false in source trees.
  bool mark_anchor = false;
  bool mark_not_exists = false;
};

// Arena tree. Immutable once parsing finishes; safe for concurrent reads.
struct Tree {
  std::string file_id;
  std::vector<Node> nodes;
  NodeId root = kNoNode;

  const Node& operator[](NodeId id) const { return nodes[id]; }
  Node& operator[](NodeId id) { return nodes[id]; }
  std::size_t size() const { return nodes.size(); }
};

using CompilationUnit = Tree;

template <class T>
const T& as(const Tree& t, NodeId id) {
  return std::get<T>(t.nodes[id].data);
}

inline void each_child(const Tree& t, NodeId id, const std::function<void(NodeId)>& fn) {
  const Node& n = t.nodes[id];
  auto opt = [&](NodeId c) {
    if (c != kNoNode) fn(c);
  };
  switch (n.kind) {
    case Kind::Unit:
      for (NodeId c : std::get<UnitData>(n.data).types) fn(c);
      break;
    case Kind::TypeDecl:
      for (NodeId c : std::get<TypeData>(n.data).methods) fn(c);
      break;
    case Kind::Method:
      opt(std::get<MethodData>(n.data).body);
      break;
    case Kind::Block:
      for (NodeId c : std::get<BlockData>(n.data).stmts) fn(c);
      break;
    case Kind::VarDecl:
      opt(std::get<VarDeclData>(n.data).init);
      break;
    case Kind::ExprStmt:
      opt(std::get<ExprStmtData>(n.data).expr);
      break;
    case Kind::If: {
      const auto& d = std::get<IfData>(n.data);
      opt(d.cond);
      opt(d.then_branch);
      opt(d.else_branch);
      break;
    }
    case Kind::Try: {
      const auto& d = std::get<TryData>(n.data);
      opt(d.body);
      for (NodeId c : d.catches) fn(c);
      opt(d.finally_block);
      break;
    }
    case Kind::Catch:
      opt(std::get<CatchData>(n.data).body);
      break;
    case Kind::Loop:
      opt(std::get<LoopData>(n.data).body);
      break;
    case Kind::Return:
      opt(std::get<ReturnData>(n.data).value);
      break;
    case Kind::Throw:
      opt(std::get<ThrowData>(n.data).value);
      break;
    case Kind::Call: {
      const auto& d = std::get<CallData>(n.data);
      opt(d.receiver);
      for (NodeId c : d.args) fn(c);
      break;
    }
    case Kind::Field:
      opt(std::get<FieldData>(n.data).receiver);
      break;
    case Kind::Binary: {
      const auto& d = std::get<BinaryData>(n.data);
      opt(d.lhs);
      opt(d.rhs);
      break;
    }
    case Kind::Unary:
      opt(std::get<UnaryData>(n.data).operand);
      break;
    case Kind::Assign: {
      const auto& d = std::get<AssignData>(n.data);
      opt(d.target);
      opt(d.value);
      break;
    }
    case Kind::Cast:
      opt(std::get<CastData>(n.data).operand);
      break;
    default:
      break;  // leaves and opaque nodes
  }
}

inline std::vector<NodeId> children(const Tree& t, NodeId id) {
  std::vector<NodeId> out;
  each_child(t, id, [&](NodeId c) { out.push_back(c); });
  return out;
}

// Parent chain from the immediate parent up to the enclosing method,
// inclusive, inner to outer. Nodes outside any method yield an empty chain.
inline std::vector<NodeId> ancestors(const Tree& t, NodeId id) {
  std::vector<NodeId> chain;
  for (NodeId p = t.nodes[id].parent; p != kNoNode; p = t.nodes[p].parent) {
    chain.push_back(p);
    if (t.nodes[p].kind == Kind::Method) return chain;
  }
  return {};
}

inline bool is_ancestor_or_self(const Tree& t, NodeId anc, NodeId id) {
  for (NodeId c = id; c != kNoNode; c = t.nodes[c].parent) {
    if (c == anc) return true;
  }
  return false;
}

inline NodeId enclosing_method(const Tree& t, NodeId id) {
  for (NodeId c = id; c != kNoNode; c = t.nodes[c].parent) {
    if (t.nodes[c].kind == Kind::Method) return c;
  }
  return kNoNode;
}

template <class Pred>
std::vector<NodeId> collect_if(const Tree& t, Pred pred) {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < t.nodes.size(); ++i) {
    if (pred(t.nodes[i], static_cast<NodeId>(i))) out.push_back(i);
  }
  return out;
}

}  // namespace patlock::ast

#include "patlock/detail/lexer.hpp"
#include "patlock/detail/parser.hpp"
#include "patlock/detail/printer.hpp"

namespace patlock::ast {

// Parses one source file of the supported subset. Constructs outside the
// subset inside a method body become opaque statements with correct spans.
// Throws SyntaxError (with span) on unrecoverable input.
inline CompilationUnit parse_source(std::string_view text, std::string file_id) {
  detail::Parser parser(text, std::move(file_id), /*pattern_mode=*/false);
  return parser.parse_unit();
}

inline std::string pretty_print(const Tree& t, NodeId id) {
  return detail::print_node(t, id);
}

inline std::string pretty_print(const Tree& t) {
  return detail::print_node(t, t.root);
}

namespace detail {

inline bool tokens_equal(std::string_view a, std::string_view b) {
  auto ta = lex(a, LexMode::Source);
  auto tb = lex(b, LexMode::Source);
  auto sig = [](const std::vector<Token>& ts) {
    std::vector<std::string> out;
    for (const auto& tk : ts) {
      if (tk.type == Token::Type::Comment || tk.type == Token::Type::End) continue;
      out.push_back(tk.text);
    }
    return out;
  };
  return sig(ta) == sig(tb);
}

}  // namespace detail

// Structural equality ignoring spans, whitespace inside opaque regions, and
// comment trivia. Pattern annotations (wildcard flags, markers) participate.
inline bool structurally_equal(const Tree& ta, NodeId a, const Tree& tb, NodeId b) {
  const Node& na = ta.nodes[a];
  const Node& nb = tb.nodes[b];
  if (na.kind != nb.kind) return false;
  if (na.mark_anchor != nb.mark_anchor || na.mark_not_exists != nb.mark_not_exists) return false;

  auto eq_name = [](const Name& x, const Name& y) {
    return x.text == y.text && x.wildcard == y.wildcard;
  };
  auto eq_type = [](const TypeName& x, const TypeName& y) {
    return x.text == y.text && x.any == y.any;
  };

  switch (na.kind) {
    case Kind::TypeDecl:
      if (as<TypeData>(ta, a).name != as<TypeData>(tb, b).name) return false;
      break;
    case Kind::Method: {
      const auto& da = as<MethodData>(ta, a);
      const auto& db = as<MethodData>(tb, b);
      if (da.name != db.name || da.params.size() != db.params.size()) return false;
      for (std::size_t i = 0; i < da.params.size(); ++i) {
        if (da.params[i].type_name != db.params[i].type_name ||
            da.params[i].name != db.params[i].name)
          return false;
      }
      break;
    }
    case Kind::VarDecl: {
      const auto& da = as<VarDeclData>(ta, a);
      const auto& db = as<VarDeclData>(tb, b);
      if (!eq_type(da.type, db.type) || !eq_name(da.name, db.name)) return false;
      break;
    }
    case Kind::Catch: {
      const auto& da = as<CatchData>(ta, a);
      const auto& db = as<CatchData>(tb, b);
      if (!eq_type(da.type, db.type) || !eq_name(da.binding, db.binding)) return false;
      break;
    }
    case Kind::Loop: {
      const auto& da = as<LoopData>(ta, a);
      const auto& db = as<LoopData>(tb, b);
      if (da.keyword != db.keyword || !detail::tokens_equal(da.header, db.header)) return false;
      break;
    }
    case Kind::Switch:
      if (!detail::tokens_equal(as<SwitchData>(ta, a).raw, as<SwitchData>(tb, b).raw)) return false;
      break;
    case Kind::OpaqueStmt:
      if (!detail::tokens_equal(as<OpaqueStmtData>(ta, a).raw, as<OpaqueStmtData>(tb, b).raw))
        return false;
      break;
    case Kind::OpaqueExpr:
      if (!detail::tokens_equal(as<OpaqueExprData>(ta, a).raw, as<OpaqueExprData>(tb, b).raw))
        return false;
      break;
    case Kind::Call:
      if (!eq_name(as<CallData>(ta, a).name, as<CallData>(tb, b).name)) return false;
      if ((as<CallData>(ta, a).receiver == kNoNode) != (as<CallData>(tb, b).receiver == kNoNode))
        return false;
      break;
    case Kind::Field:
      if (!eq_name(as<FieldData>(ta, a).name, as<FieldData>(tb, b).name)) return false;
      break;
    case Kind::Ident:
      if (!eq_name(as<IdentData>(ta, a).name, as<IdentData>(tb, b).name)) return false;
      break;
    case Kind::Literal: {
      const auto& da = as<LiteralData>(ta, a);
      const auto& db = as<LiteralData>(tb, b);
      if (da.kind != db.kind || da.lexeme != db.lexeme || da.wildcard != db.wildcard) return false;
      break;
    }
    case Kind::Binary:
      if (as<BinaryData>(ta, a).op != as<BinaryData>(tb, b).op) return false;
      break;
    case Kind::Unary: {
      const auto& da = as<UnaryData>(ta, a);
      const auto& db = as<UnaryData>(tb, b);
      if (da.op != db.op || da.postfix != db.postfix) return false;
      break;
    }
    case Kind::Assign:
      if (as<AssignData>(ta, a).op != as<AssignData>(tb, b).op) return false;
      break;
    case Kind::Cast:
      if (!eq_type(as<CastData>(ta, a).type, as<CastData>(tb, b).type)) return false;
      break;
    default:
      break;
  }

  auto ca = children(ta, a);
  auto cb = children(tb, b);
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!structurally_equal(ta, ca[i], tb, cb[i])) return false;
  }
  return true;
}

inline bool structurally_equal(const Tree& a, const Tree& b) {
  return structurally_equal(a, a.root, b, b.root);
}

}  // namespace patlock::ast
