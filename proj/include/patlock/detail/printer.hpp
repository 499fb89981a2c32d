// SPDX-License-Identifier: Apache-2.0
//
// Canonical text form for AST nodes. Output is designed to reparse to a
// structurally equal tree: parentheses are inserted wherever precedence
// demands, opaque regions are emitted verbatim, and an optional map of lead
// comment lines lets callers re-emit rule markup in front of statements.
//
// Internal header: include <patlock/source_ast.hpp>.

#pragma once

#include <map>
#include <string>
#include <vector>

namespace patlock::ast::detail {

using LeadComments = std::map<NodeId, std::vector<std::string>>;

class PrinterImpl {
 public:
  PrinterImpl(const Tree& t, const LeadComments* lead) : t_(t), lead_(lead) {}

  std::string node(NodeId id) {
    const Node& n = t_.nodes[id];
    if (is_expr_kind(n.kind) || n.kind == Kind::ArgsEllipsis) return expr(id, 0);
    out_.clear();
    switch (n.kind) {
      case Kind::Unit:
        for (NodeId c : std::get<UnitData>(n.data).types) type_decl(c);
        break;
      case Kind::TypeDecl:
        type_decl(id);
        break;
      case Kind::Method:
        method(id, 0);
        break;
      case Kind::Catch:
        catch_clause(id, 0);
        break;
      default:
        stmt(id, 0);
        break;
    }
    return out_;
  }

  std::string sequence(const std::vector<NodeId>& stmts) {
    out_.clear();
    for (NodeId s : stmts) stmt(s, 0);
    return out_;
  }

 private:
  void line(int ind, const std::string& text) {
    out_.append(static_cast<std::size_t>(ind) * 2, ' ');
    out_ += text;
    out_ += '\n';
  }

  void emit_lead(NodeId id, int ind) {
    if (!lead_) return;
    auto it = lead_->find(id);
    if (it == lead_->end()) return;
    for (const std::string& c : it->second) line(ind, c);
  }

  void type_decl(NodeId id) {
    const auto& d = std::get<TypeData>(t_.nodes[id].data);
    line(0, "class " + d.name);
    line(0, "{");
    for (NodeId m : d.methods) method(m, 1);
    line(0, "}");
  }

  void method(NodeId id, int ind) {
    const auto& d = std::get<MethodData>(t_.nodes[id].data);
    std::string sig = "void " + d.name + "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      if (i) sig += ", ";
      sig += d.params[i].type_name;
      if (!d.params[i].name.empty()) sig += " " + d.params[i].name;
    }
    sig += ")";
    line(ind, sig);
    if (d.body != kNoNode) stmt(d.body, ind);
  }

  void catch_clause(NodeId id, int ind) {
    const auto& d = std::get<CatchData>(t_.nodes[id].data);
    std::string head = "catch (" + d.type.text;
    if (!d.binding.text.empty()) head += " " + d.binding.text;
    head += ")";
    line(ind, head);
    stmt(d.body, ind);
  }

  void branch(NodeId id, int ind) {
    if (t_.nodes[id].kind == Kind::Block) {
      stmt(id, ind);
    } else {
      stmt(id, ind + 1);
    }
  }

  void stmt(NodeId id, int ind) {
    emit_lead(id, ind);
    const Node& n = t_.nodes[id];
    switch (n.kind) {
      case Kind::Block: {
        line(ind, "{");
        for (NodeId c : std::get<BlockData>(n.data).stmts) stmt(c, ind + 1);
        line(ind, "}");
        break;
      }
      case Kind::VarDecl: {
        const auto& d = std::get<VarDeclData>(n.data);
        std::string s = d.type.text + " " + d.name.text;
        if (d.init != kNoNode) s += " = " + expr(d.init, 0);
        line(ind, s + ";");
        break;
      }
      case Kind::ExprStmt:
        line(ind, expr(std::get<ExprStmtData>(n.data).expr, 0) + ";");
        break;
      case Kind::If: {
        const auto& d = std::get<IfData>(n.data);
        line(ind, "if (" + expr(d.cond, 0) + ")");
        branch(d.then_branch, ind);
        if (d.else_branch != kNoNode) {
          line(ind, "else");
          branch(d.else_branch, ind);
        }
        break;
      }
      case Kind::Try: {
        const auto& d = std::get<TryData>(n.data);
        line(ind, "try");
        stmt(d.body, ind);
        for (NodeId c : d.catches) catch_clause(c, ind);
        if (d.finally_block != kNoNode) {
          line(ind, "finally");
          stmt(d.finally_block, ind);
        }
        break;
      }
      case Kind::Loop: {
        const auto& d = std::get<LoopData>(n.data);
        line(ind, d.keyword + " (" + d.header + ")");
        branch(d.body, ind);
        break;
      }
      case Kind::Switch:
        line(ind, std::get<SwitchData>(n.data).raw);
        break;
      case Kind::Return: {
        NodeId v = std::get<ReturnData>(n.data).value;
        line(ind, v == kNoNode ? "return;" : "return " + expr(v, 0) + ";");
        break;
      }
      case Kind::Throw:
        line(ind, "throw " + expr(std::get<ThrowData>(n.data).value, 0) + ";");
        break;
      case Kind::OpaqueStmt:
        line(ind, std::get<OpaqueStmtData>(n.data).raw);
        break;
      case Kind::StmtEllipsis:
        line(ind, "...");
        break;
      default:
        line(ind, expr(id, 0) + ";");
        break;
    }
  }

  // min_prec is the binding strength the context demands; weaker nodes get
  // wrapped so the text reparses to the same shape.
  std::string expr(NodeId id, int min_prec) {
    const Node& n = t_.nodes[id];
    int own = 100;
    std::string s;
    switch (n.kind) {
      case Kind::Ident:
        s = std::get<IdentData>(n.data).name.text;
        break;
      case Kind::Literal:
        s = std::get<LiteralData>(n.data).lexeme;
        break;
      case Kind::ExprHole:
        s = "any";
        break;
      case Kind::ArgsEllipsis:
        s = "...";
        break;
      case Kind::Field: {
        const auto& d = std::get<FieldData>(n.data);
        s = expr(d.receiver, 15) + "." + d.name.text;
        break;
      }
      case Kind::Call: {
        const auto& d = std::get<CallData>(n.data);
        if (d.receiver != kNoNode) s = expr(d.receiver, 15) + ".";
        s += d.name.text + "(";
        for (std::size_t i = 0; i < d.args.size(); ++i) {
          if (i) s += ", ";
          s += expr(d.args[i], 0);
        }
        s += ")";
        break;
      }
      case Kind::Binary: {
        const auto& d = std::get<BinaryData>(n.data);
        own = bin_print_prec(d.op);
        s = expr(d.lhs, own) + " " + d.op + " " + expr(d.rhs, own + 1);
        break;
      }
      case Kind::Unary: {
        const auto& d = std::get<UnaryData>(n.data);
        const Node& op_node = t_.nodes[d.operand];
        if (d.postfix) {
          own = 15;
          s = expr(d.operand, 15) + d.op;
        } else {
          own = 11;
          bool nested_prefix = op_node.kind == Kind::Unary &&
                               !std::get<UnaryData>(op_node.data).postfix;
          s = d.op + (nested_prefix ? "(" + expr(d.operand, 0) + ")" : expr(d.operand, 11));
        }
        break;
      }
      case Kind::Assign: {
        const auto& d = std::get<AssignData>(n.data);
        own = 0;
        s = expr(d.target, 15) + " " + d.op + " " + expr(d.value, 0);
        break;
      }
      case Kind::Cast: {
        const auto& d = std::get<CastData>(n.data);
        own = 11;
        s = "(" + d.type.text + ") " + expr(d.operand, 11);
        break;
      }
      case Kind::OpaqueExpr:
        own = 0;
        s = std::get<OpaqueExprData>(n.data).raw;
        break;
      default:
        s = "";
        break;
    }
    if (own < min_prec) return "(" + s + ")";
    return s;
  }

  static int bin_print_prec(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") return 7;
    if (op == "<<" || op == ">>" || op == ">>>") return 8;
    if (op == "+" || op == "-") return 9;
    return 10;
  }

  const Tree& t_;
  const LeadComments* lead_;
  std::string out_;
};

inline std::string print_node(const Tree& t, NodeId id, const LeadComments* lead = nullptr) {
  return PrinterImpl(t, lead).node(id);
}

inline std::string print_stmt_sequence(const Tree& t, const std::vector<NodeId>& stmts,
                                       const LeadComments* lead = nullptr) {
  return PrinterImpl(t, lead).sequence(stmts);
}

}  // namespace patlock::ast::detail
