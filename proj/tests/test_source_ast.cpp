// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "patlock/source_ast.hpp"

using namespace patlock::ast;

namespace {

std::vector<NodeId> nodes_of_kind(const Tree& t, Kind k) {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{t.root};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (t.nodes[id].kind == k) out.push_back(id);
    each_child(t, id, [&](NodeId c) { stack.push_back(c); });
  }
  return out;
}

NodeId first_call_named(const Tree& t, const std::string& name) {
  for (NodeId id : nodes_of_kind(t, Kind::Call)) {
    if (as<CallData>(t, id).name.text == name) return id;
  }
  return kNoNode;
}

}  // namespace

TEST_CASE("minimal class parses into unit/type/method/block") {
  auto unit = parse_source("class C { void m() { int x = 5; } }", "C.java");
  REQUIRE(unit.root != kNoNode);
  REQUIRE(unit.nodes[unit.root].kind == Kind::Unit);
  const auto& types = as<UnitData>(unit, unit.root).types;
  REQUIRE(types.size() == 1);
  const auto& type = as<TypeData>(unit, types[0]);
  CHECK(type.name == "C");
  REQUIRE(type.methods.size() == 1);
  const auto& m = as<MethodData>(unit, type.methods[0]);
  CHECK(m.name == "m");
  CHECK(m.params.empty());
  const auto& body = as<BlockData>(unit, m.body);
  REQUIRE(body.stmts.size() == 1);
  REQUIRE(unit.nodes[body.stmts[0]].kind == Kind::VarDecl);
  const auto& decl = as<VarDeclData>(unit, body.stmts[0]);
  CHECK(decl.type.text == "int");
  CHECK(decl.name.text == "x");
  REQUIRE(decl.init != kNoNode);
  CHECK(unit.nodes[decl.init].kind == Kind::Literal);
}

TEST_CASE("spans carry 1-based line and column information") {
  std::string src =
      "class BuscaTermoAditivoServlet {\n"            // 1
      "  protected void doPost(HttpServletRequest request) {\n"  // 2
      "    String idAluno = request.getParameter(\"matricula\");\n"  // 3
      "    System.out.println(\"Aqui >>> \" + idAluno);\n"           // 4
      "    if (Integer.parseInt(idAluno) != -1) {\n"                 // 5
      "      msg = ValidaUtils.validaObrigatorio(\"Aluno\", idAluno);\n"  // 6
      "    }\n"
      "  }\n"
      "}\n";
  auto unit = parse_source(src, "BuscaTermoAditivoServlet.java");
  NodeId call = first_call_named(unit, "parseInt");
  REQUIRE(call != kNoNode);
  const Node& n = unit.nodes[call];
  CHECK(n.span.file_id == "BuscaTermoAditivoServlet.java");
  CHECK(n.span.line == 5);
  CHECK(n.span.column == 9);
  // The call expression spans through its closing parenthesis.
  CHECK(n.span.end_line == 5);
  CHECK(n.span.end_column == 34);

  NodeId println = first_call_named(unit, "println");
  REQUIRE(println != kNoNode);
  CHECK(unit.nodes[println].span.line == 4);
}

TEST_CASE("method parameters keep type and name") {
  auto unit = parse_source(
      "class S { void doGet(HttpServletRequest request, HttpServletResponse response) {} }",
      "S.java");
  const auto& type = as<TypeData>(unit, as<UnitData>(unit, unit.root).types[0]);
  const auto& m = as<MethodData>(unit, type.methods[0]);
  REQUIRE(m.params.size() == 2);
  CHECK(m.params[0].type_name == "HttpServletRequest");
  CHECK(m.params[0].name == "request");
  CHECK(m.params[1].type_name == "HttpServletResponse");
  CHECK(m.params[1].name == "response");
}

TEST_CASE("an unclosed class body reports the opening brace") {
  try {
    parse_source("class C {\n  void m() {}\n", "C.java");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.span().line == 1);
    CHECK(e.span().column == 9);
  }
}

TEST_CASE("an unclosed method block reports its own opening brace") {
  try {
    parse_source("class C {\n  void m() {\n    foo();\n", "C.java");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.span().line == 2);
    CHECK(e.span().column == 12);
  }
}

TEST_CASE("ancestors walk inner to outer and stop at the enclosing method") {
  auto unit = parse_source(
      "class C { void m() { if (a) { try { foo(); } catch (E e) {} } } }", "C.java");
  NodeId call = first_call_named(unit, "foo");
  REQUIRE(call != kNoNode);
  auto chain = ancestors(unit, call);
  std::vector<Kind> kinds;
  for (NodeId id : chain) kinds.push_back(unit.nodes[id].kind);
  // expr-stmt, try body block, try, if-then block, if, method body, method
  REQUIRE(kinds.size() == 7);
  CHECK(kinds[0] == Kind::ExprStmt);
  CHECK(kinds[1] == Kind::Block);
  CHECK(kinds[2] == Kind::Try);
  CHECK(kinds[3] == Kind::Block);
  CHECK(kinds[4] == Kind::If);
  CHECK(kinds[5] == Kind::Block);
  CHECK(kinds[6] == Kind::Method);

  // A method declaration itself has no enclosing method.
  NodeId method = chain.back();
  CHECK(ancestors(unit, method).empty());
  CHECK(enclosing_method(unit, call) == method);
}

TEST_CASE("braceless if branches become single statements") {
  auto unit = parse_source(
      "class C { void m() {\n"
      "  if (ide != null)\n"
      "    termoEstagio = TermoEstagioServices.buscarTermoEstagio(Integer.parseInt(ide));\n"
      "} }",
      "C.java");
  auto ifs = nodes_of_kind(unit, Kind::If);
  REQUIRE(ifs.size() == 1);
  const auto& d = as<IfData>(unit, ifs[0]);
  CHECK(unit.nodes[d.then_branch].kind == Kind::ExprStmt);
  CHECK(d.else_branch == kNoNode);
  NodeId call = first_call_named(unit, "parseInt");
  REQUIRE(call != kNoNode);
  CHECK(unit.nodes[call].span.line == 3);
}

TEST_CASE("try/catch/finally structure is preserved") {
  auto unit = parse_source(
      "class C { void m() {\n"
      "  try {\n"
      "    int id = Integer.parseInt(valor);\n"
      "  } catch (NumberFormatException e) {\n"
      "    log(e);\n"
      "  } finally {\n"
      "    close();\n"
      "  }\n"
      "} }",
      "C.java");
  auto tries = nodes_of_kind(unit, Kind::Try);
  REQUIRE(tries.size() == 1);
  const auto& d = as<TryData>(unit, tries[0]);
  REQUIRE(d.catches.size() == 1);
  REQUIRE(d.finally_block != kNoNode);
  const auto& c = as<CatchData>(unit, d.catches[0]);
  CHECK(c.type.text == "NumberFormatException");
  CHECK(c.binding.text == "e");
  CHECK_FALSE(c.type.any);
}

TEST_CASE("out-of-subset statements become opaque but are never dropped") {
  std::string src =
      "class C { void m() {\n"
      "  do { step(); } while (running);\n"
      "  int[] xs = values[0].clone();\n"
      "  String s = flag ? \"a\" : \"b\";\n"
      "  label: break label;\n"
      "  synchronized (lock) { touch(); }\n"
      "} }";
  auto unit = parse_source(src, "C.java");
  auto opaque = nodes_of_kind(unit, Kind::OpaqueStmt);
  CHECK(opaque.size() >= 3);  // do/while, labeled break, synchronized
  // Every statement still covers its source; reprinting loses nothing.
  auto reparsed = parse_source(pretty_print(unit), "C.java");
  CHECK(structurally_equal(unit, reparsed));
}

TEST_CASE("try-with-resources falls back to a single opaque statement") {
  auto unit = parse_source(
      "class C { void m() {\n"
      "  try (Reader r = open()) { use(r); } catch (IOException e) { log(e); }\n"
      "  done();\n"
      "} }",
      "C.java");
  const auto& type = as<TypeData>(unit, as<UnitData>(unit, unit.root).types[0]);
  const auto& m = as<MethodData>(unit, type.methods[0]);
  const auto& body = as<BlockData>(unit, m.body);
  REQUIRE(body.stmts.size() == 2);
  CHECK(unit.nodes[body.stmts[0]].kind == Kind::OpaqueStmt);
  CHECK(unit.nodes[body.stmts[1]].kind == Kind::ExprStmt);
  const auto& raw = as<OpaqueStmtData>(unit, body.stmts[0]).raw;
  CHECK(raw.find("IOException") != std::string::npos);
}

TEST_CASE("expression shapes: calls, fields, casts, assignments") {
  auto unit = parse_source(
      "class C { void m() {\n"
      "  Float bolsa = (Float) session.getAttribute(\"bolsa\");\n"
      "  msg = ValidaUtils.validaObrigatorio(\"Aluno\", idAluno);\n"
      "  UF[] uf = UF.asList();\n"
      "  if (!msg.trim().isEmpty()) { ok(); }\n"
      "} }",
      "C.java");

  auto casts = nodes_of_kind(unit, Kind::Cast);
  REQUIRE(casts.size() == 1);
  CHECK(as<CastData>(unit, casts[0]).type.text == "Float");

  auto assigns = nodes_of_kind(unit, Kind::Assign);
  REQUIRE(assigns.size() == 1);
  const auto& a = as<AssignData>(unit, assigns[0]);
  CHECK(unit.nodes[a.target].kind == Kind::Ident);
  CHECK(unit.nodes[a.value].kind == Kind::Call);
  const auto& call = as<CallData>(unit, a.value);
  CHECK(call.name.text == "validaObrigatorio");
  REQUIRE(call.args.size() == 2);
  CHECK(unit.nodes[call.args[0]].kind == Kind::Literal);
  CHECK(as<LiteralData>(unit, call.args[0]).lexeme == "\"Aluno\"");

  // UF[] declares an array-typed variable.
  bool found = false;
  for (NodeId id : nodes_of_kind(unit, Kind::VarDecl)) {
    if (as<VarDeclData>(unit, id).type.text == "UF[]") found = true;
  }
  CHECK(found);

  // Chained receiver: msg.trim().isEmpty()
  NodeId is_empty = first_call_named(unit, "isEmpty");
  REQUIRE(is_empty != kNoNode);
  NodeId trim = as<CallData>(unit, is_empty).receiver;
  REQUIRE(trim != kNoNode);
  CHECK(as<CallData>(unit, trim).name.text == "trim");
}

TEST_CASE("structural equality ignores spans, whitespace and comments") {
  auto a = parse_source("class C { void m() { foo(1, x); } }", "A.java");
  auto b = parse_source(
      "class C {\n"
      "  // completely different layout\n"
      "  void m() {\n"
      "    foo( 1 , x );  /* trailing */\n"
      "  }\n"
      "}\n",
      "B.java");
  CHECK(structurally_equal(a, b));

  auto c = parse_source("class C { void m() { foo(2, x); } }", "C.java");
  CHECK_FALSE(structurally_equal(a, c));

  auto d = parse_source("class C { void m() { foo(1, y); } }", "D.java");
  CHECK_FALSE(structurally_equal(a, d));
}

TEST_CASE("operator precedence builds the expected shape") {
  auto unit = parse_source("class C { void m() { r = a + b * c; } }", "C.java");
  auto assigns = nodes_of_kind(unit, Kind::Assign);
  REQUIRE(assigns.size() == 1);
  NodeId top = as<AssignData>(unit, assigns[0]).value;
  REQUIRE(unit.nodes[top].kind == Kind::Binary);
  const auto& add = as<BinaryData>(unit, top);
  CHECK(add.op == "+");
  CHECK(unit.nodes[add.lhs].kind == Kind::Ident);
  REQUIRE(unit.nodes[add.rhs].kind == Kind::Binary);
  CHECK(as<BinaryData>(unit, add.rhs).op == "*");
}

TEST_CASE("parse then print then parse is structurally stable") {
  std::string src =
      "class VisualizarTermoEAditivo extends HttpServlet {\n"
      "  protected void doGet(HttpServletRequest request, HttpServletResponse response) {\n"
      "    String matricula = request.getParameter(\"matricula\");\n"
      "    String ide = request.getParameter(\"ide\");\n"
      "    UF[] uf = UF.asList();\n"
      "    TermoEstagio termoEstagio = null;\n"
      "    Aluno aluno = AlunoServices.buscarAlunoByMatricula(matricula);\n"
      "    if (ide != null)\n"
      "      termoEstagio = TermoEstagioServices.buscarTermoEstagio(Integer.parseInt(ide));\n"
      "    while (it.hasNext()) { consume(it.next()); }\n"
      "    for (int i = 0; i < n; i++) { visit(i); }\n"
      "    switch (kind) { case 1: a(); break; default: b(); }\n"
      "    return;\n"
      "  }\n"
      "}\n";
  auto unit = parse_source(src, "V.java");
  auto once = parse_source(pretty_print(unit), "V.java");
  CHECK(structurally_equal(unit, once));
  auto twice = parse_source(pretty_print(once), "V.java");
  CHECK(structurally_equal(once, twice));
}

TEST_CASE("fields, nested types and bodyless methods are skipped cleanly") {
  auto unit = parse_source(
      "class C {\n"
      "  private static final int LIMIT = 10;\n"
      "  private Map<String, List<Integer>> index = new HashMap<>();\n"
      "  abstract void later();\n"
      "  class Inner { void hidden() { secret(); } }\n"
      "  void m() { visible(); }\n"
      "}\n",
      "C.java");
  const auto& type = as<TypeData>(unit, as<UnitData>(unit, unit.root).types[0]);
  REQUIRE(type.methods.size() == 1);
  CHECK(as<MethodData>(unit, type.methods[0]).name == "m");
}

TEST_CASE("span containment relates nested expressions") {
  auto unit = parse_source("class C { void m() { f(g(x)); } }", "C.java");
  NodeId f = first_call_named(unit, "f");
  NodeId g = first_call_named(unit, "g");
  REQUIRE(f != kNoNode);
  REQUIRE(g != kNoNode);
  CHECK(span_contains(unit.nodes[f].span, unit.nodes[g].span));
  CHECK_FALSE(span_contains(unit.nodes[g].span, unit.nodes[f].span));
}
