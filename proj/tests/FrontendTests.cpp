//===--- FrontendTests.cpp - Lexer, parser, sema, USRs, serialization ----------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/AstIo.hpp"
#include "minisa/Usr.hpp"
#include "TestUtil.hpp"

#include <doctest.h>

using namespace minisa;
using namespace minisa::test;

TEST_CASE("parse a simple function") {
  auto Unit = parseOk("int f(int x){ if(x>0) return x; return x/0; }");
  const FunctionDecl *F = Unit->findFunction("f");
  REQUIRE(F != nullptr);
  CHECK(F->hasBody());
  CHECK(F->Params.size() == 1);
  CHECK(F->Body->Kind == StmtKind::Compound);
  REQUIRE(F->Body->Body.size() == 2);
  CHECK(F->Body->Body[0]->Kind == StmtKind::If);
  CHECK(F->Body->Body[0]->Then->Kind == StmtKind::Return);
  CHECK(F->Body->Body[1]->Kind == StmtKind::Return);
}

TEST_CASE("empty input parses to an empty unit") {
  ParseResult PR = parseTranslationUnit("", "empty.mc");
  REQUIRE(PR.ok());
  // Only the builtin declarations are registered.
  for (const FunctionDecl *F : PR.Unit->Functions)
    CHECK(F->Builtin);
  CHECK(PR.Unit->Records.empty());
  CHECK(PR.Unit->Globals.empty());
}

TEST_CASE("unbalanced paren is a syntax error at line 1") {
  ParseResult PR = parseTranslationUnit("int f(", "bad.mc");
  REQUIRE(!PR.ok());
  REQUIRE(!PR.Diags.empty());
  CHECK(PR.Diags[0].K == Diagnostic::Kind::SyntaxError);
  CHECK(PR.Diags[0].Loc.Line == 1);
}

TEST_CASE("type diagnostics") {
  SUBCASE("dereferencing a non-pointer") {
    ParseResult PR = parseTranslationUnit("int f(int x){ return *x; }", "t.mc");
    REQUIRE(!PR.ok());
    CHECK(PR.Diags[0].K == Diagnostic::Kind::TypeError);
  }
  SUBCASE("integer literal outside 32-bit range") {
    ParseResult PR =
        parseTranslationUnit("int f(){ return 2147483648; }", "t.mc");
    REQUIRE(!PR.ok());
    CHECK(PR.Diags[0].K == Diagnostic::Kind::TypeError);
  }
  SUBCASE("logical operators only in branch conditions") {
    ParseResult PR =
        parseTranslationUnit("int f(int a,int b){ int c = a && b; return c; }",
                             "t.mc");
    REQUIRE(!PR.ok());
    CHECK(PR.Diags[0].K == Diagnostic::Kind::TypeError);
  }
  SUBCASE("undeclared identifier") {
    ParseResult PR = parseTranslationUnit("int f(){ return y; }", "t.mc");
    REQUIRE(!PR.ok());
  }
  SUBCASE("call to undeclared function") {
    ParseResult PR = parseTranslationUnit("int f(){ return g(); }", "t.mc");
    REQUIRE(!PR.ok());
  }
  SUBCASE("duplicate definitions are rejected") {
    ParseResult PR = parseTranslationUnit(
        "int f(int x){ return 1; } int f(int x){ return 2; }", "t.mc");
    REQUIRE(!PR.ok());
  }
  SUBCASE("prototype then definition is fine") {
    auto Unit =
        parseOk("int f(int x); int f(int x){ return x; } int g(){ return f(1); }");
    CHECK(Unit->findFunction("f")->hasBody());
  }
}

TEST_CASE("USR computation") {
  auto Unit = parseOk("struct X { int a, b; };\n"
                      "int f(int x) { return x; }\n"
                      "int g() { return 0; }\n"
                      "void h(int *p, struct X *r) { }\n");
  CHECK(Unit->findFunction("f")->Usr == "F:f#i");
  CHECK(Unit->findFunction("g")->Usr == "F:g#");
  CHECK(Unit->findFunction("h")->Usr == "F:h#piprX#");
  CHECK(Unit->findRecord("X")->Usr == "R:X");
  CHECK(Unit->findFunction("malloc")->Usr == "F:malloc#i");
}

TEST_CASE("type mangling covers arrays and nesting") {
  Ast Unit;
  const Type *I = Unit.intType();
  CHECK(mangleType(I) == "i");
  CHECK(mangleType(Unit.pointerTo(I)) == "pi");
  CHECK(mangleType(Unit.pointerTo(Unit.pointerTo(I))) == "ppi");
  CHECK(mangleType(Unit.arrayOf(I, 3)) == "a3i");
  CHECK(mangleType(Unit.pointerTo(Unit.arrayOf(I, 7))) == "pa7i");
}

TEST_CASE("USR injectivity over distinct signatures") {
  auto Unit = parseOk("int a(); int b(int x); int c(int *p); int d(int x, int y);");
  std::set<std::string> Usrs;
  std::size_t Named = 0;
  for (const FunctionDecl *F : Unit->Functions) {
    if (F->Builtin)
      continue;
    Usrs.insert(F->Usr);
    ++Named;
  }
  CHECK(Usrs.size() == Named);
}

static const char *RoundTripSource =
    "struct P { int x, y; };\n"
    "int g_counter;\n"
    "int helper(int v);\n"
    "int helper(int v) {\n"
    "  struct P p;\n"
    "  p.x = v;\n"
    "  int arr[4];\n"
    "  arr[1] = p.x * 2;\n"
    "  while (v > 0) {\n"
    "    v = v - 1;\n"
    "  }\n"
    "  if (v == 0 && arr[1] > 3) {\n"
    "    return arr[1];\n"
    "  }\n"
    "  return 0;\n"
    "}\n";

TEST_CASE("AST serialization round trip") {
  auto Unit = parseOk(RoundTripSource, "round.mc");
  std::string Bytes = serializeAst(*Unit);

  DeserializeResult DR = deserializeAst(Bytes);
  REQUIRE(DR.ok());
  CHECK(astEquals(*Unit, *DR.Unit));

  SUBCASE("re-serialization is byte stable") {
    CHECK(serializeAst(*DR.Unit) == Bytes);
  }
  SUBCASE("two parses of the same file serialize identically") {
    auto Unit2 = parseOk(RoundTripSource, "round.mc");
    CHECK(serializeAst(*Unit2) == Bytes);
  }
  SUBCASE("truncation is an error") {
    for (std::size_t Cut : {std::size_t(3), Bytes.size() / 2, Bytes.size() - 1}) {
      DeserializeResult Bad = deserializeAst(Bytes.substr(0, Cut));
      CHECK(!Bad.ok());
      CHECK(!Bad.Error.empty());
    }
  }
  SUBCASE("version mismatch is an error") {
    std::string Bad = Bytes;
    Bad[3] = '9';
    CHECK(!deserializeAst(Bad).ok());
  }
}

TEST_CASE("every expression in a checked unit carries a type") {
  auto Unit = parseOk(RoundTripSource, "typed.mc");
  std::function<void(const Expr *)> CheckE = [&](const Expr *E) {
    if (!E)
      return;
    REQUIRE(E->Ty != nullptr);
    CHECK(!E->Ty->isVoid());
    CheckE(E->Lhs);
    CheckE(E->Rhs);
    CheckE(E->Operand);
    CheckE(E->Base);
    CheckE(E->IndexExpr);
    for (const Expr *A : E->Args)
      CheckE(A);
  };
  std::function<void(const Stmt *)> CheckS = [&](const Stmt *S) {
    if (!S)
      return;
    for (const Stmt *C : S->Body)
      CheckS(C);
    CheckS(S->Then);
    CheckS(S->Else);
    CheckS(S->LoopBody);
    CheckE(S->Cond);
    CheckE(S->Value);
    if (S->Var)
      CheckE(S->Var->Init);
  };
  for (const FunctionDecl *F : Unit->Functions)
    if (F->hasBody())
      CheckS(F->Body);
}

TEST_CASE("void calls are statements only") {
  auto Ok = parseOk("void v(); int f(){ v(); return 0; }");
  CHECK(Ok->findFunction("v") != nullptr);
  ParseResult Bad =
      parseTranslationUnit("void v(); int f(){ return v() + 1; }", "t.mc");
  CHECK(!Bad.ok());
}

TEST_CASE("null pointer constants take the pointer type") {
  auto Unit = parseOk("int f(int *p){ if (p == 0) return 0; int *q = 0; "
                      "return q == p; }");
  const FunctionDecl *F = Unit->findFunction("f");
  const Stmt *IfS = F->Body->Body[0];
  CHECK(IfS->Cond->Rhs->Ty->isPointer());
  const Stmt *Decl = F->Body->Body[1];
  CHECK(Decl->Var->Init->Ty->isPointer());
}

TEST_CASE("source locations are 1-based and accurate") {
  auto Unit = parseOk("int f() {\n  return 42;\n}\n");
  const FunctionDecl *F = Unit->findFunction("f");
  const Stmt *Ret = F->Body->Body[0];
  CHECK(Ret->Loc.Line == 2);
  CHECK(Ret->Loc.Col == 3);
  CHECK(Ret->Value->Loc.Line == 2);
  CHECK(Ret->Value->Loc.Col == 10);
}
