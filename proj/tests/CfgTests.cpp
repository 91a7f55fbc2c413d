//===--- CfgTests.cpp - CFG construction and top-level ordering ----------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/CallGraph.hpp"
#include "TestUtil.hpp"

#include <doctest.h>

#include <random>

using namespace minisa;
using namespace minisa::test;

namespace {

std::size_t countViolations(const CallGraph &CG,
                            const std::vector<std::string> &Order) {
  std::map<std::string, std::size_t> Pos;
  for (std::size_t I = 0; I < Order.size(); ++I)
    Pos[Order[I]] = I;
  std::size_t Bad = 0;
  for (const auto &[Caller, Callees] : CG.Edges)
    for (const std::string &Callee : Callees) {
      if (Caller == Callee)
        continue;
      if (Pos.at(Callee) < Pos.at(Caller)) // callee placed before its caller
        ++Bad;
    }
  return Bad;
}

} // namespace

TEST_CASE("collatz function CFG shape") {
  auto Unit = parseOk("int collatz(int x) {\n"
                      "  int num = 0;\n"
                      "  while (x > 1) {\n"
                      "    if (x % 2) {\n"
                      "      x = 3 * x + 1;\n"
                      "    } else {\n"
                      "      x = x / 2;\n"
                      "    }\n"
                      "    num = num + 1;\n"
                      "  }\n"
                      "  return num;\n"
                      "}\n");
  auto G = buildCfg(*Unit->findFunction("collatz"), *Unit);

  // One loop head with a back edge, one if-branch inside the loop, and the
  // return after the loop.
  std::size_t LoopHeads = 0, Branches = 0, Returns = 0, BackEdges = 0;
  std::uint32_t Head = 0;
  for (const CfgBlock &B : G->Blocks) {
    if (B.IsLoopHead) {
      ++LoopHeads;
      Head = B.Id;
      REQUIRE(B.LoopStmt != nullptr);
      CHECK(B.LoopStmt->Kind == StmtKind::While);
    }
    if (B.Id != G->Exit && B.Term.K == CfgTerminator::Kind::Branch)
      ++Branches;
    if (B.Id != G->Exit && B.Term.K == CfgTerminator::Kind::Return)
      ++Returns;
  }
  for (const CfgBlock &B : G->Blocks)
    if (B.Id != G->Exit && B.Id > Head)
      for (std::uint32_t I = 0; I < B.Term.succCount(); ++I)
        BackEdges += B.Term.Succs[I] == Head;
  CHECK(LoopHeads == 1);
  CHECK(Branches == 2); // while condition + if condition
  CHECK(Returns == 1);
  CHECK(BackEdges == 1);

  // Statement order within the join block is preserved: `num = num + 1` is
  // the block with the back edge.
  bool FoundJoin = false;
  for (const CfgBlock &B : G->Blocks)
    if (B.Id != G->Exit && B.Term.K == CfgTerminator::Kind::Goto &&
        B.Term.Succs[0] == Head && !B.Stmts.empty())
      FoundJoin = true;
  CHECK(FoundJoin);
}

TEST_CASE("straight-line body is entry -> block -> exit") {
  auto Unit = parseOk("int f() { return 0; }");
  auto G = buildCfg(*Unit->findFunction("f"), *Unit);
  REQUIRE(G->Blocks.size() == 3);
  const CfgBlock &Entry = G->block(G->Entry);
  CHECK(Entry.Term.Succs[0] != G->Exit);
  const CfgBlock &Mid = G->block(Entry.Term.Succs[0]);
  CHECK(Mid.Term.K == CfgTerminator::Kind::Return);
  CHECK(Mid.Term.Succs[0] == G->Exit);
}

TEST_CASE("every block is reachable and branch terminators have two succs") {
  auto Unit = parseOk("int f(int a, int b) {\n"
                      "  if (a && b) { a = 1; }\n"
                      "  while (a > 0) { a = a - 1; if (b) { return a; } }\n"
                      "  return 7;\n"
                      "  a = 9;\n" // unreachable, must be pruned
                      "}\n");
  auto G = buildCfg(*Unit->findFunction("f"), *Unit);
  std::set<std::uint32_t> Reached{G->Entry};
  std::vector<std::uint32_t> Work{G->Entry};
  while (!Work.empty()) {
    std::uint32_t B = Work.back();
    Work.pop_back();
    if (B == G->Exit)
      continue;
    const CfgTerminator &T = G->block(B).Term;
    for (std::uint32_t I = 0; I < T.succCount(); ++I)
      if (Reached.insert(T.Succs[I]).second)
        Work.push_back(T.Succs[I]);
  }
  CHECK(Reached.size() == G->Blocks.size());
  for (const CfgBlock &B : G->Blocks)
    for (const Stmt *S : B.Stmts)
      CHECK(printStmt(S) != "a = 9");
}

TEST_CASE("short-circuit lowering matches direct interpretation") {
  // `if (a && b) s;` must execute s exactly when both are truthy, with b
  // evaluated only when a holds. Enumerate all four boolean inputs.
  auto Unit = parseOk("int f(int a, int b) {\n"
                      "  int s = 0;\n"
                      "  if (a && b) { s = 1; }\n"
                      "  return s;\n"
                      "}\n");
  const FunctionDecl *F = Unit->findFunction("f");
  auto G = buildCfg(*F, *Unit);
  for (std::int64_t A : {0, 1})
    for (std::int64_t B : {0, 1}) {
      ConcreteResult FromAst = interpretAst(F, {A, B});
      ConcreteResult FromCfg = interpretCfg(*G, {A, B});
      REQUIRE(FromAst.Ret.has_value());
      REQUIRE(FromCfg.Ret.has_value());
      CHECK(*FromAst.Ret == (A && B ? 1 : 0));
      CHECK(*FromAst.Ret == *FromCfg.Ret);
      CHECK(FromAst.Executed == FromCfg.Executed);
    }
}

TEST_CASE("CFG semantics equals AST semantics on a 5-bit grid") {
  auto Unit = parseOk("int f(int a, int b) {\n"
                      "  int r = 0;\n"
                      "  if (a > b || a == 3) { r = a - b; }\n"
                      "  else { if (!(b % 7)) { r = b * 2; } }\n"
                      "  if (a >= 0 && b != 4) { r = r + 1; }\n"
                      "  return r;\n"
                      "}\n");
  const FunctionDecl *F = Unit->findFunction("f");
  auto G = buildCfg(*F, *Unit);
  for (std::int64_t A = -16; A < 16; ++A)
    for (std::int64_t B = -16; B < 16; ++B) {
      ConcreteResult FromAst = interpretAst(F, {A, B});
      ConcreteResult FromCfg = interpretCfg(*G, {A, B});
      REQUIRE(FromAst.Ret.has_value());
      REQUIRE(FromCfg.Ret.has_value());
      CHECK(*FromAst.Ret == *FromCfg.Ret);
      CHECK(FromAst.Executed == FromCfg.Executed);
    }
}

TEST_CASE("abort ends its block with a no-return edge") {
  auto Unit = parseOk("int f(int x) { if (x) { abort(); } return 1; }");
  auto G = buildCfg(*Unit->findFunction("f"), *Unit);
  bool Found = false;
  for (const CfgBlock &B : G->Blocks)
    if (B.Id != G->Exit && B.Term.K == CfgTerminator::Kind::NoReturn) {
      Found = true;
      CHECK(B.Term.Succs[0] == G->Exit);
    }
  CHECK(Found);
}

TEST_CASE("top-level order puts callers before callees") {
  auto Unit = parseOk("int f(int x) { return x; }\n"
                      "int g() { return f(3); }\n");
  CallGraph CG = buildCallGraph(*Unit);
  CHECK(topLevelOrder(CG) == std::vector<std::string>{"F:g#", "F:f#i"});
}

TEST_CASE("top-level order ties break lexicographically") {
  CallGraph CG;
  CG.addNode("F:a#");
  CG.addNode("F:b#");
  CG.addNode("F:c#");
  CHECK(topLevelOrder(CG) ==
        std::vector<std::string>{"F:a#", "F:b#", "F:c#"});
}

TEST_CASE("two-cycle orders lexicographically") {
  CallGraph CG;
  CG.addNode("F:f#");
  CG.addNode("F:g#");
  CG.addEdge("F:f#", "F:g#");
  CG.addEdge("F:g#", "F:f#");
  CHECK(topLevelOrder(CG) == std::vector<std::string>{"F:f#", "F:g#"});
}

TEST_CASE("ordering violates no edges on random DAGs") {
  std::mt19937 Rng(7);
  for (int Iter = 0; Iter < 200; ++Iter) {
    CallGraph CG;
    unsigned N = 2 + Rng() % 8;
    std::vector<std::string> Names;
    for (unsigned I = 0; I < N; ++I) {
      Names.push_back("F:n" + std::to_string(I) + "#");
      CG.addNode(Names.back());
    }
    // Edges only from lower to higher index: acyclic by construction.
    for (unsigned A = 0; A < N; ++A)
      for (unsigned B = A + 1; B < N; ++B)
        if (Rng() % 3 == 0)
          CG.addEdge(Names[A], Names[B]);
    std::vector<std::string> Order = topLevelOrder(CG);
    CHECK(countViolations(CG, Order) == 0);
  }
}

TEST_CASE("ordering beats its own reverse on random cyclic graphs") {
  std::mt19937 Rng(11);
  for (int Iter = 0; Iter < 200; ++Iter) {
    CallGraph CG;
    unsigned N = 2 + Rng() % 7;
    std::vector<std::string> Names;
    for (unsigned I = 0; I < N; ++I) {
      Names.push_back("F:c" + std::to_string(I) + "#");
      CG.addNode(Names.back());
    }
    for (unsigned A = 0; A < N; ++A)
      for (unsigned B = 0; B < N; ++B)
        if (A != B && Rng() % 4 == 0)
          CG.addEdge(Names[A], Names[B]);
    std::vector<std::string> Order = topLevelOrder(CG);
    std::vector<std::string> Reversed(Order.rbegin(), Order.rend());
    CHECK(countViolations(CG, Order) <= countViolations(CG, Reversed));
  }
}

TEST_CASE("cfg dump is one block per line") {
  auto Unit = parseOk("int f(int x) { if (x) { return 1; } return 2; }");
  auto G = buildCfg(*Unit->findFunction("f"), *Unit);
  std::string Dump = dumpCfg(*G);
  CHECK(Dump.find("B0 (ENTRY)") != std::string::npos);
  CHECK(Dump.find("(EXIT)") != std::string::npos);
  CHECK(Dump.find("if x") != std::string::npos);
  CHECK(std::count(Dump.begin(), Dump.end(), '\n') ==
        std::ptrdiff_t(G->Blocks.size()));
}
