//===--- StateTests.cpp - Symbolic state, memory model, dead bindings ----------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Engine.hpp"
#include "TestUtil.hpp"

#include <doctest.h>

using namespace minisa;
using namespace minisa::test;

namespace {

// Shared fixture: a unit with a record and a function frame to hang regions
// off of.
struct StateFixture {
  std::unique_ptr<Ast> Unit;
  SymbolManager Syms;
  RegionManager Regions;
  FrameManager Frames;
  StateManager SM{Syms, Regions, 32};
  const FunctionDecl *Fn = nullptr;
  std::unique_ptr<Cfg> G;
  const FrameContext *Frame = nullptr;

  StateFixture() {
    Unit = parseOk("struct X { int a, b; };\n"
                   "int f(int p) {\n"
                   "  struct X x;\n"
                   "  int arr[8];\n"
                   "  return p;\n"
                   "}\n");
    Fn = Unit->findFunction("f");
    G = buildCfg(*Fn, *Unit);
    Frame = Frames.topFrame(Fn, G.get());
  }

  const VarDecl *var(const std::string &Name) {
    std::function<const VarDecl *(const Stmt *)> Find =
        [&](const Stmt *S) -> const VarDecl * {
      if (!S)
        return nullptr;
      if (S->Var && S->Var->Name == Name)
        return S->Var;
      for (const Stmt *C : S->Body)
        if (const VarDecl *V = Find(C))
          return V;
      return nullptr;
    };
    for (const VarDecl *P : Fn->Params)
      if (P->Name == Name)
        return P;
    return Find(Fn->Body);
  }

  const MemRegion *varRegion(const std::string &Name) {
    return Regions.varRegion(var(Name), Regions.stackSpace(Frame->Id));
  }
};

} // namespace

TEST_CASE("environment bind and lookup laws") {
  StateFixture F;
  SymbolicState St;
  St.Frame = F.Frame;
  const Expr *E = F.Fn->Body->Body.back()->Value; // `p` in return p
  CHECK(F.SM.lookupExpr(St, E, F.Frame).isUnknown());

  SVal V = SVal::concrete(7);
  SymbolicState St2 = F.SM.bindExpr(St, E, F.Frame, V);
  CHECK(F.SM.lookupExpr(St2, E, F.Frame) == V);
  CHECK(F.SM.lookupExpr(St, E, F.Frame).isUnknown()); // old state untouched

  SymbolicState St3 = F.SM.bindExpr(St2, E, F.Frame, SVal::concrete(9));
  CHECK(F.SM.lookupExpr(St3, E, F.Frame) == SVal::concrete(9));
}

TEST_CASE("store lookups follow the default-binding rules") {
  StateFixture F;
  SymbolicState St;
  St.Frame = F.Frame;

  SUBCASE("a stored concrete value reads back") {
    const MemRegion *X = F.varRegion("x");
    const MemRegion *A = F.Regions.fieldRegion(&F.var("x")->Ty->Record->Fields[0], X);
    SymbolicState St2 = F.SM.bindLoc(St, A, SVal::concrete(42));
    CHECK(F.SM.lookupLoc(St2, A, nullptr) == SVal::concrete(42));
  }
  SUBCASE("uninitialized locals read Undefined") {
    CHECK(F.SM.lookupLoc(St, F.varRegion("arr"), nullptr).isUndef());
    const MemRegion *Elem =
        F.Regions.elementRegion(SVal::concrete(3), F.varRegion("arr"));
    CHECK(F.SM.lookupLoc(St, Elem, nullptr).isUndef());
  }
  SUBCASE("globals and heap read fresh RegionValue symbols, deterministically") {
    auto GUnit = parseOk("int g_var;\nint f(){ return g_var; }");
    const VarDecl *GV = GUnit->findGlobal("g_var");
    const MemRegion *GR = F.Regions.varRegion(GV, F.Regions.globalSpace());
    SVal V1 = F.SM.lookupLoc(St, GR, GV->Ty);
    SVal V2 = F.SM.lookupLoc(St, GR, GV->Ty);
    REQUIRE(V1.symbol() != nullptr);
    CHECK(V1 == V2);
    CHECK(V1.symbol()->Kind == SymbolKind::RegionValue);
  }
}

TEST_CASE("base_region walks to the child of the memory space") {
  StateFixture F;
  const MemRegion *A = F.varRegion("arr");
  const MemRegion *E1 = F.Regions.elementRegion(SVal::concrete(1), A);
  const RecordDecl *X = F.Unit->findRecord("X");
  const MemRegion *Field = F.Regions.fieldRegion(&X->Fields[0], E1);

  CHECK(Field->baseRegion() == A);      // a[1].f -> a
  CHECK(A->baseRegion() == A);          // already a base region
  const MemRegion *XR = F.varRegion("x");
  const MemRegion *XB = F.Regions.fieldRegion(&X->Fields[1], XR);
  CHECK(XB->baseRegion() == XR);        // one hop
  CHECK(Field->baseRegion()->baseRegion() == A); // idempotent
}

TEST_CASE("regions are interned: structural equality is identity") {
  StateFixture F;
  const MemRegion *A1 = F.varRegion("arr");
  const MemRegion *A2 = F.varRegion("arr");
  CHECK(A1 == A2);
  const MemRegion *E1 = F.Regions.elementRegion(SVal::concrete(5), A1);
  const MemRegion *E2 = F.Regions.elementRegion(SVal::concrete(5), A2);
  CHECK(E1 == E2);
  CHECK(F.Regions.elementRegion(SVal::concrete(6), A1) != E1);
}

TEST_CASE("invalidation erases exactly the escaped subtree") {
  StateFixture F;
  const RecordDecl *X = F.Unit->findRecord("X");
  const MemRegion *XR = F.varRegion("x");
  const MemRegion *FA = F.Regions.fieldRegion(&X->Fields[0], XR);
  const MemRegion *FB = F.Regions.fieldRegion(&X->Fields[1], XR);

  SymbolicState St;
  St.Frame = F.Frame;
  St = F.SM.bindLoc(St, FA, SVal::concrete(0));
  St = F.SM.bindLoc(St, FB, SVal::concrete(2));

  SUBCASE("escaping &x.a leaves x.b alone") {
    SymbolicState After = F.SM.invalidate(St, {FA}, 100, nullptr);
    SVal NewA = F.SM.lookupLoc(After, FA, nullptr);
    CHECK(NewA.symbol() != nullptr); // fresh unconstrained symbol
    CHECK(F.SM.lookupLoc(After, FB, nullptr) == SVal::concrete(2));
  }
  SUBCASE("escaping &x clobbers both fields") {
    SymbolicState After = F.SM.invalidate(St, {XR}, 101, nullptr);
    SVal NewA = F.SM.lookupLoc(After, FA, nullptr);
    SVal NewB = F.SM.lookupLoc(After, FB, nullptr);
    REQUIRE(NewA.symbol() != nullptr);
    REQUIRE(NewB.symbol() != nullptr);
    CHECK(NewA != NewB); // distinct fresh symbols per field
    // Re-reading materializes the same symbol.
    CHECK(F.SM.lookupLoc(After, FA, nullptr) == NewA);
  }
  SUBCASE("empty region set is the identity") {
    SymbolicState After = F.SM.invalidate(St, {}, 102, nullptr);
    CHECK(After == St);
  }
  SUBCASE("invalidation is idempotent up to symbol renaming") {
    SymbolicState Once = F.SM.invalidate(St, {XR}, 103, nullptr);
    SymbolicState Twice = F.SM.invalidate(Once, {XR}, 103, nullptr);
    CHECK(Once.Store.size() == Twice.Store.size());
    CHECK(Once.Defaults.size() == Twice.Defaults.size());
    const SVal *D1 = Once.Defaults.find(XR);
    const SVal *D2 = Twice.Defaults.find(XR);
    REQUIRE(D1 != nullptr);
    REQUIRE(D2 != nullptr);
    CHECK(D1->symbol()->Site == D2->symbol()->Site);
    CHECK(D1->symbol() != D2->symbol()); // renamed, same shape
  }
}

TEST_CASE("state equality and hashing are content based") {
  StateFixture F;
  const MemRegion *A = F.varRegion("arr");
  SymbolicState S1, S2;
  S1.Frame = S2.Frame = F.Frame;
  S1 = F.SM.bindLoc(S1, A, SVal::concrete(1));
  S2 = F.SM.bindLoc(S2, A, SVal::concrete(1));
  CHECK(S1 == S2);
  CHECK(S1.hash() == S2.hash());
  SymbolicState S3 = F.SM.bindLoc(S1, A, SVal::concrete(2));
  CHECK(!(S3 == S1));
}

TEST_CASE("structural sharing keeps updates logarithmic") {
  StateFixture F;
  const MemRegion *A = F.varRegion("arr");
  SymbolicState St;
  St.Frame = F.Frame;
  for (int I = 0; I < 1000; ++I)
    St = F.SM.bindLoc(
        St, F.Regions.elementRegion(SVal::concrete(I), A), SVal::concrete(I));

  std::uint64_t Before = ImmutableMapNodeAllocations.load();
  SymbolicState St2 = F.SM.bindLoc(
      St, F.Regions.elementRegion(SVal::concrete(500), A), SVal::concrete(-1));
  std::uint64_t OneUpdate = ImmutableMapNodeAllocations.load() - Before;
  CHECK(OneUpdate >= 1);
  CHECK(OneUpdate <= 2 * 11 + 4); // path copy of an AVL of 1000 entries

  // The old state is untouched and shares everything else.
  CHECK(F.SM.lookupLoc(St, F.Regions.elementRegion(SVal::concrete(500), A),
                       nullptr) == SVal::concrete(500));
  CHECK(F.SM.lookupLoc(St2, F.Regions.elementRegion(SVal::concrete(500), A),
                       nullptr) == SVal::concrete(-1));
}

TEST_CASE("dead-binding removal drops dead constraints, keeps live lookups") {
  // Mirrors the exploded-graph narrative: once x is overwritten with 42, the
  // initial-value symbol $x loses its last reference and its constraint goes.
  StateFixture F;
  const MemRegion *P = F.varRegion("p");
  const MemRegion *Arr = F.varRegion("arr");

  SymbolicState St;
  St.Frame = F.Frame;
  const Symbol *SymP = F.Syms.regionValue(P, SymType::Int);
  St = F.SM.bindLoc(St, P, SVal::sym(SymP));
  St = F.SM.setRange(St, SymP, RangeSet::point(32, 5));
  St = F.SM.bindLoc(St, Arr, SVal::concrete(1));

  std::set<const VarDecl *> Live{F.var("p"), F.var("arr")};
  auto LiveOf = [&](const FrameContext *) { return &Live; };

  SUBCASE("nothing dead leaves the state unchanged") {
    auto RR = F.SM.removeDeadBindings(St, LiveOf, {});
    CHECK(RR.State == St);
    CHECK(RR.DeadSymbols.empty());
  }
  SUBCASE("overwriting drops the old symbol's constraint") {
    SymbolicState St2 = F.SM.bindLoc(St, P, SVal::concrete(42));
    auto RR = F.SM.removeDeadBindings(St2, LiveOf, {});
    CHECK(RR.State.Constraints.size() == 0);
    CHECK(F.SM.lookupLoc(RR.State, P, nullptr) == SVal::concrete(42));
  }
  SUBCASE("a dead variable's bindings are removed") {
    std::set<const VarDecl *> OnlyArr{F.var("arr")};
    auto LiveOf2 = [&](const FrameContext *) { return &OnlyArr; };
    auto RR = F.SM.removeDeadBindings(St, LiveOf2, {});
    CHECK(RR.State.Store.find(P) == nullptr);
    CHECK(F.SM.lookupLoc(RR.State, Arr, nullptr) == SVal::concrete(1));
  }
  SUBCASE("dead GDM symbols are reported to checkers") {
    SymbolicState St2 = St;
    const Symbol *M = F.Syms.conjure(55, SymType::Ptr);
    St2.Gdm = St2.Gdm.insert({1, M}, {0, SourceLoc{0, 3, 1}});
    auto RR = F.SM.removeDeadBindings(St2, LiveOf, {});
    REQUIRE(RR.DeadSymbols.size() == 1);
    CHECK(RR.DeadSymbols[0] == M);
  }
}

TEST_CASE("lazy element regions: one write to a large array makes one region") {
  auto Unit = parseOk("void f() {\n"
                      "  int a[1000000];\n"
                      "  a[5] = 1;\n"
                      "}\n");
  AnalysisOptions Opts;
  TuAnalysisResult R = analyzeTu(*Unit, Opts);
  CHECK(R.Stats.get("mem_element_regions") == 1);
}
