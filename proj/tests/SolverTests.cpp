//===--- SolverTests.cpp - Range sets and the assume machinery -----------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "TestUtil.hpp"

#include <doctest.h>

#include <bitset>
#include <random>

using namespace minisa;
using namespace minisa::test;

namespace {

constexpr std::int64_t IMin32 = -2147483648LL;
constexpr std::int64_t IMax32 = 2147483647LL;

// 8-bit range sets as 256-bit masks: the independent model for the set
// algebra.
using Mask = std::bitset<256>;

Mask maskOf(const RangeSet &RS) {
  Mask M;
  for (int V = -128; V <= 127; ++V)
    if (RS.contains(V))
      M.set(std::size_t(V + 128));
  return M;
}

RangeSet randomRangeSet(std::mt19937 &Rng) {
  RangeSet RS = RangeSet::empty(8);
  unsigned N = Rng() % 4;
  for (unsigned I = 0; I < N; ++I) {
    std::int64_t A = std::int64_t(Rng() % 256) - 128;
    std::int64_t B = std::int64_t(Rng() % 256) - 128;
    RS = RS.unionWith(RangeSet::range(8, std::min(A, B), std::max(A, B)));
  }
  return RS;
}

struct SolverFixture {
  SymbolManager Syms;
  RegionManager Regions;
  StateManager SM;
  explicit SolverFixture(unsigned Width = 32) : SM(Syms, Regions, Width) {}

  const Symbol *freshInt(std::uint32_t Site) {
    return Syms.conjure(Site, SymType::Int);
  }
  const Symbol *freshPtr(std::uint32_t Site) {
    return Syms.conjure(Site, SymType::Ptr);
  }
};

} // namespace

TEST_CASE("range set algebra on the paper's constraint shapes") {
  RangeSet NonZero = RangeSet::point(32, 0).complement();
  REQUIRE(NonZero.intervals().size() == 2);
  CHECK(NonZero.intervals()[0] == RangeSet::Interval{IMin32, -1});
  CHECK(NonZero.intervals()[1] == RangeSet::Interval{1, IMax32});

  // The two branch constraints for $b are disjoint.
  CHECK(NonZero.intersectWith(RangeSet::point(32, 0)).isEmpty());

  // a ∪ complement(a) partitions the domain.
  RangeSet A = RangeSet::range(32, -5, 10).unionWith(RangeSet::point(32, 99));
  CHECK(A.unionWith(A.complement()).isFull());
  CHECK(A.intersectWith(A.complement()).isEmpty());
}

TEST_CASE("adjacent intervals merge and gaps stay >= 2") {
  RangeSet A = RangeSet::range(8, 0, 4).unionWith(RangeSet::range(8, 5, 9));
  CHECK(A.intervals().size() == 1);
  CHECK(A.intervals()[0] == RangeSet::Interval{0, 9});
  RangeSet B = RangeSet::range(8, 0, 4).unionWith(RangeSet::range(8, 6, 9));
  CHECK(B.intervals().size() == 2);
}

TEST_CASE("range algebra agrees with bit-set semantics on 10000 random pairs") {
  std::mt19937 Rng(1234);
  for (int I = 0; I < 10000; ++I) {
    RangeSet A = randomRangeSet(Rng);
    RangeSet B = randomRangeSet(Rng);
    CHECK(maskOf(A.intersectWith(B)) == (maskOf(A) & maskOf(B)));
    CHECK(maskOf(A.unionWith(B)) == (maskOf(A) | maskOf(B)));
    CHECK(maskOf(A.complement()) == ~maskOf(A));
  }
}

TEST_CASE("wrapped shift and negation are exact") {
  RangeSet Low = RangeSet::range(8, -128, 5);
  RangeSet Shifted = Low.shiftWrapped(-1);
  Mask Expect;
  for (int V = -128; V <= 5; ++V)
    Expect.set(std::size_t(int(RangeSet::truncate(V - 1, 8)) + 128));
  CHECK(maskOf(Shifted) == Expect);

  RangeSet Neg = Low.negateWrapped();
  Mask ExpectNeg;
  for (int V = -128; V <= 5; ++V)
    ExpectNeg.set(std::size_t(int(RangeSet::truncate(-std::int64_t(V), 8)) + 128));
  CHECK(maskOf(Neg) == ExpectNeg);
}

TEST_CASE("assume splits a fresh symbol like the exploded-graph example") {
  SolverFixture F;
  const Symbol *B = F.freshInt(1);
  SymbolicState St;

  // if (b): the false branch pins $b to [0,0] ...
  auto False = assume(St, SVal::sym(B), false, F.SM);
  REQUIRE(False.State.has_value());
  CHECK(F.SM.rangeOf(*False.State, B).isPoint(0));

  // ... and the true branch keeps everything but zero.
  auto True = assume(St, SVal::sym(B), true, F.SM);
  REQUIRE(True.State.has_value());
  CHECK(F.SM.rangeOf(*True.State, B).str() ==
        "{ [-2147483648, -1], [1, 2147483647] }");
}

TEST_CASE("assume on a contradicting concrete value is infeasible") {
  SolverFixture F;
  SymbolicState St;
  auto Out = assume(St, SVal::concrete(3), false, F.SM);
  CHECK(!Out.State.has_value());
  auto Ok = assume(St, SVal::concrete(3), true, F.SM);
  CHECK(Ok.State.has_value());
}

TEST_CASE("the pointer-difference weakness is reproduced, not fixed") {
  SolverFixture F;
  const Symbol *A = F.freshPtr(1);
  const Symbol *B = F.freshPtr(2);
  SymbolicState St;

  // (a - b) == 0 assumed true.
  const Symbol *DiffAB = F.Syms.symSym(A, BinOp::Sub, B, SymType::Int);
  const Symbol *Cmp = F.Syms.symInt(DiffAB, BinOp::EQ, 0, false, SymType::Int);
  auto First = assume(St, SVal::sym(Cmp), true, F.SM);
  REQUIRE(First.State.has_value());
  CHECK(F.SM.rangeOf(*First.State, DiffAB).isPoint(0));

  // a != b assumed true: lands on the reversed difference, stays feasible.
  const Symbol *Neq = F.Syms.symSym(A, BinOp::NE, B, SymType::Int);
  auto Second = assume(*First.State, SVal::sym(Neq), true, F.SM);
  REQUIRE(Second.State.has_value());
  const Symbol *DiffBA = F.Syms.symSym(B, BinOp::Sub, A, SymType::Int);
  CHECK(F.SM.rangeOf(*Second.State, DiffAB).str() == "{ [0, 0] }");
  CHECK(F.SM.rangeOf(*Second.State, DiffBA).str() ==
        "{ [-2147483648, -1], [1, 2147483647] }");
}

TEST_CASE("linear rearrangements are exact in modular arithmetic") {
  SolverFixture F(8);
  const Symbol *X = F.freshInt(1);
  SymbolicState St;

  SUBCASE("x + 1 > 5 excludes the wraparound point") {
    const Symbol *Add = F.Syms.symInt(X, BinOp::Add, 1, false, SymType::Int);
    const Symbol *Cmp = F.Syms.symInt(Add, BinOp::GT, 5, false, SymType::Int);
    auto Out = assume(St, SVal::sym(Cmp), true, F.SM);
    REQUIRE(Out.State.has_value());
    CHECK(F.SM.rangeOf(*Out.State, X).str() == "{ [5, 126] }");
  }
  SUBCASE("3 - x == 0 pins x") {
    const Symbol *Sub = F.Syms.symInt(X, BinOp::Sub, 3, true, SymType::Int);
    const Symbol *Cmp = F.Syms.symInt(Sub, BinOp::EQ, 0, false, SymType::Int);
    auto Out = assume(St, SVal::sym(Cmp), true, F.SM);
    REQUIRE(Out.State.has_value());
    CHECK(F.SM.rangeOf(*Out.State, X).isPoint(3));
  }
}

TEST_CASE("unsupported forms degrade to a recorded no-op") {
  SolverFixture F;
  const Symbol *X = F.freshInt(1);
  const Symbol *Mul = F.Syms.symInt(X, BinOp::Mul, 3, false, SymType::Int);
  const Symbol *Cmp = F.Syms.symInt(Mul, BinOp::GT, 5, false, SymType::Int);
  SymbolicState St;
  auto Out = assume(St, SVal::sym(Cmp), true, F.SM);
  REQUIRE(Out.State.has_value());
  CHECK(Out.Unsupported);
  CHECK(Out.State->Constraints.size() == 0); // state returned unconstrained
}

TEST_CASE("can_be_value follows the constraint map") {
  SolverFixture F;
  const Symbol *B = F.freshInt(1);
  SymbolicState St;
  CHECK(canBeValue(St, SVal::sym(B), 0, F.SM)); // fresh symbol: full range

  SymbolicState Zero = F.SM.setRange(St, B, RangeSet::point(32, 0));
  CHECK(canBeValue(Zero, SVal::sym(B), 0, F.SM));
  CHECK(!canBeValue(Zero, SVal::sym(B), 1, F.SM));

  SymbolicState Pos = F.SM.setRange(St, B, RangeSet::range(32, 1, IMax32));
  CHECK(!canBeValue(Pos, SVal::sym(B), 0, F.SM));
}

namespace {

// Random supported assumptions over up to MaxSyms base symbols at 8 bits.
struct AssumptionGen {
  SolverFixture &F;
  std::mt19937 &Rng;
  std::vector<const Symbol *> Bases;

  AssumptionGen(SolverFixture &F, std::mt19937 &Rng, unsigned NumSyms)
      : F(F), Rng(Rng) {
    for (unsigned I = 0; I < NumSyms; ++I)
      Bases.push_back(F.freshInt(I + 1));
  }

  std::int32_t smallConst() { return std::int32_t(Rng() % 16) - 8; }
  const Symbol *base() { return Bases[Rng() % Bases.size()]; }
  BinOp relOp() {
    static const BinOp Ops[] = {BinOp::EQ, BinOp::NE, BinOp::LT,
                                BinOp::LE, BinOp::GT, BinOp::GE};
    return Ops[Rng() % 6];
  }

  std::pair<SVal, bool> next() {
    bool Truth = Rng() % 2 == 0;
    switch (Rng() % 5) {
    case 0: // s ⋈ c
      return {SVal::sym(F.Syms.symInt(base(), relOp(), smallConst(), false,
                                      SymType::Int)),
              Truth};
    case 1: { // (s + c') ⋈ c  or  (c' - s) ⋈ c
      const Symbol *Lin =
          Rng() % 2 == 0
              ? F.Syms.symInt(base(), BinOp::Add, smallConst(), false,
                              SymType::Int)
              : F.Syms.symInt(base(), BinOp::Sub, smallConst(), true,
                              SymType::Int);
      return {SVal::sym(F.Syms.symInt(Lin, relOp(), smallConst(), false,
                                      SymType::Int)),
              Truth};
    }
    case 2: { // s1 ⋈ s2
      const Symbol *L = base(), *R = base();
      return {SVal::sym(F.Syms.symSym(L, relOp(), R, SymType::Int)), Truth};
    }
    case 3: { // (s1 - s2) ⋈ c
      const Symbol *L = base(), *R = base();
      const Symbol *Diff = F.Syms.symSym(L, BinOp::Sub, R, SymType::Int);
      return {SVal::sym(F.Syms.symInt(Diff, relOp(), smallConst(), false,
                                      SymType::Int)),
              Truth};
    }
    default: // truth test on the symbol itself
      return {SVal::sym(base()), Truth};
    }
  }
};

void runSoundnessRounds(int Rounds, unsigned Seed, int &Infeasibles) {
  std::mt19937 Rng(Seed);
  for (int Round = 0; Round < Rounds; ++Round) {
    SolverFixture F(8);
    unsigned NumSyms = 1 + Rng() % 3;
    AssumptionGen Gen(F, Rng, NumSyms);
    unsigned Len = 1 + Rng() % 6;

    SymbolicState St;
    std::vector<std::pair<SVal, bool>> Applied;
    for (unsigned I = 0; I < Len; ++I) {
      auto [V, Truth] = Gen.next();
      Applied.push_back({V, Truth});
      auto Out = assume(St, V, Truth, F.SM);
      if (!Out.State) {
        ++Infeasibles;
        // Soundness: the oracle must agree that no assignment satisfies the
        // sequence taken so far.
        bool Sat = oracleSatisfiable(Applied, Gen.Bases, 8);
        REQUIRE_MESSAGE(!Sat, "assume() declared a satisfiable path infeasible"
                              " (round " << Round << ")");
        break;
      }
      // Monotonicity: constraints only narrow.
      for (const Symbol *B : Gen.Bases) {
        RangeSet Prior = F.SM.rangeOf(St, B);
        RangeSet Now = F.SM.rangeOf(*Out.State, B);
        CHECK(Now.intersectWith(Prior) == Now);
      }
      St = *Out.State;
    }
  }
}

} // namespace

TEST_CASE("assume never prunes a satisfiable path (2000 random sequences)") {
  int Infeasibles = 0;
  runSoundnessRounds(2000, 99, Infeasibles);
  // The generator must actually exercise the interesting outcome.
  CHECK(Infeasibles > 100);
}
