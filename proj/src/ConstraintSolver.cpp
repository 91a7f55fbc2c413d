//===--- ConstraintSolver.cpp - Range-based assume -----------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/ConstraintSolver.hpp"

namespace minisa {

namespace {

BinOp negateRel(BinOp Op) {
  switch (Op) {
  case BinOp::EQ: return BinOp::NE;
  case BinOp::NE: return BinOp::EQ;
  case BinOp::LT: return BinOp::GE;
  case BinOp::LE: return BinOp::GT;
  case BinOp::GT: return BinOp::LE;
  case BinOp::GE: return BinOp::LT;
  default: return Op;
  }
}

BinOp mirrorRel(BinOp Op) {
  switch (Op) {
  case BinOp::LT: return BinOp::GT;
  case BinOp::LE: return BinOp::GE;
  case BinOp::GT: return BinOp::LT;
  case BinOp::GE: return BinOp::LE;
  default: return Op; // ==, != are symmetric
  }
}

/// Solution set of `x ⋈ C` over the signed domain.
RangeSet relRange(BinOp Op, std::int64_t C, unsigned Width) {
  std::int64_t Min = RangeSet::minValue(Width);
  std::int64_t Max = RangeSet::maxValue(Width);
  switch (Op) {
  case BinOp::EQ:
    return RangeSet::point(Width, C);
  case BinOp::NE:
    return RangeSet::point(Width, C).complement();
  case BinOp::LT:
    return RangeSet::range(Width, Min, C - 1);
  case BinOp::LE:
    return RangeSet::range(Width, Min, C);
  case BinOp::GT:
    return RangeSet::range(Width, C + 1, Max);
  case BinOp::GE:
    return RangeSet::range(Width, C, Max);
  default:
    return RangeSet::full(Width);
  }
}

struct Solver {
  StateManager &SM;
  bool Unsupported = false;

  std::optional<SymbolicState> intersect(const SymbolicState &St,
                                         const Symbol *S, const RangeSet &RS) {
    RangeSet Cur = SM.rangeOf(St, S);
    RangeSet Next = Cur.intersectWith(RS);
    if (Next.isEmpty())
      return std::nullopt;
    if (Next == Cur)
      return St;
    return SM.setRange(St, S, std::move(Next));
  }

  /// Require the value of S to lie in Target. Linear SymIntExpr layers are
  /// peeled off exactly in modular arithmetic; everything else lands as a
  /// range on the symbol itself or degrades to a no-op.
  std::optional<SymbolicState> constrainRange(const SymbolicState &St,
                                              const Symbol *S,
                                              const RangeSet &Target) {
    if (S->Kind == SymbolKind::SymInt) {
      if (isComparisonOp(S->Op)) {
        // The comparison evaluates to 0 or 1; see which survive Target.
        bool T1 = Target.contains(1);
        bool T0 = Target.contains(0);
        if (T1 && T0)
          return St;
        if (!T1 && !T0)
          return std::nullopt;
        BinOp Inner = T1 ? S->Op : negateRel(S->Op);
        if (S->ConstOnLeft)
          Inner = mirrorRel(Inner); // k ⋈ inner  ==  inner mirrored-⋈ k
        return constrainRange(St, S->Lhs,
                              relRange(Inner, S->Konst, SM.Width));
      }
      switch (S->Op) {
      case BinOp::Add: // inner + k ∈ Target
        return constrainRange(St, S->Lhs,
                              Target.shiftWrapped(-std::int64_t(S->Konst)));
      case BinOp::Sub:
        if (S->ConstOnLeft) // k - inner ∈ Target => inner ∈ k - Target
          return constrainRange(
              St, S->Lhs, Target.negateWrapped().shiftWrapped(S->Konst));
        return constrainRange(St, S->Lhs, Target.shiftWrapped(S->Konst));
      default:
        // Multiplication, division, modulo: beyond the range solver.
        Unsupported = true;
        return St;
      }
    }
    if (S->Kind == SymbolKind::SymSym && isComparisonOp(S->Op)) {
      bool T1 = Target.contains(1);
      bool T0 = Target.contains(0);
      if (T1 && T0)
        return St;
      if (!T1 && !T0)
        return std::nullopt;
      return assumeSymSymRel(St, S, T1);
    }
    // Base symbols and opaque arithmetic expressions (e.g. a pointer
    // difference): the range lands on the symbol itself.
    return intersect(St, S, Target);
  }

  /// Assume the sym-sym comparison `L ⋈ R` has the given truth value.
  std::optional<SymbolicState> assumeSymSymRel(const SymbolicState &St,
                                               const Symbol *Cmp, bool Truth) {
    BinOp Op = Truth ? Cmp->Op : negateRel(Cmp->Op);
    if (Op == BinOp::EQ || Op == BinOp::NE) {
      // x ⋈ y becomes (y - x) ⋈ 0, which is wraparound-safe for equality.
      // The reversed difference is a distinct symbol; no derivation links
      // the two directions.
      const Symbol *Diff =
          SM.Syms.symSym(Cmp->Rhs, BinOp::Sub, Cmp->Lhs, SymType::Int);
      return intersect(St, Diff, relRange(Op, 0, SM.Width));
    }
    // Ordered sym-sym comparisons are not decomposed into differences (that
    // rearrangement is wrong under wraparound); the comparison expression
    // itself is constrained, and it only takes the values 0 and 1.
    return intersect(St, Cmp,
                     Truth ? RangeSet::point(SM.Width, 1)
                           : RangeSet::point(SM.Width, 0));
  }

  std::optional<SymbolicState> assumeSym(const SymbolicState &St,
                                         const Symbol *S, bool Truth) {
    return constrainRange(St, S, relRange(Truth ? BinOp::NE : BinOp::EQ, 0,
                                          SM.Width));
  }
};

} // namespace

AssumeOutcome assume(const SymbolicState &St, SVal Cond, bool Truth,
                     StateManager &SM) {
  AssumeOutcome Out;
  switch (Cond.kind()) {
  case SValKind::Undefined:
  case SValKind::Unknown:
    Out.State = St; // both branches stay open
    return Out;
  case SValKind::ConcreteInt:
    if ((Cond.asInt() != 0) == Truth)
      Out.State = St;
    return Out;
  case SValKind::NullLoc:
    if (!Truth)
      Out.State = St;
    return Out;
  case SValKind::Loc:
    if (Truth) // a concrete location is never null
      Out.State = St;
    return Out;
  case SValKind::Sym: {
    Solver S{SM};
    Out.State = S.assumeSym(St, Cond.symbol(), Truth);
    Out.Unsupported = S.Unsupported;
    return Out;
  }
  }
  return Out;
}

bool canBeValue(const SymbolicState &St, SVal V, std::int64_t Candidate,
                StateManager &SM) {
  switch (V.kind()) {
  case SValKind::ConcreteInt:
    return V.asInt() == Candidate;
  case SValKind::NullLoc:
    return Candidate == 0;
  case SValKind::Loc:
    return Candidate != 0;
  case SValKind::Sym: {
    Solver S{SM};
    return S
        .constrainRange(St, V.symbol(),
                        RangeSet::point(SM.Width, Candidate))
        .has_value();
  }
  default:
    return true; // unknown/undefined: cannot rule anything out
  }
}

RangeSet rangeOfSVal(const SymbolicState &St, SVal V, StateManager &SM) {
  if (V.isConcrete())
    return RangeSet::point(SM.Width, V.asInt());
  if (V.isNullLoc())
    return RangeSet::point(SM.Width, 0);
  if (const Symbol *S = V.symbol())
    return SM.rangeOf(St, S);
  return RangeSet::full(SM.Width);
}

} // namespace minisa
