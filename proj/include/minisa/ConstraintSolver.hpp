//===--- ConstraintSolver.hpp - Range-based assume -------------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Constraints are disjunctions of ranges per symbol. `assume` handles
// concrete truth tests, `s != 0` truth tests, comparisons of a symbol with a
// constant including the linear SymIntExpr rearrangements (s+c' ⋈ c,
// s-c' ⋈ c, c'-s ⋈ c, done exactly in modular arithmetic), pointer
// equality/inequality, and ==/!= between two symbols via their difference
// expression. Each difference direction is a distinct symbol and nothing is
// derived across them; `(a-b) == 0` together with `a != b` stays feasible
// here, which is exactly what the refutation stage exists to catch.
// Multiplication, division and ordered sym-sym comparisons degrade to a
// recorded no-op so exploration continues (over-approximation).
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/SymbolicState.hpp"

#include <optional>

namespace minisa {

struct Assumption {
  SVal Val;
  bool Truth = true;
};

struct AssumeOutcome {
  std::optional<SymbolicState> State; // empty => path infeasible
  bool Unsupported = false;           // recorded as a no-op
};

AssumeOutcome assume(const SymbolicState &St, SVal Cond, bool Truth,
                     StateManager &SM);

/// True iff assuming `V == Candidate` keeps the state feasible.
bool canBeValue(const SymbolicState &St, SVal V, std::int64_t Candidate,
                StateManager &SM);

/// The range currently known for an SVal: concrete points map to singleton
/// sets, symbols to their constraint (or the full domain).
RangeSet rangeOfSVal(const SymbolicState &St, SVal V, StateManager &SM);

} // namespace minisa
