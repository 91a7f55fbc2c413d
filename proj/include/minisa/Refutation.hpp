//===--- Refutation.hpp - Bit-precise report refutation --------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Reports whose harvested path condition has no satisfying assignment are
// false positives of the range solver and get dropped. The oracle enumerates
// all assignments at a reduced bit width (exactly: two's-complement
// wraparound, C truncation division, division by zero excludes the
// assignment), which decides the conditions the range solver is weak on,
// e.g. `(a-b) == 0` together with `a != b`. Conditions with too many symbols
// or constants that do not fit the reduced width come back Unknown and the
// report is kept. SMT-LIB emission provides the same conditions to external
// solvers for cross-checking.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/BugReport.hpp"

#include <map>
#include <optional>

namespace minisa {

enum class RefuteVerdict { Infeasible, Feasible, Unknown };

struct RefuteResult {
  RefuteVerdict Verdict = RefuteVerdict::Unknown;
  // First satisfying assignment in lexicographic order (Feasible only),
  // keyed by base-symbol id.
  std::map<std::uint32_t, std::int64_t> Model;
};

RefuteResult refuteExact(const PathCondition &PC, unsigned Width = 8,
                         unsigned MaxSymbols = 3);

/// SMT-LIB 2 script over bitvectors of the given width; nullopt when the
/// condition leaves the supported fragment.
std::optional<std::string> emitSmtLib(const PathCondition &PC,
                                      unsigned Width = 32);

struct RefuteOptions {
  bool Enabled = false;
  unsigned Width = 8; // 4, 8 or 16
  unsigned MaxSymbols = 3;
};

/// Drops unsuppressed reports whose conditions are Infeasible; a pure filter,
/// kept reports are untouched. Returns the number of dropped reports.
std::size_t refuteReports(std::vector<BugReport> &Reports,
                          const RefuteOptions &Opts, RunStats &Stats);

} // namespace minisa
