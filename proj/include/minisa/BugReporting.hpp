//===--- BugReporting.hpp - Paths, suppression, dedup ----------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/BugReport.hpp"
#include "minisa/Engine.hpp"

namespace minisa {

/// Walks each raw report's path through the exploded graph: attaches
/// assume/call/alloc/origin events, runs the inline-defensive-check
/// suppression visitor, and harvests the path condition for refutation.
std::vector<BugReport> finalizeReports(const ExplodedGraph &G,
                                       const std::vector<RawReport> &Raws,
                                       const Ast &Unit, StateManager &SM,
                                       RunStats &Stats);

/// Shortest-path deduplication: reports grouped by (checker id, uniqueing
/// location, enclosing function USR); within a group the unsuppressed report
/// with the fewest path events survives, ties broken by the lexicographically
/// smallest event-location sequence. Idempotent and order-insensitive.
std::vector<BugReport> dedupReports(std::vector<BugReport> Reports,
                                    RunStats *Stats);

} // namespace minisa
