//===--- BugReport.hpp - Analysis findings ---------------------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/Ast.hpp"
#include "minisa/RangeSet.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace minisa {

/// A source position with the file name resolved, so reports stay valid
/// after the translation unit they came from is gone.
struct ResolvedLoc {
  std::string File;
  std::uint32_t Line = 0;
  std::uint32_t Col = 0;

  bool operator==(const ResolvedLoc &O) const {
    return File == O.File && Line == O.Line && Col == O.Col;
  }
  bool operator<(const ResolvedLoc &O) const {
    if (File != O.File)
      return File < O.File;
    if (Line != O.Line)
      return Line < O.Line;
    return Col < O.Col;
  }
};

struct PathEvent {
  enum class Kind { Assume, Call, Alloc, Origin, Warning };
  Kind K = Kind::Assume;
  ResolvedLoc Loc;
  std::string Msg;
  bool operator==(const PathEvent &O) const {
    return K == O.K && Loc == O.Loc && Msg == O.Msg;
  }
};

const char *pathEventKindName(PathEvent::Kind K);

/// Value-semantic symbol expression tree; outlives the per-analysis symbol
/// interner so refutation can run as a pure post-process.
struct CondExpr {
  enum class Kind { Base, SymInt, SymSym };
  Kind K = Kind::Base;
  std::uint32_t BaseId = 0; // identity of a base symbol within one condition
  BinOp Op = BinOp::Add;
  std::int32_t Konst = 0;
  bool ConstOnLeft = false;
  std::vector<CondExpr> Kids; // SymInt: 1, SymSym: 2
};

struct CondRecord {
  enum class Kind { Rel, InRanges };
  Kind K = Kind::Rel;
  CondExpr Tree;
  BinOp Op = BinOp::EQ;   // Rel
  std::int32_t Konst = 0; // Rel
  RangeSet Ranges{32};    // InRanges
};

using PathCondition = std::vector<CondRecord>;

struct BugReport {
  std::string CheckerId;
  std::string Message;
  ResolvedLoc WarnLoc;
  ResolvedLoc UniqueLoc; // leak reports unique on the allocation site
  std::string FnUsr;     // function enclosing the warning
  std::vector<PathEvent> Path;
  bool Suppressed = false;
  std::string SuppressReason;
  std::string IssueHash;
  PathCondition Conditions;

  /// Source files referenced by the warning and path events, deduplicated,
  /// warning file first.
  std::vector<std::string> referencedFiles() const;
};

struct RunStats {
  std::map<std::string, std::uint64_t> Counters;
  void bump(const std::string &Name, std::uint64_t By = 1) {
    Counters[Name] += By;
  }
  std::uint64_t get(const std::string &Name) const {
    auto It = Counters.find(Name);
    return It == Counters.end() ? 0 : It->second;
  }
  void mergeFrom(const RunStats &O) {
    for (const auto &[K, V] : O.Counters)
      Counters[K] += V;
  }
};

struct CoverageMap {
  // file -> line -> number of exploded nodes mapping to that line
  std::map<std::string, std::map<std::uint32_t, std::uint64_t>> Lines;
  // file -> lines holding executable code
  std::map<std::string, std::set<std::uint32_t>> Executable;

  void mergeFrom(const CoverageMap &O) {
    for (const auto &[File, LineMap] : O.Lines)
      for (const auto &[Line, N] : LineMap)
        Lines[File][Line] += N;
    for (const auto &[File, Set] : O.Executable)
      Executable[File].insert(Set.begin(), Set.end());
  }
};

} // namespace minisa
