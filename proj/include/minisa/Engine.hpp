//===--- Engine.hpp - Worklist-driven exploded graph exploration -*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Each vertex of the exploded graph is a (symbolic state, program point)
// pair. The engine builds the graph on demand with a worklist: evaluating one
// statement at a time, splitting on branch conditions through the range
// solver (infeasible sides are dropped), inlining calls with known bodies
// within budgets, and evaluating the rest conservatively. Re-deriving an
// existing node adds an edge instead of a node, which is both the cycle
// detection and the state dedup.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/BugReport.hpp"
#include "minisa/CallGraph.hpp"
#include "minisa/Cfg.hpp"
#include "minisa/ConstraintSolver.hpp"
#include "minisa/SymbolicState.hpp"

#include <deque>
#include <memory>
#include <unordered_map>

namespace minisa {

class CtuContext;

enum class ExplorationStrategy { Dfs, Bfs, UnexploredFirst };

struct Budgets {
  std::uint64_t MaxNodesPerTopLevel = 100000;
  unsigned MaxInlineDepth = 5;      // maximal frame stack size
  unsigned MaxBlockVisitsPerPath = 4;
  unsigned MaxInlineSize = 50;      // callee basic-block count
  unsigned UnrollLimit = 3;         // loop iterations on one path
};

struct AnalysisOptions {
  Budgets Limits;
  ExplorationStrategy Strategy = ExplorationStrategy::UnexploredFirst;
  bool WidenLoops = false;

  // Test hooks; not reachable from the command line.
  bool DisableInvalidation = false;
  std::set<std::string> ForceTopLevel; // USRs analyzed top-level regardless
};

struct ProgramPoint {
  enum class Kind : std::uint8_t { BlockEntrance, Stmt, CallEnter, CallExit };
  Kind K = Kind::BlockEntrance;
  const FrameContext *Frame = nullptr;
  std::uint32_t Block = 0;
  std::uint32_t StmtIdx = 0; // == block statement count: the terminator

  bool operator==(const ProgramPoint &O) const {
    return K == O.K && Frame == O.Frame && Block == O.Block &&
           StmtIdx == O.StmtIdx;
  }
  std::size_t hash() const {
    return (std::size_t(Frame->Id) << 20) ^ (std::size_t(Block) << 9) ^
           (std::size_t(StmtIdx) << 2) ^ std::size_t(K);
  }
};

struct EdgeTag {
  enum class Kind : std::uint8_t { Flow, Assume, CallEnter, CallExit, Widen };
  Kind K = Kind::Flow;
  const Expr *CondExpr = nullptr; // Assume: the branch condition
  SVal Val;                       // Assume: its evaluated value
  bool Truth = false;
  const FunctionDecl *Callee = nullptr; // CallEnter/CallExit
  const Expr *CallSite = nullptr;
};

struct ExplodedNode {
  std::uint32_t Id = 0;
  SymbolicState State;
  ProgramPoint Point;
  bool Sink = false;
  std::vector<std::pair<const ExplodedNode *, EdgeTag>> Preds;
  std::vector<const ExplodedNode *> Succs;

  unsigned frameDepth() const { return Point.Frame->Depth; }
};

class ExplodedGraph {
public:
  /// Returns the node for (State, Point), creating it if this exact pair has
  /// not been derived before.
  std::pair<ExplodedNode *, bool> getNode(SymbolicState State,
                                          ProgramPoint Point);

  void addEdge(ExplodedNode *From, ExplodedNode *To, EdgeTag Tag) {
    To->Preds.push_back({From, Tag});
    From->Succs.push_back(To);
  }

  std::size_t size() const { return Nodes.size(); }
  const std::deque<ExplodedNode> &nodes() const { return Nodes; }

private:
  std::deque<ExplodedNode> Nodes;
  std::unordered_multimap<std::size_t, ExplodedNode *> Dedup;
};

/// A finding as produced during exploration, with pointers into the graph and
/// interners that only live for the duration of one analyzeTu call. The
/// reporting layer turns these into self-contained BugReports.
struct RawReport {
  std::string CheckerId;
  std::string Message;
  SourceLoc WarnLoc;
  SourceLoc UniqueLoc;
  std::string FnUsr;
  const ExplodedNode *EndNode = nullptr;
  const Symbol *Culprit = nullptr; // symbol proven 0/null, when symbolic
  const Expr *BugExpr = nullptr;   // divisor / dereferenced pointer
  SourceLoc AllocLoc;              // leak/double free: allocation site
  bool IsLeak = false;
};

struct TuAnalysisResult {
  std::vector<BugReport> Reports;
  CoverageMap Coverage;
  RunStats Stats;
};

/// Analyzes one translation unit: every function in caller-first order that
/// was not already covered by same-unit inlining becomes the root of an
/// exploded graph. Reports come back deduplicated with paths attached.
TuAnalysisResult analyzeTu(Ast &Unit, const AnalysisOptions &Opts,
                           CtuContext *Ctu = nullptr);

/// White-box harness: explores one function as top level and keeps the graph
/// and the interners that own its states alive for inspection.
class TopLevelExploration {
public:
  TopLevelExploration(Ast &Unit, const AnalysisOptions &Opts,
                      CtuContext *Ctu = nullptr);
  ~TopLevelExploration();

  /// Runs the function with the given name; false when it has no body.
  bool explore(const std::string &FnName);

  const ExplodedGraph &graph() const;
  StateManager &states();
  RegionManager &regions();
  const std::vector<RawReport> &rawReports() const;
  RunStats &stats();
  const FrameContext *rootFrame() const;

private:
  struct Impl;
  std::unique_ptr<Impl> P;
};

} // namespace minisa
