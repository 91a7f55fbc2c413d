//===--- CallGraph.hpp - Program call graph and analysis order -*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/Ast.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace minisa {

/// Nodes are function USRs; an edge caller -> callee exists for each
/// syntactic call whose callee has a known definition.
struct CallGraph {
  std::set<std::string> Nodes;
  std::map<std::string, std::set<std::string>> Edges; // caller -> callees

  void addNode(const std::string &Usr) { Nodes.insert(Usr); }
  void addEdge(const std::string &Caller, const std::string &Callee) {
    Edges[Caller].insert(Callee);
  }
};

CallGraph buildCallGraph(const Ast &Unit);

/// Orders defined functions callers-before-callees, so inlining marks callees
/// analyzed before their own top-level turn. Acyclic graphs get a proper
/// topological order; cycles are broken greedily (the remaining node with the
/// largest in-degree minus out-degree surplus is placed last). Ties break on
/// USR order. On any graph the returned order violates at most half of the
/// edges.
std::vector<std::string> topLevelOrder(const CallGraph &CG);

} // namespace minisa
