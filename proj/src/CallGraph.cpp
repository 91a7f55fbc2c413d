//===--- CallGraph.cpp - Program call graph and analysis order ----------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/CallGraph.hpp"

#include <functional>

namespace minisa {

CallGraph buildCallGraph(const Ast &Unit) {
  CallGraph CG;
  for (const FunctionDecl *F : Unit.Functions)
    if (F->hasBody() && !F->Builtin)
      CG.addNode(F->Usr);

  for (const FunctionDecl *F : Unit.Functions) {
    if (!F->hasBody() || F->Builtin)
      continue;
    std::function<void(const Expr *)> WalkE = [&](const Expr *E) {
      if (!E)
        return;
      if (E->Kind == ExprKind::Call && E->Callee && E->Callee->hasBody() &&
          !E->Callee->Builtin)
        CG.addEdge(F->Usr, E->Callee->Usr);
      WalkE(E->Lhs);
      WalkE(E->Rhs);
      WalkE(E->Operand);
      WalkE(E->Base);
      WalkE(E->IndexExpr);
      for (const Expr *A : E->Args)
        WalkE(A);
    };
    std::function<void(const Stmt *)> WalkS = [&](const Stmt *S) {
      if (!S)
        return;
      for (const Stmt *C : S->Body)
        WalkS(C);
      WalkS(S->Then);
      WalkS(S->Else);
      WalkS(S->LoopBody);
      WalkE(S->Cond);
      WalkE(S->Value);
      if (S->Var)
        WalkE(S->Var->Init);
    };
    WalkS(F->Body);
  }
  return CG;
}

std::vector<std::string> topLevelOrder(const CallGraph &CG) {
  // Degree bookkeeping over the remaining subgraph. Self-edges are ignored;
  // recursion is handled by conservative evaluation, not by ordering.
  std::map<std::string, std::set<std::string>> Out, In;
  for (const std::string &N : CG.Nodes) {
    Out[N];
    In[N];
  }
  for (const auto &[Caller, Callees] : CG.Edges)
    for (const std::string &Callee : Callees) {
      if (Caller == Callee || !CG.Nodes.count(Caller) ||
          !CG.Nodes.count(Callee))
        continue;
      Out[Caller].insert(Callee);
      In[Callee].insert(Caller);
    }

  std::vector<std::string> Tail; // built back to front
  std::set<std::string> Remaining = CG.Nodes;

  auto removeNode = [&](std::string N) {
    for (const std::string &P : In[N])
      Out[P].erase(N);
    for (const std::string &S : Out[N])
      In[S].erase(N);
    Remaining.erase(N);
    Tail.push_back(std::move(N));
  };

  while (!Remaining.empty()) {
    // Prefer a pure callee (no remaining out-edges); its placement violates
    // nothing. Lexicographically largest first, so ties end up in USR order.
    const std::string *Pick = nullptr;
    for (const std::string &N : Remaining)
      if (Out[N].empty() && (!Pick || N > *Pick))
        Pick = &N;
    if (!Pick) {
      // Cyclic core: place the most-called node last. Edges it still calls
      // out to get violated, and there are at most as many of those as
      // satisfied in-edges.
      long Best = 0;
      for (const std::string &N : Remaining) {
        long Score = long(In[N].size()) - long(Out[N].size());
        if (!Pick || Score > Best || (Score == Best && N > *Pick)) {
          Pick = &N;
          Best = Score;
        }
      }
    }
    removeNode(*Pick);
  }

  return {Tail.rbegin(), Tail.rend()};
}

} // namespace minisa
