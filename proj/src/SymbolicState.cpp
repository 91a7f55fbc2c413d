//===--- SymbolicState.cpp - Immutable symbolic program state -----------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/SymbolicState.hpp"

#include <cassert>

namespace minisa {

std::atomic<std::uint64_t> ImmutableMapNodeAllocations{0};

//===----------------------------------------------------------------------===//
// FrameManager
//===----------------------------------------------------------------------===//

const FrameContext *FrameManager::topFrame(const FunctionDecl *Fn,
                                           const Cfg *G) {
  auto Key = std::make_tuple(0xFFFFFFFFu, Fn, std::uint64_t(0));
  auto It = Table.find(Key);
  if (It != Table.end())
    return It->second;
  FrameContext F;
  F.Id = std::uint32_t(Arena.size());
  F.Fn = Fn;
  F.Graph = G;
  Arena.push_back(F);
  Table.emplace(Key, &Arena.back());
  return &Arena.back();
}

const FrameContext *FrameManager::pushInstance(
    const FrameContext *Parent, const FunctionDecl *Fn, const Cfg *G,
    const Expr *CallSite, std::uint32_t ResumeBlock,
    std::uint32_t ResumeStmtIdx, std::uint32_t Instance) {
  auto Key = std::make_tuple(
      Parent->Id, Fn, (std::uint64_t(CallSite->Id) << 16) | Instance);
  auto It = Table.find(Key);
  if (It != Table.end())
    return It->second;
  FrameContext F;
  F.Id = std::uint32_t(Arena.size());
  F.Parent = Parent;
  F.Fn = Fn;
  F.Graph = G;
  F.CallSite = CallSite;
  F.ResumeBlock = ResumeBlock;
  F.ResumeStmtIdx = ResumeStmtIdx;
  F.Depth = Parent->Depth + 1;
  Arena.push_back(F);
  Table.emplace(Key, &Arena.back());
  return &Arena.back();
}

//===----------------------------------------------------------------------===//
// SymbolicState
//===----------------------------------------------------------------------===//

bool SymbolicState::operator==(const SymbolicState &O) const {
  if (Frame != O.Frame)
    return false;
  auto KE = [](const auto &A, const auto &B) { return A == B; };
  auto VE = [](const auto &A, const auto &B) { return A == B; };
  auto PtrEq = [](const auto *A, const auto *B) { return A == B; };
  return Env.equals(O.Env, KE, VE) && Store.equals(O.Store, PtrEq, VE) &&
         Defaults.equals(O.Defaults, PtrEq, VE) && Gdm.equals(O.Gdm, KE, VE) &&
         Constraints.equals(O.Constraints, PtrEq, VE);
}

std::size_t SymbolicState::hash() const {
  std::size_t H = Frame ? Frame->Id : 0;
  H = hashCombine(H, Env.hashWith([](const EnvKey &K, const SVal &V) {
    return std::size_t(K.ExprId) * 2654435761u ^ (K.FrameId << 1) ^ V.hash();
  }));
  H = hashCombine(H, Store.hashWith([](const MemRegion *R, const SVal &V) {
    return std::size_t(R->Id) * 2654435761u ^ V.hash();
  }));
  H = hashCombine(H, Defaults.hashWith([](const MemRegion *R, const SVal &V) {
    return std::size_t(R->Id) * 40503 ^ V.hash();
  }));
  H = hashCombine(H, Gdm.hashWith([](const GdmKey &K, const GdmVal &V) {
    return std::size_t(K.Tag) ^ (std::size_t(K.Sym->Id) << 8) ^
           std::size_t(V.State) ^ (std::size_t(V.Loc.Line) << 16);
  }));
  H = hashCombine(H,
                  Constraints.hashWith([](const Symbol *S, const RangeSet &R) {
                    return std::size_t(S->Id) * 31 ^ R.hash();
                  }));
  return H;
}

//===----------------------------------------------------------------------===//
// StateManager
//===----------------------------------------------------------------------===//

SymbolicState StateManager::bindExpr(const SymbolicState &St, const Expr *E,
                                     const FrameContext *Frame, SVal V) const {
  SymbolicState Out = St;
  Out.Env = St.Env.insert({E->Id, Frame->Id}, V);
  return Out;
}

SVal StateManager::lookupExpr(const SymbolicState &St, const Expr *E,
                              const FrameContext *Frame) const {
  const SVal *V = St.Env.find({E->Id, Frame->Id});
  return V ? *V : SVal::unknown();
}

bool StateManager::hasExprBinding(const SymbolicState &St, const Expr *E,
                                  const FrameContext *Frame) const {
  return St.Env.contains({E->Id, Frame->Id});
}

SymbolicState StateManager::bindLoc(const SymbolicState &St, const MemRegion *R,
                                    SVal V) const {
  assert(!R->isSpace());
  SymbolicState Out = St;
  Out.Store = St.Store.insert(R, V);
  return Out;
}

SVal StateManager::lookupLoc(const SymbolicState &St, const MemRegion *R,
                             const Type *AsType) const {
  if (const SVal *Direct = St.Store.find(R))
    return *Direct;

  SymType Ty = symTypeFor(AsType ? AsType : R->valueType());
  for (const MemRegion *A = R; A && !A->isSpace(); A = A->Parent) {
    if (const SVal *Def = St.Defaults.find(A)) {
      if (Def->isUndef())
        return SVal::undef();
      if (const Symbol *DefSym = Def->symbol())
        return SVal::sym(Syms.derivedFromDefault(DefSym, R, Ty));
      return A == R ? *Def : SVal::unknown();
    }
  }

  switch (R->baseRegion()->space()->Kind) {
  case RegionKind::StackSpace:
    return SVal::undef();
  default:
    return SVal::sym(Syms.regionValue(R, Ty));
  }
}

RangeSet StateManager::rangeOf(const SymbolicState &St, const Symbol *S) const {
  const RangeSet *RS = St.Constraints.find(S);
  return RS ? *RS : RangeSet::full(Width);
}

SymbolicState StateManager::setRange(const SymbolicState &St, const Symbol *S,
                                     RangeSet RS) const {
  assert(!RS.isEmpty());
  SymbolicState Out = St;
  Out.Constraints = St.Constraints.insert(S, std::move(RS));
  return Out;
}

void StateManager::symbolsOf(SVal V, std::vector<const Symbol *> &Out) const {
  if (const Symbol *S = V.symbol()) {
    Out.push_back(S);
    return;
  }
  if (const MemRegion *R = V.region())
    for (const MemRegion *A = R; A; A = A->Parent) {
      if (A->Sym)
        Out.push_back(A->Sym);
      if (const Symbol *IdxSym = A->Index.symbol())
        Out.push_back(IdxSym);
    }
}

SymbolicState StateManager::invalidate(
    const SymbolicState &St, const std::vector<const MemRegion *> &TargetRegions,
    std::uint32_t SiteId, std::vector<const Symbol *> *EscapedValues) const {
  if (TargetRegions.empty())
    return St;

  SymbolicState Out = St;
  for (const MemRegion *Target : TargetRegions) {
    std::vector<const MemRegion *> DeadKeys;
    Out.Store.forEach([&](const MemRegion *R, const SVal &V) {
      if (R->isWithin(Target)) {
        DeadKeys.push_back(R);
        if (EscapedValues)
          symbolsOf(V, *EscapedValues);
      }
    });
    for (const MemRegion *R : DeadKeys)
      Out.Store = Out.Store.erase(R);

    DeadKeys.clear();
    Out.Defaults.forEach([&](const MemRegion *R, const SVal &) {
      if (R->isWithin(Target))
        DeadKeys.push_back(R);
    });
    for (const MemRegion *R : DeadKeys)
      Out.Defaults = Out.Defaults.erase(R);

    const Symbol *Fresh = Syms.conjure(SiteId, SymType::Int);
    Out.Defaults = Out.Defaults.insert(Target, SVal::sym(Fresh));
  }
  return Out;
}

StateManager::ReapResult StateManager::removeDeadBindings(
    const SymbolicState &St,
    const std::function<const std::set<const VarDecl *> *(
        const FrameContext *)> &LiveVarsOf,
    const std::vector<const Symbol *> &ExtraLiveSymbols) const {
  // Live frames on the current stack.
  std::set<std::uint32_t> LiveFrames;
  for (const FrameContext *F = St.Frame; F; F = F->Parent)
    LiveFrames.insert(F->Id);

  // A local variable region is live when its frame is on the stack and the
  // variable is referenced at or after the frame's current block.
  auto varRegionLive = [&](const MemRegion *Base) {
    if (Base->Kind != RegionKind::Var)
      return true;
    if (Base->Var->IsGlobal)
      return true;
    std::uint32_t FrameId = Base->space()->FrameId;
    if (!LiveFrames.count(FrameId))
      return false;
    for (const FrameContext *F = St.Frame; F; F = F->Parent)
      if (F->Id == FrameId) {
        const std::set<const VarDecl *> *Live = LiveVarsOf(F);
        return !Live || Live->count(Base->Var) > 0;
      }
    return false;
  };

  // Seed symbol liveness from the environment and extra roots, then iterate:
  // bindings under live bases keep their value symbols alive, and a live
  // pointer symbol keeps its pointee region (SymRegion/AllocRegion) alive.
  std::set<std::uint32_t> LiveSyms;
  std::vector<const Symbol *> Work;
  auto markSym = [&](const Symbol *S) {
    if (LiveSyms.insert(S->Id).second)
      Work.push_back(S);
  };
  St.Env.forEach([&](const EnvKey &, const SVal &V) {
    std::vector<const Symbol *> Tmp;
    symbolsOf(V, Tmp);
    for (const Symbol *S : Tmp)
      markSym(S);
  });
  for (const Symbol *S : ExtraLiveSymbols)
    markSym(S);

  bool Changed = true;
  while (Changed) {
    Changed = false;
    while (!Work.empty()) {
      const Symbol *S = Work.back();
      Work.pop_back();
      if (S->Lhs)
        markSym(S->Lhs);
      if (S->Rhs)
        markSym(S->Rhs);
      if (S->Region) {
        std::vector<const Symbol *> Tmp;
        for (const MemRegion *A = S->Region; A; A = A->Parent) {
          if (A->Sym)
            Tmp.push_back(A->Sym);
          if (const Symbol *IdxSym = A->Index.symbol())
            Tmp.push_back(IdxSym);
        }
        for (const Symbol *T : Tmp)
          markSym(T);
      }
    }
    auto baseLive = [&](const MemRegion *R) {
      const MemRegion *Base = R->baseRegion();
      switch (Base->Kind) {
      case RegionKind::Var:
        return varRegionLive(Base);
      case RegionKind::Alloc:
      case RegionKind::Sym:
        return LiveSyms.count(Base->Sym->Id) > 0;
      default:
        return true;
      }
    };
    std::size_t Before = LiveSyms.size();
    auto scan = [&](const MemRegion *R, const SVal &V) {
      if (!baseLive(R))
        return;
      std::vector<const Symbol *> Tmp;
      symbolsOf(V, Tmp);
      if (const Symbol *IdxSym = R->Index.symbol())
        Tmp.push_back(IdxSym);
      for (const Symbol *S : Tmp)
        markSym(S);
    };
    St.Store.forEach(scan);
    St.Defaults.forEach(scan);
    Changed = LiveSyms.size() != Before || !Work.empty();
  }

  auto baseLive = [&](const MemRegion *R) {
    const MemRegion *Base = R->baseRegion();
    switch (Base->Kind) {
    case RegionKind::Var:
      return varRegionLive(Base);
    case RegionKind::Alloc:
    case RegionKind::Sym:
      return LiveSyms.count(Base->Sym->Id) > 0;
    default:
      return true;
    }
  };

  ReapResult Result;
  Result.State = St;

  // Drop environment entries for frames not on the stack; the engine clears
  // current-frame temporaries itself when a statement completes.
  {
    std::vector<EnvKey> DeadEnv;
    St.Env.forEach([&](const EnvKey &K, const SVal &) {
      if (!LiveFrames.count(K.FrameId))
        DeadEnv.push_back(K);
    });
    for (const EnvKey &K : DeadEnv)
      Result.State.Env = Result.State.Env.erase(K);
  }

  // Drop store bindings and defaults whose base region is dead.
  {
    std::vector<const MemRegion *> DeadKeys;
    Result.State.Store.forEach([&](const MemRegion *R, const SVal &) {
      if (!baseLive(R))
        DeadKeys.push_back(R);
    });
    for (const MemRegion *R : DeadKeys)
      Result.State.Store = Result.State.Store.erase(R);
    DeadKeys.clear();
    Result.State.Defaults.forEach([&](const MemRegion *R, const SVal &) {
      if (!baseLive(R))
        DeadKeys.push_back(R);
    });
    for (const MemRegion *R : DeadKeys)
      Result.State.Defaults = Result.State.Defaults.erase(R);
  }

  // A constraint stays while every base symbol under it is live.
  auto symbolTreeLive = [&](const Symbol *S) {
    std::vector<const Symbol *> Stack{S};
    while (!Stack.empty()) {
      const Symbol *Cur = Stack.back();
      Stack.pop_back();
      if (Cur->isExpression()) {
        Stack.push_back(Cur->Lhs);
        if (Cur->Rhs)
          Stack.push_back(Cur->Rhs);
        continue;
      }
      if (!LiveSyms.count(Cur->Id))
        return false;
    }
    return true;
  };

  {
    std::vector<const Symbol *> DeadConstraints;
    Result.State.Constraints.forEach([&](const Symbol *S, const RangeSet &) {
      if (!symbolTreeLive(S))
        DeadConstraints.push_back(S);
    });
    for (const Symbol *S : DeadConstraints)
      Result.State.Constraints = Result.State.Constraints.erase(S);
  }

  // GDM keys referencing dead symbols are reported to checkers.
  Result.State.Gdm.forEach([&](const GdmKey &K, const GdmVal &) {
    if (!LiveSyms.count(K.Sym->Id))
      Result.DeadSymbols.push_back(K.Sym);
  });

  return Result;
}

} // namespace minisa
