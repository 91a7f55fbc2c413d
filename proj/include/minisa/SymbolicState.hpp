//===--- SymbolicState.hpp - Immutable symbolic program state --*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The symbolic state has four persistent components:
//
//   Environment  (expression occurrence, frame) -> SVal
//   Store        region -> SVal, plus region -> default binding
//   GDM          (checker tag, symbol) -> checker-owned fact
//   Constraints  symbol -> RangeSet (absent means the full range)
//
// plus the current call-frame description. Updates return new states sharing
// structure with the old one. Equality and hashing are content-based and are
// what the exploded graph uses to detect re-derived nodes.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/Cfg.hpp"
#include "minisa/RangeSet.hpp"
#include "minisa/Support/ImmutableMap.hpp"
#include "minisa/Symbols.hpp"

#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace minisa {

struct FrameContext {
  std::uint32_t Id = 0;
  const FrameContext *Parent = nullptr;
  const FunctionDecl *Fn = nullptr;
  const Cfg *Graph = nullptr;
  const Expr *CallSite = nullptr;  // null for top-level frames
  std::uint32_t ResumeBlock = 0;   // caller block holding the call
  std::uint32_t ResumeStmtIdx = 0; // statement index to re-dispatch
  std::uint32_t Depth = 1;         // top-level == 1
};

class FrameManager {
public:
  const FrameContext *topFrame(const FunctionDecl *Fn, const Cfg *G);

  /// Frames are interned by (parent, callee, call site, instance); the
  /// instance discriminator separates loop iterations of the same call site
  /// so their environments and visit budgets stay independent.
  const FrameContext *pushInstance(const FrameContext *Parent,
                                   const FunctionDecl *Fn, const Cfg *G,
                                   const Expr *CallSite,
                                   std::uint32_t ResumeBlock,
                                   std::uint32_t ResumeStmtIdx,
                                   std::uint32_t Instance);

private:
  std::deque<FrameContext> Arena;
  std::map<std::tuple<std::uint32_t, const FunctionDecl *, std::uint64_t>,
           const FrameContext *>
      Table;
};

struct EnvKey {
  std::uint32_t ExprId = 0;
  std::uint32_t FrameId = 0;
  bool operator<(const EnvKey &O) const {
    return ExprId != O.ExprId ? ExprId < O.ExprId : FrameId < O.FrameId;
  }
  bool operator==(const EnvKey &O) const {
    return ExprId == O.ExprId && FrameId == O.FrameId;
  }
};

struct GdmKey {
  std::uint32_t Tag = 0;
  const Symbol *Sym = nullptr;
  bool operator<(const GdmKey &O) const {
    if (Tag != O.Tag)
      return Tag < O.Tag;
    return Sym->Id < O.Sym->Id;
  }
  bool operator==(const GdmKey &O) const {
    return Tag == O.Tag && Sym == O.Sym;
  }
};

struct GdmVal {
  std::int32_t State = 0;
  SourceLoc Loc;
  bool operator==(const GdmVal &O) const {
    return State == O.State && Loc == O.Loc;
  }
};

class SymbolicState {
public:
  ImmutableMap<EnvKey, SVal> Env;
  ImmutableMap<const MemRegion *, SVal, RegionIdLess> Store;
  ImmutableMap<const MemRegion *, SVal, RegionIdLess> Defaults;
  ImmutableMap<GdmKey, GdmVal> Gdm;
  ImmutableMap<const Symbol *, RangeSet, SymbolIdLess> Constraints;
  const FrameContext *Frame = nullptr;

  bool operator==(const SymbolicState &O) const;
  std::size_t hash() const;
};

/// Owns the per-analysis interners and implements the state transformers.
class StateManager {
public:
  StateManager(SymbolManager &Syms, RegionManager &Regions, unsigned Width)
      : Syms(Syms), Regions(Regions), Width(Width) {}

  SymbolManager &Syms;
  RegionManager &Regions;
  unsigned Width;

  SymType symTypeFor(const Type *T) const {
    return T && T->isPointer() ? SymType::Ptr : SymType::Int;
  }

  // Environment.
  SymbolicState bindExpr(const SymbolicState &St, const Expr *E,
                         const FrameContext *Frame, SVal V) const;
  SVal lookupExpr(const SymbolicState &St, const Expr *E,
                  const FrameContext *Frame) const;
  bool hasExprBinding(const SymbolicState &St, const Expr *E,
                      const FrameContext *Frame) const;

  // Store. Reads materialize values per the default-binding rules: a direct
  // binding wins; otherwise the nearest ancestor default applies; otherwise
  // stack locals read Undefined and parameters/globals/heap read a fresh
  // RegionValue symbol.
  SymbolicState bindLoc(const SymbolicState &St, const MemRegion *R,
                        SVal V) const;
  SVal lookupLoc(const SymbolicState &St, const MemRegion *R,
                 const Type *AsType) const;

  // Constraints.
  RangeSet rangeOf(const SymbolicState &St, const Symbol *S) const;
  SymbolicState setRange(const SymbolicState &St, const Symbol *S,
                         RangeSet RS) const;

  /// Removes every binding inside each region's subtree and installs a fresh
  /// conjured default, so later reads of any subregion see fresh unconstrained
  /// symbols. Symbols referenced by the removed values are appended to
  /// EscapedValues.
  SymbolicState invalidate(const SymbolicState &St,
                           const std::vector<const MemRegion *> &TargetRegions,
                           std::uint32_t SiteId,
                           std::vector<const Symbol *> *EscapedValues) const;

  struct ReapResult {
    SymbolicState State;
    std::vector<const Symbol *> DeadSymbols; // constraint/GDM keys that died
  };

  /// Dead-binding collection at block boundaries: drops environment entries
  /// of the current frame, store bindings of dead locals, and constraints on
  /// symbols no longer reachable. LiveVarsOf maps each frame on the stack to
  /// its currently live locals.
  ReapResult removeDeadBindings(
      const SymbolicState &St,
      const std::function<const std::set<const VarDecl *> *(
          const FrameContext *)> &LiveVarsOf,
      const std::vector<const Symbol *> &ExtraLiveSymbols) const;

  /// Collects every symbol mentioned by V (through locations too).
  void symbolsOf(SVal V, std::vector<const Symbol *> &Out) const;
};

} // namespace minisa
