//===--- Engine.cpp - Worklist-driven exploded graph exploration ---------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Engine.hpp"
#include "minisa/BugReporting.hpp"
#include "minisa/Ctu.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace minisa {

namespace {

constexpr std::uint32_t MallocTag = 1;
constexpr std::int32_t AllocAllocated = 0;
constexpr std::int32_t AllocFreed = 1;
constexpr std::int32_t AllocEscaped = 2;

std::int32_t wrap32(std::int64_t V) {
  return std::int32_t(RangeSet::truncate(V, 32));
}

struct WorkItem {
  ExplodedNode *Node = nullptr;
  // (frame id << 32 | block id) -> visits on this path
  ImmutableMap<std::uint64_t, std::uint32_t> Visits;
  std::uint64_t Seq = 0;
};

std::uint64_t blockKey(const FrameContext *F, std::uint32_t Block) {
  return (std::uint64_t(F->Id) << 32) | Block;
}

} // namespace

//===----------------------------------------------------------------------===//
// ExplodedGraph
//===----------------------------------------------------------------------===//

std::pair<ExplodedNode *, bool> ExplodedGraph::getNode(SymbolicState State,
                                                       ProgramPoint Point) {
  std::size_t H = hashCombine(State.hash(), Point.hash());
  auto [It, End] = Dedup.equal_range(H);
  for (; It != End; ++It)
    if (It->second->Point == Point && It->second->State == State)
      return {It->second, false};
  Nodes.emplace_back();
  ExplodedNode &N = Nodes.back();
  N.Id = std::uint32_t(Nodes.size() - 1);
  N.State = std::move(State);
  N.Point = Point;
  Dedup.emplace(H, &N);
  return {&N, true};
}

namespace {

//===----------------------------------------------------------------------===//
// TuEngine: per translation unit analysis driver
//===----------------------------------------------------------------------===//

class TuEngine {
public:
  TuEngine(Ast &Unit, const AnalysisOptions &Opts, CtuContext *Ctu)
      : Unit(Unit), Opts(Opts), Ctu(Ctu), SM(Syms, Regions, 32) {}

  Ast &Unit;
  const AnalysisOptions &Opts;
  CtuContext *Ctu;
  SymbolManager Syms;
  RegionManager Regions;
  FrameManager Frames;
  StateManager SM;

  RunStats Stats;
  CoverageMap Coverage;
  std::vector<BugReport> FinalReports;

  std::map<const FunctionDecl *, std::unique_ptr<Cfg>> Cfgs;
  std::set<std::string> InlinedAnalyzedSameTu;
  std::set<const Symbol *> MallocSyms;
  std::set<const MemRegion *> TouchedGlobals;
  std::set<const MemRegion *> AllocRegionsSeen;

  const std::string &fileName(std::uint32_t Idx) const {
    static const std::string UnknownName = "<unknown>";
    return Idx < Unit.Files.size() ? Unit.Files[Idx] : UnknownName;
  }

  const Cfg *cfgFor(const FunctionDecl *F) {
    auto It = Cfgs.find(F);
    if (It != Cfgs.end())
      return It->second.get();
    auto G = buildCfg(*F, Unit);
    const Cfg *Ptr = G.get();
    Cfgs.emplace(F, std::move(G));
    collectExecutableLines(F);
    return Ptr;
  }

  void collectExecutableLines(const FunctionDecl *F);
  void run();
  void analyzeTopLevel(const FunctionDecl *F);

  const MemRegion *globalRegion(const VarDecl *V) {
    const MemRegion *R = Regions.varRegion(V, Regions.globalSpace());
    TouchedGlobals.insert(R);
    return R;
  }

  /// The region a symbolic pointer points at: malloc results get their
  /// allocation region, everything else an anonymous symbolic region.
  const MemRegion *pointeeRegion(const Symbol *PtrSym) {
    if (MallocSyms.count(PtrSym))
      return Regions.allocRegion(PtrSym);
    return Regions.symRegion(PtrSym);
  }
};

void TuEngine::collectExecutableLines(const FunctionDecl *F) {
  auto &Lines = Coverage.Executable;
  auto mark = [&](SourceLoc L) {
    if (L.Line)
      Lines[fileName(L.File)].insert(L.Line);
  };
  std::function<void(const Expr *)> WalkE = [&](const Expr *E) {
    if (!E)
      return;
    mark(E->Loc);
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
    if (S->Kind != StmtKind::Compound)
      mark(S->Loc);
    for (const Stmt *C : S->Body)
      WalkS(C);
    WalkS(S->Then);
    WalkS(S->Else);
    WalkS(S->LoopBody);
    WalkE(S->Cond);
    WalkE(S->Value);
    if (S->Var && S->Var->Init)
      WalkE(S->Var->Init);
  };
  WalkS(F->Body);
}

//===----------------------------------------------------------------------===//
// Exploration of one top-level function
//===----------------------------------------------------------------------===//

class Exploration {
public:
  Exploration(TuEngine &E) : E(E) {}

  TuEngine &E;
  ExplodedGraph Graph;
  std::deque<WorkItem> List;
  std::map<std::pair<const FunctionDecl *, std::uint32_t>, std::uint64_t>
      GlobalBlockVisits;
  std::uint64_t NextSeq = 0;
  std::vector<RawReport> Raws;
  bool NodeBudgetHit = false;

  void explore(const FunctionDecl *F);
  void step(WorkItem &Item);

  void enqueue(ExplodedNode *N,
               const ImmutableMap<std::uint64_t, std::uint32_t> &Visits) {
    List.push_back({N, Visits, NextSeq++});
  }

  WorkItem dequeue() {
    switch (E.Opts.Strategy) {
    case ExplorationStrategy::Dfs: {
      WorkItem It = List.back();
      List.pop_back();
      return It;
    }
    case ExplorationStrategy::Bfs: {
      WorkItem It = List.front();
      List.pop_front();
      return It;
    }
    case ExplorationStrategy::UnexploredFirst: {
      std::size_t BestIdx = 0;
      std::uint64_t BestCount = ~0ULL;
      for (std::size_t I = 0; I < List.size(); ++I) {
        const ProgramPoint &P = List[I].Node->Point;
        auto It = GlobalBlockVisits.find({P.Frame->Fn, P.Block});
        std::uint64_t C = It == GlobalBlockVisits.end() ? 0 : It->second;
        if (C < BestCount) {
          BestCount = C;
          BestIdx = I;
        }
      }
      WorkItem It = List[BestIdx];
      List.erase(List.begin() + long(BestIdx));
      return It;
    }
    }
    WorkItem It = List.back();
    List.pop_back();
    return It;
  }

  // Transitions --------------------------------------------------------------

  void toPoint(WorkItem &Item, ExplodedNode *Pred, SymbolicState St,
               ProgramPoint P, EdgeTag Tag) {
    auto [N, IsNew] = Graph.getNode(std::move(St), P);
    Graph.addEdge(Pred, N, Tag);
    if (!IsNew)
      return;
    countCoverage(*N);
    enqueue(N, Item.Visits);
  }

  void toBlockEntrance(WorkItem &Item, ExplodedNode *Pred, SymbolicState St,
                       std::uint32_t Target, EdgeTag Tag, SourceLoc Anchor,
                       const std::vector<const Symbol *> &ExtraLive = {});

  void callExitTransition(WorkItem &Item, ExplodedNode *Pred,
                          SymbolicState CalleeState, SourceLoc Anchor);

  // Helpers -------------------------------------------------------------------

  void countCoverage(const ExplodedNode &N);
  SourceLoc anchorLocOf(const CfgBlock &B, const FrameContext *Frame) const;
  std::uint32_t capFor(const CfgBlock &Target, const SymbolicState &St,
                       const FrameContext *Frame, std::uint32_t Visits);
  SymbolicState widenState(const SymbolicState &St, const CfgBlock &Head,
                           const FrameContext *Frame);
  SymbolicState purgeFrameEnv(const SymbolicState &St,
                              const FrameContext *Frame);
  SymbolicState sweepDead(const SymbolicState &St, std::uint32_t CurBlock,
                          SourceLoc Anchor, const ExplodedNode *EndNode,
                          const FrameContext *ReportFrame,
                          const std::vector<const Symbol *> &ExtraLive);
  void escapeMallocSymbols(SymbolicState &St,
                           const std::vector<const Symbol *> &Symbols);

  void execStmtOrTerminator(WorkItem &Item);
  void doCallEnter(WorkItem &Item, ExplodedNode *Pred, const Expr *Call,
                   const FunctionDecl *Callee);
  const Expr *findPendingCall(const SymbolicState &St, const Expr *E,
                              const FrameContext *Frame,
                              const FunctionDecl **CalleeOut);
  bool inlinable(const Expr *Call, const FrameContext *Frame,
                 const FunctionDecl **CalleeOut);
};

//===----------------------------------------------------------------------===//
// Evaluator: expression transfer functions with checker hooks
//===----------------------------------------------------------------------===//

class Evaluator {
public:
  Evaluator(Exploration &X, WorkItem &Item, ExplodedNode *Pred)
      : X(X), E(X.E), Item(Item), Pred(Pred), St(Pred->State) {}

  Exploration &X;
  TuEngine &E;
  WorkItem &Item;
  ExplodedNode *Pred;
  SymbolicState St;
  bool Sank = false;

  const FrameContext *frame() const { return St.Frame; }

  // Reports an error, creates a sink node at the current point and stops the
  // path.
  void sink(const std::string &CheckerId, const std::string &Message,
            SourceLoc Loc, const Symbol *Culprit, const Expr *BugExpr,
            SourceLoc AllocLoc = {}) {
    auto [N, IsNew] = X.Graph.getNode(St, Pred->Point);
    // A sink re-deriving its predecessor's identity still gets the edge.
    if (N != Pred)
      X.Graph.addEdge(Pred, N, EdgeTag{});
    N->Sink = true;
    RawReport R;
    R.CheckerId = CheckerId;
    R.Message = Message;
    R.WarnLoc = Loc;
    R.UniqueLoc = Loc;
    R.FnUsr = frame()->Fn->Usr;
    R.EndNode = N;
    R.Culprit = Culprit;
    R.BugExpr = BugExpr;
    R.AllocLoc = AllocLoc;
    X.Raws.push_back(R);
    Sank = true;
  }

  //--- Checkers -------------------------------------------------------------

  /// Division and modulo. A divisor proven zero sinks the path; a divisor
  /// that only may be zero is silently assumed non-zero (no split).
  bool checkDivision(SVal Divisor, const Expr *DivExpr) {
    if (Divisor.isConcrete() && Divisor.asInt() == 0) {
      sink("core.DivideZero", "Division by zero", DivExpr->Loc, nullptr,
           DivExpr->Rhs);
      return false;
    }
    if (const Symbol *S = Divisor.symbol()) {
      if (E.SM.rangeOf(St, S).isPoint(0)) {
        sink("core.DivideZero", "Division by zero", DivExpr->Loc, S,
             DivExpr->Rhs);
        return false;
      }
      AssumeOutcome Out = assume(St, Divisor, true, E.SM);
      if (Out.Unsupported)
        E.Stats.bump("unsupported_assumptions");
      if (Out.State)
        St = *Out.State;
    }
    return true;
  }

  /// Dereference checks; returns false when the path sank.
  bool checkDeref(SVal Pointer, const Expr *DerefExpr) {
    if (Pointer.isNullLoc()) {
      sink("core.NullDereference", "Dereference of null pointer",
           DerefExpr->Loc, nullptr, DerefExpr);
      return false;
    }
    if (Pointer.isUndef()) {
      sink("core.UndefDereference", "Dereference of undefined pointer",
           DerefExpr->Loc, nullptr, DerefExpr);
      return false;
    }
    if (const Symbol *S = Pointer.symbol()) {
      if (E.SM.rangeOf(St, S).isPoint(0)) {
        sink("core.NullDereference", "Dereference of null pointer",
             DerefExpr->Loc, S, DerefExpr);
        return false;
      }
      AssumeOutcome Out = assume(St, Pointer, true, E.SM);
      if (Out.Unsupported)
        E.Stats.bump("unsupported_assumptions");
      if (Out.State)
        St = *Out.State;
    }
    return true;
  }

  //--- Lvalues ----------------------------------------------------------------

  struct LvalueResult {
    const MemRegion *Region = nullptr; // null: unknown (or the path sank)
  };

  std::optional<LvalueResult> regionForLvalue(const Expr *L) {
    switch (L->Kind) {
    case ExprKind::DeclRef: {
      const VarDecl *V = L->Ref;
      if (V->IsGlobal)
        return LvalueResult{E.globalRegion(V)};
      return LvalueResult{
          E.Regions.varRegion(V, E.Regions.stackSpace(frame()->Id))};
    }
    case ExprKind::Member: {
      const MemRegion *Base = nullptr;
      if (L->Arrow) {
        auto Ptr = eval(L->Base);
        if (!Ptr)
          return std::nullopt;
        auto R = derefToRegion(*Ptr, L);
        if (!R)
          return std::nullopt;
        Base = *R;
      } else {
        auto BaseRes = regionForLvalue(L->Base);
        if (!BaseRes)
          return std::nullopt;
        Base = BaseRes->Region;
      }
      if (!Base)
        return LvalueResult{nullptr};
      return LvalueResult{E.Regions.fieldRegion(L->Field, Base)};
    }
    case ExprKind::Index: {
      const MemRegion *Base = nullptr;
      if (L->Base->Ty && L->Base->Ty->isArray()) {
        auto BaseRes = regionForLvalue(L->Base);
        if (!BaseRes)
          return std::nullopt;
        Base = BaseRes->Region;
      } else {
        auto Ptr = eval(L->Base);
        if (!Ptr)
          return std::nullopt;
        auto R = derefToRegion(*Ptr, L);
        if (!R)
          return std::nullopt;
        Base = *R;
      }
      auto Idx = eval(L->IndexExpr);
      if (!Idx)
        return std::nullopt;
      SVal IdxV = *Idx;
      if (!IdxV.isConcrete() && !IdxV.isSym())
        IdxV = SVal::unknown();
      if (!Base || IdxV.isUnknown())
        return LvalueResult{nullptr};
      return LvalueResult{E.Regions.elementRegion(IdxV, Base)};
    }
    case ExprKind::Unary:
      if (L->UOp == UnaryOp::Deref) {
        auto Ptr = eval(L->Operand);
        if (!Ptr)
          return std::nullopt;
        auto R = derefToRegion(*Ptr, L);
        if (!R)
          return std::nullopt;
        return LvalueResult{*R};
      }
      break;
    default:
      break;
    }
    return LvalueResult{nullptr};
  }

  /// Resolves a pointer value to the region it points at, running the null /
  /// undefined dereference checks. nullopt: the path sank.
  std::optional<const MemRegion *> derefToRegion(SVal Ptr, const Expr *At) {
    if (!checkDeref(Ptr, At))
      return std::nullopt;
    if (const MemRegion *R = Ptr.region())
      return R;
    if (const Symbol *S = Ptr.symbol())
      return E.pointeeRegion(S);
    return nullptr; // unknown pointer: reads give Unknown, writes vanish
  }

  //--- Expressions ------------------------------------------------------------

  std::optional<SVal> eval(const Expr *Ex) {
    switch (Ex->Kind) {
    case ExprKind::IntLiteral:
      if (Ex->Ty && Ex->Ty->isPointer())
        return SVal::nullLoc();
      return SVal::concrete(Ex->IntValue);
    case ExprKind::DeclRef:
    case ExprKind::Member:
    case ExprKind::Index:
      return evalRead(Ex);
    case ExprKind::Unary:
      return evalUnary(Ex);
    case ExprKind::Binary:
      if (Ex->BOp == BinOp::Assign)
        return evalAssign(Ex);
      return evalBinary(Ex);
    case ExprKind::Call:
      return evalCall(Ex);
    }
    return SVal::unknown();
  }

  std::optional<SVal> evalRead(const Expr *Ex) {
    auto R = regionForLvalue(Ex);
    if (!R)
      return std::nullopt;
    if (!R->Region)
      return SVal::unknown();
    return E.SM.lookupLoc(St, R->Region, Ex->Ty);
  }

  std::optional<SVal> evalUnary(const Expr *Ex) {
    if (Ex->UOp == UnaryOp::AddrOf) {
      auto R = regionForLvalue(Ex->Operand);
      if (!R)
        return std::nullopt;
      if (!R->Region)
        return SVal::unknown();
      return SVal::loc(R->Region);
    }
    if (Ex->UOp == UnaryOp::Deref)
      return evalRead0(Ex);
    auto V = eval(Ex->Operand);
    if (!V)
      return std::nullopt;
    if (Ex->UOp == UnaryOp::Neg)
      return constMinusValue(0, *V);
    // Logical not.
    switch (V->kind()) {
    case SValKind::ConcreteInt:
      return SVal::concrete(V->asInt() == 0 ? 1 : 0);
    case SValKind::NullLoc:
      return SVal::concrete(1);
    case SValKind::Loc:
      return SVal::concrete(0);
    case SValKind::Sym:
      return SVal::sym(
          E.Syms.symInt(V->symbol(), BinOp::EQ, 0, false, SymType::Int));
    default:
      return SVal::unknown();
    }
  }

  std::optional<SVal> evalRead0(const Expr *Ex) {
    auto Ptr = eval(Ex->Operand);
    if (!Ptr)
      return std::nullopt;
    auto R = derefToRegion(*Ptr, Ex);
    if (!R)
      return std::nullopt;
    if (!*R)
      return SVal::unknown();
    return E.SM.lookupLoc(St, *R, Ex->Ty);
  }

  std::optional<SVal> evalAssign(const Expr *Ex) {
    auto V = eval(Ex->Rhs);
    if (!V)
      return std::nullopt;
    auto R = regionForLvalue(Ex->Lhs);
    if (!R)
      return std::nullopt;
    if (R->Region) {
      St = E.SM.bindLoc(St, R->Region, *V);
      // Storing a tracked pointer into a global or heap location stops leak
      // tracking for it.
      RegionKind Space = R->Region->baseRegion()->space()->Kind;
      if (Space == RegionKind::GlobalSpace || Space == RegionKind::HeapSpace ||
          Space == RegionKind::UnknownSpace) {
        std::vector<const Symbol *> Syms;
        E.SM.symbolsOf(*V, Syms);
        X.escapeMallocSymbols(St, Syms);
      }
    }
    return V;
  }

  SVal constMinusValue(std::int32_t C, SVal V) {
    if (V.isConcrete())
      return SVal::concrete(wrap32(std::int64_t(C) - V.asInt()));
    if (const Symbol *S = V.symbol())
      return SVal::sym(constMinusSym(C, S));
    return SVal::unknown();
  }

  const Symbol *normalizeAddConst(const Symbol *S, std::int32_t C) {
    if (C == 0)
      return S;
    if (S->Kind == SymbolKind::SymInt && S->Op == BinOp::Add &&
        !S->ConstOnLeft)
      return normalizeAddConst(S->Lhs, wrap32(std::int64_t(S->Konst) + C));
    if (S->Kind == SymbolKind::SymInt && S->Op == BinOp::Sub && S->ConstOnLeft)
      // (k - x) + c == (k + c) - x
      return constMinusSym(wrap32(std::int64_t(S->Konst) + C), S->Lhs);
    return E.Syms.symInt(S, BinOp::Add, C, false, S->Ty);
  }

  const Symbol *constMinusSym(std::int32_t C, const Symbol *S) {
    if (S->Kind == SymbolKind::SymInt && S->Op == BinOp::Add && !S->ConstOnLeft)
      // c - (x + k) == (c - k) - x
      return constMinusSym(wrap32(std::int64_t(C) - S->Konst), S->Lhs);
    if (S->Kind == SymbolKind::SymInt && S->Op == BinOp::Sub && S->ConstOnLeft)
      // c - (k - x) == (c - k) + x
      return normalizeAddConst(S->Lhs, wrap32(std::int64_t(C) - S->Konst));
    return E.Syms.symInt(S, BinOp::Sub, C, true, SymType::Int);
  }

  std::optional<SVal> evalBinary(const Expr *Ex) {
    auto L = eval(Ex->Lhs);
    if (!L)
      return std::nullopt;
    auto R = eval(Ex->Rhs);
    if (!R)
      return std::nullopt;
    if (Ex->BOp == BinOp::Div || Ex->BOp == BinOp::Rem)
      if (!checkDivision(*R, Ex))
        return std::nullopt;
    return evalBinOp(Ex->BOp, *L, *R);
  }

  SVal evalBinOp(BinOp Op, SVal L, SVal R) {
    if (L.isUndef() || R.isUndef())
      return SVal::unknown();

    // Pointer algebra first: identity comparisons and differences.
    if (L.isLoc() || R.isLoc() || L.isNullLoc() || R.isNullLoc()) {
      SVal Folded = evalPointerOp(Op, L, R);
      if (!Folded.isUndef())
        return Folded;
      return SVal::unknown();
    }
    if (L.isUnknown() || R.isUnknown())
      return SVal::unknown();

    if (L.isConcrete() && R.isConcrete())
      return foldConcrete(Op, L.asInt(), R.asInt());

    if (L.isSym() && R.isConcrete())
      return symWithConst(Op, L.symbol(), R.asInt(), false);
    if (L.isConcrete() && R.isSym())
      return symWithConst(Op, R.symbol(), L.asInt(), true);

    return SVal::sym(E.Syms.symSym(L.symbol(), Op, R.symbol(),
                                   SymType::Int));
  }

  // Returns Undefined when the combination is not modeled.
  SVal evalPointerOp(BinOp Op, SVal L, SVal R) {
    auto isNull = [](SVal V) { return V.isNullLoc(); };
    if (Op == BinOp::EQ || Op == BinOp::NE) {
      bool Negate = Op == BinOp::NE;
      auto answer = [&](bool Equal) {
        return SVal::concrete((Equal != Negate) ? 1 : 0);
      };
      if (isNull(L) && isNull(R))
        return answer(true);
      if (L.isLoc() && R.isLoc())
        return answer(L.region() == R.region());
      if ((L.isLoc() && isNull(R)) || (isNull(L) && R.isLoc()))
        return answer(false);
      if (L.isSym() && isNull(R))
        return SVal::sym(E.Syms.symInt(L.symbol(), Op, 0, false, SymType::Int));
      if (isNull(L) && R.isSym())
        return SVal::sym(E.Syms.symInt(R.symbol(), Op, 0, false, SymType::Int));
      return SVal::undef(); // loc vs symbol identity: unmodeled
    }
    if (Op == BinOp::Sub) {
      if (L.isLoc() && R.isLoc())
        return L.region() == R.region() ? SVal::concrete(0) : SVal::undef();
      if (L.isSym() && R.isSym())
        return SVal::sym(
            E.Syms.symSym(L.symbol(), BinOp::Sub, R.symbol(), SymType::Int));
      return SVal::undef();
    }
    return SVal::undef();
  }

  SVal foldConcrete(BinOp Op, std::int32_t A, std::int32_t B) {
    std::int64_t L = A, R = B;
    switch (Op) {
    case BinOp::Add: return SVal::concrete(wrap32(L + R));
    case BinOp::Sub: return SVal::concrete(wrap32(L - R));
    case BinOp::Mul: return SVal::concrete(wrap32(L * R));
    case BinOp::Div:
      return SVal::concrete(B == 0 ? 0 : wrap32(L / R)); // checker ran first
    case BinOp::Rem:
      return SVal::concrete(B == 0 ? 0 : wrap32(L % R));
    case BinOp::LT: return SVal::concrete(A < B);
    case BinOp::LE: return SVal::concrete(A <= B);
    case BinOp::GT: return SVal::concrete(A > B);
    case BinOp::GE: return SVal::concrete(A >= B);
    case BinOp::EQ: return SVal::concrete(A == B);
    case BinOp::NE: return SVal::concrete(A != B);
    default: return SVal::unknown();
    }
  }

  BinOp mirrorCmp(BinOp Op) {
    switch (Op) {
    case BinOp::LT: return BinOp::GT;
    case BinOp::LE: return BinOp::GE;
    case BinOp::GT: return BinOp::LT;
    case BinOp::GE: return BinOp::LE;
    default: return Op;
    }
  }

  SVal symWithConst(BinOp Op, const Symbol *S, std::int32_t C, bool ConstLeft) {
    switch (Op) {
    case BinOp::Add:
      return SVal::sym(normalizeAddConst(S, C));
    case BinOp::Sub:
      if (ConstLeft)
        return SVal::sym(constMinusSym(C, S));
      return SVal::sym(normalizeAddConst(S, wrap32(-std::int64_t(C))));
    case BinOp::Mul:
      if (C == 0)
        return SVal::concrete(0);
      if (C == 1)
        return SVal::sym(S);
      return SVal::sym(E.Syms.symInt(S, BinOp::Mul, C, false, S->Ty));
    case BinOp::Div:
    case BinOp::Rem:
      if (!ConstLeft && C == 1 && Op == BinOp::Div)
        return SVal::sym(S);
      return SVal::sym(E.Syms.symInt(S, Op, C, ConstLeft, S->Ty));
    case BinOp::LT:
    case BinOp::LE:
    case BinOp::GT:
    case BinOp::GE:
    case BinOp::EQ:
    case BinOp::NE: {
      BinOp Rel = ConstLeft ? mirrorCmp(Op) : Op;
      return SVal::sym(E.Syms.symInt(S, Rel, C, false, SymType::Int));
    }
    default:
      return SVal::unknown();
    }
  }

  //--- Calls ------------------------------------------------------------------

  std::optional<SVal> evalCall(const Expr *Call) {
    // Results of completed calls (inlined or conservative) are re-read from
    // the environment when a statement is re-dispatched.
    if (E.SM.hasExprBinding(St, Call, frame()))
      return E.SM.lookupExpr(St, Call, frame());

    const FunctionDecl *Callee = Call->Callee;
    if (Callee && Callee->Builtin)
      return evalBuiltin(Call, Callee);

    // Anything inlinable was peeled off before the statement ran; what is
    // left is evaluated conservatively.
    return evalConservative(Call);
  }

  std::optional<SVal> evalBuiltin(const Expr *Call,
                                  const FunctionDecl *Callee) {
    std::vector<SVal> Args;
    for (const Expr *A : Call->Args) {
      auto V = eval(A);
      if (!V)
        return std::nullopt;
      Args.push_back(*V);
    }
    if (Callee->Name == "malloc") {
      const Symbol *M = E.Syms.conjure(Call->Id, SymType::Ptr);
      E.MallocSyms.insert(M);
      E.AllocRegionsSeen.insert(E.Regions.allocRegion(M));
      SymbolicState Next = St;
      Next.Gdm = St.Gdm.insert({MallocTag, M}, {AllocAllocated, Call->Loc});
      St = Next;
      SVal Res = SVal::sym(M);
      St = E.SM.bindExpr(St, Call, frame(), Res);
      E.Stats.bump("malloc_calls");
      return Res;
    }
    if (Callee->Name == "free") {
      SVal P = Args[0];
      if (const Symbol *S = P.symbol()) {
        if (const GdmVal *Fact = St.Gdm.find({MallocTag, S})) {
          if (Fact->State == AllocFreed) {
            sink("unix.Malloc", "Attempt to free released memory", Call->Loc,
                 nullptr, Call, Fact->Loc);
            return std::nullopt;
          }
          SymbolicState Next = St;
          Next.Gdm = St.Gdm.insert({MallocTag, S}, {AllocFreed, Fact->Loc});
          St = Next;
        }
      }
      St = E.SM.bindExpr(St, Call, frame(), SVal::unknown());
      return SVal::unknown();
    }
    // abort: no value; the block terminator ends the path.
    St = E.SM.bindExpr(St, Call, frame(), SVal::unknown());
    return SVal::unknown();
  }

  std::optional<SVal> evalConservative(const Expr *Call) {
    std::vector<SVal> Args;
    for (const Expr *A : Call->Args) {
      auto V = eval(A);
      if (!V)
        return std::nullopt;
      Args.push_back(*V);
    }
    E.Stats.bump("conservative_calls");

    // Escape and invalidation: every pointer argument's pointee subtree and
    // every global base region touched so far.
    std::vector<const Symbol *> Escaped;
    std::vector<const MemRegion *> Targets;
    for (SVal V : Args) {
      E.SM.symbolsOf(V, Escaped);
      if (const MemRegion *R = V.region())
        Targets.push_back(R);
      else if (const Symbol *S = V.symbol(); S && S->Ty == SymType::Ptr)
        Targets.push_back(E.pointeeRegion(S));
    }
    for (const MemRegion *G : E.TouchedGlobals)
      Targets.push_back(G);

    if (!E.Opts.DisableInvalidation)
      St = E.SM.invalidate(St, Targets, Call->Id, &Escaped);
    X.escapeMallocSymbols(St, Escaped);

    SVal Res = SVal::unknown();
    if (Call->Ty && !Call->Ty->isVoid()) {
      SymType Ty = Call->Ty->isPointer() ? SymType::Ptr : SymType::Int;
      Res = SVal::sym(E.Syms.conjure(Call->Id, Ty));
    }
    St = E.SM.bindExpr(St, Call, frame(), Res);
    return Res;
  }
};

//===----------------------------------------------------------------------===//
// Exploration implementation
//===----------------------------------------------------------------------===//

void Exploration::countCoverage(const ExplodedNode &N) {
  if (N.Point.K != ProgramPoint::Kind::Stmt)
    return;
  const Cfg *G = N.Point.Frame->Graph;
  const CfgBlock &B = G->block(N.Point.Block);
  SourceLoc Loc;
  if (N.Point.StmtIdx < B.Stmts.size()) {
    Loc = B.Stmts[N.Point.StmtIdx]->Loc;
  } else {
    switch (B.Term.K) {
    case CfgTerminator::Kind::Branch:
      Loc = B.Term.Cond->Loc;
      break;
    case CfgTerminator::Kind::Return:
      Loc = B.Term.ReturnStmt->Loc;
      break;
    default:
      return;
    }
  }
  if (Loc.Line)
    ++E.Coverage.Lines[E.fileName(Loc.File)][Loc.Line];
}

SourceLoc Exploration::anchorLocOf(const CfgBlock &B,
                                   const FrameContext *Frame) const {
  switch (B.Term.K) {
  case CfgTerminator::Kind::Branch:
    return B.Term.Cond->Loc;
  case CfgTerminator::Kind::Return:
  case CfgTerminator::Kind::NoReturn:
    if (B.Term.ReturnStmt)
      return B.Term.ReturnStmt->Loc;
    break;
  default:
    break;
  }
  if (!B.Stmts.empty())
    return B.Stmts.back()->Loc;
  return Frame->Fn->Loc;
}

// Recognizes `while (v < K)` loops with a concrete counter that step by a
// concrete amount, never split paths and finish within 128 iterations; those
// are unrolled completely.
static const VarDecl *simpleCounterLoop(const Stmt *Loop,
                                        std::int64_t &Limit,
                                        std::int64_t &Step, const Cfg *G) {
  if (!Loop || Loop->Kind != StmtKind::While)
    return nullptr;
  const Expr *Cond = Loop->Cond;
  if (Cond->Kind != ExprKind::Binary || Cond->BOp != BinOp::LT)
    return nullptr;
  if (Cond->Lhs->Kind != ExprKind::DeclRef ||
      Cond->Rhs->Kind != ExprKind::IntLiteral)
    return nullptr;
  const VarDecl *V = Cond->Lhs->Ref;
  if (G->AddrTaken.count(V))
    return nullptr;
  Limit = Cond->Rhs->IntValue;

  // The body must be branch- and call-free and write v exactly once, as
  // `v = v + <literal>` (or minus); any other shape may split paths.
  int Writes = 0;
  bool Bad = false;
  std::int64_t FoundStep = 0;
  std::function<void(const Expr *)> WalkE = [&](const Expr *Ex) {
    if (!Ex || Bad)
      return;
    if (Ex->Kind == ExprKind::Call) {
      Bad = true;
      return;
    }
    if (Ex->Kind == ExprKind::Binary && Ex->BOp == BinOp::Assign) {
      const Expr *L = Ex->Lhs;
      if (L->Kind == ExprKind::DeclRef && L->Ref == V) {
        ++Writes;
        const Expr *R = Ex->Rhs;
        bool StepForm = R->Kind == ExprKind::Binary &&
                        (R->BOp == BinOp::Add || R->BOp == BinOp::Sub) &&
                        R->Lhs->Kind == ExprKind::DeclRef &&
                        R->Lhs->Ref == V &&
                        R->Rhs->Kind == ExprKind::IntLiteral;
        if (!StepForm) {
          Bad = true;
          return;
        }
        FoundStep = R->BOp == BinOp::Add ? R->Rhs->IntValue : -R->Rhs->IntValue;
      }
    }
    WalkE(Ex->Lhs);
    WalkE(Ex->Rhs);
    WalkE(Ex->Operand);
    WalkE(Ex->Base);
    WalkE(Ex->IndexExpr);
    for (const Expr *A : Ex->Args)
      WalkE(A);
  };
  std::function<void(const Stmt *)> WalkS = [&](const Stmt *S) {
    if (!S || Bad)
      return;
    if (S->Kind == StmtKind::If || S->Kind == StmtKind::While) {
      Bad = true;
      return;
    }
    for (const Stmt *C : S->Body)
      WalkS(C);
    if (S->Value)
      WalkE(S->Value);
    if (S->Var && S->Var->Init) {
      if (S->Var == V)
        Bad = true;
      WalkE(S->Var->Init);
    }
  };
  WalkS(Loop->LoopBody);
  if (Bad || Writes != 1 || FoundStep <= 0)
    return nullptr;
  Step = FoundStep;
  return V;
}

std::uint32_t Exploration::capFor(const CfgBlock &Target,
                                  const SymbolicState &St,
                                  const FrameContext *Frame,
                                  std::uint32_t Visits) {
  const Budgets &B = E.Opts.Limits;
  if (!Target.IsLoopHead) {
    // Blocks inside a completely-unrollable loop track its head allowance.
    // Such loops are branch- and call-free, so their body is straight-line
    // and bounded by the head's iteration count.
    if (Target.EnclosingLoop) {
      std::int64_t Limit = 0, Step = 0;
      if (simpleCounterLoop(Target.EnclosingLoop, Limit, Step, Frame->Graph))
        return 131 + B.MaxBlockVisitsPerPath;
    }
    return std::max(B.MaxBlockVisitsPerPath, B.UnrollLimit + 1);
  }

  std::int64_t Limit = 0, Step = 0;
  if (const VarDecl *V =
          simpleCounterLoop(Target.LoopStmt, Limit, Step, Frame->Graph)) {
    const MemRegion *R =
        V->IsGlobal ? E.Regions.varRegion(V, E.Regions.globalSpace())
                    : E.Regions.varRegion(V, E.Regions.stackSpace(Frame->Id));
    SVal Cur = E.SM.lookupLoc(St, R, V->Ty);
    if (Cur.isConcrete()) {
      std::int64_t V0 = Cur.asInt();
      std::int64_t Iters = V0 >= Limit ? 0 : (Limit - V0 + Step - 1) / Step;
      // The remaining iterations shrink as the path advances, so the cap is
      // relative to the visits already spent.
      if (Iters <= 128) {
        E.Stats.bump("fully_unrolled_loop_entries");
        return Visits + std::uint32_t(Iters) + 2;
      }
    }
  }
  return B.UnrollLimit + 1;
}

SymbolicState Exploration::widenState(const SymbolicState &St,
                                      const CfgBlock &Head,
                                      const FrameContext *Frame) {
  const Stmt *Loop = Head.LoopStmt;
  std::vector<const MemRegion *> Targets;
  bool Dynamic = false;

  auto staticRegionFor = [&](const Expr *L,
                             auto &&Self) -> const MemRegion * {
    switch (L->Kind) {
    case ExprKind::DeclRef:
      return L->Ref->IsGlobal
                 ? E.globalRegion(L->Ref)
                 : E.Regions.varRegion(L->Ref,
                                       E.Regions.stackSpace(Frame->Id));
    case ExprKind::Member:
      if (!L->Arrow)
        if (const MemRegion *Base = Self(L->Base, Self))
          return E.Regions.fieldRegion(L->Field, Base);
      return nullptr;
    case ExprKind::Index:
      // The written element is not statically known; widen the whole array.
      return Self(L->Base, Self);
    default:
      return nullptr;
    }
  };

  std::function<void(const Expr *)> WalkE = [&](const Expr *Ex) {
    if (!Ex)
      return;
    if (Ex->Kind == ExprKind::Call) {
      Dynamic = true;
    } else if (Ex->Kind == ExprKind::Binary && Ex->BOp == BinOp::Assign) {
      if (const MemRegion *R = staticRegionFor(Ex->Lhs, staticRegionFor))
        Targets.push_back(R);
      else
        Dynamic = true;
    }
    WalkE(Ex->Lhs);
    WalkE(Ex->Rhs);
    WalkE(Ex->Operand);
    WalkE(Ex->Base);
    WalkE(Ex->IndexExpr);
    for (const Expr *A : Ex->Args)
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
    if (S->Var && S->Var->Init)
      WalkE(S->Var->Init);
  };
  WalkS(Loop->LoopBody);

  if (Dynamic) {
    // Writes through pointers or calls: without pointer analysis every base
    // region reachable from the frame gets invalidated.
    std::set<const VarDecl *> Vars;
    std::function<void(const Stmt *)> CollectVars = [&](const Stmt *S) {
      if (!S)
        return;
      if (S->Var)
        Vars.insert(S->Var);
      for (const Stmt *C : S->Body)
        CollectVars(C);
      CollectVars(S->Then);
      CollectVars(S->Else);
      CollectVars(S->LoopBody);
    };
    CollectVars(Frame->Fn->Body);
    for (const VarDecl *P : Frame->Fn->Params)
      Vars.insert(P);
    for (const VarDecl *V : Vars)
      Targets.push_back(
          E.Regions.varRegion(V, E.Regions.stackSpace(Frame->Id)));
    for (const MemRegion *G : E.TouchedGlobals)
      Targets.push_back(G);
    for (const MemRegion *A : E.AllocRegionsSeen)
      Targets.push_back(A);
  }

  // Loop condition variables are always widened.
  std::function<void(const Expr *)> CondVars = [&](const Expr *Ex) {
    if (!Ex)
      return;
    if (Ex->Kind == ExprKind::DeclRef)
      Targets.push_back(Ex->Ref->IsGlobal
                            ? E.globalRegion(Ex->Ref)
                            : E.Regions.varRegion(
                                  Ex->Ref, E.Regions.stackSpace(Frame->Id)));
    CondVars(Ex->Lhs);
    CondVars(Ex->Rhs);
    CondVars(Ex->Operand);
    CondVars(Ex->Base);
    CondVars(Ex->IndexExpr);
    for (const Expr *A : Ex->Args)
      CondVars(A);
  };
  CondVars(Loop->Cond);

  E.Stats.bump("widened_loops");
  std::vector<const Symbol *> Escaped;
  SymbolicState Out = E.SM.invalidate(St, Targets, Loop->Id, &Escaped);
  escapeMallocSymbols(Out, Escaped);
  return Out;
}

SymbolicState Exploration::purgeFrameEnv(const SymbolicState &St,
                                         const FrameContext *Frame) {
  std::vector<EnvKey> Dead;
  St.Env.forEach([&](const EnvKey &K, const SVal &) {
    if (K.FrameId == Frame->Id)
      Dead.push_back(K);
  });
  SymbolicState Out = St;
  for (const EnvKey &K : Dead)
    Out.Env = Out.Env.erase(K);
  return Out;
}

void Exploration::escapeMallocSymbols(SymbolicState &St,
                                      const std::vector<const Symbol *> &Syms) {
  for (const Symbol *S : Syms) {
    if (const GdmVal *Fact = St.Gdm.find({MallocTag, S}))
      if (Fact->State == AllocAllocated) {
        SymbolicState Next = St;
        Next.Gdm = St.Gdm.insert({MallocTag, S}, {AllocEscaped, Fact->Loc});
        St = Next;
      }
  }
}

SymbolicState Exploration::sweepDead(
    const SymbolicState &St, std::uint32_t CurBlock, SourceLoc Anchor,
    const ExplodedNode *EndNode, const FrameContext *ReportFrame,
    const std::vector<const Symbol *> &ExtraLive) {
  // Where is each frame on the stack currently parked?
  std::map<std::uint32_t, std::uint32_t> FrameBlock;
  FrameBlock[St.Frame->Id] = CurBlock;
  for (const FrameContext *F = St.Frame; F && F->Parent; F = F->Parent)
    FrameBlock[F->Parent->Id] = F->ResumeBlock;

  auto LiveVarsOf =
      [&](const FrameContext *F) -> const std::set<const VarDecl *> * {
    auto It = FrameBlock.find(F->Id);
    if (It == FrameBlock.end())
      return nullptr;
    return &F->Graph->block(It->second).LiveVars;
  };

  StateManager::ReapResult RR =
      E.SM.removeDeadBindings(St, LiveVarsOf, ExtraLive);

  // Malloc checker: an Allocated symbol that died leaks; Freed and Escaped
  // facts are just dropped.
  for (const Symbol *S : RR.DeadSymbols) {
    const GdmVal *Fact = RR.State.Gdm.find({MallocTag, S});
    if (!Fact)
      continue;
    if (Fact->State == AllocAllocated) {
      RawReport R;
      R.CheckerId = "unix.Malloc";
      R.Message = "Potential memory leak";
      R.WarnLoc = Anchor;
      R.UniqueLoc = Fact->Loc; // dedup on the allocation site
      R.FnUsr = ReportFrame->Fn->Usr;
      R.EndNode = EndNode;
      R.AllocLoc = Fact->Loc;
      R.IsLeak = true;
      Raws.push_back(R);
    }
    SymbolicState Next = RR.State;
    Next.Gdm = RR.State.Gdm.erase({MallocTag, S});
    RR.State = Next;
  }
  return RR.State;
}

void Exploration::toBlockEntrance(WorkItem &Item, ExplodedNode *Pred,
                                  SymbolicState St, std::uint32_t Target,
                                  EdgeTag Tag, SourceLoc Anchor,
                                  const std::vector<const Symbol *> &ExtraLive) {
  const FrameContext *Frame = St.Frame;
  const Cfg *G = Frame->Graph;

  // An inlined frame reaching its exit block returns to the caller. A plain
  // fall-through (no return statement) produces no usable value.
  if (Target == G->Exit && Frame->Parent) {
    SymbolicState Ret = E.SM.bindExpr(St, Frame->CallSite, Frame->Parent,
                                      SVal::unknown());
    callExitTransition(Item, Pred, Ret, Anchor);
    return;
  }

  const CfgBlock &T = G->block(Target);
  std::uint64_t Key = blockKey(Frame, Target);
  const std::uint32_t *Found = Item.Visits.find(Key);
  std::uint32_t Visits = Found ? *Found : 0;

  if (Target != G->Exit) {
    std::uint32_t Cap = capFor(T, St, Frame, Visits);
    if (Visits >= Cap) {
      if (T.IsLoopHead && E.Opts.WidenLoops && Visits == Cap) {
        St = widenState(St, T, Frame);
        Tag = EdgeTag{};
        Tag.K = EdgeTag::Kind::Widen;
      } else {
        E.Stats.bump("block_visit_budget_stops");
        return;
      }
    }
  }

  SymbolicState Swept =
      sweepDead(St, Target, Anchor, Pred, Frame, ExtraLive);

  auto [N, IsNew] = Graph.getNode(std::move(Swept),
                                  {ProgramPoint::Kind::BlockEntrance, Frame,
                                   Target, 0});
  Graph.addEdge(Pred, N, Tag);
  if (!IsNew)
    return; // existing node: the path merges and stops here
  ++GlobalBlockVisits[{Frame->Fn, Target}];
  if (Target == G->Exit)
    return; // top-level path end
  enqueue(N, Item.Visits.insert(Key, Visits + 1));
}

void Exploration::callExitTransition(WorkItem &Item, ExplodedNode *Pred,
                                     SymbolicState CalleeState,
                                     SourceLoc Anchor) {
  const FrameContext *CalleeFrame = CalleeState.Frame;
  const FrameContext *Caller = CalleeFrame->Parent;

  SymbolicState Popped = CalleeState;
  Popped.Frame = Caller;
  Popped = sweepDead(Popped, CalleeFrame->ResumeBlock, Anchor, Pred,
                     CalleeFrame, {});

  if (!CalleeFrame->Fn->Imported)
    E.InlinedAnalyzedSameTu.insert(CalleeFrame->Fn->Usr);

  EdgeTag Tag;
  Tag.K = EdgeTag::Kind::CallExit;
  Tag.Callee = CalleeFrame->Fn;
  Tag.CallSite = CalleeFrame->CallSite;

  ProgramPoint ExitP{ProgramPoint::Kind::CallExit, Caller,
                     CalleeFrame->ResumeBlock, CalleeFrame->ResumeStmtIdx};
  auto [N, IsNew] = Graph.getNode(std::move(Popped), ExitP);
  Graph.addEdge(Pred, N, Tag);
  if (IsNew)
    enqueue(N, Item.Visits);
}

bool Exploration::inlinable(const Expr *Call, const FrameContext *Frame,
                            const FunctionDecl **CalleeOut) {
  const FunctionDecl *Callee = Call->Callee;
  if (!Callee || Callee->Builtin)
    return false;
  if (!Callee->hasBody() && E.Ctu) {
    const FunctionDecl *Loaded =
        E.Ctu->loadExternalDefinition(Callee->Usr, E.Unit, E.Stats);
    if (Loaded)
      Callee = Loaded;
  }
  if (!Callee->hasBody())
    return false;
  // No recursion: the callee may not already be on the frame stack.
  for (const FrameContext *F = Frame; F; F = F->Parent)
    if (F->Fn->Usr == Callee->Usr)
      return false;
  if (Frame->Depth >= E.Opts.Limits.MaxInlineDepth)
    return false;
  const Cfg *G = E.cfgFor(Callee);
  if (G->size() > E.Opts.Limits.MaxInlineSize)
    return false;
  *CalleeOut = Callee;
  return true;
}

// First call in evaluation order that has not been evaluated yet and that
// the engine decided to inline. Conservative and builtin calls never
// suspend; they are evaluated inline.
const Expr *Exploration::findPendingCall(const SymbolicState &St,
                                         const Expr *Ex,
                                         const FrameContext *Frame,
                                         const FunctionDecl **CalleeOut) {
  if (!Ex)
    return nullptr;
  switch (Ex->Kind) {
  case ExprKind::IntLiteral:
  case ExprKind::DeclRef:
    return nullptr;
  case ExprKind::Unary:
    return findPendingCall(St, Ex->Operand, Frame, CalleeOut);
  case ExprKind::Binary: {
    // Assignments evaluate the right side first.
    const Expr *First = Ex->BOp == BinOp::Assign ? Ex->Rhs : Ex->Lhs;
    const Expr *Second = Ex->BOp == BinOp::Assign ? Ex->Lhs : Ex->Rhs;
    if (const Expr *P = findPendingCall(St, First, Frame, CalleeOut))
      return P;
    return findPendingCall(St, Second, Frame, CalleeOut);
  }
  case ExprKind::Member:
    return findPendingCall(St, Ex->Base, Frame, CalleeOut);
  case ExprKind::Index:
    if (const Expr *P = findPendingCall(St, Ex->Base, Frame, CalleeOut))
      return P;
    return findPendingCall(St, Ex->IndexExpr, Frame, CalleeOut);
  case ExprKind::Call: {
    for (const Expr *A : Ex->Args)
      if (const Expr *P = findPendingCall(St, A, Frame, CalleeOut))
        return P;
    if (E.SM.hasExprBinding(St, Ex, Frame))
      return nullptr; // already evaluated
    if (inlinable(Ex, Frame, CalleeOut))
      return Ex;
    return nullptr;
  }
  }
  return nullptr;
}

void Exploration::doCallEnter(WorkItem &Item, ExplodedNode *Pred,
                              const Expr *Call, const FunctionDecl *Callee) {
  Evaluator Ev(*this, Item, Pred);
  std::vector<SVal> Args;
  for (const Expr *A : Call->Args) {
    auto V = Ev.eval(A);
    if (!V)
      return; // path sank while evaluating arguments
    Args.push_back(*V);
  }

  const Cfg *CalleeCfg = E.cfgFor(Callee);
  std::uint64_t CallerKey = blockKey(Pred->Point.Frame, Pred->Point.Block);
  const std::uint32_t *Inst = Item.Visits.find(CallerKey);
  // Distinct loop iterations get distinct frames, so block-visit budgets and
  // environment entries do not leak across iterations of the same call site.
  const Expr *SiteForFrame = Call;
  const FrameContext *NewFrame =
      E.Frames.pushInstance(Pred->Point.Frame, Callee, CalleeCfg, SiteForFrame,
                            Pred->Point.Block, Pred->Point.StmtIdx,
                            Inst ? *Inst : 0);

  SymbolicState St = Ev.St;
  for (std::size_t I = 0; I < Args.size(); ++I) {
    const MemRegion *PR = E.Regions.varRegion(
        Callee->Params[I], E.Regions.stackSpace(NewFrame->Id));
    St = E.SM.bindLoc(St, PR, Args[I]);
  }
  St.Frame = NewFrame;

  E.Stats.bump("inlined_calls");
  EdgeTag Tag;
  Tag.K = EdgeTag::Kind::CallEnter;
  Tag.Callee = Callee;
  Tag.CallSite = Call;

  ProgramPoint EnterP{ProgramPoint::Kind::CallEnter, NewFrame,
                      CalleeCfg->Entry, 0};
  auto [N, IsNew] = Graph.getNode(std::move(St), EnterP);
  Graph.addEdge(Pred, N, Tag);
  if (IsNew)
    enqueue(N, Item.Visits);
}

void Exploration::execStmtOrTerminator(WorkItem &Item) {
  ExplodedNode *N = Item.Node;
  const FrameContext *Frame = N->Point.Frame;
  const Cfg *G = Frame->Graph;
  const CfgBlock &B = G->block(N->Point.Block);

  if (N->Point.StmtIdx < B.Stmts.size()) {
    const Stmt *S = B.Stmts[N->Point.StmtIdx];
    const Expr *Root = S->Kind == StmtKind::DeclStmt
                           ? (S->Var ? S->Var->Init : nullptr)
                           : S->Value;
    const FunctionDecl *Callee = nullptr;
    if (const Expr *Pending = findPendingCall(N->State, Root, Frame, &Callee)) {
      doCallEnter(Item, N, Pending, Callee);
      return;
    }
    Evaluator Ev(*this, Item, N);
    if (S->Kind == StmtKind::DeclStmt) {
      if (S->Var->Init) {
        auto V = Ev.eval(S->Var->Init);
        if (!V)
          return;
        const MemRegion *R = E.Regions.varRegion(
            S->Var, E.Regions.stackSpace(Frame->Id));
        Ev.St = E.SM.bindLoc(Ev.St, R, *V);
      }
    } else if (S->Value) {
      if (!Ev.eval(S->Value))
        return;
    }
    SymbolicState Next = purgeFrameEnv(Ev.St, Frame);
    toPoint(Item, N, std::move(Next),
            {ProgramPoint::Kind::Stmt, Frame, N->Point.Block,
             N->Point.StmtIdx + 1},
            EdgeTag{});
    return;
  }

  // Terminator.
  switch (B.Term.K) {
  case CfgTerminator::Kind::Goto:
    toBlockEntrance(Item, N, purgeFrameEnv(N->State, Frame), B.Term.Succs[0],
                    EdgeTag{}, anchorLocOf(B, Frame));
    return;

  case CfgTerminator::Kind::NoReturn:
    E.Stats.bump("noreturn_path_ends");
    return;

  case CfgTerminator::Kind::Branch: {
    const FunctionDecl *Callee = nullptr;
    if (const Expr *Pending =
            findPendingCall(N->State, B.Term.Cond, Frame, &Callee)) {
      doCallEnter(Item, N, Pending, Callee);
      return;
    }
    Evaluator Ev(*this, Item, N);
    auto CondV = Ev.eval(B.Term.Cond);
    if (!CondV)
      return;
    SymbolicState Base = purgeFrameEnv(Ev.St, Frame);
    for (bool Truth : {true, false}) {
      AssumeOutcome Out = assume(Base, *CondV, Truth, E.SM);
      if (Out.Unsupported)
        E.Stats.bump("unsupported_assumptions");
      if (!Out.State) {
        E.Stats.bump("infeasible_paths");
        continue;
      }
      EdgeTag Tag;
      Tag.K = EdgeTag::Kind::Assume;
      Tag.CondExpr = B.Term.Cond;
      Tag.Val = *CondV;
      Tag.Truth = Truth;
      toBlockEntrance(Item, N, *Out.State, B.Term.Succs[Truth ? 0 : 1], Tag,
                      B.Term.Cond->Loc);
    }
    return;
  }

  case CfgTerminator::Kind::Return: {
    const Stmt *S = B.Term.ReturnStmt;
    const FunctionDecl *Callee = nullptr;
    if (S->Value)
      if (const Expr *Pending =
              findPendingCall(N->State, S->Value, Frame, &Callee)) {
        doCallEnter(Item, N, Pending, Callee);
        return;
      }
    Evaluator Ev(*this, Item, N);
    SVal Ret = SVal::unknown();
    if (S->Value) {
      auto V = Ev.eval(S->Value);
      if (!V)
        return;
      Ret = *V;
    }
    SymbolicState St = purgeFrameEnv(Ev.St, Frame);
    if (!Frame->Parent) {
      // Values returned from the analysis root escape to the caller we do
      // not see; keep their symbols alive through the final sweep.
      std::vector<const Symbol *> RetSyms;
      E.SM.symbolsOf(Ret, RetSyms);
      escapeMallocSymbols(St, RetSyms);
      toBlockEntrance(Item, N, std::move(St), G->Exit, EdgeTag{}, S->Loc,
                      RetSyms);
      return;
    }
    St = E.SM.bindExpr(St, Frame->CallSite, Frame->Parent, Ret);
    callExitTransition(Item, N, std::move(St), S->Loc);
    return;
  }
  }
}

void Exploration::step(WorkItem &Item) {
  ExplodedNode *N = Item.Node;
  switch (N->Point.K) {
  case ProgramPoint::Kind::BlockEntrance: {
    const Cfg *G = N->Point.Frame->Graph;
    if (N->Point.Block == G->Exit)
      return;
    toPoint(Item, N, N->State,
            {ProgramPoint::Kind::Stmt, N->Point.Frame, N->Point.Block, 0},
            EdgeTag{});
    return;
  }
  case ProgramPoint::Kind::Stmt:
    execStmtOrTerminator(Item);
    return;
  case ProgramPoint::Kind::CallEnter:
    toBlockEntrance(Item, N, N->State, N->Point.Frame->Graph->Entry, EdgeTag{},
                    N->Point.Frame->Fn->Loc);
    return;
  case ProgramPoint::Kind::CallExit:
    toPoint(Item, N, N->State,
            {ProgramPoint::Kind::Stmt, N->Point.Frame, N->Point.Block,
             N->Point.StmtIdx},
            EdgeTag{});
    return;
  }
}

void Exploration::explore(const FunctionDecl *F) {
  const Cfg *G = E.cfgFor(F);
  const FrameContext *Frame = E.Frames.topFrame(F, G);

  SymbolicState St;
  St.Frame = Frame;
  for (const VarDecl *P : F->Params) {
    const MemRegion *R =
        E.Regions.varRegion(P, E.Regions.stackSpace(Frame->Id));
    St = E.SM.bindLoc(
        St, R, SVal::sym(E.Syms.regionValue(R, E.SM.symTypeFor(P->Ty))));
  }

  auto [Root, IsNew] = Graph.getNode(std::move(St),
                                     {ProgramPoint::Kind::BlockEntrance, Frame,
                                      G->Entry, 0});
  (void)IsNew;
  enqueue(Root, {});

  while (!List.empty()) {
    if (Graph.size() > E.Opts.Limits.MaxNodesPerTopLevel) {
      E.Stats.bump("node_budget_stops");
      NodeBudgetHit = true;
      break;
    }
    WorkItem Item = dequeue();
    step(Item);
  }
  E.Stats.bump("nodes_created", Graph.size());
}

//===----------------------------------------------------------------------===//
// TuEngine top-level loop
//===----------------------------------------------------------------------===//

void TuEngine::run() {
  // Executable-line info even for functions the exploration never reaches.
  for (const FunctionDecl *F : Unit.Functions)
    if (F->hasBody() && !F->Builtin)
      cfgFor(F);

  CallGraph CG = buildCallGraph(Unit);
  std::vector<std::string> Order = topLevelOrder(CG);

  for (const std::string &Usr : Order) {
    const FunctionDecl *F = nullptr;
    for (FunctionDecl *Cand : Unit.Functions)
      if (Cand->Usr == Usr && Cand->hasBody() && !Cand->Imported)
        F = Cand;
    if (!F)
      continue;
    if (InlinedAnalyzedSameTu.count(Usr) && !Opts.ForceTopLevel.count(Usr)) {
      Stats.bump("skipped_top_level_inlined");
      continue;
    }
    analyzeTopLevel(F);
  }

  Stats.bump("mem_regions_total", Regions.totalRegions());
  Stats.bump("mem_element_regions", Regions.countOf(RegionKind::Element));
}

void TuEngine::analyzeTopLevel(const FunctionDecl *F) {
  Stats.bump("top_level_functions");
  Exploration X(*this);
  X.explore(F);
  std::vector<BugReport> Batch =
      finalizeReports(X.Graph, X.Raws, Unit, SM, Stats);
  for (BugReport &R : Batch)
    FinalReports.push_back(std::move(R));
}

} // namespace

struct TopLevelExploration::Impl {
  Impl(Ast &Unit, const AnalysisOptions &Opts, CtuContext *Ctu)
      : Engine(Unit, Opts, Ctu), X(Engine) {}
  TuEngine Engine;
  Exploration X;
};

TopLevelExploration::TopLevelExploration(Ast &Unit, const AnalysisOptions &Opts,
                                         CtuContext *Ctu)
    : P(std::make_unique<Impl>(Unit, Opts, Ctu)) {}

TopLevelExploration::~TopLevelExploration() = default;

bool TopLevelExploration::explore(const std::string &FnName) {
  const FunctionDecl *F = P->Engine.Unit.findFunction(FnName);
  if (!F || !F->hasBody())
    return false;
  P->X.explore(F);
  return true;
}

const ExplodedGraph &TopLevelExploration::graph() const { return P->X.Graph; }
StateManager &TopLevelExploration::states() { return P->Engine.SM; }
RegionManager &TopLevelExploration::regions() { return P->Engine.Regions; }
const std::vector<RawReport> &TopLevelExploration::rawReports() const {
  return P->X.Raws;
}
RunStats &TopLevelExploration::stats() { return P->Engine.Stats; }
const FrameContext *TopLevelExploration::rootFrame() const {
  for (const ExplodedNode &N : P->X.Graph.nodes())
    return N.Point.Frame;
  return nullptr;
}

TuAnalysisResult analyzeTu(Ast &Unit, const AnalysisOptions &Opts,
                           CtuContext *Ctu) {
  TuEngine Engine(Unit, Opts, Ctu);
  Engine.run();
  TuAnalysisResult Result;
  Result.Reports = dedupReports(std::move(Engine.FinalReports), &Engine.Stats);
  Result.Coverage = std::move(Engine.Coverage);
  Result.Stats = std::move(Engine.Stats);
  return Result;
}

} // namespace minisa
