//===--- BugReporting.cpp - Paths, suppression, dedup --------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/BugReporting.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace minisa {

const char *pathEventKindName(PathEvent::Kind K) {
  switch (K) {
  case PathEvent::Kind::Assume: return "assume";
  case PathEvent::Kind::Call: return "call";
  case PathEvent::Kind::Alloc: return "alloc";
  case PathEvent::Kind::Origin: return "origin";
  case PathEvent::Kind::Warning: return "warning";
  }
  return "event";
}

std::vector<std::string> BugReport::referencedFiles() const {
  std::vector<std::string> Files{WarnLoc.File};
  for (const PathEvent &E : Path) {
    if (E.Loc.File.empty())
      continue;
    if (std::find(Files.begin(), Files.end(), E.Loc.File) == Files.end())
      Files.push_back(E.Loc.File);
  }
  return Files;
}

namespace {

struct PathStep {
  const ExplodedNode *Node;
  EdgeTag TagFromPred; // tag on the edge arriving at Node
};

// Shortest backward walk to a root; breadth-first, first-found parent wins,
// so the result is deterministic.
std::vector<PathStep> reconstructPath(const ExplodedNode *End) {
  std::map<const ExplodedNode *, std::pair<const ExplodedNode *, EdgeTag>>
      ParentOf;
  std::deque<const ExplodedNode *> Queue{End};
  ParentOf[End] = {nullptr, EdgeTag{}};
  const ExplodedNode *Root = nullptr;
  while (!Queue.empty()) {
    const ExplodedNode *N = Queue.front();
    Queue.pop_front();
    if (N->Preds.empty()) {
      Root = N;
      break;
    }
    for (const auto &[Pred, Tag] : N->Preds) {
      if (ParentOf.count(Pred))
        continue;
      ParentOf[Pred] = {N, Tag};
      Queue.push_back(Pred);
    }
  }
  std::vector<PathStep> Steps;
  if (!Root)
    return Steps;
  const ExplodedNode *Cur = Root;
  Steps.push_back({Cur, EdgeTag{}});
  while (Cur != End) {
    auto [Child, Tag] = ParentOf.at(Cur);
    Steps.push_back({Child, Tag});
    Cur = Child;
  }
  return Steps;
}

SourceLoc pointLoc(const ExplodedNode &N) {
  if (N.Point.K != ProgramPoint::Kind::Stmt)
    return {};
  const CfgBlock &B = N.Point.Frame->Graph->block(N.Point.Block);
  if (N.Point.StmtIdx < B.Stmts.size())
    return B.Stmts[N.Point.StmtIdx]->Loc;
  switch (B.Term.K) {
  case CfgTerminator::Kind::Branch:
    return B.Term.Cond->Loc;
  case CfgTerminator::Kind::Return:
  case CfgTerminator::Kind::NoReturn:
    return B.Term.ReturnStmt ? B.Term.ReturnStmt->Loc : SourceLoc{};
  default:
    return {};
  }
}

class ReportBuilder {
public:
  ReportBuilder(const Ast &Unit, StateManager &SM, RunStats &Stats)
      : Unit(Unit), SM(SM), Stats(Stats) {}

  const Ast &Unit;
  StateManager &SM;
  RunStats &Stats;

  ResolvedLoc resolve(SourceLoc L) const {
    ResolvedLoc R;
    R.File = L.File < Unit.Files.size() ? Unit.Files[L.File] : "<unknown>";
    R.Line = L.Line;
    R.Col = L.Col;
    return R;
  }

  CondExpr convertSymbol(const Symbol *S) const {
    CondExpr E;
    switch (S->Kind) {
    case SymbolKind::RegionValue:
    case SymbolKind::Conjured:
      E.K = CondExpr::Kind::Base;
      E.BaseId = S->Id;
      break;
    case SymbolKind::SymInt:
      E.K = CondExpr::Kind::SymInt;
      E.Op = S->Op;
      E.Konst = S->Konst;
      E.ConstOnLeft = S->ConstOnLeft;
      E.Kids.push_back(convertSymbol(S->Lhs));
      break;
    case SymbolKind::SymSym:
      E.K = CondExpr::Kind::SymSym;
      E.Op = S->Op;
      E.Kids.push_back(convertSymbol(S->Lhs));
      E.Kids.push_back(convertSymbol(S->Rhs));
      break;
    }
    return E;
  }

  BugReport build(const RawReport &Raw, const std::vector<PathStep> &Steps) {
    BugReport R;
    R.CheckerId = Raw.CheckerId;
    R.Message = Raw.Message;
    R.WarnLoc = resolve(Raw.WarnLoc);
    R.UniqueLoc = resolve(Raw.UniqueLoc);
    R.FnUsr = Raw.FnUsr;

    if (!Steps.empty()) {
      const ExplodedNode *Root = Steps.front().Node;
      R.Path.push_back({PathEvent::Kind::Call,
                        resolve(Root->Point.Frame->Fn->Loc),
                        "Entering '" + Root->Point.Frame->Fn->Name + "'"});
    }

    bool AllocEmitted = Raw.AllocLoc.Line == 0;
    for (std::size_t I = 1; I < Steps.size(); ++I) {
      const EdgeTag &Tag = Steps[I].TagFromPred;
      const ExplodedNode *N = Steps[I].Node;
      switch (Tag.K) {
      case EdgeTag::Kind::Assume:
        R.Path.push_back({PathEvent::Kind::Assume, resolve(Tag.CondExpr->Loc),
                          "Assuming " + printExpr(Tag.CondExpr) + " is " +
                              (Tag.Truth ? "true" : "false")});
        break;
      case EdgeTag::Kind::CallEnter:
        R.Path.push_back({PathEvent::Kind::Call, resolve(Tag.CallSite->Loc),
                          "Calling '" + Tag.Callee->Name + "'"});
        break;
      case EdgeTag::Kind::CallExit:
        R.Path.push_back({PathEvent::Kind::Call, resolve(Tag.CallSite->Loc),
                          "Returning from '" + Tag.Callee->Name + "'"});
        break;
      case EdgeTag::Kind::Widen: {
        const CfgBlock &B = N->Point.Frame->Graph->block(N->Point.Block);
        SourceLoc L = B.LoopStmt ? B.LoopStmt->Loc : SourceLoc{};
        R.Path.push_back({PathEvent::Kind::Origin, resolve(L),
                          "Loop effects over-approximated"});
        break;
      }
      case EdgeTag::Kind::Flow:
        break;
      }
      if (!AllocEmitted) {
        SourceLoc L = pointLoc(*N);
        if (L == Raw.AllocLoc || (L.File == Raw.AllocLoc.File &&
                                  L.Line == Raw.AllocLoc.Line)) {
          R.Path.push_back({PathEvent::Kind::Alloc, resolve(Raw.AllocLoc),
                            "Memory is allocated"});
          AllocEmitted = true;
        }
      }
    }
    if (!AllocEmitted)
      R.Path.push_back({PathEvent::Kind::Alloc, resolve(Raw.AllocLoc),
                        "Memory is allocated"});

    addOriginEvent(R, Raw, Steps);
    R.Path.push_back(
        {PathEvent::Kind::Warning, resolve(Raw.WarnLoc), Raw.Message});

    runInlineDefensiveVisitor(R, Raw, Steps);
    collectConditions(R, Raw, Steps);
    return R;
  }

  // Track where a concrete bad value came from: the literal itself, the
  // initializer, or the last assignment to the lvalue before the warning.
  void addOriginEvent(BugReport &R, const RawReport &Raw,
                      const std::vector<PathStep> &Steps) {
    if (Raw.Culprit || !Raw.BugExpr || Raw.IsLeak)
      return;
    const Expr *E = Raw.BugExpr;
    if (E->Kind == ExprKind::IntLiteral) {
      R.Path.push_back({PathEvent::Kind::Origin, resolve(E->Loc),
                        "The value " + std::to_string(E->IntValue) +
                            " originates here"});
      return;
    }
    if (!E->isLvalue())
      return;
    std::string LvalueText = printExpr(E);
    for (std::size_t I = Steps.size(); I-- > 0;) {
      const ExplodedNode *N = Steps[I].Node;
      if (N->Point.K != ProgramPoint::Kind::Stmt)
        continue;
      const CfgBlock &B = N->Point.Frame->Graph->block(N->Point.Block);
      if (N->Point.StmtIdx >= B.Stmts.size())
        continue;
      const Stmt *S = B.Stmts[N->Point.StmtIdx];
      if (S->Kind == StmtKind::DeclStmt && S->Var && S->Var->Init &&
          S->Var->Name == LvalueText) {
        R.Path.push_back({PathEvent::Kind::Origin, resolve(S->Loc),
                          "'" + S->Var->Name + "' initialized here"});
        return;
      }
      if (S->Kind == StmtKind::ExprStmt && S->Value &&
          S->Value->Kind == ExprKind::Binary &&
          S->Value->BOp == BinOp::Assign &&
          printExpr(S->Value->Lhs) == LvalueText) {
        R.Path.push_back({PathEvent::Kind::Origin, resolve(S->Loc),
                          "The value is assigned to '" + LvalueText + "'"});
        return;
      }
    }
  }

  // Inline defensive checks: a null/zero constraint born strictly deeper than
  // the warning frame, with no equally constraining assumption at the warning
  // depth or shallower, marks the report as a likely false positive.
  void runInlineDefensiveVisitor(BugReport &R, const RawReport &Raw,
                                 const std::vector<PathStep> &Steps) {
    if (!Raw.Culprit)
      return;
    if (Raw.CheckerId != "core.NullDereference" &&
        Raw.CheckerId != "core.DivideZero")
      return;
    unsigned WarnDepth = Raw.EndNode->frameDepth();
    bool BecameZeroDeeper = false;
    bool PinnedAtOrAbove = false;
    for (std::size_t I = 1; I < Steps.size(); ++I) {
      const EdgeTag &Tag = Steps[I].TagFromPred;
      if (Tag.K != EdgeTag::Kind::Assume)
        continue;
      const ExplodedNode *Prev = Steps[I - 1].Node;
      const ExplodedNode *Cur = Steps[I].Node;
      bool Before = SM.rangeOf(Prev->State, Raw.Culprit).isPoint(0);
      bool After = SM.rangeOf(Cur->State, Raw.Culprit).isPoint(0);
      unsigned Depth = Cur->frameDepth();
      if (!Before && After && Depth > WarnDepth)
        BecameZeroDeeper = true;
      if (Depth <= WarnDepth && assumptionPinsToZero(Tag, Raw.Culprit))
        PinnedAtOrAbove = true;
    }
    if (BecameZeroDeeper && !PinnedAtOrAbove) {
      R.Suppressed = true;
      R.SuppressReason = "inline-defensive-check";
      Stats.bump("suppressed_inline_defensive");
    }
  }

  bool assumptionPinsToZero(const EdgeTag &Tag, const Symbol *Culprit) {
    SymbolicState Fresh;
    AssumeOutcome Out = assume(Fresh, Tag.Val, Tag.Truth, SM);
    if (!Out.State)
      return false;
    return SM.rangeOf(*Out.State, Culprit).isPoint(0);
  }

  void collectConditions(BugReport &R, const RawReport &Raw,
                         const std::vector<PathStep> &Steps) {
    for (std::size_t I = 1; I < Steps.size(); ++I) {
      const EdgeTag &Tag = Steps[I].TagFromPred;
      if (Tag.K != EdgeTag::Kind::Assume)
        continue;
      if (const Symbol *S = Tag.Val.symbol()) {
        CondRecord Rec;
        Rec.K = CondRecord::Kind::Rel;
        Rec.Tree = convertSymbol(S);
        Rec.Op = Tag.Truth ? BinOp::NE : BinOp::EQ;
        Rec.Konst = 0;
        R.Conditions.push_back(std::move(Rec));
      }
    }
    Raw.EndNode->State.Constraints.forEach(
        [&](const Symbol *S, const RangeSet &RS) {
          CondRecord Rec;
          Rec.K = CondRecord::Kind::InRanges;
          Rec.Tree = convertSymbol(S);
          Rec.Ranges = RS;
          R.Conditions.push_back(std::move(Rec));
        });
  }
};

} // namespace

std::vector<BugReport> finalizeReports(const ExplodedGraph &G,
                                       const std::vector<RawReport> &Raws,
                                       const Ast &Unit, StateManager &SM,
                                       RunStats &Stats) {
  (void)G;
  ReportBuilder Builder(Unit, SM, Stats);
  std::vector<BugReport> Out;
  for (const RawReport &Raw : Raws) {
    std::vector<PathStep> Steps = reconstructPath(Raw.EndNode);
    Out.push_back(Builder.build(Raw, Steps));
  }
  Stats.bump("reports_generated", Raws.size());
  return Out;
}

std::vector<BugReport> dedupReports(std::vector<BugReport> Reports,
                                    RunStats *Stats) {
  auto eventLocSeq = [](const BugReport &R) {
    std::vector<ResolvedLoc> Seq;
    Seq.reserve(R.Path.size());
    for (const PathEvent &E : R.Path)
      Seq.push_back(E.Loc);
    return Seq;
  };
  // Prefer unsuppressed, then fewest events, then the lexicographically
  // smallest event-location sequence.
  auto better = [&](const BugReport &A, const BugReport &B) {
    if (A.Suppressed != B.Suppressed)
      return !A.Suppressed;
    if (A.Path.size() != B.Path.size())
      return A.Path.size() < B.Path.size();
    auto SA = eventLocSeq(A), SB = eventLocSeq(B);
    if (SA != SB)
      return SA < SB;
    return A.Message < B.Message;
  };

  std::map<std::tuple<std::string, ResolvedLoc, std::string>, BugReport> Best;
  std::size_t Removed = 0;
  for (BugReport &R : Reports) {
    auto Key = std::make_tuple(R.CheckerId, R.UniqueLoc, R.FnUsr);
    auto It = Best.find(Key);
    if (It == Best.end()) {
      Best.emplace(std::move(Key), std::move(R));
      continue;
    }
    ++Removed;
    if (better(R, It->second))
      It->second = std::move(R);
  }
  if (Stats)
    Stats->bump("dedup_removed_reports", Removed);

  std::vector<BugReport> Out;
  Out.reserve(Best.size());
  for (auto &[Key, R] : Best)
    Out.push_back(std::move(R));
  std::sort(Out.begin(), Out.end(), [](const BugReport &A, const BugReport &B) {
    if (!(A.WarnLoc == B.WarnLoc))
      return A.WarnLoc < B.WarnLoc;
    if (A.CheckerId != B.CheckerId)
      return A.CheckerId < B.CheckerId;
    return A.Message < B.Message;
  });
  return Out;
}

} // namespace minisa
