//===--- Refutation.cpp - Bit-precise report refutation ------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Refutation.hpp"

#include <algorithm>
#include <sstream>

namespace minisa {

namespace {

bool isSupportedOp(BinOp Op) {
  switch (Op) {
  case BinOp::Add:
  case BinOp::Sub:
  case BinOp::Mul:
  case BinOp::Div:
  case BinOp::Rem:
  case BinOp::LT:
  case BinOp::LE:
  case BinOp::GT:
  case BinOp::GE:
  case BinOp::EQ:
  case BinOp::NE:
    return true;
  default:
    return false;
  }
}

void collectBases(const CondExpr &E, std::vector<std::uint32_t> &Order) {
  if (E.K == CondExpr::Kind::Base) {
    if (std::find(Order.begin(), Order.end(), E.BaseId) == Order.end())
      Order.push_back(E.BaseId);
    return;
  }
  for (const CondExpr &Kid : E.Kids)
    collectBases(Kid, Order);
}

bool opsSupported(const CondExpr &E) {
  if (E.K != CondExpr::Kind::Base && !isSupportedOp(E.Op))
    return false;
  for (const CondExpr &Kid : E.Kids)
    if (!opsSupported(Kid))
      return false;
  return true;
}

bool constantsFit(const CondExpr &E, std::int64_t Min, std::int64_t Max) {
  if (E.K == CondExpr::Kind::SymInt && (E.Konst < Min || E.Konst > Max))
    return false;
  for (const CondExpr &Kid : E.Kids)
    if (!constantsFit(Kid, Min, Max))
      return false;
  return true;
}

/// 32-bit range endpoints translate to the reduced width by saturating the
/// domain bounds; interior endpoints must be representable.
std::optional<RangeSet> translateRanges(const RangeSet &RS, unsigned Width) {
  RangeSet Out = RangeSet::empty(Width);
  std::int64_t SrcMin = RangeSet::minValue(RS.width());
  std::int64_t SrcMax = RangeSet::maxValue(RS.width());
  std::int64_t Min = RangeSet::minValue(Width);
  std::int64_t Max = RangeSet::maxValue(Width);
  for (auto [Lo, Hi] : RS.intervals()) {
    std::int64_t L = Lo == SrcMin ? Min : Lo;
    std::int64_t H = Hi == SrcMax ? Max : Hi;
    if (L < Min || L > Max || H < Min || H > Max)
      return std::nullopt;
    Out = Out.unionWith(RangeSet::range(Width, L, H));
  }
  return Out;
}

struct TreeEval {
  unsigned Width;
  const std::map<std::uint32_t, std::int64_t> &Assign;
  bool DivByZero = false;

  std::int64_t eval(const CondExpr &E) {
    switch (E.K) {
    case CondExpr::Kind::Base:
      return Assign.at(E.BaseId);
    case CondExpr::Kind::SymInt: {
      std::int64_t Inner = eval(E.Kids[0]);
      std::int64_t L = E.ConstOnLeft ? E.Konst : Inner;
      std::int64_t R = E.ConstOnLeft ? Inner : std::int64_t(E.Konst);
      return apply(E.Op, L, R);
    }
    case CondExpr::Kind::SymSym:
      return apply(E.Op, eval(E.Kids[0]), eval(E.Kids[1]));
    }
    return 0;
  }

  std::int64_t apply(BinOp Op, std::int64_t L, std::int64_t R) {
    switch (Op) {
    case BinOp::Add: return RangeSet::truncate(L + R, Width);
    case BinOp::Sub: return RangeSet::truncate(L - R, Width);
    case BinOp::Mul: return RangeSet::truncate(L * R, Width);
    case BinOp::Div:
      if (R == 0) {
        DivByZero = true;
        return 0;
      }
      return RangeSet::truncate(L / R, Width);
    case BinOp::Rem:
      if (R == 0) {
        DivByZero = true;
        return 0;
      }
      return RangeSet::truncate(L % R, Width);
    case BinOp::LT: return L < R;
    case BinOp::LE: return L <= R;
    case BinOp::GT: return L > R;
    case BinOp::GE: return L >= R;
    case BinOp::EQ: return L == R;
    case BinOp::NE: return L != R;
    default: return 0;
    }
  }
};

bool relHolds(BinOp Op, std::int64_t V, std::int64_t K) {
  switch (Op) {
  case BinOp::EQ: return V == K;
  case BinOp::NE: return V != K;
  case BinOp::LT: return V < K;
  case BinOp::LE: return V <= K;
  case BinOp::GT: return V > K;
  case BinOp::GE: return V >= K;
  default: return false;
  }
}

std::uint32_t maxSymbolDepth(const CondExpr &E,
                             const std::vector<std::uint32_t> &Order) {
  if (E.K == CondExpr::Kind::Base) {
    auto It = std::find(Order.begin(), Order.end(), E.BaseId);
    return std::uint32_t(It - Order.begin()) + 1;
  }
  std::uint32_t D = 0;
  for (const CondExpr &Kid : E.Kids)
    D = std::max(D, maxSymbolDepth(Kid, Order));
  return D;
}

} // namespace

RefuteResult refuteExact(const PathCondition &PC, unsigned Width,
                         unsigned MaxSymbols) {
  RefuteResult Result;
  if (Width != 4 && Width != 8 && Width != 16)
    return Result;

  std::vector<std::uint32_t> Order;
  for (const CondRecord &Rec : PC)
    collectBases(Rec.Tree, Order);
  if (Order.size() > MaxSymbols)
    return Result;

  std::int64_t Min = RangeSet::minValue(Width);
  std::int64_t Max = RangeSet::maxValue(Width);

  struct Prepared {
    const CondRecord *Rec;
    RangeSet Ranges{32};
    std::uint32_t Depth; // symbols settled once this many are assigned
  };
  std::vector<Prepared> Records;
  for (const CondRecord &Rec : PC) {
    if (!opsSupported(Rec.Tree) || !constantsFit(Rec.Tree, Min, Max))
      return Result;
    Prepared P{&Rec, RangeSet::empty(Width), maxSymbolDepth(Rec.Tree, Order)};
    if (Rec.K == CondRecord::Kind::Rel) {
      if (Rec.Konst < Min || Rec.Konst > Max)
        return Result;
    } else {
      std::optional<RangeSet> RS = translateRanges(Rec.Ranges, Width);
      if (!RS)
        return Result;
      P.Ranges = *RS;
    }
    Records.push_back(std::move(P));
  }

  // Exhaustive enumeration in lexicographic order. Records are checked as
  // soon as all of their symbols have values, pruning whole subtrees.
  std::vector<std::vector<const Prepared *>> ByDepth(Order.size() + 1);
  for (const Prepared &P : Records)
    ByDepth[P.Depth].push_back(&P);

  std::map<std::uint32_t, std::int64_t> Assign;

  std::function<bool(std::size_t)> Search = [&](std::size_t Depth) -> bool {
    for (const Prepared *P : ByDepth[Depth]) {
      TreeEval TE{Width, Assign};
      std::int64_t V = TE.eval(P->Rec->Tree);
      if (TE.DivByZero)
        return false;
      bool Holds = P->Rec->K == CondRecord::Kind::Rel
                       ? relHolds(P->Rec->Op, V, P->Rec->Konst)
                       : P->Ranges.contains(V);
      if (!Holds)
        return false;
    }
    if (Depth == Order.size())
      return true;
    for (std::int64_t V = Min; V <= Max; ++V) {
      Assign[Order[Depth]] = V;
      if (Search(Depth + 1))
        return true;
    }
    Assign.erase(Order[Depth]);
    return false;
  };

  if (Search(0)) {
    Result.Verdict = RefuteVerdict::Feasible;
    Result.Model = Assign;
  } else {
    Result.Verdict = RefuteVerdict::Infeasible;
  }
  return Result;
}

//===----------------------------------------------------------------------===//
// SMT-LIB emission
//===----------------------------------------------------------------------===//

namespace {

std::string hexConst(std::int64_t V, unsigned Width) {
  std::uint64_t U = std::uint64_t(V) & ((Width == 64) ? ~0ULL
                                                      : ((1ULL << Width) - 1));
  static const char *Digits = "0123456789abcdef";
  std::string Out(Width / 4, '0');
  for (int I = int(Out.size()) - 1; I >= 0; --I) {
    Out[std::size_t(I)] = Digits[U & 0xF];
    U >>= 4;
  }
  return "#x" + Out;
}

const char *bvArith(BinOp Op) {
  switch (Op) {
  case BinOp::Add: return "bvadd";
  case BinOp::Sub: return "bvsub";
  case BinOp::Mul: return "bvmul";
  case BinOp::Div: return "bvsdiv";
  case BinOp::Rem: return "bvsrem";
  default: return nullptr;
  }
}

const char *bvRel(BinOp Op) {
  switch (Op) {
  case BinOp::LT: return "bvslt";
  case BinOp::LE: return "bvsle";
  case BinOp::GT: return "bvsgt";
  case BinOp::GE: return "bvsge";
  case BinOp::EQ: return "=";
  case BinOp::NE: return "distinct";
  default: return nullptr;
  }
}

struct SmtPrinter {
  unsigned Width;
  const std::vector<std::uint32_t> &Order;
  bool Failed = false;

  std::string symName(std::uint32_t BaseId) const {
    auto It = std::find(Order.begin(), Order.end(), BaseId);
    return "s" + std::to_string(It - Order.begin());
  }

  /// Renders a bitvector-valued term; comparisons have no bitvector value, so
  /// they may only appear at the root of a record.
  std::string term(const CondExpr &E) {
    switch (E.K) {
    case CondExpr::Kind::Base:
      return symName(E.BaseId);
    case CondExpr::Kind::SymInt: {
      const char *Op = bvArith(E.Op);
      if (!Op) {
        Failed = true;
        return "?";
      }
      std::string Inner = term(E.Kids[0]);
      std::string K = hexConst(E.Konst, Width);
      return std::string("(") + Op + " " + (E.ConstOnLeft ? K : Inner) + " " +
             (E.ConstOnLeft ? Inner : K) + ")";
    }
    case CondExpr::Kind::SymSym: {
      const char *Op = bvArith(E.Op);
      if (!Op) {
        Failed = true;
        return "?";
      }
      return std::string("(") + Op + " " + term(E.Kids[0]) + " " +
             term(E.Kids[1]) + ")";
    }
    }
    Failed = true;
    return "?";
  }

  /// Renders a boolean for a comparison-rooted tree.
  std::string boolOf(const CondExpr &E) {
    const char *Rel = bvRel(E.Op);
    if (E.K == CondExpr::Kind::Base || !Rel) {
      Failed = true;
      return "?";
    }
    if (E.K == CondExpr::Kind::SymInt) {
      std::string Inner = term(E.Kids[0]);
      std::string K = hexConst(E.Konst, Width);
      return std::string("(") + Rel + " " + (E.ConstOnLeft ? K : Inner) + " " +
             (E.ConstOnLeft ? Inner : K) + ")";
    }
    return std::string("(") + Rel + " " + term(E.Kids[0]) + " " +
           term(E.Kids[1]) + ")";
  }

  bool isComparisonTree(const CondExpr &E) const {
    return E.K != CondExpr::Kind::Base && isComparisonOp(E.Op);
  }

  /// One assertion body for "tree value lies in truth set {0}/{1}".
  std::string comparisonTruth(const CondExpr &E, bool Truth) {
    std::string B = boolOf(E);
    return Truth ? B : "(not " + B + ")";
  }
};

} // namespace

std::optional<std::string> emitSmtLib(const PathCondition &PC, unsigned Width) {
  std::vector<std::uint32_t> Order;
  for (const CondRecord &Rec : PC)
    collectBases(Rec.Tree, Order);

  SmtPrinter P{Width, Order};
  std::vector<std::string> Asserts;

  for (const CondRecord &Rec : PC) {
    if (!opsSupported(Rec.Tree))
      return std::nullopt;
    if (P.isComparisonTree(Rec.Tree)) {
      // The record constrains a 0/1-valued comparison.
      bool T1, T0;
      if (Rec.K == CondRecord::Kind::Rel) {
        T1 = relHolds(Rec.Op, 1, Rec.Konst);
        T0 = relHolds(Rec.Op, 0, Rec.Konst);
      } else {
        T1 = Rec.Ranges.contains(1);
        T0 = Rec.Ranges.contains(0);
      }
      if (T1 && T0)
        continue;
      if (!T1 && !T0)
        Asserts.push_back("false");
      else
        Asserts.push_back(P.comparisonTruth(Rec.Tree, T1));
    } else if (Rec.K == CondRecord::Kind::Rel) {
      const char *Rel = bvRel(Rec.Op);
      if (!Rel)
        return std::nullopt;
      Asserts.push_back(std::string("(") + Rel + " " + P.term(Rec.Tree) + " " +
                        hexConst(Rec.Konst, Width) + ")");
    } else {
      if (Rec.Ranges.isFull())
        continue;
      std::string T = P.term(Rec.Tree);
      std::vector<std::string> Parts;
      for (auto [Lo, Hi] : Rec.Ranges.intervals()) {
        if (Lo == Hi)
          Parts.push_back("(= " + T + " " + hexConst(Lo, Width) + ")");
        else
          Parts.push_back("(and (bvsge " + T + " " + hexConst(Lo, Width) +
                          ") (bvsle " + T + " " + hexConst(Hi, Width) + "))");
      }
      if (Parts.empty())
        Asserts.push_back("false");
      else if (Parts.size() == 1)
        Asserts.push_back(Parts[0]);
      else {
        std::string Or = "(or";
        for (const std::string &Pt : Parts)
          Or += " " + Pt;
        Asserts.push_back(Or + ")");
      }
    }
    if (P.Failed)
      return std::nullopt;
  }

  std::ostringstream OS;
  for (std::size_t I = 0; I < Order.size(); ++I)
    OS << "(declare-const s" << I << " (_ BitVec " << Width << "))\n";
  for (const std::string &A : Asserts)
    OS << "(assert " << A << ")\n";
  OS << "(check-sat)\n(get-model)\n";
  return OS.str();
}

std::size_t refuteReports(std::vector<BugReport> &Reports,
                          const RefuteOptions &Opts, RunStats &Stats) {
  if (!Opts.Enabled)
    return 0;
  std::vector<BugReport> Kept;
  std::size_t Dropped = 0;
  for (BugReport &R : Reports) {
    if (!R.Suppressed) {
      RefuteResult RR = refuteExact(R.Conditions, Opts.Width, Opts.MaxSymbols);
      if (RR.Verdict == RefuteVerdict::Infeasible) {
        ++Dropped;
        continue;
      }
    }
    Kept.push_back(std::move(R));
  }
  Reports = std::move(Kept);
  Stats.bump("refuted_reports", Dropped);
  return Dropped;
}

} // namespace minisa
