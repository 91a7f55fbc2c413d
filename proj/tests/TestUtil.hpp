//===--- TestUtil.hpp - Shared test helpers and oracles --------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The oracles here are deliberately independent of the analyzer: a direct
// AST interpreter and a CFG walker for concrete execution equivalence, and a
// brute-force evaluator for solver assumptions at reduced widths.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/Ast.hpp"
#include "minisa/Cfg.hpp"
#include "minisa/ConstraintSolver.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace minisa::test {

inline std::unique_ptr<Ast> parseOk(const std::string &Source,
                                    const std::string &Name = "test.mc") {
  ParseResult PR = parseTranslationUnit(Source, Name);
  if (!PR.ok()) {
    std::string Msg = "parse failed:";
    for (const Diagnostic &D : PR.Diags)
      Msg += " [" + std::to_string(D.Loc.Line) + ":" +
             std::to_string(D.Loc.Col) + " " + D.Message + "]";
    throw std::runtime_error(Msg);
  }
  return std::move(PR.Unit);
}

inline std::int64_t wrap32(std::int64_t V) {
  return RangeSet::truncate(V, 32);
}

//===----------------------------------------------------------------------===//
// Concrete execution oracles (ints only: no pointers, records or calls)
//===----------------------------------------------------------------------===//

struct ConcreteResult {
  std::optional<std::int64_t> Ret;
  bool Trap = false;    // division by zero
  bool OutOfGas = false;
  std::vector<const Stmt *> Executed; // DeclStmt/ExprStmt/Return in order
};

class ConcreteEval {
public:
  std::map<const VarDecl *, std::int64_t> Vars;
  bool Trap = false;

  std::int64_t evalExpr(const Expr *E) {
    switch (E->Kind) {
    case ExprKind::IntLiteral:
      return E->IntValue;
    case ExprKind::DeclRef:
      return Vars.count(E->Ref) ? Vars[E->Ref] : 0;
    case ExprKind::Unary:
      if (E->UOp == UnaryOp::Neg)
        return wrap32(-evalExpr(E->Operand));
      if (E->UOp == UnaryOp::Not)
        return evalExpr(E->Operand) == 0 ? 1 : 0;
      Trap = true;
      return 0;
    case ExprKind::Binary: {
      if (E->BOp == BinOp::Assign) {
        std::int64_t V = evalExpr(E->Rhs);
        Vars[E->Lhs->Ref] = V;
        return V;
      }
      if (E->BOp == BinOp::LAnd)
        return evalExpr(E->Lhs) != 0 && evalExpr(E->Rhs) != 0;
      if (E->BOp == BinOp::LOr)
        return evalExpr(E->Lhs) != 0 || evalExpr(E->Rhs) != 0;
      std::int64_t L = evalExpr(E->Lhs);
      std::int64_t R = evalExpr(E->Rhs);
      switch (E->BOp) {
      case BinOp::Add: return wrap32(L + R);
      case BinOp::Sub: return wrap32(L - R);
      case BinOp::Mul: return wrap32(L * R);
      case BinOp::Div:
        if (R == 0) {
          Trap = true;
          return 0;
        }
        return wrap32(L / R);
      case BinOp::Rem:
        if (R == 0) {
          Trap = true;
          return 0;
        }
        return wrap32(L % R);
      case BinOp::LT: return L < R;
      case BinOp::LE: return L <= R;
      case BinOp::GT: return L > R;
      case BinOp::GE: return L >= R;
      case BinOp::EQ: return L == R;
      case BinOp::NE: return L != R;
      default: return 0;
      }
    }
    default:
      Trap = true;
      return 0;
    }
  }
};

/// Direct interpretation of the AST.
inline ConcreteResult interpretAst(const FunctionDecl *F,
                                   const std::vector<std::int64_t> &Args,
                                   int MaxSteps = 100000) {
  ConcreteResult Result;
  ConcreteEval Ev;
  for (std::size_t I = 0; I < F->Params.size(); ++I)
    Ev.Vars[F->Params[I]] = Args[I];

  int Gas = MaxSteps;
  std::function<bool(const Stmt *)> Run = [&](const Stmt *S) -> bool {
    if (--Gas <= 0) {
      Result.OutOfGas = true;
      return false;
    }
    switch (S->Kind) {
    case StmtKind::Compound:
      for (const Stmt *C : S->Body)
        if (!Run(C))
          return false;
      return true;
    case StmtKind::If:
      if (Ev.evalExpr(S->Cond) != 0)
        return !Ev.Trap && Run(S->Then);
      if (Ev.Trap)
        return false;
      return S->Else ? Run(S->Else) : true;
    case StmtKind::While:
      while (Ev.evalExpr(S->Cond) != 0) {
        if (Ev.Trap || --Gas <= 0) {
          Result.OutOfGas = Gas <= 0;
          return false;
        }
        if (!Run(S->LoopBody))
          return false;
      }
      return !Ev.Trap;
    case StmtKind::Return:
      Result.Executed.push_back(S);
      if (S->Value)
        Result.Ret = Ev.evalExpr(S->Value);
      return false; // unwinds
    case StmtKind::DeclStmt:
      Result.Executed.push_back(S);
      if (S->Var->Init)
        Ev.Vars[S->Var] = Ev.evalExpr(S->Var->Init);
      return !Ev.Trap;
    case StmtKind::ExprStmt:
      Result.Executed.push_back(S);
      Ev.evalExpr(S->Value);
      return !Ev.Trap;
    }
    return true;
  };
  Run(F->Body);
  Result.Trap = Ev.Trap;
  return Result;
}

/// The same program executed by walking the CFG.
inline ConcreteResult interpretCfg(const Cfg &G,
                                   const std::vector<std::int64_t> &Args,
                                   int MaxSteps = 100000) {
  ConcreteResult Result;
  ConcreteEval Ev;
  for (std::size_t I = 0; I < G.Fn->Params.size(); ++I)
    Ev.Vars[G.Fn->Params[I]] = Args[I];

  std::uint32_t Block = G.Entry;
  int Gas = MaxSteps;
  while (Block != G.Exit) {
    if (--Gas <= 0) {
      Result.OutOfGas = true;
      return Result;
    }
    const CfgBlock &B = G.block(Block);
    for (const Stmt *S : B.Stmts) {
      Result.Executed.push_back(S);
      if (S->Kind == StmtKind::DeclStmt) {
        if (S->Var->Init)
          Ev.Vars[S->Var] = Ev.evalExpr(S->Var->Init);
      } else if (S->Value) {
        Ev.evalExpr(S->Value);
      }
      if (Ev.Trap) {
        Result.Trap = true;
        return Result;
      }
    }
    switch (B.Term.K) {
    case CfgTerminator::Kind::Goto:
      Block = B.Term.Succs[0];
      break;
    case CfgTerminator::Kind::Branch: {
      std::int64_t C = Ev.evalExpr(B.Term.Cond);
      if (Ev.Trap) {
        Result.Trap = true;
        return Result;
      }
      Block = C != 0 ? B.Term.Succs[0] : B.Term.Succs[1];
      break;
    }
    case CfgTerminator::Kind::Return: {
      const Stmt *S = B.Term.ReturnStmt;
      Result.Executed.push_back(S);
      if (S->Value)
        Result.Ret = Ev.evalExpr(S->Value);
      if (Ev.Trap) {
        Result.Trap = true;
        Result.Ret.reset();
      }
      return Result;
    }
    case CfgTerminator::Kind::NoReturn:
      return Result;
    }
  }
  return Result;
}

//===----------------------------------------------------------------------===//
// Brute-force assumption oracle at a reduced width
//===----------------------------------------------------------------------===//

inline std::int64_t truncW(std::int64_t V, unsigned W) {
  return RangeSet::truncate(V, W);
}

/// Evaluates a symbol tree under an assignment of base symbols, with
/// wraparound arithmetic at the given width. Division by zero poisons the
/// assignment.
inline std::optional<std::int64_t>
evalSymbolConcrete(const Symbol *S, unsigned W,
                   const std::map<const Symbol *, std::int64_t> &Assign) {
  switch (S->Kind) {
  case SymbolKind::RegionValue:
  case SymbolKind::Conjured:
    return Assign.at(S);
  case SymbolKind::SymInt: {
    auto Inner = evalSymbolConcrete(S->Lhs, W, Assign);
    if (!Inner)
      return std::nullopt;
    std::int64_t L = S->ConstOnLeft ? S->Konst : *Inner;
    std::int64_t R = S->ConstOnLeft ? *Inner : std::int64_t(S->Konst);
    switch (S->Op) {
    case BinOp::Add: return truncW(L + R, W);
    case BinOp::Sub: return truncW(L - R, W);
    case BinOp::Mul: return truncW(L * R, W);
    case BinOp::Div:
      if (R == 0)
        return std::nullopt;
      return truncW(L / R, W);
    case BinOp::Rem:
      if (R == 0)
        return std::nullopt;
      return truncW(L % R, W);
    case BinOp::LT: return L < R;
    case BinOp::LE: return L <= R;
    case BinOp::GT: return L > R;
    case BinOp::GE: return L >= R;
    case BinOp::EQ: return L == R;
    case BinOp::NE: return L != R;
    default: return std::nullopt;
    }
  }
  case SymbolKind::SymSym: {
    auto L = evalSymbolConcrete(S->Lhs, W, Assign);
    auto R = evalSymbolConcrete(S->Rhs, W, Assign);
    if (!L || !R)
      return std::nullopt;
    switch (S->Op) {
    case BinOp::Add: return truncW(*L + *R, W);
    case BinOp::Sub: return truncW(*L - *R, W);
    case BinOp::Mul: return truncW(*L * *R, W);
    case BinOp::LT: return *L < *R;
    case BinOp::LE: return *L <= *R;
    case BinOp::GT: return *L > *R;
    case BinOp::GE: return *L >= *R;
    case BinOp::EQ: return *L == *R;
    case BinOp::NE: return *L != *R;
    default: return std::nullopt;
    }
  }
  }
  return std::nullopt;
}

/// True when some assignment over Bases satisfies every (value, truth) pair.
inline bool
oracleSatisfiable(const std::vector<std::pair<SVal, bool>> &Assumptions,
                  const std::vector<const Symbol *> &Bases, unsigned W) {
  std::map<const Symbol *, std::int64_t> Assign;
  std::int64_t Min = RangeSet::minValue(W), Max = RangeSet::maxValue(W);

  std::function<bool(std::size_t)> Try = [&](std::size_t Idx) -> bool {
    if (Idx == Bases.size()) {
      for (const auto &[V, Truth] : Assumptions) {
        std::optional<std::int64_t> Val;
        if (V.isConcrete())
          Val = V.asInt();
        else if (const Symbol *S = V.symbol())
          Val = evalSymbolConcrete(S, W, Assign);
        else
          continue; // unknown: no constraint
        if (!Val)
          return false; // division by zero
        if ((*Val != 0) != Truth)
          return false;
      }
      return true;
    }
    for (std::int64_t V = Min; V <= Max; ++V) {
      Assign[Bases[Idx]] = V;
      if (Try(Idx + 1))
        return true;
    }
    return false;
  };
  return Try(0);
}

//===----------------------------------------------------------------------===//
// Temp directories
//===----------------------------------------------------------------------===//

class TempDir {
public:
  explicit TempDir(const std::string &Hint) {
    static std::atomic<unsigned> Counter{0};
    Path = std::filesystem::temp_directory_path() /
           ("minisa_test_" + Hint + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(Counter.fetch_add(1)));
    std::filesystem::create_directories(Path);
  }
  ~TempDir() {
    std::error_code EC;
    std::filesystem::remove_all(Path, EC);
  }
  std::string str() const { return Path.string(); }
  std::string file(const std::string &Name, const std::string &Content) const {
    std::string P = (Path / Name).string();
    std::ofstream(P) << Content;
    return P;
  }

private:
  std::filesystem::path Path;
};

} // namespace minisa::test
