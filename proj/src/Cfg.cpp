//===--- Cfg.cpp - Per-function control flow graphs ---------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Cfg.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace minisa {

namespace {

class CfgBuilder {
public:
  CfgBuilder(const FunctionDecl &Fn, Ast &Unit) : Fn(Fn), Unit(Unit) {
    G = std::make_unique<Cfg>();
    G->Fn = &Fn;
    G->Blocks.resize(2); // ENTRY = 0, EXIT = 1
    G->Blocks[0].Id = 0;
    G->Blocks[1].Id = 1;
  }

  std::unique_ptr<Cfg> build() {
    std::uint32_t First = newBlock();
    G->Blocks[G->Entry].Term = {CfgTerminator::Kind::Goto, nullptr, nullptr,
                                {First, First}};
    Cur = First;
    buildStmt(Fn.Body);
    if (Cur != Dead)
      setGoto(G->Exit);
    collectAddrTaken();
    prune();
    computeLiveSets();
    return std::move(G);
  }

private:
  const FunctionDecl &Fn;
  Ast &Unit;
  std::unique_ptr<Cfg> G;
  static constexpr std::uint32_t Dead = 0xFFFFFFFFu;
  std::uint32_t Cur = Dead;

  std::vector<const Stmt *> LoopStack;

  std::uint32_t newBlock() {
    std::uint32_t Id = std::uint32_t(G->Blocks.size());
    G->Blocks.emplace_back();
    G->Blocks.back().Id = Id;
    G->Blocks.back().EnclosingLoop =
        LoopStack.empty() ? nullptr : LoopStack.back();
    return Id;
  }

  void append(const Stmt *S) {
    if (Cur == Dead)
      Cur = newBlock(); // unreachable code lands in a floating block
    G->Blocks[Cur].Stmts.push_back(S);
  }

  void setGoto(std::uint32_t Succ) {
    assert(Cur != Dead);
    G->Blocks[Cur].Term = {CfgTerminator::Kind::Goto, nullptr, nullptr,
                           {Succ, Succ}};
    Cur = Dead;
  }

  void setBranch(const Expr *Cond, std::uint32_t T, std::uint32_t F) {
    assert(Cur != Dead);
    G->Blocks[Cur].Term = {CfgTerminator::Kind::Branch, Cond, nullptr, {T, F}};
    Cur = Dead;
  }

  // Lower a condition into branch blocks with short-circuit semantics.
  void emitCondition(const Expr *Cond, std::uint32_t TrueT,
                     std::uint32_t FalseT) {
    if (Cond->Kind == ExprKind::Binary && Cond->BOp == BinOp::LAnd) {
      std::uint32_t RhsBlock = newBlock();
      emitCondition(Cond->Lhs, RhsBlock, FalseT);
      Cur = RhsBlock;
      emitCondition(Cond->Rhs, TrueT, FalseT);
      return;
    }
    if (Cond->Kind == ExprKind::Binary && Cond->BOp == BinOp::LOr) {
      std::uint32_t RhsBlock = newBlock();
      emitCondition(Cond->Lhs, TrueT, RhsBlock);
      Cur = RhsBlock;
      emitCondition(Cond->Rhs, TrueT, FalseT);
      return;
    }
    if (Cond->Kind == ExprKind::Unary && Cond->UOp == UnaryOp::Not) {
      emitCondition(Cond->Operand, FalseT, TrueT);
      return;
    }
    if (Cur == Dead)
      Cur = newBlock();
    setBranch(Cond, TrueT, FalseT);
  }

  static bool isNoReturnCall(const Stmt *S) {
    return S->Kind == StmtKind::ExprStmt &&
           S->Value->Kind == ExprKind::Call && S->Value->Callee &&
           S->Value->Callee->NoReturn;
  }

  void buildStmt(const Stmt *S) {
    switch (S->Kind) {
    case StmtKind::Compound:
      for (const Stmt *C : S->Body)
        buildStmt(C);
      break;
    case StmtKind::If: {
      std::uint32_t ThenB = newBlock();
      std::uint32_t Join = newBlock();
      std::uint32_t ElseB = S->Else ? newBlock() : Join;
      emitCondition(S->Cond, ThenB, ElseB);
      Cur = ThenB;
      buildStmt(S->Then);
      if (Cur != Dead)
        setGoto(Join);
      if (S->Else) {
        Cur = ElseB;
        buildStmt(S->Else);
        if (Cur != Dead)
          setGoto(Join);
      }
      Cur = Join;
      break;
    }
    case StmtKind::While: {
      std::uint32_t Head = newBlock();
      G->Blocks[Head].IsLoopHead = true;
      G->Blocks[Head].LoopStmt = S;
      std::uint32_t ExitB = newBlock();
      if (Cur != Dead)
        setGoto(Head);
      LoopStack.push_back(S);
      std::uint32_t BodyB = newBlock();
      Cur = Head;
      emitCondition(S->Cond, BodyB, ExitB);
      Cur = BodyB;
      buildStmt(S->LoopBody);
      if (Cur != Dead)
        setGoto(Head); // back edge
      LoopStack.pop_back();
      Cur = ExitB;
      break;
    }
    case StmtKind::Return:
      // Returns live on the terminator; the engine evaluates them there.
      if (Cur == Dead)
        Cur = newBlock();
      G->Blocks[Cur].Term = {CfgTerminator::Kind::Return, nullptr, S,
                             {G->Exit, G->Exit}};
      Cur = Dead;
      break;
    case StmtKind::DeclStmt:
      append(S);
      break;
    case StmtKind::ExprStmt:
      append(S);
      if (isNoReturnCall(S)) {
        G->Blocks[Cur].Term = {CfgTerminator::Kind::NoReturn, nullptr, S,
                               {G->Exit, G->Exit}};
        Cur = Dead;
      }
      break;
    }
  }

  void collectAddrTaken() {
    std::function<void(const Expr *)> WalkE = [&](const Expr *E) {
      if (!E)
        return;
      if (E->Kind == ExprKind::Unary && E->UOp == UnaryOp::AddrOf) {
        const Expr *L = E->Operand;
        while (L->Kind == ExprKind::Member || L->Kind == ExprKind::Index)
          L = L->Base;
        if (L->Kind == ExprKind::DeclRef && L->Ref)
          G->AddrTaken.insert(L->Ref);
      }
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
      if (S->Cond)
        WalkE(S->Cond);
      if (S->Value)
        WalkE(S->Value);
      if (S->Var && S->Var->Init)
        WalkE(S->Var->Init);
    };
    WalkS(Fn.Body);
  }

  void prune() {
    std::vector<bool> Reach(G->Blocks.size(), false);
    std::vector<std::uint32_t> Work{G->Entry};
    Reach[G->Entry] = true;
    Reach[G->Exit] = true;
    while (!Work.empty()) {
      std::uint32_t B = Work.back();
      Work.pop_back();
      const CfgTerminator &T = G->Blocks[B].Term;
      if (B == G->Exit)
        continue;
      for (std::uint32_t I = 0; I < T.succCount(); ++I)
        if (!Reach[T.Succs[I]]) {
          Reach[T.Succs[I]] = true;
          Work.push_back(T.Succs[I]);
        }
    }

    std::vector<std::uint32_t> Remap(G->Blocks.size(), Dead);
    std::vector<CfgBlock> Kept;
    for (std::uint32_t B = 0; B < G->Blocks.size(); ++B) {
      if (!Reach[B])
        continue;
      Remap[B] = std::uint32_t(Kept.size());
      Kept.push_back(std::move(G->Blocks[B]));
    }
    for (CfgBlock &B : Kept) {
      B.Id = Remap[B.Id];
      for (std::uint32_t I = 0; I < 2; ++I)
        B.Term.Succs[I] = Remap[B.Term.Succs[I]];
    }
    G->Blocks = std::move(Kept);
    G->Entry = Remap[0];
    G->Exit = Remap[1];
    for (CfgBlock &B : G->Blocks)
      if (B.Id != G->Exit)
        for (std::uint32_t I = 0; I < B.Term.succCount(); ++I) {
          auto &P = G->Blocks[B.Term.Succs[I]].Preds;
          if (std::find(P.begin(), P.end(), B.Id) == P.end())
            P.push_back(B.Id);
        }
  }

  void collectRefs(const Expr *E, std::set<const VarDecl *> &Out) {
    if (!E)
      return;
    if (E->Kind == ExprKind::DeclRef && E->Ref && !E->Ref->IsGlobal)
      Out.insert(E->Ref);
    collectRefs(E->Lhs, Out);
    collectRefs(E->Rhs, Out);
    collectRefs(E->Operand, Out);
    collectRefs(E->Base, Out);
    collectRefs(E->IndexExpr, Out);
    for (const Expr *A : E->Args)
      collectRefs(A, Out);
  }

  // LiveVars(B) = locals referenced in B or any block reachable from B, plus
  // every address-taken local (a pointer may still reach them).
  void computeLiveSets() {
    std::vector<std::set<const VarDecl *>> Own(G->Blocks.size());
    for (CfgBlock &B : G->Blocks) {
      for (const Stmt *S : B.Stmts) {
        collectRefs(S->Cond, Own[B.Id]);
        collectRefs(S->Value, Own[B.Id]);
        if (S->Var) {
          Own[B.Id].insert(S->Var);
          collectRefs(S->Var->Init, Own[B.Id]);
        }
      }
      if (B.Term.K == CfgTerminator::Kind::Branch)
        collectRefs(B.Term.Cond, Own[B.Id]);
      if (B.Term.ReturnStmt && B.Term.ReturnStmt->Value)
        collectRefs(B.Term.ReturnStmt->Value, Own[B.Id]);
      for (const VarDecl *V : G->AddrTaken)
        Own[B.Id].insert(V);
    }
    bool Changed = true;
    while (Changed) {
      Changed = false;
      for (auto It = G->Blocks.rbegin(); It != G->Blocks.rend(); ++It) {
        CfgBlock &B = *It;
        if (B.Id == G->Exit)
          continue;
        std::size_t Before = Own[B.Id].size();
        for (std::uint32_t I = 0; I < B.Term.succCount(); ++I)
          Own[B.Id].insert(Own[B.Term.Succs[I]].begin(),
                           Own[B.Term.Succs[I]].end());
        Changed |= Own[B.Id].size() != Before;
      }
    }
    for (CfgBlock &B : G->Blocks)
      B.LiveVars = std::move(Own[B.Id]);
  }
};

} // namespace

std::unique_ptr<Cfg> buildCfg(const FunctionDecl &Fn, Ast &Unit) {
  assert(Fn.hasBody());
  return CfgBuilder(Fn, Unit).build();
}

std::string dumpCfg(const Cfg &G) {
  std::ostringstream OS;
  for (const CfgBlock &B : G.Blocks) {
    OS << "B" << B.Id;
    if (B.Id == G.Entry)
      OS << " (ENTRY)";
    if (B.Id == G.Exit)
      OS << " (EXIT)";
    if (B.IsLoopHead)
      OS << " (LOOP)";
    OS << ": [";
    for (std::size_t I = 0; I < B.Stmts.size(); ++I) {
      if (I)
        OS << "; ";
      OS << printStmt(B.Stmts[I]);
    }
    OS << "]";
    if (B.Id != G.Exit) {
      OS << " -> ";
      switch (B.Term.K) {
      case CfgTerminator::Kind::Goto:
        OS << "B" << B.Term.Succs[0];
        break;
      case CfgTerminator::Kind::Branch:
        OS << "if " << printExpr(B.Term.Cond) << " B" << B.Term.Succs[0]
           << " else B" << B.Term.Succs[1];
        break;
      case CfgTerminator::Kind::Return:
        OS << "B" << B.Term.Succs[0] << " (return)";
        break;
      case CfgTerminator::Kind::NoReturn:
        OS << "B" << B.Term.Succs[0] << " (noreturn)";
        break;
      }
    }
    OS << "\n";
  }
  return OS.str();
}

} // namespace minisa
