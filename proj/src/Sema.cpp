//===--- Sema.cpp - MiniC name resolution and type checking -----------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Resolves declarations, annotates every expression with a type, registers
// the malloc/free/abort builtins and assigns USRs. Logical && and || are only
// accepted in branch-condition position; the CFG later lowers them into
// short-circuit branch chains, so they never appear as runtime values.
//
//===----------------------------------------------------------------------===//

#include "minisa/Ast.hpp"
#include "minisa/Usr.hpp"

#include <map>

namespace minisa {

namespace {

class Sema {
public:
  Sema(Ast &Unit, std::vector<Diagnostic> &Diags) : Unit(Unit), Diags(Diags) {}

  void run() {
    registerBuiltins();
    for (RecordDecl *R : Unit.Records)
      R->Usr = computeRecordUsr(*R);
    registerFunctions();
    if (!Diags.empty())
      return;
    for (FunctionDecl *F : Unit.Functions)
      if (F->hasBody() && !F->Builtin)
        checkFunction(*F);
  }

private:
  Ast &Unit;
  std::vector<Diagnostic> &Diags;
  FunctionDecl *CurFn = nullptr;
  std::vector<std::map<std::string, VarDecl *>> Scopes;
  std::map<std::string, FunctionDecl *> FnByName;

  void diag(SourceLoc Loc, const std::string &Msg) {
    Diags.push_back({Diagnostic::Kind::TypeError, Loc, Msg});
  }

  void registerBuiltins() {
    auto make = [&](const std::string &Name, const Type *Ret,
                    std::vector<const Type *> ParamTys, bool NoReturn) {
      if (Unit.findFunction(Name))
        return; // user redeclarations are checked like any other
      FunctionDecl *F = Unit.newFunction();
      F->Name = Name;
      F->ReturnTy = Ret;
      F->Builtin = true;
      F->NoReturn = NoReturn;
      for (const Type *PT : ParamTys) {
        VarDecl *P = Unit.newVar();
        P->Name = "arg";
        P->Ty = PT;
        P->IsParam = true;
        F->Params.push_back(P);
      }
      Unit.Functions.push_back(F);
    };
    const Type *VoidPtr = Unit.pointerTo(Unit.voidType());
    make("malloc", VoidPtr, {Unit.intType()}, false);
    make("free", Unit.voidType(), {VoidPtr}, false);
    make("abort", Unit.voidType(), {}, true);
  }

  void registerFunctions() {
    std::map<std::string, FunctionDecl *> Seen;
    std::vector<FunctionDecl *> Canonical;
    for (FunctionDecl *F : Unit.Functions) {
      F->Usr = computeFunctionUsr(*F);
      auto It = Seen.find(F->Name);
      if (It == Seen.end()) {
        Seen.emplace(F->Name, F);
        Canonical.push_back(F);
        continue;
      }
      FunctionDecl *Prev = It->second;
      if (Prev->Usr != F->Usr || Prev->ReturnTy != F->ReturnTy) {
        diag(F->Loc, "conflicting declaration of '" + F->Name + "'");
        continue;
      }
      if (Prev->hasBody() && F->hasBody()) {
        diag(F->Loc, "redefinition of '" + F->Name + "'");
        continue;
      }
      if (F->hasBody()) {
        Prev->Body = F->Body;
        Prev->Loc = F->Loc;
        for (std::size_t I = 0; I < F->Params.size(); ++I)
          Prev->Params[I] = F->Params[I];
      }
    }
    Unit.Functions = std::move(Canonical);
    for (FunctionDecl *F : Unit.Functions)
      FnByName[F->Name] = F;
  }

  void checkFunction(FunctionDecl &F) {
    CurFn = &F;
    Scopes.clear();
    Scopes.emplace_back();
    for (VarDecl *P : F.Params) {
      if (!declare(P))
        diag(P->Loc, "duplicate parameter '" + P->Name + "'");
      if (P->Ty->isArray() || P->Ty->isRecord())
        diag(P->Loc, "parameters must have scalar type");
    }
    checkStmt(F.Body);
    Scopes.clear();
    CurFn = nullptr;
  }

  bool declare(VarDecl *V) {
    auto [It, Inserted] = Scopes.back().emplace(V->Name, V);
    (void)It;
    return Inserted;
  }

  VarDecl *lookup(const std::string &Name) {
    for (auto It = Scopes.rbegin(); It != Scopes.rend(); ++It) {
      auto Found = It->find(Name);
      if (Found != It->end())
        return Found->second;
    }
    return Unit.findGlobal(Name);
  }

  void checkStmt(Stmt *S) {
    switch (S->Kind) {
    case StmtKind::Compound:
      Scopes.emplace_back();
      for (Stmt *Child : S->Body)
        checkStmt(Child);
      Scopes.pop_back();
      break;
    case StmtKind::If:
      checkCondition(S->Cond);
      checkStmt(S->Then);
      if (S->Else)
        checkStmt(S->Else);
      break;
    case StmtKind::While:
      checkCondition(S->Cond);
      checkStmt(S->LoopBody);
      break;
    case StmtKind::Return:
      if (S->Value) {
        const Type *T = checkExpr(S->Value);
        if (CurFn->ReturnTy->isVoid())
          diag(S->Loc, "void function returns a value");
        else if (T && !assignable(CurFn->ReturnTy, T, S->Value))
          diag(S->Loc, "return type mismatch");
      } else if (!CurFn->ReturnTy->isVoid()) {
        diag(S->Loc, "non-void function returns no value");
      }
      break;
    case StmtKind::DeclStmt:
      if (S->Var->Init) {
        const Type *T = checkExpr(S->Var->Init);
        if (T && !assignable(S->Var->Ty, T, S->Var->Init))
          diag(S->Var->Loc, "cannot initialize '" + S->Var->Name + "' ("
                                + typeName(S->Var->Ty) + ") from " +
                                typeName(T));
      }
      if (!declare(S->Var))
        diag(S->Var->Loc, "redeclaration of '" + S->Var->Name + "'");
      break;
    case StmtKind::ExprStmt: {
      const Type *T = checkExpr(S->Value);
      (void)T; // void calls are fine as statements
      break;
    }
    }
  }

  // Branch conditions may use &&, || and ! freely; everything else must be a
  // scalar. The CFG lowers the logical structure away.
  void checkCondition(Expr *E) {
    if (E->Kind == ExprKind::Binary && isLogicalOp(E->BOp)) {
      checkCondition(E->Lhs);
      checkCondition(E->Rhs);
      E->Ty = Unit.intType();
      return;
    }
    if (E->Kind == ExprKind::Unary && E->UOp == UnaryOp::Not) {
      checkCondition(E->Operand);
      E->Ty = Unit.intType();
      return;
    }
    const Type *T = checkExpr(E);
    if (T && !T->isScalar())
      diag(E->Loc, "condition must have scalar type");
  }

  // Widens a null constant to the destination pointer type in place, so the
  // engine sees a null location rather than the integer zero.
  bool assignable(const Type *Dst, const Type *Src, Expr *SrcExpr) {
    if (Dst == Src)
      return Dst->isScalar();
    if (Dst->isPointer() && Src->isPointer())
      return Dst->isVoidPointer() || Src->isVoidPointer();
    if (Dst->isPointer() && SrcExpr && isNullConstant(SrcExpr)) {
      SrcExpr->Ty = Dst;
      return true;
    }
    return false;
  }

  static bool isNullConstant(const Expr *E) {
    return E->Kind == ExprKind::IntLiteral && E->IntValue == 0;
  }

  const Type *checkExpr(Expr *E) {
    const Type *T = checkExprImpl(E);
    E->Ty = T ? T : Unit.intType(); // keep annotations total after errors
    return T;
  }

  const Type *checkExprImpl(Expr *E) {
    switch (E->Kind) {
    case ExprKind::IntLiteral:
      return Unit.intType();
    case ExprKind::DeclRef: {
      VarDecl *V = lookup(E->Name);
      if (!V) {
        diag(E->Loc, "use of undeclared identifier '" + E->Name + "'");
        return nullptr;
      }
      E->Ref = V;
      return V->Ty;
    }
    case ExprKind::Unary:
      return checkUnary(E);
    case ExprKind::Binary:
      return checkBinary(E);
    case ExprKind::Call:
      return checkCall(E);
    case ExprKind::Member: {
      const Type *BaseTy = checkExpr(E->Base);
      if (!BaseTy)
        return nullptr;
      const RecordDecl *R = nullptr;
      if (E->Arrow) {
        if (!BaseTy->isPointer() || !BaseTy->Pointee->isRecord()) {
          diag(E->Loc, "'->' requires a pointer to record");
          return nullptr;
        }
        R = BaseTy->Pointee->Record;
      } else {
        if (!BaseTy->isRecord()) {
          diag(E->Loc, "'.' requires a record");
          return nullptr;
        }
        R = BaseTy->Record;
      }
      const FieldDecl *F = R->findField(E->Name);
      if (!F) {
        diag(E->Loc, "no field '" + E->Name + "' in 'struct " + R->Name + "'");
        return nullptr;
      }
      E->Field = F;
      return F->Ty;
    }
    case ExprKind::Index: {
      const Type *BaseTy = checkExpr(E->Base);
      const Type *IdxTy = checkExpr(E->IndexExpr);
      if (IdxTy && !IdxTy->isInt())
        diag(E->IndexExpr->Loc, "array index must be int");
      if (!BaseTy)
        return nullptr;
      if (BaseTy->isArray())
        return BaseTy->Element;
      if (BaseTy->isPointer() && !BaseTy->Pointee->isVoid())
        return BaseTy->Pointee;
      diag(E->Loc, "subscripted value is not an array or pointer");
      return nullptr;
    }
    }
    return nullptr;
  }

  const Type *checkUnary(Expr *E) {
    if (E->UOp == UnaryOp::AddrOf) {
      const Type *T = checkExpr(E->Operand);
      if (!E->Operand->isLvalue()) {
        diag(E->Loc, "cannot take the address of an rvalue");
        return nullptr;
      }
      return T ? Unit.pointerTo(T) : nullptr;
    }
    const Type *T = checkExpr(E->Operand);
    if (!T)
      return nullptr;
    switch (E->UOp) {
    case UnaryOp::Neg:
      if (!T->isInt()) {
        diag(E->Loc, "unary '-' requires int");
        return nullptr;
      }
      return Unit.intType();
    case UnaryOp::Not:
      if (!T->isScalar()) {
        diag(E->Loc, "'!' requires a scalar");
        return nullptr;
      }
      return Unit.intType();
    case UnaryOp::Deref:
      if (!T->isPointer() || T->Pointee->isVoid()) {
        diag(E->Loc, "cannot dereference " + typeName(T));
        return nullptr;
      }
      return T->Pointee;
    case UnaryOp::AddrOf:
      break;
    }
    return nullptr;
  }

  const Type *checkBinary(Expr *E) {
    if (E->BOp == BinOp::Assign) {
      const Type *RT = checkExpr(E->Rhs);
      const Type *LT = checkExpr(E->Lhs);
      if (!E->Lhs->isLvalue()) {
        diag(E->Loc, "left side of '=' is not assignable");
        return nullptr;
      }
      if (!LT || !RT)
        return nullptr;
      if (!LT->isScalar()) {
        diag(E->Loc, "assignment requires scalar type");
        return nullptr;
      }
      if (!assignable(LT, RT, E->Rhs)) {
        diag(E->Loc, "incompatible types in assignment");
        return nullptr;
      }
      return LT;
    }
    if (isLogicalOp(E->BOp)) {
      diag(E->Loc, "'&&' and '||' are only allowed in branch conditions");
      return nullptr;
    }
    const Type *LT = checkExpr(E->Lhs);
    const Type *RT = checkExpr(E->Rhs);
    if (!LT || !RT)
      return nullptr;
    switch (E->BOp) {
    case BinOp::Add:
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Rem:
      if (!LT->isInt() || !RT->isInt()) {
        diag(E->Loc, "arithmetic requires int operands");
        return nullptr;
      }
      return Unit.intType();
    case BinOp::Sub:
      if (LT->isInt() && RT->isInt())
        return Unit.intType();
      if (LT->isPointer() && RT->isPointer() && LT == RT)
        return Unit.intType(); // pointer difference
      diag(E->Loc, "invalid operands to '-'");
      return nullptr;
    case BinOp::EQ:
    case BinOp::NE:
      if (LT->isInt() && RT->isInt())
        return Unit.intType();
      if (LT->isPointer() && RT->isPointer() &&
          (LT == RT || LT->isVoidPointer() || RT->isVoidPointer()))
        return Unit.intType();
      if (LT->isPointer() && isNullConstant(E->Rhs)) {
        E->Rhs->Ty = LT;
        return Unit.intType();
      }
      if (RT->isPointer() && isNullConstant(E->Lhs)) {
        E->Lhs->Ty = RT;
        return Unit.intType();
      }
      diag(E->Loc, "invalid pointer comparison");
      return nullptr;
    case BinOp::LT:
    case BinOp::LE:
    case BinOp::GT:
    case BinOp::GE:
      if (!LT->isInt() || !RT->isInt()) {
        diag(E->Loc, "relational comparison requires int operands");
        return nullptr;
      }
      return Unit.intType();
    default:
      return nullptr;
    }
  }

  const Type *checkCall(Expr *E) {
    auto It = FnByName.find(E->Name);
    if (It == FnByName.end()) {
      diag(E->Loc, "call to undeclared function '" + E->Name + "'");
      return nullptr;
    }
    FunctionDecl *F = It->second;
    E->Callee = F;
    if (E->Args.size() != F->Params.size()) {
      diag(E->Loc, "wrong number of arguments to '" + E->Name + "'");
      return nullptr;
    }
    for (std::size_t I = 0; I < E->Args.size(); ++I) {
      const Type *AT = checkExpr(E->Args[I]);
      if (AT && !assignable(F->Params[I]->Ty, AT, E->Args[I]))
        diag(E->Args[I]->Loc,
             "argument " + std::to_string(I + 1) + " to '" + E->Name +
                 "' has incompatible type");
    }
    return F->ReturnTy;
  }
};

} // namespace

void runSema(Ast &Unit, std::vector<Diagnostic> &Diags) {
  Sema S(Unit, Diags);
  S.run();
}

} // namespace minisa
