//===--- AstIo.cpp - Binary AST serialization ---------------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/AstIo.hpp"

#include <cstring>
#include <map>

namespace minisa {

namespace {

class Writer {
public:
  std::string Out;

  void u8(std::uint8_t V) { Out.push_back(char(V)); }
  void u32(std::uint32_t V) {
    for (int I = 0; I < 4; ++I)
      Out.push_back(char((V >> (I * 8)) & 0xFF));
  }
  void i32(std::int32_t V) { u32(std::uint32_t(V)); }
  void str(const std::string &S) {
    u32(std::uint32_t(S.size()));
    Out += S;
  }
  // When FileNames is set (fingerprinting), locations carry the file name so
  // they compare equal across translation units; otherwise the index.
  const std::vector<std::string> *FileNames = nullptr;

  void loc(const SourceLoc &L) {
    if (FileNames)
      str(L.File < FileNames->size() ? (*FileNames)[L.File] : "?");
    else
      u32(L.File);
    u32(L.Line);
    u32(L.Col);
  }

  void type(const Type *T) {
    switch (T->Kind) {
    case TypeKind::Int:
      u8(1);
      break;
    case TypeKind::Void:
      u8(2);
      break;
    case TypeKind::Pointer:
      u8(3);
      type(T->Pointee);
      break;
    case TypeKind::Record:
      u8(4);
      str(T->RecordName);
      break;
    case TypeKind::Array:
      u8(5);
      u32(T->Length);
      type(T->Element);
      break;
    }
  }

  std::map<const VarDecl *, std::uint32_t> VarOrdinals;
  std::uint32_t NextVar = 0;

  void declareVar(const VarDecl *V) { VarOrdinals[V] = NextVar++; }

  void varDecl(const VarDecl *V) {
    str(V->Name);
    type(V->Ty);
    loc(V->Loc);
  }

  void expr(const Expr *E) {
    u8(std::uint8_t(E->Kind) + 1);
    loc(E->Loc);
    type(E->Ty);
    switch (E->Kind) {
    case ExprKind::IntLiteral:
      i32(E->IntValue);
      break;
    case ExprKind::DeclRef:
      if (FileNames && E->Ref->IsGlobal) {
        u32(0xFFFFFFFFu); // globals compare by name across units
        str(E->Ref->Name);
      } else {
        u32(VarOrdinals.at(E->Ref));
      }
      break;
    case ExprKind::Unary:
      u8(std::uint8_t(E->UOp));
      expr(E->Operand);
      break;
    case ExprKind::Binary:
      u8(std::uint8_t(E->BOp));
      expr(E->Lhs);
      expr(E->Rhs);
      break;
    case ExprKind::Call:
      str(E->Name);
      u32(std::uint32_t(E->Args.size()));
      for (const Expr *A : E->Args)
        expr(A);
      break;
    case ExprKind::Member:
      expr(E->Base);
      str(E->Name);
      u8(E->Arrow ? 1 : 0);
      break;
    case ExprKind::Index:
      expr(E->Base);
      expr(E->IndexExpr);
      break;
    }
  }

  void stmt(const Stmt *S) {
    u8(std::uint8_t(S->Kind) + 1);
    loc(S->Loc);
    switch (S->Kind) {
    case StmtKind::Compound:
      u32(std::uint32_t(S->Body.size()));
      for (const Stmt *C : S->Body)
        stmt(C);
      break;
    case StmtKind::If:
      expr(S->Cond);
      stmt(S->Then);
      u8(S->Else ? 1 : 0);
      if (S->Else)
        stmt(S->Else);
      break;
    case StmtKind::While:
      expr(S->Cond);
      stmt(S->LoopBody);
      break;
    case StmtKind::Return:
      u8(S->Value ? 1 : 0);
      if (S->Value)
        expr(S->Value);
      break;
    case StmtKind::DeclStmt:
      declareVar(S->Var);
      varDecl(S->Var);
      u8(S->Var->Init ? 1 : 0);
      if (S->Var->Init)
        expr(S->Var->Init);
      break;
    case StmtKind::ExprStmt:
      expr(S->Value);
      break;
    }
  }

  void function(const FunctionDecl *F) {
    str(F->Name);
    str(F->Usr);
    type(F->ReturnTy);
    loc(F->Loc);
    u8((F->NoReturn ? 1 : 0) | (F->Builtin ? 2 : 0) | (F->Imported ? 4 : 0));
    u32(std::uint32_t(F->Params.size()));
    for (const VarDecl *P : F->Params) {
      declareVar(P);
      varDecl(P);
    }
    u8(F->Body ? 1 : 0);
    if (F->Body)
      stmt(F->Body);
  }
};

struct ReadError {
  std::string Message;
};

class Reader {
public:
  Reader(const std::string &Bytes, Ast &Unit) : Bytes(Bytes), Unit(Unit) {}

  std::size_t Pos = 0;
  const std::string &Bytes;
  Ast &Unit;
  std::vector<VarDecl *> Vars;

  [[noreturn]] void fail(const std::string &Msg) { throw ReadError{Msg}; }

  std::uint8_t u8() {
    if (Pos + 1 > Bytes.size())
      fail("truncated input");
    return std::uint8_t(Bytes[Pos++]);
  }
  std::uint32_t u32() {
    if (Pos + 4 > Bytes.size())
      fail("truncated input");
    std::uint32_t V = 0;
    for (int I = 0; I < 4; ++I)
      V |= std::uint32_t(std::uint8_t(Bytes[Pos + I])) << (I * 8);
    Pos += 4;
    return V;
  }
  std::int32_t i32() { return std::int32_t(u32()); }
  std::string str() {
    std::uint32_t Len = u32();
    if (Pos + Len > Bytes.size())
      fail("truncated input");
    std::string S = Bytes.substr(Pos, Len);
    Pos += Len;
    return S;
  }
  SourceLoc loc() {
    SourceLoc L;
    L.File = u32();
    L.Line = u32();
    L.Col = u32();
    return L;
  }

  const Type *type() {
    switch (u8()) {
    case 1:
      return Unit.intType();
    case 2:
      return Unit.voidType();
    case 3:
      return Unit.pointerTo(type());
    case 4: {
      std::string Name = str();
      return Unit.recordType(Name, Unit.findRecord(Name));
    }
    case 5: {
      std::uint32_t Len = u32();
      return Unit.arrayOf(type(), Len);
    }
    default:
      fail("bad type tag");
    }
  }

  VarDecl *varDecl() {
    VarDecl *V = Unit.newVar();
    V->Name = str();
    V->Ty = type();
    V->Loc = loc();
    Vars.push_back(V);
    return V;
  }

  Expr *expr() {
    std::uint8_t Tag = u8();
    if (Tag < 1 || Tag > 7)
      fail("bad expression tag");
    SourceLoc L = loc();
    Expr *E = Unit.newExpr(ExprKind(Tag - 1), L);
    E->Ty = type();
    switch (E->Kind) {
    case ExprKind::IntLiteral:
      E->IntValue = i32();
      break;
    case ExprKind::DeclRef: {
      std::uint32_t Ord = u32();
      if (Ord >= Vars.size())
        fail("bad variable reference");
      E->Ref = Vars[Ord];
      E->Name = Vars[Ord]->Name;
      break;
    }
    case ExprKind::Unary:
      E->UOp = UnaryOp(u8());
      E->Operand = expr();
      break;
    case ExprKind::Binary:
      E->BOp = BinOp(u8());
      E->Lhs = expr();
      E->Rhs = expr();
      break;
    case ExprKind::Call: {
      E->Name = str();
      std::uint32_t N = u32();
      for (std::uint32_t I = 0; I < N; ++I)
        E->Args.push_back(expr());
      break;
    }
    case ExprKind::Member:
      E->Base = expr();
      E->Name = str();
      E->Arrow = u8() != 0;
      if (const Type *BT = E->Arrow ? E->Base->Ty->Pointee : E->Base->Ty;
          BT && BT->Record)
        E->Field = BT->Record->findField(E->Name);
      break;
    case ExprKind::Index:
      E->Base = expr();
      E->IndexExpr = expr();
      break;
    }
    return E;
  }

  Stmt *stmt() {
    std::uint8_t Tag = u8();
    if (Tag < 1 || Tag > 6)
      fail("bad statement tag");
    SourceLoc L = loc();
    Stmt *S = Unit.newStmt(StmtKind(Tag - 1), L);
    switch (S->Kind) {
    case StmtKind::Compound: {
      std::uint32_t N = u32();
      for (std::uint32_t I = 0; I < N; ++I)
        S->Body.push_back(stmt());
      break;
    }
    case StmtKind::If:
      S->Cond = expr();
      S->Then = stmt();
      if (u8())
        S->Else = stmt();
      break;
    case StmtKind::While:
      S->Cond = expr();
      S->LoopBody = stmt();
      break;
    case StmtKind::Return:
      if (u8())
        S->Value = expr();
      break;
    case StmtKind::DeclStmt:
      S->Var = varDecl();
      if (u8())
        S->Var->Init = expr();
      break;
    case StmtKind::ExprStmt:
      S->Value = expr();
      break;
    }
    return S;
  }

  FunctionDecl *function() {
    FunctionDecl *F = Unit.newFunction();
    F->Name = str();
    F->Usr = str();
    F->ReturnTy = type();
    F->Loc = loc();
    std::uint8_t Flags = u8();
    F->NoReturn = Flags & 1;
    F->Builtin = Flags & 2;
    F->Imported = Flags & 4;
    std::uint32_t NP = u32();
    for (std::uint32_t I = 0; I < NP; ++I) {
      VarDecl *P = varDecl();
      P->IsParam = true;
      F->Params.push_back(P);
    }
    if (u8())
      F->Body = stmt();
    return F;
  }
};

} // namespace

std::string serializeAst(const Ast &Unit) {
  Writer W;
  W.Out.append(AstFormatVersion, 4);
  W.u32(std::uint32_t(Unit.Files.size()));
  for (const std::string &F : Unit.Files)
    W.str(F);

  W.u32(std::uint32_t(Unit.Records.size()));
  for (const RecordDecl *R : Unit.Records) {
    W.str(R->Name);
    W.str(R->Usr);
    W.loc(R->Loc);
    W.u32(std::uint32_t(R->Fields.size()));
    for (const FieldDecl &F : R->Fields) {
      W.str(F.Name);
      W.type(F.Ty);
      W.loc(F.Loc);
    }
  }

  W.u32(std::uint32_t(Unit.Globals.size()));
  for (const VarDecl *G : Unit.Globals) {
    W.declareVar(G);
    W.varDecl(G);
  }

  W.u32(std::uint32_t(Unit.Functions.size()));
  for (const FunctionDecl *F : Unit.Functions)
    W.function(F);
  return W.Out;
}

DeserializeResult deserializeAst(const std::string &Bytes) {
  DeserializeResult Result;
  if (Bytes.size() < 4 || std::memcmp(Bytes.data(), AstFormatVersion, 4) != 0) {
    Result.Error = "bad or unsupported AST format version";
    return Result;
  }
  auto Unit = std::make_unique<Ast>();
  Reader R(Bytes, *Unit);
  R.Pos = 4;
  try {
    std::uint32_t NFiles = R.u32();
    for (std::uint32_t I = 0; I < NFiles; ++I)
      Unit->Files.push_back(R.str());

    std::uint32_t NRecords = R.u32();
    for (std::uint32_t I = 0; I < NRecords; ++I) {
      RecordDecl *Rec = Unit->newRecord();
      Rec->Name = R.str();
      Rec->Usr = R.str();
      Rec->Loc = R.loc();
      Unit->Records.push_back(Rec);
      std::uint32_t NFields = R.u32();
      for (std::uint32_t J = 0; J < NFields; ++J) {
        FieldDecl F;
        F.Name = R.str();
        F.Ty = R.type();
        F.Loc = R.loc();
        F.Index = J;
        Rec->Fields.push_back(F);
      }
    }

    std::uint32_t NGlobals = R.u32();
    for (std::uint32_t I = 0; I < NGlobals; ++I) {
      VarDecl *G = R.varDecl();
      G->IsGlobal = true;
      Unit->Globals.push_back(G);
    }

    std::uint32_t NFns = R.u32();
    for (std::uint32_t I = 0; I < NFns; ++I)
      Unit->Functions.push_back(R.function());

    if (R.Pos != Bytes.size()) {
      Result.Error = "trailing bytes after AST payload";
      return Result;
    }
  } catch (ReadError &E) {
    Result.Error = E.Message;
    return Result;
  }
  // Resolve calls against the freshly built function list.
  for (FunctionDecl *F : Unit->Functions) {
    if (!F->Body)
      continue;
    std::vector<Stmt *> Work{F->Body};
    std::vector<Expr *> Exprs;
    auto pushExpr = [&](Expr *E) {
      if (E)
        Exprs.push_back(E);
    };
    while (!Work.empty() || !Exprs.empty()) {
      if (!Exprs.empty()) {
        Expr *E = Exprs.back();
        Exprs.pop_back();
        if (E->Kind == ExprKind::Call)
          E->Callee = Unit->findFunction(E->Name);
        pushExpr(E->Lhs);
        pushExpr(E->Rhs);
        pushExpr(E->Operand);
        pushExpr(E->Base);
        pushExpr(E->IndexExpr);
        for (Expr *A : E->Args)
          pushExpr(A);
        continue;
      }
      Stmt *S = Work.back();
      Work.pop_back();
      for (Stmt *C : S->Body)
        Work.push_back(C);
      if (S->Then)
        Work.push_back(S->Then);
      if (S->Else)
        Work.push_back(S->Else);
      if (S->LoopBody)
        Work.push_back(S->LoopBody);
      pushExpr(S->Cond);
      pushExpr(S->Value);
      if (S->Var)
        pushExpr(S->Var->Init);
    }
  }
  Result.Unit = std::move(Unit);
  return Result;
}

bool astEquals(const Ast &A, const Ast &B) {
  return serializeAst(A) == serializeAst(B);
}

std::string fingerprintFunction(const FunctionDecl &F, const Ast &Unit) {
  Writer W;
  W.FileNames = &Unit.Files;
  W.function(&F);
  return W.Out;
}

std::string fingerprintRecord(const RecordDecl &R) {
  std::string FP = R.Name + "{";
  for (const FieldDecl &F : R.Fields)
    FP += F.Name + ":" + typeName(F.Ty) + ";";
  return FP + "}";
}

} // namespace minisa
