//===--- Ast.hpp - MiniC abstract syntax tree ------------------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The MiniC object language: int (32-bit two's complement), pointers,
// records with scalar/record/array fields, fixed arrays, functions,
// if/while/return, and the malloc/free/abort builtins. Every expression
// carries its type and source location; every node has a unique id within
// its translation unit.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace minisa {

struct SourceLoc {
  std::uint32_t File = 0; // index into Ast::Files
  std::uint32_t Line = 0; // 1-based
  std::uint32_t Col = 0;  // 1-based

  bool operator==(const SourceLoc &O) const {
    return File == O.File && Line == O.Line && Col == O.Col;
  }
  bool operator<(const SourceLoc &O) const {
    if (File != O.File)
      return File < O.File;
    if (Line != O.Line)
      return Line < O.Line;
    return Col < O.Col;
  }
};

struct Diagnostic {
  enum class Kind { SyntaxError, TypeError };
  Kind K = Kind::SyntaxError;
  SourceLoc Loc;
  std::string Message;
};

class RecordDecl;

enum class TypeKind { Int, Pointer, Record, Array, Void };

struct Type {
  TypeKind Kind = TypeKind::Int;
  const Type *Pointee = nullptr; // Pointer
  const Type *Element = nullptr; // Array
  std::uint32_t Length = 0;      // Array, > 0
  std::string RecordName;        // Record
  const RecordDecl *Record = nullptr;

  bool isInt() const { return Kind == TypeKind::Int; }
  bool isPointer() const { return Kind == TypeKind::Pointer; }
  bool isRecord() const { return Kind == TypeKind::Record; }
  bool isArray() const { return Kind == TypeKind::Array; }
  bool isVoid() const { return Kind == TypeKind::Void; }
  bool isScalar() const { return isInt() || isPointer(); }
  bool isVoidPointer() const { return isPointer() && Pointee->isVoid(); }
};

struct FieldDecl {
  std::string Name;
  const Type *Ty = nullptr;
  std::uint32_t Index = 0;
  SourceLoc Loc;
};

class RecordDecl {
public:
  std::string Name;
  std::vector<FieldDecl> Fields;
  SourceLoc Loc;
  std::string Usr;

  const FieldDecl *findField(const std::string &N) const {
    for (const FieldDecl &F : Fields)
      if (F.Name == N)
        return &F;
    return nullptr;
  }
};

class Expr;
class Stmt;

struct VarDecl {
  std::uint32_t Id = 0;
  std::string Name;
  const Type *Ty = nullptr;
  Expr *Init = nullptr;
  bool IsGlobal = false;
  bool IsParam = false;
  SourceLoc Loc;
};

struct FunctionDecl {
  std::string Name;
  const Type *ReturnTy = nullptr;
  std::vector<VarDecl *> Params;
  Stmt *Body = nullptr;
  SourceLoc Loc;
  std::string Usr;
  bool NoReturn = false; // abort
  bool Builtin = false;  // malloc/free/abort
  bool Imported = false; // pulled in from another translation unit

  bool hasBody() const { return Body != nullptr; }
};

enum class ExprKind { IntLiteral, DeclRef, Unary, Binary, Call, Member, Index };
enum class UnaryOp { Neg, Not, Deref, AddrOf };
enum class BinOp {
  Add,
  Sub,
  Mul,
  Div,
  Rem,
  LT,
  LE,
  GT,
  GE,
  EQ,
  NE,
  LAnd,
  LOr,
  Assign
};

inline bool isComparisonOp(BinOp Op) {
  return Op == BinOp::LT || Op == BinOp::LE || Op == BinOp::GT ||
         Op == BinOp::GE || Op == BinOp::EQ || Op == BinOp::NE;
}
inline bool isLogicalOp(BinOp Op) {
  return Op == BinOp::LAnd || Op == BinOp::LOr;
}

class Expr {
public:
  std::uint32_t Id = 0;
  ExprKind Kind = ExprKind::IntLiteral;
  const Type *Ty = nullptr;
  SourceLoc Loc;

  std::int32_t IntValue = 0;        // IntLiteral
  const VarDecl *Ref = nullptr;     // DeclRef
  UnaryOp UOp = UnaryOp::Neg;       // Unary
  BinOp BOp = BinOp::Add;           // Binary
  Expr *Lhs = nullptr;              // Binary
  Expr *Rhs = nullptr;              // Binary
  Expr *Operand = nullptr;          // Unary
  Expr *Base = nullptr;             // Member/Index
  Expr *IndexExpr = nullptr;        // Index
  std::string Name;                 // Call callee / Member field
  std::vector<Expr *> Args;         // Call
  const FunctionDecl *Callee = nullptr;
  const FieldDecl *Field = nullptr; // Member
  bool Arrow = false;               // Member via ->

  bool isLvalue() const {
    return Kind == ExprKind::DeclRef || Kind == ExprKind::Member ||
           Kind == ExprKind::Index ||
           (Kind == ExprKind::Unary && UOp == UnaryOp::Deref);
  }
};

enum class StmtKind { Compound, If, While, Return, DeclStmt, ExprStmt };

class Stmt {
public:
  std::uint32_t Id = 0;
  StmtKind Kind = StmtKind::Compound;
  SourceLoc Loc;

  std::vector<Stmt *> Body; // Compound
  Expr *Cond = nullptr;     // If/While
  Stmt *Then = nullptr;     // If
  Stmt *Else = nullptr;     // If
  Stmt *LoopBody = nullptr; // While
  Expr *Value = nullptr;    // Return (optional) / ExprStmt
  VarDecl *Var = nullptr;   // DeclStmt
};

/// One parsed translation unit. Owns every node; pointers into an Ast stay
/// valid for its lifetime, including nodes added later by cross-TU import.
class Ast {
public:
  std::vector<std::string> Files; // Files[0] is the unit's own file
  std::vector<FunctionDecl *> Functions;
  std::vector<RecordDecl *> Records;
  std::vector<VarDecl *> Globals;

  Ast() = default;
  Ast(const Ast &) = delete;
  Ast &operator=(const Ast &) = delete;

  std::uint32_t fileIndex(const std::string &Name) {
    for (std::uint32_t I = 0; I < Files.size(); ++I)
      if (Files[I] == Name)
        return I;
    Files.push_back(Name);
    return std::uint32_t(Files.size() - 1);
  }

  Expr *newExpr(ExprKind K, SourceLoc Loc) {
    auto *E = alloc<Expr>();
    E->Id = NextExprId++;
    E->Kind = K;
    E->Loc = Loc;
    return E;
  }
  Stmt *newStmt(StmtKind K, SourceLoc Loc) {
    auto *S = alloc<Stmt>();
    S->Id = NextStmtId++;
    S->Kind = K;
    S->Loc = Loc;
    return S;
  }
  VarDecl *newVar() {
    auto *V = alloc<VarDecl>();
    V->Id = NextVarId++;
    return V;
  }
  FunctionDecl *newFunction() { return alloc<FunctionDecl>(); }
  RecordDecl *newRecord() { return alloc<RecordDecl>(); }

  // Types are interned structurally so pointer equality means type equality.
  const Type *intType() {
    Type T;
    T.Kind = TypeKind::Int;
    return internType(T);
  }
  const Type *voidType() {
    Type T;
    T.Kind = TypeKind::Void;
    return internType(T);
  }
  const Type *pointerTo(const Type *Pointee) {
    Type T;
    T.Kind = TypeKind::Pointer;
    T.Pointee = Pointee;
    return internType(T);
  }
  const Type *arrayOf(const Type *Element, std::uint32_t Length) {
    Type T;
    T.Kind = TypeKind::Array;
    T.Element = Element;
    T.Length = Length;
    return internType(T);
  }
  const Type *recordType(const std::string &Name, const RecordDecl *D) {
    Type T;
    T.Kind = TypeKind::Record;
    T.RecordName = Name;
    T.Record = D;
    return internType(T);
  }

  FunctionDecl *findFunction(const std::string &Name) const {
    for (FunctionDecl *F : Functions)
      if (F->Name == Name)
        return F;
    return nullptr;
  }
  RecordDecl *findRecord(const std::string &Name) const {
    for (RecordDecl *R : Records)
      if (R->Name == Name)
        return R;
    return nullptr;
  }
  VarDecl *findGlobal(const std::string &Name) const {
    for (VarDecl *G : Globals)
      if (G->Name == Name)
        return G;
    return nullptr;
  }

  std::uint32_t NextExprId = 1;
  std::uint32_t NextStmtId = 1;
  std::uint32_t NextVarId = 1;

private:
  template <typename T> T *alloc() {
    Storage.push_back(std::make_unique<Holder<T>>());
    return &static_cast<Holder<T> *>(Storage.back().get())->Value;
  }

  struct HolderBase {
    virtual ~HolderBase() = default;
  };
  template <typename T> struct Holder : HolderBase {
    T Value;
  };

  const Type *internType(const Type &T) {
    std::string Key = typeKey(T);
    auto It = TypeTable.find(Key);
    if (It != TypeTable.end())
      return It->second;
    auto *Slot = alloc<Type>();
    *Slot = T;
    TypeTable.emplace(std::move(Key), Slot);
    return Slot;
  }

  static std::string typeKey(const Type &T);

  std::deque<std::unique_ptr<HolderBase>> Storage;
  std::map<std::string, const Type *> TypeTable;
};

/// Renders a type the way it is spelled in MiniC (`int *`, `struct X`).
std::string typeName(const Type *T);

/// Compact one-line rendering of expressions/statements for diagnostics,
/// path notes and CFG dumps.
std::string printExpr(const Expr *E);
std::string printStmt(const Stmt *S);

struct ParseResult {
  std::unique_ptr<Ast> Unit; // null when Diags has errors
  std::vector<Diagnostic> Diags;
  bool ok() const { return Unit != nullptr; }
};

/// Lex, parse and type-annotate one MiniC translation unit.
ParseResult parseTranslationUnit(const std::string &Source,
                                 const std::string &FileName);

} // namespace minisa
