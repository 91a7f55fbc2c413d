//===--- AstPrinter.cpp - Compact AST rendering ------------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Ast.hpp"

namespace minisa {

std::string Ast::typeKey(const Type &T) {
  switch (T.Kind) {
  case TypeKind::Int:
    return "i";
  case TypeKind::Void:
    return "v";
  case TypeKind::Pointer:
    return "p" + typeKey(*T.Pointee);
  case TypeKind::Record:
    return "r" + T.RecordName + "#";
  case TypeKind::Array:
    return "a" + std::to_string(T.Length) + typeKey(*T.Element);
  }
  return "?";
}

std::string typeName(const Type *T) {
  switch (T->Kind) {
  case TypeKind::Int:
    return "int";
  case TypeKind::Void:
    return "void";
  case TypeKind::Pointer:
    return typeName(T->Pointee) + " *";
  case TypeKind::Record:
    return "struct " + T->RecordName;
  case TypeKind::Array:
    return typeName(T->Element) + "[" + std::to_string(T->Length) + "]";
  }
  return "?";
}

static const char *binOpText(BinOp Op) {
  switch (Op) {
  case BinOp::Add: return "+";
  case BinOp::Sub: return "-";
  case BinOp::Mul: return "*";
  case BinOp::Div: return "/";
  case BinOp::Rem: return "%";
  case BinOp::LT: return "<";
  case BinOp::LE: return "<=";
  case BinOp::GT: return ">";
  case BinOp::GE: return ">=";
  case BinOp::EQ: return "==";
  case BinOp::NE: return "!=";
  case BinOp::LAnd: return "&&";
  case BinOp::LOr: return "||";
  case BinOp::Assign: return "=";
  }
  return "?";
}

static int precedence(const Expr *E) {
  if (E->Kind != ExprKind::Binary)
    return 100;
  switch (E->BOp) {
  case BinOp::Assign: return 1;
  case BinOp::LOr: return 2;
  case BinOp::LAnd: return 3;
  case BinOp::EQ:
  case BinOp::NE: return 4;
  case BinOp::LT:
  case BinOp::LE:
  case BinOp::GT:
  case BinOp::GE: return 5;
  case BinOp::Add:
  case BinOp::Sub: return 6;
  default: return 7;
  }
}

static std::string printOperand(const Expr *E, int ParentPrec) {
  std::string S = printExpr(E);
  if (precedence(E) < ParentPrec)
    return "(" + S + ")";
  return S;
}

std::string printExpr(const Expr *E) {
  switch (E->Kind) {
  case ExprKind::IntLiteral:
    return std::to_string(E->IntValue);
  case ExprKind::DeclRef:
    return E->Name.empty() && E->Ref ? E->Ref->Name : E->Name;
  case ExprKind::Unary: {
    const char *Op = E->UOp == UnaryOp::Neg     ? "-"
                     : E->UOp == UnaryOp::Not   ? "!"
                     : E->UOp == UnaryOp::Deref ? "*"
                                                : "&";
    return Op + printOperand(E->Operand, 8);
  }
  case ExprKind::Binary: {
    int Prec = precedence(E);
    return printOperand(E->Lhs, Prec) + " " + binOpText(E->BOp) + " " +
           printOperand(E->Rhs, E->BOp == BinOp::Assign ? Prec : Prec + 1);
  }
  case ExprKind::Call: {
    std::string S = E->Name + "(";
    for (std::size_t I = 0; I < E->Args.size(); ++I) {
      if (I)
        S += ", ";
      S += printExpr(E->Args[I]);
    }
    return S + ")";
  }
  case ExprKind::Member:
    return printOperand(E->Base, 8) + (E->Arrow ? "->" : ".") + E->Name;
  case ExprKind::Index:
    return printOperand(E->Base, 8) + "[" + printExpr(E->IndexExpr) + "]";
  }
  return "?";
}

std::string printStmt(const Stmt *S) {
  switch (S->Kind) {
  case StmtKind::Compound:
    return "{...}";
  case StmtKind::If:
    return "if (" + printExpr(S->Cond) + ")";
  case StmtKind::While:
    return "while (" + printExpr(S->Cond) + ")";
  case StmtKind::Return:
    return S->Value ? "return " + printExpr(S->Value) : std::string("return");
  case StmtKind::DeclStmt: {
    std::string Text = typeName(S->Var->Ty) + " " + S->Var->Name;
    if (S->Var->Init)
      Text += " = " + printExpr(S->Var->Init);
    return Text;
  }
  case StmtKind::ExprStmt:
    return printExpr(S->Value);
  }
  return "?";
}

} // namespace minisa
