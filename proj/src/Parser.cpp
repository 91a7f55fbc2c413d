//===--- Parser.cpp - MiniC recursive descent parser ------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Grammar (records must be declared before first use):
//
//   unit       := (record | function | global)*
//   record     := "struct" IDENT "{" (type declarator ("," declarator)* ";")* "}" ";"
//   function   := type IDENT "(" params? ")" (";" | compound)
//   global     := type declarator ";"
//   type       := ("int" | "void" | "struct" IDENT) "*"*
//   declarator := IDENT ("[" INT "]")?
//   stmt       := compound | if | while | return | decl | expr ";" | ";"
//   expr       := assignment (right associative "=")
//
// Expression precedence: || < && < ==/!= < relational < +/- < * / % < unary.
//
//===----------------------------------------------------------------------===//

#include "minisa/Ast.hpp"
#include "minisa/Lexer.hpp"

#include <cassert>

namespace minisa {

void runSema(Ast &Unit, std::vector<Diagnostic> &Diags);

namespace {

struct ParseError {};

class Parser {
public:
  Parser(Ast &Unit, const std::vector<Token> &Toks,
         std::vector<Diagnostic> &Diags)
      : Unit(Unit), Toks(Toks), Diags(Diags) {}

  void parseUnit() {
    while (!at(TokKind::Eof)) {
      if (at(TokKind::KwStruct) && peek(1).Kind == TokKind::Ident &&
          peek(2).Kind == TokKind::LBrace) {
        parseRecord();
        continue;
      }
      parseTopLevelDecl();
    }
  }

private:
  Ast &Unit;
  const std::vector<Token> &Toks;
  std::vector<Diagnostic> &Diags;
  std::size_t Pos = 0;

  const Token &peek(std::size_t Off = 0) const {
    std::size_t I = Pos + Off;
    return I < Toks.size() ? Toks[I] : Toks.back();
  }
  const Token &cur() const { return peek(); }
  bool at(TokKind K) const { return cur().Kind == K; }
  Token consume() { return Toks[Pos++]; }

  [[noreturn]] void error(const std::string &Msg, SourceLoc Loc) {
    Diags.push_back({Diagnostic::Kind::SyntaxError, Loc, Msg});
    throw ParseError{};
  }

  Token expect(TokKind K, const char *What) {
    if (!at(K))
      error(std::string("expected ") + What + " before '" +
                (cur().Kind == TokKind::Eof ? "end of file" : cur().Text) + "'",
            cur().Loc);
    return consume();
  }

  bool atTypeStart() const {
    return at(TokKind::KwInt) || at(TokKind::KwVoid) || at(TokKind::KwStruct);
  }

  const Type *parseType() {
    const Type *T = nullptr;
    if (at(TokKind::KwInt)) {
      consume();
      T = Unit.intType();
    } else if (at(TokKind::KwVoid)) {
      consume();
      T = Unit.voidType();
    } else if (at(TokKind::KwStruct)) {
      consume();
      Token Name = expect(TokKind::Ident, "record name");
      RecordDecl *R = Unit.findRecord(Name.Text);
      if (!R)
        error("unknown record 'struct " + Name.Text + "'", Name.Loc);
      T = Unit.recordType(Name.Text, R);
    } else {
      error("expected type", cur().Loc);
    }
    while (at(TokKind::Star)) {
      consume();
      T = Unit.pointerTo(T);
    }
    return T;
  }

  // declarator := IDENT ("[" INT "]")?
  std::pair<Token, const Type *> parseDeclarator(const Type *Base) {
    Token Name = expect(TokKind::Ident, "identifier");
    const Type *T = Base;
    if (at(TokKind::LBracket)) {
      Token LB = consume();
      Token Len = expect(TokKind::IntLit, "array length");
      expect(TokKind::RBracket, "']'");
      if (Len.IntValue <= 0)
        error("array length must be positive", LB.Loc);
      T = Unit.arrayOf(Base, std::uint32_t(Len.IntValue));
    }
    return {Name, T};
  }

  void parseRecord() {
    Token Kw = consume(); // struct
    Token Name = expect(TokKind::Ident, "record name");
    if (Unit.findRecord(Name.Text))
      error("record 'struct " + Name.Text + "' redefined", Name.Loc);
    expect(TokKind::LBrace, "'{'");
    RecordDecl *R = Unit.newRecord();
    R->Name = Name.Text;
    R->Loc = Kw.Loc;
    Unit.Records.push_back(R);
    while (!at(TokKind::RBrace)) {
      const Type *Base = parseType();
      while (true) {
        auto [FieldName, FieldTy] = parseDeclarator(Base);
        if (FieldTy->isVoid() || FieldTy->isPointer())
          error("record fields must be int, record or array", FieldName.Loc);
        if (R->findField(FieldName.Text))
          error("duplicate field '" + FieldName.Text + "'", FieldName.Loc);
        FieldDecl F;
        F.Name = FieldName.Text;
        F.Ty = FieldTy;
        F.Index = std::uint32_t(R->Fields.size());
        F.Loc = FieldName.Loc;
        R->Fields.push_back(F);
        if (!at(TokKind::Comma))
          break;
        consume();
      }
      expect(TokKind::Semi, "';'");
    }
    expect(TokKind::RBrace, "'}'");
    expect(TokKind::Semi, "';' after record");
  }

  void parseTopLevelDecl() {
    if (!atTypeStart())
      error("expected declaration", cur().Loc);
    const Type *Base = parseType();
    Token Name = expect(TokKind::Ident, "declaration name");
    if (at(TokKind::LParen)) {
      parseFunctionRest(Base, Name);
      return;
    }
    // Global variable.
    const Type *T = Base;
    if (at(TokKind::LBracket)) {
      Token LB = consume();
      Token Len = expect(TokKind::IntLit, "array length");
      expect(TokKind::RBracket, "']'");
      if (Len.IntValue <= 0)
        error("array length must be positive", LB.Loc);
      T = Unit.arrayOf(Base, std::uint32_t(Len.IntValue));
    }
    if (at(TokKind::Eq))
      error("global initializers are not supported", cur().Loc);
    expect(TokKind::Semi, "';'");
    if (T->isVoid())
      error("variable of void type", Name.Loc);
    VarDecl *G = Unit.newVar();
    G->Name = Name.Text;
    G->Ty = T;
    G->IsGlobal = true;
    G->Loc = Name.Loc;
    Unit.Globals.push_back(G);
  }

  void parseFunctionRest(const Type *RetTy, Token Name) {
    expect(TokKind::LParen, "'('");
    FunctionDecl *F = Unit.newFunction();
    F->Name = Name.Text;
    F->ReturnTy = RetTy;
    F->Loc = Name.Loc;
    if (!at(TokKind::RParen)) {
      while (true) {
        const Type *PT = parseType();
        if (PT->isVoid())
          error("parameter of void type", cur().Loc);
        Token PName = expect(TokKind::Ident, "parameter name");
        VarDecl *P = Unit.newVar();
        P->Name = PName.Text;
        P->Ty = PT;
        P->IsParam = true;
        P->Loc = PName.Loc;
        F->Params.push_back(P);
        if (!at(TokKind::Comma))
          break;
        consume();
      }
    }
    expect(TokKind::RParen, "')'");
    if (at(TokKind::Semi)) {
      consume();
    } else {
      F->Body = parseCompound();
    }
    Unit.Functions.push_back(F);
  }

  Stmt *parseCompound() {
    Token LB = expect(TokKind::LBrace, "'{'");
    Stmt *S = Unit.newStmt(StmtKind::Compound, LB.Loc);
    while (!at(TokKind::RBrace)) {
      if (at(TokKind::Eof))
        error("unterminated block", LB.Loc);
      S->Body.push_back(parseStmt());
    }
    consume();
    return S;
  }

  Stmt *parseStmt() {
    switch (cur().Kind) {
    case TokKind::LBrace:
      return parseCompound();
    case TokKind::KwIf: {
      Token Kw = consume();
      expect(TokKind::LParen, "'('");
      Expr *Cond = parseExpr();
      expect(TokKind::RParen, "')'");
      Stmt *S = Unit.newStmt(StmtKind::If, Kw.Loc);
      S->Cond = Cond;
      S->Then = parseStmt();
      if (at(TokKind::KwElse)) {
        consume();
        S->Else = parseStmt();
      }
      return S;
    }
    case TokKind::KwWhile: {
      Token Kw = consume();
      expect(TokKind::LParen, "'('");
      Expr *Cond = parseExpr();
      expect(TokKind::RParen, "')'");
      Stmt *S = Unit.newStmt(StmtKind::While, Kw.Loc);
      S->Cond = Cond;
      S->LoopBody = parseStmt();
      return S;
    }
    case TokKind::KwReturn: {
      Token Kw = consume();
      Stmt *S = Unit.newStmt(StmtKind::Return, Kw.Loc);
      if (!at(TokKind::Semi))
        S->Value = parseExpr();
      expect(TokKind::Semi, "';'");
      return S;
    }
    case TokKind::Semi: {
      Token T = consume();
      return Unit.newStmt(StmtKind::Compound, T.Loc); // empty statement
    }
    default:
      break;
    }
    if (atTypeStart()) {
      const Type *Base = parseType();
      auto [Name, T] = parseDeclarator(Base);
      if (T->isVoid())
        error("variable of void type", Name.Loc);
      VarDecl *V = Unit.newVar();
      V->Name = Name.Text;
      V->Ty = T;
      V->Loc = Name.Loc;
      Stmt *S = Unit.newStmt(StmtKind::DeclStmt, Name.Loc);
      S->Var = V;
      if (at(TokKind::Eq)) {
        consume();
        V->Init = parseAssignment();
      }
      expect(TokKind::Semi, "';'");
      return S;
    }
    Expr *E = parseExpr();
    Stmt *S = Unit.newStmt(StmtKind::ExprStmt, E->Loc);
    S->Value = E;
    expect(TokKind::Semi, "';'");
    return S;
  }

  Expr *parseExpr() { return parseAssignment(); }

  Expr *parseAssignment() {
    Expr *L = parseLogicalOr();
    if (at(TokKind::Eq)) {
      Token Op = consume();
      Expr *R = parseAssignment();
      Expr *E = Unit.newExpr(ExprKind::Binary, Op.Loc);
      E->BOp = BinOp::Assign;
      E->Lhs = L;
      E->Rhs = R;
      return E;
    }
    return L;
  }

  Expr *makeBin(BinOp Op, SourceLoc Loc, Expr *L, Expr *R) {
    Expr *E = Unit.newExpr(ExprKind::Binary, Loc);
    E->BOp = Op;
    E->Lhs = L;
    E->Rhs = R;
    return E;
  }

  Expr *parseLogicalOr() {
    Expr *L = parseLogicalAnd();
    while (at(TokKind::PipePipe)) {
      Token Op = consume();
      L = makeBin(BinOp::LOr, Op.Loc, L, parseLogicalAnd());
    }
    return L;
  }

  Expr *parseLogicalAnd() {
    Expr *L = parseEquality();
    while (at(TokKind::AmpAmp)) {
      Token Op = consume();
      L = makeBin(BinOp::LAnd, Op.Loc, L, parseEquality());
    }
    return L;
  }

  Expr *parseEquality() {
    Expr *L = parseRelational();
    while (at(TokKind::EqEq) || at(TokKind::NotEq)) {
      Token Op = consume();
      L = makeBin(Op.Kind == TokKind::EqEq ? BinOp::EQ : BinOp::NE, Op.Loc, L,
                  parseRelational());
    }
    return L;
  }

  Expr *parseRelational() {
    Expr *L = parseAdditive();
    while (at(TokKind::Less) || at(TokKind::LessEq) || at(TokKind::Greater) ||
           at(TokKind::GreaterEq)) {
      Token Op = consume();
      BinOp B = Op.Kind == TokKind::Less      ? BinOp::LT
                : Op.Kind == TokKind::LessEq  ? BinOp::LE
                : Op.Kind == TokKind::Greater ? BinOp::GT
                                              : BinOp::GE;
      L = makeBin(B, Op.Loc, L, parseAdditive());
    }
    return L;
  }

  Expr *parseAdditive() {
    Expr *L = parseMultiplicative();
    while (at(TokKind::Plus) || at(TokKind::Minus)) {
      Token Op = consume();
      L = makeBin(Op.Kind == TokKind::Plus ? BinOp::Add : BinOp::Sub, Op.Loc, L,
                  parseMultiplicative());
    }
    return L;
  }

  Expr *parseMultiplicative() {
    Expr *L = parseUnary();
    while (at(TokKind::Star) || at(TokKind::Slash) || at(TokKind::Percent)) {
      Token Op = consume();
      BinOp B = Op.Kind == TokKind::Star    ? BinOp::Mul
                : Op.Kind == TokKind::Slash ? BinOp::Div
                                            : BinOp::Rem;
      L = makeBin(B, Op.Loc, L, parseUnary());
    }
    return L;
  }

  Expr *parseUnary() {
    UnaryOp Op;
    switch (cur().Kind) {
    case TokKind::Minus: Op = UnaryOp::Neg; break;
    case TokKind::Not: Op = UnaryOp::Not; break;
    case TokKind::Star: Op = UnaryOp::Deref; break;
    case TokKind::Amp: Op = UnaryOp::AddrOf; break;
    default:
      return parsePostfix();
    }
    Token T = consume();
    Expr *E = Unit.newExpr(ExprKind::Unary, T.Loc);
    E->UOp = Op;
    E->Operand = parseUnary();
    return E;
  }

  Expr *parsePostfix() {
    Expr *E = parsePrimary();
    while (true) {
      if (at(TokKind::LParen)) {
        Token LP = consume();
        if (E->Kind != ExprKind::DeclRef)
          error("called object is not a function name", LP.Loc);
        Expr *Call = Unit.newExpr(ExprKind::Call, E->Loc);
        Call->Name = E->Name;
        if (!at(TokKind::RParen)) {
          while (true) {
            Call->Args.push_back(parseAssignment());
            if (!at(TokKind::Comma))
              break;
            consume();
          }
        }
        expect(TokKind::RParen, "')'");
        E = Call;
      } else if (at(TokKind::LBracket)) {
        Token LB = consume();
        Expr *Idx = parseExpr();
        expect(TokKind::RBracket, "']'");
        Expr *IE = Unit.newExpr(ExprKind::Index, LB.Loc);
        IE->Base = E;
        IE->IndexExpr = Idx;
        E = IE;
      } else if (at(TokKind::Dot) || at(TokKind::Arrow)) {
        Token Op = consume();
        Token FieldName = expect(TokKind::Ident, "field name");
        Expr *ME = Unit.newExpr(ExprKind::Member, Op.Loc);
        ME->Base = E;
        ME->Name = FieldName.Text;
        ME->Arrow = Op.Kind == TokKind::Arrow;
        E = ME;
      } else {
        return E;
      }
    }
  }

  Expr *parsePrimary() {
    if (at(TokKind::IntLit)) {
      Token T = consume();
      Expr *E = Unit.newExpr(ExprKind::IntLiteral, T.Loc);
      E->IntValue = std::int32_t(T.IntValue);
      return E;
    }
    if (at(TokKind::Ident)) {
      Token T = consume();
      Expr *E = Unit.newExpr(ExprKind::DeclRef, T.Loc);
      E->Name = T.Text;
      return E;
    }
    if (at(TokKind::LParen)) {
      consume();
      Expr *E = parseExpr();
      expect(TokKind::RParen, "')'");
      return E;
    }
    error("expected expression", cur().Loc);
  }
};

} // namespace

ParseResult parseTranslationUnit(const std::string &Source,
                                 const std::string &FileName) {
  ParseResult Result;
  auto Unit = std::make_unique<Ast>();
  Unit->Files.push_back(FileName);

  std::vector<Token> Toks = lexSource(Source, 0, Result.Diags);
  Parser P(*Unit, Toks, Result.Diags);
  try {
    P.parseUnit();
  } catch (ParseError &) {
    return Result;
  }
  if (!Result.Diags.empty())
    return Result;

  runSema(*Unit, Result.Diags);
  if (!Result.Diags.empty())
    return Result;
  Result.Unit = std::move(Unit);
  return Result;
}

} // namespace minisa
