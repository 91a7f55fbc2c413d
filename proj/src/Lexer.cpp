//===--- Lexer.cpp - MiniC token stream ------------------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Lexer.hpp"

#include <cctype>
#include <map>

namespace minisa {

std::vector<Token> lexSource(const std::string &Src, std::uint32_t FileIdx,
                             std::vector<Diagnostic> &Diags) {
  static const std::map<std::string, TokKind> Keywords = {
      {"int", TokKind::KwInt},       {"void", TokKind::KwVoid},
      {"struct", TokKind::KwStruct}, {"if", TokKind::KwIf},
      {"else", TokKind::KwElse},     {"while", TokKind::KwWhile},
      {"return", TokKind::KwReturn}};

  std::vector<Token> Toks;
  std::size_t I = 0;
  std::uint32_t Line = 1, Col = 1;

  auto loc = [&]() { return SourceLoc{FileIdx, Line, Col}; };
  auto advance = [&](std::size_t N) {
    for (std::size_t J = 0; J < N; ++J) {
      if (I < Src.size() && Src[I] == '\n') {
        ++Line;
        Col = 1;
      } else {
        ++Col;
      }
      ++I;
    }
  };
  auto peek = [&](std::size_t Off = 0) -> char {
    return I + Off < Src.size() ? Src[I + Off] : '\0';
  };
  auto push = [&](TokKind K, std::size_t Len) {
    Token T;
    T.Kind = K;
    T.Loc = loc();
    T.Text = Src.substr(I, Len);
    Toks.push_back(T);
    advance(Len);
  };

  while (I < Src.size()) {
    char C = peek();
    if (std::isspace(static_cast<unsigned char>(C))) {
      advance(1);
      continue;
    }
    if (C == '/' && peek(1) == '/') {
      while (I < Src.size() && Src[I] != '\n')
        advance(1);
      continue;
    }
    if (C == '/' && peek(1) == '*') {
      SourceLoc Start = loc();
      advance(2);
      bool Closed = false;
      while (I < Src.size()) {
        if (peek() == '*' && peek(1) == '/') {
          advance(2);
          Closed = true;
          break;
        }
        advance(1);
      }
      if (!Closed)
        Diags.push_back({Diagnostic::Kind::SyntaxError, Start,
                         "unterminated block comment"});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(C)) || C == '_') {
      std::size_t Len = 1;
      while (std::isalnum(static_cast<unsigned char>(peek(Len))) ||
             peek(Len) == '_')
        ++Len;
      std::string Word = Src.substr(I, Len);
      auto KwIt = Keywords.find(Word);
      push(KwIt != Keywords.end() ? KwIt->second : TokKind::Ident, Len);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(C))) {
      std::size_t Len = 1;
      while (std::isdigit(static_cast<unsigned char>(peek(Len))))
        ++Len;
      SourceLoc L = loc();
      std::string Digits = Src.substr(I, Len);
      std::int64_t Value = 0;
      bool Overflow = Digits.size() > 10;
      if (!Overflow) {
        Value = std::stoll(Digits);
        Overflow = Value > 2147483647LL;
      }
      if (Overflow) {
        Diags.push_back({Diagnostic::Kind::TypeError, L,
                         "integer literal '" + Digits +
                             "' does not fit in 32 bits"});
        Value = 0;
      }
      push(TokKind::IntLit, Len);
      Toks.back().IntValue = Value;
      continue;
    }

    switch (C) {
    case '(': push(TokKind::LParen, 1); break;
    case ')': push(TokKind::RParen, 1); break;
    case '{': push(TokKind::LBrace, 1); break;
    case '}': push(TokKind::RBrace, 1); break;
    case '[': push(TokKind::LBracket, 1); break;
    case ']': push(TokKind::RBracket, 1); break;
    case ';': push(TokKind::Semi, 1); break;
    case ',': push(TokKind::Comma, 1); break;
    case '.': push(TokKind::Dot, 1); break;
    case '+': push(TokKind::Plus, 1); break;
    case '%': push(TokKind::Percent, 1); break;
    case '/': push(TokKind::Slash, 1); break;
    case '*': push(TokKind::Star, 1); break;
    case '-':
      push(peek(1) == '>' ? TokKind::Arrow : TokKind::Minus,
           peek(1) == '>' ? 2 : 1);
      break;
    case '&':
      push(peek(1) == '&' ? TokKind::AmpAmp : TokKind::Amp,
           peek(1) == '&' ? 2 : 1);
      break;
    case '|':
      if (peek(1) == '|') {
        push(TokKind::PipePipe, 2);
      } else {
        Diags.push_back({Diagnostic::Kind::SyntaxError, loc(),
                         "unexpected character '|'"});
        push(TokKind::Invalid, 1);
      }
      break;
    case '<':
      push(peek(1) == '=' ? TokKind::LessEq : TokKind::Less,
           peek(1) == '=' ? 2 : 1);
      break;
    case '>':
      push(peek(1) == '=' ? TokKind::GreaterEq : TokKind::Greater,
           peek(1) == '=' ? 2 : 1);
      break;
    case '=':
      push(peek(1) == '=' ? TokKind::EqEq : TokKind::Eq, peek(1) == '=' ? 2 : 1);
      break;
    case '!':
      push(peek(1) == '=' ? TokKind::NotEq : TokKind::Not,
           peek(1) == '=' ? 2 : 1);
      break;
    default:
      Diags.push_back({Diagnostic::Kind::SyntaxError, loc(),
                       std::string("unexpected character '") + C + "'"});
      push(TokKind::Invalid, 1);
      break;
    }
  }

  Token Eof;
  Eof.Kind = TokKind::Eof;
  Eof.Loc = loc();
  Toks.push_back(Eof);
  return Toks;
}

} // namespace minisa
