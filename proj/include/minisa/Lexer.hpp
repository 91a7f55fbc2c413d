//===--- Lexer.hpp - MiniC token stream ------------------------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/Ast.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace minisa {

enum class TokKind {
  Eof,
  Ident,
  IntLit,
  KwInt,
  KwVoid,
  KwStruct,
  KwIf,
  KwElse,
  KwWhile,
  KwReturn,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Semi,
  Comma,
  Dot,
  Arrow,
  Amp,
  AmpAmp,
  PipePipe,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Less,
  LessEq,
  Greater,
  GreaterEq,
  EqEq,
  NotEq,
  Eq,
  Not,
  Invalid
};

struct Token {
  TokKind Kind = TokKind::Eof;
  std::string Text;
  std::int64_t IntValue = 0;
  SourceLoc Loc;
};

/// Tokenizes Source. Lexical problems (stray characters, unterminated block
/// comments, out-of-range integer literals) are reported into Diags; an
/// Invalid token is substituted so parsing can continue.
std::vector<Token> lexSource(const std::string &Source, std::uint32_t FileIdx,
                             std::vector<Diagnostic> &Diags);

} // namespace minisa
