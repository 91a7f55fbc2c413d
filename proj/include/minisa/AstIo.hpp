//===--- AstIo.hpp - Binary AST serialization ------------------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Self-contained binary format for type-annotated translation units, used by
// the cross-TU pass to dump and reload ASTs. Files start with the 4-byte
// version header "MCA1". Serialization is deterministic: equal units produce
// byte-identical output, and deserialize(serialize(a)) is structurally equal
// to a, including source locations and USRs.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/Ast.hpp"

#include <memory>
#include <string>

namespace minisa {

inline constexpr char AstFormatVersion[5] = "MCA1";

std::string serializeAst(const Ast &Unit);

struct DeserializeResult {
  std::unique_ptr<Ast> Unit;
  std::string Error; // non-empty on version mismatch / truncation / corruption
  bool ok() const { return Unit != nullptr; }
};

DeserializeResult deserializeAst(const std::string &Bytes);

/// Deep structural comparison (kinds, names, types, locations, USRs).
bool astEquals(const Ast &A, const Ast &B);

/// Canonical byte encoding of a single function definition, used to decide
/// whether two definitions of the same USR are the same entity.
std::string fingerprintFunction(const FunctionDecl &F, const Ast &Unit);

/// Record layout fingerprint (field names and types, in order) for the
/// one-definition-rule check.
std::string fingerprintRecord(const RecordDecl &R);

} // namespace minisa
