//===--- Usr.cpp - Unified symbol resolution identifiers --------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Usr.hpp"

namespace minisa {

std::string mangleType(const Type *T) {
  switch (T->Kind) {
  case TypeKind::Int:
    return "i";
  case TypeKind::Void:
    return "v";
  case TypeKind::Pointer:
    return "p" + mangleType(T->Pointee);
  case TypeKind::Record:
    return "r" + T->RecordName + "#";
  case TypeKind::Array:
    return "a" + std::to_string(T->Length) + mangleType(T->Element);
  }
  return "?";
}

std::string computeFunctionUsr(const FunctionDecl &F) {
  std::string Usr = "F:" + F.Name + "#";
  for (const VarDecl *P : F.Params)
    Usr += mangleType(P->Ty);
  return Usr;
}

std::string computeRecordUsr(const RecordDecl &R) { return "R:" + R.Name; }

} // namespace minisa
