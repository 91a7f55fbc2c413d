//===--- Usr.hpp - Unified symbol resolution identifiers -------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// USRs identify one entity across translation units and key the cross-TU
// definition index. Functions encode their signature:
//
//   F:<name>#<mangled-params>     e.g. int f(int x)       -> F:f#i
//   R:<name>                      e.g. struct X {...}     -> R:X
//
// Parameter mangling: i = int, p<inner> = pointer, r<name># = record,
// a<n><inner> = array of n, v = void (for void* pointees).
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/Ast.hpp"

#include <string>

namespace minisa {

std::string mangleType(const Type *T);
std::string computeFunctionUsr(const FunctionDecl &F);
std::string computeRecordUsr(const RecordDecl &R);

} // namespace minisa
