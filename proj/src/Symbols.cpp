//===--- Symbols.cpp - Symbolic values and memory regions ---------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Symbols.hpp"

#include <cassert>

namespace minisa {

std::size_t SVal::hash() const {
  std::size_t H = std::size_t(K) * 0x9e3779b9;
  switch (K) {
  case SValKind::ConcreteInt:
    return H ^ std::size_t(std::uint32_t(Int));
  case SValKind::Sym:
    return H ^ (std::size_t(SymPtr->Id) << 3);
  case SValKind::Loc:
    return H ^ (std::size_t(Region->Id) << 4);
  default:
    return H;
  }
}

std::string SVal::str() const {
  switch (K) {
  case SValKind::Undefined:
    return "undef";
  case SValKind::Unknown:
    return "unknown";
  case SValKind::ConcreteInt:
    return std::to_string(Int);
  case SValKind::Sym:
    return SymPtr->str();
  case SValKind::Loc:
    return "&" + Region->str();
  case SValKind::NullLoc:
    return "null";
  }
  return "?";
}

std::string MemRegion::str() const {
  switch (Kind) {
  case RegionKind::StackSpace:
    return "stack#" + std::to_string(FrameId);
  case RegionKind::HeapSpace:
    return "heap";
  case RegionKind::GlobalSpace:
    return "globals";
  case RegionKind::UnknownSpace:
    return "unknown-space";
  case RegionKind::Var:
    return Var->Name;
  case RegionKind::Field:
    return Parent->str() + "." + Field->Name;
  case RegionKind::Element:
    return Parent->str() + "[" + Index.str() + "]";
  case RegionKind::Alloc:
    return "alloc#" + std::to_string(Sym->Counter);
  case RegionKind::Sym:
    return "*(" + Sym->str() + ")";
  }
  return "?";
}

static const char *symOpText(BinOp Op) {
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
  default: return "?";
  }
}

std::string Symbol::str() const {
  switch (Kind) {
  case SymbolKind::RegionValue:
    return "reg_$" + std::to_string(Id) + "<" + Region->str() + ">";
  case SymbolKind::Conjured:
    return "conj_$" + std::to_string(Counter);
  case SymbolKind::SymInt:
    if (ConstOnLeft)
      return "(" + std::to_string(Konst) + " " + symOpText(Op) + " " +
             Lhs->str() + ")";
    return "(" + Lhs->str() + " " + symOpText(Op) + " " +
           std::to_string(Konst) + ")";
  case SymbolKind::SymSym:
    return "(" + Lhs->str() + ") " + symOpText(Op) + " (" + Rhs->str() + ")";
  }
  return "?";
}

//===----------------------------------------------------------------------===//
// RegionManager
//===----------------------------------------------------------------------===//

const MemRegion *RegionManager::intern(MemRegion R) {
  std::uint64_t A = 0;
  std::int64_t B = 0;
  switch (R.Kind) {
  case RegionKind::StackSpace:
    A = R.FrameId;
    break;
  case RegionKind::Var:
    A = R.Var->Id;
    break;
  case RegionKind::Field:
    A = std::uint64_t(reinterpret_cast<std::uintptr_t>(R.Field));
    break;
  case RegionKind::Element:
    A = std::uint64_t(R.Index.kind());
    B = R.Index.isConcrete() ? R.Index.asInt()
        : R.Index.isSym()    ? std::int64_t(R.Index.symbol()->Id)
                             : 0;
    break;
  case RegionKind::Alloc:
  case RegionKind::Sym:
    A = R.Sym->Id;
    break;
  default:
    break;
  }
  auto Key = std::make_tuple(int(R.Kind), R.Parent ? R.Parent->Id : 0xFFFFFFFF,
                             R.Var ? R.Var->Id : 0, A, B);
  auto It = Table.find(Key);
  if (It != Table.end())
    return It->second;
  R.Id = std::uint32_t(Arena.size());
  Arena.push_back(R);
  const MemRegion *P = &Arena.back();
  Table.emplace(Key, P);
  return P;
}

const MemRegion *RegionManager::stackSpace(std::uint32_t FrameId) {
  MemRegion R;
  R.Kind = RegionKind::StackSpace;
  R.FrameId = FrameId;
  return intern(R);
}
const MemRegion *RegionManager::heapSpace() {
  MemRegion R;
  R.Kind = RegionKind::HeapSpace;
  return intern(R);
}
const MemRegion *RegionManager::globalSpace() {
  MemRegion R;
  R.Kind = RegionKind::GlobalSpace;
  return intern(R);
}
const MemRegion *RegionManager::unknownSpace() {
  MemRegion R;
  R.Kind = RegionKind::UnknownSpace;
  return intern(R);
}
const MemRegion *RegionManager::varRegion(const VarDecl *V,
                                          const MemRegion *Space) {
  assert(Space && Space->isSpace());
  MemRegion R;
  R.Kind = RegionKind::Var;
  R.Var = V;
  R.Parent = Space;
  return intern(R);
}
const MemRegion *RegionManager::fieldRegion(const FieldDecl *F,
                                            const MemRegion *Parent) {
  MemRegion R;
  R.Kind = RegionKind::Field;
  R.Field = F;
  R.Parent = Parent;
  return intern(R);
}
const MemRegion *RegionManager::elementRegion(SVal Index,
                                              const MemRegion *Parent) {
  MemRegion R;
  R.Kind = RegionKind::Element;
  R.Index = Index;
  R.Parent = Parent;
  return intern(R);
}
const MemRegion *RegionManager::allocRegion(const Symbol *Owner) {
  MemRegion R;
  R.Kind = RegionKind::Alloc;
  R.Sym = Owner;
  R.Parent = heapSpace();
  return intern(R);
}
const MemRegion *RegionManager::symRegion(const Symbol *Pointer) {
  MemRegion R;
  R.Kind = RegionKind::Sym;
  R.Sym = Pointer;
  R.Parent = unknownSpace();
  return intern(R);
}

std::size_t RegionManager::countOf(RegionKind K) const {
  std::size_t N = 0;
  for (const MemRegion &R : Arena)
    N += R.Kind == K;
  return N;
}

//===----------------------------------------------------------------------===//
// SymbolManager
//===----------------------------------------------------------------------===//

const Symbol *SymbolManager::intern(Symbol S) {
  auto Key = std::make_tuple(
      int(S.Kind) | (int(S.Ty) << 8) | (S.ConstOnLeft ? 1 << 9 : 0) |
          (int(S.Op) << 10),
      S.Region ? S.Region->Id : (S.Lhs ? S.Lhs->Id : 0),
      S.Rhs ? S.Rhs->Id : ((std::uint64_t(S.Site) << 32) | S.Counter),
      std::int64_t(S.Konst), 0);
  auto It = Table.find(Key);
  if (It != Table.end())
    return It->second;
  S.Id = std::uint32_t(Arena.size());
  Arena.push_back(S);
  const Symbol *P = &Arena.back();
  Table.emplace(Key, P);
  return P;
}

const Symbol *SymbolManager::regionValue(const MemRegion *R, SymType Ty) {
  Symbol S;
  S.Kind = SymbolKind::RegionValue;
  S.Region = R;
  S.Ty = Ty;
  return intern(S);
}

const Symbol *SymbolManager::conjure(std::uint32_t Site, SymType Ty) {
  Symbol S;
  S.Kind = SymbolKind::Conjured;
  S.Site = Site;
  S.Counter = NextConjured++;
  S.Ty = Ty;
  return intern(S);
}

const Symbol *SymbolManager::derivedFromDefault(const Symbol *DefaultSym,
                                                const MemRegion *SubRegion,
                                                SymType Ty) {
  auto It = DerivedTable.find({DefaultSym, SubRegion});
  if (It != DerivedTable.end())
    return It->second;
  const Symbol *Fresh = conjure(DefaultSym->Site, Ty);
  DerivedTable.emplace(std::make_pair(DefaultSym, SubRegion), Fresh);
  return Fresh;
}

const Symbol *SymbolManager::symInt(const Symbol *Lhs, BinOp Op,
                                    std::int32_t K, bool ConstOnLeft,
                                    SymType Ty) {
  Symbol S;
  S.Kind = SymbolKind::SymInt;
  S.Lhs = Lhs;
  S.Op = Op;
  S.Konst = K;
  S.ConstOnLeft = ConstOnLeft;
  S.Ty = Ty;
  return intern(S);
}

const Symbol *SymbolManager::symSym(const Symbol *Lhs, BinOp Op,
                                    const Symbol *Rhs, SymType Ty) {
  Symbol S;
  S.Kind = SymbolKind::SymSym;
  S.Lhs = Lhs;
  S.Op = Op;
  S.Rhs = Rhs;
  S.Ty = Ty;
  return intern(S);
}

std::vector<const Symbol *> SymbolManager::baseSymbols(const Symbol *S) const {
  std::vector<const Symbol *> Out;
  std::vector<const Symbol *> Work{S};
  while (!Work.empty()) {
    const Symbol *Cur = Work.back();
    Work.pop_back();
    if (!Cur->isExpression()) {
      bool Seen = false;
      for (const Symbol *B : Out)
        Seen |= B == Cur;
      if (!Seen)
        Out.push_back(Cur);
      continue;
    }
    if (Cur->Kind == SymbolKind::SymSym)
      Work.push_back(Cur->Rhs);
    Work.push_back(Cur->Lhs);
  }
  return Out;
}

} // namespace minisa
