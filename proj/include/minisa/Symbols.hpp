//===--- Symbols.hpp - Symbolic values and memory regions ------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Symbols stand for values unknown at analysis time: the initial contents of
// a region (RegionValue), results conjured at a program point (Conjured), и
// expressions over them (SymIntExpr with a concrete operand, SymSymExpr over
// two symbols). Memory is a tree: memory spaces at the root, base regions
// directly below them, field/element subregions further down.
//
// Symbols and regions are interned per translation-unit analysis: structural
// equality is pointer identity, and every object carries a stable creation
// id so containers can order deterministically across runs.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/Ast.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <tuple>

namespace minisa {

class Symbol;
class MemRegion;

enum class SValKind : std::uint8_t {
  Undefined,
  Unknown,
  ConcreteInt,
  Sym,
  Loc,
  NullLoc
};

class SVal {
public:
  SVal() = default;

  static SVal undef() { return SVal(SValKind::Undefined); }
  static SVal unknown() { return SVal(SValKind::Unknown); }
  static SVal nullLoc() { return SVal(SValKind::NullLoc); }
  static SVal concrete(std::int32_t V) {
    SVal S(SValKind::ConcreteInt);
    S.Int = V;
    return S;
  }
  static SVal sym(const Symbol *Sym) {
    SVal S(SValKind::Sym);
    S.SymPtr = Sym;
    return S;
  }
  static SVal loc(const MemRegion *R) {
    SVal S(SValKind::Loc);
    S.Region = R;
    return S;
  }

  SValKind kind() const { return K; }
  bool isUndef() const { return K == SValKind::Undefined; }
  bool isUnknown() const { return K == SValKind::Unknown; }
  bool isConcrete() const { return K == SValKind::ConcreteInt; }
  bool isSym() const { return K == SValKind::Sym; }
  bool isLoc() const { return K == SValKind::Loc; }
  bool isNullLoc() const { return K == SValKind::NullLoc; }

  std::int32_t asInt() const { return Int; }
  const Symbol *symbol() const { return K == SValKind::Sym ? SymPtr : nullptr; }
  const MemRegion *region() const {
    return K == SValKind::Loc ? Region : nullptr;
  }

  bool operator==(const SVal &O) const {
    if (K != O.K)
      return false;
    switch (K) {
    case SValKind::ConcreteInt:
      return Int == O.Int;
    case SValKind::Sym:
      return SymPtr == O.SymPtr;
    case SValKind::Loc:
      return Region == O.Region;
    default:
      return true;
    }
  }
  bool operator!=(const SVal &O) const { return !(*this == O); }
  std::size_t hash() const;
  std::string str() const;

private:
  explicit SVal(SValKind K) : K(K) {}
  SValKind K = SValKind::Unknown;
  std::int32_t Int = 0;
  const Symbol *SymPtr = nullptr;
  const MemRegion *Region = nullptr;
};

enum class RegionKind : std::uint8_t {
  StackSpace,
  HeapSpace,
  GlobalSpace,
  UnknownSpace,
  Var,
  Field,
  Element,
  Alloc,
  Sym
};

class MemRegion {
public:
  RegionKind Kind = RegionKind::UnknownSpace;
  std::uint32_t Id = 0;
  const MemRegion *Parent = nullptr; // null only for memory spaces

  const VarDecl *Var = nullptr;      // Var
  const FieldDecl *Field = nullptr;  // Field
  SVal Index;                        // Element
  const Symbol *Sym = nullptr;       // Sym: pointer symbol; Alloc: malloc result
  std::uint32_t FrameId = 0;         // StackSpace

  bool isSpace() const { return Parent == nullptr; }

  /// The unique ancestor that sits directly under a memory space. Identity
  /// for regions that already are base regions.
  const MemRegion *baseRegion() const {
    const MemRegion *R = this;
    while (R->Parent && !R->Parent->isSpace())
      R = R->Parent;
    return R;
  }
  const MemRegion *space() const {
    const MemRegion *R = this;
    while (R->Parent)
      R = R->Parent;
    return R;
  }
  bool isWithin(const MemRegion *Ancestor) const {
    for (const MemRegion *R = this; R; R = R->Parent)
      if (R == Ancestor)
        return true;
    return false;
  }

  /// Static type of the cell this region names, when known.
  const Type *valueType() const {
    switch (Kind) {
    case RegionKind::Var:
      return Var->Ty;
    case RegionKind::Field:
      return Field->Ty;
    case RegionKind::Element: {
      const Type *BT = Parent->valueType();
      return BT && BT->isArray() ? BT->Element : nullptr;
    }
    default:
      return nullptr;
    }
  }

  std::string str() const;
};

enum class SymType : std::uint8_t { Int, Ptr };
enum class SymbolKind : std::uint8_t { RegionValue, Conjured, SymInt, SymSym };

class Symbol {
public:
  SymbolKind Kind = SymbolKind::Conjured;
  SymType Ty = SymType::Int;
  std::uint32_t Id = 0;

  const MemRegion *Region = nullptr; // RegionValue
  std::uint32_t Site = 0;            // Conjured: expression/site id
  std::uint32_t Counter = 0;         // Conjured
  const Symbol *Lhs = nullptr;       // SymInt operand / SymSym lhs
  const Symbol *Rhs = nullptr;       // SymSym rhs
  BinOp Op = BinOp::Add;
  std::int32_t Konst = 0;            // SymInt
  bool ConstOnLeft = false;          // SymInt encodes Konst op Lhs

  bool isExpression() const {
    return Kind == SymbolKind::SymInt || Kind == SymbolKind::SymSym;
  }
  std::string str() const;
};

class RegionManager {
public:
  const MemRegion *stackSpace(std::uint32_t FrameId);
  const MemRegion *heapSpace();
  const MemRegion *globalSpace();
  const MemRegion *unknownSpace();
  const MemRegion *varRegion(const VarDecl *V, const MemRegion *Space);
  const MemRegion *fieldRegion(const FieldDecl *F, const MemRegion *Parent);
  const MemRegion *elementRegion(SVal Index, const MemRegion *Parent);
  const MemRegion *allocRegion(const Symbol *Owner);
  const MemRegion *symRegion(const Symbol *Pointer);

  std::size_t countOf(RegionKind K) const;
  std::size_t totalRegions() const { return Arena.size(); }

private:
  const MemRegion *intern(MemRegion R);
  std::deque<MemRegion> Arena;
  std::map<std::tuple<int, std::uint32_t, std::uint32_t, std::uint64_t,
                      std::int64_t>,
           const MemRegion *>
      Table;
};

class SymbolManager {
public:
  const Symbol *regionValue(const MemRegion *R, SymType Ty);
  const Symbol *conjure(std::uint32_t Site, SymType Ty);
  /// Deterministic fresh symbol for reads through a conjured default binding:
  /// repeated reads of the same subregion under the same default see the same
  /// symbol.
  const Symbol *derivedFromDefault(const Symbol *DefaultSym,
                                   const MemRegion *SubRegion, SymType Ty);
  const Symbol *symInt(const Symbol *Lhs, BinOp Op, std::int32_t K,
                       bool ConstOnLeft, SymType Ty);
  const Symbol *symSym(const Symbol *Lhs, BinOp Op, const Symbol *Rhs,
                       SymType Ty);

  /// Leaves (RegionValue/Conjured) of an expression tree, deduplicated, in
  /// first-appearance order.
  std::vector<const Symbol *> baseSymbols(const Symbol *S) const;

private:
  const Symbol *intern(Symbol S);
  std::deque<Symbol> Arena;
  std::map<std::tuple<int, std::uint64_t, std::uint64_t, std::int64_t, int>,
           const Symbol *>
      Table;
  std::map<std::pair<const Symbol *, const MemRegion *>, const Symbol *>
      DerivedTable;
  std::uint32_t NextConjured = 0;
};

struct SymbolIdLess {
  bool operator()(const Symbol *A, const Symbol *B) const {
    return A->Id < B->Id;
  }
};
struct RegionIdLess {
  bool operator()(const MemRegion *A, const MemRegion *B) const {
    return A->Id < B->Id;
  }
};

} // namespace minisa
