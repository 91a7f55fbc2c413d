//===--- ImmutableMap.hpp - Persistent ordered map -------------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// A persistent AVL map. Every update returns a new map that shares all
// untouched nodes with its predecessor, so symbolic states can be copied
// freely. Node allocations are counted globally so tests can assert the
// sharing behaviour.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace minisa {

extern std::atomic<std::uint64_t> ImmutableMapNodeAllocations;

template <typename K, typename V, typename Less = std::less<K>>
class ImmutableMap {
  struct Node {
    K Key;
    V Val;
    std::shared_ptr<const Node> Left, Right;
    int Height;
    std::size_t Count;
  };
  using NodePtr = std::shared_ptr<const Node>;

  NodePtr Root;

  static int heightOf(const NodePtr &N) { return N ? N->Height : 0; }
  static std::size_t countOf(const NodePtr &N) { return N ? N->Count : 0; }

  static NodePtr makeNode(const K &Key, const V &Val, NodePtr L, NodePtr R) {
    ImmutableMapNodeAllocations.fetch_add(1, std::memory_order_relaxed);
    auto N = std::make_shared<Node>();
    N->Key = Key;
    N->Val = Val;
    N->Left = std::move(L);
    N->Right = std::move(R);
    N->Height = 1 + std::max(heightOf(N->Left), heightOf(N->Right));
    N->Count = 1 + countOf(N->Left) + countOf(N->Right);
    return N;
  }

  static NodePtr rotateLeft(const NodePtr &N) {
    const NodePtr &R = N->Right;
    return makeNode(R->Key, R->Val, makeNode(N->Key, N->Val, N->Left, R->Left),
                    R->Right);
  }

  static NodePtr rotateRight(const NodePtr &N) {
    const NodePtr &L = N->Left;
    return makeNode(L->Key, L->Val, L->Left,
                    makeNode(N->Key, N->Val, L->Right, N->Right));
  }

  static NodePtr balance(NodePtr N) {
    int BF = heightOf(N->Left) - heightOf(N->Right);
    if (BF > 1) {
      if (heightOf(N->Left->Left) < heightOf(N->Left->Right))
        N = makeNode(N->Key, N->Val, rotateLeft(N->Left), N->Right);
      return rotateRight(N);
    }
    if (BF < -1) {
      if (heightOf(N->Right->Right) < heightOf(N->Right->Left))
        N = makeNode(N->Key, N->Val, N->Left, rotateRight(N->Right));
      return rotateLeft(N);
    }
    return N;
  }

  static NodePtr insertImpl(const NodePtr &N, const K &Key, const V &Val) {
    if (!N)
      return makeNode(Key, Val, nullptr, nullptr);
    Less Lt;
    if (Lt(Key, N->Key))
      return balance(makeNode(N->Key, N->Val, insertImpl(N->Left, Key, Val),
                              N->Right));
    if (Lt(N->Key, Key))
      return balance(
          makeNode(N->Key, N->Val, N->Left, insertImpl(N->Right, Key, Val)));
    return makeNode(Key, Val, N->Left, N->Right);
  }

  static const Node *minNode(const Node *N) {
    while (N->Left)
      N = N->Left.get();
    return N;
  }

  static NodePtr eraseImpl(const NodePtr &N, const K &Key, bool &Erased) {
    if (!N)
      return nullptr;
    Less Lt;
    if (Lt(Key, N->Key))
      return balance(makeNode(N->Key, N->Val, eraseImpl(N->Left, Key, Erased),
                              N->Right));
    if (Lt(N->Key, Key))
      return balance(
          makeNode(N->Key, N->Val, N->Left, eraseImpl(N->Right, Key, Erased)));
    Erased = true;
    if (!N->Left)
      return N->Right;
    if (!N->Right)
      return N->Left;
    const Node *Min = minNode(N->Right.get());
    return balance(makeNode(Min->Key, Min->Val, N->Left,
                            eraseImpl(N->Right, Min->Key, Erased)));
  }

  explicit ImmutableMap(NodePtr R) : Root(std::move(R)) {}

public:
  ImmutableMap() = default;

  [[nodiscard]] ImmutableMap insert(const K &Key, const V &Val) const {
    return ImmutableMap(insertImpl(Root, Key, Val));
  }

  [[nodiscard]] ImmutableMap erase(const K &Key) const {
    bool Erased = false;
    NodePtr R = eraseImpl(Root, Key, Erased);
    return Erased ? ImmutableMap(std::move(R)) : *this;
  }

  const V *find(const K &Key) const {
    Less Lt;
    const Node *N = Root.get();
    while (N) {
      if (Lt(Key, N->Key))
        N = N->Left.get();
      else if (Lt(N->Key, Key))
        N = N->Right.get();
      else
        return &N->Val;
    }
    return nullptr;
  }

  bool contains(const K &Key) const { return find(Key) != nullptr; }
  std::size_t size() const { return countOf(Root); }
  bool empty() const { return !Root; }
  bool sameRoot(const ImmutableMap &O) const { return Root == O.Root; }

  // In-order iteration; visits keys in ascending order.
  class Iterator {
    std::vector<const Node *> Stack;
    void descend(const Node *N) {
      while (N) {
        Stack.push_back(N);
        N = N->Left.get();
      }
    }

  public:
    explicit Iterator(const Node *Root) { descend(Root); }
    bool done() const { return Stack.empty(); }
    const K &key() const { return Stack.back()->Key; }
    const V &value() const { return Stack.back()->Val; }
    void next() {
      const Node *N = Stack.back();
      Stack.pop_back();
      descend(N->Right.get());
    }
  };

  Iterator begin() const { return Iterator(Root.get()); }

  template <typename F> void forEach(F Fn) const {
    for (Iterator It = begin(); !It.done(); It.next())
      Fn(It.key(), It.value());
  }

  template <typename KeyEq, typename ValEq>
  bool equals(const ImmutableMap &O, KeyEq KE, ValEq VE) const {
    if (Root == O.Root)
      return true;
    if (size() != O.size())
      return false;
    Iterator A = begin(), B = O.begin();
    while (!A.done()) {
      if (!KE(A.key(), B.key()) || !VE(A.value(), B.value()))
        return false;
      A.next();
      B.next();
    }
    return true;
  }

  template <typename F> std::size_t hashWith(F EntryHash) const {
    std::size_t H = 0x9e3779b97f4a7c15ULL;
    forEach([&](const K &Key, const V &Val) {
      H = H * 1099511628211ULL ^ EntryHash(Key, Val);
    });
    return H ^ size();
  }
};

inline std::size_t hashCombine(std::size_t A, std::size_t B) {
  return A ^ (B + 0x9e3779b97f4a7c15ULL + (A << 6) + (A >> 2));
}

} // namespace minisa
