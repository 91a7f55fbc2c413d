//===--- RangeSet.hpp - Disjunctions of signed intervals -------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The constraint value of the range solver: an ordered union of disjoint,
// non-adjacent inclusive [lo, hi] intervals over the signed two's-complement
// domain of a fixed bit width. MiniC analysis runs at width 32; the solver
// soundness suites run the same code at width 8.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace minisa {

class RangeSet {
public:
  using Interval = std::pair<std::int64_t, std::int64_t>;

  explicit RangeSet(unsigned Width = 32) : Width(Width) {}

  static std::int64_t minValue(unsigned Width) {
    return -(std::int64_t(1) << (Width - 1));
  }
  static std::int64_t maxValue(unsigned Width) {
    return (std::int64_t(1) << (Width - 1)) - 1;
  }
  /// Reduces V into the signed domain of Width with wraparound.
  static std::int64_t truncate(std::int64_t V, unsigned Width) {
    std::uint64_t Mask = (Width == 64) ? ~0ULL : ((1ULL << Width) - 1);
    std::uint64_t U = std::uint64_t(V) & Mask;
    if (U > std::uint64_t(maxValue(Width)))
      return std::int64_t(U) - (std::int64_t(1) << Width);
    return std::int64_t(U);
  }

  static RangeSet full(unsigned Width) {
    RangeSet RS(Width);
    RS.Ivs.push_back({minValue(Width), maxValue(Width)});
    return RS;
  }
  static RangeSet empty(unsigned Width) { return RangeSet(Width); }
  static RangeSet point(unsigned Width, std::int64_t V) {
    return range(Width, V, V);
  }
  /// Clamped to the domain; empty when Lo > Hi after clamping.
  static RangeSet range(unsigned Width, std::int64_t Lo, std::int64_t Hi);

  unsigned width() const { return Width; }
  bool isEmpty() const { return Ivs.empty(); }
  bool isFull() const {
    return Ivs.size() == 1 && Ivs[0].first == minValue(Width) &&
           Ivs[0].second == maxValue(Width);
  }
  bool isPoint(std::int64_t V) const {
    return Ivs.size() == 1 && Ivs[0].first == V && Ivs[0].second == V;
  }
  bool contains(std::int64_t V) const;
  const std::vector<Interval> &intervals() const { return Ivs; }

  RangeSet intersectWith(const RangeSet &O) const;
  RangeSet unionWith(const RangeSet &O) const;
  RangeSet complement() const;

  /// Exact image under x -> x + Delta with modular wraparound; the result may
  /// split at the domain boundary.
  RangeSet shiftWrapped(std::int64_t Delta) const;
  /// Exact image under x -> -x with modular wraparound (MIN maps to MIN).
  RangeSet negateWrapped() const;

  bool operator==(const RangeSet &O) const {
    return Width == O.Width && Ivs == O.Ivs;
  }
  std::size_t hash() const;
  std::string str() const;

private:
  unsigned Width;
  std::vector<Interval> Ivs;

  void addInterval(std::int64_t Lo, std::int64_t Hi);
  void normalize();
};

} // namespace minisa
