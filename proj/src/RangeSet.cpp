//===--- RangeSet.cpp - Disjunctions of signed intervals ----------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/RangeSet.hpp"

#include <algorithm>
#include <sstream>

namespace minisa {

RangeSet RangeSet::range(unsigned Width, std::int64_t Lo, std::int64_t Hi) {
  RangeSet RS(Width);
  Lo = std::max(Lo, minValue(Width));
  Hi = std::min(Hi, maxValue(Width));
  if (Lo <= Hi)
    RS.Ivs.push_back({Lo, Hi});
  return RS;
}

bool RangeSet::contains(std::int64_t V) const {
  for (const Interval &I : Ivs)
    if (I.first <= V && V <= I.second)
      return true;
  return false;
}

void RangeSet::addInterval(std::int64_t Lo, std::int64_t Hi) {
  if (Lo <= Hi)
    Ivs.push_back({Lo, Hi});
}

void RangeSet::normalize() {
  std::sort(Ivs.begin(), Ivs.end());
  std::vector<Interval> Merged;
  for (const Interval &I : Ivs) {
    if (!Merged.empty() && I.first <= Merged.back().second + 1)
      Merged.back().second = std::max(Merged.back().second, I.second);
    else
      Merged.push_back(I);
  }
  Ivs = std::move(Merged);
}

RangeSet RangeSet::intersectWith(const RangeSet &O) const {
  RangeSet Out(Width);
  std::size_t A = 0, B = 0;
  while (A < Ivs.size() && B < O.Ivs.size()) {
    std::int64_t Lo = std::max(Ivs[A].first, O.Ivs[B].first);
    std::int64_t Hi = std::min(Ivs[A].second, O.Ivs[B].second);
    Out.addInterval(Lo, Hi);
    if (Ivs[A].second < O.Ivs[B].second)
      ++A;
    else
      ++B;
  }
  return Out;
}

RangeSet RangeSet::unionWith(const RangeSet &O) const {
  RangeSet Out(Width);
  Out.Ivs = Ivs;
  Out.Ivs.insert(Out.Ivs.end(), O.Ivs.begin(), O.Ivs.end());
  Out.normalize();
  return Out;
}

RangeSet RangeSet::complement() const {
  RangeSet Out(Width);
  std::int64_t Next = minValue(Width);
  for (const Interval &I : Ivs) {
    Out.addInterval(Next, I.first - 1);
    Next = I.second + 1;
  }
  Out.addInterval(Next, maxValue(Width));
  return Out;
}

RangeSet RangeSet::shiftWrapped(std::int64_t Delta) const {
  RangeSet Out(Width);
  for (const Interval &I : Ivs) {
    std::int64_t Lo = truncate(I.first + Delta, Width);
    std::int64_t Hi = truncate(I.second + Delta, Width);
    if (Lo <= Hi) {
      Out.addInterval(Lo, Hi);
    } else { // wrapped past the boundary
      Out.addInterval(minValue(Width), Hi);
      Out.addInterval(Lo, maxValue(Width));
    }
  }
  Out.normalize();
  return Out;
}

RangeSet RangeSet::negateWrapped() const {
  RangeSet Out(Width);
  std::int64_t Min = minValue(Width);
  for (const Interval &I : Ivs) {
    // -MIN wraps to MIN; handle it as its own point.
    std::int64_t Lo = I.first, Hi = I.second;
    if (Lo == Min) {
      Out.addInterval(Min, Min);
      Lo = Min + 1;
      if (Lo > Hi)
        continue;
    }
    Out.addInterval(-Hi, -Lo);
  }
  Out.normalize();
  return Out;
}

std::size_t RangeSet::hash() const {
  std::size_t H = Width;
  for (const Interval &I : Ivs)
    H = H * 1099511628211ULL ^
        (std::size_t(I.first) * 31 + std::size_t(I.second));
  return H;
}

std::string RangeSet::str() const {
  if (isEmpty())
    return "{}";
  std::ostringstream OS;
  OS << "{ ";
  for (std::size_t I = 0; I < Ivs.size(); ++I) {
    if (I)
      OS << ", ";
    OS << "[" << Ivs[I].first << ", " << Ivs[I].second << "]";
  }
  OS << " }";
  return OS.str();
}

} // namespace minisa
