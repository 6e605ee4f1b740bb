#pragma once

#include <algorithm>

namespace sizekit {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return !(lo <= hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  Interval intersect(const Interval& o) const { return {std::max(lo, o.lo), std::min(hi, o.hi)}; }
  bool operator==(const Interval&) const = default;
};

}  // namespace sizekit
