#ifndef CIRCLEABC_INTERVAL_SET_HPP
#define CIRCLEABC_INTERVAL_SET_HPP

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "circleabc/real.hpp"

namespace abc {

// Finite union of closed arcs in [0,1] with exact rational endpoints,
// kept sorted and pairwise disjoint (touching arcs are merged).
class IntervalSet {
 public:
  using Arc = std::pair<Rational, Rational>;

  IntervalSet() = default;
  explicit IntervalSet(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
    normalize();
  }

  static IntervalSet full() {
    return IntervalSet({{Rational(0), Rational(1)}});
  }

  const std::vector<Arc>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }
  std::size_t size() const { return arcs_.size(); }

  Rational measure() const {
    Rational m = 0;
    for (const Arc& a : arcs_) m += a.second - a.first;
    return m;
  }

  bool contains_point(const Rational& x) const {
    for (const Arc& a : arcs_) {
      if (x < a.first) return false;
      if (x <= a.second) return true;
    }
    return false;
  }

  bool contains(const IntervalSet& other) const {
    for (const Arc& b : other.arcs_) {
      bool covered = false;
      for (const Arc& a : arcs_)
        if (a.first <= b.first && b.second <= a.second) {
          covered = true;
          break;
        }
      if (!covered) return false;
    }
    return true;
  }

  friend IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Arc> arcs = a.arcs_;
    arcs.insert(arcs.end(), b.arcs_.begin(), b.arcs_.end());
    return IntervalSet(std::move(arcs));
  }

  friend IntervalSet set_intersection(const IntervalSet& a,
                                      const IntervalSet& b) {
    std::vector<Arc> out;
    std::size_t i = 0, j = 0;
    while (i < a.arcs_.size() && j < b.arcs_.size()) {
      const Arc& x = a.arcs_[i];
      const Arc& y = b.arcs_[j];
      Rational lo = std::max(x.first, y.first);
      Rational hi = std::min(x.second, y.second);
      if (lo <= hi) out.emplace_back(lo, hi);
      if (x.second < y.second)
        ++i;
      else
        ++j;
    }
    return IntervalSet(std::move(out));
  }

  // Complement within [0,1]; degenerate point-gaps are kept (measure 0).
  IntervalSet complement() const {
    std::vector<Arc> out;
    Rational cursor = 0;
    for (const Arc& a : arcs_) {
      if (cursor < a.first) out.emplace_back(cursor, a.first);
      cursor = a.second;
    }
    if (cursor < 1) out.emplace_back(cursor, Rational(1));
    return IntervalSet(std::move(out));
  }

  // Pointwise affine image x -> slope*x + offset (slope > 0).
  IntervalSet affine_image(const Rational& slope,
                           const Rational& offset) const {
    if (slope <= 0) throw std::invalid_argument("affine_image: slope <= 0");
    std::vector<Arc> out;
    out.reserve(arcs_.size());
    for (const Arc& a : arcs_)
      out.emplace_back(slope * a.first + offset, slope * a.second + offset);
    return IntervalSet(std::move(out));
  }

  // Union of q translates of this set scaled into cells [k/q, (k+1)/q].
  IntervalSet tile(const Int& q) const {
    std::vector<Arc> out;
    Rational inv = Rational(1, q);
    for (Int k = 0; k < q; ++k)
      for (const Arc& a : arcs_)
        out.emplace_back(Rational(k, q) + a.first * inv,
                         Rational(k, q) + a.second * inv);
    return IntervalSet(std::move(out));
  }

 private:
  void normalize() {
    for (const Arc& a : arcs_) {
      if (a.first > a.second)
        throw std::invalid_argument("IntervalSet: reversed arc");
      if (a.first < 0 || a.second > 1)
        throw std::invalid_argument("IntervalSet: arc outside [0,1]");
    }
    std::sort(arcs_.begin(), arcs_.end());
    std::vector<Arc> merged;
    for (const Arc& a : arcs_) {
      if (!merged.empty() && a.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, a.second);
      else
        merged.push_back(a);
    }
    arcs_ = std::move(merged);
  }

  std::vector<Arc> arcs_;
};

}  // namespace abc

#endif  // CIRCLEABC_INTERVAL_SET_HPP
