#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlim {

/// Half-open interval [lo, hi) on the nonnegative time axis.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Finite disjoint union of half-open intervals, kept sorted with touching
/// intervals merged. Immutable value semantics: all operations return new
/// sets.
class IntervalSet {
 public:
  IntervalSet() = default;

  explicit IntervalSet(std::vector<Interval> raw) : intervals_(std::move(raw)) {
    normalize();
  }

  static IntervalSet single(double lo, double hi) {
    return IntervalSet({Interval{lo, hi}});
  }

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }

  double measure() const {
    double sum = 0.0;
    for (const auto& iv : intervals_) sum += iv.length();
    return sum;
  }

  /// Least upper bound of the set; 0 for the empty set.
  double sup() const { return intervals_.empty() ? 0.0 : intervals_.back().hi; }

  bool contains(double t) const {
    auto it = std::upper_bound(
        intervals_.begin(), intervals_.end(), t,
        [](double v, const Interval& iv) { return v < iv.hi; });
    return it != intervals_.end() && it->lo <= t;
  }

  /// Measure of the part in [k, inf).
  double tail_measure(double k) const {
    double sum = 0.0;
    for (auto it = intervals_.rbegin(); it != intervals_.rend(); ++it) {
      if (it->hi <= k) break;
      sum += it->hi - std::max(it->lo, k);
    }
    return sum;
  }

  /// Intersection with [0, t).
  IntervalSet restrict_to(double t) const {
    std::vector<Interval> out;
    for (const auto& iv : intervals_) {
      if (iv.lo >= t) break;
      out.push_back({iv.lo, std::min(iv.hi, t)});
    }
    return IntervalSet(std::move(out));
  }

  friend IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> merged;
    merged.reserve(a.intervals_.size() + b.intervals_.size());
    merged.insert(merged.end(), a.intervals_.begin(), a.intervals_.end());
    merged.insert(merged.end(), b.intervals_.begin(), b.intervals_.end());
    return IntervalSet(std::move(merged));
  }

  friend IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < a.intervals_.size() && j < b.intervals_.size()) {
      const Interval& p = a.intervals_[i];
      const Interval& q = b.intervals_[j];
      const double lo = std::max(p.lo, q.lo);
      const double hi = std::min(p.hi, q.hi);
      if (lo < hi) out.push_back({lo, hi});
      (p.hi < q.hi) ? ++i : ++j;
    }
    return IntervalSet(std::move(out));
  }

  /// Line-based text format, one "lo hi" pair per line.
  std::string to_text() const {
    std::ostringstream os;
    os.precision(17);
    for (const auto& iv : intervals_) os << iv.lo << " " << iv.hi << "\n";
    return os.str();
  }

  static IntervalSet from_text(const std::string& text) {
    std::istringstream is(text);
    std::vector<Interval> raw;
    double lo, hi;
    while (is >> lo >> hi) raw.push_back({lo, hi});
    if (!is.eof() && is.fail()) {
      throw std::invalid_argument("interval set text: malformed line");
    }
    return IntervalSet(std::move(raw));
  }

 private:
  void normalize() {
    for (const auto& iv : intervals_) {
      if (!(iv.lo >= 0.0) || !(iv.hi > iv.lo) || !std::isfinite(iv.hi)) {
        if (iv.hi == iv.lo) continue;  // empty pieces dropped below
        throw std::invalid_argument("interval set: need 0 <= lo < hi finite");
      }
    }
    std::erase_if(intervals_, [](const Interval& iv) { return iv.hi <= iv.lo; });
    std::sort(intervals_.begin(), intervals_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : intervals_) {
      if (!merged.empty() && iv.lo <= merged.back().hi) {
        merged.back().hi = std::max(merged.back().hi, iv.hi);
      } else {
        merged.push_back(iv);
      }
    }
    intervals_ = std::move(merged);
  }

  std::vector<Interval> intervals_;
};

/// Upper-density estimate of a time set from ratios measure(ts cap [0,t])/t
/// over a horizon grid. The reported value is the maximum ratio over the
/// final third of the grid, a finite-horizon proxy for the limsup.
struct DensityEstimate {
  double value = 0.0;
  std::vector<double> horizons;
  std::vector<double> ratios;
};

inline DensityEstimate upper_density(const IntervalSet& ts,
                                     std::span<const double> horizons) {
  if (horizons.empty()) throw std::invalid_argument("upper_density: empty horizons");
  DensityEstimate est;
  est.horizons.assign(horizons.begin(), horizons.end());
  est.ratios.reserve(horizons.size());
  for (double t : horizons) {
    if (!(t > 0.0)) throw std::invalid_argument("upper_density: horizons must be positive");
    est.ratios.push_back(ts.restrict_to(t).measure() / t);
  }
  const std::size_t start = est.ratios.size() - (est.ratios.size() + 2) / 3;
  est.value = *std::max_element(est.ratios.begin() + static_cast<std::ptrdiff_t>(start),
                                est.ratios.end());
  return est;
}

}  // namespace dlim
