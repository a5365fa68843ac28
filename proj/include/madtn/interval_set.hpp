#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace madtn {

/// Sorted, disjoint, merged half-open intervals [a, b) on the real line.
/// Abutting intervals merge, so [0,1) + [1,2) is stored as [0,2).
class IntervalSet {
 public:
  using Interval = std::pair<double, double>;

  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> intervals) {
    for (const auto& [a, b] : intervals) add(a, b);
  }

  /// Empty intervals (b <= a) are ignored.
  void add(double a, double b) {
    if (!(b > a)) return;
    auto it = std::lower_bound(items_.begin(), items_.end(), Interval{a, a},
                               [](const Interval& x, const Interval& y) { return x.second < y.first; });
    auto last = it;
    while (last != items_.end() && last->first <= b) {
      a = std::min(a, last->first);
      b = std::max(b, last->second);
      ++last;
    }
    it = items_.erase(it, last);
    items_.insert(it, Interval{a, b});
  }

  const std::vector<Interval>& intervals() const { return items_; }
  bool empty() const { return items_.empty(); }

  double measure() const {
    double total = 0.0;
    for (const auto& [a, b] : items_) total += b - a;
    return total;
  }

  IntervalSet unite(const IntervalSet& other) const {
    IntervalSet out = *this;
    for (const auto& [a, b] : other.items_) out.add(a, b);
    return out;
  }

  IntervalSet intersect(const IntervalSet& other) const {
    IntervalSet out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < items_.size() && j < other.items_.size()) {
      const double lo = std::max(items_[i].first, other.items_[j].first);
      const double hi = std::min(items_[i].second, other.items_[j].second);
      if (hi > lo) out.items_.push_back({lo, hi});
      if (items_[i].second < other.items_[j].second) {
        ++i;
      } else {
        ++j;
      }
    }
    return out;
  }

  /// Points of [lo, hi) not covered by this set.
  IntervalSet complement_within(double lo, double hi) const {
    IntervalSet out;
    double cursor = lo;
    for (const auto& [a, b] : items_) {
      if (b <= cursor) continue;
      if (a >= hi) break;
      if (a > cursor) out.items_.push_back({cursor, std::min(a, hi)});
      cursor = std::max(cursor, b);
      if (cursor >= hi) break;
    }
    if (cursor < hi) out.items_.push_back({cursor, hi});
    return out;
  }

  IntervalSet subtract(const IntervalSet& other) const {
    if (items_.empty()) return {};
    return intersect(other.complement_within(items_.front().first, items_.back().second));
  }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> items_;
};

}  // namespace madtn
