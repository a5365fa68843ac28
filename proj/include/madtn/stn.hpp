#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "madtn/errors.hpp"
#include "madtn/extended_real.hpp"

namespace madtn {

/// Identity of a timepoint within one Stn. Ids are dense, starting at 0.
struct TimePointId {
  std::size_t value = 0;

  friend constexpr auto operator<=>(const TimePointId&, const TimePointId&) = default;
};

struct TimePoint {
  TimePointId id;
  std::string label;
  /// Agent responsible for the timepoint; empty means unassigned. Never used by solving.
  std::string owner;
};

/// lower <= time(to) - time(from) <= upper, seconds.
struct TemporalConstraint {
  TimePointId from;
  TimePointId to;
  ExtendedReal lower = ExtendedReal::neg_inf();
  ExtendedReal upper = ExtendedReal::pos_inf();

  friend bool operator==(const TemporalConstraint&, const TemporalConstraint&) = default;
};

/// Anchor-relative assignment of times to timepoints.
using Schedule = std::map<TimePointId, double>;

class Stn {
 public:
  /// The first timepoint added becomes the anchor unless set_anchor says otherwise.
  TimePointId add_timepoint(std::string label, std::string owner = {}) {
    TimePointId id{points_.size()};
    points_.push_back(TimePoint{id, std::move(label), std::move(owner)});
    if (!anchor_) anchor_ = id;
    return id;
  }

  void add_constraint(const TemporalConstraint& c) {
    require_member(c.from);
    require_member(c.to);
    if (c.lower > c.upper) {
      throw Error(ErrorCode::InvertedBounds, "constraint " + describe(c) + " has lower > upper");
    }
    if (c.lower.is_pos_inf() || c.upper.is_neg_inf()) {
      throw Error(ErrorCode::InvalidBounds, "constraint " + describe(c) + " admits no difference");
    }
    constraints_.push_back(c);
  }

  void set_anchor(TimePointId id) {
    require_member(id);
    anchor_ = id;
  }

  TimePointId anchor() const {
    if (!anchor_) throw Error(ErrorCode::UnknownTimepoint, "empty network has no anchor");
    return *anchor_;
  }

  bool contains(TimePointId id) const { return id.value < points_.size(); }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<TimePoint>& timepoints() const { return points_; }
  const std::vector<TemporalConstraint>& constraints() const { return constraints_; }
  const TimePoint& timepoint(TimePointId id) const {
    require_member(id);
    return points_[id.value];
  }

  std::string describe(const TemporalConstraint& c) const {
    auto name = [this](TimePointId id) {
      if (contains(id) && !points_[id.value].label.empty()) return points_[id.value].label;
      return "#" + std::to_string(id.value);
    };
    return name(c.from) + " -> " + name(c.to) + " [" + c.lower.to_string() + ", " +
           c.upper.to_string() + "]";
  }

  friend bool operator==(const Stn& a, const Stn& b) {
    if (a.anchor_ != b.anchor_ || a.constraints_ != b.constraints_) return false;
    if (a.points_.size() != b.points_.size()) return false;
    for (std::size_t i = 0; i < a.points_.size(); ++i) {
      if (a.points_[i].label != b.points_[i].label || a.points_[i].owner != b.points_[i].owner) {
        return false;
      }
    }
    return true;
  }

 private:
  void require_member(TimePointId id) const {
    if (!contains(id)) {
      throw Error(ErrorCode::UnknownTimepoint, "timepoint #" + std::to_string(id.value) +
                                                   " is not in the network");
    }
  }

  std::vector<TimePoint> points_;
  std::vector<TemporalConstraint> constraints_;
  std::optional<TimePointId> anchor_;
};

/// d(i, j) is the tightest upper bound on time(j) - time(i).
class DistanceGraph {
 public:
  explicit DistanceGraph(std::size_t n)
      : n_(n), d_(n * n, ExtendedReal::pos_inf()) {
    for (std::size_t i = 0; i < n; ++i) at(i, i) = 0.0;
  }

  std::size_t size() const { return n_; }
  ExtendedReal& at(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  const ExtendedReal& at(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  ExtendedReal operator()(TimePointId i, TimePointId j) const { return at(i.value, j.value); }

  /// Tightest [lower, upper] on time(to) - time(from).
  std::pair<ExtendedReal, ExtendedReal> bounds(TimePointId from, TimePointId to) const {
    return {-(*this)(to, from), (*this)(from, to)};
  }

 private:
  std::size_t n_;
  std::vector<ExtendedReal> d_;
};

/// Floyd-Warshall over the distance graph. Returns nullopt when a negative
/// cycle exists. Edge weights are finite or +inf, so sums never mix infinities.
inline std::optional<DistanceGraph> solve(const Stn& stn) {
  const std::size_t n = stn.size();
  DistanceGraph g(n);
  for (const auto& c : stn.constraints()) {
    // to - from <= upper  and  from - to <= -lower; duplicates intersect.
    auto& fwd = g.at(c.from.value, c.to.value);
    fwd = min(fwd, c.upper);
    auto& bwd = g.at(c.to.value, c.from.value);
    bwd = min(bwd, -c.lower);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const ExtendedReal dik = g.at(i, k);
      if (dik.is_pos_inf()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const ExtendedReal dkj = g.at(k, j);
        if (dkj.is_pos_inf()) continue;
        const ExtendedReal via = dik + dkj;
        if (via < g.at(i, j)) g.at(i, j) = via;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (g.at(i, i) < ExtendedReal(-kTimeTolerance)) return std::nullopt;
    g.at(i, i) = 0.0;
  }
  return g;
}

inline bool is_consistent(const Stn& stn) { return solve(stn).has_value(); }

namespace detail {
inline DistanceGraph solve_or_throw(const Stn& stn) {
  auto g = solve(stn);
  if (!g) throw Error(ErrorCode::InconsistentNetwork, "network has a negative cycle");
  return std::move(*g);
}
}  // namespace detail

/// Equivalent network with exactly one constraint per pair i < j, carrying the
/// tightest implied bounds. Timepoints and anchor are preserved.
inline Stn minimal_network(const Stn& stn) {
  const DistanceGraph g = detail::solve_or_throw(stn);
  Stn out;
  for (const auto& tp : stn.timepoints()) out.add_timepoint(tp.label, tp.owner);
  if (!stn.empty()) out.set_anchor(stn.anchor());
  for (std::size_t i = 0; i < stn.size(); ++i) {
    for (std::size_t j = i + 1; j < stn.size(); ++j) {
      out.add_constraint({TimePointId{i}, TimePointId{j}, -g.at(j, i), g.at(i, j)});
    }
  }
  return out;
}

/// Schedule with the anchor at 0 and every timepoint at its earliest feasible
/// time. Timepoints with no finite lower bound relative to the anchor are
/// placed afterwards at min(0, their tightest upper bound).
inline Schedule earliest_schedule(const Stn& stn) {
  const DistanceGraph g = detail::solve_or_throw(stn);
  Schedule s;
  if (stn.empty()) return s;
  const std::size_t a = stn.anchor().value;
  std::vector<std::size_t> unbounded;
  for (std::size_t v = 0; v < stn.size(); ++v) {
    const ExtendedReal back = g.at(v, a);
    if (back.is_finite()) {
      s[TimePointId{v}] = back.value() == 0.0 ? 0.0 : -back.value();
    } else {
      unbounded.push_back(v);
    }
  }
  // Incremental assignment over the minimal network is backtrack-free.
  for (std::size_t v : unbounded) {
    ExtendedReal lo = ExtendedReal::neg_inf();
    ExtendedReal hi = ExtendedReal::pos_inf();
    for (const auto& [u, tu] : s) {
      lo = max(lo, ExtendedReal(tu) - g.at(v, u.value));
      hi = min(hi, ExtendedReal(tu) + g.at(u.value, v));
    }
    double t = 0.0;
    if (lo.is_finite()) {
      t = lo.value();
    } else if (hi.is_finite()) {
      t = std::min(0.0, hi.value());
    }
    s[TimePointId{v}] = t;
  }
  return s;
}

/// Constraints violated by the schedule beyond kTimeTolerance.
inline std::vector<TemporalConstraint> check_schedule(const Stn& stn, const Schedule& s) {
  for (const auto& tp : stn.timepoints()) {
    if (!s.contains(tp.id)) {
      throw Error(ErrorCode::MissingTimepoint,
                  "schedule has no time for " +
                      (tp.label.empty() ? "#" + std::to_string(tp.id.value) : tp.label));
    }
  }
  std::vector<TemporalConstraint> violated;
  for (const auto& c : stn.constraints()) {
    const ExtendedReal diff = s.at(c.to) - s.at(c.from);
    const bool low_ok = c.lower.is_neg_inf() || diff >= c.lower - kTimeTolerance;
    const bool high_ok = c.upper.is_pos_inf() || diff <= c.upper + kTimeTolerance;
    if (!low_ok || !high_ok) violated.push_back(c);
  }
  return violated;
}

}  // namespace madtn
