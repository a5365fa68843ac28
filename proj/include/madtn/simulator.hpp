#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "madtn/daisy.hpp"
#include "madtn/errors.hpp"
#include "madtn/rng.hpp"
#include "madtn/stn.hpp"

namespace madtn {

enum class DurationSampling { Uniform, TruncatedNormal, LowerBound };

/// How one agent executes: duration sampling, reaction to external
/// enablement, and early starts against handoffs.
struct BehaviorProfile {
  DurationSampling sampling = DurationSampling::Uniform;
  /// Truncated-normal parameters as fractions of the action's [lower, upper] span.
  double mean_fraction = 0.5;
  double stddev_fraction = 0.25;
  /// Reaction delay ~ U[0, max_reaction), added to actions gated by an external constraint.
  double max_reaction = 0.0;
  /// Probability that a handoff-dependent action starts early, and by at most how much.
  double anticipation_probability = 0.0;
  double anticipation_offset = 0.0;

  void validate() const {
    if (!(max_reaction >= 0.0) || !std::isfinite(max_reaction)) {
      throw Error(ErrorCode::InvalidBounds, "max reaction must be finite and >= 0");
    }
    if (!(anticipation_probability >= 0.0 && anticipation_probability <= 1.0)) {
      throw Error(ErrorCode::InvalidBounds, "anticipation probability must lie in [0, 1]");
    }
    if (!(anticipation_offset >= 0.0) || !std::isfinite(anticipation_offset)) {
      throw Error(ErrorCode::InvalidBounds, "anticipation offset must be finite and >= 0");
    }
    if (!(stddev_fraction >= 0.0) || !std::isfinite(mean_fraction)) {
      throw Error(ErrorCode::InvalidBounds, "truncated-normal parameters are invalid");
    }
  }

  friend bool operator==(const BehaviorProfile&, const BehaviorProfile&) = default;
};

struct ExecutionEvent {
  std::string agent;
  std::string petal;
  std::string action;
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const ExecutionEvent&, const ExecutionEvent&) = default;
};

struct Trace {
  std::vector<ExecutionEvent> events;
  double daisy_start = 0.0;
  double daisy_end = 0.0;
  std::uint64_t seed = 0;
  bool feasible = true;
  /// Agents present for the run; events may mention only a subset.
  std::vector<std::string> agents;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Duration drawn from the profile, always inside [lower, upper].
inline double sample_duration(const BehaviorProfile& profile, const Action& action, rng::Stream& stream) {
  const double span = action.upper - action.lower;
  switch (profile.sampling) {
    case DurationSampling::LowerBound:
      return action.lower;
    case DurationSampling::Uniform:
      return std::min(action.upper, action.lower + span * stream.uniform01());
    case DurationSampling::TruncatedNormal: {
      if (span == 0.0) return action.lower;
      const double mean = action.lower + profile.mean_fraction * span;
      const double sd = profile.stddev_fraction * span;
      for (int attempt = 0; attempt < 64; ++attempt) {
        const double x = stream.normal(mean, sd);
        if (x >= action.lower && x <= action.upper) return x;
      }
      return std::clamp(mean, action.lower, action.upper);
    }
  }
  return action.lower;
}

/// Vertex -> observed time, resolved by (petal, action) names. Vs maps to the
/// trace's daisy start and Ve to its daisy end.
inline std::map<VertexId, double> vertex_times(const Daisy& d, const Trace& t) {
  std::map<std::pair<std::string, std::string>, const ExecutionEvent*> by_name;
  for (const auto& e : t.events) {
    if (!by_name.emplace(std::pair{e.petal, e.action}, &e).second) {
      throw Error(ErrorCode::CoverageMismatch, "duplicate event for " + e.petal + "." + e.action);
    }
  }
  std::map<VertexId, double> out;
  out[d.start_vertex()] = t.daisy_start;
  out[d.end_vertex()] = t.daisy_end;
  std::size_t matched = 0;
  for (const auto& p : d.petals()) {
    for (const auto& a : p.actions) {
      auto it = by_name.find({p.name, a.name});
      if (it == by_name.end()) {
        throw Error(ErrorCode::CoverageMismatch, "trace has no event for " + p.name + "." + a.name);
      }
      out[a.start] = it->second->start;
      out[a.end] = it->second->end;
      ++matched;
    }
  }
  if (matched != by_name.size()) {
    throw Error(ErrorCode::CoverageMismatch, "trace has events for actions not in the daisy");
  }
  return out;
}

struct ConstraintViolation {
  std::string from;
  std::string to;
  ExtendedReal lower;
  ExtendedReal upper;
  double observed = 0.0;
};

/// Constraints of the compiled daisy that the trace violates.
inline std::vector<ConstraintViolation> validate_trace(const Daisy& d, const std::optional<Ordering>& ordering,
                                                       const Trace& t) {
  const auto times = vertex_times(d, t);
  const CompiledDaisy compiled = compile_to_stn(d, ordering);
  Schedule s;
  for (const auto& [v, tp] : compiled.timepoint) s[tp] = times.at(v);
  std::vector<ConstraintViolation> out;
  for (const auto& c : check_schedule(compiled.stn, s)) {
    out.push_back({compiled.stn.timepoint(c.from).label, compiled.stn.timepoint(c.to).label, c.lower, c.upper,
                   s.at(c.to) - s.at(c.from)});
  }
  return out;
}

namespace detail {

struct Incoming {
  VertexId source;
  double lower = 0.0;
  bool handoff = false;
};

struct AgentState {
  std::vector<std::pair<std::size_t, std::size_t>> queue;  // (petal, action)
  std::size_t next = 0;
  double free_at = 0.0;
  bool busy = false;
  rng::Stream stream{0};
  BehaviorProfile profile;
};

}  // namespace detail

/// Seeded discrete-event execution of an assigned, ordered daisy.
///
/// Each agent runs its petals in order. An action starts once every external
/// constraint into its start vertex has a known source time; it starts at
/// max(agent free, enabling) plus a reaction delay when externally gated.
/// Handoff-gated actions may, with the profile's probability, start up to
/// `anticipation_offset` seconds before the handoff source completes.
/// Randomness comes from one substream per agent (see rng::substream_seed).
inline Trace simulate(const Daisy& daisy, const Ordering& ordering, const Assignment& assignment,
                      const std::map<std::string, BehaviorProfile>& profiles, std::uint64_t seed) {
  const Daisy d = with_assignment(daisy, assignment);
  require_valid(d);
  for (const auto& p : d.petals()) {
    if (!p.owner) throw Error(ErrorCode::UnassignedPetal, "petal '" + p.name + "' has no owner");
  }
  check_ordering(d, ordering);
  if (!is_consistent(compile_to_stn(d, ordering).stn)) {
    throw Error(ErrorCode::InconsistentOrdering, "ordering compiles to an inconsistent network");
  }

  std::map<VertexId, std::vector<detail::Incoming>> incoming;
  for (const auto& c : d.external()) {
    if (!c.lower.is_finite()) continue;
    incoming[c.to].push_back({c.from, c.lower.value(), c.kind == ConstraintKind::Handoff});
  }

  std::map<std::string, detail::AgentState> agents;  // sorted by id
  for (const auto& a : d.agents()) {
    auto& st = agents[a.id];
    st.stream = rng::Stream(rng::substream_seed(seed, a.id));
    if (auto it = profiles.find(a.id); it != profiles.end()) st.profile = it->second;
    st.profile.validate();
  }
  for (const auto& [agent, seq] : ordering) {
    for (std::size_t p : seq) {
      for (std::size_t i = 0; i < d.petal(p).actions.size(); ++i) agents[agent].queue.push_back({p, i});
    }
  }

  std::map<VertexId, double> known;
  known[d.start_vertex()] = 0.0;
  std::map<std::string, VertexId> waiting_on;
  Trace trace;
  trace.seed = seed;
  for (const auto& a : d.agents()) trace.agents.push_back(a.id);

  using Pending = std::tuple<double, std::string, std::size_t>;  // (end, agent, petal)
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> events;

  auto dispatch = [&](const std::string& id) {
    auto& st = agents[id];
    if (st.busy || st.next >= st.queue.size()) return false;
    const auto [pi, ai] = st.queue[st.next];
    const auto& petal = d.petal(pi);
    const Action& action = petal.actions[ai];

    double enabling = 0.0;
    double handoff_enabling = -std::numeric_limits<double>::infinity();
    bool gated = false;
    if (auto it = incoming.find(action.start); it != incoming.end()) {
      for (const auto& in : it->second) {
        auto src = known.find(in.source);
        if (src == known.end()) {
          waiting_on[id] = in.source;
          return false;
        }
        gated = true;
        if (in.handoff) {
          handoff_enabling = std::max(handoff_enabling, src->second + in.lower);
        } else {
          enabling = std::max(enabling, src->second + in.lower);
        }
      }
    }
    waiting_on.erase(id);

    double reaction = 0.0;
    if (gated && st.profile.max_reaction > 0.0) reaction = st.stream.uniform(0.0, st.profile.max_reaction);
    if (std::isfinite(handoff_enabling)) {
      if (st.profile.anticipation_probability > 0.0 && st.stream.bernoulli(st.profile.anticipation_probability)) {
        handoff_enabling -= st.profile.anticipation_offset * (1.0 - st.stream.uniform01());
      }
      enabling = std::max(enabling, handoff_enabling);
    }
    const double start = std::max(st.free_at, enabling) + reaction;
    const double end = start + sample_duration(st.profile, action, st.stream);

    known[action.start] = start;
    known[action.end] = end;
    trace.events.push_back({id, petal.name, action.name, start, end});
    st.busy = true;
    ++st.next;
    events.emplace(end, id, pi);
    return true;
  };

  auto retry_all = [&] {
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto& [id, st] : agents) progress = dispatch(id) || progress;
    }
  };

  retry_all();
  while (!events.empty()) {
    const auto [time, id, petal] = events.top();
    events.pop();
    auto& st = agents[id];
    st.busy = false;
    st.free_at = time;
    retry_all();
  }

  std::string stuck;
  for (const auto& [id, st] : agents) {
    if (st.next < st.queue.size()) {
      const auto [pi, ai] = st.queue[st.next];
      stuck += (stuck.empty() ? "" : "; ") + id + " at " + d.petal(pi).name + "." + d.petal(pi).actions[ai].name;
      if (auto w = waiting_on.find(id); w != waiting_on.end()) stuck += " waits for " + d.vertex_path(w->second);
    }
  }
  if (!stuck.empty()) throw Error(ErrorCode::Deadlock, "circular waiting: " + stuck);

  std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> rank;
  for (std::size_t p = 0; p < d.petals().size(); ++p) {
    for (std::size_t a = 0; a < d.petal(p).actions.size(); ++a) {
      rank[{d.petal(p).name, d.petal(p).actions[a].name}] = {p, a};
    }
  }
  std::sort(trace.events.begin(), trace.events.end(), [&](const ExecutionEvent& x, const ExecutionEvent& y) {
    return std::tie(x.start, x.agent, rank[{x.petal, x.action}]) <
           std::tie(y.start, y.agent, rank[{y.petal, y.action}]);
  });
  trace.daisy_start = 0.0;
  for (const auto& e : trace.events) trace.daisy_end = std::max(trace.daisy_end, e.end);
  trace.feasible = validate_trace(d, ordering, trace).empty();
  return trace;
}

}  // namespace madtn
