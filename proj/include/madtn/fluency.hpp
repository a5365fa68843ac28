#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "madtn/daisy.hpp"
#include "madtn/errors.hpp"
#include "madtn/extended_real.hpp"
#include "madtn/interval_set.hpp"
#include "madtn/simulator.hpp"

namespace madtn {

/// Agents of the trace: its roster when present, else the agents seen in events.
inline std::vector<std::string> trace_agents(const Trace& t) {
  if (!t.agents.empty()) {
    std::vector<std::string> out = t.agents;
    std::sort(out.begin(), out.end());
    return out;
  }
  std::set<std::string> seen;
  for (const auto& e : t.events) seen.insert(e.agent);
  return {seen.begin(), seen.end()};
}

namespace detail {

inline void require_agent(const Trace& t, const std::string& agent) {
  const auto agents = trace_agents(t);
  if (std::find(agents.begin(), agents.end(), agent) == agents.end()) {
    throw Error(ErrorCode::UnknownAgent, "agent '" + agent + "' does not appear in the trace");
  }
}

inline std::pair<std::string, std::string> require_pair(const Trace& t) {
  const auto agents = trace_agents(t);
  if (agents.size() != 2) {
    throw Error(ErrorCode::AgentCount, "pairwise metrics need exactly two agents, trace has " +
                                           std::to_string(agents.size()));
  }
  return {agents[0], agents[1]};
}

}  // namespace detail

/// Union of the agent's [start, end) event intervals.
inline IntervalSet activity_intervals(const Trace& t, const std::string& agent) {
  detail::require_agent(t, agent);
  IntervalSet out;
  for (const auto& e : t.events) {
    if (e.agent == agent) out.add(e.start, e.end);
  }
  return out;
}

/// Idle portion of [daisy start, daisy end) for one agent.
inline IntervalSet idle_intervals(const Trace& t, const std::string& agent) {
  return activity_intervals(t, agent).complement_within(t.daisy_start, t.daisy_end);
}

struct IdleTime {
  double total = 0.0;
  /// Idle time outside any of the agent's petal spans.
  double rest = 0.0;
  /// Idle time inside a petal span (first action start to last action end).
  double intra_petal_wait = 0.0;

  friend bool operator==(const IdleTime&, const IdleTime&) = default;
};

inline IdleTime agent_idle_time(const Trace& t, const std::string& agent) {
  const IntervalSet idle = idle_intervals(t, agent);
  std::map<std::string, std::pair<double, double>> spans;
  for (const auto& e : t.events) {
    if (e.agent != agent) continue;
    auto [it, fresh] = spans.try_emplace(e.petal, e.start, e.end);
    if (!fresh) {
      it->second.first = std::min(it->second.first, e.start);
      it->second.second = std::max(it->second.second, e.end);
    }
  }
  IntervalSet inside;
  for (const auto& [petal, span] : spans) inside.add(span.first, span.second);
  IdleTime out;
  out.total = idle.measure();
  out.intra_petal_wait = idle.intersect(inside).measure();
  out.rest = std::max(0.0, out.total - out.intra_petal_wait);
  return out;
}

/// Time both agents are active at once.
inline double concurrent_activity(const Trace& t) {
  const auto [a, b] = detail::require_pair(t);
  return activity_intervals(t, a).intersect(activity_intervals(t, b)).measure();
}

/// Time, within the daisy, that both agents are idle at once.
inline double concurrent_inactivity(const Trace& t) {
  const auto [a, b] = detail::require_pair(t);
  return idle_intervals(t, a).intersect(idle_intervals(t, b)).measure();
}

struct PetalFunctionalDelay {
  std::size_t external_index = 0;
  std::string from_petal;
  std::string to_petal;
  /// Agent whose petal waited on the other's; owner of the dependent petal.
  std::string delaying_agent;
  std::string enabling_agent;
  /// First start of the dependent petal minus last end of the enabling petal.
  /// Negative means the dependent agent anticipated.
  double delay = 0.0;

  friend bool operator==(const PetalFunctionalDelay&, const PetalFunctionalDelay&) = default;
};

namespace detail {

inline std::pair<double, double> petal_span(const Trace& t, const std::string& petal) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& e : t.events) {
    if (e.petal != petal) continue;
    lo = std::min(lo, e.start);
    hi = std::max(hi, e.end);
  }
  return {lo, hi};
}

}  // namespace detail

/// One entry per cross-agent handoff constraint.
inline std::vector<PetalFunctionalDelay> petal_functional_delay(const Trace& t, const Daisy& d) {
  vertex_times(d, t);  // coverage check
  std::vector<PetalFunctionalDelay> out;
  for (const auto& h : handoff_constraints(d)) {
    const auto& p = d.petal(h.from_petal);
    const auto& q = d.petal(h.to_petal);
    const double last_end = detail::petal_span(t, p.name).second;
    const double first_start = detail::petal_span(t, q.name).first;
    out.push_back({h.external_index, p.name, q.name, *q.owner, *p.owner, first_start - last_end});
  }
  return out;
}

enum class HandoffClass { Blocked, Stale, Exact };

inline std::string_view to_string(HandoffClass c) {
  switch (c) {
    case HandoffClass::Blocked: return "blocked";
    case HandoffClass::Stale: return "stale";
    case HandoffClass::Exact: return "exact";
  }
  return "exact";
}

/// Action-level view of one handoff.
///
/// E: when the enabling agent produced the resource (source vertex).
/// R: when the dependent agent was ready, i.e. the end of its previous action
///    (daisy start if none).
/// S: when the dependent action started.
/// resource_delay = E - R. Blocked (> 0) or exact: functional_delay = S - E.
/// Stale (< 0): functional_delay = S - R, never negative.
struct HandoffDelays {
  std::size_t external_index = 0;
  std::string from_vertex;
  std::string to_vertex;
  std::string enabling_agent;
  std::string dependent_agent;
  double enabling_time = 0.0;
  double ready_time = 0.0;
  double dependent_start = 0.0;
  double resource_delay = 0.0;
  double functional_delay = 0.0;
  HandoffClass classification = HandoffClass::Exact;

  friend bool operator==(const HandoffDelays&, const HandoffDelays&) = default;
};

inline HandoffClass classify_resource_delay(double resource_delay) {
  if (std::abs(resource_delay) <= kTimeTolerance) return HandoffClass::Exact;
  return resource_delay > 0.0 ? HandoffClass::Blocked : HandoffClass::Stale;
}

/// Delays for the handoff stored at `external_index` in the daisy.
inline HandoffDelays handoff_delay(const Trace& t, const Daisy& d, std::size_t external_index) {
  const auto& c = d.external().at(external_index);
  if (c.kind != ConstraintKind::Handoff) {
    throw Error(ErrorCode::NonHandoffKind, "external[" + std::to_string(external_index) + "] is a " +
                                               std::string(to_string(c.kind)) + " constraint");
  }
  if (c.lower != ExtendedReal(0.0)) {
    throw Error(ErrorCode::NonHandoffKind, "handoff delays are defined only for lower bound 0");
  }
  const auto times = vertex_times(d, t);
  const auto from = d.locate(c.from);
  const auto to = d.locate(c.to);
  if (!from || !to) throw Error(ErrorCode::InvalidDaisy, "handoff endpoints must lie inside petals");

  const auto& dep_petal = d.petal(to->petal);
  const auto& dep_action = dep_petal.actions[to->action];

  // The dependent agent is whoever executed the target action.
  std::string dependent;
  for (const auto& e : t.events) {
    if (e.petal == dep_petal.name && e.action == dep_action.name) dependent = e.agent;
  }
  std::vector<const ExecutionEvent*> own;
  for (const auto& e : t.events) {
    if (e.agent == dependent) own.push_back(&e);
  }
  std::stable_sort(own.begin(), own.end(),
                   [](const ExecutionEvent* x, const ExecutionEvent* y) { return x->start < y->start; });
  double ready = t.daisy_start;
  for (std::size_t i = 0; i < own.size(); ++i) {
    if (own[i]->petal == dep_petal.name && own[i]->action == dep_action.name) {
      if (i > 0) ready = own[i - 1]->end;
      break;
    }
  }

  HandoffDelays out;
  out.external_index = external_index;
  out.from_vertex = d.vertex_path(c.from);
  out.to_vertex = d.vertex_path(c.to);
  out.enabling_agent = d.petal(from->petal).owner.value_or("");
  out.dependent_agent = dependent;
  out.enabling_time = times.at(c.from);
  out.ready_time = ready;
  out.dependent_start = times.at(c.to);
  out.resource_delay = out.enabling_time - out.ready_time;
  out.classification = classify_resource_delay(out.resource_delay);
  out.functional_delay = out.classification == HandoffClass::Stale ? out.dependent_start - out.ready_time
                                                                   : out.dependent_start - out.enabling_time;
  return out;
}

/// One entry per cross-agent handoff.
inline std::vector<HandoffDelays> handoff_delays(const Trace& t, const Daisy& d) {
  std::vector<HandoffDelays> out;
  for (const auto& h : handoff_constraints(d)) out.push_back(handoff_delay(t, d, h.external_index));
  return out;
}

struct AgentFluency {
  std::string agent;
  IdleTime idle;
  double active = 0.0;

  friend bool operator==(const AgentFluency&, const AgentFluency&) = default;
};

struct FluencyReport {
  /// Exactly two entries, sorted by agent id.
  std::vector<AgentFluency> agents;
  double concurrent_activity = 0.0;
  double concurrent_inactivity = 0.0;
  /// measure(active(agents[0]) & idle(agents[1])) and the mirror term.
  double exclusive_first = 0.0;
  double exclusive_second = 0.0;
  std::vector<PetalFunctionalDelay> petal_functional_delays;
  /// Sum of petal-level delays per (enabling agent, delaying agent) direction.
  std::map<std::pair<std::string, std::string>, double> petal_delay_by_direction;
  std::vector<HandoffDelays> handoffs;
  double makespan = 0.0;

  friend bool operator==(const FluencyReport&, const FluencyReport&) = default;
};

inline FluencyReport fluency_report(const Trace& t, const Daisy& d) {
  const auto [a, b] = detail::require_pair(t);
  FluencyReport r;
  for (const auto& id : {a, b}) {
    r.agents.push_back({id, agent_idle_time(t, id), activity_intervals(t, id).measure()});
  }
  const IntervalSet act_a = activity_intervals(t, a);
  const IntervalSet act_b = activity_intervals(t, b);
  const IntervalSet idle_a = idle_intervals(t, a);
  const IntervalSet idle_b = idle_intervals(t, b);
  r.concurrent_activity = act_a.intersect(act_b).measure();
  r.concurrent_inactivity = idle_a.intersect(idle_b).measure();
  r.exclusive_first = act_a.intersect(idle_b).measure();
  r.exclusive_second = idle_a.intersect(act_b).measure();
  r.petal_functional_delays = petal_functional_delay(t, d);
  for (const auto& p : r.petal_functional_delays) {
    r.petal_delay_by_direction[{p.enabling_agent, p.delaying_agent}] += p.delay;
  }
  r.handoffs = handoff_delays(t, d);
  r.makespan = t.daisy_end - t.daisy_start;
  return r;
}

}  // namespace madtn
