#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "madtn/errors.hpp"
#include "madtn/extended_real.hpp"
#include "madtn/stn.hpp"

namespace madtn {

/// Vertex of a daisy. Distinct from TimePointId: compilation maps vertices
/// onto timepoints of a fresh Stn.
struct VertexId {
  std::size_t value = 0;

  friend constexpr auto operator<=>(const VertexId&, const VertexId&) = default;
};

enum class AgentKind { Human, Robot };

struct Agent {
  std::string id;
  AgentKind kind = AgentKind::Human;
  std::string name;

  friend bool operator==(const Agent&, const Agent&) = default;
};

struct Action {
  std::string name;
  VertexId start;
  VertexId end;
  /// Duration bounds in seconds: lower <= end - start <= upper.
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const Action&, const Action&) = default;
};

struct Petal {
  std::string name;
  std::vector<Action> actions;
  std::optional<std::string> owner;
  std::set<std::string> resources;

  VertexId first_vertex() const { return actions.front().start; }
  VertexId last_vertex() const { return actions.back().end; }

  friend bool operator==(const Petal&, const Petal&) = default;
};

enum class ConstraintKind { Handoff, Makespan, Other };

struct ExternalConstraint {
  VertexId from;
  VertexId to;
  ExtendedReal lower = 0.0;
  ExtendedReal upper = ExtendedReal::pos_inf();
  ConstraintKind kind = ConstraintKind::Other;

  friend bool operator==(const ExternalConstraint&, const ExternalConstraint&) = default;
};

/// Where a vertex sits inside a daisy.
struct VertexLocation {
  std::size_t petal = 0;
  std::size_t action = 0;
  bool is_start = true;
};

/// Per-agent total order of petal indices.
using Ordering = std::map<std::string, std::vector<std::size_t>>;

/// Petal index -> agent id.
using Assignment = std::map<std::size_t, std::string>;

/// Multi-agent daisy: petals, the external constraints between them, and the
/// global start and end vertices. Vertex ids are allocated by the daisy itself
/// so they stay unique across petals.
class Daisy {
 public:
  Daisy() : start_{next_vertex_++}, end_{next_vertex_++} {}

  VertexId start_vertex() const { return start_; }
  VertexId end_vertex() const { return end_; }

  /// Fresh start/end vertices plus the duration bounds.
  Action build_action(std::string name, double lower, double upper) {
    if (!std::isfinite(lower) || !std::isfinite(upper)) {
      throw Error(ErrorCode::InvalidBounds, "action '" + name + "' needs finite duration bounds");
    }
    if (lower < 0.0) {
      throw Error(ErrorCode::NegativeDuration, "action '" + name + "' has lower bound " +
                                                   ExtendedReal(lower).to_string());
    }
    if (lower > upper) {
      throw Error(ErrorCode::InvertedBounds, "action '" + name + "' has lower > upper");
    }
    Action a;
    a.name = std::move(name);
    a.start = VertexId{next_vertex_++};
    a.end = VertexId{next_vertex_++};
    a.lower = lower;
    a.upper = upper;
    return a;
  }

  void add_agent(Agent agent) { agents_.push_back(std::move(agent)); }

  std::size_t add_petal(Petal petal) {
    petals_.push_back(std::move(petal));
    return petals_.size() - 1;
  }

  void add_external(ExternalConstraint c) { external_.push_back(c); }

  /// Replaces any existing makespan constraint.
  void set_makespan(ExtendedReal lower, ExtendedReal upper) {
    clear_makespan();
    external_.push_back({start_, end_, lower, upper, ConstraintKind::Makespan});
  }

  void clear_makespan() {
    std::erase_if(external_, [](const ExternalConstraint& c) {
      return c.kind == ConstraintKind::Makespan;
    });
  }

  std::optional<ExternalConstraint> makespan() const {
    for (const auto& c : external_) {
      if (c.kind == ConstraintKind::Makespan) return c;
    }
    return std::nullopt;
  }

  const std::vector<Agent>& agents() const { return agents_; }
  const std::vector<Petal>& petals() const { return petals_; }
  std::vector<Petal>& petals() { return petals_; }
  const Petal& petal(std::size_t i) const { return petals_.at(i); }
  Petal& petal(std::size_t i) { return petals_.at(i); }
  const std::vector<ExternalConstraint>& external() const { return external_; }
  std::vector<ExternalConstraint>& external() { return external_; }

  const Agent* find_agent(const std::string& id) const {
    for (const auto& a : agents_) {
      if (a.id == id) return &a;
    }
    return nullptr;
  }

  std::optional<std::size_t> petal_index(const std::string& name) const {
    for (std::size_t i = 0; i < petals_.size(); ++i) {
      if (petals_[i].name == name) return i;
    }
    return std::nullopt;
  }

  /// First petal/action holding the vertex; nullopt for Vs, Ve and unknown ids.
  std::optional<VertexLocation> locate(VertexId v) const {
    for (std::size_t p = 0; p < petals_.size(); ++p) {
      const auto& actions = petals_[p].actions;
      for (std::size_t a = 0; a < actions.size(); ++a) {
        if (actions[a].start == v) return VertexLocation{p, a, true};
        if (actions[a].end == v) return VertexLocation{p, a, false};
      }
    }
    return std::nullopt;
  }

  /// "Petal.Action.start", "Vs", "Ve", or "#id" for dangling vertices.
  std::string vertex_path(VertexId v) const {
    if (v == start_) return "Vs";
    if (v == end_) return "Ve";
    if (auto loc = locate(v)) {
      const auto& petal = petals_[loc->petal];
      return petal.name + "." + petal.actions[loc->action].name + (loc->is_start ? ".start" : ".end");
    }
    return "#" + std::to_string(v.value);
  }

  friend bool operator==(const Daisy&, const Daisy&) = default;

 private:
  std::size_t next_vertex_ = 0;
  VertexId start_;
  VertexId end_;
  std::vector<Agent> agents_;
  std::vector<Petal> petals_;
  std::vector<ExternalConstraint> external_;
};

inline Petal build_petal(std::string name, std::vector<Action> actions,
                         std::optional<std::string> owner, std::set<std::string> resources = {}) {
  if (actions.empty()) throw Error(ErrorCode::EmptyPetal, "petal '" + name + "' has no actions");
  return Petal{std::move(name), std::move(actions), std::move(owner), std::move(resources)};
}

inline std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::Handoff: return "handoff";
    case ConstraintKind::Makespan: return "makespan";
    case ConstraintKind::Other: return "other";
  }
  return "other";
}

inline std::string_view to_string(AgentKind kind) {
  return kind == AgentKind::Human ? "human" : "robot";
}

/// Structural violations; an empty result means the daisy is well formed.
inline std::vector<std::string> validate_daisy(const Daisy& d) {
  std::vector<std::string> out;

  std::set<std::string> agent_ids;
  for (const auto& a : d.agents()) {
    if (a.id.empty()) out.push_back("agent with empty id");
    if (!agent_ids.insert(a.id).second) out.push_back("duplicate agent id '" + a.id + "'");
  }

  std::set<std::string> petal_names;
  std::map<VertexId, std::string> seen;
  seen[d.start_vertex()] = "Vs";
  seen[d.end_vertex()] = "Ve";
  auto claim = [&](VertexId v, const std::string& where) {
    auto [it, fresh] = seen.emplace(v, where);
    if (!fresh) out.push_back("vertex #" + std::to_string(v.value) + " used by both " + it->second +
                              " and " + where);
  };

  for (const auto& p : d.petals()) {
    if (p.name.empty()) out.push_back("petal with empty name");
    if (p.name.find('.') != std::string::npos) out.push_back("petal name '" + p.name + "' contains '.'");
    if (!petal_names.insert(p.name).second) out.push_back("duplicate petal name '" + p.name + "'");
    if (p.actions.empty()) out.push_back("petal '" + p.name + "' has no actions");
    if (p.owner && !agent_ids.contains(*p.owner)) {
      out.push_back("petal '" + p.name + "' owner '" + *p.owner + "' is not in the roster");
    }
    std::set<std::string> action_names;
    for (const auto& a : p.actions) {
      const std::string where = p.name + "." + a.name;
      if (a.name.empty()) out.push_back("action with empty name in petal '" + p.name + "'");
      if (a.name.find('.') != std::string::npos) out.push_back("action name '" + where + "' contains '.'");
      if (!action_names.insert(a.name).second) out.push_back("duplicate action '" + where + "'");
      if (!std::isfinite(a.lower) || !std::isfinite(a.upper)) {
        out.push_back("action '" + where + "' has non-finite bounds");
      } else {
        if (a.lower < 0.0) out.push_back("action '" + where + "' has negative duration lower bound");
        if (a.lower > a.upper) out.push_back("action '" + where + "' has lower > upper");
      }
      if (a.start == a.end) out.push_back("action '" + where + "' start and end coincide");
      claim(a.start, where + ".start");
      claim(a.end, where + ".end");
    }
  }

  auto is_global = [&](VertexId v) { return v == d.start_vertex() || v == d.end_vertex(); };
  std::size_t makespans = 0;
  for (std::size_t i = 0; i < d.external().size(); ++i) {
    const auto& c = d.external()[i];
    const std::string where = "external[" + std::to_string(i) + "] " + d.vertex_path(c.from) +
                              " -> " + d.vertex_path(c.to);
    const auto from = d.locate(c.from);
    const auto to = d.locate(c.to);
    bool resolved = true;
    if (!from && !is_global(c.from)) {
      out.push_back(where + ": source vertex does not resolve");
      resolved = false;
    }
    if (!to && !is_global(c.to)) {
      out.push_back(where + ": target vertex does not resolve");
      resolved = false;
    }
    if (c.lower > c.upper) out.push_back(where + ": lower > upper");
    if (c.lower.is_pos_inf() || c.upper.is_neg_inf()) out.push_back(where + ": empty bounds");
    if (resolved && from && to && from->petal == to->petal) {
      out.push_back(where + ": both endpoints inside petal '" + d.petal(from->petal).name + "'");
    }
    switch (c.kind) {
      case ConstraintKind::Handoff:
        if (c.lower != ExtendedReal(0.0)) out.push_back(where + ": handoff lower bound must be 0");
        if (resolved && (!from || !to)) {
          out.push_back(where + ": handoff endpoints must lie inside petals");
        } else if (resolved) {
          if (from->is_start) out.push_back(where + ": handoff must leave from an end vertex");
          if (!to->is_start) out.push_back(where + ": handoff must arrive at a start vertex");
        }
        break;
      case ConstraintKind::Makespan:
        ++makespans;
        if (c.from != d.start_vertex() || c.to != d.end_vertex()) {
          out.push_back(where + ": makespan constraint must run from Vs to Ve");
        }
        break;
      case ConstraintKind::Other:
        break;
    }
  }
  if (makespans > 1) out.push_back("more than one makespan constraint");
  return out;
}

/// Non-fatal observations: external constraints attached to vertices other
/// than a petal's first start or last end.
inline std::vector<std::string> daisy_warnings(const Daisy& d) {
  std::vector<std::string> out;
  for (const auto& c : d.external()) {
    for (VertexId v : {c.from, c.to}) {
      auto loc = d.locate(v);
      if (!loc) continue;
      const auto& p = d.petal(loc->petal);
      if (v != p.first_vertex() && v != p.last_vertex()) {
        out.push_back("external constraint touches mid-petal vertex " + d.vertex_path(v));
      }
    }
  }
  return out;
}

inline void require_valid(const Daisy& d) {
  auto violations = validate_daisy(d);
  if (!violations.empty()) {
    std::string msg = violations.front();
    if (violations.size() > 1) msg += " (+" + std::to_string(violations.size() - 1) + " more)";
    throw Error(ErrorCode::InvalidDaisy, msg);
  }
}

/// Copy of the daisy with owners filled in from the assignment.
inline Daisy with_assignment(Daisy d, const Assignment& assignment) {
  for (const auto& [petal, agent] : assignment) d.petal(petal).owner = agent;
  return d;
}

/// Throws MalformedOrdering unless the ordering lists each agent's petals exactly once.
inline void check_ordering(const Daisy& d, const Ordering& ordering) {
  std::map<std::string, std::set<std::size_t>> owned;
  for (std::size_t i = 0; i < d.petals().size(); ++i) {
    if (d.petal(i).owner) owned[*d.petal(i).owner].insert(i);
  }
  for (const auto& [agent, seq] : ordering) {
    if (!d.find_agent(agent)) {
      throw Error(ErrorCode::MalformedOrdering, "ordering names unknown agent '" + agent + "'");
    }
    std::set<std::size_t> listed;
    for (std::size_t p : seq) {
      if (p >= d.petals().size()) {
        throw Error(ErrorCode::MalformedOrdering, "ordering for '" + agent + "' names petal #" +
                                                      std::to_string(p) + " which does not exist");
      }
      if (d.petal(p).owner != agent) {
        throw Error(ErrorCode::MalformedOrdering, "ordering for '" + agent + "' lists petal '" +
                                                      d.petal(p).name + "' owned by someone else");
      }
      if (!listed.insert(p).second) {
        throw Error(ErrorCode::MalformedOrdering, "ordering for '" + agent + "' repeats petal '" +
                                                      d.petal(p).name + "'");
      }
    }
    if (listed != owned[agent]) {
      throw Error(ErrorCode::MalformedOrdering, "ordering for '" + agent + "' does not cover its petals");
    }
  }
  for (const auto& [agent, petals] : owned) {
    if (!petals.empty() && !ordering.contains(agent)) {
      throw Error(ErrorCode::MalformedOrdering, "ordering is missing agent '" + agent + "'");
    }
  }
}

struct CompileOptions {
  /// Minimum gap between consecutive petals of the same agent; default 0.
  std::map<std::string, double> transition_lower_bound;
};

struct CompiledDaisy {
  Stn stn;
  std::map<VertexId, TimePointId> timepoint;

  TimePointId at(VertexId v) const { return timepoint.at(v); }
};

/// Compiles the daisy into an Stn anchored at Vs. With an ordering, each
/// agent's consecutive petals are sequenced; cross-agent order comes only from
/// external constraints.
inline CompiledDaisy compile_to_stn(const Daisy& d, const std::optional<Ordering>& ordering = std::nullopt,
                                    const CompileOptions& options = {}) {
  require_valid(d);
  for (const auto& p : d.petals()) {
    if (!p.owner) throw Error(ErrorCode::UnassignedPetal, "petal '" + p.name + "' has no owner");
  }
  if (ordering) check_ordering(d, *ordering);

  CompiledDaisy out;
  auto add = [&](VertexId v, std::string owner) {
    out.timepoint[v] = out.stn.add_timepoint(d.vertex_path(v), std::move(owner));
  };
  add(d.start_vertex(), {});
  add(d.end_vertex(), {});
  for (const auto& p : d.petals()) {
    for (const auto& a : p.actions) {
      add(a.start, *p.owner);
      add(a.end, *p.owner);
    }
  }
  out.stn.set_anchor(out.at(d.start_vertex()));

  const ExtendedReal inf = ExtendedReal::pos_inf();
  const TimePointId vs = out.at(d.start_vertex());
  const TimePointId ve = out.at(d.end_vertex());
  for (const auto& p : d.petals()) {
    for (std::size_t i = 0; i < p.actions.size(); ++i) {
      const auto& a = p.actions[i];
      out.stn.add_constraint({out.at(a.start), out.at(a.end), a.lower, a.upper});
      if (i + 1 < p.actions.size()) {
        out.stn.add_constraint({out.at(a.end), out.at(p.actions[i + 1].start), 0.0, inf});
      }
    }
    out.stn.add_constraint({vs, out.at(p.first_vertex()), 0.0, inf});
    out.stn.add_constraint({out.at(p.last_vertex()), ve, 0.0, inf});
  }
  if (ordering) {
    for (const auto& [agent, seq] : *ordering) {
      double gap = 0.0;
      if (auto it = options.transition_lower_bound.find(agent); it != options.transition_lower_bound.end()) {
        gap = it->second;
      }
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        out.stn.add_constraint({out.at(d.petal(seq[i]).last_vertex()),
                                out.at(d.petal(seq[i + 1]).first_vertex()), gap, inf});
      }
    }
  }
  for (const auto& c : d.external()) {
    out.stn.add_constraint({out.at(c.from), out.at(c.to), c.lower, c.upper});
  }
  if (d.petals().empty()) out.stn.add_constraint({vs, ve, 0.0, inf});
  return out;
}

struct Handoff {
  std::size_t external_index = 0;
  ExternalConstraint constraint;
  std::size_t from_petal = 0;
  std::size_t to_petal = 0;
};

/// Handoff-kind external constraints whose petals have different owners.
inline std::vector<Handoff> handoff_constraints(const Daisy& d) {
  require_valid(d);
  std::vector<Handoff> out;
  for (std::size_t i = 0; i < d.external().size(); ++i) {
    const auto& c = d.external()[i];
    if (c.kind != ConstraintKind::Handoff) continue;
    const auto from = d.locate(c.from);
    const auto to = d.locate(c.to);
    const auto& a = d.petal(from->petal).owner;
    const auto& b = d.petal(to->petal).owner;
    if (a && b && *a != *b) out.push_back({i, c, from->petal, to->petal});
  }
  return out;
}

}  // namespace madtn
