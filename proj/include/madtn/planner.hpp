#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "madtn/daisy.hpp"
#include "madtn/errors.hpp"
#include "madtn/stn.hpp"

namespace madtn {

/// Before/after pairs over petal indices, plus a witness cycle when one exists.
struct PetalPrecedence {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> cycle;

  bool acyclic() const { return cycle.empty(); }
  bool has(std::size_t before, std::size_t after) const { return pairs.contains({before, after}); }
};

/// Every cross-petal handoff is a hard edge. Other external constraints add an
/// edge only when their lower bound is strictly positive.
inline PetalPrecedence partial_order(const Daisy& d) {
  require_valid(d);
  PetalPrecedence out;
  for (const auto& c : d.external()) {
    const auto from = d.locate(c.from);
    const auto to = d.locate(c.to);
    if (!from || !to || from->petal == to->petal) continue;
    const bool forcing = c.kind == ConstraintKind::Handoff || c.lower > ExtendedReal(0.0);
    if (forcing) out.pairs.insert({from->petal, to->petal});
  }

  const std::size_t n = d.petals().size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& [a, b] : out.pairs) succ[a].push_back(b);
  enum class Mark { White, Grey, Black };
  std::vector<Mark> mark(n, Mark::White);
  std::vector<std::size_t> stack;
  std::function<bool(std::size_t)> visit = [&](std::size_t v) {
    mark[v] = Mark::Grey;
    stack.push_back(v);
    for (std::size_t w : succ[v]) {
      if (mark[w] == Mark::Grey) {
        auto it = std::find(stack.begin(), stack.end(), w);
        out.cycle.assign(it, stack.end());
        out.cycle.push_back(w);
        return true;
      }
      if (mark[w] == Mark::White && visit(w)) return true;
    }
    stack.pop_back();
    mark[v] = Mark::Black;
    return false;
  };
  for (std::size_t v = 0; v < n && out.cycle.empty(); ++v) {
    if (mark[v] == Mark::White) visit(v);
  }
  return out;
}

/// Restricts a total petal order to one sequence per owning agent.
inline Ordering project_order(const Daisy& d, const std::vector<std::size_t>& order) {
  Ordering out;
  for (std::size_t p : order) {
    const auto& owner = d.petal(p).owner;
    if (!owner) throw Error(ErrorCode::UnassignedPetal, "petal '" + d.petal(p).name + "' has no owner");
    out[*owner].push_back(p);
  }
  return out;
}

inline constexpr std::size_t kDefaultOrderLimit = 1000;
inline constexpr std::size_t kUnboundedOrders = std::numeric_limits<std::size_t>::max();

/// Linear extensions of partial_order, generated lexicographically by petal
/// declaration order, keeping those whose per-agent projection compiles to a
/// consistent network. Stops after `limit` consistent orders.
inline std::vector<std::vector<std::size_t>> enumerate_orders(const Daisy& d,
                                                              std::size_t limit = kDefaultOrderLimit) {
  const PetalPrecedence prec = partial_order(d);
  if (!prec.acyclic()) {
    std::string names;
    for (std::size_t p : prec.cycle) names += (names.empty() ? "" : " -> ") + d.petal(p).name;
    throw Error(ErrorCode::CyclicPrecedence, "petal precedence has a cycle: " + names);
  }
  for (const auto& p : d.petals()) {
    if (!p.owner) throw Error(ErrorCode::UnassignedPetal, "petal '" + p.name + "' has no owner");
  }

  const std::size_t n = d.petals().size();
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& [a, b] : prec.pairs) ++indegree[b];

  std::vector<std::vector<std::size_t>> out;
  std::map<Ordering, bool> verdicts;
  std::vector<std::size_t> current;
  std::vector<bool> placed(n, false);

  std::function<void()> extend = [&] {
    if (out.size() >= limit) return;
    if (current.size() == n) {
      Ordering proj = project_order(d, current);
      auto it = verdicts.find(proj);
      if (it == verdicts.end()) {
        it = verdicts.emplace(proj, is_consistent(compile_to_stn(d, proj).stn)).first;
      }
      if (it->second) out.push_back(current);
      return;
    }
    for (std::size_t p = 0; p < n; ++p) {
      if (placed[p] || indegree[p] != 0) continue;
      placed[p] = true;
      current.push_back(p);
      for (const auto& [a, b] : prec.pairs) {
        if (a == p) --indegree[b];
      }
      extend();
      for (const auto& [a, b] : prec.pairs) {
        if (a == p) ++indegree[b];
      }
      current.pop_back();
      placed[p] = false;
      if (out.size() >= limit) return;
    }
  };
  if (limit > 0) extend();
  return out;
}

/// Non-negative ability scores per (agent, petal). A missing entry means the
/// agent cannot perform the petal. Scores are an interpretation of "ability";
/// only their ordering matters to greedy_assign.
class CapabilityTable {
 public:
  void set(const std::string& agent, std::size_t petal, double score) {
    if (!(score >= 0.0) || !std::isfinite(score)) {
      throw Error(ErrorCode::InvalidBounds, "capability score for '" + agent + "' must be finite and >= 0");
    }
    scores_[{agent, petal}] = score;
  }

  void set_incapable(const std::string& agent, std::size_t petal) { scores_.erase({agent, petal}); }

  std::optional<double> score(const std::string& agent, std::size_t petal) const {
    auto it = scores_.find({agent, petal});
    if (it == scores_.end()) return std::nullopt;
    return it->second;
  }

  const std::map<std::pair<std::string, std::size_t>, double>& entries() const { return scores_; }
  bool empty() const { return scores_.empty(); }

  friend bool operator==(const CapabilityTable&, const CapabilityTable&) = default;

 private:
  std::map<std::pair<std::string, std::size_t>, double> scores_;
};

/// Assigns every unowned petal to its highest-scoring capable agent. Ties go
/// to the lexicographically lowest agent id; petals are visited in
/// declaration order. Preassigned petals keep their owner.
inline Assignment greedy_assign(const Daisy& d, const CapabilityTable& caps) {
  std::vector<std::string> agent_ids;
  for (const auto& a : d.agents()) agent_ids.push_back(a.id);
  std::sort(agent_ids.begin(), agent_ids.end());

  Assignment out;
  for (std::size_t p = 0; p < d.petals().size(); ++p) {
    const auto& petal = d.petal(p);
    if (petal.owner) {
      out[p] = *petal.owner;
      continue;
    }
    const std::string* best = nullptr;
    double best_score = 0.0;
    for (const auto& agent : agent_ids) {
      auto s = caps.score(agent, p);
      if (!s) continue;
      if (!best || *s > best_score) {
        best = &agent;
        best_score = *s;
      }
    }
    if (!best) throw Error(ErrorCode::NoCapableAgent, "no agent can perform petal '" + petal.name + "'");
    out[p] = *best;
  }
  return out;
}

}  // namespace madtn
