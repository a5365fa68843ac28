// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "madtn/cli.hpp"
#include "madtn/madtn.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace madtn;
using madtn::testing::load_packaging;
using madtn::testing::petal;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

Assignment owners(const Daisy& d) {
  Assignment a;
  for (std::size_t p = 0; p < d.petals().size(); ++p) a[p] = *d.petal(p).owner;
  return a;
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::run_cli(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

Outcome stn_oracle_equivalence() {
  Outcome r;
  std::mt19937_64 gen(1001);
  int consistent = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + gen() % 6;
    const std::size_t m = gen() % (2 * n + 1);
    const Stn stn = oracle::random_int_stn(gen, n, m, 10, false);
    const bool brute = oracle::IntegerEnumerator(stn, 10 * static_cast<long>(n) + 10).consistent();
    const bool verdict = is_consistent(stn);
    consistent += verdict;
    if (brute != verdict) r.fail("trial " + std::to_string(trial) + " disagrees");
  }
  if (r.ok) r.detail = "500/500 agree (" + std::to_string(consistent) + " consistent)";
  return r;
}

Outcome minimal_network_tightness() {
  Outcome r;
  std::mt19937_64 gen(2002);
  int checked = 0;
  while (checked < 200) {
    const std::size_t n = 2 + gen() % 4;
    const Stn stn = oracle::random_int_stn(gen, n, gen() % (n + 1), 10, true);
    if (!is_consistent(stn)) continue;
    ++checked;
    const auto sols = oracle::IntegerEnumerator(stn, 10 * static_cast<long>(n) + 10).all_solutions();
    if (sols.empty()) {
      r.fail("enumeration found no schedule for a consistent network");
      continue;
    }
    const Stn minimal = minimal_network(stn);
    for (const auto& c : minimal.constraints()) {
      long lo = std::numeric_limits<long>::max();
      long hi = std::numeric_limits<long>::min();
      for (const auto& s : sols) {
        const long diff = s[c.to.value] - s[c.from.value];
        lo = std::min(lo, diff);
        hi = std::max(hi, diff);
      }
      if (!c.lower.is_finite() || !c.upper.is_finite() || c.lower.value() != static_cast<double>(lo) ||
          c.upper.value() != static_cast<double>(hi)) {
        r.fail("bound mismatch on " + minimal.describe(c));
      }
    }
  }
  if (r.ok) r.detail = "200 networks, every pairwise bound exact";
  return r;
}

Outcome packaging_fixture() {
  Outcome r;
  const std::string path = madtn::testing::fixture_path();
  if (cli({"validate", path}) != 0) r.fail("validate did not exit 0");
  std::string out;
  if (cli({"compile", path}, &out) != 0 || out.find("verdict: consistent") == std::string::npos) {
    r.fail("compile did not report consistent");
  }

  const auto doc = load_packaging();
  const Daisy& d = doc.daisy;
  double chain = 0.0;
  auto add = [&](const std::string& name, std::size_t from, std::size_t to) {
    const auto& p = d.petal(petal(d, name));
    for (std::size_t i = from; i < to; ++i) chain += p.actions[i].lower;
  };
  add("Retrieve Object A", 0, 4);  // up to the handoff source "Place Object A"
  add("Pack Object A", 1, 3);      // from the handoff target "Pick Object A"
  add("Seal Package", 0, 2);
  add("Deliver Package", 0, 3);

  std::ostringstream below;
  below << chain - 0.1;
  std::string err;
  out.clear();
  if (cli({"compile", path, "--makespan-upper", below.str()}, &out, &err) != 1 ||
      err.find("inconsistent") == std::string::npos || !out.empty()) {
    r.fail("makespan " + below.str() + " not reported inconsistent");
  }
  std::ostringstream at;
  at << chain;
  Daisy loose = d;
  loose.set_makespan(0.0, chain);
  if (!is_consistent(compile_to_stn(loose).stn)) r.fail("unordered daisy rejected at the chain sum");
  if (r.ok) r.detail = "validate 0, consistent, chain " + at.str() + " s; upper " + below.str() + " inconsistent";
  return r;
}

Outcome planner_completeness() {
  Outcome r;
  const auto doc = load_packaging();
  const Daisy& d = doc.daisy;
  const auto found = enumerate_orders(d, kUnboundedOrders);
  const auto prec = partial_order(d);

  std::vector<std::size_t> perm(d.petals().size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> brute;
  std::size_t total = 0;
  do {
    ++total;
    CompiledDaisy c = compile_to_stn(d);
    for (std::size_t i = 0; i + 1 < perm.size(); ++i) {
      c.stn.add_constraint({c.at(d.petal(perm[i]).last_vertex()), c.at(d.petal(perm[i + 1]).first_vertex()), 0.0,
                            ExtendedReal::pos_inf()});
    }
    if (is_consistent(c.stn)) brute.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (total != 720) r.fail("expected 720 permutations");
  if (found != brute) {
    r.fail("planner returned " + std::to_string(found.size()) + " orders, brute force " +
           std::to_string(brute.size()));
  }
  for (const auto& order : found) {
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& [a, b] : prec.pairs) {
      if (pos[a] >= pos[b]) r.fail("order violates precedence");
    }
  }
  if (r.ok) r.detail = std::to_string(found.size()) + " orders = brute force over 720, all linear extensions";
  return r;
}

Outcome simulation_determinism() {
  Outcome r;
  const auto doc = load_packaging();
  const Daisy& d = doc.daisy;
  BehaviorProfile reactive;
  reactive.max_reaction = 1.0;
  BehaviorProfile normal;
  normal.sampling = DurationSampling::TruncatedNormal;
  normal.max_reaction = 0.5;
  const std::map<std::string, BehaviorProfile> profiles{{"human", reactive}, {"robot", normal}};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const auto& prof : {std::map<std::string, BehaviorProfile>{}, profiles}) {
      const Trace t = simulate(d, *doc.ordering, owners(d), prof, seed);
      if (!validate_trace(d, doc.ordering, t).empty() || !t.feasible) {
        r.fail("seed " + std::to_string(seed) + " violates constraints");
      }
      if (simulate(d, *doc.ordering, owners(d), prof, seed) != t) {
        r.fail("seed " + std::to_string(seed) + " not reproducible");
      }
      const auto text = io::serialize_trace(t, doc.name);
      if (io::serialize_trace(simulate(d, *doc.ordering, owners(d), prof, seed), doc.name) != text) {
        r.fail("seed " + std::to_string(seed) + " serialization differs");
      }
    }
  }

  BehaviorProfile lb;
  lb.sampling = DurationSampling::LowerBound;
  const Trace t = simulate(d, *doc.ordering, owners(d), {{"human", lb}, {"robot", lb}}, 0);
  const auto compiled = compile_to_stn(d, doc.ordering);
  const Schedule s = earliest_schedule(compiled.stn);
  const auto times = vertex_times(d, t);
  double worst = 0.0;
  for (const auto& [v, tp] : compiled.timepoint) worst = std::max(worst, std::abs(times.at(v) - s.at(tp)));
  if (worst > kTimeTolerance) r.fail("lower-bound trace differs from earliest schedule by " + std::to_string(worst));
  if (r.ok) r.detail = "100 seeds x 2 profiles feasible and reproducible; earliest schedule max error " + std::to_string(worst);
  return r;
}

std::map<std::string, BehaviorProfile> noisy_profiles() {
  BehaviorProfile h;
  h.max_reaction = 0.5;
  h.anticipation_probability = 0.1;
  h.anticipation_offset = 0.3;
  BehaviorProfile rb;
  rb.sampling = DurationSampling::TruncatedNormal;
  rb.max_reaction = 1.0;
  rb.anticipation_probability = 0.3;
  rb.anticipation_offset = 0.5;
  return {{"human", h}, {"robot", rb}};
}

Outcome metric_identities() {
  Outcome r;
  const auto doc = load_packaging();
  const Daisy& d = doc.daisy;
  double worst = 0.0;
  int traces = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const auto& prof : {std::map<std::string, BehaviorProfile>{}, noisy_profiles()}) {
      const Trace t = simulate(d, *doc.ordering, owners(d), prof, seed);
      ++traces;
      const FluencyReport a = fluency_report(t, d);
      auto track = [&](double x, double y, const char* what) {
        worst = std::max(worst, std::abs(x - y));
        if (std::abs(x - y) > 1e-9) r.fail(std::string(what) + " off at seed " + std::to_string(seed));
      };
      track(a.concurrent_activity + a.concurrent_inactivity + a.exclusive_first + a.exclusive_second, a.makespan,
            "partition identity");
      for (const auto& ag : a.agents) track(ag.idle.total + ag.active, a.makespan, "idle + active");

      Trace shifted = t;
      shifted.daisy_start += 1000.0;
      shifted.daisy_end += 1000.0;
      for (auto& e : shifted.events) {
        e.start += 1000.0;
        e.end += 1000.0;
      }
      const FluencyReport b = fluency_report(shifted, d);
      track(a.concurrent_activity, b.concurrent_activity, "shifted CA");
      track(a.concurrent_inactivity, b.concurrent_inactivity, "shifted CI");
      track(a.exclusive_first, b.exclusive_first, "shifted exclusive");
      track(a.exclusive_second, b.exclusive_second, "shifted exclusive");
      track(a.makespan, b.makespan, "shifted makespan");
      for (std::size_t i = 0; i < a.agents.size(); ++i) {
        track(a.agents[i].idle.total, b.agents[i].idle.total, "shifted idle");
        track(a.agents[i].idle.rest, b.agents[i].idle.rest, "shifted rest");
        track(a.agents[i].idle.intra_petal_wait, b.agents[i].idle.intra_petal_wait, "shifted wait");
        track(a.agents[i].active, b.agents[i].active, "shifted active");
      }
      for (std::size_t i = 0; i < a.petal_functional_delays.size(); ++i) {
        track(a.petal_functional_delays[i].delay, b.petal_functional_delays[i].delay, "shifted petal F-DEL");
      }
      for (std::size_t i = 0; i < a.handoffs.size(); ++i) {
        track(a.handoffs[i].resource_delay, b.handoffs[i].resource_delay, "shifted R-DEL");
        track(a.handoffs[i].functional_delay, b.handoffs[i].functional_delay, "shifted F-DEL");
        if (a.handoffs[i].classification != b.handoffs[i].classification) r.fail("classification changed by shift");
      }
    }
  }
  std::ostringstream msg;
  msg << traces << " traces, max deviation " << worst;
  if (r.ok) r.detail = msg.str();
  return r;
}

Outcome handoff_cases() {
  Outcome r;
  Daisy d;
  d.add_agent({"human", AgentKind::Human, ""});
  d.add_agent({"robot", AgentKind::Robot, ""});
  auto place = d.build_action("Place Object A", 0, 10);
  auto move = d.build_action("Move to Object A", 0, 10);
  auto pick = d.build_action("Pick Object A", 0, 10);
  d.add_petal(build_petal("Retrieve Object A", {place}, "human"));
  d.add_petal(build_petal("Pack Object A", {move, pick}, "robot"));
  d.add_external({place.end, pick.start, 0.0, ExtendedReal::pos_inf(), ConstraintKind::Handoff});
  auto trace = [](double place_end, double ready, double start) {
    Trace t;
    t.agents = {"human", "robot"};
    t.events = {{"human", "Retrieve Object A", "Place Object A", place_end - 1.0, place_end},
                {"robot", "Pack Object A", "Move to Object A", 0.0, ready},
                {"robot", "Pack Object A", "Pick Object A", start, start + 1.0}};
    t.daisy_end = std::max(place_end, start + 1.0);
    return t;
  };

  const auto blocked = handoff_delays(trace(5.0, 2.0, 5.5), d).at(0);
  if (!(blocked.resource_delay > 0.0) || blocked.classification != HandoffClass::Blocked ||
      std::abs(blocked.functional_delay - (blocked.dependent_start - blocked.enabling_time)) > 1e-9 ||
      std::abs(blocked.functional_delay - 0.5) > 1e-9) {
    r.fail("blocked case");
  }
  const auto stale = handoff_delays(trace(2.0, 5.0, 5.4), d).at(0);
  if (!(stale.resource_delay < 0.0) || stale.classification != HandoffClass::Stale ||
      std::abs(stale.functional_delay - (stale.dependent_start - stale.ready_time)) > 1e-9 ||
      stale.functional_delay < 0.0 || std::abs(stale.functional_delay - 0.4) > 1e-9) {
    r.fail("stale case");
  }

  const auto doc = load_packaging();
  BehaviorProfile eager;
  eager.anticipation_probability = 1.0;
  eager.anticipation_offset = 0.5;
  int negative = 0;
  int flagged = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Trace t = simulate(doc.daisy, *doc.ordering, owners(doc.daisy), {{"robot", eager}}, seed);
    const auto violations = validate_trace(doc.daisy, doc.ordering, t);
    for (const auto& h : handoff_delays(t, doc.daisy)) {
      if (h.functional_delay >= 0.0) continue;
      ++negative;
      const bool listed = std::any_of(violations.begin(), violations.end(), [&](const ConstraintViolation& v) {
        return v.from == h.from_vertex && v.to == h.to_vertex;
      });
      if (listed) ++flagged;
      else r.fail("negative F-DEL on " + h.from_vertex + " not flagged by validate_trace");
    }
  }
  if (negative == 0) r.fail("anticipation produced no negative action-level F-DEL");
  if (r.ok) {
    r.detail = "blocked R-DEL +3 F-DEL +0.5; stale R-DEL -3 F-DEL +0.4; " + std::to_string(negative) +
               " anticipatory handoffs, all flagged";
  }
  return r;
}

Outcome greedy_assignment() {
  Outcome r;
  const auto doc = load_packaging();
  Daisy d = doc.daisy;
  for (auto& p : d.petals()) p.owner.reset();
  std::mt19937_64 gen(8008);
  std::uniform_real_distribution<double> score(0.0, 10.0);
  std::uniform_real_distribution<double> factor(1e-3, 1e3);
  for (int trial = 0; trial < 100; ++trial) {
    CapabilityTable caps;
    CapabilityTable scaled;
    const double k = factor(gen);
    for (std::size_t p = 0; p < d.petals().size(); ++p) {
      const bool robot_capable = gen() % 6 != 0;
      const double tie = static_cast<double>(gen() % 3);
      for (const char* agent : {"human", "robot"}) {
        if (std::string(agent) == "robot" && !robot_capable) continue;
        const double s = gen() % 4 == 0 ? tie : score(gen);
        caps.set(agent, p, s);
        scaled.set(agent, p, s * k);
      }
    }
    if (greedy_assign(d, caps) != greedy_assign(d, scaled)) r.fail("trial " + std::to_string(trial) + " changed");
  }

  CapabilityTable tie;
  for (std::size_t p = 0; p < d.petals().size(); ++p) {
    tie.set("robot", p, 4.0);
    tie.set("human", p, 4.0);
  }
  for (const auto& [p, agent] : greedy_assign(d, tie)) {
    if (agent != "human") r.fail("tie on petal " + std::to_string(p) + " went to " + agent);
  }
  if (r.ok) r.detail = "100 tables invariant under rescaling; ties go to lowest agent id";
  return r;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"AC1 STN consistency matches brute-force enumeration", stn_oracle_equivalence},
      {"AC2 minimal network bounds are tight", minimal_network_tightness},
      {"AC3 packaging fixture validates, compiles, makespan chain", packaging_fixture},
      {"AC4 planner completeness over 720 permutations", planner_completeness},
      {"AC5 simulation determinism and feasibility", simulation_determinism},
      {"AC6 metric identities and time-shift invariance", metric_identities},
      {"AC7 blocked, stale and anticipatory handoffs", handoff_cases},
      {"AC8 greedy assignment rescaling and tie-break", greedy_assignment},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.2fs)\n", o.ok ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    failures += !o.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
