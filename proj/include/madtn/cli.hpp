#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "madtn/daisy.hpp"
#include "madtn/fluency.hpp"
#include "madtn/io.hpp"
#include "madtn/planner.hpp"
#include "madtn/simulator.hpp"
#include "madtn/stn.hpp"

namespace madtn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable that overrides the default `simulate --out` directory.
inline constexpr const char* kOutDirEnv = "MADTN_OUT_DIR";

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline io::DaisyDocument load_daisy(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return io::parse_daisy(text);
}

/// Owners come from the document, then greedy assignment for the rest.
inline Assignment resolve_assignment(const io::DaisyDocument& doc) {
  bool all_owned = true;
  for (const auto& p : doc.daisy.petals()) all_owned = all_owned && p.owner.has_value();
  if (all_owned) return greedy_assign(doc.daisy, {});
  return greedy_assign(doc.daisy, doc.capabilities.value_or(CapabilityTable{}));
}

struct Plan {
  Daisy daisy;
  Assignment assignment;
  Ordering ordering;
};

/// Assigned daisy plus the document's ordering, or the first consistent one.
inline Plan resolve_plan(const io::DaisyDocument& doc) {
  Plan plan;
  plan.assignment = resolve_assignment(doc);
  plan.daisy = with_assignment(doc.daisy, plan.assignment);
  if (doc.ordering) {
    plan.ordering = *doc.ordering;
  } else {
    auto orders = enumerate_orders(plan.daisy, 1);
    if (orders.empty()) throw Error(ErrorCode::InconsistentOrdering, "no petal ordering is consistent");
    plan.ordering = project_order(plan.daisy, orders.front());
  }
  return plan;
}

inline std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

inline std::string fmt(ExtendedReal v) { return v.is_finite() ? fmt(v.value()) : v.to_string(); }

inline void write_atomically(const std::filesystem::path& target, const std::string& content) {
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

inline DurationSampling parse_sampling(const std::string& s) {
  if (s == "uniform") return DurationSampling::Uniform;
  if (s == "normal") return DurationSampling::TruncatedNormal;
  if (s == "lower") return DurationSampling::LowerBound;
  throw UsageError("unknown sampling '" + s + "'");
}

inline void print_report_text(std::ostream& out, const FluencyReport& r) {
  out << "makespan: " << fmt(r.makespan) << "\n";
  for (const auto& a : r.agents) {
    out << "agent " << a.agent << ": active " << fmt(a.active) << ", idle " << fmt(a.idle.total) << " (rest "
        << fmt(a.idle.rest) << ", intra-petal wait " << fmt(a.idle.intra_petal_wait) << ")\n";
  }
  out << "concurrent activity: " << fmt(r.concurrent_activity) << "\n";
  out << "concurrent inactivity: " << fmt(r.concurrent_inactivity) << "\n";
  out << "petal functional delay:\n";
  for (const auto& p : r.petal_functional_delays) {
    out << "  " << p.from_petal << " -> " << p.to_petal << ": " << fmt(p.delay) << " (" << p.delaying_agent
        << (p.delay < 0.0 ? ", anticipatory" : "") << ")\n";
  }
  for (const auto& [dir, sum] : r.petal_delay_by_direction) {
    out << "  total " << dir.first << " -> " << dir.second << ": " << fmt(sum) << "\n";
  }
  out << "handoffs:\n";
  for (const auto& h : r.handoffs) {
    out << "  " << h.from_vertex << " -> " << h.to_vertex << ": R-DEL " << fmt(h.resource_delay) << " ("
        << to_string(h.classification) << "), F-DEL " << fmt(h.functional_delay) << "\n";
  }
}

}  // namespace detail

/// Runs one CLI invocation. Results go to `out` only on success; diagnostics
/// go to `err`. Returns 0 on success, 1 on domain failure, 2 on usage error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent daisy temporal networks: planning, simulation and fluency analysis", "madtn"};
  app.require_subcommand(1);

  std::string daisy_path;
  std::string trace_path;

  auto* validate = app.add_subcommand("validate", "Check a daisy document");
  validate->add_option("daisy", daisy_path, "Daisy document (JSON)")->required();

  auto* compile = app.add_subcommand("compile", "Compile to a temporal network and check consistency");
  compile->add_option("daisy", daisy_path, "Daisy document (JSON)")->required();
  std::optional<double> makespan_upper;
  compile->add_option("--makespan-upper", makespan_upper, "Override the makespan upper bound (seconds)");

  auto* schedule = app.add_subcommand("schedule", "Print the earliest schedule");
  schedule->add_option("daisy", daisy_path, "Daisy document (JSON)")->required();

  auto* plan = app.add_subcommand("plan", "Petal precedence, consistent orders and greedy assignment");
  plan->add_option("daisy", daisy_path, "Daisy document (JSON)")->required();
  std::size_t limit = kDefaultOrderLimit;
  plan->add_option("--limit", limit, "Maximum number of orders")->check(CLI::PositiveNumber);

  auto* simulate_cmd = app.add_subcommand("simulate", "Run seeded simulations and write traces");
  simulate_cmd->add_option("daisy", daisy_path, "Daisy document (JSON)")->required();
  std::uint64_t seed = 0;
  simulate_cmd->add_option("--seed", seed, "Base seed")->required();
  std::size_t runs = 1;
  simulate_cmd->add_option("--runs", runs, "Number of runs (seeds S, S+1, ...)")->check(CLI::PositiveNumber);
  std::string out_dir;
  simulate_cmd->add_option("--out", out_dir, "Output directory (default $MADTN_OUT_DIR or .)");
  std::string sampling = "uniform";
  simulate_cmd->add_option("--sampling", sampling, "uniform | normal | lower");
  BehaviorProfile profile;
  simulate_cmd->add_option("--reaction", profile.max_reaction, "Maximum reaction delay (seconds)");
  simulate_cmd->add_option("--anticipation", profile.anticipation_probability, "Anticipation probability");
  simulate_cmd->add_option("--offset", profile.anticipation_offset, "Maximum anticipation (seconds)");

  auto* analyze = app.add_subcommand("analyze", "Compute fluency metrics for a trace");
  analyze->add_option("daisy", daisy_path, "Daisy document (JSON)")->required();
  analyze->add_option("trace", trace_path, "Trace document (JSON)")->required();
  std::string output = "text";
  analyze->add_option("--output", output, "json | text")->check(CLI::IsMember({"json", "text"}));

  std::vector<const char*> argv{"madtn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    std::ostringstream help_err;
    const int code = app.exit(e, help_out, help_err);
    if (code == 0) {
      out << help_out.str();
      return kExitOk;
    }
    err << help_err.str() << help_out.str();
    return kExitUsage;
  }

  std::ostringstream result;
  try {
    if (*validate) {
      const auto doc = detail::load_daisy(daisy_path);
      std::size_t actions = 0;
      for (const auto& p : doc.daisy.petals()) actions += p.actions.size();
      result << "valid: " << doc.daisy.petals().size() << " petals, " << actions << " actions, "
             << doc.daisy.external().size() << " external constraints\n";
      for (const auto& w : daisy_warnings(doc.daisy)) err << "warning: " << w << "\n";
    } else if (*compile) {
      auto doc = detail::load_daisy(daisy_path);
      if (makespan_upper) {
        auto lower = doc.daisy.makespan() ? doc.daisy.makespan()->lower : ExtendedReal(0.0);
        if (lower > ExtendedReal(*makespan_upper)) lower = 0.0;
        doc.daisy.set_makespan(lower, *makespan_upper);
      }
      const Daisy d = with_assignment(doc.daisy, detail::resolve_assignment(doc));
      const CompiledDaisy compiled = compile_to_stn(d, doc.ordering);
      const auto graph = solve(compiled.stn);
      if (!graph) {
        err << "verdict: inconsistent\n";
        return kExitDomain;
      }
      const auto [lo, hi] = graph->bounds(compiled.at(d.start_vertex()), compiled.at(d.end_vertex()));
      result << "vertices: " << compiled.stn.size() << "\n"
             << "constraints: " << compiled.stn.constraints().size() << "\n"
             << "verdict: consistent\n"
             << "makespan: [" << detail::fmt(lo) << ", " << detail::fmt(hi) << "]\n";
    } else if (*schedule) {
      const auto doc = detail::load_daisy(daisy_path);
      const auto p = detail::resolve_plan(doc);
      const CompiledDaisy compiled = compile_to_stn(p.daisy, p.ordering);
      const Schedule s = earliest_schedule(compiled.stn);
      for (const auto& tp : compiled.stn.timepoints()) {
        result << tp.label << "\t" << (tp.owner.empty() ? "-" : tp.owner) << "\t" << detail::fmt(s.at(tp.id))
               << "\n";
      }
    } else if (*plan) {
      const auto doc = detail::load_daisy(daisy_path);
      const Assignment assignment = detail::resolve_assignment(doc);
      const Daisy d = with_assignment(doc.daisy, assignment);
      const auto prec = partial_order(d);
      result << "precedence:\n";
      for (const auto& [a, b] : prec.pairs) result << "  " << d.petal(a).name << " < " << d.petal(b).name << "\n";
      if (doc.capabilities) {
        result << "assignment:\n";
        for (const auto& [p, agent] : assignment) result << "  " << d.petal(p).name << ": " << agent << "\n";
      }
      const auto orders = enumerate_orders(d, limit);
      result << "orders (" << orders.size() << "):\n";
      for (const auto& order : orders) {
        result << " ";
        for (std::size_t i = 0; i < order.size(); ++i) result << (i ? " | " : " ") << d.petal(order[i]).name;
        result << "\n";
      }
      if (orders.empty()) {
        err << "no consistent petal ordering\n";
        return kExitDomain;
      }
    } else if (*simulate_cmd) {
      const auto doc = detail::load_daisy(daisy_path);
      const auto p = detail::resolve_plan(doc);
      profile.sampling = detail::parse_sampling(sampling);
      profile.validate();
      std::map<std::string, BehaviorProfile> profiles;
      for (const auto& a : p.daisy.agents()) profiles[a.id] = profile;
      if (out_dir.empty()) {
        const char* env = std::getenv(kOutDirEnv);
        out_dir = env ? env : ".";
      }
      std::filesystem::create_directories(out_dir);
      for (std::size_t i = 0; i < runs; ++i) {
        const std::uint64_t s = seed + i;
        const Trace trace = simulate(p.daisy, p.ordering, p.assignment, profiles, s);
        const auto target = std::filesystem::path(out_dir) / ("trace_seed_" + std::to_string(s) + ".json");
        detail::write_atomically(target, io::serialize_trace(trace, doc.name));
        result << target.string() << (trace.feasible ? "" : " (infeasible)") << "\n";
      }
    } else if (*analyze) {
      const auto doc = detail::load_daisy(daisy_path);
      std::string text;
      try {
        text = io::read_file(trace_path);
      } catch (const std::exception& e) {
        throw detail::UsageError(e.what());
      }
      const auto trace = io::parse_trace(text);
      const Daisy d = with_assignment(doc.daisy, detail::resolve_assignment(doc));
      const FluencyReport report = fluency_report(trace.trace, d);
      if (output == "json") {
        result << io::report_to_json(report).dump(2) << "\n";
      } else {
        detail::print_report_text(result, report);
      }
    }
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const io::DocumentError& e) {
    for (const auto& issue : e.issues()) {
      err << "error: " << (issue.path.empty() ? "" : issue.path + ": ") << issue.message << "\n";
    }
    return kExitDomain;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  out << result.str();
  return kExitOk;
}

}  // namespace madtn::cli
