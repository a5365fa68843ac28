#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "madtn/daisy.hpp"
#include "madtn/errors.hpp"
#include "madtn/fluency.hpp"
#include "madtn/planner.hpp"
#include "madtn/simulator.hpp"

namespace madtn::io {

using Json = nlohmann::ordered_json;

struct DocumentIssue {
  std::string path;
  std::string message;
};

/// Parse failure carrying every issue found, each with a JSON-pointer path.
class DocumentError : public Error {
 public:
  DocumentError(ErrorCode code, std::vector<DocumentIssue> issues)
      : Error(code, summarize(issues)), issues_(std::move(issues)) {}

  const std::vector<DocumentIssue>& issues() const { return issues_; }

 private:
  static std::string summarize(const std::vector<DocumentIssue>& issues) {
    std::string out;
    for (const auto& i : issues) out += (out.empty() ? "" : "; ") + i.path + ": " + i.message;
    return out;
  }

  std::vector<DocumentIssue> issues_;
};

/// A daisy together with the optional planning inputs stored beside it.
struct DaisyDocument {
  std::string name;
  std::string comments;
  Daisy daisy;
  std::optional<Ordering> ordering;
  std::optional<CapabilityTable> capabilities;

  friend bool operator==(const DaisyDocument&, const DaisyDocument&) = default;
};

namespace detail {

class Reader {
 public:
  void issue(const std::string& path, const std::string& message) { issues_.push_back({path, message}); }
  std::vector<DocumentIssue>& issues() { return issues_; }

  void only_keys(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (auto k : allowed) known = known || it.key() == k;
      if (!known) issue(path + "/" + it.key(), "unknown field");
    }
  }

  bool is_object(const Json& j, const std::string& path) {
    if (j.is_object()) return true;
    issue(path, "expected an object");
    return false;
  }

  bool is_array(const Json& j, const std::string& path) {
    if (j.is_array()) return true;
    issue(path, "expected an array");
    return false;
  }

  std::optional<std::string> string_field(const Json& obj, const std::string& path, const char* key,
                                          bool required = true) {
    if (!obj.contains(key)) {
      if (required) issue(path + "/" + key, "missing required field");
      return std::nullopt;
    }
    const Json& v = obj.at(key);
    if (!v.is_string()) {
      issue(path + "/" + key, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  /// [lower, upper] with null standing for -inf / +inf.
  std::optional<std::pair<ExtendedReal, ExtendedReal>> bounds(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) {
      issue(path, "expected [lower, upper]");
      return std::nullopt;
    }
    auto side = [&](const Json& v, ExtendedReal inf, const std::string& where) -> std::optional<ExtendedReal> {
      if (v.is_null()) return inf;
      if (!v.is_number()) {
        issue(where, "expected a number or null");
        return std::nullopt;
      }
      return ExtendedReal(v.get<double>());
    };
    auto lo = side(j[0], ExtendedReal::neg_inf(), path + "/0");
    auto hi = side(j[1], ExtendedReal::pos_inf(), path + "/1");
    if (!lo || !hi) return std::nullopt;
    if (*lo > *hi) {
      issue(path, "lower bound exceeds upper bound");
      return std::nullopt;
    }
    return std::pair{*lo, *hi};
  }

 private:
  std::vector<DocumentIssue> issues_;
};

inline Json bound_json(ExtendedReal v) {
  if (v.is_finite()) return v.value();
  return nullptr;
}

inline std::optional<VertexId> resolve_vertex(const Daisy& d, const std::string& path) {
  if (path == "Vs") return d.start_vertex();
  if (path == "Ve") return d.end_vertex();
  const auto first = path.find('.');
  const auto last = path.rfind('.');
  if (first == std::string::npos || first == last) return std::nullopt;
  const std::string petal = path.substr(0, first);
  const std::string action = path.substr(first + 1, last - first - 1);
  const std::string side = path.substr(last + 1);
  if (side != "start" && side != "end") return std::nullopt;
  auto pi = d.petal_index(petal);
  if (!pi) return std::nullopt;
  for (const auto& a : d.petal(*pi).actions) {
    if (a.name == action) return side == "start" ? a.start : a.end;
  }
  return std::nullopt;
}

inline Json parse_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DocumentError(ErrorCode::SyntaxError, {{"", e.what()}});
  }
}

}  // namespace detail

/// Parses and fully validates a daisy document.
inline DaisyDocument parse_daisy(std::string_view text) {
  const Json root = detail::parse_text(text);
  detail::Reader r;
  DaisyDocument doc;
  if (!r.is_object(root, "")) throw DocumentError(ErrorCode::SchemaViolation, r.issues());
  r.only_keys(root, "", {"name", "comments", "agents", "petals", "external", "makespan", "capabilities", "ordering"});
  doc.name = r.string_field(root, "", "name", false).value_or("");
  doc.comments = r.string_field(root, "", "comments", false).value_or("");
  Daisy& d = doc.daisy;

  if (!root.contains("agents")) r.issue("/agents", "missing required field");
  else if (r.is_array(root["agents"], "/agents")) {
    for (std::size_t i = 0; i < root["agents"].size(); ++i) {
      const Json& a = root["agents"][i];
      const std::string path = "/agents/" + std::to_string(i);
      if (!r.is_object(a, path)) continue;
      r.only_keys(a, path, {"id", "kind", "name"});
      auto id = r.string_field(a, path, "id");
      auto kind = r.string_field(a, path, "kind");
      auto name = r.string_field(a, path, "name", false);
      if (kind && *kind != "human" && *kind != "robot") {
        r.issue(path + "/kind", "expected \"human\" or \"robot\"");
        kind.reset();
      }
      if (id && kind) {
        d.add_agent({*id, *kind == "human" ? AgentKind::Human : AgentKind::Robot, name.value_or("")});
      }
    }
  }

  if (!root.contains("petals")) r.issue("/petals", "missing required field");
  else if (r.is_array(root["petals"], "/petals")) {
    for (std::size_t i = 0; i < root["petals"].size(); ++i) {
      const Json& p = root["petals"][i];
      const std::string path = "/petals/" + std::to_string(i);
      if (!r.is_object(p, path)) continue;
      r.only_keys(p, path, {"name", "owner", "resources", "actions"});
      auto name = r.string_field(p, path, "name");
      std::optional<std::string> owner;
      if (p.contains("owner") && !p["owner"].is_null()) owner = r.string_field(p, path, "owner");
      std::set<std::string> resources;
      if (p.contains("resources") && r.is_array(p["resources"], path + "/resources")) {
        for (std::size_t k = 0; k < p["resources"].size(); ++k) {
          if (p["resources"][k].is_string()) {
            resources.insert(p["resources"][k].get<std::string>());
          } else {
            r.issue(path + "/resources/" + std::to_string(k), "expected a string");
          }
        }
      }
      std::vector<Action> actions;
      if (!p.contains("actions")) {
        r.issue(path + "/actions", "missing required field");
      } else if (r.is_array(p["actions"], path + "/actions")) {
        for (std::size_t k = 0; k < p["actions"].size(); ++k) {
          const Json& a = p["actions"][k];
          const std::string apath = path + "/actions/" + std::to_string(k);
          if (!r.is_object(a, apath)) continue;
          r.only_keys(a, apath, {"name", "bounds"});
          auto aname = r.string_field(a, apath, "name");
          if (!a.contains("bounds")) {
            r.issue(apath + "/bounds", "missing required field");
            continue;
          }
          auto b = r.bounds(a["bounds"], apath + "/bounds");
          if (!aname || !b) continue;
          try {
            actions.push_back(d.build_action(*aname, b->first.to_double(), b->second.to_double()));
          } catch (const Error& e) {
            r.issue(apath + "/bounds", e.what());
          }
        }
      }
      if (!name) continue;
      if (actions.empty()) {
        r.issue(path + "/actions", "petal needs at least one action");
        continue;
      }
      d.add_petal(build_petal(*name, std::move(actions), owner, std::move(resources)));
    }
  }

  if (root.contains("external") && r.is_array(root["external"], "/external")) {
    for (std::size_t i = 0; i < root["external"].size(); ++i) {
      const Json& c = root["external"][i];
      const std::string path = "/external/" + std::to_string(i);
      if (!r.is_object(c, path)) continue;
      r.only_keys(c, path, {"from", "to", "bounds", "kind"});
      auto from = r.string_field(c, path, "from");
      auto to = r.string_field(c, path, "to");
      auto kind = r.string_field(c, path, "kind");
      std::optional<std::pair<ExtendedReal, ExtendedReal>> b;
      if (!c.contains("bounds")) r.issue(path + "/bounds", "missing required field");
      else b = r.bounds(c["bounds"], path + "/bounds");
      ConstraintKind k = ConstraintKind::Other;
      if (kind) {
        if (*kind == "handoff") k = ConstraintKind::Handoff;
        else if (*kind == "makespan") k = ConstraintKind::Makespan;
        else if (*kind != "other") r.issue(path + "/kind", "expected \"handoff\", \"makespan\" or \"other\"");
      }
      std::optional<VertexId> vf, vt;
      if (from && !(vf = detail::resolve_vertex(d, *from))) r.issue(path + "/from", "unknown vertex '" + *from + "'");
      if (to && !(vt = detail::resolve_vertex(d, *to))) r.issue(path + "/to", "unknown vertex '" + *to + "'");
      if (vf && vt && b && kind) d.add_external({*vf, *vt, b->first, b->second, k});
    }
  }

  if (root.contains("makespan")) {
    if (auto b = r.bounds(root["makespan"], "/makespan")) {
      if (d.makespan()) r.issue("/makespan", "makespan given twice");
      else d.set_makespan(b->first, b->second);
    }
  }

  if (root.contains("capabilities") && r.is_object(root["capabilities"], "/capabilities")) {
    CapabilityTable caps;
    for (auto it = root["capabilities"].begin(); it != root["capabilities"].end(); ++it) {
      const std::string path = "/capabilities/" + it.key();
      auto pi = d.petal_index(it.key());
      if (!pi) {
        r.issue(path, "unknown petal");
        continue;
      }
      if (!r.is_object(it.value(), path)) continue;
      for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
        const std::string apath = path + "/" + jt.key();
        if (!d.find_agent(jt.key())) {
          r.issue(apath, "unknown agent");
        } else if (jt.value().is_null()) {
          caps.set_incapable(jt.key(), *pi);
        } else if (!jt.value().is_number() || jt.value().get<double>() < 0.0) {
          r.issue(apath, "expected a non-negative number or null");
        } else {
          caps.set(jt.key(), *pi, jt.value().get<double>());
        }
      }
    }
    doc.capabilities = std::move(caps);
  }

  if (root.contains("ordering") && r.is_object(root["ordering"], "/ordering")) {
    Ordering ordering;
    for (auto it = root["ordering"].begin(); it != root["ordering"].end(); ++it) {
      const std::string path = "/ordering/" + it.key();
      if (!d.find_agent(it.key())) r.issue(path, "unknown agent");
      if (!r.is_array(it.value(), path)) continue;
      auto& seq = ordering[it.key()];
      for (std::size_t k = 0; k < it.value().size(); ++k) {
        const Json& v = it.value()[k];
        auto pi = v.is_string() ? d.petal_index(v.get<std::string>()) : std::nullopt;
        if (!pi) r.issue(path + "/" + std::to_string(k), "unknown petal");
        else seq.push_back(*pi);
      }
    }
    doc.ordering = std::move(ordering);
  }

  if (!r.issues().empty()) throw DocumentError(ErrorCode::SchemaViolation, r.issues());
  auto violations = validate_daisy(d);
  if (!violations.empty()) {
    std::vector<DocumentIssue> issues;
    for (auto& v : violations) issues.push_back({"", std::move(v)});
    throw DocumentError(ErrorCode::InvalidDaisy, std::move(issues));
  }
  return doc;
}

inline Json daisy_to_json(const DaisyDocument& doc) {
  const Daisy& d = doc.daisy;
  Json root = Json::object();
  root["name"] = doc.name;
  if (!doc.comments.empty()) root["comments"] = doc.comments;
  root["agents"] = Json::array();
  for (const auto& a : d.agents()) {
    Json j = Json::object();
    j["id"] = a.id;
    j["kind"] = std::string(to_string(a.kind));
    if (!a.name.empty()) j["name"] = a.name;
    root["agents"].push_back(std::move(j));
  }
  root["petals"] = Json::array();
  for (const auto& p : d.petals()) {
    Json j = Json::object();
    j["name"] = p.name;
    j["owner"] = p.owner ? Json(*p.owner) : Json(nullptr);
    j["resources"] = Json(std::vector<std::string>(p.resources.begin(), p.resources.end()));
    j["actions"] = Json::array();
    for (const auto& a : p.actions) {
      Json aj = Json::object();
      aj["name"] = a.name;
      aj["bounds"] = Json::array({a.lower, a.upper});
      j["actions"].push_back(std::move(aj));
    }
    root["petals"].push_back(std::move(j));
  }
  root["external"] = Json::array();
  for (const auto& c : d.external()) {
    if (c.kind == ConstraintKind::Makespan) continue;
    Json j = Json::object();
    j["from"] = d.vertex_path(c.from);
    j["to"] = d.vertex_path(c.to);
    j["bounds"] = Json::array({detail::bound_json(c.lower), detail::bound_json(c.upper)});
    j["kind"] = std::string(to_string(c.kind));
    root["external"].push_back(std::move(j));
  }
  if (auto m = d.makespan()) root["makespan"] = Json::array({detail::bound_json(m->lower), detail::bound_json(m->upper)});
  if (doc.capabilities) {
    Json caps = Json::object();
    for (const auto& [key, score] : doc.capabilities->entries()) {
      caps[d.petal(key.second).name][key.first] = score;
    }
    root["capabilities"] = std::move(caps);
  }
  if (doc.ordering) {
    Json ord = Json::object();
    for (const auto& [agent, seq] : *doc.ordering) {
      Json names = Json::array();
      for (std::size_t p : seq) names.push_back(d.petal(p).name);
      ord[agent] = std::move(names);
    }
    root["ordering"] = std::move(ord);
  }
  return root;
}

inline std::string serialize_daisy(const DaisyDocument& doc) { return daisy_to_json(doc).dump(2) + "\n"; }

inline Json trace_to_json(const Trace& t, const std::string& daisy_name) {
  std::vector<ExecutionEvent> events = t.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const ExecutionEvent& a, const ExecutionEvent& b) { return a.start < b.start; });
  Json root = Json::object();
  root["seed"] = t.seed;
  root["daisy"] = daisy_name;
  root["feasible"] = t.feasible;
  root["daisy_start"] = t.daisy_start;
  root["daisy_end"] = t.daisy_end;
  root["agents"] = t.agents;
  root["events"] = Json::array();
  for (const auto& e : events) {
    Json j = Json::object();
    j["agent"] = e.agent;
    j["petal"] = e.petal;
    j["action"] = e.action;
    j["start"] = e.start;
    j["end"] = e.end;
    root["events"].push_back(std::move(j));
  }
  return root;
}

inline std::string serialize_trace(const Trace& t, const std::string& daisy_name) {
  return trace_to_json(t, daisy_name).dump(2) + "\n";
}

struct TraceDocument {
  Trace trace;
  std::string daisy;
};

inline TraceDocument parse_trace(std::string_view text) {
  const Json root = detail::parse_text(text);
  detail::Reader r;
  TraceDocument doc;
  if (!r.is_object(root, "")) throw DocumentError(ErrorCode::SchemaViolation, r.issues());
  r.only_keys(root, "", {"seed", "daisy", "feasible", "daisy_start", "daisy_end", "agents", "events"});
  auto number = [&](const Json& obj, const std::string& path, const char* key) -> double {
    if (!obj.contains(key) || !obj[key].is_number()) {
      r.issue(path + "/" + key, "expected a number");
      return 0.0;
    }
    return obj[key].get<double>();
  };
  if (root.contains("seed")) {
    if (root["seed"].is_number_unsigned()) doc.trace.seed = root["seed"].get<std::uint64_t>();
    else r.issue("/seed", "expected a non-negative integer");
  }
  doc.daisy = r.string_field(root, "", "daisy", false).value_or("");
  if (root.contains("feasible")) {
    if (root["feasible"].is_boolean()) doc.trace.feasible = root["feasible"].get<bool>();
    else r.issue("/feasible", "expected a boolean");
  }
  doc.trace.daisy_start = number(root, "", "daisy_start");
  doc.trace.daisy_end = number(root, "", "daisy_end");
  if (root.contains("agents") && r.is_array(root["agents"], "/agents")) {
    for (std::size_t i = 0; i < root["agents"].size(); ++i) {
      if (root["agents"][i].is_string()) doc.trace.agents.push_back(root["agents"][i].get<std::string>());
      else r.issue("/agents/" + std::to_string(i), "expected a string");
    }
  }
  if (!root.contains("events")) r.issue("/events", "missing required field");
  else if (r.is_array(root["events"], "/events")) {
    for (std::size_t i = 0; i < root["events"].size(); ++i) {
      const Json& e = root["events"][i];
      const std::string path = "/events/" + std::to_string(i);
      if (!r.is_object(e, path)) continue;
      r.only_keys(e, path, {"agent", "petal", "action", "start", "end"});
      ExecutionEvent ev;
      ev.agent = r.string_field(e, path, "agent").value_or("");
      ev.petal = r.string_field(e, path, "petal").value_or("");
      ev.action = r.string_field(e, path, "action").value_or("");
      ev.start = number(e, path, "start");
      ev.end = number(e, path, "end");
      if (ev.start > ev.end) r.issue(path, "start after end");
      doc.trace.events.push_back(std::move(ev));
    }
  }
  if (!r.issues().empty()) throw DocumentError(ErrorCode::SchemaViolation, r.issues());
  return doc;
}

inline Json report_to_json(const FluencyReport& rep) {
  Json root = Json::object();
  root["makespan"] = rep.makespan;
  root["agents"] = Json::array();
  for (const auto& a : rep.agents) {
    Json j = Json::object();
    j["agent"] = a.agent;
    j["active"] = a.active;
    j["idle_total"] = a.idle.total;
    j["idle_rest"] = a.idle.rest;
    j["idle_intra_petal_wait"] = a.idle.intra_petal_wait;
    root["agents"].push_back(std::move(j));
  }
  root["concurrent_activity"] = rep.concurrent_activity;
  root["concurrent_inactivity"] = rep.concurrent_inactivity;
  root["exclusive_activity"] = Json::array({rep.exclusive_first, rep.exclusive_second});
  root["petal_functional_delays"] = Json::array();
  for (const auto& p : rep.petal_functional_delays) {
    Json j = Json::object();
    j["handoff"] = p.external_index;
    j["from_petal"] = p.from_petal;
    j["to_petal"] = p.to_petal;
    j["enabling_agent"] = p.enabling_agent;
    j["delaying_agent"] = p.delaying_agent;
    j["delay"] = p.delay;
    root["petal_functional_delays"].push_back(std::move(j));
  }
  root["petal_functional_delay_by_direction"] = Json::array();
  for (const auto& [dir, sum] : rep.petal_delay_by_direction) {
    Json j = Json::object();
    j["from"] = dir.first;
    j["to"] = dir.second;
    j["sum"] = sum;
    root["petal_functional_delay_by_direction"].push_back(std::move(j));
  }
  root["handoffs"] = Json::array();
  for (const auto& h : rep.handoffs) {
    Json j = Json::object();
    j["handoff"] = h.external_index;
    j["from"] = h.from_vertex;
    j["to"] = h.to_vertex;
    j["enabling_agent"] = h.enabling_agent;
    j["dependent_agent"] = h.dependent_agent;
    j["enabling_time"] = h.enabling_time;
    j["ready_time"] = h.ready_time;
    j["dependent_start"] = h.dependent_start;
    j["resource_delay"] = h.resource_delay;
    j["functional_delay"] = h.functional_delay;
    j["classification"] = std::string(to_string(h.classification));
    root["handoffs"].push_back(std::move(j));
  }
  return root;
}

/// Inverse of report_to_json; trusts the layout it writes.
inline FluencyReport report_from_json(const Json& root) {
  try {
    FluencyReport rep;
    rep.makespan = root.at("makespan").get<double>();
    for (const auto& j : root.at("agents")) {
      AgentFluency a;
      a.agent = j.at("agent").get<std::string>();
      a.active = j.at("active").get<double>();
      a.idle.total = j.at("idle_total").get<double>();
      a.idle.rest = j.at("idle_rest").get<double>();
      a.idle.intra_petal_wait = j.at("idle_intra_petal_wait").get<double>();
      rep.agents.push_back(std::move(a));
    }
    rep.concurrent_activity = root.at("concurrent_activity").get<double>();
    rep.concurrent_inactivity = root.at("concurrent_inactivity").get<double>();
    rep.exclusive_first = root.at("exclusive_activity").at(0).get<double>();
    rep.exclusive_second = root.at("exclusive_activity").at(1).get<double>();
    for (const auto& j : root.at("petal_functional_delays")) {
      rep.petal_functional_delays.push_back({j.at("handoff").get<std::size_t>(), j.at("from_petal").get<std::string>(),
                                             j.at("to_petal").get<std::string>(),
                                             j.at("delaying_agent").get<std::string>(),
                                             j.at("enabling_agent").get<std::string>(), j.at("delay").get<double>()});
    }
    for (const auto& j : root.at("petal_functional_delay_by_direction")) {
      rep.petal_delay_by_direction[{j.at("from").get<std::string>(), j.at("to").get<std::string>()}] =
          j.at("sum").get<double>();
    }
    for (const auto& j : root.at("handoffs")) {
      HandoffDelays h;
      h.external_index = j.at("handoff").get<std::size_t>();
      h.from_vertex = j.at("from").get<std::string>();
      h.to_vertex = j.at("to").get<std::string>();
      h.enabling_agent = j.at("enabling_agent").get<std::string>();
      h.dependent_agent = j.at("dependent_agent").get<std::string>();
      h.enabling_time = j.at("enabling_time").get<double>();
      h.ready_time = j.at("ready_time").get<double>();
      h.dependent_start = j.at("dependent_start").get<double>();
      h.resource_delay = j.at("resource_delay").get<double>();
      h.functional_delay = j.at("functional_delay").get<double>();
      const auto cls = j.at("classification").get<std::string>();
      h.classification = cls == "blocked" ? HandoffClass::Blocked
                         : cls == "stale" ? HandoffClass::Stale
                                          : HandoffClass::Exact;
      rep.handoffs.push_back(std::move(h));
    }
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(ErrorCode::SchemaViolation, {{"", e.what()}});
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace madtn::io
