#include "narrative/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace narrative {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + key, "missing required field");
  return *it;
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(where + it.key(), "unknown field");
}

double get_number(const json& obj, const char* key, const std::string& where, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(where + key, "expected a number");
  return it->get<double>();
}

int get_int(const json& obj, const char* key, const std::string& where, int fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(where + key, "expected an integer");
  return it->get<int>();
}

bool get_bool(const json& obj, const char* key, const std::string& where, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(where + key, "expected true or false");
  return it->get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& where,
                       const std::string& fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) throw ConfigError(where + key, "expected a string");
  return it->get<std::string>();
}

void require_object(const json& doc, const std::string& field) {
  if (!doc.is_object()) throw ConfigError(field, "expected an object");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// ---------------------------------------------------------------------------

FamilySpec family_from_json(const json& doc, const std::string& where) {
  require_object(doc, where);
  reject_unknown(doc, {"label", "rows"}, where + ".");
  FamilySpec f;
  f.label = get_string(doc, "label", where + ".", "");
  const json& rows = require(doc, "rows", where + ".");
  if (!rows.is_array() || rows.size() != 4)
    throw ConfigError(where + ".rows", "expected 4 rows ordered (a,y) = 00, 01, 10, 11");
  for (std::size_t r = 0; r < 4; ++r) {
    const std::string at = where + ".rows[" + std::to_string(r) + "]";
    if (!rows[r].is_array()) throw ConfigError(at, "expected an array of probabilities");
    for (const auto& v : rows[r]) {
      if (!v.is_number()) throw ConfigError(at, "expected numbers");
      f.rows[r].push_back(v.get<double>());
    }
  }
  return f;
}

json family_to_json(const FamilySpec& f) {
  json rows = json::array();
  for (const auto& r : f.rows) rows.push_back(r);
  json out{{"rows", rows}};
  if (!f.label.empty()) out["label"] = f.label;
  return out;
}

FamilySpec family_spec(const std::string& label, const ConditionalFamily& q) {
  return {label, q.rows()};
}

std::optional<EnumerationOptions> enumeration_from_json(const json& doc, const std::string& where) {
  require_object(doc, where);
  reject_unknown(doc, {"max_nodes", "perfect_only", "action_ancestral"}, where + ".");
  EnumerationOptions e;
  e.max_nodes = get_int(doc, "max_nodes", where + ".", e.max_nodes);
  e.perfect_only = get_bool(doc, "perfect_only", where + ".", e.perfect_only);
  e.action_ancestral = get_bool(doc, "action_ancestral", where + ".", e.action_ancestral);
  return e;
}

DagEntry dag_entry_from_json(const json& doc, const std::string& where) {
  require_object(doc, where);
  reject_unknown(doc, {"label", "nodes", "edges"}, where + ".");
  return {get_string(doc, "label", where + ".", ""), dag_from_json(doc, where)};
}

json dag_entry_to_json(const DagEntry& e) {
  json out = dag_to_json(e.dag);
  if (!e.label.empty()) out["label"] = e.label;
  return out;
}

// Corner families for n middle bits: each (a,y) row puts all mass on one
// middle assignment.
std::vector<FamilySpec> corner_families(int n) {
  const std::uint32_t width = 1u << (n - 2);
  const std::uint64_t count = std::uint64_t{width} * width * width * width;
  std::vector<FamilySpec> out;
  out.reserve(count);
  for (std::uint64_t c = 0; c < count; ++c) {
    FamilySpec f;
    std::string code;
    std::uint64_t rest = c;
    for (int r = 0; r < 4; ++r) {
      const std::uint32_t hot = static_cast<std::uint32_t>(rest % width);
      rest /= width;
      f.rows[r].assign(width, 0.0);
      f.rows[r][hot] = 1.0;
      code += (r ? "," : "") + std::to_string(hot);
    }
    f.label = n == 3 ? "corner:" + std::string{code[0], code[2], code[4], code[6]}
                     : "corner:" + code;
    out.push_back(std::move(f));
  }
  return out;
}

double grid_step(const std::string& generator) {
  const std::string text = generator.substr(5);
  std::size_t used = 0;
  double h = 0.0;
  try {
    h = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(h > 0.0 && h <= 1.0))
    throw ConfigError("q_set.generator", "grid step must be a number in (0,1], got '" + text + "'");
  const double steps = std::round(1.0 / h);
  if (std::abs(steps * h - 1.0) > 1e-9)
    throw ConfigError("q_set.generator", "grid step must divide 1 evenly");
  return h;
}

std::vector<FamilySpec> grid_families(int n, double h) {
  if (n != 3) throw ConfigError("q_set.generator", "grid generator needs n = 3");
  const int steps = static_cast<int>(std::round(1.0 / h));
  std::vector<FamilySpec> out;
  const int side = steps + 1;
  for (int c = 0; c < side * side * side * side; ++c) {
    std::array<double, 4> p{};
    int rest = c;
    for (int r = 0; r < 4; ++r) {
      p[r] = static_cast<double>(rest % side) / steps;
      rest /= side;
    }
    const auto q = ConditionalFamily::from_x2(p[0], p[1], p[2], p[3]);
    out.push_back(family_spec("grid:" + format_number(p[0]) + "," + format_number(p[1]) + "," +
                                  format_number(p[2]) + "," + format_number(p[3]),
                              q));
  }
  return out;
}

ConditionalFamily to_family(const FamilySpec& f, int n, const std::string& where) {
  try {
    return ConditionalFamily(n, f.rows);
  } catch (const std::exception& e) {
    throw ConfigError(where, e.what());
  }
}

// ---------------------------------------------------------------------------

ScenarioConfig paper_base(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.builtin = name;
  c.n = 3;
  c.mu = 0.5;
  c.d_star = 0.5;
  return c;
}

// p(x_2 = 1 | a, y) close to a(1 - y). Cells with y = 1 keep x_2 = 0 much
// more firmly than the (a=0, y=0) cell does, so x_2 = 1 still rules out
// y = 1 once the family is mixed with the uniform distribution.
FamilySpec foreign_policy_family(double delta) {
  const double weak = std::sqrt(delta);
  return family_spec("x2=a(1-y)", ConditionalFamily::from_x2(weak, 0.0, 1.0, 0.0));
}

}  // namespace

// ---------------------------------------------------------------------------

CostFunction CostSpec::make() const {
  if (kind == "quadratic") return CostFunction::quadratic(k);
  if (kind == "power") return CostFunction::power(k, exponent);
  throw ConfigError("cost.kind", "expected \"quadratic\" or \"power\", got \"" + kind + "\"");
}

CausalDag dag_from_json(const json& doc, const std::string& field) {
  require_object(doc, field);
  const json& nodes = require(doc, "nodes", field + ".");
  if (!nodes.is_array()) throw ConfigError(field + ".nodes", "expected an array of integers");
  std::vector<int> ns;
  for (const auto& v : nodes) {
    if (!v.is_number_integer()) throw ConfigError(field + ".nodes", "expected integers");
    ns.push_back(v.get<int>());
  }
  std::vector<Edge> edges;
  if (auto it = doc.find("edges"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError(field + ".edges", "expected an array of pairs");
    for (const auto& e : *it) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ConfigError(field + ".edges", "each edge must be a pair [from, to]");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  try {
    return CausalDag(ns, std::move(edges));
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

json dag_to_json(const CausalDag& dag) {
  json edges = json::array();
  for (const auto& [from, to] : dag.edges()) edges.push_back({from, to});
  return {{"nodes", dag.nodes().to_vector()}, {"edges", edges}};
}

ScenarioConfig scenario_from_json(const json& doc) {
  require_object(doc, "scenario");
  reject_unknown(doc,
                 {"schema_version", "name", "builtin", "n", "mu", "d_star", "epsilon", "delta",
                  "cost", "q_set", "dag_set", "solver"},
                 "");
  ScenarioConfig c;
  c.schema_version = get_int(doc, "schema_version", "", -1);
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "expected " + std::to_string(kSchemaVersion));
  c.name = get_string(doc, "name", "", "");
  c.builtin = get_string(doc, "builtin", "", "");
  c.n = get_int(doc, "n", "", c.n);
  c.mu = get_number(doc, "mu", "", c.mu);
  c.d_star = get_number(doc, "d_star", "", c.d_star);
  c.epsilon = get_number(doc, "epsilon", "", c.epsilon);
  c.delta = get_number(doc, "delta", "", c.delta);

  if (auto it = doc.find("cost"); it != doc.end()) {
    require_object(*it, "cost");
    reject_unknown(*it, {"kind", "k", "exponent"}, "cost.");
    c.cost.kind = get_string(*it, "kind", "cost.", c.cost.kind);
    c.cost.k = get_number(*it, "k", "cost.", c.cost.k);
    c.cost.exponent = get_number(*it, "exponent", "cost.", c.cost.exponent);
  }

  const json& q = require(doc, "q_set", "");
  if (q.is_array()) {
    for (std::size_t i = 0; i < q.size(); ++i)
      c.q_set.families.push_back(family_from_json(q[i], "q_set[" + std::to_string(i) + "]"));
  } else if (q.is_object()) {
    reject_unknown(q, {"generator", "families", "mirror_closure"}, "q_set.");
    c.q_set.generator = get_string(q, "generator", "q_set.", "");
    c.q_set.mirror_closure = get_bool(q, "mirror_closure", "q_set.", false);
    if (auto it = q.find("families"); it != q.end()) {
      if (!it->is_array()) throw ConfigError("q_set.families", "expected an array");
      for (std::size_t i = 0; i < it->size(); ++i)
        c.q_set.families.push_back(
            family_from_json((*it)[i], "q_set.families[" + std::to_string(i) + "]"));
    }
  } else {
    throw ConfigError("q_set", "expected an array of families or a generator object");
  }

  const json& d = require(doc, "dag_set", "");
  if (d.is_array()) {
    for (std::size_t i = 0; i < d.size(); ++i)
      c.dag_set.dags.push_back(dag_entry_from_json(d[i], "dag_set[" + std::to_string(i) + "]"));
  } else if (d.is_object()) {
    reject_unknown(d, {"enumerate", "dags", "exclude"}, "dag_set.");
    if (auto it = d.find("enumerate"); it != d.end())
      c.dag_set.enumerate = enumeration_from_json(*it, "dag_set.enumerate");
    if (auto it = d.find("dags"); it != d.end()) {
      if (!it->is_array()) throw ConfigError("dag_set.dags", "expected an array");
      for (std::size_t i = 0; i < it->size(); ++i)
        c.dag_set.dags.push_back(
            dag_entry_from_json((*it)[i], "dag_set.dags[" + std::to_string(i) + "]"));
    }
    if (auto it = d.find("exclude"); it != d.end()) {
      if (!it->is_array()) throw ConfigError("dag_set.exclude", "expected an array");
      for (std::size_t i = 0; i < it->size(); ++i)
        c.dag_set.exclude.push_back(
            dag_from_json((*it)[i], "dag_set.exclude[" + std::to_string(i) + "]"));
    }
  } else {
    throw ConfigError("dag_set", "expected an array of DAGs or an enumeration object");
  }

  if (auto it = doc.find("solver"); it != doc.end()) {
    require_object(*it, "solver");
    reject_unknown(*it, {"scan_points", "tie_tol", "root_tol", "max_bisections", "parallel"},
                   "solver.");
    auto& s = c.solver;
    s.scan_points = get_int(*it, "scan_points", "solver.", s.scan_points);
    s.tie_tol = get_number(*it, "tie_tol", "solver.", s.tie_tol);
    s.root_tol = get_number(*it, "root_tol", "solver.", s.root_tol);
    s.max_bisections = get_int(*it, "max_bisections", "solver.", s.max_bisections);
    s.parallel = get_bool(*it, "parallel", "solver.", s.parallel);
  }

  validate(c);
  return c;
}

json to_json(const ScenarioConfig& c) {
  json doc;
  doc["schema_version"] = c.schema_version;
  doc["name"] = c.name;
  if (!c.builtin.empty()) doc["builtin"] = c.builtin;
  doc["n"] = c.n;
  doc["mu"] = c.mu;
  doc["d_star"] = c.d_star;
  doc["epsilon"] = c.epsilon;
  doc["delta"] = c.delta;
  doc["cost"] = {{"kind", c.cost.kind}, {"k", c.cost.k}};
  if (c.cost.kind != "quadratic" || c.cost.exponent != 2.0)
    doc["cost"]["exponent"] = c.cost.exponent;

  json families = json::array();
  for (const auto& f : c.q_set.families) families.push_back(family_to_json(f));
  json q{{"families", families}, {"mirror_closure", c.q_set.mirror_closure}};
  if (!c.q_set.generator.empty()) q["generator"] = c.q_set.generator;
  doc["q_set"] = q;

  json dags = json::array();
  for (const auto& e : c.dag_set.dags) dags.push_back(dag_entry_to_json(e));
  json d{{"dags", dags}};
  if (c.dag_set.enumerate)
    d["enumerate"] = {{"max_nodes", c.dag_set.enumerate->max_nodes},
                      {"perfect_only", c.dag_set.enumerate->perfect_only},
                      {"action_ancestral", c.dag_set.enumerate->action_ancestral}};
  if (!c.dag_set.exclude.empty()) {
    json ex = json::array();
    for (const auto& g : c.dag_set.exclude) ex.push_back(dag_to_json(g));
    d["exclude"] = ex;
  }
  doc["dag_set"] = d;

  doc["solver"] = {{"scan_points", c.solver.scan_points},
                   {"tie_tol", c.solver.tie_tol},
                   {"root_tol", c.solver.root_tol},
                   {"max_bisections", c.solver.max_bisections},
                   {"parallel", c.solver.parallel}};
  return doc;
}

std::string emit_scenario(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

ScenarioConfig parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    const auto last_nl = text.rfind('\n', upto ? upto - 1 : 0);
    const std::size_t column = last_nl == std::string::npos ? upto : upto - last_nl - 1;
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column),
                      "JSON parse error");
  }
  return scenario_from_json(doc);
}

ScenarioConfig load_scenario(const std::string& path_or_builtin) {
  namespace fs = std::filesystem;
  if (!fs::exists(path_or_builtin)) {
    if (is_builtin(path_or_builtin)) return builtin_scenario(path_or_builtin);
    std::string known;
    for (const auto& b : builtin_names()) known += (known.empty() ? "" : ", ") + b;
    throw ConfigError("scenario", "no file or built-in named '" + path_or_builtin +
                                      "' (built-ins: " + known + ")");
  }
  std::ifstream in(path_or_builtin);
  if (!in) throw ConfigError("scenario", "cannot read " + path_or_builtin);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

// ---------------------------------------------------------------------------

void validate(const ScenarioConfig& c) {
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "expected " + std::to_string(kSchemaVersion));
  if (!(c.n > 2 && c.n <= kMaxVariables))
    throw ConfigError("n", "must satisfy 2 < n <= " + std::to_string(kMaxVariables));
  if (!(c.mu > 0.0 && c.mu < 1.0)) throw ConfigError("mu", "must lie in (0,1)");
  if (!(c.epsilon > 0.0 && c.epsilon < 0.5)) throw ConfigError("epsilon", "must lie in (0,0.5)");
  if (!(c.d_star > 0.0 && c.d_star < 1.0)) throw ConfigError("d_star", "must lie in (0,1)");
  if (c.d_star < c.epsilon || c.d_star > 1.0 - c.epsilon)
    throw ConfigError("d_star", "must lie in [epsilon, 1 - epsilon]");
  if (!(c.delta > 0.0 && c.delta < 0.1)) throw ConfigError("delta", "must lie in (0,0.1)");
  try {
    (void)c.cost.make();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("cost", e.what());
  }

  const auto& g = c.q_set.generator;
  if (!g.empty() && g != "corners" && g.rfind("grid:", 0) != 0)
    throw ConfigError("q_set.generator", "expected \"corners\" or \"grid:<step>\", got \"" + g + "\"");
  if (g.rfind("grid:", 0) == 0) {
    grid_step(g);
    if (c.n != 3) throw ConfigError("q_set.generator", "grid generator needs n = 3");
  }
  if (g == "corners" && c.n > 6)
    throw ConfigError("q_set.generator", "corner set too large beyond n = 6");
  for (std::size_t i = 0; i < c.q_set.families.size(); ++i)
    to_family(c.q_set.families[i], c.n, "q_set.families[" + std::to_string(i) + "]");
  if (c.q_set.families.empty() && g.empty())
    throw ConfigError("q_set", "no conditional families");

  if (c.dag_set.enumerate) {
    const int m = c.dag_set.enumerate->max_nodes;
    if (m < 2 || m > c.n) throw ConfigError("dag_set.enumerate.max_nodes", "must lie in [2, n]");
  }
  for (std::size_t i = 0; i < c.dag_set.dags.size(); ++i)
    if (auto bad = validate(c.dag_set.dags[i].dag, c.n); !bad.empty())
      throw ConfigError("dag_set.dags[" + std::to_string(i) + "]", bad.front());
  if (c.dag_set.dags.empty() && !c.dag_set.enumerate)
    throw ConfigError("dag_set", "no DAGs");

  const auto& s = c.solver;
  if (s.scan_points < 2) throw ConfigError("solver.scan_points", "must be at least 2");
  if (!(s.tie_tol >= 0.0)) throw ConfigError("solver.tie_tol", "must be non-negative");
  if (!(s.root_tol > 0.0)) throw ConfigError("solver.root_tol", "must be positive");
  if (s.max_bisections < 1) throw ConfigError("solver.max_bisections", "must be positive");
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"claim1", "claim2", "short-narratives",
                                              "opportunity"};
  return names;
}

bool is_builtin(const std::string& name) {
  const auto& names = builtin_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ScenarioConfig builtin_scenario(const std::string& name, const BuiltinOverrides& overrides) {
  if (!is_builtin(name)) {
    std::string known;
    for (const auto& b : builtin_names()) known += (known.empty() ? "" : ", ") + b;
    throw ConfigError("builtin", "unknown built-in '" + name + "' (known: " + known + ")");
  }
  ScenarioConfig c = paper_base(name);
  if (name == "claim1" || name == "claim2") {
    c.epsilon = 1e-4;
    c.delta = overrides.delta.value_or(1e-8);
    c.q_set.families = {foreign_policy_family(c.delta)};
    c.dag_set.enumerate = EnumerationOptions{3, false, true};
    if (name == "claim2") c.dag_set.exclude = {short_dag(ShortDag::collider)};
  } else if (name == "short-narratives") {
    c.epsilon = 1e-3;
    c.q_set.generator = "corners";
    c.dag_set.enumerate = EnumerationOptions{3, true, true};
  } else {
    c.epsilon = 1e-3;
    c.cost.k = 0.01;
    c.q_set.generator = "corners";
    c.dag_set.enumerate = EnumerationOptions{3, false, false};
  }
  if (overrides.k) c.cost.k = *overrides.k;
  if (overrides.epsilon) c.epsilon = *overrides.epsilon;
  if (overrides.delta) c.delta = *overrides.delta;
  if (overrides.d_star) c.d_star = *overrides.d_star;
  validate(c);
  return c;
}

// ---------------------------------------------------------------------------

std::vector<FamilySpec> expand_families(const ScenarioConfig& c) {
  std::vector<FamilySpec> out = c.q_set.families;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].label.empty()) out[i].label = "q" + std::to_string(i);
  const auto& g = c.q_set.generator;
  if (g == "corners") {
    for (auto& f : corner_families(c.n)) out.push_back(std::move(f));
  } else if (g.rfind("grid:", 0) == 0) {
    for (auto& f : grid_families(c.n, grid_step(g))) out.push_back(std::move(f));
  }
  if (c.q_set.mirror_closure) {
    const std::size_t base = out.size();
    for (std::size_t i = 0; i < base; ++i) {
      const FamilySpec m{out[i].label + "~mirror",
                         mirror(to_family(out[i], c.n, "q_set")).rows()};
      const bool present = std::any_of(out.begin(), out.end(),
                                       [&](const FamilySpec& f) { return f.rows == m.rows; });
      if (!present) out.push_back(m);
    }
  }
  if (out.empty()) throw ConfigError("q_set", "no conditional families after generation");
  return out;
}

std::vector<DagEntry> expand_dags(const ScenarioConfig& c) {
  std::vector<DagEntry> out = c.dag_set.dags;
  if (c.dag_set.enumerate)
    for (auto& d : enumerate_dags(c.n, *c.dag_set.enumerate)) out.push_back({"", std::move(d)});
  std::stable_sort(out.begin(), out.end(),
                   [](const DagEntry& a, const DagEntry& b) { return a.dag < b.dag; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const DagEntry& a, const DagEntry& b) { return a.dag == b.dag; }),
            out.end());
  std::erase_if(out, [&](const DagEntry& e) {
    return std::find(c.dag_set.exclude.begin(), c.dag_set.exclude.end(), e.dag) !=
           c.dag_set.exclude.end();
  });
  for (auto& e : out)
    if (e.label.empty()) e.label = e.dag.to_string();
  if (out.empty()) throw ConfigError("dag_set", "no DAGs left after exclusions");
  return out;
}

Model build_model(const ScenarioConfig& c) {
  validate(c);
  Model m;
  m.n = c.n;
  m.mu = c.mu;
  m.d_star = c.d_star;
  m.epsilon = c.epsilon;
  m.cost = c.cost.make();
  m.solver = c.solver;
  const auto families = expand_families(c);
  for (std::size_t i = 0; i < families.size(); ++i) {
    const auto q = to_family(families[i], c.n, "q_set");
    m.families.push_back(perturb_full_support(q, c.delta));
    m.family_labels.push_back(families[i].label);
  }
  for (auto& e : expand_dags(c)) {
    m.dags.push_back(e.dag);
    m.dag_labels.push_back(e.label);
  }
  return m;
}

void set_parameter(ScenarioConfig& c, const std::string& name, double value) {
  if (name == "k" || name == "cost.k") {
    c.cost.k = value;
  } else if (name == "exponent" || name == "cost.exponent") {
    c.cost.exponent = value;
  } else if (name == "mu") {
    c.mu = value;
  } else if (name == "d_star") {
    c.d_star = value;
  } else if (name == "epsilon") {
    c.epsilon = value;
  } else if (name == "delta") {
    c.delta = value;
  } else {
    throw ConfigError("param", "unknown parameter '" + name +
                                   "' (expected k, exponent, mu, d_star, epsilon or delta)");
  }
  validate(c);
}

}  // namespace narrative
