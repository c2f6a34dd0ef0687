#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "ccmin/catalog.hpp"
#include "ccmin/cli.hpp"

namespace ccmin::cli {

namespace {

using json = nlohmann::json;
using LineMap = std::map<std::string, std::size_t>;

// ---------------------------------------------------------------- TOML -> JSON

json toml_to_json(const toml::node& node, const std::string& path, LineMap& lines) {
  lines[path] = node.source().begin.line;
  if (const auto* t = node.as_table()) {
    json obj = json::object();
    for (const auto& [key, value] : *t) {
      const std::string k(key.str());
      obj[k] = toml_to_json(value, path.empty() ? k : path + "." + k, lines);
    }
    return obj;
  }
  if (const auto* a = node.as_array()) {
    json arr = json::array();
    for (std::size_t i = 0; i < a->size(); ++i) {
      arr.push_back(toml_to_json(*a->get(i), path + "[" + std::to_string(i) + "]", lines));
    }
    return arr;
  }
  if (const auto* v = node.as_integer()) return json(v->get());
  if (const auto* v = node.as_floating_point()) return json(v->get());
  if (const auto* v = node.as_boolean()) return json(v->get());
  if (const auto* v = node.as_string()) return json(v->get());
  throw ConfigError(path + ": unsupported TOML value type (dates and times are not used)");
}

std::size_t json_line(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

// ---------------------------------------------------------------- overrides

json parse_override_value(const std::string& raw) {
  try {
    return json::parse(raw);
  } catch (const json::parse_error&) {
    return json(raw);  // bare word: a string
  }
}

void apply_override(json& root, const std::string& spec, LineMap& lines) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set '" + spec + "': expected dotted.key=value");
  }
  const std::string path = spec.substr(0, eq);
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("--set '" + spec + "': empty path component");
    if (!node->is_object()) throw ConfigError("--set '" + spec + "': '" + key + "' is not inside a table");
    if (dot == std::string::npos) {
      (*node)[key] = parse_override_value(spec.substr(eq + 1));
      break;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
  lines[path] = 0;
}

// ---------------------------------------------------------------- typed access

class Reader {
 public:
  Reader(const json& root, const LineMap& lines, std::string origin)
      : root_(root), lines_(lines), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    std::string where = origin_;
    const auto it = lines_.find(path);
    if (it != lines_.end()) {
      where += it->second == 0 ? " (--set)" : ":" + std::to_string(it->second);
    }
    throw ConfigError(where + ": " + (path.empty() ? "" : "'" + path + "': ") + what);
  }

  const json* find(const std::string& path) const {
    const json* node = &root_;
    std::size_t start = 0;
    while (true) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!node->is_object() || !node->contains(key)) return nullptr;
      node = &(*node)[key];
      if (dot == std::string::npos) return node;
      start = dot + 1;
    }
  }

  void only_keys(const std::string& path, const std::set<std::string>& allowed) const {
    const json* node = path.empty() ? &root_ : find(path);
    if (!node) return;
    if (!node->is_object()) fail(path, "expected a table");
    for (const auto& [key, value] : node->items()) {
      if (!allowed.contains(key)) {
        fail(path.empty() ? key : path + "." + key, "unknown key '" + key + "'");
      }
    }
  }

  std::optional<double> number(const std::string& path) const {
    const json* n = find(path);
    if (!n) return std::nullopt;
    if (!n->is_number()) fail(path, "expected a number");
    const double v = n->get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
  }

  std::optional<std::size_t> count(const std::string& path) const {
    const json* n = find(path);
    if (!n) return std::nullopt;
    if (!n->is_number_integer() || n->get<long long>() < 0) fail(path, "expected a nonnegative integer");
    return static_cast<std::size_t>(n->get<long long>());
  }

  std::optional<std::string> string(const std::string& path) const {
    const json* n = find(path);
    if (!n) return std::nullopt;
    if (!n->is_string()) fail(path, "expected a string");
    return n->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& path) const {
    const json* n = find(path);
    if (!n) return std::nullopt;
    if (!n->is_boolean()) fail(path, "expected true or false");
    return n->get<bool>();
  }

  std::optional<std::vector<double>> numbers(const std::string& path) const {
    const json* n = find(path);
    if (!n) return std::nullopt;
    if (!n->is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : *n) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) fail(path, "expected an array of finite numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  Params params(const std::string& path) const {
    Params out;
    const json* n = find(path);
    if (!n) return out;
    if (!n->is_object()) fail(path, "expected a table of numeric parameters");
    for (const auto& [key, value] : n->items()) {
      if (!value.is_number()) fail(path + "." + key, "expected a number");
      out[key] = value.get<double>();
    }
    return out;
  }

 private:
  const json& root_;
  const LineMap& lines_;
  std::string origin_;
};

const std::set<std::string> kTasks = {"solve", "sweep", "certify_choquard", "certify_quasilinear",
                                      "rho0", "audit", "surgery_demo"};

GridSpec read_grid(const Reader& r, Family family) {
  const std::string base = "problem.grid";
  r.only_keys(base, {"kind", "dimension", "split", "extent", "extent2", "nodes", "nodes2"});
  std::string kind;
  switch (family) {
    case Family::choquard: kind = "radial"; break;
    case Family::badiale_rolando: kind = "cylindrical"; break;
    default: kind = "line"; break;
  }
  kind = r.string(base + ".kind").value_or(kind);
  GridSpec g;
  try {
    if (kind == "radial") {
      const int d = static_cast<int>(r.count(base + ".dimension").value_or(3));
      g = GridSpec::radial(d);
    } else if (kind == "line") {
      g = GridSpec::line();
    } else if (kind == "cylindrical") {
      const int k = static_cast<int>(r.count(base + ".split").value_or(2));
      const int d = static_cast<int>(r.count(base + ".dimension").value_or(3));
      g = GridSpec::cylindrical(k, d);
    } else {
      r.fail(base + ".kind", "unknown grid kind '" + kind + "' (radial, line, cylindrical)");
    }
  } catch (const InvalidArgument& e) {
    r.fail(base, e.what());
  }
  if (auto v = r.number(base + ".extent")) g.extent = *v;
  if (auto v = r.number(base + ".extent2")) g.extent2 = *v;
  if (auto v = r.count(base + ".nodes")) g.nodes = *v;
  if (auto v = r.count(base + ".nodes2")) g.nodes2 = *v;
  try {
    g.validate();
  } catch (const Error& e) {
    r.fail(base, e.what());
  }
  return g;
}

ProblemSpec read_problem(const Reader& r) {
  r.only_keys("problem", {"family", "grid", "lagrangian", "nonlinearity", "constraint", "mu", "components"});
  const auto fam_name = r.string("problem.family");
  if (!fam_name) r.fail("problem.family", "missing (choquard, quasilinear, stuart, badiale_rolando)");
  Family family;
  try {
    family = family_from_string(*fam_name);
  } catch (const InvalidArgument& e) {
    r.fail("problem.family", e.what());
  }
  const GridSpec grid = read_grid(r, family);
  for (const char* sec : {"problem.lagrangian", "problem.nonlinearity", "problem.constraint"}) {
    r.only_keys(sec, {"name", "params"});
  }
  const std::size_t comps = r.count("problem.components").value_or(1);
  if (comps == 0) r.fail("problem.components", "must be at least 1");
  const double mu = r.number("problem.mu").value_or(family == Family::badiale_rolando ? 1.0 : 0.0);

  auto build = [&](const std::string& sec, auto&& make) {
    const auto name = r.string(sec + ".name");
    try {
      return make(name, r.params(sec + ".params"));
    } catch (const InvalidArgument& e) {
      r.fail(sec, e.what());
    }
  };
  const Lagrangian L = build("problem.lagrangian", [](const std::optional<std::string>& n, const Params& p) {
    return make_lagrangian(n.value_or("j_quadratic"), p);
  });
  const bool has_F = r.find("problem.nonlinearity") != nullptr;
  const Nonlinearity F =
      build("problem.nonlinearity", [comps](const std::optional<std::string>& n, const Params& p) {
        return make_nonlinearity(n.value_or("F_zero"), p, comps);
      });
  const Constraint G = build("problem.constraint", [](const std::optional<std::string>& n, const Params& p) {
    return make_constraint(n.value_or("G_square"), p);
  });

  try {
    ProblemSpec p;
    switch (family) {
      case Family::choquard:
        if (has_F && !F.is_zero()) r.fail("problem.nonlinearity", "choquard problems have no F term");
        p = ProblemSpec::choquard(grid, L);
        p.constraint = G;
        break;
      case Family::quasilinear:
        p = ProblemSpec::quasilinear(grid, std::vector<Lagrangian>(comps, L), F, G);
        break;
      case Family::stuart:
        p = ProblemSpec::stuart(grid, F);
        p.lagrangians = std::vector<Lagrangian>(comps, L);
        p.constraint = G;
        break;
      case Family::badiale_rolando:
        p = ProblemSpec::badiale_rolando(grid, mu, F);
        p.lagrangians = std::vector<Lagrangian>(comps, L);
        p.constraint = G;
        break;
    }
    if (family != Family::badiale_rolando) p.mu = mu;
    p.validate();
    return p;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.fail("problem", e.what());
  }
}

SolveConfig read_solver(const Reader& r) {
  r.only_keys("solver", {"max_iters", "step0", "backtrack", "stall_tol", "grad_tol", "symmetrize_every",
                         "seed", "armijo", "record_trace"});
  SolveConfig s;
  if (auto v = r.count("solver.max_iters")) s.max_iters = *v;
  if (auto v = r.number("solver.step0")) s.step0 = *v;
  if (auto v = r.number("solver.backtrack")) s.backtrack = *v;
  if (auto v = r.number("solver.stall_tol")) s.stall_tol = *v;
  if (auto v = r.number("solver.grad_tol")) s.grad_tol = *v;
  if (auto v = r.count("solver.symmetrize_every")) s.symmetrize_every = *v;
  if (auto v = r.count("solver.seed")) s.seed = *v;
  if (auto v = r.number("solver.armijo")) s.armijo = *v;
  if (auto v = r.boolean("solver.record_trace")) s.record_trace = *v;
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    r.fail("solver", e.what());
  }
  return s;
}

void require_positive_list(const Reader& r, const std::string& path, const std::vector<double>& v,
                           bool ascending) {
  if (v.empty()) r.fail(path, "must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) r.fail(path, "values must be positive");
    if (ascending && i > 0 && !(v[i] > v[i - 1])) r.fail(path, "values must be strictly ascending");
  }
}

TaskConfig read_task(const Reader& r, const ProblemSpec& p) {
  r.only_keys("task", {"kind", "c", "c_list", "t_grid", "theta_grid", "rho_bracket", "m_inf",
                       "homogeneity_alpha", "tol", "seed_width", "source", "surgery", "target_mass", "x1",
                       "x2", "eps", "r_cut", "separation", "r0", "dump_fields"});
  TaskConfig t;
  const auto kind = r.string("task.kind");
  if (!kind) r.fail("task.kind", "missing; one of solve, sweep, certify_choquard, certify_quasilinear, rho0, audit, surgery_demo");
  if (!kTasks.contains(*kind)) r.fail("task.kind", "unknown task '" + *kind + "'");
  t.kind = *kind;
  if (auto v = r.number("task.c")) t.c = *v;
  if (!(t.c > 0.0)) r.fail("task.c", "must be positive");
  if (auto v = r.numbers("task.c_list")) t.c_list = *v;
  if (auto v = r.numbers("task.t_grid")) t.t_grid = *v;
  if (auto v = r.numbers("task.theta_grid")) t.theta_grid = *v;
  if (auto v = r.numbers("task.rho_bracket")) {
    if (v->size() != 2) r.fail("task.rho_bracket", "expected [lo, hi]");
    t.rho_lo = (*v)[0];
    t.rho_hi = (*v)[1];
  }
  if (auto v = r.string("task.m_inf")) t.m_inf = *v;
  if (!std::set<std::string>{"auto", "zero", "self", "none"}.contains(t.m_inf)) {
    r.fail("task.m_inf", "expected auto, zero, self or none");
  }
  t.homogeneity_alpha = r.number("task.homogeneity_alpha");
  t.tol = r.number("task.tol");
  if (auto v = r.number("task.seed_width")) t.seed_width = *v;
  if (!(t.seed_width > 0.0)) r.fail("task.seed_width", "must be positive");
  if (auto v = r.string("task.source")) t.source = *v;
  if (auto v = r.string("task.surgery")) t.surgery = *v;
  if (auto v = r.number("task.target_mass")) t.target_mass = *v;
  t.x1 = r.number("task.x1");
  t.x2 = r.number("task.x2");
  if (auto v = r.number("task.eps")) t.eps = *v;
  if (auto v = r.number("task.r_cut")) t.r_cut = *v;
  if (auto v = r.number("task.separation")) t.separation = *v;
  if (auto v = r.number("task.r0")) t.r0 = *v;
  if (auto v = r.boolean("task.dump_fields")) t.dump_fields = *v;

  const bool radial3 = p.grid.kind == GridKind::radial && p.grid.dimension == 3;
  if (t.kind == "sweep") {
    if (!r.find("task.c_list")) r.fail("task.c_list", "required for a sweep");
    require_positive_list(r, "task.c_list", t.c_list, true);
    if (t.homogeneity_alpha && !(*t.homogeneity_alpha >= 1.0)) {
      r.fail("task.homogeneity_alpha", "must be >= 1");
    }
  } else if (t.kind == "certify_choquard") {
    if (p.family != Family::choquard) r.fail("task.kind", "certify_choquard needs family = choquard");
    if (t.t_grid.empty()) t.t_grid = {1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1, 0.2, 0.5, 1.0};
    require_positive_list(r, "task.t_grid", t.t_grid, false);
  } else if (t.kind == "certify_quasilinear") {
    if (t.theta_grid.empty()) t.theta_grid = {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0};
    require_positive_list(r, "task.theta_grid", t.theta_grid, false);
  } else if (t.kind == "rho0") {
    if (p.family != Family::badiale_rolando) r.fail("task.kind", "rho0 needs family = badiale_rolando");
    if (!r.find("task.rho_bracket")) r.fail("task.rho_bracket", "required for rho0");
    if (!(t.rho_lo > 0.0 && t.rho_hi > t.rho_lo)) r.fail("task.rho_bracket", "need 0 < lo < hi");
  } else if (t.kind == "audit") {
    if (!radial3) r.fail("problem.grid", "audit needs a radial grid of dimension 3");
    if (t.source != "minimizer" && t.source != "gaussian") {
      r.fail("task.source", "audit sources are minimizer or gaussian");
    }
  } else if (t.kind == "surgery_demo") {
    static const std::set<std::string> kinds = {"plateau", "dip", "disjoint", "truncate", "far_field"};
    if (!kinds.contains(t.surgery)) {
      r.fail("task.surgery", "expected plateau, dip, disjoint, truncate or far_field");
    }
    if ((t.surgery == "plateau" || t.surgery == "dip") && p.grid.kind != GridKind::line) {
      r.fail("task.surgery", t.surgery + " needs a line grid");
    }
    if (t.surgery == "far_field" && p.family != Family::stuart) {
      r.fail("task.surgery", "far_field needs family = stuart");
    }
    if ((t.surgery == "plateau" || t.surgery == "disjoint" || t.surgery == "far_field") &&
        !(t.target_mass > 0.0)) {
      r.fail("task.target_mass", "must be positive for " + t.surgery);
    }
    if ((t.surgery == "truncate" || t.surgery == "disjoint") && !(t.r_cut > 0.0)) {
      r.fail("task.r_cut", "must be positive for " + t.surgery);
    }
    if (!(t.eps > 0.0)) r.fail("task.eps", "must be positive");
  }
  return t;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, ConfigFormat format,
                              const std::vector<std::string>& overrides, const std::string& origin) {
  json root;
  LineMap lines;
  if (format == ConfigFormat::toml) {
    try {
      const toml::table tbl = toml::parse(text, std::string_view(origin));
      root = toml_to_json(tbl, "", lines);
    } catch (const toml::parse_error& e) {
      throw ConfigError(origin + ":" + std::to_string(e.source().begin.line) + ": TOML syntax error: " +
                        std::string(e.description()));
    }
  } else {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(origin + ":" + std::to_string(json_line(text, e.byte)) + ": JSON syntax error");
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");
  }
  for (const std::string& o : overrides) apply_override(root, o, lines);

  const Reader r(root, lines, origin);
  r.only_keys("", {"output", "problem", "task", "solver"});
  if (!r.find("problem")) r.fail("problem", "missing [problem] section");
  if (!r.find("task")) r.fail("task", "missing [task] section");
  ExperimentConfig cfg;
  cfg.problem = read_problem(r);
  cfg.solver = read_solver(r);
  cfg.task = read_task(r, cfg.problem);
  cfg.output = r.string("output").value_or("");
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return parse_config(ss.str(), is_json ? ConfigFormat::json : ConfigFormat::toml, overrides, path);
}

}  // namespace ccmin::cli
