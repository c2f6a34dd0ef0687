#include "ccmin/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccmin/catalog.hpp"
#include "ccmin/error.hpp"

namespace ccmin {

std::string to_string(Family f) {
  switch (f) {
    case Family::choquard: return "choquard";
    case Family::quasilinear: return "quasilinear";
    case Family::stuart: return "stuart";
    case Family::badiale_rolando: return "badiale_rolando";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "choquard") return Family::choquard;
  if (name == "quasilinear") return Family::quasilinear;
  if (name == "stuart") return Family::stuart;
  if (name == "badiale_rolando") return Family::badiale_rolando;
  throw InvalidArgument("unknown problem family '" + name + "'");
}

// ---------------------------------------------------------------- ProblemSpec

void ProblemSpec::validate() const {
  grid.validate();
  const std::string fam = to_string(family);
  auto fail = [&](const std::string& why) { throw InvalidArgument(fam + ": " + why); };
  if (lagrangians.empty()) fail("at least one component required");
  for (const Lagrangian& L : lagrangians) {
    if (!L.j) fail("Lagrangian '" + L.name + "' has no evaluator");
  }
  if (!nonlinearity.is_zero() && nonlinearity.components != components()) {
    fail("nonlinearity expects " + std::to_string(nonlinearity.components) +
         " components, problem has " + std::to_string(components()));
  }
  if (!constraint.G) fail("constraint has no evaluator");
  if (!(mu >= 0.0)) fail("Hardy coefficient must be nonnegative");
  if (mu > 0.0 && family != Family::badiale_rolando) fail("Hardy term only exists for badiale_rolando");
  if (grid.kind == GridKind::cylindrical) {
    for (const Lagrangian& L : lagrangians) {
      if (!L.quadratic_coefficient) {
        fail("cylindrical grids need a quadratic Lagrangian, got '" + L.name + "'");
      }
    }
  }
  auto bad_grid = [&]() {
    throw GridMismatch(fam + ": incompatible grid " + grid.describe());
  };
  switch (family) {
    case Family::choquard:
      if (grid.kind != GridKind::radial || grid.dimension != 3) bad_grid();
      if (components() != 1) fail("single component only");
      if (constraint.name != "G_square") fail("constraint must be G_square");
      break;
    case Family::quasilinear:
      if (grid.kind == GridKind::cylindrical) bad_grid();
      break;
    case Family::stuart:
    case Family::badiale_rolando:
      if (family == Family::stuart && grid.kind == GridKind::cylindrical) bad_grid();
      if (family == Family::badiale_rolando &&
          (grid.kind != GridKind::cylindrical || grid.split < 2)) {
        bad_grid();
      }
      if (components() != 1) fail("single component only");
      if (constraint.name != "G_square") fail("constraint must be G_square");
      if (!lagrangians[0].quadratic_coefficient || *lagrangians[0].quadratic_coefficient != 1.0) {
        fail("kinetic term is fixed to |grad u|^2 (use j_quadratic)");
      }
      break;
  }
}

ProblemSpec ProblemSpec::on_grid(const GridSpec& g) const {
  ProblemSpec out = *this;
  out.grid = g;
  out.validate();
  return out;
}

ProblemSpec ProblemSpec::choquard(const GridSpec& grid, Lagrangian j) {
  ProblemSpec p;
  p.family = Family::choquard;
  p.grid = grid;
  p.lagrangians = {std::move(j)};
  p.nonlinearity = make_nonlinearity("F_zero");
  p.constraint = make_constraint("G_square");
  p.kinetic_prefactor = 1.0;
  p.validate();
  return p;
}

ProblemSpec ProblemSpec::quasilinear(const GridSpec& grid, std::vector<Lagrangian> j,
                                     Nonlinearity F, Constraint G) {
  ProblemSpec p;
  p.family = Family::quasilinear;
  p.grid = grid;
  p.lagrangians = std::move(j);
  p.nonlinearity = std::move(F);
  p.constraint = std::move(G);
  p.kinetic_prefactor = 1.0;
  p.validate();
  return p;
}

ProblemSpec ProblemSpec::stuart(const GridSpec& grid, Nonlinearity F) {
  ProblemSpec p;
  p.family = Family::stuart;
  p.grid = grid;
  p.lagrangians = {make_lagrangian("j_quadratic")};
  p.nonlinearity = std::move(F);
  p.constraint = make_constraint("G_square");
  p.kinetic_prefactor = 0.5;
  p.validate();
  return p;
}

ProblemSpec ProblemSpec::badiale_rolando(const GridSpec& grid, double mu, Nonlinearity F) {
  ProblemSpec p;
  p.family = Family::badiale_rolando;
  p.grid = grid;
  p.lagrangians = {make_lagrangian("j_quadratic")};
  p.nonlinearity = std::move(F);
  p.constraint = make_constraint("G_square");
  p.mu = mu;
  p.kinetic_prefactor = 0.5;
  p.validate();
  return p;
}

// ---------------------------------------------------------------- evaluation

namespace {

inline double at(std::span<const double> v, std::size_t i) { return i == kGhost ? 0.0 : v[i]; }

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

void check_problem_field(const ProblemSpec& p, const Field& u, const char* what) {
  if (!(u.grid().spec() == p.grid)) {
    throw GridMismatch(std::string(what) + ": field grid " + u.grid().spec().describe() +
                       " does not match problem grid " + p.grid.describe());
  }
  if (u.components() != p.components()) {
    throw GridMismatch(std::string(what) + ": component count mismatch");
  }
}

// F is evaluated at |x|; cylindrical problems use an autonomous F.
std::span<const double> f_radius(const Grid& g, std::vector<double>& zeros) {
  if (g.kind() != GridKind::cylindrical) return g.radius();
  zeros.assign(g.size(), 0.0);
  return zeros;
}

double kinetic_term(const Lagrangian& L, const Grid& g, std::span<const double> v) {
  double s = 0.0;
  if (L.quadratic_coefficient) {
    for (const Edge& e : g.edges()) {
      const double d = (at(v, e.hi) - at(v, e.lo)) / e.h;
      s += e.weight * d * d;
    }
    return *L.quadratic_coefficient * s;
  }
  for (const Edge& e : g.edges()) {
    const double a = at(v, e.lo), b = at(v, e.hi);
    s += e.weight * L.j(0.5 * (a + b), std::abs(b - a) / e.h);
  }
  return s;
}

}  // namespace

double constraint_value(const ProblemSpec& p, const Field& u) {
  check_problem_field(p, u, "constraint_value");
  const auto w = u.grid().weights();
  double s = 0.0;
  for (std::size_t k = 0; k < u.components(); ++k) {
    const auto v = u.component(k);
    for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * p.constraint.G(v[i]);
  }
  return s;
}

Field constraint_gradient(const ProblemSpec& p, const Field& u) {
  check_problem_field(p, u, "constraint_gradient");
  if (!p.constraint.dG) throw InvalidArgument("constraint_gradient: constraint has no derivative");
  Field out(u.grid_ptr(), u.components());
  for (std::size_t k = 0; k < u.components(); ++k) {
    const auto v = u.component(k);
    auto o = out.component(k);
    for (std::size_t i = 0; i < v.size(); ++i) o[i] = p.constraint.dG(v[i]);
  }
  return out;
}

EnergyBreakdown total_energy(const ProblemSpec& p, const Field& u) {
  check_problem_field(p, u, "total_energy");
  const Grid& g = u.grid();
  const auto w = g.weights();
  const std::size_t m = u.components();
  EnergyBreakdown e;
  for (std::size_t k = 0; k < m; ++k) e.j_term += kinetic_term(p.lagrangians[k], g, u.component(k));

  if (!p.nonlinearity.is_zero()) {
    std::vector<double> zeros;
    const auto r = f_radius(g, zeros);
    std::vector<double> s(m);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t k = 0; k < m; ++k) s[k] = u(k, i);
      e.f_term += w[i] * p.nonlinearity.F(r[i], s);
    }
  }
  if (p.mu > 0.0) {
    const auto y = g.axis_distance();
    double h = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < g.size(); ++i) h += w[i] * u(k, i) * u(k, i) / (y[i] * y[i]);
    }
    e.hardy_term = 0.5 * p.mu * h;
  }
  if (p.family == Family::choquard) e.coulomb_term = coulomb_energy(u);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) e.constraint_value += w[i] * p.constraint.G(u(k, i));
  }
  e.total = p.kinetic_prefactor * e.j_term + e.hardy_term - e.f_term - e.coulomb_term;
  if (!std::isfinite(e.total) || !std::isfinite(e.constraint_value)) {
    throw NonFiniteValue("total_energy: non-finite energy (blow-up)");
  }
  return e;
}

Field energy_gradient(const ProblemSpec& p, const Field& u) {
  check_problem_field(p, u, "energy_gradient");
  for (const Lagrangian& L : p.lagrangians) {
    if (!L.quadratic_coefficient && !L.has_partials()) {
      throw InvalidArgument("energy_gradient: Lagrangian '" + L.name + "' has no partials");
    }
  }
  if (!p.nonlinearity.is_zero() && !p.nonlinearity.has_partials()) {
    throw InvalidArgument("energy_gradient: nonlinearity '" + p.nonlinearity.name +
                          "' has no partials");
  }
  const Grid& g = u.grid();
  const auto w = g.weights();
  const std::size_t m = u.components();
  const std::size_t n = g.size();
  Field grad(u.grid_ptr(), m);

  for (std::size_t k = 0; k < m; ++k) {
    const Lagrangian& L = p.lagrangians[k];
    const auto v = u.component(k);
    auto o = grad.component(k);
    for (const Edge& e : g.edges()) {
      const double a = at(v, e.lo), b = at(v, e.hi);
      const double d = (b - a) / e.h;
      double ds, dd;  // derivative of the link integrand w.r.t. its mean and its slope
      if (L.quadratic_coefficient) {
        ds = 0.0;
        dd = 2.0 * *L.quadratic_coefficient * d;
      } else {
        const double s = 0.5 * (a + b), t = std::abs(d);
        ds = L.j_s(s, t);
        dd = L.j_t(s, t) * sgn(d);
      }
      const double c = p.kinetic_prefactor * e.weight;
      if (e.lo != kGhost) o[e.lo] += c * (0.5 * ds - dd / e.h);
      if (e.hi != kGhost) o[e.hi] += c * (0.5 * ds + dd / e.h);
    }
    for (std::size_t i = 0; i < n; ++i) o[i] /= w[i];
  }

  if (!p.nonlinearity.is_zero()) {
    std::vector<double> zeros;
    const auto r = f_radius(g, zeros);
    std::vector<double> s(m), f(m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < m; ++k) s[k] = u(k, i);
      p.nonlinearity.f(r[i], s, f);
      for (std::size_t k = 0; k < m; ++k) grad(k, i) -= f[k];
    }
  }
  if (p.mu > 0.0) {
    const auto y = g.axis_distance();
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < n; ++i) grad(k, i) += p.mu * u(k, i) / (y[i] * y[i]);
    }
  }
  if (p.family == Family::choquard) {
    const Field phi = coulomb_potential(u);
    for (std::size_t i = 0; i < n; ++i) grad(0, i) -= 4.0 * phi(0, i) * u(0, i);
  }
  grad.check_finite("energy_gradient");
  return grad;
}

double residual_norm(const ProblemSpec& p, const Field& u, double beta) {
  const double norm = std::sqrt(l2_norm_sq(u));
  if (norm == 0.0) throw InvalidArgument("residual_norm: u is identically zero");
  Field r = energy_gradient(p, u);
  r.axpy(-beta, u);
  return std::sqrt(l2_norm_sq(r)) / norm;
}

// ---------------------------------------------------------------- structural checks

namespace {

bool below(double lhs, double rhs, double scale) { return lhs <= rhs + 1e-12 * (1.0 + scale); }

std::string fmt(const char* tag, std::initializer_list<double> xs) {
  std::ostringstream os;
  os.precision(6);
  os << tag;
  for (double x : xs) os << ' ' << x;
  return os.str();
}

// cartesian product of s_values over m coordinates
std::vector<std::vector<double>> s_points(const std::vector<double>& vals, std::size_t m) {
  std::vector<std::vector<double>> pts{{}};
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<std::vector<double>> next;
    for (const auto& p : pts) {
      for (double v : vals) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    }
    pts = std::move(next);
  }
  return pts;
}

}  // namespace

CouplingReport validate_coupling(const Nonlinearity& Fn, const SampleBox& box) {
  CouplingReport rep;
  if (Fn.is_zero()) return rep;
  const std::size_t m = Fn.components;
  const auto pts = s_points(box.s_values, m);
  auto F = [&](double r, const std::vector<double>& s) { return Fn.F(r, s); };
  for (double r : box.r_values) {
    for (const auto& s : pts) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          if (i == j) continue;
          for (double h : box.increments) {
            for (double k : box.increments) {
              auto sh = s, sk = s, shk = s;
              sh[i] += h;
              sk[j] += k;
              shk[i] += h;
              shk[j] += k;
              const double a = F(r, shk), b = F(r, s), c = F(r, sh), d = F(r, sk);
              const double defect = a + b - c - d;
              ++rep.samples;
              if (!below(0.0, defect, std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d))) {
                rep.violations.push_back({"supermod1", r, 0.0, s, i, j, h, k, defect});
              }
            }
          }
        }
      }
    }
  }
  for (std::size_t a0 = 0; a0 < box.r_values.size(); ++a0) {
    for (std::size_t a1 = 0; a1 < box.r_values.size(); ++a1) {
      const double r0 = box.r_values[a0], r1 = box.r_values[a1];
      if (!(r0 < r1)) continue;
      for (const auto& s : pts) {
        for (std::size_t i = 0; i < m; ++i) {
          for (double h : box.increments) {
            auto sh = s;
            sh[i] += h;
            const double lhs1 = F(r1, sh), lhs0 = F(r0, s);
            const double rhs1 = F(r1, s), rhs0 = F(r0, sh);
            const double defect = rhs1 + rhs0 - lhs1 - lhs0;
            ++rep.samples;
            if (!below(0.0, defect,
                       std::abs(lhs1) + std::abs(lhs0) + std::abs(rhs1) + std::abs(rhs0))) {
              rep.violations.push_back({"supermod2", r0, r1, s, i, 0, h, 0.0, defect});
            }
          }
        }
      }
    }
  }
  return rep;
}

StructureReport validate_lagrangian(const Lagrangian& L, const SampleBox& box) {
  StructureReport rep;
  const std::vector<double> ts{0.0, 1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> ss;
  for (double s : box.s_values) {
    ss.push_back(s);
    if (s != 0.0) ss.push_back(-s);
  }
  for (double s : ss) {
    for (std::size_t a = 0; a < ts.size(); ++a) {
      const double t = ts[a];
      const double v = L.j(s, t);
      ++rep.samples;
      if (!below(L.nu * std::pow(t, L.p), v, std::abs(v))) {
        rep.violations.push_back(fmt("coercivity s,t:", {s, t}));
      }
      if (s < 0.0 && !below(L.j(-s, t), v, std::abs(v))) {
        rep.violations.push_back(fmt("sign-symmetry s,t:", {s, t}));
      }
      for (std::size_t b = a + 1; b < ts.size(); ++b) {
        const double t2 = ts[b];
        const double v2 = L.j(s, t2);
        if (!below(v, v2, std::abs(v2))) rep.violations.push_back(fmt("monotonicity s,t1,t2:", {s, t, t2}));
        const double mid = L.j(s, 0.5 * (t + t2));
        if (!below(mid, 0.5 * (v + v2), std::abs(v) + std::abs(v2))) {
          rep.violations.push_back(fmt("midpoint-convexity s,t1,t2:", {s, t, t2}));
        }
      }
    }
  }
  return rep;
}

StructureReport validate_nonlinearity(const Nonlinearity& Fn, const SampleBox& box) {
  StructureReport rep;
  if (Fn.is_zero()) return rep;
  const std::size_t m = Fn.components;
  std::vector<double> signed_vals;
  for (double s : box.s_values) {
    signed_vals.push_back(s);
    if (s != 0.0) signed_vals.push_back(-s);
  }
  const auto pts = s_points(signed_vals, m);
  for (double r : box.r_values) {
    const std::vector<double> zero(m, 0.0);
    ++rep.samples;
    if (Fn.F(r, zero) != 0.0) rep.violations.push_back(fmt("F(r,0) != 0 at r:", {r}));
    for (const auto& s : pts) {
      auto a = s;
      for (double& x : a) x = std::abs(x);
      const double fs = Fn.F(r, s), fa = Fn.F(r, a);
      ++rep.samples;
      if (!below(fs, fa, std::abs(fs) + std::abs(fa))) {
        rep.violations.push_back(fmt("F(r,s) > F(r,|s|) at r,s0:", {r, s[0]}));
      }
    }
  }
  return rep;
}

StructureReport validate_constraint(const Constraint& G, const SampleBox& box) {
  StructureReport rep;
  ++rep.samples;
  if (G.G(0.0) != 0.0) rep.violations.emplace_back("G(0) != 0");
  for (double s : box.s_values) {
    for (double x : {s, -s}) {
      ++rep.samples;
      const double v = G.G(x);
      if (!below(G.gamma * std::pow(std::abs(x), G.p), v, std::abs(v))) {
        rep.violations.push_back(fmt("G(s) < gamma|s|^p at s:", {x}));
      }
    }
  }
  return rep;
}

}  // namespace ccmin
