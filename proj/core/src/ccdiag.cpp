#include "ccmin/ccdiag.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

#include "ccmin/error.hpp"
#include "ccmin/field_io.hpp"

namespace ccmin {

bool MCCurve::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; });
}

void MCCurve::validate() const {
  const std::size_t n = c_values.size();
  if (m_values.size() != n || betas.size() != n || iterations.size() != n || converged.size() != n) {
    throw InvalidArgument("MCCurve: column lengths differ");
  }
  if (!minimizers.empty() && minimizers.size() != n) {
    throw InvalidArgument("MCCurve: minimizer count differs from the number of points");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c_values[i] > 0.0) || !std::isfinite(c_values[i])) {
      throw InvalidArgument("MCCurve: c values must be positive and finite");
    }
    if (i > 0 && !(c_values[i] > c_values[i - 1])) {
      throw InvalidArgument("MCCurve: c values must be strictly increasing");
    }
    if (!std::isfinite(m_values[i])) throw NonFiniteValue("MCCurve: non-finite m value");
  }
}

std::optional<double> MCCurve::value_at(double c) const {
  if (c < 0.0 || c_values.empty()) return std::nullopt;
  if (c > c_values.back() * (1.0 + 1e-12)) return std::nullopt;
  double c0 = 0.0, m0 = 0.0;
  for (std::size_t i = 0; i < c_values.size(); ++i) {
    if (c <= c_values[i]) {
      if (c == c_values[i]) return m_values[i];
      const double s = (c - c0) / (c_values[i] - c0);
      return m0 + s * (m_values[i] - m0);
    }
    c0 = c_values[i];
    m0 = m_values[i];
  }
  return m_values.back();
}

MCCurve MCCurve::from_values(std::vector<double> c, std::vector<double> m) {
  MCCurve out;
  const std::size_t n = c.size();
  out.c_values = std::move(c);
  out.m_values = std::move(m);
  out.betas.assign(n, 0.0);
  out.iterations.assign(n, 0);
  out.converged.assign(n, true);
  out.validate();
  return out;
}

namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body body) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

MCCurve scan_mass_curve(const ProblemSpec& p, const std::vector<double>& c_list, const SolveConfig& cfg,
                        std::size_t threads, bool keep_minimizers) {
  if (c_list.empty()) throw InvalidArgument("scan_mass_curve: c_list is empty");
  for (std::size_t i = 0; i < c_list.size(); ++i) {
    if (!(c_list[i] > 0.0) || !std::isfinite(c_list[i])) {
      throw InvalidArgument("scan_mass_curve: c values must be positive");
    }
    if (i > 0 && !(c_list[i] > c_list[i - 1])) {
      throw InvalidArgument("scan_mass_curve: c values must be strictly ascending");
    }
  }
  cfg.validate();
  p.validate();

  MCCurve curve;
  std::optional<Field> previous;
  constexpr std::size_t kStarts = 3;
  for (double c : c_list) {
    std::vector<std::optional<SolveResult>> results(kStarts);
    std::vector<std::exception_ptr> errors(kStarts);
    parallel_for(kStarts, threads, [&](std::size_t k) {
      try {
        SolveConfig local = cfg;
        local.seed = cfg.seed + k;
        if (k == 0 && previous) {
          results[k] = minimize_constrained(p, c, local, previous);
        } else {
          results[k] = minimize_constrained(p, c, local);
        }
      } catch (const Error&) {
        errors[k] = std::current_exception();
      }
    });
    std::size_t best = kStarts;
    for (std::size_t k = 0; k < kStarts; ++k) {
      if (!results[k]) continue;
      if (best == kStarts) {
        best = k;
        continue;
      }
      const SolveResult& a = *results[k];
      const SolveResult& b = *results[best];
      if ((a.converged && !b.converged) || (a.converged == b.converged && a.m_value < b.m_value)) best = k;
    }
    if (best == kStarts) std::rethrow_exception(errors.front());
    SolveResult& r = *results[best];
    curve.c_values.push_back(c);
    curve.m_values.push_back(r.m_value);
    curve.betas.push_back(r.beta);
    curve.iterations.push_back(r.iterations);
    curve.converged.push_back(r.converged);
    curve.notes.push_back(r.note);
    previous = r.minimizer;
    if (keep_minimizers) curve.minimizers.push_back(std::move(r.minimizer));
  }
  return curve;
}

void write_mass_curve_csv(std::ostream& os, const MCCurve& curve) {
  os << "c,m,beta,iters,converged\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    os << format_number(curve.c_values[i]) << ',' << format_number(curve.m_values[i]) << ','
       << format_number(curve.betas[i]) << ',' << curve.iterations[i] << ','
       << (curve.converged[i] ? 1 : 0) << '\n';
  }
}

MCCurve read_mass_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "c,m,beta,iters,converged") {
    throw InvalidArgument("mass curve CSV: missing header 'c,m,beta,iters,converged'");
  }
  MCCurve curve;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) {
      throw InvalidArgument("mass curve CSV: row " + std::to_string(row) + " needs 5 columns");
    }
    try {
      curve.c_values.push_back(std::stod(cells[0]));
      curve.m_values.push_back(std::stod(cells[1]));
      curve.betas.push_back(std::stod(cells[2]));
      curve.iterations.push_back(std::stoull(cells[3]));
      curve.converged.push_back(std::stoi(cells[4]) != 0);
    } catch (const std::logic_error&) {
      throw InvalidArgument("mass curve CSV: unparsable number in row " + std::to_string(row));
    }
  }
  curve.validate();
  return curve;
}

double default_tolerance(const MCCurve& curve) {
  double m = 0.0;
  for (double v : curve.m_values) m = std::max(m, std::abs(v));
  return 1e-6 * m;
}

void CCReport::merge(const CCReport& other) {
  if (other.monotone) monotone = other.monotone;
  if (other.subadditivity) subadditivity = other.subadditivity;
  if (!other.notes.empty()) notes += (notes.empty() ? "" : "; ") + other.notes;
}

CCReport check_monotone(const MCCurve& curve, double tol) {
  curve.validate();
  if (curve.size() < 2) throw InvalidArgument("check_monotone: curve needs at least two points");
  MonotoneCheck m;
  m.tol = tol;
  m.defect = -std::numeric_limits<double>::infinity();
  // same (c, lambda) visiting order as check_subadditivity so ties resolve identically
  for (std::size_t j = 1; j < curve.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double d = curve.m_values[j] - curve.m_values[i];
      if (d > m.defect) {
        m.defect = d;
        m.c1 = curve.c_values[i];
        m.c2 = curve.c_values[j];
      }
    }
  }
  m.monotone = m.defect <= tol;
  CCReport r;
  r.monotone = m;
  return r;
}

CCReport check_subadditivity(const MCCurve& curve, const std::optional<MCCurve>& m_inf, double tol) {
  curve.validate();
  if (m_inf) m_inf->validate();
  auto minf = [&](double x) -> std::optional<double> {
    if (!m_inf) return 0.0;
    return m_inf->value_at(x);
  };
  SubadditivityCheck s;
  s.tol = tol;
  s.defect = -std::numeric_limits<double>::infinity();
  s.endpoint_defect = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < curve.size(); ++j) {
    const double c = curve.c_values[j];
    if (const auto e = minf(c)) {
      const double d = curve.m_values[j] - *e;
      if (d > s.endpoint_defect) {
        s.endpoint_defect = d;
        s.endpoint_c = c;
      }
    }
    for (std::size_t i = 0; i < j; ++i) {
      const auto tail = minf(c - curve.c_values[i]);
      if (!tail) continue;
      ++s.pairs;
      const double d = curve.m_values[j] - curve.m_values[i] - *tail;
      if (d > s.defect) {
        s.defect = d;
        s.c = c;
        s.lambda = curve.c_values[i];
      }
    }
  }
  CCReport r;
  if (s.pairs == 0) {
    s.defect = s.endpoint_defect;
    s.c = s.endpoint_c;
    s.lambda = 0.0;
    r.notes = "no interior pairs; margins come from the lambda = 0 endpoint";
  }
  s.strict_margin = -s.defect;
  s.subadditive = s.defect <= tol;
  s.endpoint_ok = s.endpoint_defect <= tol;
  r.subadditivity = s;
  return r;
}

void write_cc_report(std::ostream& os, const CCReport& report) {
  auto flag = [](bool b) { return b ? "true" : "false"; };
  if (report.monotone) {
    const MonotoneCheck& m = *report.monotone;
    os << "monotone=" << flag(m.monotone) << '\n'
       << "monotone_worst_c1=" << format_number(m.c1) << '\n'
       << "monotone_worst_c2=" << format_number(m.c2) << '\n'
       << "monotone_worst_defect=" << format_number(m.defect) << '\n'
       << "monotone_tol=" << format_number(m.tol) << '\n';
  }
  if (report.subadditivity) {
    const SubadditivityCheck& s = *report.subadditivity;
    os << "subadditive=" << flag(s.subadditive) << '\n'
       << "subadditive_worst_c=" << format_number(s.c) << '\n'
       << "subadditive_worst_lambda=" << format_number(s.lambda) << '\n'
       << "subadditive_worst_defect=" << format_number(s.defect) << '\n'
       << "subadditive_pairs=" << s.pairs << '\n'
       << "strict_margin=" << format_number(s.strict_margin) << '\n'
       << "endpoint_ok=" << flag(s.endpoint_ok) << '\n'
       << "endpoint_worst_c=" << format_number(s.endpoint_c) << '\n'
       << "endpoint_worst_defect=" << format_number(s.endpoint_defect) << '\n'
       << "subadditive_tol=" << format_number(s.tol) << '\n';
  }
  os << "notes=" << report.notes << '\n';
}

HomogeneityReport homogeneity_bound_check(const MCCurve& curve, double alpha, double tol) {
  curve.validate();
  if (!(alpha >= 1.0)) throw InvalidArgument("homogeneity_bound_check: alpha must be >= 1");
  if (curve.size() < 2) {
    throw InvalidArgument("homogeneity_bound_check: no comparable pairs (need two curve points)");
  }
  HomogeneityReport rep;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    for (std::size_t j = i; j < curve.size(); ++j) {
      const double lambda = curve.c_values[j] / curve.c_values[i];
      const double lhs = curve.m_values[j];
      const double rhs = std::pow(lambda, alpha) * curve.m_values[i];
      ++rep.pairs;
      if (lhs > rhs + tol) rep.violations.push_back({curve.c_values[i], lambda, lhs, rhs, lhs - rhs});
    }
  }
  return rep;
}

namespace {

void finish_certificate(Certificate& cert) {
  cert.value = std::numeric_limits<double>::infinity();
  for (const CertificateRow& r : cert.rows) {
    if (r.exact < cert.value) {
      cert.value = r.exact;
      cert.best_param = r.param;
    }
  }
  cert.success = cert.value < 0.0;
  cert.max_constraint_deviation = 0.0;
  for (double d : cert.constraint_deviation) {
    cert.max_constraint_deviation = std::max(cert.max_constraint_deviation, d);
  }
}

void check_grid_params(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw InvalidArgument(std::string(what) + ": parameter grid is empty");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(what) + ": parameter values must be positive");
    }
  }
}

}  // namespace

Certificate certificate_choquard(const ProblemSpec& p, double c, const Field& w_seed,
                                 const std::vector<double>& t_grid) {
  if (p.family != Family::choquard) throw InvalidArgument("certificate_choquard: needs the choquard family");
  check_grid_params(t_grid, "certificate_choquard");
  p.validate();
  if (!(w_seed.grid().spec() == p.grid)) {
    throw GridMismatch("certificate_choquard: seed does not live on the problem grid");
  }
  const double mass = l2_norm_sq(w_seed);
  if (std::abs(mass - c) > 1e-8 * c) {
    throw PreconditionViolated("certificate_choquard: seed must satisfy ||w||_2^2 = c");
  }
  const double C = p.lagrangians.front().growth_C;
  const double six = std::pow(lp_norm(w_seed, 6.0), 6.0);
  const double grad = dirichlet_integral(w_seed);
  const double D = coulomb_energy(w_seed);
  Certificate cert;
  for (double t : t_grid) {
    const GridPtr g = compatible_grid(w_seed.grid(), t, ResampleMode::mass_preserving);
    const Field wt = resample(w_seed, t, ResampleMode::mass_preserving, g);
    const ProblemSpec pt = p.on_grid(g->spec());
    const EnergyBreakdown e = total_energy(pt, wt);
    const double bound =
        p.kinetic_prefactor * (C * std::pow(t, 6.0) * six + C * t * t * grad) - t * D;
    cert.rows.push_back({t, e.total, bound});
    cert.constraint_deviation.push_back(std::abs(e.constraint_value - c) / c);
  }
  finish_certificate(cert);
  if (!cert.success) cert.note = "no negative energy on the sampled t grid";
  return cert;
}

Certificate certificate_quasilinear(const ProblemSpec& p, const std::vector<double>& theta_grid) {
  check_grid_params(theta_grid, "certificate_quasilinear");
  p.validate();
  if (!p.constraint.homogeneous) {
    throw InvalidArgument("certificate_quasilinear: constraint '" + p.constraint.name +
                          "' is not p-homogeneous");
  }
  const double pe = p.constraint.p;
  const int N = p.space_dimension();
  const GridPtr base = Grid::make(p.grid);
  const Field e = Field::from_radial(base, [pe](double r) { return std::exp(-std::pow(std::abs(r), pe)); }, 1);
  double d = 0.0;
  {
    const auto w = base->weights();
    for (std::size_t i = 0; i < base->size(); ++i) d += w[i] * p.constraint.G(e(0, i));
  }
  const auto& lb = p.nonlinearity.zero_cv_bis;
  const double coerc = p.lagrangians.front().coerc_beta;
  Certificate cert;
  for (double theta : theta_grid) {
    // Upsilon^theta(x) = theta^{N/p^2} Upsilon^1(theta^{1/p} x): exact on the grid scaled by theta^{-1/p}
    const GridPtr g = Grid::make(p.grid.scaled(std::pow(theta, -1.0 / pe)));
    const double amp = std::pow(theta, N / (pe * pe)) / std::pow(d, 1.0 / pe);
    Field u(g, p.components());
    for (std::size_t i = 0; i < g->size(); ++i) u(0, i) = amp * e(0, i);
    const ProblemSpec pt = p.on_grid(g->spec());
    const EnergyBreakdown en = total_energy(pt, u);
    double bound = std::numeric_limits<double>::quiet_NaN();
    if (lb) {
      double kin = 0.0;
      for (const Edge& ed : g->edges()) {
        const double lo = ed.lo == kGhost ? 0.0 : u(0, ed.lo);
        const double hi = ed.hi == kGhost ? 0.0 : u(0, ed.hi);
        kin += ed.weight * std::pow(std::abs(hi - lo) / ed.h, p.lagrangians.front().p);
      }
      double low = 0.0;
      const auto w = g->weights();
      const auto r = g->radius();
      for (std::size_t i = 0; i < g->size(); ++i) {
        if (r[i] >= lb->r0 && u(0, i) <= lb->delta) {
          low += w[i] * std::pow(r[i], -lb->tau) * std::pow(u(0, i), lb->p + lb->sigma);
        }
      }
      bound = p.kinetic_prefactor * coerc * kin - lb->mu_F * low;
    }
    cert.rows.push_back({theta, en.total, bound});
    cert.constraint_deviation.push_back(std::abs(en.constraint_value - 1.0));
  }
  finish_certificate(cert);
  if (!cert.success) cert.note = "minimum over the theta grid is nonnegative";
  return cert;
}

void write_certificate_csv(std::ostream& os, const Certificate& cert) {
  os << "param,exact,bound\n";
  for (const CertificateRow& r : cert.rows) {
    os << format_number(r.param) << ',' << format_number(r.exact) << ',' << format_number(r.bound) << '\n';
  }
}

Rho0Result estimate_rho0(const ProblemSpec& p, std::pair<double, double> bracket, const SolveConfig& cfg,
                         double tol, double rel_width) {
  if (p.family != Family::badiale_rolando) {
    throw InvalidArgument("estimate_rho0: needs the badiale_rolando family");
  }
  auto [lo, hi] = bracket;
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidArgument("estimate_rho0: bracket must satisfy 0 < lo < hi");
  if (!(rel_width > 0.0)) throw InvalidArgument("estimate_rho0: rel_width must be positive");
  Rho0Result res;
  std::optional<Field> warm;
  auto m_of = [&](double rho) {
    SolveConfig local = cfg;
    local.record_trace = false;
    SolveResult s = minimize_constrained(p, rho, local, warm);
    // a warm start can sit in a worse basin; keep the better of warm and cold
    if (warm) {
      SolveResult cold = minimize_constrained(p, rho, local);
      if ((cold.converged && !s.converged) || (cold.converged == s.converged && cold.m_value < s.m_value)) {
        s = std::move(cold);
      }
    }
    res.evaluations.push_back({rho, s.m_value, s.converged});
    res.all_converged = res.all_converged && s.converged;
    // the negative branch is the concentrated one; keep it as the warm start
    if (s.m_value < -tol) warm = s.minimizer;
    return s.m_value;
  };
  const double m_hi = m_of(hi);
  if (!(m_hi < -tol)) {
    throw PreconditionViolated("estimate_rho0: m is not negative at the right bracket end (no sign change)");
  }
  const double m_lo = m_of(lo);
  if (!(m_lo >= -tol)) {
    throw PreconditionViolated("estimate_rho0: m is already negative at the left bracket end (no sign change)");
  }
  while ((hi - lo) / hi > rel_width) {
    const double mid = 0.5 * (lo + hi);
    (m_of(mid) < -tol ? hi : lo) = mid;
  }
  res.lo = lo;
  res.hi = hi;
  res.rho0 = 0.5 * (lo + hi);
  res.m_at_2rho0 = m_of(2.0 * res.rho0);
  res.verified = res.m_at_2rho0 < -tol;
  return res;
}

DecayReport decay_check(const Field& u, int N, double p) {
  const Grid& g = u.grid();
  if (g.kind() == GridKind::cylindrical) throw GridMismatch("decay_check: needs a radial or line grid");
  if (N < 1 || !(p > 0.0)) throw InvalidArgument("decay_check: N >= 1 and p > 0 required");
  const auto r = g.radius();
  const auto v = u.component(0);
  const double scale = u.max_abs();
  const double slack = 1e-12 * scale;
  // nodes sorted by |x| (line grids visit both halves)
  std::vector<std::size_t> order(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
  for (std::size_t q = 0; q < order.size(); ++q) {
    if (v[order[q]] < -slack) throw PreconditionViolated("decay_check: u must be nonnegative");
    if (q > 0 && r[order[q]] > r[order[q - 1]] && v[order[q]] > v[order[q - 1]] + slack) {
      throw PreconditionViolated("decay_check: u must be non-increasing in |x|");
    }
  }
  DecayReport rep;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double val = std::pow(r[i], N / p) * std::max(v[i], 0.0);
    if (val > rep.M) {
      rep.M = val;
      arg = i;
    }
  }
  rep.r_max = r[arg];
  const double r_out = r[order.back()];
  rep.interior = rep.M > 0.0 && r[arg] < r_out;
  // tail consistency: int_{|x|>R} u^p <= M^p int_{|x|>R} r^{-N}
  const auto w = g.weights();
  double tail_u = 0.0, tail_b = 0.0;
  for (std::size_t q = order.size(); q-- > 0;) {
    const std::size_t i = order[q];
    tail_u += w[i] * std::pow(std::max(v[i], 0.0), p);
    tail_b += w[i] * std::pow(rep.M, p) * std::pow(r[i], -static_cast<double>(N));
    if (tail_u > tail_b * (1.0 + 1e-12) + 1e-300) rep.tail_consistent = false;
  }
  return rep;
}

double sharp_hls_constant() { return 4.0 / 3.0 * std::cbrt(16.0 / std::numbers::pi); }

AuditReport inequality_audit(const Field& u) {
  const Grid& g = u.grid();
  if (g.kind() != GridKind::radial || g.dimension() != 3 || u.components() != 1) {
    throw GridMismatch("inequality_audit: needs a single field on a radial(3) grid");
  }
  const double l2sq = l2_norm_sq(u);
  if (!(l2sq > 0.0)) throw InvalidArgument("inequality_audit: u is identically zero");
  const double l125 = lp_norm(u, 12.0 / 5.0);
  const double l2 = std::sqrt(l2sq);
  const double grad_sq = dirichlet_integral(u);
  const double h1 = std::sqrt(l2sq + grad_sq);
  const double l103 = lp_norm(u, 10.0 / 3.0);
  AuditReport rep;
  rep.q1 = coulomb_energy(u) / std::pow(l125, 4.0);
  rep.q2 = std::pow(l125, 4.0) / (l2 * l2 * l2 * h1);
  rep.q3 = std::pow(l103, 10.0 / 3.0) / (std::pow(l2, 4.0 / 3.0) * grad_sq);
  rep.hls_constant = sharp_hls_constant();
  rep.q1_within_hls = rep.q1 <= rep.hls_constant;
  return rep;
}

double tail_mass(const Field& u, double R) {
  const Grid& g = u.grid();
  const auto r = g.radius();
  const auto w = g.weights();
  double s = 0.0;
  for (std::size_t k = 0; k < u.components(); ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (r[i] > R) s += w[i] * u(k, i) * u(k, i);
    }
  }
  return s;
}

}  // namespace ccmin
