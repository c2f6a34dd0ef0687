#include "ccmin/solve.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <deque>
#include <numbers>
#include <ostream>
#include <random>

#include "ccmin/error.hpp"
#include "ccmin/field_io.hpp"
#include "ccmin/rearrange.hpp"

namespace ccmin {

void SolveConfig::validate() const {
  if (max_iters == 0) throw InvalidArgument("solver: max_iters must be positive");
  if (!(step0 > 0.0)) throw InvalidArgument("solver: step0 must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidArgument("solver: backtrack must lie in (0,1)");
  if (!(stall_tol > 0.0)) throw InvalidArgument("solver: stall_tol must be positive");
  if (!(grad_tol > 0.0)) throw InvalidArgument("solver: grad_tol must be positive");
  if (!(armijo > 0.0 && armijo < 1.0)) throw InvalidArgument("solver: armijo must lie in (0,1)");
}

Field initial_guess(const ProblemSpec& p, double c, std::uint64_t seed) {
  auto grid = Grid::make(p.grid);
  const double extent = p.grid.kind == GridKind::cylindrical ? std::min(p.grid.extent, p.grid.extent2)
                                                             : p.grid.extent;
  const double sigma0 = extent / 8.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> width(0.6, 1.4), phase(0.0, 2.0 * std::numbers::pi);
  Field u(grid, p.components());
  const auto r = grid->radius();
  for (std::size_t k = 0; k < p.components(); ++k) {
    double sigma = sigma0, ph = 0.0, amp = 0.0;
    if (seed != 0) {
      sigma *= width(rng);
      ph = phase(rng);
      amp = 0.2;
    }
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double x = r[i] / sigma;
      u(k, i) = std::exp(-0.5 * x * x) * (1.0 + amp * std::cos(ph + x));
    }
  }
  return project_to_constraint(p, u, c);
}

Field project_to_constraint(const ProblemSpec& p, const Field& u, double c) {
  if (!(c > 0.0)) throw InvalidArgument("projection: constraint level must be positive");
  const double val = constraint_value(p, u);
  if (!(val > 0.0)) throw InvalidArgument("projection: cannot rescale the zero field");
  Field out = u;
  if (p.constraint.homogeneous) {
    out *= std::pow(c / val, 1.0 / p.constraint.p);
    return out;
  }
  // G >= gamma |s|^p makes rho -> G(rho u) unbounded, so a bracket exists
  auto at = [&](double rho) {
    Field v = u;
    v *= rho;
    return constraint_value(p, v);
  };
  double lo = 0.0, hi = 1.0;
  while (at(hi) < c) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (at(mid) < c ? lo : hi) = mid;
  }
  out *= 0.5 * (lo + hi);
  return out;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// H^1-type metric: node mass + twice the kinetic stiffness + Hardy diagonal.
class Preconditioner {
 public:
  explicit Preconditioner(const ProblemSpec& p, const Grid& g) : n_(g.size()) {
    const auto w = g.weights();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n_ + 4 * g.edges().size());
    const auto y = g.axis_distance();
    for (std::size_t i = 0; i < n_; ++i) {
      double d = w[i];
      if (p.mu > 0.0) d += p.mu * w[i] / (y[i] * y[i]);
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), d);
    }
    const double pref = 2.0 * p.kinetic_prefactor;
    for (const Edge& e : g.edges()) {
      const double k = pref * e.weight / (e.h * e.h);
      if (e.lo != kGhost) trip.emplace_back(static_cast<int>(e.lo), static_cast<int>(e.lo), k);
      if (e.hi != kGhost) trip.emplace_back(static_cast<int>(e.hi), static_cast<int>(e.hi), k);
      if (e.lo != kGhost && e.hi != kGhost) {
        trip.emplace_back(static_cast<int>(e.lo), static_cast<int>(e.hi), -k);
        trip.emplace_back(static_cast<int>(e.hi), static_cast<int>(e.lo), -k);
      }
    }
    SpMat P(static_cast<int>(n_), static_cast<int>(n_));
    P.setFromTriplets(trip.begin(), trip.end());
    ldlt_.compute(P);
    if (ldlt_.info() != Eigen::Success) throw Error("solver: preconditioner factorization failed");
  }

  // out_k = P^{-1} (W in_k) for each component; `in` is an L^2 gradient.
  Field apply(const Field& in) const {
    Field out(in.grid_ptr(), in.components());
    const auto w = in.grid().weights();
    Vec rhs(static_cast<int>(n_));
    for (std::size_t k = 0; k < in.components(); ++k) {
      const auto v = in.component(k);
      for (std::size_t i = 0; i < n_; ++i) rhs[static_cast<int>(i)] = w[i] * v[i];
      const Vec x = ldlt_.solve(rhs);
      auto o = out.component(k);
      for (std::size_t i = 0; i < n_; ++i) o[i] = x[static_cast<int>(i)];
    }
    return out;
  }

 private:
  std::size_t n_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

struct Residual {
  double value = 0.0;
  double threshold = 0.0;
};

// ||g - lambda G'||_w / ||u||_w with lambda the L^2-optimal multiplier.
Residual stationarity(const Field& u, const Field& g, const Field& dG, double grad_tol) {
  const double gg = inner(dG, dG);
  const double lam = gg > 0.0 ? inner(g, dG) / gg : 0.0;
  Field r = g;
  r.axpy(-lam, dG);
  const double un = std::sqrt(l2_norm_sq(u));
  Residual res;
  res.value = std::sqrt(l2_norm_sq(r)) / un;
  res.threshold = grad_tol * std::max(1.0, std::sqrt(l2_norm_sq(g)) / un);
  return res;
}

}  // namespace

SolveResult minimize_constrained(const ProblemSpec& p, double c, const SolveConfig& cfg,
                                 const std::optional<Field>& init) {
  cfg.validate();
  p.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("minimize_constrained: c must be positive");
  for (const Lagrangian& L : p.lagrangians) {
    if (!L.quadratic_coefficient && !L.has_partials()) {
      throw InvalidArgument("minimize_constrained: Lagrangian '" + L.name +
                            "' has no partials (evaluation-only)");
    }
  }
  auto grid = Grid::make(p.grid);
  Field u;
  if (init) {
    if (!(init->grid().spec() == p.grid) || init->components() != p.components()) {
      throw GridMismatch("minimize_constrained: initial field does not live on the problem grid");
    }
    u = project_to_constraint(p, Field(grid, init->components(),
                                       std::vector<double>(init->values().begin(), init->values().end())),
                              c);
  } else {
    u = initial_guess(p, c, cfg.seed);
  }
  u.check_finite("minimize_constrained: initial field");

  const Preconditioner P(p, *grid);
  const bool can_symmetrize = p.grid.kind != GridKind::cylindrical;

  SolveResult res;
  EnergyBreakdown E = total_energy(p, u);
  Field g = energy_gradient(p, u);
  double step = cfg.step0;
  std::deque<std::pair<double, double>> history;  // (energy, residual) of recent iterations
  if (cfg.record_trace) res.trace.push_back({0, E.total, std::abs(E.constraint_value - c) / c, 0.0});

  std::size_t it = 0;
  for (; it < cfg.max_iters; ++it) {
    const Field dG = constraint_gradient(p, u);
    const Residual rs = stationarity(u, g, dG, cfg.grad_tol);
    res.el_residual = rs.value;
    if (rs.value <= rs.threshold) {
      res.converged = true;
      break;
    }
    history.emplace_back(E.total, rs.value);
    if (history.size() > 11) history.pop_front();
    if (history.size() == 11) {
      const auto& [e_old, r_old] = history.front();
      if (std::abs(e_old - E.total) <= cfg.stall_tol * std::abs(E.total) && rs.value > 0.5 * r_old) {
        res.note = "stalled: energy change over 10 iterations below tolerance";
        break;
      }
    }

    // tangent direction in the preconditioned metric
    const Field a = P.apply(g);
    const Field b = P.apply(dG);
    const double lam = inner(dG, b) > 0.0 ? inner(dG, a) / inner(dG, b) : 0.0;
    Field d = a;
    d.axpy(-lam, b);
    const double slope = inner(g, d);

    bool accepted = false;
    double tau = step;
    Field trial;
    EnergyBreakdown Et;
    for (int bt = 0; bt < 60; ++bt, tau *= cfg.backtrack) {
      trial = u;
      trial.axpy(-tau, d);
      try {
        trial = project_to_constraint(p, trial, c);
        Et = total_energy(p, trial);
      } catch (const NonFiniteValue&) {
        continue;
      } catch (const InvalidArgument&) {
        continue;
      }
      const double required = cfg.armijo * tau * slope;
      if (Et.total <= E.total &&
          (Et.total <= E.total - required || required < 1e-15 * std::abs(E.total))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.note = "line search could not decrease the energy";
      break;
    }
    step = (tau == step) ? 2.0 * tau : tau;
    u = std::move(trial);
    E = Et;
    g = energy_gradient(p, u);
    if (cfg.record_trace) {
      res.trace.push_back({it + 1, E.total, std::abs(E.constraint_value - c) / c, tau});
    }

    if (can_symmetrize && cfg.symmetrize_every > 0 && (it + 1) % cfg.symmetrize_every == 0) {
      Field s = project_to_constraint(p, schwarz_rearrange(u), c);
      const EnergyBreakdown Es = total_energy(p, s);
      if (Es.total <= E.total) {
        u = std::move(s);
        E = Es;
        g = energy_gradient(p, u);
        ++res.symmetrizations;
        if (cfg.record_trace) {
          res.trace.push_back({it + 1, E.total, std::abs(E.constraint_value - c) / c, 0.0});
        }
      }
    }
  }
  if (it == cfg.max_iters && !res.converged) res.note = "iteration limit reached";

  res.iterations = it;
  res.minimizer = u;
  res.energy = E;
  res.m_value = E.total;
  res.constraint_error = std::abs(E.constraint_value - c) / c;
  res.beta = inner(g, u) / l2_norm_sq(u);
  if (res.constraint_error > 1e-8) res.converged = false;
  if (!res.note.empty()) res.note += "; ";
  res.note += "discrete minimizer on a bounded grid (" + p.grid.describe() +
              "); m may exceed the continuum infimum by a domain-truncation error";
  return res;
}

double lagrange_multiplier(const ProblemSpec& p, const Field& u) {
  const double n2 = l2_norm_sq(u);
  if (n2 == 0.0) throw InvalidArgument("lagrange_multiplier: u is identically zero");
  return inner(energy_gradient(p, u), u) / n2;
}

double el_residual(const ProblemSpec& p, const Field& u, double beta) {
  return residual_norm(p, u, beta);
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iter,energy,constraint_error,step_size\n";
  for (const TraceRow& r : trace) {
    os << r.iter << ',' << format_number(r.energy) << ',' << format_number(r.constraint_error) << ','
       << format_number(r.step_size) << '\n';
  }
}

}  // namespace ccmin
