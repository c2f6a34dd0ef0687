#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "ccmin/grid.hpp"

namespace ccmin::test {

inline constexpr double kPi = std::numbers::pi;

// Cubic NLS on the line: -u'' + kappa^2 u = u^3 has u = sqrt(2) kappa sech(kappa x).
// For I = 1/2 int u'^2 - 1/4 int u^4 and ||u||^2 = c: kappa = c/4, beta = -kappa^2,
// m = -c^3/96.
struct SechSoliton {
  double c;
  double kappa() const { return c / 4.0; }
  double beta() const { return -kappa() * kappa(); }
  double m() const { return -c * c * c / 96.0; }
  double operator()(double x) const { return std::sqrt(2.0) * kappa() / std::cosh(kappa() * x); }
};

// exp(-a r^2) in R^3.
struct Gaussian3 {
  double a;
  double l2_sq() const { return std::pow(kPi / (2.0 * a), 1.5); }
  double dirichlet() const { return 3.0 * a * l2_sq(); }
  // self-energy of rho = u^2: mass M, <1/|x-y|> over the difference distribution
  double coulomb() const { return l2_sq() * l2_sq() * 2.0 * std::sqrt(a / kPi); }
  double lp_pow(double p) const { return std::pow(kPi / (p * a), 1.5); }
};

// Smallest eigenpair of sum_e W_e ((u_hi - u_lo)/h)^2 = lambda sum_i w_i u_i^2.
struct DirichletMode {
  double lambda = 0.0;
  Eigen::VectorXd mode;
};

inline DirichletMode ground_mode(const Grid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
  const auto w = g.weights();
  for (Eigen::Index i = 0; i < n; ++i) M(i, i) = w[static_cast<std::size_t>(i)];
  for (const Edge& e : g.edges()) {
    const double k = e.weight / (e.h * e.h);
    const auto lo = static_cast<Eigen::Index>(e.lo), hi = static_cast<Eigen::Index>(e.hi);
    if (e.lo != kGhost) K(lo, lo) += k;
    if (e.hi != kGhost) K(hi, hi) += k;
    if (e.lo != kGhost && e.hi != kGhost) {
      K(lo, hi) -= k;
      K(hi, lo) -= k;
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  DirichletMode out;
  out.lambda = es.eigenvalues()(0);
  out.mode = es.eigenvectors().col(0);
  if (out.mode.sum() < 0) out.mode = -out.mode;
  return out;
}

// Random smooth nonnegative radial profile: a few Gaussian bumps.
inline Field random_bumps(const GridPtr& g, std::mt19937_64& rng, double r_scale = 6.0) {
  std::uniform_real_distribution<double> amp(0.2, 1.0), center(0.0, r_scale), width(0.5, 2.0);
  const int k = 1 + static_cast<int>(rng() % 3);
  std::vector<double> a(k), c(k), s(k);
  for (int i = 0; i < k; ++i) {
    a[i] = amp(rng);
    c[i] = center(rng);
    s[i] = width(rng);
  }
  return Field::from_radial(g, [&](double r) {
    double v = 0.0;
    for (int i = 0; i < k; ++i) v += a[i] * std::exp(-(r - c[i]) * (r - c[i]) / (2.0 * s[i] * s[i]));
    return v;
  });
}

}  // namespace ccmin::test
