// Newton potential of a radial density in R^3, discretized as a Galerkin
// form with piecewise-constant shells [ih, (i+1)h]. The resulting matrix is a
// restriction of the (positive definite) Coulomb kernel, so D stays
// nonnegative and Cauchy-Schwarz holds exactly for every discrete pair.
#include <cmath>
#include <numbers>
#include <vector>

#include "ccmin/energy.hpp"
#include "ccmin/error.hpp"

namespace ccmin {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

void require_radial3(const Field& u, const char* what) {
  const Grid& g = u.grid();
  if (g.kind() != GridKind::radial || g.dimension() != 3) {
    throw GridMismatch(std::string(what) + ": requires a radial grid in R^3, got " +
                       g.spec().describe());
  }
  if (u.components() != 1) {
    throw InvalidArgument(std::string(what) + ": expects a single-component field");
  }
}

// Shell-averaged potential generated by the shell densities rho.
std::vector<double> shell_potential(const Grid& g, std::span<const double> rho) {
  const std::size_t n = g.size();
  const double h = g.axis(0).h;
  const auto V = g.weights();
  std::vector<double> phi(n);

  // inner[i] = sum_{j<i} V_j rho_j, running left to right
  double inner = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    const double P = 2.0 * std::numbers::pi * h * h * (2.0 * x + 1.0);
    const double S =
        (16.0 * kPi2 * x * x * x + 64.0 * kPi2 / 3.0 * x * x + 32.0 * kPi2 / 3.0 * x +
         32.0 * kPi2 / 15.0) * std::pow(h, 5);
    phi[i] = P / V[i] * inner + S / V[i] * rho[i];
    inner += V[i] * rho[i];
  }
  // outer contribution sum_{j>i} P_j rho_j, running right to left
  double outer = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    phi[i] += outer;
    const double x = static_cast<double>(i);
    outer += 2.0 * std::numbers::pi * h * h * (2.0 * x + 1.0) * rho[i];
  }
  return phi;
}

std::vector<double> density(const Field& u) {
  const auto v = u.component(0);
  std::vector<double> rho(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) rho[i] = v[i] * v[i];
  return rho;
}

}  // namespace

Field coulomb_potential(const Field& u) {
  require_radial3(u, "coulomb_potential");
  Field out(u.grid_ptr(), 1, shell_potential(u.grid(), density(u)));
  return out;
}

double coulomb_bilinear(const Field& v, const Field& w) {
  require_radial3(v, "coulomb_bilinear");
  require_radial3(w, "coulomb_bilinear");
  require_same_grid(v, w, "coulomb_bilinear");
  const auto rho_v = density(v);
  const auto phi_w = shell_potential(w.grid(), density(w));
  const auto V = v.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < rho_v.size(); ++i) s += V[i] * rho_v[i] * phi_w[i];
  return s;
}

double coulomb_energy(const Field& u) {
  require_radial3(u, "coulomb_energy");
  const auto rho = density(u);
  const auto phi = shell_potential(u.grid(), rho);
  const auto V = u.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += V[i] * rho[i] * phi[i];
  return s;
}

}  // namespace ccmin
