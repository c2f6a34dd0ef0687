#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccmin/grid.hpp"

namespace ccmin {

using Params = std::map<std::string, double>;

/// Gradient Lagrangian j(s, t), t = |grad u| >= 0.
struct Lagrangian {
  std::string name;
  Params params;
  std::function<double(double, double)> j;
  std::function<double(double, double)> j_s;  // optional
  std::function<double(double, double)> j_t;  // optional
  double p = 2.0;   // coercivity exponent
  double nu = 1.0;  // j(s,t) >= nu t^p
  double growth_C = 1.0;     // j(s,t) <= C|s|^6 + C t^2
  double coerc_beta = 1.0;   // j(s,t) <= beta t^p for s,t in [0, alpha]
  double coerc_alpha = 1.0;
  /// Set when j(s,t) = a t^2 exactly; enables grids whose links cannot
  /// reassemble |grad u| (cylindrical).
  std::optional<double> quadratic_coefficient;

  bool has_partials() const { return static_cast<bool>(j_s) && static_cast<bool>(j_t); }
};

/// Lower-bound record F(x,s) >= A (1+|x|)^{-d} s^{2+alpha} for s in [0,delta], |x| >= r0.
struct HighDimensionParams {
  double A = 1.0;
  double d = 1.0;
  double alpha = 0.5;
  double r0 = 0.0;
  double delta = 1.0;
};

/// Lower-bound record F(r,s) >= mu_F r^{-tau} s_j^{sigma+p} for r > r0, |s| <= delta.
struct ZeroCvBisParams {
  double mu_F = 1.0;
  double tau = 0.0;
  double sigma = 1.0;
  double delta = 1.0;
  double r0 = 0.0;
  double p = 2.0;
};

/// F(r, s_1..s_m) with r the radial weight argument.
struct Nonlinearity {
  std::string name;
  Params params;
  std::size_t components = 1;
  std::function<double(double, std::span<const double>)> F;
  /// Writes f_k = dF/ds_k into the output span (optional).
  std::function<void(double, std::span<const double>, std::span<double>)> f;
  std::optional<HighDimensionParams> high_dimension;
  std::optional<ZeroCvBisParams> zero_cv_bis;
  /// Amplitude below which F >= 0 is guaranteed (plateau and far-field constructions).
  double delta = 1.0;

  bool has_partials() const { return static_cast<bool>(f); }
  bool is_zero() const { return !F; }
};

/// Per-component constraint density G(s) >= gamma |s|^p, G(0) = 0.
struct Constraint {
  std::string name;
  Params params;
  std::function<double(double)> G;
  std::function<double(double)> dG;
  double gamma = 1.0;
  double p = 2.0;
  bool homogeneous = true;  // G(ts) = |t|^p G(s)
};

enum class Family { choquard, quasilinear, stuart, badiale_rolando };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

struct ProblemSpec {
  Family family = Family::stuart;
  GridSpec grid;
  std::vector<Lagrangian> lagrangians;  // one per component
  Nonlinearity nonlinearity;            // empty F means F = 0
  Constraint constraint;
  double mu = 0.0;                      // Hardy coefficient
  double kinetic_prefactor = 1.0;

  std::size_t components() const { return lagrangians.size(); }
  int space_dimension() const { return grid.kind == GridKind::line ? 1 : grid.dimension; }

  /// Throws InvalidArgument / GridMismatch on family-grid or catalog mismatches.
  void validate() const;

  /// The same problem on another grid of the same symmetry class.
  ProblemSpec on_grid(const GridSpec& g) const;

  static ProblemSpec choquard(const GridSpec& grid, Lagrangian j);
  static ProblemSpec quasilinear(const GridSpec& grid, std::vector<Lagrangian> j, Nonlinearity F,
                                 Constraint G);
  static ProblemSpec stuart(const GridSpec& grid, Nonlinearity F);
  static ProblemSpec badiale_rolando(const GridSpec& grid, double mu, Nonlinearity F);
};

struct EnergyBreakdown {
  double j_term = 0.0;
  double f_term = 0.0;
  double coulomb_term = 0.0;
  double hardy_term = 0.0;
  double total = 0.0;
  double constraint_value = 0.0;
};

// ---------------------------------------------------------------- Coulomb (radial N = 3)

/// Shell-averaged Newton potential of rho = u^2 at every node.
Field coulomb_potential(const Field& u);

/// D(u) = iint u^2(x) u^2(y) / |x - y|.
double coulomb_energy(const Field& u);

/// D(v, w) = iint v^2(x) w^2(y) / |x - y|.
double coulomb_bilinear(const Field& v, const Field& w);

// ---------------------------------------------------------------- functionals

/// Sum over components of integrate(G(u_k)).
double constraint_value(const ProblemSpec& p, const Field& u);

/// L^2 gradient of constraint_value: G'(u_k) nodewise.
Field constraint_gradient(const ProblemSpec& p, const Field& u);

EnergyBreakdown total_energy(const ProblemSpec& p, const Field& u);

/// Exact L^2 gradient of the discrete total energy (nodal derivative divided
/// by the node weight).
Field energy_gradient(const ProblemSpec& p, const Field& u);

/// Euclidean norm of (grad E - beta u), weighted, divided by ||u||_2.
double residual_norm(const ProblemSpec& p, const Field& u, double beta);

// ---------------------------------------------------------------- structural checks

struct SampleBox {
  std::vector<double> r_values{0.5, 1.0, 2.0, 5.0, 10.0};
  std::vector<double> s_values{0.0, 0.1, 0.5, 1.0, 2.0};
  std::vector<double> increments{0.05, 0.3, 1.0};
};

struct CouplingViolation {
  std::string condition;  // "supermod1" or "supermod2"
  double r = 0.0;
  double r1 = 0.0;        // supermod2 only
  std::vector<double> s;
  std::size_t i = 0;
  std::size_t j = 0;      // supermod1 only
  double h = 0.0;
  double k = 0.0;         // supermod1 only
  double defect = 0.0;    // negative on violation
};

struct CouplingReport {
  std::size_t samples = 0;
  std::vector<CouplingViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Samples the cooperativity inequalities on `box`; supermod1 is only
/// sampled when F has at least two components.
CouplingReport validate_coupling(const Nonlinearity& F, const SampleBox& box = {});

struct StructureReport {
  std::size_t samples = 0;
  std::vector<std::string> violations;
  bool pass() const { return violations.empty(); }
};

/// Coercivity, monotonicity/midpoint convexity in t, and the sign-symmetry bound.
StructureReport validate_lagrangian(const Lagrangian& j, const SampleBox& box = {});
/// F(r,0) = 0 and F(r,s) <= F(r,|s|).
StructureReport validate_nonlinearity(const Nonlinearity& F, const SampleBox& box = {});
/// G(0) = 0 and G(s) >= gamma |s|^p.
StructureReport validate_constraint(const Constraint& G, const SampleBox& box = {});

}  // namespace ccmin
