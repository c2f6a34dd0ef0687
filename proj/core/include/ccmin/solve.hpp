#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccmin/energy.hpp"
#include "ccmin/grid.hpp"

namespace ccmin {

struct SolveConfig {
  std::size_t max_iters = 50000;
  double step0 = 1e-2;
  double backtrack = 0.5;
  double stall_tol = 1e-10;   // relative energy change over 10 iterations
  double grad_tol = 1e-6;     // scaled Euler-Lagrange residual
  std::size_t symmetrize_every = 100;  // 0 = off
  std::uint64_t seed = 0;
  double armijo = 1e-4;
  bool record_trace = true;

  void validate() const;
};

struct TraceRow {
  std::size_t iter = 0;
  double energy = 0.0;
  double constraint_error = 0.0;
  double step_size = 0.0;
};

struct SolveResult {
  Field minimizer;
  EnergyBreakdown energy;
  double m_value = 0.0;
  double beta = 0.0;           // <grad E, u> / ||u||^2
  double el_residual = 0.0;    // scaled residual of the stationarity condition
  std::size_t iterations = 0;
  bool converged = false;
  double constraint_error = 0.0;  // |G(u) - c| / c
  std::size_t symmetrizations = 0;
  std::vector<TraceRow> trace;
  std::string note;
};

/// Default starting point: a Gaussian of width extent/8 (perturbed by the
/// seed when nonzero), scaled onto G(u) = c.
Field initial_guess(const ProblemSpec& p, double c, std::uint64_t seed = 0);

/// Scalar rescaling rho u with sum_k int G(rho u_k) = c.
Field project_to_constraint(const ProblemSpec& p, const Field& u, double c);

/// Projected (H^1-preconditioned) gradient descent on {G(u) = c} with Armijo
/// backtracking and periodic Schwarz symmetrization.
SolveResult minimize_constrained(const ProblemSpec& p, double c, const SolveConfig& cfg = {},
                                 const std::optional<Field>& init = std::nullopt);

/// beta = <energy_gradient(u), u> / ||u||_2^2.
double lagrange_multiplier(const ProblemSpec& p, const Field& u);

/// ||grad E(u) - beta u||_2 / ||u||_2.
double el_residual(const ProblemSpec& p, const Field& u, double beta);

/// `iter,energy,constraint_error,step_size`
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace ccmin
