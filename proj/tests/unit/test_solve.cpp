#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ccmin/catalog.hpp"
#include "ccmin/error.hpp"
#include "ccmin/solve.hpp"
#include "oracles.hpp"

using namespace ccmin;

namespace {

// I(u) = 1/2 int u'^2 - 1/4 int u^4 on the line
ProblemSpec soliton_problem() {
  return ProblemSpec::stuart(GridSpec::line(40.0, 4096),
                             make_nonlinearity("F_power", {{"A", 0.25}, {"d", 0.0}, {"alpha", 2.0}}));
}

SolveConfig tight() {
  SolveConfig cfg;
  cfg.grad_tol = 1e-7;
  return cfg;
}

}  // namespace

TEST(Solve, SolitonMatchesTheSechOracle) {
  const ProblemSpec p = soliton_problem();
  const test::SechSoliton s{4.0};
  const SolveResult r = minimize_constrained(p, 4.0, tight());
  ASSERT_TRUE(r.converged) << r.note;
  EXPECT_NEAR(r.m_value, s.m(), 1e-2 * std::abs(s.m()));
  EXPECT_NEAR(r.beta, s.beta(), 1e-2 * std::abs(s.beta()));
  const Field exact = Field::from_radial(r.minimizer.grid_ptr(), [&](double x) { return s(x); });
  const Field diff = r.minimizer.abs() - exact;
  EXPECT_LE(std::sqrt(l2_norm_sq(diff)), 1e-2 * 2.0);
  EXPECT_LE(r.el_residual, 1e-4);
  EXPECT_LE(r.constraint_error, 1e-8);
}

TEST(Solve, MinimizerIsAFixedPoint) {
  const ProblemSpec p = soliton_problem();
  const SolveResult a = minimize_constrained(p, 4.0, tight());
  const SolveResult b = minimize_constrained(p, 4.0, tight(), a.minimizer);
  ASSERT_TRUE(b.converged);
  EXPECT_LE(b.iterations, a.iterations);
  EXPECT_NEAR(b.m_value, a.m_value, 1e-8 * std::abs(a.m_value));
}

TEST(Solve, TraceIsNonIncreasingAndStartsAtZero) {
  const ProblemSpec p = soliton_problem();
  const SolveResult r = minimize_constrained(p, 4.0, tight());
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().iter, 0u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].energy, r.trace[i - 1].energy + 1e-14 * std::abs(r.trace[i - 1].energy)) << i;
    EXPECT_LE(r.trace[i].constraint_error, 1e-10);
  }
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  EXPECT_EQ(os.str().substr(0, 37), "iter,energy,constraint_error,step_siz");
}

TEST(Solve, LinearProblemRecoversTheGroundMode) {
  const ProblemSpec p = ProblemSpec::stuart(GridSpec::line(10.0, 200), make_nonlinearity("F_zero"));
  const test::DirichletMode mode = test::ground_mode(Grid(p.grid));
  const double c = 2.0;
  const SolveResult r = minimize_constrained(p, c, tight());
  ASSERT_TRUE(r.converged) << r.note;
  EXPECT_NEAR(r.beta, mode.lambda, 1e-6 * mode.lambda);
  EXPECT_NEAR(r.m_value, c * mode.lambda / 2, 1e-6 * c * mode.lambda);
  EXPECT_GT(r.beta, 0.0);
}

TEST(Solve, ChoquardGroundStateIsNegativeAndDecreasing) {
  const ProblemSpec p = ProblemSpec::choquard(GridSpec::radial(3, 20.0, 1024), make_lagrangian("j_quadratic"));
  const SolveResult r = minimize_constrained(p, 1.0);
  ASSERT_TRUE(r.converged) << r.note;
  EXPECT_LT(r.m_value, 0.0);
  EXPECT_LT(r.beta, 0.0);
  const auto v = r.minimizer.component(0);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(v[i], v[i - 1] + 1e-12 * v[0]) << i;
}

TEST(Solve, StuartMultiplierIsNonPositive) {
  const ProblemSpec p = ProblemSpec::stuart(GridSpec::line(), make_nonlinearity("F_power"));
  for (double c : {0.5, 2.0}) {
    const SolveResult r = minimize_constrained(p, c);
    ASSERT_TRUE(r.converged) << r.note;
    EXPECT_LT(r.m_value, 0.0);
    EXPECT_LE(r.beta, 1e-6 * std::max(1.0, std::abs(r.m_value)));
  }
}

TEST(Solve, QuasilinearTwoComponentRunConverges) {
  const ProblemSpec p = ProblemSpec::quasilinear(
      GridSpec::line(30.0, 1024), {make_lagrangian("j_quadratic"), make_lagrangian("j_quad_plus_quartic")},
      make_nonlinearity("F_coupled", {{"beta", 0.5}}, 2), make_constraint("G_square"));
  const SolveResult r = minimize_constrained(p, 2.0);
  ASSERT_TRUE(r.converged) << r.note;
  EXPECT_LT(r.m_value, 0.0);
  EXPECT_NEAR(constraint_value(p, r.minimizer), 2.0, 1e-8 * 2.0);
}

TEST(Solve, RunsAreDeterministic) {
  const ProblemSpec p = ProblemSpec::stuart(GridSpec::line(), make_nonlinearity("F_power"));
  SolveConfig cfg;
  cfg.seed = 42;
  const SolveResult a = minimize_constrained(p, 1.0, cfg), b = minimize_constrained(p, 1.0, cfg);
  ASSERT_EQ(a.minimizer.values().size(), b.minimizer.values().size());
  for (std::size_t i = 0; i < a.minimizer.values().size(); ++i) {
    ASSERT_EQ(a.minimizer.values()[i], b.minimizer.values()[i]);
  }
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.m_value, b.m_value);
}

TEST(Solve, SeedsPerturbTheInitialGuess) {
  const ProblemSpec p = ProblemSpec::stuart(GridSpec::line(), make_nonlinearity("F_power"));
  const Field a = initial_guess(p, 1.0, 0), b = initial_guess(p, 1.0, 7), c = initial_guess(p, 1.0, 7);
  EXPECT_NEAR(l2_norm_sq(a), 1.0, 1e-12);
  EXPECT_NEAR(l2_norm_sq(b), 1.0, 1e-12);
  EXPECT_GT((a - b).max_abs(), 1e-6);
  EXPECT_EQ((b - c).max_abs(), 0.0);
}

TEST(Solve, ProjectionHitsTheConstraint) {
  const ProblemSpec p = ProblemSpec::quasilinear(GridSpec::line(10.0, 256), {make_lagrangian("j_quadratic")},
                                                 make_nonlinearity("F_zero"), make_constraint("G_power", {{"p", 3.0}}));
  const Field u = Field::from_radial(Grid::make(p.grid), [](double x) { return std::exp(-x * x); });
  for (double c : {0.1, 1.0, 5.0}) EXPECT_NEAR(constraint_value(p, project_to_constraint(p, u, c)), c, 1e-12 * c);
  EXPECT_THROW(project_to_constraint(p, Field(Grid::make(p.grid)), 1.0), Error);
}

TEST(Solve, InvalidInputsAreRejected) {
  const ProblemSpec p = soliton_problem();
  EXPECT_THROW(minimize_constrained(p, 0.0), InvalidArgument);
  EXPECT_THROW(minimize_constrained(p, -1.0), InvalidArgument);
  SolveConfig bad;
  bad.backtrack = 1.5;
  EXPECT_THROW(minimize_constrained(p, 1.0, bad), InvalidArgument);
  const Field other(Grid::make(GridSpec::line(20.0, 4096)));
  EXPECT_THROW(minimize_constrained(p, 1.0, {}, other), GridMismatch);
  ProblemSpec q = p;
  q.lagrangians[0] = make_lagrangian("j_quad_plus_quartic");
  q.lagrangians[0].j_s = nullptr;
  EXPECT_THROW(minimize_constrained(q, 1.0), InvalidArgument);
}

TEST(Solve, NoteCarriesTheFiniteGridCaveat) {
  const SolveResult r = minimize_constrained(soliton_problem(), 1.0);
  EXPECT_FALSE(r.note.empty());
}

TEST(Solve, LagrangeMultiplierAndResidualAgreeWithTheResult) {
  const ProblemSpec p = soliton_problem();
  const SolveResult r = minimize_constrained(p, 4.0, tight());
  EXPECT_NEAR(lagrange_multiplier(p, r.minimizer), r.beta, 1e-12 * std::abs(r.beta));
  EXPECT_NEAR(el_residual(p, r.minimizer, r.beta), r.el_residual, 1e-12);
}
