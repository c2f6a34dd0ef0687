#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccmin/catalog.hpp"
#include "ccmin/energy.hpp"
#include "ccmin/error.hpp"
#include "oracles.hpp"

using namespace ccmin;
using ccmin::test::kPi;

namespace {

Field ball_indicator(const GridPtr& g, double R = 1.0) {
  return Field::from_radial(g, [R](double r) { return r <= R ? 1.0 : 0.0; });
}

ProblemSpec choquard_instance() {
  return ProblemSpec::choquard(GridSpec::radial(3, 12.0, 384),
                               make_lagrangian("j_quad_plus_quartic", {{"kappa", 0.5}}));
}

// sigma = 2 keeps the coupling |s_1 s_2|^{(p+sigma)/2} twice differentiable where a component vanishes
ProblemSpec quasilinear_instance() {
  return ProblemSpec::quasilinear(
      GridSpec::line(16.0, 512),
      {make_lagrangian("j_plaplace", {{"p", 3.0}}), make_lagrangian("j_quad_plus_quartic")},
      make_nonlinearity("F_coupled", {{"beta", 0.5}, {"tau", 0.5}, {"sigma", 2.0}}, 2),
      make_constraint("G_power", {{"p", 2.0}}));
}

ProblemSpec stuart_instance() {
  return ProblemSpec::stuart(GridSpec::radial(3, 12.0, 384), make_nonlinearity("F_power"));
}

ProblemSpec br_instance() {
  return ProblemSpec::badiale_rolando(GridSpec::cylindrical(2, 3, 8.0, 8.0, 40, 40), 1.0,
                                      make_nonlinearity("F_saturable"));
}

Field random_field(const ProblemSpec& p, std::mt19937_64& rng) {
  auto g = Grid::make(p.grid);
  Field u(g, p.components());
  for (std::size_t k = 0; k < p.components(); ++k) {
    const Field b = test::random_bumps(g, rng, 0.5 * p.grid.extent);
    std::copy(b.values().begin(), b.values().end(), u.component(k).begin());
  }
  return u;
}

double max_rel_fd_error(const ProblemSpec& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Field u = random_field(p, rng);
  const Field g = energy_gradient(p, u);
  double worst = 0.0;
  for (int dir = 0; dir < 20; ++dir) {
    const Field phi = random_field(p, rng);
    const double eps = 1e-5 * std::sqrt(l2_norm_sq(u) / l2_norm_sq(phi));
    const double fd = (total_energy(p, u + eps * phi).total - total_energy(p, u + (-eps) * phi).total) / (2 * eps);
    const double an = inner(g, phi);
    worst = std::max(worst, std::abs(fd - an) / std::abs(an));
  }
  return worst;
}

}  // namespace

TEST(Coulomb, PotentialOfUniformBall) {
  auto g = Grid::make(GridSpec::radial(3, 4.0, 4000));
  const Field phi = coulomb_potential(ball_indicator(g));
  for (std::size_t i = 0; i < g->size(); i += 97) {
    const double r = g->radius()[i];
    const double expect = r <= 1.0 ? 2 * kPi * (1 - r * r / 3) : 4 * kPi / (3 * r);
    EXPECT_NEAR(phi(0, i), expect, 2e-3 * expect) << "r=" << r;
  }
}

TEST(Coulomb, SelfEnergyOfUniformBall) {
  // int rho Phi over the unit ball with the potential above
  auto g = Grid::make(GridSpec::radial(3, 4.0, 4000));
  EXPECT_NEAR(coulomb_energy(ball_indicator(g)), 32 * kPi * kPi / 15, 1e-3 * 32 * kPi * kPi / 15);
}

TEST(Coulomb, ZeroField) {
  auto g = Grid::make(GridSpec::radial(3, 10.0, 128));
  EXPECT_EQ(coulomb_energy(Field(g)), 0.0);
  EXPECT_EQ(coulomb_potential(Field(g)).max_abs(), 0.0);
  std::mt19937_64 rng(1);
  EXPECT_EQ(coulomb_bilinear(test::random_bumps(g, rng), Field(g)), 0.0);
}

TEST(Coulomb, PointChargeFarField) {
  auto g = Grid::make(GridSpec::radial(3, 20.0, 4000));
  const double width = 0.2;
  Field u = Field::from_radial(g, [&](double r) { return std::exp(-r * r / (2 * width * width)); });
  const double q = l2_norm_sq(u);
  const Field phi = coulomb_potential(u);
  const double r = 10 * width;
  const double val = interpolate(phi, 0, r);
  EXPECT_NEAR(val, q / r, 1e-2 * q / r);
}

TEST(Coulomb, TwoShellsInteractLikePointCharges) {
  auto g = Grid::make(GridSpec::radial(3, 30.0, 6000));
  auto shell = [&](double c) {
    Field f = Field::from_radial(g, [c](double r) { return std::exp(-(r - c) * (r - c) / 0.02); });
    return (1.0 / std::sqrt(l2_norm_sq(f))) * f;
  };
  const double r2 = 20.0;
  EXPECT_NEAR(coulomb_bilinear(shell(1.0), shell(r2)), 1.0 / r2, 0.05 / r2);
}

TEST(Coulomb, GaussianClosedForm) {
  auto g = Grid::make(GridSpec::radial(3));
  for (double a : {0.5, 1.0, 2.0}) {
    const Field u = Field::from_radial(g, [a](double r) { return std::exp(-a * r * r); });
    const test::Gaussian3 G{a};
    EXPECT_NEAR(coulomb_energy(u), G.coulomb(), 1e-4 * G.coulomb()) << "a=" << a;
  }
}

TEST(Coulomb, BilinearIsSymmetricAndMatchesSelfEnergy) {
  auto g = Grid::make(GridSpec::radial(3, 12.0, 512));
  std::mt19937_64 rng(5);
  const Field v = test::random_bumps(g, rng), w = test::random_bumps(g, rng);
  EXPECT_NEAR(coulomb_bilinear(v, w), coulomb_bilinear(w, v), 1e-12 * coulomb_bilinear(v, w));
  EXPECT_NEAR(coulomb_bilinear(v, v), coulomb_energy(v), 1e-12 * coulomb_energy(v));
}

TEST(Coulomb, CauchySchwarzOnRandomPairs) {
  auto g = Grid::make(GridSpec::radial(3, 12.0, 512));
  std::mt19937_64 rng(2024);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const Field v = test::random_bumps(g, rng), w = test::random_bumps(g, rng);
    const double b = coulomb_bilinear(v, w);
    if (b * b > coulomb_energy(v) * coulomb_energy(w) * (1 + 1e-12)) ++violations;
    EXPECT_GE(coulomb_energy(v), 0.0);
  }
  EXPECT_EQ(violations, 0);
}

TEST(Coulomb, ScalingLawOnCompatibleGrid) {
  auto g = Grid::make(GridSpec::radial(3));
  const Field w = Field::from_radial(g, [](double r) { return std::exp(-r * r / 2); });
  const double D = coulomb_energy(w);
  for (double t : {0.5, 2.0, 4.0}) {
    const Field wt = resample(w, t, ResampleMode::mass_preserving,
                              compatible_grid(*g, t, ResampleMode::mass_preserving));
    EXPECT_NEAR(coulomb_energy(wt) / D, t, 1e-5 * t);
  }
}

TEST(Coulomb, RejectsOtherGrids) {
  auto g = Grid::make(GridSpec::line(10.0, 64));
  EXPECT_THROW(coulomb_energy(Field(g)), GridMismatch);
}

TEST(TotalEnergy, ZeroFieldHasZeroItems) {
  for (const ProblemSpec& p : {choquard_instance(), stuart_instance(), br_instance()}) {
    const EnergyBreakdown e = total_energy(p, Field(Grid::make(p.grid), p.components()));
    EXPECT_EQ(e.total, 0.0);
    EXPECT_EQ(e.j_term, 0.0);
    EXPECT_EQ(e.f_term, 0.0);
    EXPECT_EQ(e.coulomb_term, 0.0);
    EXPECT_EQ(e.hardy_term, 0.0);
    EXPECT_EQ(e.constraint_value, 0.0);
  }
}

TEST(TotalEnergy, ChoquardGaussianClosedForms) {
  const ProblemSpec p = ProblemSpec::choquard(GridSpec::radial(3), make_lagrangian("j_quadratic"));
  const test::Gaussian3 G{1.0};
  const Field u = Field::from_radial(Grid::make(p.grid), [](double r) { return std::exp(-r * r); });
  const EnergyBreakdown e = total_energy(p, u);
  EXPECT_NEAR(e.j_term, G.dirichlet(), 1e-4 * G.dirichlet());
  EXPECT_NEAR(e.coulomb_term, G.coulomb(), 1e-4 * G.coulomb());
  EXPECT_NEAR(e.constraint_value, G.l2_sq(), 1e-4 * G.l2_sq());
}

TEST(TotalEnergy, BreakdownSumsExactly) {
  std::mt19937_64 rng(9);
  for (const ProblemSpec& p : {choquard_instance(), quasilinear_instance(), stuart_instance(), br_instance()}) {
    const EnergyBreakdown e = total_energy(p, random_field(p, rng));
    EXPECT_EQ(e.total, p.kinetic_prefactor * e.j_term + e.hardy_term - e.f_term - e.coulomb_term);
  }
}

TEST(TotalEnergy, FarSmallFieldIsBoundedByHalfDirichlet) {
  const ProblemSpec p = stuart_instance();
  auto g = Grid::make(p.grid);
  const Field u = Field::from_radial(g, [](double r) { return r > 4 && r < 8 ? 0.5 * std::pow(std::sin(kPi * (r - 4) / 4), 2) : 0.0; });
  const EnergyBreakdown e = total_energy(p, u);
  EXPECT_LE(e.total, 0.5 * e.j_term);
}

TEST(TotalEnergy, GridMismatchIsRejected) {
  const ProblemSpec p = stuart_instance();
  EXPECT_THROW(total_energy(p, Field(Grid::make(GridSpec::radial(3, 11.0, 384)))), GridMismatch);
}

TEST(TotalEnergy, BlowUpIsReported) {
  const ProblemSpec p = stuart_instance();
  Field u(Grid::make(p.grid));
  u(0, 5) = 1e200;
  EXPECT_THROW(total_energy(p, u), NonFiniteValue);
}

TEST(EnergyGradient, ZeroFieldGivesZeroGradient) {
  for (const ProblemSpec& p : {choquard_instance(), quasilinear_instance(), stuart_instance(), br_instance()}) {
    EXPECT_EQ(energy_gradient(p, Field(Grid::make(p.grid), p.components())).max_abs(), 0.0);
  }
}

TEST(EnergyGradient, LinearCaseIsMinusLaplacian) {
  const ProblemSpec p = ProblemSpec::stuart(GridSpec::radial(3, 10.0, 256), make_nonlinearity("F_zero"));
  std::mt19937_64 rng(4);
  const Field u = test::random_bumps(Grid::make(p.grid), rng);
  const Field g = energy_gradient(p, u);
  const Field lap = laplacian(u);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(g(0, i), -lap(0, i), 1e-12 * (1 + std::abs(lap(0, i))));
  const ProblemSpec q = ProblemSpec::quasilinear(p.grid, {make_lagrangian("j_quadratic")}, make_nonlinearity("F_zero"),
                                                 make_constraint("G_square"));
  const Field g2 = energy_gradient(q, u);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(g2(0, i), -2 * lap(0, i), 1e-12 * (1 + std::abs(lap(0, i))));
}

TEST(EnergyGradient, MatchesFiniteDifferencesChoquard) { EXPECT_LE(max_rel_fd_error(choquard_instance(), 11), 1e-4); }
TEST(EnergyGradient, MatchesFiniteDifferencesQuasilinear) { EXPECT_LE(max_rel_fd_error(quasilinear_instance(), 12), 1e-4); }
TEST(EnergyGradient, MatchesFiniteDifferencesStuart) { EXPECT_LE(max_rel_fd_error(stuart_instance(), 13), 1e-4); }
TEST(EnergyGradient, MatchesFiniteDifferencesBadialeRolando) { EXPECT_LE(max_rel_fd_error(br_instance(), 14), 1e-4); }

TEST(EnergyGradient, MissingPartialsAreRejected) {
  ProblemSpec p = stuart_instance();
  p.nonlinearity.f = nullptr;
  EXPECT_THROW(energy_gradient(p, Field(Grid::make(p.grid))), InvalidArgument);
}

TEST(Residual, ExactEigenmodeHasNoResidual) {
  const ProblemSpec p = ProblemSpec::stuart(GridSpec::line(10.0, 200), make_nonlinearity("F_zero"));
  auto g = Grid::make(p.grid);
  const test::DirichletMode mode = test::ground_mode(*g);
  Field u(g, 1, std::vector<double>(mode.mode.data(), mode.mode.data() + mode.mode.size()));
  // the L2 gradient of 1/2 u'Ku is W^{-1} K u = lambda u
  EXPECT_LE(residual_norm(p, u, mode.lambda), 1e-10 * mode.lambda);
}

TEST(Coupling, MixedSecondDifferenceIsDetected) {
  Nonlinearity F;
  F.name = "minus_product";
  F.components = 2;
  F.F = [](double, std::span<const double> s) { return -s[0] * s[1]; };
  const CouplingReport rep = validate_coupling(F);
  ASSERT_FALSE(rep.pass());
  std::size_t supermod1 = 0;
  for (const CouplingViolation& v : rep.violations) {
    if (v.condition != "supermod1") continue;
    ++supermod1;
    EXPECT_NEAR(v.defect, -v.h * v.k, 1e-12) << "h=" << v.h << " k=" << v.k;
  }
  EXPECT_GT(supermod1, 0u);
}

TEST(Coupling, BuiltInCoupledNonlinearityPasses) {
  for (double beta : {0.0, 0.5, 2.0}) {
    const CouplingReport rep = validate_coupling(make_nonlinearity("F_coupled", {{"beta", beta}, {"tau", 1.0}}, 3));
    EXPECT_TRUE(rep.pass()) << "beta=" << beta << " violations=" << rep.violations.size();
    EXPECT_GT(rep.samples, 0u);
  }
}

TEST(Coupling, DecayingWeightPassesTheRadialCondition) {
  Nonlinearity F;
  F.name = "decaying_square";
  F.components = 1;
  F.F = [](double r, std::span<const double> s) { return std::exp(-r) * s[0] * s[0]; };
  const CouplingReport rep = validate_coupling(F);
  EXPECT_TRUE(rep.pass());
  EXPECT_GT(rep.samples, 0u);
}

TEST(BadialeRolando, DilationIdentityOnCompatibleGrid) {
  const ProblemSpec p = br_instance();
  auto g = Grid::make(p.grid);
  std::mt19937_64 rng(21);
  const Field u = test::random_bumps(g, rng, 3.0);
  const double t = 8.0;  // t^{1/3} = 2 doubles both extents
  auto g2 = compatible_grid(*g, t, ResampleMode::dilation);
  const Field v = resample(u, t, ResampleMode::dilation, g2);
  const ProblemSpec q = p.on_grid(g2->spec());
  const EnergyBreakdown eu = total_energy(p, u), ev = total_energy(q, v);
  const double xu = eu.j_term + 2 * eu.hardy_term, xv = ev.j_term + 2 * ev.hardy_term;
  EXPECT_NEAR(xv, std::cbrt(t) * xu, 1e-3 * std::cbrt(t) * xu);
  EXPECT_NEAR(ev.f_term, t * eu.f_term, 1e-3 * t * eu.f_term);
  EXPECT_NEAR(ev.constraint_value, t * eu.constraint_value, 1e-3 * t * eu.constraint_value);
}
