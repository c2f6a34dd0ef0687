#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ccmin/error.hpp"
#include "ccmin/field_io.hpp"
#include "ccmin/grid.hpp"
#include "oracles.hpp"

using namespace ccmin;
using ccmin::test::kPi;

TEST(GridSpec, DefaultsMatchDocumentedExtents) {
  const GridSpec r = GridSpec::radial(3);
  EXPECT_EQ(r.extent, 20.0);
  EXPECT_EQ(r.nodes, 2048u);
  const GridSpec l = GridSpec::line();
  EXPECT_EQ(l.extent, 40.0);
  EXPECT_EQ(l.nodes, 4096u);
  const GridSpec c = GridSpec::cylindrical(2, 3);
  EXPECT_EQ(c.extent, 20.0);
  EXPECT_EQ(c.extent2, 20.0);
  EXPECT_EQ(c.nodes, 256u);
  EXPECT_EQ(c.nodes2, 256u);
}

TEST(GridSpec, RejectsBrokenInvariants) {
  EXPECT_THROW(GridSpec::radial(3, 20.0, 8).validate(), InvalidArgument);
  EXPECT_THROW(GridSpec::radial(3, -1.0).validate(), InvalidArgument);
  EXPECT_THROW(GridSpec::radial(0).validate(), InvalidArgument);
  EXPECT_THROW(GridSpec::line(40.0, 17).validate(), InvalidArgument);
  EXPECT_THROW(GridSpec::cylindrical(3, 3).validate(), InvalidArgument);
}

TEST(Grid, CellCenteredNodesAvoidSingularities) {
  const Grid g(GridSpec::radial(3, 10.0, 100));
  EXPECT_NEAR(g.radius()[0], 0.05, 1e-15);
  const Grid c(GridSpec::cylindrical(2, 3, 10.0, 10.0, 32, 32));
  for (double y : c.axis_distance()) EXPECT_GT(y, 0.0);
}

TEST(Grid, LineGridIsSymmetric) {
  const Grid g(GridSpec::line(10.0, 64));
  const auto x = g.coord1();
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(x[i], -x[g.size() - 1 - i]);
}

TEST(Grid, TotalMeasureIsTheBallVolume) {
  const Grid g(GridSpec::radial(3, 2.0, 64));
  EXPECT_NEAR(g.total_measure(), 4.0 / 3.0 * kPi * 8.0, 1e-12);
  const Grid c(GridSpec::cylindrical(2, 3, 1.0, 1.0, 16, 16));
  // disc of radius 1 times the segment [-1, 1]
  EXPECT_NEAR(c.total_measure(), kPi * 2.0, 1e-12);
}

TEST(Integrate, IndicatorOfUnitBall) {
  auto g = Grid::make(GridSpec::radial(3, 4.0, 400));
  const Field f = Field::from_radial(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
  EXPECT_NEAR(integrate(f), 4.0 * kPi / 3.0, 1e-12);
}

TEST(Integrate, GaussianInThreeDimensions) {
  auto g = Grid::make(GridSpec::radial(3, 12.0, 2048));
  const Field f = Field::from_radial(g, [](double r) { return std::exp(-r * r); });
  EXPECT_NEAR(integrate(f), std::pow(kPi, 1.5), 1e-5 * std::pow(kPi, 1.5));
}

TEST(Integrate, IndicatorOnLine) {
  auto g = Grid::make(GridSpec::line(4.0, 400));
  const Field f = Field::from_radial(g, [](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; });
  EXPECT_NEAR(integrate(f), 1.0, 1e-12);
}

TEST(Integrate, IsLinear) {
  auto g = Grid::make(GridSpec::radial(3, 10.0, 256));
  std::mt19937_64 rng(1);
  const Field a = test::random_bumps(g, rng), b = test::random_bumps(g, rng);
  const Field s = 2.5 * a + (-1.5) * b;
  EXPECT_NEAR(integrate(s), 2.5 * integrate(a) - 1.5 * integrate(b), 1e-12 * std::abs(integrate(a)));
}

TEST(Integrate, RejectsBadComponent) {
  auto g = Grid::make(GridSpec::line(4.0, 64));
  const Field f(g, 2);
  EXPECT_THROW(integrate(f, 2), InvalidArgument);
}

TEST(LpNorm, ZeroHomogeneityAndGaussian) {
  auto g = Grid::make(GridSpec::radial(3, 12.0, 2048));
  EXPECT_EQ(lp_norm(Field(g), 2.0), 0.0);
  const Field f = Field::from_radial(g, [](double r) { return std::exp(-r * r); });
  EXPECT_NEAR(lp_norm(-3.0 * f, 2.0), 3.0 * lp_norm(f, 2.0), 1e-13);
  EXPECT_NEAR(lp_norm(f, 2.0), std::pow(kPi / 2.0, 0.75), 1e-5);
  EXPECT_THROW(lp_norm(f, 0.5), InvalidArgument);
}

TEST(LpNorm, TriangleInequalityOnRandomPairs) {
  auto g = Grid::make(GridSpec::radial(3, 12.0, 512));
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Field a = test::random_bumps(g, rng);
    const Field b = (-1.0) * test::random_bumps(g, rng);
    for (double p : {1.0, 2.0, 2.4, 6.0}) {
      EXPECT_LE(lp_norm(a + b, p), lp_norm(a, p) + lp_norm(b, p) + 1e-12);
    }
  }
}

TEST(RadialDerivative, ConstantAndLinear) {
  auto g = Grid::make(GridSpec::line(5.0, 200));
  const Field c = Field::from_radial(g, [](double) { return 3.0; });
  const Field dc = radial_derivative(c);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_NEAR(dc(0, i), 0.0, 1e-12);
  const Field x = Field::from_radial(g, [](double t) { return t; });
  const Field dx = radial_derivative(x);
  for (std::size_t i = 1; i + 1 < g->size(); ++i) EXPECT_NEAR(dx(0, i), 1.0, 1e-12);
}

TEST(RadialDerivative, SecondOrderConvergence) {
  double prev = 0.0;
  for (std::size_t n : {256u, 512u, 1024u}) {
    auto g = Grid::make(GridSpec::radial(3, 8.0, n));
    const Field f = Field::from_radial(g, [](double r) { return std::exp(-r * r); });
    const Field d = radial_derivative(f);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = g->radius()[i];
      err = std::max(err, std::abs(d(0, i) + 2.0 * r * std::exp(-r * r)));
    }
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.5);
    prev = err;
  }
}

TEST(Laplacian, IsHalfTheDirichletGradient) {
  auto g = Grid::make(GridSpec::radial(3, 10.0, 256));
  std::mt19937_64 rng(3);
  const Field u = test::random_bumps(g, rng);
  Field phi = test::random_bumps(g, rng);
  const double eps = 1e-6;
  const double fd = (dirichlet_integral(u + eps * phi) - dirichlet_integral(u + (-eps) * phi)) / (2 * eps);
  const double an = inner(-2.0 * laplacian(u), phi);
  EXPECT_NEAR(fd, an, 1e-6 * std::abs(an));
}

TEST(Resample, IdentityAtTEqualsOne) {
  auto g = Grid::make(GridSpec::radial(3, 10.0, 256));
  const Field f = Field::from_radial(g, [](double r) { return std::exp(-r * r); });
  const Field r = resample(f, 1.0, ResampleMode::mass_preserving);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_DOUBLE_EQ(r(0, i), f(0, i));
}

TEST(Resample, MassPreservingKeepsTheL2Norm) {
  auto g = Grid::make(GridSpec::radial(3));
  const Field f = Field::from_radial(g, [](double r) { return std::exp(-r * r / 2); });
  for (double t : {0.5, 2.0, 4.0, 0.3, 1.7}) {
    const Field r = resample(f, t, ResampleMode::mass_preserving, compatible_grid(*g, t, ResampleMode::mass_preserving));
    EXPECT_NEAR(l2_norm_sq(r), l2_norm_sq(f), 1e-12 * l2_norm_sq(f)) << "t=" << t;
  }
  for (double t : {0.5, 2.0}) {
    const Field r = resample(f, t, ResampleMode::mass_preserving);
    EXPECT_NEAR(l2_norm_sq(r), l2_norm_sq(f), 1e-4 * l2_norm_sq(f)) << "same-grid t=" << t;
  }
}

TEST(Resample, DilationScalesTheMass) {
  for (int N : {1, 3}) {
    const GridSpec spec = N == 1 ? GridSpec::line(20.0, 1024) : GridSpec::radial(3, 10.0, 512);
    auto g = Grid::make(spec);
    const Field f = Field::from_radial(g, [](double r) { return std::exp(-r * r); });
    const double t = std::pow(2.0, N);
    auto target = Grid::make(spec.scaled(2.0));
    const Field v = resample(f, t, ResampleMode::dilation, target);
    EXPECT_NEAR(l2_norm_sq(v), t * l2_norm_sq(f), 1e-12 * t * l2_norm_sq(f));
  }
}

TEST(Resample, DerivativeScalesLikeTheChainRule) {
  auto g = Grid::make(GridSpec::radial(3, 10.0, 1024));
  const Field f = Field::from_radial(g, [](double r) { return std::exp(-r * r); });
  const double t = 2.0;
  const Field d = radial_derivative(resample(f, t, ResampleMode::mass_preserving));
  for (std::size_t i = 10; i < 400; i += 37) {
    const double r = g->radius()[i];
    const double expect = std::pow(t, 2.5) * (-2.0 * t * r * std::exp(-t * t * r * r));
    EXPECT_NEAR(d(0, i), expect, 2e-3 * std::pow(t, 2.5));
  }
}

TEST(Resample, RejectsOtherSymmetryClass) {
  auto g = Grid::make(GridSpec::radial(3, 10.0, 64));
  auto l = Grid::make(GridSpec::line(10.0, 64));
  EXPECT_THROW(resample(Field(g), 2.0, ResampleMode::dilation, l), GridMismatch);
  EXPECT_THROW(resample(Field(g), -1.0, ResampleMode::dilation), InvalidArgument);
}

TEST(Field, RejectsNonFiniteAndMismatchedGrids) {
  auto g = Grid::make(GridSpec::line(10.0, 64));
  Field f(g);
  f(0, 3) = std::nan("");
  EXPECT_FALSE(f.all_finite());
  EXPECT_THROW(f.check_finite("test"), NonFiniteValue);
  auto h = Grid::make(GridSpec::line(11.0, 64));
  EXPECT_THROW(Field(g) + Field(h), GridMismatch);
  EXPECT_THROW(Field(g, 1, std::vector<double>(3)), InvalidArgument);
}

TEST(FieldCsv, RoundTripsBitExactly) {
  for (const GridSpec& spec : {GridSpec::radial(3, 5.0, 32), GridSpec::line(5.0, 32),
                               GridSpec::cylindrical(2, 3, 5.0, 5.0, 16, 16)}) {
    auto g = Grid::make(spec);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    Field f(g, 2);
    for (double& v : f.values()) v = nd(rng);
    std::stringstream ss;
    write_field_csv(ss, f);
    const std::string header = spec.kind == GridKind::cylindrical ? "coord1,coord2,component,value"
                                                                  : "coord1,component,value";
    EXPECT_EQ(ss.str().substr(0, header.size()), header);
    const Field back = read_field_csv(ss, g);
    ASSERT_EQ(back.components(), 2u);
    for (std::size_t i = 0; i < f.values().size(); ++i) EXPECT_EQ(back.values()[i], f.values()[i]);
  }
}

TEST(FieldCsv, RejectsForeignGrid) {
  auto g = Grid::make(GridSpec::line(5.0, 32));
  std::stringstream ss;
  write_field_csv(ss, Field(g));
  EXPECT_THROW(read_field_csv(ss, Grid::make(GridSpec::line(6.0, 32))), Error);
}

TEST(FormatNumber, SeventeenSignificantDigits) {
  EXPECT_EQ(format_number(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}
