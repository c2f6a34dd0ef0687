#include <gtest/gtest.h>

#include <string>

#include "ccmin/catalog.hpp"
#include "ccmin/error.hpp"

using namespace ccmin;

namespace {

template <class Fn>
std::string error_of(Fn&& fn) {
  try {
    fn();
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Catalog, UnknownNamesAreReportedByName) {
  EXPECT_NE(error_of([] { make_lagrangian("j_cubic"); }).find("j_cubic"), std::string::npos);
  EXPECT_NE(error_of([] { make_nonlinearity("F_nope"); }).find("F_nope"), std::string::npos);
  EXPECT_NE(error_of([] { make_constraint("G_weird"); }).find("G_weird"), std::string::npos);
}

TEST(Catalog, UnknownParameterKeysAreReportedByName) {
  EXPECT_NE(error_of([] { make_nonlinearity("F_power", {{"gamma", 1.0}}); }).find("gamma"),
            std::string::npos);
  EXPECT_NE(error_of([] { make_lagrangian("j_plaplace", {{"q", 3.0}}); }).find("q"), std::string::npos);
}

TEST(Catalog, ParameterRangesAreEnforced) {
  EXPECT_THROW(make_lagrangian("j_plaplace", {{"p", 1.0}}), InvalidArgument);
  EXPECT_THROW(make_nonlinearity("F_power", {{"A", -1.0}}), InvalidArgument);
  EXPECT_THROW(make_nonlinearity("F_coupled", {{"tau", 2.5}, {"p", 2.0}}), InvalidArgument);
  EXPECT_THROW(make_nonlinearity("F_saturable", {{"q", 2.0}}), InvalidArgument);
  EXPECT_THROW(make_constraint("G_power", {{"p", 0.5}}), InvalidArgument);
}

TEST(Catalog, DefaultsAreFilledIn) {
  const Nonlinearity F = make_nonlinearity("F_coupled");
  for (const char* key : {"a0", "tau", "sigma", "beta", "p"}) EXPECT_EQ(F.params.count(key), 1u) << key;
  const Lagrangian j = make_lagrangian("j_quadratic");
  EXPECT_EQ(j.params.at("C"), 1.0);
  EXPECT_EQ(j.params.at("beta"), 1.0);
  EXPECT_EQ(j.params.at("alpha"), 1.0);
  ASSERT_TRUE(j.quadratic_coefficient.has_value());
  EXPECT_EQ(*j.quadratic_coefficient, 1.0);
}

TEST(Catalog, ListingNamesEveryEntryAndIsStable) {
  const std::string a = list_catalog();
  EXPECT_EQ(a, list_catalog());
  for (const auto& e : catalog()) EXPECT_NE(a.find(e.name), std::string::npos) << e.name;
  EXPECT_NE(a.find("j_quadratic"), std::string::npos);
  EXPECT_NE(a.find("F_coupled(a0, tau, sigma, beta, p)"), std::string::npos);
}

TEST(Catalog, BuiltInEntriesSatisfyTheirStructuralChecks) {
  for (const char* name : {"j_quadratic", "j_plaplace", "j_quad_plus_quartic"}) {
    const auto rep = validate_lagrangian(make_lagrangian(name));
    EXPECT_TRUE(rep.pass()) << name << ": " << (rep.violations.empty() ? "" : rep.violations.front());
    EXPECT_GT(rep.samples, 0u);
  }
  for (const char* name : {"F_power", "F_coupled", "F_saturable"}) {
    const auto rep = validate_nonlinearity(make_nonlinearity(name));
    EXPECT_TRUE(rep.pass()) << name;
  }
  for (const char* name : {"G_square", "G_power"}) EXPECT_TRUE(validate_constraint(make_constraint(name)).pass());
}

TEST(Catalog, NonlinearitiesVanishAtZero) {
  const std::vector<double> zero(2, 0.0);
  for (const char* name : {"F_power", "F_coupled", "F_saturable"}) {
    const Nonlinearity F = make_nonlinearity(name, {}, 2);
    for (double r : {0.0, 1.0, 7.0}) EXPECT_EQ(F.F(r, zero), 0.0) << name;
  }
}

TEST(Catalog, PartialsMatchFiniteDifferences) {
  const Nonlinearity F = make_nonlinearity("F_coupled", {{"beta", 0.7}, {"sigma", 1.5}, {"tau", 0.5}}, 2);
  std::vector<double> s{0.4, 1.3}, f(2);
  F.f(2.0, s, f);
  for (std::size_t k = 0; k < 2; ++k) {
    auto sp = s, sm = s;
    sp[k] += 1e-6;
    sm[k] -= 1e-6;
    EXPECT_NEAR((F.F(2.0, sp) - F.F(2.0, sm)) / 2e-6, f[k], 1e-7);
  }
  const Lagrangian j = make_lagrangian("j_quad_plus_quartic", {{"kappa", 0.5}});
  EXPECT_NEAR((j.j(0.7 + 1e-6, 1.1) - j.j(0.7 - 1e-6, 1.1)) / 2e-6, j.j_s(0.7, 1.1), 1e-7);
  EXPECT_NEAR((j.j(0.7, 1.1 + 1e-6) - j.j(0.7, 1.1 - 1e-6)) / 2e-6, j.j_t(0.7, 1.1), 1e-7);
}
