#include "ccmin/catalog.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ccmin/error.hpp"

namespace ccmin {

namespace {

constexpr double kPlaplaceReg = 1e-12;

const std::vector<ParamSpec> kGrowthParams = {
    {"C", 1.0, "growth constant: j(s,t) <= C|s|^6 + C t^2"},
    {"beta", 1.0, "small-argument bound: j(s,t) <= beta t^p on [0,alpha]^2"},
    {"alpha", 1.0, "range of the small-argument bound"},
};

std::vector<ParamSpec> with_growth(std::vector<ParamSpec> own) {
  own.insert(own.end(), kGrowthParams.begin(), kGrowthParams.end());
  return own;
}

std::vector<CatalogEntry> build_catalog() {
  return {
      {"lagrangian", "j_quadratic", "j(s,t) = t^2", with_growth({})},
      {"lagrangian", "j_plaplace", "j(s,t) = (t^2 + 1e-12)^{p/2} - 1e-12^{p/2}",
       with_growth({{"p", 2.0, "gradient exponent, p > 1"}})},
      {"lagrangian", "j_quad_plus_quartic", "j(s,t) = (1 + kappa s^2) t^2",
       with_growth({{"kappa", 1.0, "s-dependent stiffening, kappa >= 0"}})},
      {"nonlinearity", "F_zero", "F = 0", {}},
      {"nonlinearity", "F_power", "F(r,s) = A (1+r)^{-d} sum_k |s_k|^{2+alpha}",
       {{"A", 1.0, "amplitude, A > 0"},
        {"d", 1.0, "radial decay exponent, d >= 0"},
        {"alpha", 0.5, "excess exponent, alpha > 0"},
        {"r0", 0.0, "radius beyond which the lower bound is claimed"},
        {"delta", 1.0, "amplitude range of the lower bound"}}},
      {"nonlinearity", "F_coupled",
       "F(r,s) = a(r)/(p+sigma) [sum_k |s_k|^{p+sigma} + 2 beta sum_{i!=j} "
       "|s_i s_j|^{(p+sigma)/2}],  a(r) = a0 (1+r)^{-tau}",
       {{"a0", 1.0, "weight amplitude, a0 > 0"},
        {"tau", 0.0, "weight decay exponent, 0 <= tau < p"},
        {"sigma", 1.0, "excess exponent, sigma >= 0"},
        {"beta", 0.0, "coupling strength, beta >= 0"},
        {"p", 2.0, "base exponent, p > 1"}}},
      {"nonlinearity", "F_saturable", "F(s) = A |s|^q / (1 + |s|^{q-2})",
       {{"A", 1.0, "amplitude, A > 0"},
        {"q", 4.0, "small-amplitude exponent, q > 2"},
        {"delta", 1.0, "amplitude range used by surgeries"}}},
      {"constraint", "G_square", "G(s) = s^2", {}},
      {"constraint", "G_power", "G(s) = |s|^p", {{"p", 2.0, "homogeneity degree, p > 1"}}},
  };
}

const CatalogEntry& find_entry(const std::string& kind, const std::string& name) {
  for (const CatalogEntry& e : catalog()) {
    if (e.kind == kind && e.name == name) return e;
  }
  throw InvalidArgument("unknown " + kind + " '" + name + "'");
}

Params resolve(const CatalogEntry& e, const Params& given) {
  Params out;
  for (const ParamSpec& p : e.params) out[p.name] = p.default_value;
  for (const auto& [key, value] : given) {
    if (!out.contains(key)) {
      throw InvalidArgument("unknown parameter '" + key + "' for " + e.name);
    }
    if (!std::isfinite(value)) {
      throw InvalidArgument("parameter '" + key + "' of " + e.name + " must be finite");
    }
    out[key] = value;
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

Lagrangian make_lagrangian(const std::string& name, const Params& given) {
  const CatalogEntry& e = find_entry("lagrangian", name);
  const Params prm = resolve(e, given);
  Lagrangian L;
  L.name = name;
  L.params = prm;
  L.growth_C = prm.at("C");
  L.coerc_beta = prm.at("beta");
  L.coerc_alpha = prm.at("alpha");
  require(L.growth_C > 0 && L.coerc_beta > 0 && L.coerc_alpha > 0,
          name + ": growth constants must be positive");
  if (name == "j_quadratic") {
    L.j = [](double, double t) { return t * t; };
    L.j_s = [](double, double) { return 0.0; };
    L.j_t = [](double, double t) { return 2.0 * t; };
    L.quadratic_coefficient = 1.0;
  } else if (name == "j_plaplace") {
    const double p = prm.at("p");
    require(p > 1.0, "j_plaplace: p must exceed 1");
    const double base = std::pow(kPlaplaceReg, 0.5 * p);
    L.j = [p, base](double, double t) { return std::pow(t * t + kPlaplaceReg, 0.5 * p) - base; };
    L.j_s = [](double, double) { return 0.0; };
    L.j_t = [p](double, double t) {
      return p * t * std::pow(t * t + kPlaplaceReg, 0.5 * p - 1.0);
    };
    L.p = p;
    // the regularization only lowers j below t^p when p < 2, and only for t ~ 1e-6
    L.nu = p >= 2.0 ? 1.0 : 0.5;
    if (p == 2.0) L.quadratic_coefficient = 1.0;
  } else {  // j_quad_plus_quartic
    const double kappa = prm.at("kappa");
    require(kappa >= 0.0, "j_quad_plus_quartic: kappa must be nonnegative");
    L.j = [kappa](double s, double t) { return (1.0 + kappa * s * s) * t * t; };
    L.j_s = [kappa](double s, double t) { return 2.0 * kappa * s * t * t; };
    L.j_t = [kappa](double s, double t) { return 2.0 * (1.0 + kappa * s * s) * t; };
    if (kappa == 0.0) L.quadratic_coefficient = 1.0;
  }
  return L;
}

Nonlinearity make_nonlinearity(const std::string& name, const Params& given,
                               std::size_t components) {
  const CatalogEntry& e = find_entry("nonlinearity", name);
  const Params prm = resolve(e, given);
  require(components >= 1, name + ": at least one component");
  Nonlinearity N;
  N.name = name;
  N.params = prm;
  N.components = components;
  if (name == "F_zero") {
    N.delta = 1e300;
    return N;
  }
  if (name == "F_power") {
    const double A = prm.at("A"), d = prm.at("d"), alpha = prm.at("alpha");
    require(A > 0.0, "F_power: A must be positive");
    require(d >= 0.0, "F_power: d must be nonnegative");
    require(alpha > 0.0, "F_power: alpha must be positive");
    const double q = 2.0 + alpha;
    N.F = [A, d, q](double r, std::span<const double> s) {
      double sum = 0.0;
      for (double x : s) sum += std::pow(std::abs(x), q);
      return A * std::pow(1.0 + r, -d) * sum;
    };
    N.f = [A, d, q](double r, std::span<const double> s, std::span<double> out) {
      const double w = A * std::pow(1.0 + r, -d) * q;
      for (std::size_t k = 0; k < s.size(); ++k) {
        out[k] = w * std::pow(std::abs(s[k]), q - 1.0) * sgn(s[k]);
      }
    };
    N.high_dimension = HighDimensionParams{A, d, alpha, prm.at("r0"), prm.at("delta")};
    N.delta = prm.at("delta");
  } else if (name == "F_coupled") {
    const double a0 = prm.at("a0"), tau = prm.at("tau"), sigma = prm.at("sigma");
    const double beta = prm.at("beta"), p = prm.at("p");
    require(a0 > 0.0, "F_coupled: a0 must be positive");
    require(p > 1.0, "F_coupled: p must exceed 1");
    require(tau >= 0.0 && tau < p, "F_coupled: tau must lie in [0, p)");
    require(sigma >= 0.0, "F_coupled: sigma must be nonnegative");
    require(beta >= 0.0, "F_coupled: beta must be nonnegative");
    const double q = p + sigma;
    N.F = [a0, tau, beta, q](double r, std::span<const double> s) {
      const double a = a0 * std::pow(1.0 + r, -tau);
      double diag = 0.0, cross = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        diag += std::pow(std::abs(s[i]), q);
        for (std::size_t j = 0; j < s.size(); ++j) {
          if (i != j) cross += std::pow(std::abs(s[i] * s[j]), 0.5 * q);
        }
      }
      return a / q * (diag + 2.0 * beta * cross);
    };
    N.f = [a0, tau, beta, q](double r, std::span<const double> s, std::span<double> out) {
      const double a = a0 * std::pow(1.0 + r, -tau);
      for (std::size_t k = 0; k < s.size(); ++k) {
        const double ak = std::abs(s[k]);
        double v = std::pow(ak, q - 1.0);
        if (beta > 0.0 && s.size() > 1 && ak > 0.0) {
          double others = 0.0;
          for (std::size_t j = 0; j < s.size(); ++j) {
            if (j != k) others += std::pow(std::abs(s[j]), 0.5 * q);
          }
          v += 2.0 * beta * std::pow(ak, 0.5 * q - 1.0) * others;
        }
        out[k] = a * v * sgn(s[k]);
      }
    };
    // (1+r)^{-tau} >= 2^{-tau} r^{-tau} for r >= 1
    N.zero_cv_bis = ZeroCvBisParams{a0 * std::pow(2.0, -tau) / q, tau, sigma,
                                    std::numeric_limits<double>::infinity(), 1.0, p};
    N.delta = std::numeric_limits<double>::infinity();
  } else {  // F_saturable
    const double A = prm.at("A"), q = prm.at("q");
    require(A > 0.0, "F_saturable: A must be positive");
    require(q > 2.0, "F_saturable: q must exceed 2");
    N.F = [A, q](double, std::span<const double> s) {
      double sum = 0.0;
      for (double x : s) {
        const double a = std::abs(x);
        sum += std::pow(a, q) / (1.0 + std::pow(a, q - 2.0));
      }
      return A * sum;
    };
    N.f = [A, q](double, std::span<const double> s, std::span<double> out) {
      for (std::size_t k = 0; k < s.size(); ++k) {
        const double a = std::abs(s[k]);
        const double b = std::pow(a, q - 2.0);
        out[k] = A * std::pow(a, q - 1.0) * (q + 2.0 * b) / ((1.0 + b) * (1.0 + b)) * sgn(s[k]);
      }
    };
    N.delta = prm.at("delta");
  }
  return N;
}

Constraint make_constraint(const std::string& name, const Params& given) {
  const CatalogEntry& e = find_entry("constraint", name);
  const Params prm = resolve(e, given);
  Constraint G;
  G.name = name;
  G.params = prm;
  if (name == "G_square") {
    G.G = [](double s) { return s * s; };
    G.dG = [](double s) { return 2.0 * s; };
    G.p = 2.0;
  } else {
    const double p = prm.at("p");
    require(p > 1.0, "G_power: p must exceed 1");
    G.G = [p](double s) { return std::pow(std::abs(s), p); };
    G.dG = [p](double s) { return p * std::pow(std::abs(s), p - 1.0) * sgn(s); };
    G.p = p;
  }
  G.gamma = 1.0;
  G.homogeneous = true;
  return G;
}

std::string list_catalog() {
  std::ostringstream os;
  const char* kinds[] = {"lagrangian", "nonlinearity", "constraint"};
  const char* titles[] = {"Lagrangians", "Nonlinearities", "Constraints"};
  for (int k = 0; k < 3; ++k) {
    os << titles[k] << ":\n";
    for (const CatalogEntry& e : catalog()) {
      if (e.kind != kinds[k]) continue;
      os << "  " << e.name << '(';
      for (std::size_t i = 0; i < e.params.size(); ++i) os << (i ? ", " : "") << e.params[i].name;
      os << ")\n    " << e.formula << '\n';
      for (const ParamSpec& p : e.params) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g", p.default_value);
        os << "    - " << p.name << " (default " << buf << "): " << p.description << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace ccmin
