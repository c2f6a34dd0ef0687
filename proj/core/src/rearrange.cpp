#include "ccmin/rearrange.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "ccmin/error.hpp"
#include "ccmin/field_io.hpp"

namespace ccmin {

std::string surgery_csv_header() { return "surgery,mass_before,mass_after,total_before,total_after"; }

std::string surgery_csv_row(const SurgeryReport& r) {
  return r.surgery + ',' + format_number(r.mass_before) + ',' + format_number(r.mass_after) + ',' +
         format_number(r.energy_before.total) + ',' + format_number(r.energy_after.total);
}

namespace {

void require_line(const Field& u, const char* what) {
  if (u.grid().kind() != GridKind::line) {
    throw GridMismatch(std::string(what) + ": requires a line grid, got " +
                       u.grid().spec().describe());
  }
}

double scale_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double cap(double rho, double radius) {
  if (rho >= radius) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * rho / radius);
  return c * c;
}

}  // namespace

// ---------------------------------------------------------------- rearrangement

Field schwarz_rearrange(const Field& u) {
  const Grid& g = u.grid();
  if (g.kind() == GridKind::cylindrical) {
    throw GridMismatch("schwarz_rearrange: cylindrical grids are not supported");
  }
  const std::size_t n = g.size();
  const auto w = g.weights();

  // target cells from the center outward: single nodes (radial) or +-x pairs (line)
  std::vector<std::array<std::size_t, 2>> cells;
  std::vector<double> cell_measure;
  if (g.kind() == GridKind::radial) {
    for (std::size_t i = 0; i < n; ++i) {
      cells.push_back({i, i});
      cell_measure.push_back(w[i]);
    }
  } else {
    const std::size_t c = n / 2;
    for (std::size_t j = 0; j < c; ++j) {
      cells.push_back({c - 1 - j, c + j});
      cell_measure.push_back(w[c - 1 - j] + w[c + j]);
    }
  }
  std::vector<double> C(cells.size() + 1, 0.0);
  for (std::size_t j = 0; j < cells.size(); ++j) C[j + 1] = C[j] + cell_measure[j];

  Field out(u.grid_ptr(), u.components());
  std::vector<std::size_t> idx(n);
  std::vector<double> a(n), M(n + 1);
  for (std::size_t k = 0; k < u.components(); ++k) {
    const auto v = u.component(k);
    for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(v[i]);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return a[x] > a[y]; });
    M[0] = 0.0;
    for (std::size_t q = 0; q < n; ++q) M[q + 1] = M[q] + w[idx[q]];

    std::size_t q = 0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double lo = C[j], hi = C[j + 1];
      while (q < n && M[q + 1] <= lo) ++q;
      double acc = 0.0, single = 0.0;
      int pieces = 0;
      for (std::size_t r = q; r < n && M[r] < hi; ++r) {
        const double ov = std::min(M[r + 1], hi) - std::max(M[r], lo);
        if (ov <= 0.0) continue;
        const double s = a[idx[r]];
        acc += s * s * ov;
        single = s;
        ++pieces;
      }
      const double value = pieces == 1 ? single : std::sqrt(acc / cell_measure[j]);
      out(k, cells[j][0]) = value;
      out(k, cells[j][1]) = value;
    }
  }
  return out;
}

// ---------------------------------------------------------------- plateau

PlateauResult plateau_insert(const ProblemSpec& p, const Field& u, double target_mass,
                             std::optional<double> rho) {
  require_line(u, "plateau_insert");
  if (!(target_mass >= 0.0) || !std::isfinite(target_mass)) {
    throw InvalidArgument("plateau_insert: target mass must be nonnegative");
  }
  const Grid& g = u.grid();
  const std::size_t n = g.size(), c = n / 2, J = n / 2;
  const double h = g.axis(0).h;
  const auto v0 = u.component(0);
  const double tol = 1e-12 * scale_of(v0);
  std::vector<double> half(J);
  for (std::size_t j = 0; j < J; ++j) {
    half[j] = v0[c + j];
    if (std::abs(v0[c + j] - v0[c - 1 - j]) > tol) {
      throw PreconditionViolated("plateau_insert: u is not even");
    }
    if (half[j] < 0.0) throw PreconditionViolated("plateau_insert: u is negative");
    if (j > 0 && half[j] > half[j - 1] + tol) {
      throw PreconditionViolated("plateau_insert: u is not non-increasing in |x|");
    }
  }

  std::size_t jr = 0;
  if (rho) {
    const double pos = *rho / h - 0.5;
    jr = pos <= 0.0 ? 0 : std::min<std::size_t>(J - 1, static_cast<std::size_t>(std::lround(pos)));
  } else {
    while (jr < J && half[jr] > p.nonlinearity.delta) ++jr;
    if (jr == J) throw PreconditionViolated("plateau_insert: u never drops below delta");
  }
  const double level = half[jr];
  if (!(level > 0.0)) throw PreconditionViolated("plateau_insert: u(rho) = 0");

  const auto& G = p.constraint.G;
  const double g_level = G(level);
  PlateauResult res;
  res.rho = (static_cast<double>(jr) + 0.5) * h;
  res.level = level;
  res.w_len = target_mass / (2.0 * g_level);

  std::vector<std::size_t> dup(J, 0);
  dup[jr] = static_cast<std::size_t>(std::floor(res.w_len / h));
  if (jr + dup[jr] >= J) throw PreconditionViolated("plateau_insert: plateau exceeds the grid extent");
  double rem = target_mass - 2.0 * h * static_cast<double>(dup[jr]) * g_level;
  // place the sub-cell remainder on duplicated tail nodes (decreasing, so greedy converges)
  for (std::size_t j = jr + 1; j < J && rem > 1e-15 * target_mass; ++j) {
    const double item = 2.0 * h * G(half[j]);
    if (item > 0.0 && item <= rem) {
      dup[j] = 1;
      rem -= item;
      ++res.tail_cells;
    }
  }
  res.plateau_cells = dup[jr];

  std::vector<double> fresh;
  fresh.reserve(2 * J);
  for (std::size_t j = 0; j < J; ++j) fresh.insert(fresh.end(), 1 + dup[j], half[j]);
  for (std::size_t j = J; j < fresh.size(); ++j) res.dropped_mass += 2.0 * h * G(fresh[j]);
  if (rem + res.dropped_mass > 1e-9 * std::max(target_mass, 1e-300) && target_mass > 0.0) {
    throw PreconditionViolated("plateau_insert: shifting the profile pushes non-negligible mass "
                               "past the grid extent");
  }

  res.field = u;
  auto out = res.field.component(0);
  for (std::size_t j = 0; j < J; ++j) {
    out[c + j] = fresh[j];
    out[c - 1 - j] = fresh[j];
  }
  res.report.surgery = "plateau_insert";
  res.report.mass_before = constraint_value(p, u);
  res.report.mass_after = constraint_value(p, res.field);
  res.report.energy_before = total_energy(p, u);
  res.report.energy_after = total_energy(p, res.field);
  res.report.description = "plateau at rho=" + format_number(res.rho) +
                           " level=" + format_number(level) + " w_len=" + format_number(res.w_len);
  return res;
}

// ---------------------------------------------------------------- dip filling

DipResult fill_dip(const ProblemSpec& p, const Field& u, double x1, double x2) {
  require_line(u, "fill_dip");
  const Grid& g = u.grid();
  const Axis& ax = g.axis(0);
  const auto node = [&](double x) {
    const double pos = (x + ax.extent) / ax.h - 0.5;
    if (pos < 0.0 || pos > static_cast<double>(ax.n - 1)) {
      throw InvalidArgument("fill_dip: point outside the grid");
    }
    return static_cast<std::size_t>(std::lround(pos));
  };
  const std::size_t i1 = node(x1), i2 = node(x2);
  if (i2 <= i1) throw InvalidArgument("fill_dip: need x1 < x2 at grid resolution");
  const auto v = u.component(0);
  const double level = v[i1];
  const double tol = 1e-12 * scale_of(v);

  auto step = [&](std::size_t i) {
    double s = 0.0;
    if (i > 0) s = std::max(s, std::abs(v[i] - v[i - 1]));
    if (i + 1 < v.size()) s = std::max(s, std::abs(v[i + 1] - v[i]));
    return s;
  };
  if (std::abs(v[i2] - level) > std::max(step(i1), step(i2)) + tol) {
    throw PreconditionViolated("fill_dip: u(x1) and u(x2) differ by more than one cell");
  }
  for (std::size_t i = i1 + 1; i < i2; ++i) {
    if (v[i] > level + tol) {
      throw PreconditionViolated("fill_dip: no dip between x1 and x2 (u exceeds u(x1))");
    }
  }

  DipResult res;
  res.level = level;
  res.field = u;
  auto out = res.field.component(0);
  const auto w = g.weights();
  const auto& G = p.constraint.G;
  for (std::size_t i = i1; i <= i2; ++i) {
    res.added_mass += w[i] * (G(level) - G(v[i]));
    out[i] = level;
  }
  Field c0(u.grid_ptr(), 1, std::vector<double>(v.begin(), v.end()));
  Field c1(u.grid_ptr(), 1, std::vector<double>(out.begin(), out.end()));
  res.dirichlet_before = dirichlet_integral(c0);
  res.dirichlet_after = dirichlet_integral(c1);
  res.report.surgery = "fill_dip";
  res.report.mass_before = constraint_value(p, u);
  res.report.mass_after = constraint_value(p, res.field);
  res.report.energy_before = total_energy(p, u);
  res.report.energy_after = total_energy(p, res.field);
  res.report.description = "level=" + format_number(level) + " added_mass=" + format_number(res.added_mass);
  return res;
}

// ---------------------------------------------------------------- truncation

Field truncate_renormalize(const Field& u, double R_cut) {
  const Grid& g = u.grid();
  const auto r = g.radius();
  const double r_far = *std::max_element(r.begin(), r.end()) + g.min_spacing();
  if (!(R_cut > 0.0) || R_cut > r_far) {
    throw InvalidArgument("truncate_renormalize: R_cut must lie within the grid extent");
  }
  const double before = l2_norm_sq(u);
  if (before == 0.0) throw InvalidArgument("truncate_renormalize: u is identically zero");
  Field out = u;
  const double r_in = 0.9 * R_cut;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double chi = 1.0 - smooth_step((r[i] - r_in) / (R_cut - r_in));
    if (chi == 1.0) continue;
    for (std::size_t k = 0; k < u.components(); ++k) out(k, i) *= chi;
  }
  const double after = l2_norm_sq(out);
  if (after == 0.0) throw PreconditionViolated("truncate_renormalize: nothing left inside R_cut");
  if (after != before) out *= std::sqrt(before / after);
  return out;
}

// ---------------------------------------------------------------- far-field bump

namespace {

constexpr std::size_t kBumpNodes = 2048;
constexpr double kSeedRadius = 1.0;

// cos^2 cap on [0, radius) sampled on a radial(N) grid, scaled to mass d
Field seed_bump(int N, double d, double radius) {
  auto grid = Grid::make(GridSpec::radial(N, radius, kBumpNodes));
  Field f = Field::from_radial(grid, [radius](double rho) { return cap(rho, radius); });
  f *= std::sqrt(d / l2_norm_sq(f));
  return f;
}

// Same node values as t^{N/2} seed on the grid scaled by 1/t.
Field shrink(const Field& seed, double t) {
  auto grid = Grid::make(seed.grid().spec().scaled(1.0 / t));
  const int N = seed.grid().dimension();
  Field f(grid, 1, std::vector<double>(seed.values().begin(), seed.values().end()));
  f *= std::pow(t, 0.5 * N);
  return f;
}

// Places the radial profile around x = center on a line grid, rescaled to mass d.
Field place_on_line(const Field& profile, GridPtr line, double center, double d) {
  Field v(line, 1);
  const auto x = line->coord1();
  const double R = profile.grid().spec().extent;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double rho = std::abs(x[i] - center);
    if (rho < R) v(0, i) = interpolate(profile, 0, rho);
  }
  const double m = l2_norm_sq(v);
  if (m > 0.0) v *= std::sqrt(d / m);
  return v;
}

}  // namespace

FarFieldBump far_field_bump(const ProblemSpec& p, double d, double R0, double eps) {
  if (p.family != Family::stuart) throw InvalidArgument("far_field_bump: stuart family only");
  if (!(d > 0.0) || !(eps > 0.0) || !(R0 >= 0.0)) {
    throw InvalidArgument("far_field_bump: need d > 0, eps > 0, R0 >= 0");
  }
  const int N = p.space_dimension();
  const Field seed = seed_bump(N, d, kSeedRadius);
  FarFieldBump b;
  b.seed_gradient_sq = dirichlet_integral(seed);
  const double seed_sup = seed.max_abs();
  const double delta = std::min(p.nonlinearity.delta, 1e150);
  double t = std::min({1.0, std::sqrt(eps / (p.kinetic_prefactor * b.seed_gradient_sq)),
                       std::pow(delta / seed_sup, 2.0 / N)});

  for (int attempt = 0; attempt < 60; ++attempt, t *= 0.5) {
    b.t0 = t;
    b.profile = shrink(seed, t);
    b.support_radius = kSeedRadius / t;
    b.center_offset = R0 + 1.01 * b.support_radius;
    b.gradient_sq = dirichlet_integral(b.profile);
    b.mass = l2_norm_sq(b.profile);
    b.sup = b.profile.max_abs();
    const double kinetic = p.kinetic_prefactor * b.gradient_sq;

    double f_lo = 0.0, f_hi = 0.0;
    if (!p.nonlinearity.is_zero()) {
      const double r_min = b.center_offset - b.support_radius;
      const double r_max = b.center_offset + b.support_radius;
      constexpr int kSamples = 65;
      const auto w = b.profile.grid().weights();
      double s[1];
      for (std::size_t i = 0; i < b.profile.size(); ++i) {
        s[0] = b.profile(0, i);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int q = 0; q < kSamples; ++q) {
          const double r = r_min + (r_max - r_min) * q / (kSamples - 1);
          const double val = p.nonlinearity.F(r, s);
          lo = std::min(lo, val);
          hi = std::max(hi, val);
        }
        f_lo += w[i] * lo;
        f_hi += w[i] * hi;
      }
    }
    b.I_lo = kinetic - f_hi;
    b.I_hi = kinetic - f_lo;
    b.certified = b.I_hi <= eps;
    if (b.certified) break;
  }

  if (p.grid.kind == GridKind::line && b.center_offset + b.support_radius < p.grid.extent) {
    b.placed = place_on_line(b.profile, Grid::make(p.grid), b.center_offset, d);
  }
  b.report.surgery = "far_field_bump";
  b.report.mass_before = 0.0;
  b.report.mass_after = b.mass;
  b.report.energy_after.j_term = b.gradient_sq;
  b.report.energy_after.f_term = p.kinetic_prefactor * b.gradient_sq - b.I_hi;
  b.report.energy_after.total = b.I_hi;
  b.report.energy_after.constraint_value = b.mass;
  b.report.description = "t0=" + format_number(b.t0) + " |y0|=" + format_number(b.center_offset) +
                         " I in [" + format_number(b.I_lo) + ", " + format_number(b.I_hi) + "]";
  return b;
}

// ---------------------------------------------------------------- disjoint mass

DisjointMassResult add_disjoint_mass(const ProblemSpec& p, const Field& u, double c, double eps) {
  const Grid& g = u.grid();
  if (g.kind() == GridKind::cylindrical) {
    throw GridMismatch("add_disjoint_mass: line or radial grids only");
  }
  if (p.constraint.name != "G_square") {
    throw InvalidArgument("add_disjoint_mass: requires the L^2 constraint");
  }
  if (!(eps > 0.0)) throw InvalidArgument("add_disjoint_mass: eps must be positive");
  const double m_u = constraint_value(p, u);
  const double deficit = c - m_u;
  if (!(deficit > 0.0)) throw InvalidArgument("add_disjoint_mass: need ||u||^2 < c");

  const double h = g.min_spacing();
  const auto r = g.radius();
  double support = 0.0;
  for (std::size_t k = 0; k < u.components(); ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (u(k, i) != 0.0) support = std::max(support, r[i]);
    }
  }
  const double inner_edge = support + 2.0 * h;
  const double outer_limit = g.spec().extent - 2.0 * h;
  const EnergyBreakdown e_u = total_energy(p, u);

  DisjointMassResult res;
  auto try_width = [&](double half_width) -> bool {
    Field v(u.grid_ptr(), u.components());
    double center;
    if (g.kind() == GridKind::line) {
      center = inner_edge + half_width;
      if (center + half_width > outer_limit) return false;
      const Field profile = shrink(seed_bump(1, deficit, kSeedRadius), kSeedRadius / half_width);
      const Field placed = place_on_line(profile, u.grid_ptr(), center, deficit);
      std::copy(placed.values().begin(), placed.values().end(), v.component(0).begin());
    } else {
      center = inner_edge + half_width;
      if (center + half_width > outer_limit) return false;
      for (std::size_t i = 0; i < g.size(); ++i) v(0, i) = cap(std::abs(r[i] - center), half_width);
      Field v0(u.grid_ptr(), 1, std::vector<double>(v.component(0).begin(), v.component(0).end()));
      v *= std::sqrt(deficit / l2_norm_sq(v0));
    }
    Field sum = u;
    sum += v;
    const EnergyBreakdown e_sum = total_energy(p, sum);
    const EnergyBreakdown e_v = total_energy(p, v);
    const bool local = p.family != Family::choquard;
    const double kinetic_v = p.kinetic_prefactor * e_v.j_term;
    if ((local && e_sum.total > e_u.total + eps) || (!local && kinetic_v > eps)) return true;
    res.field = std::move(sum);
    res.added = std::move(v);
    res.separation = center;
    res.report.energy_after = e_sum;
    if (p.family == Family::choquard) {
      res.cross_term = e_sum.coulomb_term - e_u.coulomb_term - e_v.coulomb_term;
    }
    return true;
  };

  // widen the bump until the energy budget holds; fail once it no longer fits
  bool done = false;
  for (double hw = std::max(4.0 * h, 0.25); ; hw *= 1.25) {
    if (!try_width(hw)) break;
    if (res.added.size() > 0) {
      done = true;
      break;
    }
  }
  if (!done) {
    throw PreconditionViolated("add_disjoint_mass: insufficient grid extent for a disjoint bump "
                               "within the energy budget");
  }
  res.added_mass = l2_norm_sq(res.added);
  res.report.surgery = "add_disjoint_mass";
  res.report.mass_before = m_u;
  res.report.mass_after = constraint_value(p, res.field);
  res.report.energy_before = e_u;
  res.report.description = "separation=" + format_number(res.separation) +
                           " added_mass=" + format_number(res.added_mass);
  return res;
}

}  // namespace ccmin
