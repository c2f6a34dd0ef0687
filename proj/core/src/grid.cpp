#include "ccmin/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ccmin/error.hpp"

namespace ccmin {

std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::radial: return "radial";
    case GridKind::line: return "line";
    case GridKind::cylindrical: return "cylindrical";
  }
  return "unknown";
}

GridSpec GridSpec::radial(int dimension, double r_max, std::size_t nodes) {
  GridSpec s;
  s.kind = GridKind::radial;
  s.dimension = dimension;
  s.extent = r_max;
  s.nodes = nodes;
  return s;
}

GridSpec GridSpec::line(double x_max, std::size_t nodes) {
  GridSpec s;
  s.kind = GridKind::line;
  s.dimension = 1;
  s.extent = x_max;
  s.nodes = nodes;
  return s;
}

GridSpec GridSpec::cylindrical(int k, int dimension, double s_max, double w_max, std::size_t ns,
                               std::size_t nw) {
  GridSpec s;
  s.kind = GridKind::cylindrical;
  s.dimension = dimension;
  s.split = k;
  s.extent = s_max;
  s.extent2 = w_max;
  s.nodes = ns;
  s.nodes2 = nw;
  return s;
}

void GridSpec::validate() const {
  auto fail = [this](const std::string& why) {
    throw InvalidArgument("invalid grid " + describe() + ": " + why);
  };
  if (!(extent > 0.0) || !std::isfinite(extent)) fail("extent must be positive");
  if (nodes < 16) fail("at least 16 nodes per axis required");
  switch (kind) {
    case GridKind::radial:
      if (dimension < 1) fail("dimension must be >= 1");
      break;
    case GridKind::line:
      if (dimension != 1) fail("line grids have dimension 1");
      if (nodes % 2 != 0) fail("line grids need an even node count to stay symmetric");
      break;
    case GridKind::cylindrical:
      if (split < 1 || split >= dimension) fail("split k must satisfy 1 <= k < N");
      if (!(extent2 > 0.0) || !std::isfinite(extent2)) fail("second extent must be positive");
      if (nodes2 < 16) fail("at least 16 nodes per axis required");
      break;
  }
}

GridSpec GridSpec::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw InvalidArgument("grid scale factor must be positive");
  }
  GridSpec s = *this;
  s.extent *= factor;
  s.extent2 *= factor;
  return s;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind) {
    case GridKind::radial:
      os << "radial(N=" << dimension << ", r_max=" << extent << ", n=" << nodes << ")";
      break;
    case GridKind::line:
      os << "line(x_max=" << extent << ", n=" << nodes << ")";
      break;
    case GridKind::cylindrical:
      os << "cylindrical(k=" << split << ", N=" << dimension << ", s_max=" << extent
         << ", w_max=" << extent2 << ", n=" << nodes << "x" << nodes2 << ")";
      break;
  }
  return os.str();
}

double sphere_measure(int d) {
  if (d < 1) throw InvalidArgument("sphere_measure: dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

Axis Axis::make_radial(int dimension, double extent, std::size_t n) {
  Axis a;
  a.radial = true;
  a.dimension = dimension;
  a.n = n;
  a.extent = extent;
  a.h = extent / static_cast<double>(n);
  const double omega = sphere_measure(dimension);
  const double hd = std::pow(a.h, dimension);
  a.coord.resize(n);
  a.weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double di = static_cast<double>(i);
    a.coord[i] = (di + 0.5) * a.h;
    // exact shell measure between i*h and (i+1)*h
    a.weight[i] = omega / dimension * (std::pow(di + 1.0, dimension) - std::pow(di, dimension)) * hd;
  }
  a.edges.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = static_cast<double>(i + 1) * a.h;
    const std::size_t hi = (i + 1 < n) ? i + 1 : kGhost;
    a.edges.push_back(Edge{i, hi, a.h, omega * std::pow(re, dimension - 1) * a.h});
  }
  return a;
}

Axis Axis::make_line(double extent, std::size_t n) {
  Axis a;
  a.radial = false;
  a.dimension = 1;
  a.n = n;
  a.extent = extent;
  a.h = 2.0 * extent / static_cast<double>(n);
  a.coord.resize(n);
  a.weight.assign(n, a.h);
  for (std::size_t i = 0; i < n; ++i) {
    a.coord[i] = -extent + (static_cast<double>(i) + 0.5) * a.h;
  }
  // symmetric round-off: mirror the left half
  for (std::size_t i = 0; i < n / 2; ++i) a.coord[n - 1 - i] = -a.coord[i];
  a.edges.reserve(n + 1);
  a.edges.push_back(Edge{kGhost, 0, a.h, a.h});
  for (std::size_t i = 0; i + 1 < n; ++i) a.edges.push_back(Edge{i, i + 1, a.h, a.h});
  a.edges.push_back(Edge{n - 1, kGhost, a.h, a.h});
  return a;
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  switch (spec_.kind) {
    case GridKind::radial: {
      axes_.push_back(Axis::make_radial(spec_.dimension, spec_.extent, spec_.nodes));
      const Axis& a = axes_[0];
      weights_ = a.weight;
      radius_ = a.coord;
      axis_distance_ = a.coord;
      coord1_ = a.coord;
      edges_ = a.edges;
      break;
    }
    case GridKind::line: {
      axes_.push_back(Axis::make_line(spec_.extent, spec_.nodes));
      const Axis& a = axes_[0];
      weights_ = a.weight;
      coord1_ = a.coord;
      radius_.resize(a.n);
      for (std::size_t i = 0; i < a.n; ++i) radius_[i] = std::abs(a.coord[i]);
      axis_distance_ = radius_;
      edges_ = a.edges;
      break;
    }
    case GridKind::cylindrical: {
      axes_.push_back(Axis::make_radial(spec_.split, spec_.extent, spec_.nodes));
      axes_.push_back(Axis::make_radial(spec_.dimension - spec_.split, spec_.extent2, spec_.nodes2));
      const Axis& ay = axes_[0];
      const Axis& az = axes_[1];
      const std::size_t n1 = ay.n, n2 = az.n;
      weights_.resize(n1 * n2);
      radius_.resize(n1 * n2);
      axis_distance_.resize(n1 * n2);
      coord1_.resize(n1 * n2);
      coord2_.resize(n1 * n2);
      for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
          const std::size_t q = i * n2 + j;
          weights_[q] = ay.weight[i] * az.weight[j];
          radius_[q] = std::hypot(ay.coord[i], az.coord[j]);
          axis_distance_[q] = ay.coord[i];
          coord1_[q] = ay.coord[i];
          coord2_[q] = az.coord[j];
        }
      }
      auto flat = [](std::size_t a, std::size_t b, std::size_t stride, bool first) {
        if (a == kGhost) return kGhost;
        return first ? a * stride + b : b * stride + a;
      };
      edges_.reserve(ay.edges.size() * n2 + az.edges.size() * n1);
      for (const Edge& e : ay.edges) {
        for (std::size_t j = 0; j < n2; ++j) {
          edges_.push_back(Edge{flat(e.lo, j, n2, true), flat(e.hi, j, n2, true), e.h,
                                e.weight * az.weight[j]});
        }
      }
      for (const Edge& e : az.edges) {
        for (std::size_t i = 0; i < n1; ++i) {
          edges_.push_back(Edge{flat(e.lo, i, n2, false), flat(e.hi, i, n2, false), e.h,
                                e.weight * ay.weight[i]});
        }
      }
      break;
    }
  }
}

std::shared_ptr<const Grid> Grid::make(const GridSpec& spec) {
  return std::make_shared<const Grid>(spec);
}

double Grid::min_spacing() const {
  double h = axes_[0].h;
  for (const Axis& a : axes_) h = std::min(h, a.h);
  return h;
}

double Grid::total_measure() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

bool same_grid(const Grid& a, const Grid& b) { return &a == &b || a.spec() == b.spec(); }

// ---------------------------------------------------------------- Field

Field::Field(GridPtr grid, std::size_t components)
    : grid_(std::move(grid)), components_(components) {
  if (!grid_) throw InvalidArgument("Field: null grid");
  if (components_ < 1) throw InvalidArgument("Field: at least one component required");
  values_.assign(components_ * grid_->size(), 0.0);
}

Field::Field(GridPtr grid, std::size_t components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("Field: null grid");
  if (components_ < 1) throw InvalidArgument("Field: at least one component required");
  if (values_.size() != components_ * grid_->size()) {
    throw InvalidArgument("Field: value count does not match nodes x components");
  }
}

Field Field::from_radial(GridPtr grid, const std::function<double(double)>& f,
                         std::size_t components) {
  Field out(grid, components);
  const auto x = grid->kind() == GridKind::line ? grid->coord1() : grid->radius();
  for (std::size_t k = 0; k < components; ++k) {
    for (std::size_t i = 0; i < x.size(); ++i) out(k, i) = f(x[i]);
  }
  return out;
}

Field Field::from_nodes(GridPtr grid, const std::function<double(std::size_t)>& f) {
  Field out(grid, 1);
  for (std::size_t i = 0; i < out.size(); ++i) out(0, i) = f(i);
  return out;
}

std::span<double> Field::component(std::size_t k) {
  if (k >= components_) throw InvalidArgument("Field: component index out of range");
  return std::span<double>(values_).subspan(k * size(), size());
}

std::span<const double> Field::component(std::size_t k) const {
  if (k >= components_) throw InvalidArgument("Field: component index out of range");
  return std::span<const double>(values_).subspan(k * size(), size());
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void Field::check_finite(const char* what) const {
  if (!all_finite()) throw NonFiniteValue(std::string(what) + ": field has non-finite entries");
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
  if (!same_grid(a.grid(), b.grid()) || a.components() != b.components()) {
    throw GridMismatch(std::string(what) + ": fields live on different grids");
  }
}

Field& Field::operator+=(const Field& other) { return axpy(1.0, other); }
Field& Field::operator-=(const Field& other) { return axpy(-1.0, other); }

Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  require_same_grid(*this, x, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

Field Field::abs() const {
  Field out = *this;
  for (double& v : out.values_) v = std::abs(v);
  return out;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

// ---------------------------------------------------------------- quadrature

double integrate(const Field& f, std::size_t component) {
  const auto v = f.component(component);
  const auto w = f.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
  return s;
}

double lp_norm(const Field& f, double p, std::size_t component) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1");
  const auto v = f.component(component);
  const auto w = f.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

double inner(const Field& a, const Field& b) {
  require_same_grid(a, b, "inner");
  const auto w = a.grid().weights();
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t k = 0; k < a.components(); ++k) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a(k, i) * b(k, i);
  }
  return s;
}

double l2_norm_sq(const Field& f) { return inner(f, f); }

namespace {

inline double node_value(std::span<const double> v, std::size_t i) {
  return i == kGhost ? 0.0 : v[i];
}

}  // namespace

double dirichlet_integral(const Field& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < f.components(); ++k) {
    const auto v = f.component(k);
    for (const Edge& e : f.grid().edges()) {
      const double g = (node_value(v, e.hi) - node_value(v, e.lo)) / e.h;
      s += e.weight * g * g;
    }
  }
  return s;
}

Field laplacian(const Field& f) {
  Field out(f.grid_ptr(), f.components());
  const auto w = f.grid().weights();
  for (std::size_t k = 0; k < f.components(); ++k) {
    const auto v = f.component(k);
    auto o = out.component(k);
    for (const Edge& e : f.grid().edges()) {
      const double flux = e.weight * (node_value(v, e.hi) - node_value(v, e.lo)) / (e.h * e.h);
      if (e.hi != kGhost) o[e.hi] -= flux;
      if (e.lo != kGhost) o[e.lo] += flux;
    }
    for (std::size_t i = 0; i < v.size(); ++i) o[i] /= w[i];
  }
  return out;
}

namespace {

// derivative along one axis of a strided 1D slice
void axis_derivative(const Axis& a, const double* u, std::size_t stride, double* out) {
  const std::size_t n = a.n;
  const double h = a.h;
  auto at = [&](std::size_t i) { return u[i * stride]; };
  for (std::size_t i = 1; i + 1 < n; ++i) out[i * stride] = (at(i + 1) - at(i - 1)) / (2.0 * h);
  if (a.radial) {
    out[0] = (at(1) - at(0)) / (2.0 * h);  // even reflection u(-r0) = u(r0)
  } else {
    out[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  }
  out[(n - 1) * stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
}

}  // namespace

Field radial_derivative(const Field& f) {
  const Grid& g = f.grid();
  Field out(f.grid_ptr(), f.components());
  for (std::size_t k = 0; k < f.components(); ++k) {
    const double* u = f.component(k).data();
    double* o = out.component(k).data();
    if (g.kind() != GridKind::cylindrical) {
      axis_derivative(g.axis(0), u, 1, o);
      continue;
    }
    const Axis& ay = g.axis(0);
    const Axis& az = g.axis(1);
    std::vector<double> dy(g.size()), dz(g.size());
    for (std::size_t j = 0; j < az.n; ++j) axis_derivative(ay, u + j, az.n, dy.data() + j);
    for (std::size_t i = 0; i < ay.n; ++i) {
      axis_derivative(az, u + i * az.n, 1, dz.data() + i * az.n);
    }
    for (std::size_t q = 0; q < g.size(); ++q) o[q] = std::hypot(dy[q], dz[q]);
  }
  return out;
}

// ---------------------------------------------------------------- interpolation

namespace {

struct Stencil {
  std::size_t i0 = kGhost;
  double w0 = 0.0;
  std::size_t i1 = kGhost;
  double w1 = 0.0;
};

// Linear interpolation weights along one axis; ghost nodes one spacing beyond
// the outer node(s) carry the zero extension.
Stencil locate(const Axis& a, double x) {
  Stencil s;
  if (a.radial) x = std::abs(x);
  double pos = a.radial ? x / a.h - 0.5 : (x + a.extent) / a.h - 0.5;
  const double snapped = std::nearbyint(pos);
  if (std::abs(pos - snapped) < 1e-9) pos = snapped;
  const auto n = static_cast<long long>(a.n);
  if (a.radial && pos < 0.0) {
    s.i0 = 0;
    s.w0 = 1.0;
    return s;
  }
  const double fl = std::floor(pos);
  const auto i = static_cast<long long>(fl);
  const double frac = pos - fl;
  if (i < -1 || i >= n) return s;
  if (i >= 0) {
    s.i0 = static_cast<std::size_t>(i);
    s.w0 = 1.0 - frac;
  }
  if (i + 1 < n && frac > 0.0) {
    s.i1 = static_cast<std::size_t>(i + 1);
    s.w1 = frac;
  }
  return s;
}

double apply(const Stencil& s, const double* u, std::size_t stride) {
  double v = 0.0;
  if (s.i0 != kGhost) v += s.w0 * u[s.i0 * stride];
  if (s.i1 != kGhost) v += s.w1 * u[s.i1 * stride];
  return v;
}

double interpolate_raw(const Grid& g, const double* u, double c1, double c2) {
  if (g.kind() != GridKind::cylindrical) return apply(locate(g.axis(0), c1), u, 1);
  const Stencil sy = locate(g.axis(0), c1);
  const Stencil sz = locate(g.axis(1), c2);
  const std::size_t n2 = g.axis(1).n;
  double v = 0.0;
  if (sy.i0 != kGhost) v += sy.w0 * apply(sz, u + sy.i0 * n2, 1);
  if (sy.i1 != kGhost) v += sy.w1 * apply(sz, u + sy.i1 * n2, 1);
  return v;
}

int space_dimension(const Grid& g) { return g.kind() == GridKind::line ? 1 : g.dimension(); }

}  // namespace

double interpolate(const Field& f, std::size_t k, double c1, double c2) {
  return interpolate_raw(f.grid(), f.component(k).data(), c1, c2);
}

GridPtr compatible_grid(const Grid& source, double t, ResampleMode mode) {
  if (!(t > 0.0)) throw InvalidArgument("compatible_grid: t must be positive");
  const double factor = mode == ResampleMode::mass_preserving
                            ? 1.0 / t
                            : std::pow(t, 1.0 / space_dimension(source));
  return Grid::make(source.spec().scaled(factor));
}

Field resample(const Field& f, double t, ResampleMode mode, GridPtr target) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("resample: t must be positive");
  if (!target) target = f.grid_ptr();
  const Grid& src = f.grid();
  if (target->kind() != src.kind() || target->dimension() != src.dimension() ||
      target->spec().split != src.spec().split) {
    throw GridMismatch("resample: target grid has a different symmetry class");
  }
  const int n_dim = space_dimension(src);
  double scale, amp;
  if (mode == ResampleMode::mass_preserving) {
    scale = t;
    amp = std::pow(t, 0.5 * n_dim);
  } else {
    scale = std::pow(t, -1.0 / n_dim);
    amp = 1.0;
  }
  Field out(target, f.components());
  const auto c1 = target->coord1();
  const auto c2 = target->coord2();
  const bool cyl = target->kind() == GridKind::cylindrical;
  for (std::size_t k = 0; k < f.components(); ++k) {
    const double* u = f.component(k).data();
    for (std::size_t q = 0; q < target->size(); ++q) {
      const double y = scale * c1[q];
      const double z = cyl ? scale * c2[q] : 0.0;
      out(k, q) = amp * interpolate_raw(src, u, y, z);
    }
  }
  return out;
}

}  // namespace ccmin
