#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ccmin {

enum class GridKind { radial, line, cylindrical };

std::string to_string(GridKind kind);

/// Declared symmetry class, extent and resolution of a discretization.
///
/// radial(N):           functions of |x| on R^N, nodes at (i + 1/2) h in (0, r_max).
/// line:                functions on R, nodes symmetric about 0 in (-x_max, x_max).
/// cylindrical(k, N):   functions of (|y|, |z|) with y in R^k, z in R^{N-k};
///                      both coordinates cell-centered, extents (s_max, w_max).
struct GridSpec {
  GridKind kind = GridKind::radial;
  int dimension = 3;
  int split = 0;
  double extent = 20.0;
  double extent2 = 0.0;
  std::size_t nodes = 2048;
  std::size_t nodes2 = 0;

  static GridSpec radial(int dimension, double r_max = 20.0, std::size_t nodes = 2048);
  static GridSpec line(double x_max = 40.0, std::size_t nodes = 4096);
  static GridSpec cylindrical(int k, int dimension, double s_max = 20.0, double w_max = 20.0,
                              std::size_t ns = 256, std::size_t nw = 256);

  /// Throws InvalidArgument if any invariant fails.
  void validate() const;

  /// Same node counts, every extent multiplied by `factor`.
  GridSpec scaled(double factor) const;

  std::string describe() const;

  bool operator==(const GridSpec&) const = default;
};

inline constexpr std::size_t kGhost = std::numeric_limits<std::size_t>::max();

/// One finite-difference link. The difference is (u[hi] - u[lo]) / h, where
/// an index equal to kGhost stands for the zero Dirichlet ghost value.
/// `weight` is the measure attached to the link (symmetry weight times h).
struct Edge {
  std::size_t lo;
  std::size_t hi;
  double h;
  double weight;
};

/// A single symmetry-reduced coordinate axis.
struct Axis {
  bool radial = true;
  int dimension = 1;
  std::size_t n = 0;
  double extent = 0.0;
  double h = 0.0;
  std::vector<double> coord;
  std::vector<double> weight;
  std::vector<Edge> edges;

  static Axis make_radial(int dimension, double extent, std::size_t n);
  static Axis make_line(double extent, std::size_t n);

  double first() const { return coord.front(); }
  double last() const { return coord.back(); }
};

/// Surface measure of the unit sphere S^{d-1}; 2 for d = 1.
double sphere_measure(int d);

/// Precomputed geometry for a GridSpec: node weights, link list, and the
/// coordinates every energy term needs.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  static std::shared_ptr<const Grid> make(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  GridKind kind() const { return spec_.kind; }
  int dimension() const { return spec_.dimension; }
  std::size_t size() const { return weights_.size(); }

  std::size_t axis_count() const { return axes_.size(); }
  const Axis& axis(std::size_t i) const { return axes_.at(i); }

  std::span<const double> weights() const { return weights_; }
  /// |x| at every node.
  std::span<const double> radius() const { return radius_; }
  /// |y| at every node (cylindrical); equals radius() otherwise.
  std::span<const double> axis_distance() const { return axis_distance_; }
  /// Signed line coordinate, radius, or |y| for the first axis.
  std::span<const double> coord1() const { return coord1_; }
  /// |z| for cylindrical grids; empty otherwise.
  std::span<const double> coord2() const { return coord2_; }
  std::span<const Edge> edges() const { return edges_; }

  double min_spacing() const;
  double total_measure() const;

 private:
  GridSpec spec_;
  std::vector<Axis> axes_;
  std::vector<double> weights_;
  std::vector<double> radius_;
  std::vector<double> axis_distance_;
  std::vector<double> coord1_;
  std::vector<double> coord2_;
  std::vector<Edge> edges_;
};

using GridPtr = std::shared_ptr<const Grid>;

bool same_grid(const Grid& a, const Grid& b);

/// Discrete real-valued (possibly multi-component) function on a grid.
/// Storage is component-major: value(k, i) = values()[k * size() + i].
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, std::size_t components = 1);
  Field(GridPtr grid, std::size_t components, std::vector<double> values);

  /// Samples `f(radius)` (or `f(coord)` on a line grid) into every component.
  static Field from_radial(GridPtr grid, const std::function<double(double)>& f,
                           std::size_t components = 1);
  /// Samples `f(node index)` into component 0.
  static Field from_nodes(GridPtr grid, const std::function<double(std::size_t)>& f);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t components() const { return components_; }
  std::size_t size() const { return grid_ ? grid_->size() : 0; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> component(std::size_t k);
  std::span<const double> component(std::size_t k) const;

  double& operator()(std::size_t k, std::size_t i) { return values_[k * size() + i]; }
  double operator()(std::size_t k, std::size_t i) const { return values_[k * size() + i]; }

  bool all_finite() const;
  /// Throws NonFiniteValue if any entry is NaN or infinite.
  void check_finite(const char* what) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double a);
  /// this += a * x
  Field& axpy(double a, const Field& x);

  Field abs() const;
  double max_abs() const;

 private:
  GridPtr grid_;
  std::size_t components_ = 0;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

void require_same_grid(const Field& a, const Field& b, const char* what);

enum class ResampleMode { mass_preserving, dilation };

/// Quadrature of one component over the full R^N under the grid's symmetry.
double integrate(const Field& f, std::size_t component = 0);

/// (integrate |f|^p)^{1/p}.
double lp_norm(const Field& f, double p, std::size_t component = 0);

/// Weighted inner product summed over all components.
double inner(const Field& a, const Field& b);

/// Sum over components of integrate(f_k^2).
double l2_norm_sq(const Field& f);

/// Dirichlet integral sum_k int |grad f_k|^2 on the link stencil.
double dirichlet_integral(const Field& f);

/// Signed derivative along the axis for line and radial grids; for
/// cylindrical grids the magnitude of both partials. Centered differences in
/// the interior, second-order one-sided at the outer boundary, even
/// reflection at the radial origin.
Field radial_derivative(const Field& f);

/// Conservative discrete Laplacian consistent with dirichlet_integral:
/// -2 * laplacian(u) is the L^2 gradient of dirichlet_integral(u).
Field laplacian(const Field& f);

/// mass_preserving: x -> t^{N/2} f(t x).  dilation: x -> f(t^{-1/N} x).
/// Values come from (bi)linear interpolation with zero extension beyond the
/// extent. When `target` is null the result lives on the source grid.
Field resample(const Field& f, double t, ResampleMode mode, GridPtr target = nullptr);

/// The grid on which resample(f, t, mode, grid) maps nodes onto nodes.
GridPtr compatible_grid(const Grid& source, double t, ResampleMode mode);

/// Linear interpolation of component k at an arbitrary point (coord2 ignored
/// unless the grid is cylindrical).
double interpolate(const Field& f, std::size_t k, double c1, double c2 = 0.0);

}  // namespace ccmin
