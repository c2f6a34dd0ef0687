#pragma once

#include <optional>
#include <string>

#include "ccmin/energy.hpp"
#include "ccmin/grid.hpp"

namespace ccmin {

struct SurgeryReport {
  std::string surgery;
  double mass_before = 0.0;
  double mass_after = 0.0;
  EnergyBreakdown energy_before;
  EnergyBreakdown energy_after;
  std::string description;
};

/// `surgery,mass_before,mass_after,total_before,total_after`
std::string surgery_csv_header();
std::string surgery_csv_row(const SurgeryReport& r);

/// Symmetric-decreasing rearrangement of |u_k| for every component (radial
/// and line grids). Cells receive the root-mean-square of the decreasing
/// step function over their measure interval, so the L^2 norm is preserved
/// exactly and already-decreasing input is returned unchanged.
Field schwarz_rearrange(const Field& u);

struct PlateauResult {
  Field field;
  SurgeryReport report;
  double rho = 0.0;         // plateau start (node coordinate)
  double level = 0.0;       // u(rho)
  double w_len = 0.0;       // continuum half-width target_mass / (2 G(level))
  std::size_t plateau_cells = 0;  // duplicated cells per side at the plateau
  std::size_t tail_cells = 0;     // duplicated tail cells carrying the remainder
  double dropped_mass = 0.0;      // constraint mass shifted past the extent
};

/// Inserts a plateau of height u(rho) at +-rho into component 0 of an even,
/// nonnegative, non-increasing field on a line grid, shifting the outer part
/// outward. Inserted values duplicate existing nodes, so no link slope
/// changes and the gradient term is untouched. Without `rho` the first node
/// with u <= delta (from the nonlinearity) is used.
PlateauResult plateau_insert(const ProblemSpec& p, const Field& u, double target_mass,
                             std::optional<double> rho = std::nullopt);

struct DipResult {
  Field field;
  SurgeryReport report;
  double level = 0.0;
  double added_mass = 0.0;
  double dirichlet_before = 0.0;
  double dirichlet_after = 0.0;
};

/// Replaces component 0 on [x1, x2] (snapped to nodes) by the level u(x1).
DipResult fill_dip(const ProblemSpec& p, const Field& u, double x1, double x2);

/// Smooth cutoff over [0.9 R_cut, R_cut], then the scalar rescaling that
/// restores the discrete L^2 norm.
Field truncate_renormalize(const Field& u, double R_cut);

struct FarFieldBump {
  Field profile;               // on its own radial grid, centered at the bump
  double center_offset = 0.0;  // |y0|
  double support_radius = 0.0;
  double t0 = 0.0;
  double seed_gradient_sq = 0.0;  // ||grad u||^2 of the unshrunk seed
  double gradient_sq = 0.0;       // ||grad v||^2
  double mass = 0.0;
  double sup = 0.0;
  double I_lo = 0.0;
  double I_hi = 0.0;
  bool certified = false;           // I_hi <= eps
  std::optional<Field> placed;      // translated copy on a line grid, when it fits
  SurgeryReport report;
};

/// Shrinks a cos^2 cap of mass d by t -> t^{N/2} u(t x) until its kinetic
/// energy is below eps and its amplitude below delta, then places it beyond
/// R0 and brackets I over the support by sampling F's radial dependence.
FarFieldBump far_field_bump(const ProblemSpec& p, double d, double R0, double eps);

struct DisjointMassResult {
  Field field;
  SurgeryReport report;
  Field added;                 // v
  double added_mass = 0.0;
  double separation = 0.0;     // center of v (line) or shell radius (radial)
  double cross_term = 0.0;     // D(u+v) - D(u) - D(v), choquard only
};

/// Adds a far bump (line grid) or a far thin shell (radial grid) of mass
/// c - ||u||^2 whose support is disjoint from u's, keeping the added kinetic
/// energy below eps.
DisjointMassResult add_disjoint_mass(const ProblemSpec& p, const Field& u, double c, double eps);

}  // namespace ccmin
