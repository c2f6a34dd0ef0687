#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccmin/energy.hpp"
#include "ccmin/grid.hpp"
#include "ccmin/solve.hpp"

namespace ccmin {

/// Sampled mass-energy curve c -> m(c).
struct MCCurve {
  std::vector<double> c_values;
  std::vector<double> m_values;
  std::vector<double> betas;
  std::vector<std::size_t> iterations;
  std::vector<bool> converged;
  std::vector<Field> minimizers;  // empty when not kept
  std::vector<std::string> notes;

  std::size_t size() const { return c_values.size(); }
  bool all_converged() const;
  /// Lengths agree, c strictly increasing and positive, m finite.
  void validate() const;
  /// Linear interpolation with the anchor m(0) = 0; nullopt beyond the last c.
  std::optional<double> value_at(double c) const;

  /// Curve without solver metadata (betas 0, iterations 0, converged true).
  static MCCurve from_values(std::vector<double> c, std::vector<double> m);
};

/// One entry per c: warm start from the previous minimizer plus two extra
/// seeds (three seeds for the first c); the lowest converged energy wins.
/// `threads` > 1 runs the starts of one c concurrently.
MCCurve scan_mass_curve(const ProblemSpec& p, const std::vector<double>& c_list,
                        const SolveConfig& cfg = {}, std::size_t threads = 1,
                        bool keep_minimizers = true);

/// `c,m,beta,iters,converged`
void write_mass_curve_csv(std::ostream& os, const MCCurve& curve);
MCCurve read_mass_curve_csv(std::istream& is);

/// 1e-6 * max |m|, the default additive slack of every curve inequality.
double default_tolerance(const MCCurve& curve);

struct MonotoneCheck {
  bool monotone = true;
  double c1 = 0.0;  // worst pair c1 < c2
  double c2 = 0.0;
  double defect = 0.0;  // max over pairs of m(c2) - m(c1)
  double tol = 0.0;
};

struct SubadditivityCheck {
  bool subadditive = true;  // interior pairs 0 < lambda < c
  double c = 0.0;
  double lambda = 0.0;
  double defect = 0.0;        // max of m(c) - m(lambda) - m_inf(c - lambda)
  double strict_margin = 0.0; // min of m(lambda) + m_inf(c - lambda) - m(c)
  std::size_t pairs = 0;
  bool endpoint_ok = true;    // lambda = 0: m(c) <= m_inf(c)
  double endpoint_c = 0.0;
  double endpoint_defect = 0.0;
  double tol = 0.0;
};

struct CCReport {
  std::optional<MonotoneCheck> monotone;
  std::optional<SubadditivityCheck> subadditivity;
  std::string notes;

  void merge(const CCReport& other);
};

/// Every pair c_i < c_j must satisfy m(c_j) <= m(c_i) + tol.
CCReport check_monotone(const MCCurve& curve, double tol);

/// Large inequality m(c) <= m(lambda) + m_inf(c - lambda) over curve points
/// lambda < c. nullopt m_inf stands for the zero curve; pairs whose c - lambda
/// lies beyond m_inf's range are skipped.
CCReport check_subadditivity(const MCCurve& curve, const std::optional<MCCurve>& m_inf, double tol);

/// key=value lines.
void write_cc_report(std::ostream& os, const CCReport& report);

struct HomogeneityViolation {
  double c = 0.0;
  double lambda = 0.0;
  double lhs = 0.0;  // m(lambda c)
  double rhs = 0.0;  // lambda^alpha m(c)
  double defect = 0.0;
};

struct HomogeneityReport {
  std::size_t pairs = 0;
  std::vector<HomogeneityViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Checks m(lambda c) <= lambda^alpha m(c) + tol over curve pairs with lambda >= 1.
HomogeneityReport homogeneity_bound_check(const MCCurve& curve, double alpha, double tol);

struct CertificateRow {
  double param = 0.0;
  double exact = 0.0;
  double bound = 0.0;
};

struct Certificate {
  std::vector<CertificateRow> rows;
  double best_param = 0.0;
  double value = 0.0;  // min exact energy
  bool success = false;  // value < 0
  std::vector<double> constraint_deviation;  // per row
  double max_constraint_deviation = 0.0;
  std::string note;
};

/// w_t(x) = t^{3/2} w(tx) evaluated exactly on the scaled grid, next to the
/// upper bound C t^6 ||w||_6^6 + C t^2 ||grad w||^2 - t D(w).
Certificate certificate_choquard(const ProblemSpec& p, double c, const Field& w_seed,
                                 const std::vector<double>& t_grid);

/// (Upsilon^theta, 0, ..., 0) with Upsilon^theta = theta^{N/p^2} d^{-1/p}
/// exp(-theta |x|^p) and d = int G(exp(-|x|^p)). The bound column is
/// beta int |grad Upsilon|^p - mu_F int_{|x|>=r0} |x|^{-tau} Upsilon^{p+sigma}
/// (NaN without lower-bound metadata on F).
Certificate certificate_quasilinear(const ProblemSpec& p, const std::vector<double>& theta_grid);

/// `param,exact,bound`
void write_certificate_csv(std::ostream& os, const Certificate& cert);

struct Rho0Evaluation {
  double rho = 0.0;
  double m = 0.0;
  bool converged = false;
};

struct Rho0Result {
  double rho0 = 0.0;  // bracket midpoint
  double lo = 0.0;
  double hi = 0.0;
  double m_at_2rho0 = 0.0;
  bool verified = false;  // m(2 rho0) < -tol
  bool all_converged = true;
  std::vector<Rho0Evaluation> evaluations;
};

/// Bisection for the sign change of rho -> m_rho until (hi - lo) / hi <= rel_width.
Rho0Result estimate_rho0(const ProblemSpec& p, std::pair<double, double> bracket,
                         const SolveConfig& cfg = {}, double tol = 1e-10, double rel_width = 0.01);

struct DecayReport {
  double M = 0.0;
  double r_max = 0.0;      // node attaining M
  bool interior = false;   // argmax is not the outermost node
  bool tail_consistent = true;
};

/// M = max r^{N/p} u(r) over the nodes of component 0; u must be nonnegative
/// and non-increasing in |x|.
DecayReport decay_check(const Field& u, int N, double p);

struct AuditReport {
  double q1 = 0.0;  // D(u) / ||u||_{12/5}^4
  double q2 = 0.0;  // ||u||_{12/5}^4 / (||u||_2^3 ||u||_{H^1})
  double q3 = 0.0;  // ||u||_{10/3}^{10/3} / (||u||_2^{4/3} ||grad u||_2^2)
  double hls_constant = 0.0;
  bool q1_within_hls = false;
};

/// Sharp Hardy-Littlewood-Sobolev constant for lambda = 1, n = 3: (4/3)(16/pi)^{1/3}.
double sharp_hls_constant();

AuditReport inequality_audit(const Field& u);

/// int_{|x| > R} sum_k u_k^2.
double tail_mass(const Field& u, double R);

}  // namespace ccmin
