#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccmin/energy.hpp"
#include "ccmin/error.hpp"
#include "ccmin/solve.hpp"

namespace ccmin::cli {

/// Invalid configuration; the message carries the field path and, for TOML
/// input, the source line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ConfigFormat { toml, json };

struct TaskConfig {
  std::string kind;  // solve | sweep | certify_choquard | certify_quasilinear | rho0 | audit | surgery_demo
  double c = 1.0;
  std::vector<double> c_list;
  std::vector<double> t_grid;
  std::vector<double> theta_grid;
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  std::string m_inf = "auto";  // auto | zero | self | none
  std::optional<double> homogeneity_alpha;
  std::optional<double> tol;
  double seed_width = 1.0;      // Gaussian seeds exp(-|x|^2 / (2 w^2))
  std::string source = "minimizer";  // minimizer | gaussian | double_bump
  std::string surgery;          // plateau | dip | disjoint | truncate | far_field
  double target_mass = 0.0;
  std::optional<double> x1;
  std::optional<double> x2;
  double eps = 1e-3;
  double r_cut = 0.0;
  double separation = 8.0;
  double r0 = 0.0;
  bool dump_fields = true;
};

struct ExperimentConfig {
  ProblemSpec problem;
  TaskConfig task;
  SolveConfig solver;
  std::string output;  // may be empty
};

/// Parses and validates a configuration; `overrides` are `dotted.key=value`
/// strings applied before validation. `origin` names the input in messages.
ExperimentConfig parse_config(const std::string& text, ConfigFormat format,
                              const std::vector<std::string>& overrides = {},
                              const std::string& origin = "config");

/// Reads a file, choosing JSON for a `.json` extension and TOML otherwise.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

struct RunOptions {
  std::string config_path;
  std::string out_dir;  // overrides the config's `output`
  std::vector<std::string> overrides;
  std::size_t threads = 1;
  std::optional<std::uint64_t> seed;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNotConverged = 3;

/// Runs the configured task. Summary lines go to `out`, diagnostics to `err`.
int run(const RunOptions& opts, std::ostream& out, std::ostream& err);

/// Runs an already parsed configuration, writing artifacts into `out_dir`.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::size_t threads,
                   std::ostream& out);

}  // namespace ccmin::cli
