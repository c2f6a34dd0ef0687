#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ccmin/ccdiag.hpp"
#include "ccmin/cli.hpp"
#include "ccmin/field_io.hpp"
#include "ccmin/rearrange.hpp"

namespace ccmin::cli {

namespace fs = std::filesystem;

namespace {

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) const {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw Error("cannot write " + (dir_ / name).string());
    return os;
  }

  void field(const std::string& name, const Field& f) const {
    auto os = open(name);
    write_field_csv(os, f);
  }

 private:
  fs::path dir_;
};

std::string num(double v) { return format_number(v); }

void write_solve_row(std::ostream& os, double c, const SolveResult& r) {
  os << num(c) << ',' << num(r.m_value) << ',' << num(r.beta) << ',' << r.iterations << ','
     << (r.converged ? 1 : 0) << '\n';
}

Field gaussian(const ProblemSpec& p, double width, double c) {
  const GridPtr g = Grid::make(p.grid);
  Field u = Field::from_radial(g, [width](double r) { return std::exp(-0.5 * r * r / (width * width)); },
                               p.components());
  return project_to_constraint(p, u, c);
}

int task_solve(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log) {
  const SolveResult r = minimize_constrained(cfg.problem, cfg.task.c, cfg.solver);
  {
    auto os = out.open("mass_curve.csv");
    os << "c,m,beta,iters,converged\n";
    write_solve_row(os, cfg.task.c, r);
  }
  if (cfg.task.dump_fields) out.field("minimizer.csv", r.minimizer);
  if (cfg.solver.record_trace) {
    auto os = out.open("trace.csv");
    write_trace_csv(os, r.trace);
  }
  log << "solve: c=" << num(cfg.task.c) << " m=" << num(r.m_value) << " beta=" << num(r.beta)
      << " residual=" << num(r.el_residual) << " iters=" << r.iterations
      << " converged=" << (r.converged ? "yes" : "no") << '\n';
  return r.converged ? kExitOk : kExitNotConverged;
}

int task_sweep(const ExperimentConfig& cfg, const Outputs& out, std::size_t threads, std::ostream& log) {
  const TaskConfig& t = cfg.task;
  const MCCurve curve = scan_mass_curve(cfg.problem, t.c_list, cfg.solver, threads, t.dump_fields);
  {
    auto os = out.open("mass_curve.csv");
    write_mass_curve_csv(os, curve);
  }
  for (std::size_t i = 0; i < curve.minimizers.size(); ++i) {
    out.field("minimizer_" + std::to_string(i) + ".csv", curve.minimizers[i]);
  }
  const double tol = t.tol.value_or(default_tolerance(curve));
  CCReport rep;
  if (curve.size() >= 2) rep.merge(check_monotone(curve, tol));
  std::string m_inf = t.m_inf;
  if (m_inf == "auto") {
    const Family f = cfg.problem.family;
    m_inf = (f == Family::stuart || f == Family::badiale_rolando) ? "zero" : "self";
  }
  if (m_inf == "zero") {
    rep.merge(check_subadditivity(curve, std::nullopt, tol));
    rep.notes += std::string(rep.notes.empty() ? "" : "; ") + "m_inf is the zero curve";
  } else if (m_inf == "self") {
    rep.merge(check_subadditivity(curve, curve, tol));
    rep.notes += std::string(rep.notes.empty() ? "" : "; ") + "m_inf is the computed curve itself";
  }
  if (!curve.all_converged()) {
    rep.notes += std::string(rep.notes.empty() ? "" : "; ") + "some points did not converge";
  }
  {
    auto os = out.open("cc_report.txt");
    write_cc_report(os, rep);
    if (t.homogeneity_alpha) {
      const HomogeneityReport h = homogeneity_bound_check(curve, *t.homogeneity_alpha, tol);
      os << "homogeneity_alpha=" << num(*t.homogeneity_alpha) << '\n'
         << "homogeneity_pairs=" << h.pairs << '\n'
         << "homogeneity_pass=" << (h.pass() ? "true" : "false") << '\n';
      auto hs = out.open("homogeneity_violations.csv");
      hs << "c,lambda,lhs,rhs,defect\n";
      for (const auto& v : h.violations) {
        hs << num(v.c) << ',' << num(v.lambda) << ',' << num(v.lhs) << ',' << num(v.rhs) << ','
           << num(v.defect) << '\n';
      }
    }
  }
  log << "sweep: points=" << curve.size() << " converged=" << (curve.all_converged() ? "all" : "not all");
  if (rep.monotone) log << " monotone=" << (rep.monotone->monotone ? "yes" : "no");
  if (rep.subadditivity) log << " strict_margin=" << num(rep.subadditivity->strict_margin);
  log << '\n';
  return curve.all_converged() ? kExitOk : kExitNotConverged;
}

void write_certificate_report(const Outputs& out, const Certificate& c, const std::string& param) {
  auto os = out.open("certificate_report.txt");
  os << param << "_star=" << num(c.best_param) << '\n'
     << "value=" << num(c.value) << '\n'
     << "success=" << (c.success ? "true" : "false") << '\n'
     << "max_constraint_deviation=" << num(c.max_constraint_deviation) << '\n'
     << "notes=" << c.note << '\n';
}

int task_certify_choquard(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log) {
  const Field w = gaussian(cfg.problem, cfg.task.seed_width, cfg.task.c);
  const Certificate c = certificate_choquard(cfg.problem, cfg.task.c, w, cfg.task.t_grid);
  {
    auto os = out.open("certificate.csv");
    write_certificate_csv(os, c);
  }
  write_certificate_report(out, c, "t");
  log << "certify_choquard: t*=" << num(c.best_param) << " value=" << num(c.value)
      << " success=" << (c.success ? "yes" : "no") << '\n';
  return kExitOk;
}

int task_certify_quasilinear(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log) {
  const Certificate c = certificate_quasilinear(cfg.problem, cfg.task.theta_grid);
  {
    auto os = out.open("certificate.csv");
    write_certificate_csv(os, c);
  }
  write_certificate_report(out, c, "theta");
  log << "certify_quasilinear: theta*=" << num(c.best_param) << " value=" << num(c.value)
      << " success=" << (c.success ? "yes" : "no")
      << " max_constraint_deviation=" << num(c.max_constraint_deviation) << '\n';
  return kExitOk;
}

int task_rho0(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log) {
  const double tol = cfg.task.tol.value_or(1e-10);
  const Rho0Result r = estimate_rho0(cfg.problem, {cfg.task.rho_lo, cfg.task.rho_hi}, cfg.solver, tol);
  {
    auto os = out.open("rho0.csv");
    os << "rho,m,converged\n";
    for (const auto& e : r.evaluations) os << num(e.rho) << ',' << num(e.m) << ',' << (e.converged ? 1 : 0) << '\n';
  }
  {
    auto os = out.open("rho0_report.txt");
    os << "rho0=" << num(r.rho0) << '\n'
       << "bracket_lo=" << num(r.lo) << '\n'
       << "bracket_hi=" << num(r.hi) << '\n'
       << "relative_width=" << num((r.hi - r.lo) / r.hi) << '\n'
       << "m_at_2rho0=" << num(r.m_at_2rho0) << '\n'
       << "verified=" << (r.verified ? "true" : "false") << '\n'
       << "all_converged=" << (r.all_converged ? "true" : "false") << '\n';
  }
  log << "rho0: rho0=" << num(r.rho0) << " bracket=[" << num(r.lo) << ", " << num(r.hi)
      << "] m(2 rho0)=" << num(r.m_at_2rho0) << " verified=" << (r.verified ? "yes" : "no") << '\n';
  return r.all_converged ? kExitOk : kExitNotConverged;
}

int task_audit(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log) {
  Field u;
  bool converged = true;
  if (cfg.task.source == "gaussian") {
    u = gaussian(cfg.problem, cfg.task.seed_width, cfg.task.c);
  } else {
    const SolveResult r = minimize_constrained(cfg.problem, cfg.task.c, cfg.solver);
    u = r.minimizer;
    converged = r.converged;
  }
  const AuditReport a = inequality_audit(u);
  const DecayReport d = decay_check(schwarz_rearrange(u), 3, 2.0);
  {
    auto os = out.open("audit_report.txt");
    os << "source=" << cfg.task.source << '\n'
       << "q1=" << num(a.q1) << '\n'
       << "q2=" << num(a.q2) << '\n'
       << "q3=" << num(a.q3) << '\n'
       << "hls_constant=" << num(a.hls_constant) << '\n'
       << "q1_within_hls=" << (a.q1_within_hls ? "true" : "false") << '\n'
       << "decay_M=" << num(d.M) << '\n'
       << "decay_r=" << num(d.r_max) << '\n'
       << "decay_interior=" << (d.interior ? "true" : "false") << '\n'
       << "decay_tail_consistent=" << (d.tail_consistent ? "true" : "false") << '\n';
  }
  if (cfg.task.dump_fields) out.field("field.csv", u);
  log << "audit: q1=" << num(a.q1) << " (HLS " << num(a.hls_constant) << ") q2=" << num(a.q2)
      << " q3=" << num(a.q3) << " M=" << num(d.M) << '\n';
  return converged ? kExitOk : kExitNotConverged;
}

int task_surgery(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log) {
  const ProblemSpec& p = cfg.problem;
  const TaskConfig& t = cfg.task;
  Field u;
  bool converged = true;
  if (t.surgery == "far_field") {
    // no source field needed
  } else if (t.source == "gaussian") {
    u = gaussian(p, t.seed_width, t.c);
  } else if (t.source == "double_bump") {
    const double s = 0.5 * t.separation, w = t.seed_width;
    u = Field::from_radial(Grid::make(p.grid),
                           [s, w](double x) { return 1.0 / std::cosh((x - s) / w) + 1.0 / std::cosh((x + s) / w); },
                           p.components());
    u = project_to_constraint(p, u, t.c);
  } else {
    const SolveResult r = minimize_constrained(p, t.c, cfg.solver);
    u = r.minimizer;
    converged = r.converged;
  }

  SurgeryReport rep;
  std::optional<Field> after;
  std::ostringstream extra;
  if (t.surgery == "plateau") {
    const PlateauResult r = plateau_insert(p, schwarz_rearrange(u), t.target_mass);
    rep = r.report;
    after = r.field;
    extra << "rho=" << num(r.rho) << " level=" << num(r.level) << " cells=" << r.plateau_cells;
  } else if (t.surgery == "dip") {
    const double x1 = t.x1.value_or(-0.5 * t.separation), x2 = t.x2.value_or(0.5 * t.separation);
    const DipResult r = fill_dip(p, u, x1, x2);
    rep = r.report;
    after = r.field;
    extra << "level=" << num(r.level) << " dirichlet " << num(r.dirichlet_before) << " -> "
          << num(r.dirichlet_after);
  } else if (t.surgery == "truncate") {
    const Field v = truncate_renormalize(u, t.r_cut);
    rep.surgery = "truncate_renormalize";
    rep.mass_before = constraint_value(p, u);
    rep.mass_after = constraint_value(p, v);
    rep.energy_before = total_energy(p, u);
    rep.energy_after = total_energy(p, v);
    rep.description = "smooth cutoff at R=" + num(t.r_cut) + " then L^2 rescaling";
    after = v;
  } else if (t.surgery == "disjoint") {
    const Field v = truncate_renormalize(u, t.r_cut);
    const DisjointMassResult r = add_disjoint_mass(p, v, t.target_mass, t.eps);
    rep = r.report;
    u = v;
    after = r.field;
    extra << "added_mass=" << num(r.added_mass) << " separation=" << num(r.separation);
  } else {  // far_field
    const FarFieldBump b = far_field_bump(p, t.target_mass, t.r0, t.eps);
    rep = b.report;
    if (b.placed) after = *b.placed;
    extra << "t0=" << num(b.t0) << " I in [" << num(b.I_lo) << ", " << num(b.I_hi)
          << "] certified=" << (b.certified ? "yes" : "no");
    if (t.dump_fields) out.field("bump_profile.csv", b.profile);
  }
  {
    auto os = out.open("surgery.csv");
    os << surgery_csv_header() << '\n' << surgery_csv_row(rep) << '\n';
  }
  if (t.dump_fields) {
    if (u.size() > 0) out.field("field_before.csv", u);
    if (after) out.field("field_after.csv", *after);
  }
  log << "surgery_demo: " << rep.surgery << " mass " << num(rep.mass_before) << " -> "
      << num(rep.mass_after) << " energy " << num(rep.energy_before.total) << " -> "
      << num(rep.energy_after.total) << (extra.str().empty() ? "" : " ") << extra.str() << '\n';
  return converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::size_t threads,
                   std::ostream& out) {
  const Outputs o{fs::path(out_dir)};
  const std::string& k = cfg.task.kind;
  if (k == "solve") return task_solve(cfg, o, out);
  if (k == "sweep") return task_sweep(cfg, o, threads, out);
  if (k == "certify_choquard") return task_certify_choquard(cfg, o, out);
  if (k == "certify_quasilinear") return task_certify_quasilinear(cfg, o, out);
  if (k == "rho0") return task_rho0(cfg, o, out);
  if (k == "audit") return task_audit(cfg, o, out);
  return task_surgery(cfg, o, out);
}

int run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    if (opts.config_path.empty()) throw ConfigError("no configuration given (use --config PATH)");
    if (opts.threads == 0) throw ConfigError("--threads must be at least 1");
    cfg = load_config(opts.config_path, opts.overrides);
    if (opts.seed) cfg.solver.seed = *opts.seed;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::string dir = opts.out_dir;
  if (dir.empty()) dir = cfg.output;
  if (dir.empty()) {
    const char* env = std::getenv("CCMIN_OUT_DIR");
    dir = env ? env : "ccmin_out";
  }
  try {
    const int code = run_experiment(cfg, dir, opts.threads, out);
    if (code == kExitNotConverged) err << "error: a required solve did not converge\n";
    return code;
  } catch (const InvalidArgument& e) {
    err << "error: invalid task parameters: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace ccmin::cli
