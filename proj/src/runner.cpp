#include "kdvdet/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "kdvdet/determinant.hpp"
#include "kdvdet/oracles.hpp"
#include "kdvdet/serialize.hpp"

namespace kdv {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Stable file tag for a time value: "0.25" -> "t0.25", "-1" -> "t-1".
std::string time_tag(double t) {
  std::string s = fmt("%.6g", t);
  return "t" + s;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = a + (b - a) * i / (n - 1);
  return xs;
}

ScatteringData obtain_scattering(const RunConfig& cfg, const RunnerOptions& opt) {
  fs::path cache_dir = fs::path(opt.out_dir) / "cache";
  fs::path path = cache_dir / ("scatter_" + scatter_cache_key(cfg.potential, cfg.kgrid) + ".json");
  if (!opt.no_cache && fs::exists(path)) {
    ScatteringData d = load_scattering(path.string());
    if (d.source == cfg.potential.canonical()) {
      std::printf("scattering: cache hit (%s)\n", path.filename().string().c_str());
      return d;
    }
    std::printf("scattering: stale cache entry ignored\n");
  }
  ScatteringData d = compute_scattering(cfg.potential, cfg.kgrid, cfg.scat);
  if (!opt.no_cache) {
    fs::create_directories(cache_dir);
    save_scattering(path.string(), d);
  }
  return d;
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions o;
  o.disc = cfg.disc;
  o.scat = cfg.scat;
  o.cross_check = cfg.cross_check;
  o.fd_step = cfg.fd_step;
  return o;
}

void print_summary(const ScatteringData& d) {
  std::printf("scattering: %zu bound state(s)", d.states.size());
  for (const BoundState& b : d.states) std::printf("  kappa=%.12g c=%.12g", b.kappa, b.c);
  std::printf("\n  unitarity defect %.3e", d.grid.unitarity_defect);
  if (d.applied_shift != 0.0) std::printf(", window shift %.3g applied", d.applied_shift);
  std::printf("\n");
}

int run_scatter(const RunConfig& cfg, const RunnerOptions& opt) {
  ScatteringData d = obtain_scattering(cfg, opt);
  print_summary(d);
  fs::path out = opt.out_dir;
  write_coefficients_csv((out / "coefficients.csv").string(), d);
  save_scattering((out / "scattering.json").string(), d);
  std::printf("wrote %s and %s\n", (out / "coefficients.csv").string().c_str(),
              (out / "scattering.json").string().c_str());
  return 0;
}

int run_solve(const RunConfig& cfg, const RunnerOptions& opt) {
  ScatteringData d = obtain_scattering(cfg, opt);
  print_summary(d);
  SolveOptions so = solve_options(cfg);
  so.cross_check = false;  // cross checks run on a subsample below
  std::vector<double> xs = linspace(cfg.x_min, cfg.x_max, cfg.n_x);
  fs::path out = opt.out_dir;
  int code = 0;

  for (double t : cfg.times) {
    std::vector<double> u = u_field(d, xs, t, so);
    std::vector<std::string> meta = {"profile: " + cfg.potential_text, "t: " + fmt("%.17g", t)};
    double max_fd = 0.0;
    if (cfg.cross_check) {
      SolveOptions co = solve_options(cfg);
      co.cross_check = true;
      int stride = std::max<int>(1, cfg.n_x / 8);
      for (int i = 0; i < cfg.n_x; i += stride) {
        UPoint p = u_point(d, xs[i], t, co);
        max_fd = std::max(max_fd, p.fd_delta);
      }
      meta.push_back("cross_check_max_delta: " + fmt("%.3e", max_fd));
      std::printf("t=%-8.4g cross-check max |u - fd| = %.3e\n", t, max_fd);
    }
    std::string path = (out / ("field_" + time_tag(t) + ".csv")).string();
    write_field_csv(path, xs, {u}, {"u"}, meta);
    double umin = *std::min_element(u.begin(), u.end());
    std::printf("t=%-8.4g wrote %s (min u = %.6g)\n", t, path.c_str(), umin);

    if (cfg.residual_bound) {
      ResidualReport r = kdv_residual(d, cfg.x_min, cfg.x_max, cfg.n_x - 1, t,
                                      cfg.residual_dt, so);
      write_field_csv((out / ("residual_" + time_tag(t) + ".csv")).string(), r.x,
                      {r.residual}, {"residual"},
                      {"profile: " + cfg.potential_text, "t: " + fmt("%.17g", t)});
      std::printf("t=%-8.4g KdV residual max %.3e (bound %.3e)\n", t, r.max_abs,
                  *cfg.residual_bound);
      if (r.max_abs > *cfg.residual_bound) {
        std::printf("residual bound violated\n");
        code = 1;
      }
    }
  }
  return code;
}

int run_converge(const RunConfig& cfg, const RunnerOptions& opt) {
  ScatteringData d = obtain_scattering(cfg, opt);
  print_summary(d);
  fs::path out = opt.out_dir;

  HankelSymbol sym = assemble_symbol(d, cfg.probe_x, cfg.probe_t);
  DiscretizationParams par = cfg.disc;
  if (par.L_s == 0.0) par.L_s = auto_s_window(sym);  // freeze across resolutions
  if (cfg.n_quad_base > 0) par.n_quad = cfg.n_quad_base;
  DiscretizationParams par2 = par;
  par2.n_quad = 2 * par.n_quad;

  SingularValueReport r1 =
      singular_value_report(nystrom_matrix(sym, {KernelOrder{0, 0}}, par).mats[0]);
  SingularValueReport r2 =
      singular_value_report(nystrom_matrix(sym, {KernelOrder{0, 0}}, par2).mats[0]);

  std::size_t n_cmp = std::min<std::size_t>(
      {32, r1.partial_logdet.size(), r2.partial_logdet.size()});
  double scale = std::max(std::abs(r2.logdet), 1e-12);
  double max_rel = 0.0;
  std::vector<double> idx(n_cmp), l1(n_cmp), l2(n_cmp), p1(n_cmp), p2(n_cmp), rel(n_cmp);
  for (std::size_t i = 0; i < n_cmp; ++i) {
    idx[i] = double(i + 1);
    l1[i] = r1.lambda[i];
    l2[i] = r2.lambda[i];
    p1[i] = r1.partial_logdet[i];
    p2[i] = r2.partial_logdet[i];
    rel[i] = std::abs(p1[i] - p2[i]) / scale;
    max_rel = std::max(max_rel, rel[i]);
  }
  write_field_csv((out / "sv_partial.csv").string(), idx,
                  {l1, l2, p1, p2, rel},
                  {"lambda_n", "lambda_2n", "partial_n", "partial_2n", "rel_delta"},
                  {"profile: " + cfg.potential_text,
                   "x: " + fmt("%.17g", cfg.probe_x) + "  t: " + fmt("%.17g", cfg.probe_t),
                   "n_quad: " + std::to_string(par.n_quad) + " vs " +
                       std::to_string(par2.n_quad)});
  std::printf("n_quad %d -> %d: logdet %.12g -> %.12g, max partial-sum shift %.3e (rel)\n",
              par.n_quad, par2.n_quad, r1.logdet, r2.logdet, max_rel);
  std::printf("trace norm %.6g, spectral tail ratio %.3g\n", r2.trace_norm, r2.tail_ratio);

  if (!cfg.truncations.empty()) {
    SolveOptions so = solve_options(cfg);
    so.cross_check = false;
    TruncationStudy ts =
        truncation_study(cfg.potential, cfg.truncations, cfg.probe_x, cfg.probe_t,
                         cfg.kgrid, so);
    std::vector<double> delta_col(ts.b.size(), 0.0);
    for (std::size_t i = 0; i < ts.delta.size(); ++i) delta_col[i] = ts.delta[i];
    write_field_csv((out / "truncation.csv").string(), ts.b, {ts.u_b, delta_col},
                    {"u_b", "delta"},
                    {"profile: " + cfg.potential_text,
                     "x: " + fmt("%.17g", cfg.probe_x) + "  t: " + fmt("%.17g", cfg.probe_t),
                     std::string("monotone: ") + (ts.monotone ? "yes" : "no")});
    std::printf("truncation study: u_ref %.12g, deltas %s\n", ts.u_ref,
                ts.monotone ? "monotone" : "NOT monotone");
  }
  return 0;
}

int run_compare(const RunConfig& cfg, const RunnerOptions& opt) {
  ScatteringData d = obtain_scattering(cfg, opt);
  print_summary(d);
  fs::path out = opt.out_dir;

  double L = cfg.box_length;
  int n = cfg.split_modes;
  std::vector<double> u0(n);
  for (int j = 0; j < n; ++j) u0[j] = cfg.potential(-L / 2 + j * L / n);
  long n_steps = std::lround(std::ceil(cfg.compare_t / cfg.split_dt));
  double dt = cfg.compare_t / double(n_steps);
  oracle::SplitStepResult split = oracle::split_step_kdv(u0, L, dt, n_steps);
  std::printf("split-step: %ld steps of %.3g, mass drift %.3e\n", n_steps, dt,
              split.mass_drift);

  std::vector<int> sel;
  for (int j = 0; j < n; ++j) {
    double xj = -L / 2 + j * L / n;
    if (xj >= cfg.x_min && xj <= cfg.x_max) sel.push_back(j);
  }
  int stride = std::max<int>(1, int(sel.size()) / 200);
  std::vector<double> xs;
  std::vector<double> u_split;
  for (std::size_t i = 0; i < sel.size(); i += stride) {
    xs.push_back(-L / 2 + sel[i] * L / n);
    u_split.push_back(split.u[sel[i]]);
  }

  SolveOptions so = solve_options(cfg);
  so.cross_check = false;
  std::vector<double> u_det = u_field(d, xs, cfg.compare_t, so);
  std::vector<double> diff(xs.size());
  double linf = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    diff[i] = u_det[i] - u_split[i];
    linf = std::max(linf, std::abs(diff[i]));
  }
  write_field_csv((out / "compare.csv").string(), xs, {u_det, u_split, diff},
                  {"u_det", "u_split", "diff"},
                  {"profile: " + cfg.potential_text, "t: " + fmt("%.17g", cfg.compare_t),
                   "mass_drift: " + fmt("%.3e", split.mass_drift)});
  std::printf("t=%.4g: det route vs split-step L_inf = %.3e over %zu points\n",
              cfg.compare_t, linf, xs.size());
  return 0;
}

}  // namespace

int run_experiment(const RunConfig& cfg, const RunnerOptions& opt) {
  int workers = opt.workers > 0 ? opt.workers : cfg.workers;
  if (workers > 0) omp_set_num_threads(workers);
  fs::create_directories(opt.out_dir);
  if (cfg.mode == "scatter") return run_scatter(cfg, opt);
  if (cfg.mode == "solve") return run_solve(cfg, opt);
  if (cfg.mode == "converge") return run_converge(cfg, opt);
  return run_compare(cfg, opt);
}

}  // namespace kdv
