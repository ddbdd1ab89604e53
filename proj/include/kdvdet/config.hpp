#pragma once
// Experiment configuration: a strict INI-style format where every section and
// key must be known and every value must parse completely. Errors carry the
// offending line number and exit the CLI with status 2.

#include <optional>
#include <string>
#include <vector>

#include "kdvdet/hankel.hpp"
#include "kdvdet/potential.hpp"
#include "kdvdet/scattering.hpp"

namespace kdv {

struct RunConfig {
  std::string mode;  // scatter | solve | converge | compare

  Potential potential;
  std::string potential_text;  // the term lines, for echoing into outputs

  KGridParams kgrid;
  ScatteringOptions scat;
  DiscretizationParams disc;

  // [solve]
  double x_min = -10.0, x_max = 10.0;
  int n_x = 81;
  std::vector<double> times{0.0};
  bool cross_check = false;
  double fd_step = 1e-3;
  std::optional<double> residual_bound;
  double residual_dt = 1e-3;

  // [converge]
  double probe_x = 0.0, probe_t = 0.0;
  int n_quad_base = 0;  // 0: take disc.n_quad
  std::vector<double> truncations;

  // [compare]
  double compare_t = 0.1;
  double split_dt = 2e-4;
  int split_modes = 1024;
  double box_length = 60.0;

  // [run]
  int workers = 0;  // 0: library default
};

RunConfig parse_config_text(const std::string& text, const std::string& name = "<config>");
RunConfig parse_config_file(const std::string& path);

}  // namespace kdv
