// Benchmark: OpenMP kernels against their serial reference implementations.
// Times the scattering coefficient sweep and the u(x,t) field sweep and
// checks that both pairs agree bitwise (the parallel loops are per-point
// independent, so they must).

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include "kdvdet/determinant.hpp"
#include "kdvdet/potential.hpp"
#include "kdvdet/scattering.hpp"

using namespace kdv;

namespace {

bool bitwise_equal(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(Complex)) == 0;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  int n_half = argc > 1 ? std::atoi(argv[1]) : 256;
  int n_x = argc > 2 ? std::atoi(argv[2]) : 33;

  SechWell w;
  w.depth = -6.0;
  Potential q(w);
  KGridParams grid;
  grid.n_half = n_half;

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %10s %10s %8s %8s\n", "kernel", "serial[s]", "openmp[s]", "speedup",
              "bitwise");

  double t0 = omp_get_wtime();
  CoefficientGrid cs = scattering_coefficients_serial(q, grid);
  double t1 = omp_get_wtime();
  CoefficientGrid cp = scattering_coefficients(q, grid);
  double t2 = omp_get_wtime();
  bool ok_c = bitwise_equal(cs.R, cp.R) && bitwise_equal(cs.T, cp.T) &&
              bitwise_equal(cs.L, cp.L);
  std::printf("%-28s %10.3f %10.3f %8.2f %8s\n", "coefficient sweep", t1 - t0, t2 - t1,
              (t1 - t0) / (t2 - t1), ok_c ? "yes" : "NO");

  ScatteringData data = compute_scattering(q, grid);
  std::vector<double> xs(n_x);
  for (int i = 0; i < n_x; ++i) xs[i] = -8.0 + 16.0 * i / (n_x - 1);
  SolveOptions opt;

  double t3 = omp_get_wtime();
  std::vector<double> us = u_field_serial(data, xs, 0.1, opt);
  double t4 = omp_get_wtime();
  std::vector<double> up = u_field(data, xs, 0.1, opt);
  double t5 = omp_get_wtime();
  bool ok_u = bitwise_equal(us, up);
  std::printf("%-28s %10.3f %10.3f %8.2f %8s\n", "field sweep", t4 - t3, t5 - t4,
              (t4 - t3) / (t5 - t4), ok_u ? "yes" : "NO");

  return (ok_c && ok_u) ? 0 : 1;
}
