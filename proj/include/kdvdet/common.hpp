#pragma once
// Shared aliases, error types and small numeric helpers.

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdv {

using Complex = std::complex<double>;
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr Complex kI{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();

// Raised when a numerical guard trips (quadrature tail too fat, Wronskian
// collapse, overflow, disagreeing cross-checks). CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Raised on malformed configuration or CLI usage. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline double sqr(double v) { return v * v; }
inline Complex sqr(Complex v) { return v * v; }

// sech with overflow-safe tails.
inline double sech(double x) {
  double ax = std::abs(x);
  if (ax > 350.0) return 0.0;
  return 1.0 / std::cosh(ax);
}

// FNV-1a 64-bit, used for content-addressed cache keys. Deliberately not
// std::hash: the key must be stable across compilers and runs.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace kdv
