#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace prestrain {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy; the CLI maps these onto its exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FrameDegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotEllipticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic pairwise summation. Quadrature reductions go through this
/// so that results are independent of traversal chunking.
double pairwise_sum(const std::vector<double>& values);

/// Least-squares slope of log10(y) against log10(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Solves a small Vandermonde system: finds polynomial coefficients c_1..c_m
/// (no constant term) with sum_k c_k t_i^k = f_i for m sample points.
std::vector<double> fit_polynomial_through_origin(const std::vector<double>& t,
                                                  const std::vector<double>& f);

/// FNV-1a hash of a byte string, used to stamp output files with their config.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace prestrain
