#include "prestrain/core.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace prestrain {

namespace {
double pairwise_sum_range(const double* p, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += p[k];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_range(p, half) + pairwise_sum_range(p + half, n - half);
}
}  // namespace

double pairwise_sum(const std::vector<double>& values) {
  return values.empty() ? 0.0 : pairwise_sum_range(values.data(), values.size());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lx = std::log10(x[k]);
    const double ly = std::log10(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

std::vector<double> fit_polynomial_through_origin(const std::vector<double>& t,
                                                  const std::vector<double>& f) {
  const int m = static_cast<int>(t.size());
  Eigen::MatrixXd V(m, m);
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m; ++r) {
    double p = 1.0;
    for (int c = 0; c < m; ++c) {
      p *= t[r];
      V(r, c) = p;  // t^(c+1)
    }
    rhs(r) = f[r];
  }
  Eigen::VectorXd sol = V.fullPivLu().solve(rhs);
  return std::vector<double>(sol.data(), sol.data() + m);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace prestrain
