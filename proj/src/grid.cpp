#include "prestrain/grid.hpp"

#include <cmath>

namespace prestrain {

ParamGrid::ParamGrid(Interval x1, Interval x2, int n1, int n2)
    : x1_(x1), x2_(x2), n1_(n1), n2_(n2) {
  if (n1 < 3 || n2 < 3) throw ConfigError("grid needs at least 3 nodes per axis");
  if (!(x1.length() > 0.0) || !(x2.length() > 0.0))
    throw ConfigError("degenerate parameter interval");
  h1_ = x1.length() / (n1 - 1);
  h2_ = x2.length() / (n2 - 1);
}

ParamGrid ParamGrid::refined(int levels) const {
  int n1 = n1_, n2 = n2_;
  for (int l = 0; l < levels; ++l) {
    n1 = 2 * n1 - 1;
    n2 = 2 * n2 - 1;
  }
  return ParamGrid(x1_, x2_, n1, n2);
}

double ParamGrid::quad_weight(int i, int j) const {
  const double wi = (i == 0 || i == n1_ - 1) ? 0.5 : 1.0;
  const double wj = (j == 0 || j == n2_ - 1) ? 0.5 : 1.0;
  return wi * wj * h1_ * h2_;
}

ParamGrid build_grid(Interval x1, Interval x2, int n1, int n2) {
  return ParamGrid(x1, x2, n1, n2);
}

ScalarField diff(const ParamGrid& grid, const ScalarField& f, int axis) {
  ScalarField out(grid);
  const int n1 = grid.n1(), n2 = grid.n2();
  const double h = (axis == 0) ? grid.h1() : grid.h2();
  auto at = [&](int i, int j) -> double { return f(i, j); };
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const int q = (axis == 0) ? i : j;
      const int qmax = (axis == 0) ? n1 - 1 : n2 - 1;
      auto sample = [&](int dq) {
        return (axis == 0) ? at(i + dq, j) : at(i, j + dq);
      };
      double v;
      if (q == 0) {
        v = (-3.0 * sample(0) + 4.0 * sample(1) - sample(2)) / (2.0 * h);
      } else if (q == qmax) {
        v = (3.0 * sample(0) - 4.0 * sample(-1) + sample(-2)) / (2.0 * h);
      } else {
        v = (sample(1) - sample(-1)) / (2.0 * h);
      }
      out(i, j) = v;
    }
  }
  return out;
}

ScalarField diff_adjoint(const ParamGrid& grid, const ScalarField& f, int axis) {
  // Scatter the transpose of each stencil row used in diff().
  ScalarField out(grid, 0.0);
  const int n1 = grid.n1(), n2 = grid.n2();
  const double h = (axis == 0) ? grid.h1() : grid.h2();
  auto add = [&](int i, int j, double v) { out(i, j) += v; };
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const int q = (axis == 0) ? i : j;
      const int qmax = (axis == 0) ? n1 - 1 : n2 - 1;
      const double w = f(i, j);
      auto scatter = [&](int dq, double c) {
        if (axis == 0)
          add(i + dq, j, c * w);
        else
          add(i, j + dq, c * w);
      };
      if (q == 0) {
        scatter(0, -3.0 / (2.0 * h));
        scatter(1, 4.0 / (2.0 * h));
        scatter(2, -1.0 / (2.0 * h));
      } else if (q == qmax) {
        scatter(0, 3.0 / (2.0 * h));
        scatter(-1, -4.0 / (2.0 * h));
        scatter(-2, 1.0 / (2.0 * h));
      } else {
        scatter(1, 1.0 / (2.0 * h));
        scatter(-1, -1.0 / (2.0 * h));
      }
    }
  }
  return out;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.raw()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_interior(const ParamGrid& grid, const ScalarField& f) {
  double m = 0.0;
  for (int j = 1; j < grid.n2() - 1; ++j)
    for (int i = 1; i < grid.n1() - 1; ++i) m = std::max(m, std::abs(f(i, j)));
  return m;
}

}  // namespace prestrain
