#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

#include "prestrain/core.hpp"

namespace prestrain {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

/// Uniform tensor grid over a rectangle. Node (i,j) sits at
/// (x1lo + i*h1, x2lo + j*h2); boundary nodes are those with an index on the
/// edge of the index box.
class ParamGrid {
 public:
  ParamGrid(Interval x1, Interval x2, int n1, int n2);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return static_cast<std::size_t>(n1_) * n2_; }
  double h1() const { return h1_; }
  double h2() const { return h2_; }
  Interval x1_range() const { return x1_; }
  Interval x2_range() const { return x2_; }

  double x1(int i) const { return x1_.lo + i * h1_; }
  double x2(int j) const { return x2_.lo + j * h2_; }

  std::size_t index(int i, int j) const {
    assert(i >= 0 && i < n1_ && j >= 0 && j < n2_);
    return static_cast<std::size_t>(j) * n1_ + i;
  }
  bool boundary(int i, int j) const {
    return i == 0 || j == 0 || i == n1_ - 1 || j == n2_ - 1;
  }
  bool interior(int i, int j) const { return !boundary(i, j); }
  int boundary_count() const { return 2 * n1_ + 2 * n2_ - 4; }

  /// Grid with the same extents and spacing halved `levels` times.
  ParamGrid refined(int levels = 1) const;

  /// Trapezoidal quadrature weight of node (i,j), including h1*h2.
  double quad_weight(int i, int j) const;

 private:
  Interval x1_, x2_;
  int n1_, n2_;
  double h1_, h2_;
};

ParamGrid build_grid(Interval x1, Interval x2, int n1, int n2);

/// Per-node storage for any value type.
template <class T>
class NodeField {
 public:
  NodeField() = default;
  explicit NodeField(const ParamGrid& grid, const T& init = T())
      : n1_(grid.n1()), n2_(grid.n2()), data_(grid.size(), init) {}

  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * n1_ + i]; }
  const T& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(j) * n1_ + i];
  }
  T& operator[](std::size_t k) { return data_[k]; }
  const T& operator[](std::size_t k) const { return data_[k]; }

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

 private:
  int n1_ = 0, n2_ = 0;
  std::vector<T> data_;
};

using ScalarField = NodeField<double>;

/// Second-order first derivative in direction `axis` (0 -> x1, 1 -> x2):
/// central in the interior, one-sided three-point on the boundary.
ScalarField diff(const ParamGrid& grid, const ScalarField& f, int axis);

/// Adjoint (exact transpose) of `diff`, needed by the functional minimizer.
ScalarField diff_adjoint(const ParamGrid& grid, const ScalarField& f, int axis);

double max_abs(const ScalarField& f);
double max_abs_interior(const ParamGrid& grid, const ScalarField& f);

}  // namespace prestrain
