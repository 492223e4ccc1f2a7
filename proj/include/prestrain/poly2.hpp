#pragma once

#include <map>
#include <utility>

namespace prestrain {

/// Bivariate polynomial with closed-form derivatives. Used for analytic
/// height functions, directors and test displacement fields.
class Poly2 {
 public:
  Poly2() = default;
  Poly2(std::initializer_list<std::pair<std::pair<int, int>, double>> terms) {
    for (const auto& [e, c] : terms) add(e.first, e.second, c);
  }
  static Poly2 constant(double c) {
    Poly2 p;
    p.add(0, 0, c);
    return p;
  }

  void add(int i, int j, double c) {
    if (c != 0.0) coef_[{i, j}] += c;
  }

  double operator()(double x1, double x2) const {
    double s = 0.0;
    for (const auto& [e, c] : coef_) s += c * ipow(x1, e.first) * ipow(x2, e.second);
    return s;
  }

  Poly2 derivative(int axis) const {
    Poly2 out;
    for (const auto& [e, c] : coef_) {
      const int i = e.first, j = e.second;
      if (axis == 0 && i > 0) out.add(i - 1, j, c * i);
      if (axis == 1 && j > 0) out.add(i, j - 1, c * j);
    }
    return out;
  }

  bool zero() const { return coef_.empty(); }

 private:
  static double ipow(double x, int p) {
    double r = 1.0;
    for (int k = 0; k < p; ++k) r *= x;
    return r;
  }
  std::map<std::pair<int, int>, double> coef_;
};

}  // namespace prestrain
