#ifndef QKIN_QUADRATURE_HPP
#define QKIN_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "qkin/tensor_algebra.hpp"

// Integration utilities for the time-ordered expansions: nested
// Gauss-Legendre rules over the ordered simplex t >= t_1 >= ... >= t_n >= 0
// and a Chebyshev interpolant with exact antiderivative for running
// integrals of matrix-valued functions.

namespace qkin {

struct GaussLegendre {
  explicit GaussLegendre(int points);
  std::vector<double> nodes;    // on (0, 1)
  std::vector<double> weights;  // positive, summing to 1
};

class SimplexQuadrature {
 public:
  explicit SimplexQuadrature(int nodes_per_axis = 16, int max_depth = 3);

  int nodes_per_axis() const { return static_cast<int>(rule_.nodes.size()); }
  int max_depth() const { return max_depth_; }

  // Integral of f over the depth-dimensional ordered simplex inside [0, t]^n;
  // f receives times in decreasing order (t_1 >= t_2 >= ...). depth = 0
  // evaluates f on an empty time list.
  Mat integrate(int depth, double t,
                const std::function<Mat(const std::vector<double>&)>& f) const;

 private:
  GaussLegendre rule_;
  int max_depth_;
};

// Matrix-valued Chebyshev interpolant on [0, length], built from samples at
// the Chebyshev-Lobatto points.
class ChebyshevInterpolant {
 public:
  static std::vector<double> sample_points(int count, double length);

  // values[k] = f(sample_points(count, length)[k])
  static ChebyshevInterpolant fit(const std::vector<Mat>& values, double length);

  Mat eval(double x) const;
  // Antiderivative vanishing at 0.
  ChebyshevInterpolant antiderivative() const;

  double length() const { return length_; }

 private:
  double length_ = 1.0;
  std::vector<Mat> coeffs_;  // Chebyshev coefficients, constant term first
};

}  // namespace qkin

#endif  // QKIN_QUADRATURE_HPP
