#include "qkin/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qkin {

GaussLegendre::GaussLegendre(int points) {
  if (points < 1) throw std::invalid_argument("GaussLegendre: points < 1");
  // Golub-Welsch: eigenvalues of the Jacobi matrix give the nodes on (-1,1),
  // squared first eigenvector components give the weights.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes.resize(points);
  weights.resize(points);
  for (int k = 0; k < points; ++k) {
    nodes[k] = 0.5 * (solver.eigenvalues()(k) + 1.0);
    const double v = solver.eigenvectors()(0, k);
    weights[k] = v * v;  // 2 v^2 on (-1,1), halved by the interval map
  }
}

SimplexQuadrature::SimplexQuadrature(int nodes_per_axis, int max_depth)
    : rule_(nodes_per_axis), max_depth_(max_depth) {
  if (max_depth < 0) throw std::invalid_argument("SimplexQuadrature: bad depth");
}

Mat SimplexQuadrature::integrate(
    int depth, double t,
    const std::function<Mat(const std::vector<double>&)>& f) const {
  if (depth > max_depth_)
    throw std::invalid_argument("SimplexQuadrature: depth exceeds the configured cap");
  std::vector<double> times(depth);
  Mat acc;
  bool first = true;
  std::function<void(int, double, double)> descend = [&](int level, double upper,
                                                         double weight) {
    if (level == depth) {
      const Mat value = weight * f(times);
      if (first) {
        acc = value;
        first = false;
      } else {
        acc += value;
      }
      return;
    }
    for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
      times[level] = upper * rule_.nodes[k];
      descend(level + 1, times[level], weight * upper * rule_.weights[k]);
    }
  };
  descend(0, t, 1.0);
  return acc;
}

std::vector<double> ChebyshevInterpolant::sample_points(int count,
                                                        double length) {
  if (count < 2) throw std::invalid_argument("ChebyshevInterpolant: need >= 2 points");
  std::vector<double> out(count);
  const int n = count - 1;
  for (int k = 0; k <= n; ++k) {
    const double xi = std::cos(std::numbers::pi * (n - k) / n);  // ascending
    out[k] = 0.5 * length * (xi + 1.0);
  }
  return out;
}

ChebyshevInterpolant ChebyshevInterpolant::fit(const std::vector<Mat>& values,
                                               double length) {
  const int n = static_cast<int>(values.size()) - 1;
  if (n < 1) throw std::invalid_argument("ChebyshevInterpolant: need >= 2 samples");
  ChebyshevInterpolant out;
  out.length_ = length;
  out.coeffs_.assign(n + 1, Mat::Zero(values[0].rows(), values[0].cols()));
  // Discrete cosine transform over Lobatto samples; endpoints half weighted.
  for (int k = 0; k <= n; ++k) {
    Mat acc = Mat::Zero(values[0].rows(), values[0].cols());
    for (int j = 0; j <= n; ++j) {
      // values are stored ascending in x, i.e. j = 0 is xi = -1 = cos(pi n/n).
      const double angle = std::numbers::pi * k * (n - j) / n;
      const double w = (j == 0 || j == n) ? 0.5 : 1.0;
      acc += w * std::cos(angle) * values[j];
    }
    out.coeffs_[k] = (2.0 / n) * acc;
    if (k == 0 || k == n) out.coeffs_[k] *= 0.5;
  }
  return out;
}

Mat ChebyshevInterpolant::eval(double x) const {
  const double xi = 2.0 * x / length_ - 1.0;
  // Clenshaw recurrence.
  const long rows = coeffs_[0].rows(), cols = coeffs_[0].cols();
  Mat b1 = Mat::Zero(rows, cols), b2 = Mat::Zero(rows, cols);
  for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 1; --k) {
    Mat next = 2.0 * xi * b1 - b2 + coeffs_[k];
    b2 = std::move(b1);
    b1 = std::move(next);
  }
  return coeffs_[0] + xi * b1 - b2;
}

ChebyshevInterpolant ChebyshevInterpolant::antiderivative() const {
  const int n = static_cast<int>(coeffs_.size()) - 1;
  ChebyshevInterpolant out;
  out.length_ = length_;
  out.coeffs_.assign(n + 2, Mat::Zero(coeffs_[0].rows(), coeffs_[0].cols()));
  const double scale = length_ / 4.0;  // (length/2) from dx, 1/2 from 1/(2k)
  auto coeff = [&](int k) -> Mat {
    if (k >= 0 && k <= n) return coeffs_[k];
    return Mat::Zero(coeffs_[0].rows(), coeffs_[0].cols());
  };
  for (int k = 1; k <= n + 1; ++k) {
    Mat term = coeff(k - 1) - coeff(k + 1);
    if (k == 1) term = 2.0 * coeff(0) - coeff(2);
    out.coeffs_[k] = (scale / k) * term;
  }
  // Fix the constant so the antiderivative vanishes at x = 0 (xi = -1).
  Mat at_zero = Mat::Zero(coeffs_[0].rows(), coeffs_[0].cols());
  double sign = -1.0;
  for (int k = 1; k <= n + 1; ++k) {
    at_zero += sign * out.coeffs_[k];
    sign = -sign;
  }
  out.coeffs_[0] = -at_zero;
  return out;
}

}  // namespace qkin
