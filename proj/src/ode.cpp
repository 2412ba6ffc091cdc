#include "qkin/ode.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace qkin {

namespace {
namespace odeint = boost::numeric::odeint;
using RealState = std::vector<double>;
}  // namespace

Vec integrate_complex_ode(
    const std::function<void(const Vec& y, Vec& dydt, double t)>& rhs, Vec y0,
    double t0, double t1, double tol) {
  const long n = y0.size();
  if (t0 == t1 || n == 0) return y0;

  RealState state(2 * n);
  for (long k = 0; k < n; ++k) {
    state[2 * k] = y0(k).real();
    state[2 * k + 1] = y0(k).imag();
  }

  Vec y(n), dy(n);
  auto system = [&](const RealState& x, RealState& dxdt, double t) {
    for (long k = 0; k < n; ++k) y(k) = Complex(x[2 * k], x[2 * k + 1]);
    rhs(y, dy, t);
    for (long k = 0; k < n; ++k) {
      dxdt[2 * k] = dy(k).real();
      dxdt[2 * k + 1] = dy(k).imag();
    }
  };

  const double span = t1 - t0;
  const double dt0 = (span > 0 ? 1.0 : -1.0) * std::min(0.01, std::abs(span));
  auto stepper =
      odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<RealState>());
  odeint::integrate_adaptive(stepper, system, state, t0, t1, dt0);

  Vec out(n);
  for (long k = 0; k < n; ++k) out(k) = Complex(state[2 * k], state[2 * k + 1]);
  return out;
}

}  // namespace qkin
