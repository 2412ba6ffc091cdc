#ifndef QKIN_ODE_HPP
#define QKIN_ODE_HPP

#include <functional>

#include "qkin/tensor_algebra.hpp"

namespace qkin {

// Adaptive integration of dy/dt = rhs(y, t) from t0 to t1 (either direction)
// with an embedded Runge-Kutta-Fehlberg 7(8) pair at the given absolute and
// relative tolerance. The complex state is carried as an interleaved real
// vector internally.
Vec integrate_complex_ode(
    const std::function<void(const Vec& y, Vec& dydt, double t)>& rhs, Vec y0,
    double t0, double t1, double tol);

}  // namespace qkin

#endif  // QKIN_ODE_HPP
