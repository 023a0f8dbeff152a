#pragma once

#include <cmath>

namespace nswn {

/// exponential-trapezoid quadrature of int_0^dt e^{-a(dt-s)} F(s) ds with F
/// linear between endpoints: result = w0 * F(0) + w1 * F(dt)
inline double etd_w1(double a, double dt)
{
    if (a * dt < 1e-7) return 0.5 * dt * (1.0 - a * dt / 3.0);
    double em = std::expm1(-a * dt); // e^{-a dt} - 1
    return 1.0 / a + em / (a * a * dt);
}

inline double etd_w0(double a, double dt)
{
    if (a * dt < 1e-7) return 0.5 * dt * (1.0 - 2.0 * a * dt / 3.0);
    return -std::expm1(-a * dt) / a - etd_w1(a, dt);
}

} // namespace nswn
