#pragma once

#include "nswn/field.hpp"

namespace nswn {

/// Leray symbol P^{ij}(k) = delta_ij - k_i k_j / |k|^2, identity at k = 0
inline double leray_sym(const std::array<int, 3>& k, int i, int j)
{
    double n2 = TorusLattice::norm2(k);
    double d = (i == j) ? 1.0 : 0.0;
    if (n2 == 0.0) return d;
    return d - (double)k[i] * (double)k[j] / n2;
}

/// v <- P v (divergence-free projection)
void leray_project(VectorField& v);

/// e^{t Laplacian} applied in place (viscosity 1)
void heat_propagate(ScalarField& f, double t);
void heat_propagate(VectorField& v, double t);

/// partial derivative along axis j: multiplication by i k_j
ScalarField spatial_derivative(const ScalarField& f, int j);

/// divergence of a vector field
ScalarField divergence(const VectorField& v);

/// generic real radial-in-k multiplier m(|k|) (used by LP blocks etc.)
template <class M>
ScalarField apply_multiplier(const ScalarField& f, M&& m)
{
    const TorusLattice& L = *f.lat;
    ScalarField r(L);
    par_for(L.n_modes(), [&](long idx) {
        auto k = L.mode(idx);
        r.c[idx] = m(k) * f.c[idx];
    });
    return r;
}

/// serial reference twin of apply_multiplier
template <class M>
ScalarField apply_multiplier_serial(const ScalarField& f, M&& m)
{
    const TorusLattice& L = *f.lat;
    ScalarField r(L);
    serial_for(L.n_modes(), [&](long idx) {
        auto k = L.mode(idx);
        r.c[idx] = m(k) * f.c[idx];
    });
    return r;
}

/// P^{ij}(k) applied to a scalar field as a plain symbol (fixed i,j)
ScalarField leray_component(const ScalarField& f, int i, int j);

/// zero out the k = 0 coefficient (mean-free gauge)
void remove_mean(ScalarField& f);
void remove_mean(VectorField& v);

} // namespace nswn
