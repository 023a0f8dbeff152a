#include "nswn/multipliers.hpp"

#include <cmath>

namespace nswn {

void leray_project(VectorField& v)
{
    const TorusLattice& L = *v.lat();
    par_for(L.n_modes(), [&](long idx) {
        auto k = L.mode(idx);
        double n2 = TorusLattice::norm2(k);
        if (n2 == 0.0) return;
        cplx dot = (double)k[0] * v[0].c[idx] + (double)k[1] * v[1].c[idx] + (double)k[2] * v[2].c[idx];
        dot /= n2;
        for (int i = 0; i < 3; ++i) v[i].c[idx] -= (double)k[i] * dot;
    });
}

void heat_propagate(ScalarField& f, double t)
{
    const TorusLattice& L = *f.lat;
    par_for(L.n_modes(), [&](long idx) {
        f.c[idx] *= std::exp(-TorusLattice::norm2(L.mode(idx)) * t);
    });
}

void heat_propagate(VectorField& v, double t)
{
    for (int i = 0; i < 3; ++i) heat_propagate(v[i], t);
}

ScalarField spatial_derivative(const ScalarField& f, int j)
{
    const TorusLattice& L = *f.lat;
    ScalarField r(L);
    par_for(L.n_modes(), [&](long idx) {
        auto k = L.mode(idx);
        r.c[idx] = cplx(0.0, (double)k[j]) * f.c[idx];
    });
    return r;
}

ScalarField divergence(const VectorField& v)
{
    const TorusLattice& L = *v.lat();
    ScalarField r(L);
    par_for(L.n_modes(), [&](long idx) {
        auto k = L.mode(idx);
        r.c[idx] = cplx(0.0, 1.0) * ((double)k[0] * v[0].c[idx] + (double)k[1] * v[1].c[idx] + (double)k[2] * v[2].c[idx]);
    });
    return r;
}

ScalarField leray_component(const ScalarField& f, int i, int j)
{
    const TorusLattice& L = *f.lat;
    ScalarField r(L);
    par_for(L.n_modes(), [&](long idx) {
        r.c[idx] = leray_sym(L.mode(idx), i, j) * f.c[idx];
    });
    return r;
}

void remove_mean(ScalarField& f) { f.c[f.lat->index(0, 0, 0)] = cplx(0.0); }
void remove_mean(VectorField& v) { for (int i = 0; i < 3; ++i) remove_mean(v[i]); }

} // namespace nswn
