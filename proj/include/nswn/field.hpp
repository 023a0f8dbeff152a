#pragma once

#include <array>
#include <complex>
#include <vector>

#include "nswn/lattice.hpp"
#include "nswn/par.hpp"

namespace nswn {

using cplx = std::complex<double>;

/// scalar field in mode space, coefficients w.r.t. e_k = (2pi)^{-3/2} exp(ikx)
struct ScalarField {
    const TorusLattice* lat = nullptr;
    std::vector<cplx> c;

    ScalarField() = default;
    explicit ScalarField(const TorusLattice& l) : lat(&l), c(l.n_modes(), cplx(0.0)) {}

    cplx& at(int k1, int k2, int k3) { return c[lat->index(k1, k2, k3)]; }
    const cplx& at(int k1, int k2, int k3) const { return c[lat->index(k1, k2, k3)]; }

    void zero() { std::fill(c.begin(), c.end(), cplx(0.0)); }

    ScalarField& operator+=(const ScalarField& o)
    {
        par_for((long)c.size(), [&](long i) { c[i] += o.c[i]; });
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o)
    {
        par_for((long)c.size(), [&](long i) { c[i] -= o.c[i]; });
        return *this;
    }
    ScalarField& operator*=(double s)
    {
        par_for((long)c.size(), [&](long i) { c[i] *= s; });
        return *this;
    }
    void axpy(double a, const ScalarField& x)
    {
        par_for((long)c.size(), [&](long i) { c[i] += a * x.c[i]; });
    }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { a += b; return a; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { a -= b; return a; }
inline ScalarField operator*(double s, ScalarField a) { a *= s; return a; }

/// 3-component velocity-type field
struct VectorField {
    std::array<ScalarField, 3> u;

    VectorField() = default;
    explicit VectorField(const TorusLattice& l) : u{ScalarField(l), ScalarField(l), ScalarField(l)} {}

    ScalarField& operator[](int i) { return u[i]; }
    const ScalarField& operator[](int i) const { return u[i]; }
    const TorusLattice* lat() const { return u[0].lat; }
    void zero() { for (auto& s : u) s.zero(); }

    VectorField& operator+=(const VectorField& o) { for (int i = 0; i < 3; ++i) u[i] += o.u[i]; return *this; }
    VectorField& operator-=(const VectorField& o) { for (int i = 0; i < 3; ++i) u[i] -= o.u[i]; return *this; }
    VectorField& operator*=(double s) { for (int i = 0; i < 3; ++i) u[i] *= s; return *this; }
    void axpy(double a, const VectorField& x) { for (int i = 0; i < 3; ++i) u[i].axpy(a, x.u[i]); }
};

inline VectorField operator+(VectorField a, const VectorField& b) { a += b; return a; }
inline VectorField operator-(VectorField a, const VectorField& b) { a -= b; return a; }
inline VectorField operator*(double s, VectorField a) { a *= s; return a; }

/// enforce coeff(-k) = conj(coeff(k)) by symmetrization; returns max asymmetry seen
double enforce_reality(ScalarField& f);

/// max_k |coeff(-k) - conj(coeff(k))|
double reality_defect(const ScalarField& f);

} // namespace nswn
