#pragma once

#include <random>

#include "nswn/field.hpp"
#include "nswn/multipliers.hpp"

// shared test helpers: Gaussian random fields with prescribed spectral slope
namespace nswn::testing {

inline ScalarField slope_field(const TorusLattice& L, double alpha, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ScalarField f(L);
    for (long idx = 0; idx < L.n_modes(); ++idx) {
        auto k = L.mode(idx);
        double n = std::sqrt(TorusLattice::norm2(k));
        if (n == 0.0) continue;
        double amp = std::pow(n, -alpha - 1.5);
        f.c[idx] = amp * cplx(g(rng), g(rng));
    }
    enforce_reality(f);
    return f;
}

inline ScalarField white_field(const TorusLattice& L, unsigned seed)
{
    return slope_field(L, -1.5, seed);
}

inline double linf_mode_diff(const ScalarField& a, const ScalarField& b)
{
    double m = 0.0;
    for (size_t i = 0; i < a.c.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

inline double linf_mode(const ScalarField& a)
{
    double m = 0.0;
    for (auto& v : a.c) m = std::max(m, std::abs(v));
    return m;
}

} // namespace nswn::testing
