#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace nswn {

/// Fourier lattice for the 3-torus [0,2pi)^3: retained modes k with |k_i| <= N,
/// collocation grid of M^3 points with M >= 2N+2 and M {2,3,5}-smooth.
struct TorusLattice {
    int N;                    // per-axis mode cutoff
    int M;                    // collocation points per axis
    double dealias_frac;      // products keep |k_i| <= dealias_frac * N

    explicit TorusLattice(int N_, int M_ = 0, double frac = 2.0 / 3.0)
        : N(N_), M(M_ ? M_ : smooth_grid(2 * N_ + 2)), dealias_frac(frac)
    {
        if (N < 1) throw std::invalid_argument("lattice: N >= 1 required");
        if (M < 2 * N + 2) throw std::invalid_argument("lattice: M >= 2N+2 required");
    }

    static bool smooth235(int m)
    {
        for (int p : {2, 3, 5})
            while (m % p == 0) m /= p;
        return m == 1;
    }
    static int smooth_grid(int m)
    {
        while (!smooth235(m)) ++m;
        return m;
    }

    int side() const { return 2 * N + 1; }
    long n_modes() const { long s = side(); return s * s * s; }
    long n_grid() const { long m = M; return m * m * m; }

    /// per-axis cutoff for dealiased products
    int cutoff() const { return (int)std::floor(dealias_frac * N + 1e-12); }

    bool in_cutoff(int k1, int k2, int k3) const
    {
        int c = cutoff();
        return std::abs(k1) <= c && std::abs(k2) <= c && std::abs(k3) <= c;
    }

    long index(int k1, int k2, int k3) const
    {
        long s = side();
        return ((long)(k1 + N) * s + (k2 + N)) * s + (k3 + N);
    }
    std::array<int, 3> mode(long idx) const
    {
        int s = side();
        int k3 = (int)(idx % s) - N;
        int k2 = (int)((idx / s) % s) - N;
        int k1 = (int)(idx / ((long)s * s)) - N;
        return {k1, k2, k3};
    }

    static double norm2(const std::array<int, 3>& k)
    {
        return (double)k[0] * k[0] + (double)k[1] * k[1] + (double)k[2] * k[2];
    }

    bool operator==(const TorusLattice& o) const
    {
        return N == o.N && M == o.M && dealias_frac == o.dealias_frac;
    }
};

} // namespace nswn
