#pragma once

#include <vector>

#include "nswn/fft.hpp"
#include "nswn/multipliers.hpp"

namespace nswn {

/// dyadic radial partition of unity: chi(z) + sum_{j>=0} theta(2^-j z) = 1,
/// chi supported in |z| <= 4/3, theta in 3/4 <= |z| <= 8/3
struct DyadicPartition {
    int J;             // largest block index used on the lattice
    double c0;         // chi plateau radius
    double ratio;      // support stretch of the transition

    explicit DyadicPartition(const TorusLattice& lat, double c0_ = 0.75, double ratio_ = 16.0 / 9.0)
        : J((int)std::ceil(std::log2((double)lat.N)) + 1), c0(c0_), ratio(ratio_) {}

    /// smooth step: 1 for r <= 1, 0 for r >= ratio, built from the bump exp(1 - 1/(1-r^2))
    double step(double r) const
    {
        if (r <= 1.0) return 1.0;
        if (r >= ratio) return 0.0;
        double u = (ratio - r) / (ratio - 1.0);
        double a = bump(u - 1.0), b = bump(-u);
        return a / (a + b);
    }
    static double bump(double r)
    {
        if (std::abs(r) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - r * r));
    }

    double chi(double z) const { return step(z / c0); }
    double theta(double z) const { return step(z / (2.0 * c0)) - step(z / c0); }

    /// multiplier weight of block j (j = -1 is chi)
    double weight(int j, double z) const
    {
        if (j == -1) return chi(z);
        return theta(std::ldexp(z, -j));
    }

    /// chi + sum_{0<=j<=J} theta(2^-j z); equals 1 on the resolved range
    double partition_sum(double z) const
    {
        double s = chi(z);
        for (int j = 0; j <= J; ++j) s += theta(std::ldexp(z, -j));
        return s;
    }
};

/// Delta_j u (Fourier multiplier)
ScalarField lp_block(const ScalarField& u, const DyadicPartition& P, int j);

struct BesovIndex {
    double alpha;
    double p; // >= 1, inf allowed via INFINITY
    double q;
};

/// grid L^p norm with volume weight (2pi)^3 / M^3 (p = inf -> max)
double grid_lp_norm(const std::vector<cplx>& grid, const TorusLattice& lat, double p);

/// truncated Besov norm of a scalar field
double besov_norm(const ScalarField& u, const BesovIndex& idx, const DyadicPartition& P, FftEngine& eng);

/// component sum for vector fields
double besov_norm(const VectorField& u, const BesovIndex& idx, const DyadicPartition& P, FftEngine& eng);

/// ||u||_{B^{alpha - d(1/p1 - 1/p2)}_{p2,q2}} / ||u||_{B^alpha_{p1,q1}}, d = 3
double embedding_check(const ScalarField& u, double p1, double q1, double p2, double q2, double alpha,
                       const DyadicPartition& P, FftEngine& eng);

} // namespace nswn
