#pragma once

#include <cstdint>
#include <vector>

#include "nswn/etd.hpp"
#include "nswn/field.hpp"
#include "nswn/multipliers.hpp"

namespace nswn {

/// counter-based Gaussian generator: every draw is a pure hash of
/// (seed, mode, time index, stream), so sampling order, thread count and
/// mollification level cannot change the underlying randomness
struct CounterRng {
    static uint64_t mix(uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }
    static uint64_t key(uint64_t seed, uint64_t mode, uint64_t tidx, uint64_t stream)
    {
        uint64_t h = mix(seed);
        h = mix(h ^ mode);
        h = mix(h ^ tidx);
        h = mix(h ^ stream);
        return h;
    }
    static double uniform(uint64_t h) { return ((h >> 11) + 1.0) * 0x1.0p-53; }
    /// two standard normals per key (Box-Muller)
    static void gauss_pair(uint64_t seed, uint64_t mode, uint64_t tidx, uint64_t stream, double& g0, double& g1)
    {
        double u = uniform(key(seed, mode, tidx, 2 * stream));
        double v = uniform(key(seed, mode, tidx, 2 * stream + 1));
        double r = std::sqrt(-2.0 * std::log(u));
        g0 = r * std::cos(2.0 * M_PI * v);
        g1 = r * std::sin(2.0 * M_PI * v);
    }
};

/// smooth radial cutoff profile: 1 on |x| <= 1/2, C-infinity roll-off,
/// compact support in |x| < 1 (plateau keeps the small-eps asymptotics clean)
inline double mollifier_profile(double r)
{
    double a = std::abs(r);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    auto bump = [](double x) {
        if (std::abs(x) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - x * x));
    };
    double u = (1.0 - a) / 0.5;
    double num = bump(u - 1.0);
    return num / (num + bump(-u));
}
inline double mollifier(double eps, const std::array<int, 3>& k)
{
    return mollifier_profile(eps * std::sqrt(TorusLattice::norm2(k)));
}

/// multiply mode k by f(eps k)
ScalarField mollify(const ScalarField& f, double eps);

struct NoiseConfig {
    const TorusLattice* lat = nullptr;
    double eps = 0.25;
    uint64_t seed = 1;
    double T = 0.25;
    int steps = 64;
    double dt() const { return T / steps; }
};

/// stationary mollified OU velocity field (u1) marched exactly in law,
/// with its Duhamel antiderivative K (LK = u1, K(0) = 0)
struct OuState {
    NoiseConfig cfg;
    int step = 0; // current time index, t = step * dt
    VectorField u1;
    VectorField k_field;

    explicit OuState(const NoiseConfig& c);
    double time() const { return step * cfg.dt(); }
    /// advance u1 by one exact OU step and K by exponential-trapezoid quadrature
    void advance();

private:
    void fill_initial();
};

/// densely stored path on the uniform grid (small lattices / diagnostics)
struct OuPath {
    NoiseConfig cfg;
    std::vector<double> t;
    std::vector<VectorField> u1;
    std::vector<VectorField> k_field;
};

OuPath sample_ou_path(const NoiseConfig& cfg);

/// true if mode index is the lexicographic representative of {k,-k}
inline bool mode_canonical(const std::array<int, 3>& k)
{
    if (k[0] != 0) return k[0] > 0;
    if (k[1] != 0) return k[1] > 0;
    return k[2] > 0;
}

/// packed mode id used as RNG counter (N <= 500 supported)
inline uint64_t mode_code(const std::array<int, 3>& k)
{
    return ((uint64_t)(k[0] + 512) << 20) | ((uint64_t)(k[1] + 512) << 10) | (uint64_t)(k[2] + 512);
}

} // namespace nswn
