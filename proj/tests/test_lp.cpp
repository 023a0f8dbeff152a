#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nswn/lp.hpp"

using namespace nswn;

namespace {

ScalarField random_field(const TorusLattice& L, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ScalarField f(L);
    for (auto& v : f.c) v = cplx(g(rng), g(rng));
    enforce_reality(f);
    return f;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b)
{
    double m = 0.0;
    for (size_t i = 0; i < a.c.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

} // namespace

TEST_CASE("partition of unity residual < 1e-12 on resolved range")
{
    for (int N : {8, 16, 32}) {
        TorusLattice L(N);
        DyadicPartition P(L);
        CHECK(P.J == (int)std::ceil(std::log2((double)N)) + 1);
        double worst = 0.0;
        for (double z = 0.0; z <= std::sqrt(3.0) * N + 0.5; z += 0.01)
            worst = std::max(worst, std::abs(P.partition_sum(z) - 1.0));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("support structure: chi ball, theta annulus, adjacent-only overlap")
{
    TorusLattice L(16);
    DyadicPartition P(L);
    CHECK(P.chi(0.70) == 1.0);
    CHECK(P.chi(4.0 / 3.0 + 1e-9) == 0.0);
    CHECK(P.theta(0.74) == 0.0);
    CHECK(P.theta(8.0 / 3.0 + 1e-9) == 0.0);
    CHECK(P.theta(1.0) > 0.0);
    // chi vs theta_j for j >= 1 disjoint; theta_i vs theta_j disjoint for |i-j| > 1
    for (double z = 0.0; z < 100.0; z += 0.005) {
        CHECK(P.chi(z) * P.weight(1, z) == 0.0);
        CHECK(P.weight(0, z) * P.weight(2, z) == 0.0);
        CHECK(P.weight(1, z) * P.weight(3, z) == 0.0);
    }
}

TEST_CASE("block reconstruction is exact and single modes hit adjacent blocks only")
{
    TorusLattice L(8);
    DyadicPartition P(L);
    ScalarField u = random_field(L, 42);
    ScalarField sum(L);
    for (int j = -1; j <= P.J; ++j) sum += lp_block(u, P, j);
    CHECK(max_abs_diff(sum, u) < 1e-12);

    ScalarField e(L);
    e.at(0, 0, 4) = 1.0; // |k| = 4, inside annulus j = 2 (support [3, 32/3])
    CHECK(std::abs(lp_block(e, P, 2).at(0, 0, 4)) > 0.0);
    for (int i = -1; i <= P.J; ++i)
        if (std::abs(i - 2) >= 2) CHECK(std::abs(lp_block(e, P, i).at(0, 0, 4)) == 0.0);

    ScalarField lowmode(L);
    lowmode.at(0, 0, 0) = 2.5;
    CHECK(max_abs_diff(lp_block(lowmode, P, -1), lowmode) == 0.0);
}

TEST_CASE("lp_block commutes with Fourier multipliers")
{
    TorusLattice L(8);
    DyadicPartition P(L);
    ScalarField u = random_field(L, 7);
    for (int j : {-1, 1, 3}) {
        ScalarField a = lp_block(u, P, j);
        heat_propagate(a, 0.2);
        ScalarField b = u;
        heat_propagate(b, 0.2);
        b = lp_block(b, P, j);
        CHECK(max_abs_diff(a, b) < 1e-13);
        ScalarField c = spatial_derivative(lp_block(u, P, j), 1);
        ScalarField d = lp_block(spatial_derivative(u, 1), P, j);
        CHECK(max_abs_diff(c, d) < 1e-13);
    }
}

TEST_CASE("besov norm: homogeneity, alpha monotonicity, reality symmetry")
{
    TorusLattice L(8);
    DyadicPartition P(L);
    FftEngine eng(L);
    ScalarField u = random_field(L, 99);
    BesovIndex idx{0.5, 2.0, 2.0};
    double n = besov_norm(u, idx, P, eng);
    ScalarField v = 3.25 * u;
    CHECK(besov_norm(v, idx, P, eng) == doctest::Approx(3.25 * n).epsilon(1e-12));
    CHECK(besov_norm(u, BesovIndex{-0.5, 2.0, 2.0}, P, eng) <= n * (1 + 1e-12));

    ScalarField refl(L);
    for (long idx2 = 0; idx2 < L.n_modes(); ++idx2) {
        auto k = L.mode(idx2);
        refl.c[L.index(-k[0], -k[1], -k[2])] = std::conj(u.c[idx2]);
    }
    CHECK(besov_norm(refl, idx, P, eng) == doctest::Approx(n).epsilon(1e-12));
}

TEST_CASE("single-mode Hoelder norm regression value")
{
    TorusLattice L(16);
    DyadicPartition P(L);
    FftEngine eng(L);
    ScalarField e(L);
    e.at(0, 3, 0) = 1.0; // weight exactly 1 in block 2, adjacent weights 0
    double n = besov_norm(e, BesovIndex{0.0, INFINITY, INFINITY}, P, eng);
    CHECK(n == doctest::Approx(0.06349363593424097).epsilon(1e-12)); // (2 pi)^{-3/2}
}

TEST_CASE("embedding_check: identity embedding and L2 -> Linf scan")
{
    TorusLattice L8(8), L16(16);
    DyadicPartition P8(L8), P16(L16);
    FftEngine e8(L8), e16(L16);
    ScalarField u = random_field(L8, 1);
    CHECK(embedding_check(u, 2, 2, 2, 2, 0.5, P8, e8) <= 1.0 + 1e-12);
    double worst8 = 0.0, worst16 = 0.0;
    for (unsigned s = 0; s < 20; ++s) {
        worst8 = std::max(worst8, embedding_check(random_field(L8, 100 + s), 2, 2, INFINITY, INFINITY, 0.5, P8, e8));
        worst16 = std::max(worst16, embedding_check(random_field(L16, 100 + s), 2, 2, INFINITY, INFINITY, 0.5, P16, e16));
    }
    CHECK(std::isfinite(worst8));
    CHECK(worst16 < 4.0 * worst8); // no blow-up with resolution
}
