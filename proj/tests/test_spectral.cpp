#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nswn/fft.hpp"
#include "nswn/multipliers.hpp"

using namespace nswn;

namespace {

ScalarField random_field(const TorusLattice& L, unsigned seed, bool real = true)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ScalarField f(L);
    for (auto& v : f.c) v = cplx(g(rng), g(rng));
    if (real) enforce_reality(f);
    return f;
}

double max_diff(const ScalarField& a, const ScalarField& b)
{
    double m = 0.0;
    for (size_t i = 0; i < a.c.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

} // namespace

TEST_CASE("lattice index/mode roundtrip and invariants")
{
    TorusLattice L(8);
    CHECK(L.M >= 2 * L.N + 2);
    CHECK(TorusLattice::smooth235(L.M));
    CHECK(L.M == 18);
    CHECK(TorusLattice(16).M == 36);
    CHECK(TorusLattice(32).M == 72);
    CHECK(L.cutoff() == 5);
    for (long idx : {0L, 37L, L.n_modes() - 1}) {
        auto k = L.mode(idx);
        CHECK(L.index(k[0], k[1], k[2]) == idx);
    }
}

TEST_CASE("harmonic product exactness: e_k1 * e_k2 = (2pi)^{-3/2} e_{k1+k2}")
{
    for (int N : {8, 16, 32}) {
        TorusLattice L(N);
        FftEngine eng(L);
        double tol = 1e-12;
        std::mt19937_64 rng(7 + N);
        std::uniform_int_distribution<int> d(-N / 4, N / 4);
        for (int rep = 0; rep < 8; ++rep) {
            int a1 = d(rng), a2 = d(rng), a3 = d(rng);
            int b1 = d(rng), b2 = d(rng), b3 = d(rng);
            ScalarField f(L), g(L);
            f.at(a1, a2, a3) = 1.0;
            g.at(b1, b2, b3) = 1.0;
            ScalarField p = eng.product(f, g);
            ScalarField expect(L);
            if (L.in_cutoff(a1 + b1, a2 + b2, a3 + b3))
                expect.at(a1 + b1, a2 + b2, a3 + b3) = std::pow(2.0 * M_PI, -1.5);
            CHECK(max_diff(p, expect) < tol);
        }
    }
}

TEST_CASE("dealiased product matches brute-force convolution (alias-free small lattice)")
{
    for (int N : {2, 3, 4}) {
        TorusLattice L(N, 4 * N + 4); // grid large enough that no aliasing occurs
        FftEngine eng(L);
        ScalarField f = random_field(L, 11 * N);
        ScalarField g = random_field(L, 13 * N);
        CHECK(max_diff(eng.product(f, g), product_bruteforce(f, g)) < 1e-12);
    }
}

TEST_CASE("real inputs give real product")
{
    TorusLattice L(6);
    FftEngine eng(L);
    ScalarField f = random_field(L, 5), g = random_field(L, 6);
    ScalarField p = eng.product(f, g);
    CHECK(reality_defect(p) < 1e-12);
}

TEST_CASE("to_grid / to_modes roundtrip")
{
    TorusLattice L(5);
    FftEngine eng(L);
    ScalarField f = random_field(L, 3, false);
    ScalarField back = eng.to_modes(eng.to_grid(f), false);
    CHECK(max_diff(f, back) < 1e-12);
}

TEST_CASE("Parseval with grid weight (2pi)^3 / M^3")
{
    TorusLattice L(5);
    FftEngine eng(L);
    ScalarField f = random_field(L, 21);
    auto grid = eng.to_grid(f);
    double l2grid = 0.0;
    for (auto& v : grid) l2grid += std::norm(v);
    l2grid *= std::pow(2.0 * M_PI, 3) / L.n_grid();
    double l2mode = 0.0;
    for (auto& v : f.c) l2mode += std::norm(v);
    CHECK(l2grid == doctest::Approx(l2mode).epsilon(1e-12));
}

TEST_CASE("Leray projection: idempotent, kills divergence, fixes divergence-free fields")
{
    TorusLattice L(8);
    VectorField v(L);
    for (int i = 0; i < 3; ++i) v[i] = random_field(L, 30 + i);
    VectorField pv = v;
    leray_project(pv);
    ScalarField dv = divergence(pv);
    double m = 0.0;
    for (auto& c : dv.c) m = std::max(m, std::abs(c));
    CHECK(m < 1e-13 * 8); // |k| <= sqrt(3) N scale
    VectorField ppv = pv;
    leray_project(ppv);
    for (int i = 0; i < 3; ++i) CHECK(max_diff(ppv[i], pv[i]) < 1e-13);
    // symbol identity: sum_m P^{am} P^{mb} = P^{ab}
    std::array<int, 3> k = {3, -2, 5};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0.0;
            for (int m2 = 0; m2 < 3; ++m2) s += leray_sym(k, a, m2) * leray_sym(k, m2, b);
            CHECK(s == doctest::Approx(leray_sym(k, a, b)).epsilon(1e-14));
        }
}

TEST_CASE("heat propagator semigroup and derivative symbol")
{
    TorusLattice L(6);
    ScalarField f = random_field(L, 77);
    ScalarField a = f, b = f;
    heat_propagate(a, 0.3);
    heat_propagate(a, 0.2);
    heat_propagate(b, 0.5);
    CHECK(max_diff(a, b) < 1e-14);

    ScalarField e(L);
    e.at(2, -1, 3) = 1.0;
    ScalarField d = spatial_derivative(e, 2);
    CHECK(std::abs(d.at(2, -1, 3) - cplx(0.0, 3.0)) < 1e-15);
}

TEST_CASE("omp and serial multiplier kernels agree bitwise")
{
    TorusLattice L(9);
    ScalarField f = random_field(L, 9);
    auto m = [](const std::array<int, 3>& k) { return std::exp(-0.1 * TorusLattice::norm2(k)); };
    ScalarField a = apply_multiplier(f, m);
    ScalarField b = apply_multiplier_serial(f, m);
    CHECK(max_diff(a, b) == 0.0);
}
