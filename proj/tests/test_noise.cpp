#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nswn/noise.hpp"
#include "test_fields.hpp"

using namespace nswn;
using namespace nswn::testing;

TEST_CASE("projection kills the parallel component; zero mode empty; divergence-free")
{
    TorusLattice L(4, 20);
    NoiseConfig cfg{&L, 0.25, 42, 0.25, 8};
    OuState st(cfg);
    for (int m = 0; m <= 3; ++m) {
        CHECK(std::abs(st.u1[0].at(1, 0, 0)) == 0.0);   // P^{1j}(e_1) component
        CHECK(std::abs(st.u1[0].at(0, 0, 0)) == 0.0);
        ScalarField dv = divergence(st.u1);
        CHECK(linf_mode(dv) < 1e-13 * 4);
        for (int i = 0; i < 3; ++i) CHECK(reality_defect(st.u1[i]) == 0.0);
        st.advance();
    }
}

TEST_CASE("stationary variance and lag-1 autocovariance within 3 sigma")
{
    TorusLattice L(2, 12);
    const double eps = 0.25;
    const int n = 10000;
    NoiseConfig base{&L, eps, 0, 0.25, 1};
    std::array<int, 3> k = {1, 0, 0};
    double f = mollifier(eps, k);
    double var_true = f * f / 2.0; // E|X^2(k)|^2 with P^{22} = 1, |k|^2 = 1
    double dt = base.dt();
    double lag_true = var_true * std::exp(-dt);
    double sv = 0.0, sl = 0.0;
    for (int s = 0; s < n; ++s) {
        NoiseConfig cfg = base;
        cfg.seed = 1000 + s;
        OuState st(cfg);
        cplx x0 = st.u1[1].at(1, 0, 0);
        st.advance();
        cplx x1 = st.u1[1].at(1, 0, 0);
        sv += std::norm(x0);
        sl += (x0 * std::conj(x1)).real();
    }
    sv /= n;
    sl /= n;
    // |X|^2 is exponential with sd = var_true
    CHECK(std::abs(sv - var_true) < 3.0 * var_true / std::sqrt((double)n));
    CHECK(std::abs(sl - lag_true) < 3.0 * var_true / std::sqrt((double)n));
}

TEST_CASE("coupling contract: path factorizes as f(eps k) times an eps-free standard path")
{
    TorusLattice L(4, 20);
    NoiseConfig a{&L, 0.5, 7, 0.25, 8};
    NoiseConfig b{&L, 0.25, 7, 0.25, 8};
    OuState sa(a), sb(b);
    for (int m = 0; m < 8; ++m) {
        sa.advance();
        sb.advance();
    }
    for (long idx = 0; idx < L.n_modes(); ++idx) {
        auto k = L.mode(idx);
        double fa = mollifier(a.eps, k), fb = mollifier(b.eps, k);
        if (fa == 0.0 || fb == 0.0) continue;
        for (int i = 0; i < 3; ++i) {
            cplx ra = sa.u1[i].c[idx] / fa, rb = sb.u1[i].c[idx] / fb;
            CHECK(std::abs(ra - rb) < 1e-12 * (1.0 + std::abs(ra)));
        }
    }
}

TEST_CASE("determinism: same seed and config give identical paths")
{
    TorusLattice L(4, 20);
    NoiseConfig cfg{&L, 0.25, 99, 0.25, 4};
    OuState a(cfg), b(cfg);
    for (int m = 0; m < 4; ++m) { a.advance(); b.advance(); }
    for (int i = 0; i < 3; ++i)
        CHECK(linf_mode_diff(a.u1[i], b.u1[i]) == 0.0);
}

TEST_CASE("K: starts at zero, exponential-trapezoid matches closed-form Duhamel for frozen forcing")
{
    TorusLattice L(4, 20);
    NoiseConfig cfg{&L, 0.25, 5, 0.25, 8};
    OuState st(cfg);
    for (int i = 0; i < 3; ++i) CHECK(linf_mode(st.k_field[i]) == 0.0);
    st.advance();
    for (int i = 0; i < 3; ++i) CHECK(reality_defect(st.k_field[i]) == 0.0);

    // frozen scalar forcing c on a mode with a = |k|^2: exact telescoping
    double a = 5.0, dt = 0.01;
    cplx c(0.7, -0.3), K(0.0);
    for (int m = 1; m <= 50; ++m)
        K = std::exp(-a * dt) * K + (etd_w0(a, dt) + etd_w1(a, dt)) * c;
    cplx exact = c * (1.0 - std::exp(-a * 0.5)) / a;
    CHECK(std::abs(K - exact) < 1e-12);
}

TEST_CASE("K solves LK = u1 to quadrature accuracy (step refinement)")
{
    TorusLattice L(2, 12);
    const int fine = 128;
    NoiseConfig cfg{&L, 0.5, 11, 0.25, fine};
    OuState st(cfg);
    std::vector<cplx> path{st.u1[1].at(1, 0, 0)};
    while (st.step < fine) {
        st.advance();
        path.push_back(st.u1[1].at(1, 0, 0));
    }
    cplx k_fine = st.k_field[1].at(1, 0, 0);
    auto coarse_k = [&](int stride) { // same path subsampled onto a coarser grid
        double a = 1.0, dt = cfg.dt() * stride;
        cplx K(0.0);
        for (int m = stride; m <= fine; m += stride)
            K = std::exp(-a * dt) * K + etd_w0(a, dt) * path[m - stride] + etd_w1(a, dt) * path[m];
        return K;
    };
    CHECK(std::abs(coarse_k(2) - k_fine) < std::abs(coarse_k(8) - k_fine));
}

TEST_CASE("mollify: support cutoff, near-identity at tiny eps, L2 contraction")
{
    TorusLattice L(6);
    ScalarField f = white_field(L, 3);
    ScalarField g = mollify(f, 1e-8);
    CHECK(linf_mode_diff(f, g) < 1e-12);
    ScalarField h = mollify(f, 0.30);
    CHECK(std::abs(h.at(0, 0, 4)) == 0.0); // |eps k| = 1.2 >= 1
    double n2f = 0.0, n2h = 0.0;
    for (auto& v : f.c) n2f += std::norm(v);
    for (auto& v : h.c) n2h += std::norm(v);
    CHECK(n2h <= n2f);
}
