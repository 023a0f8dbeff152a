#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nswn/solver.hpp"
#include "test_fields.hpp"

using namespace nswn;
using namespace nswn::testing;

namespace {

VectorField smooth_u0(const TorusLattice& L, double amp, unsigned seed, int band = 1)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    VectorField v(L);
    for (long idx = 0; idx < L.n_modes(); ++idx) {
        auto k = L.mode(idx);
        if (std::abs(k[0]) > band || std::abs(k[1]) > band || std::abs(k[2]) > band) continue;
        if (k[0] == 0 && k[1] == 0 && k[2] == 0) continue;
        for (int c = 0; c < 3; ++c) v[c].c[idx] = amp * cplx(g(rng), g(rng));
    }
    for (int c = 0; c < 3; ++c) enforce_reality(v[c]);
    leray_project(v);
    remove_mean(v);
    return v;
}

VectorField embed(const VectorField& u, const TorusLattice& Lf)
{
    const TorusLattice& Lc = *u.lat();
    VectorField v(Lf);
    for (long idx = 0; idx < Lc.n_modes(); ++idx) {
        auto k = Lc.mode(idx);
        for (int c = 0; c < 3; ++c) v[c].c[Lf.index(k[0], k[1], k[2])] = u[c].c[idx];
    }
    return v;
}

VectorField ns_rhs(const VectorField& u, FftEngine& eng)
{
    std::array<std::vector<cplx>, 3> g;
    for (int a = 0; a < 3; ++a) g[a] = eng.to_grid(u[a]);
    TensorField33 T;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) T[a][b] = eng.product_of_grids(g[a], g[b]);
    VectorField f = pd_force(T);
    f *= 2.0;
    const TorusLattice& L = *u.lat();
    for (int i = 0; i < 3; ++i)
        for (long idx = 0; idx < L.n_modes(); ++idx) f[i].c[idx] -= TorusLattice::norm2(L.mode(idx)) * u[i].c[idx];
    return f;
}

VectorField ns_rk4(VectorField u, double T, int steps, FftEngine& eng)
{
    double h = T / steps;
    for (int m = 0; m < steps; ++m) {
        VectorField k1 = ns_rhs(u, eng);
        VectorField v = u;
        v.axpy(0.5 * h, k1);
        VectorField k2 = ns_rhs(v, eng);
        v = u;
        v.axpy(0.5 * h, k2);
        VectorField k3 = ns_rhs(v, eng);
        v = u;
        v.axpy(h, k3);
        VectorField k4 = ns_rhs(v, eng);
        u.axpy(h / 6.0, k1);
        u.axpy(h / 3.0, k2);
        u.axpy(h / 3.0, k3);
        u.axpy(h / 6.0, k4);
    }
    return u;
}

double linf_vec_diff(const VectorField& a, const VectorField& b)
{
    double m = 0.0;
    for (int i = 0; i < 3; ++i) m = std::max(m, linf_mode_diff(a[i], b[i]));
    return m;
}

double linf_vec(const VectorField& a)
{
    double m = 0.0;
    for (int i = 0; i < 3; ++i) m = std::max(m, linf_mode(a[i]));
    return m;
}

} // namespace

TEST_CASE("parameter inequalities are enforced")
{
    SolverParams p;
    CHECK_NOTHROW(p.validate());

    SolverParams q = p;
    q.z = 0.5;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p;
    q.delta0 = 0.6;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p;
    q.delta = 0.2;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p;
    q.beta = 0.5;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p;
    q.L = -1.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p;
    q.delta = 0.09; // violates delta < (1-z)/4 = 0.1125? no: violates delta < delta0 only at 0.1
    q.delta0 = 0.08;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("blowup_time definition")
{
    std::vector<double> t{0.0, 0.1, 0.2, 0.3};
    CHECK(blowup_time(t, {1.0, 2.0, 3.0, 4.0}, 10.0) == doctest::Approx(0.3));     // censored at run end
    CHECK(blowup_time(t, {0.01, 0.02, 0.03, 0.04}, 0.25) == 0.25);                 // never crosses, T >= L
    CHECK(blowup_time(t, {1.0, 12.0, 3.0, 4.0}, 10.0) == doctest::Approx(0.1)); // first crossing
    // nondecreasing in L on a fixed path
    std::vector<double> n{1.0, 5.0, 2.0, 8.0};
    double prev = 0.0;
    for (double L : {0.05, 0.15, 3.0, 6.0, 9.0, 20.0}) {
        double tau = blowup_time(t, n, L);
        CHECK(tau >= prev);
        prev = tau;
    }
}

TEST_CASE("zero noise and zero data stay identically zero")
{
    TorusLattice L(4);
    CountertermSet cts = make_counterterms(L, 0.4);
    NoiseConfig nc{&L, 0.4, 1, 0.25, 6};
    SolverParams p;
    p.T = 0.25;
    p.steps = 6;
    p.zero_noise = true;
    p.decomp_check_every = 0;
    SolveResult r = solve_paracontrolled(nc, p, cts, VectorField(L));
    REQUIRE(r.steps.size() == 7);
    for (const StepRecord& s : r.steps) {
        CHECK(s.u_norm == 0.0);
        CHECK(s.residual == 0.0);
        CHECK(s.direct_norm == 0.0);
    }
    CHECK(r.tau == doctest::Approx(0.25));
    CHECK(r.sup_diff_rel == 0.0);
}

TEST_CASE("ansatz initialization and per-step residuals")
{
    TorusLattice L(4);
    CountertermSet cts = make_counterterms(L, 0.45);
    NoiseConfig nc{&L, 0.45, 11, 0.2, 8};
    SolverParams p;
    p.T = 0.2;
    p.steps = 8;
    p.decomp_check_every = 0;
    VectorField u0 = smooth_u0(L, 0.2, 3);

    Flow f(nc, p, cts, u0);
    VectorField want = u0;
    leray_project(want);
    want -= f.u1();
    CHECK(linf_vec_diff(f.u4(), want) < 1e-14);

    while (!f.done()) f.step();
    CHECK(f.records().size() == 9);
    for (const StepRecord& s : f.records()) {
        CHECK(s.residual <= p.fp_tol);
        CHECK(std::isfinite(s.phi_weighted));
        CHECK(!s.tau_hit);
    }
    CHECK(f.tau() == doctest::Approx(0.2));
}

TEST_CASE("commutator expansion of pi0(u4,u1) equals the resonant product (alias-free lattice)")
{
    TorusLattice L(4, 20); // 4N+4 grid: collocation products are alias-free
    CountertermSet cts = make_counterterms(L, 0.45);
    NoiseConfig nc{&L, 0.45, 23, 0.15, 6};
    SolverParams p;
    p.T = 0.15;
    p.steps = 6;
    p.decomp_check_every = 1; // asserts internally every step
    p.decomp_tol = 1e-9;
    VectorField u0 = smooth_u0(L, 0.25, 5);
    Flow f(nc, p, cts, u0);
    while (!f.done()) f.step();

    PdkObjects pdk = pi0_pdk_u1(f.k_field(), f.u1(), f.partition(), f.engine());
    VectorField u34 = f.u3() + f.u4();
    TensorField33 dec = pi0_u4_u1_decomposed(f.usharp(), u34, f.k_field(), f.u1(), pdk, f.partition(), f.engine());
    TensorField33 dir = pi0_pair(f.u4(), f.u1(), f.partition(), f.engine());
    double num = 0.0, den = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            num = std::max(num, linf_mode_diff(dec[a][b], dir[a][b]));
            den = std::max(den, linf_mode(dir[a][b]));
        }
    CHECK(num < 1e-11 * std::max(den, 1.0));
}

TEST_CASE("direct solver: nonlinearity off reduces to the shifted stochastic convolution")
{
    TorusLattice L(4);
    NoiseConfig nc{&L, 0.4, 31, 0.2, 10};
    SolverParams p;
    p.T = 0.2;
    p.steps = 10;
    p.nonlinearity_off = true;
    VectorField u0 = smooth_u0(L, 0.3, 9);
    DirectResult r = direct_mollified_solve(nc, p, u0);

    NoiseConfig nc2 = nc;
    nc2.T = p.T;
    nc2.steps = p.steps;
    OuState st(nc2);
    VectorField u1_0 = st.u1;
    for (int m = 0; m < p.steps; ++m) st.advance();
    VectorField want = u0;
    leray_project(want);
    want -= u1_0;
    heat_propagate(want, p.T);
    want += st.u1;
    CHECK(linf_vec_diff(r.u_final, want) < 1e-13);
}

TEST_CASE("direct solver: divergence-free and dissipative without noise")
{
    TorusLattice L(4);
    NoiseConfig nc{&L, 0.4, 17, 0.2, 12};
    SolverParams p;
    p.T = 0.2;
    p.steps = 12;
    DirectResult r = direct_mollified_solve(nc, p, smooth_u0(L, 0.4, 21));
    CHECK(!r.blew_up);
    CHECK(r.max_div < 1e-12);

    SolverParams pz = p;
    pz.zero_noise = true;
    DirectResult rz = direct_mollified_solve(nc, pz, smooth_u0(L, 0.5, 22));
    for (size_t i = 1; i < rz.l2.size(); ++i) CHECK(rz.l2[i] <= rz.l2[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("zero-noise run matches a doubled-resolution deterministic oracle")
{
    TorusLattice L(8);
    TorusLattice Lf(16);
    VectorField u0 = smooth_u0(L, 0.3, 13);

    FftEngine engf(Lf);
    VectorField uf = embed(u0, Lf);
    leray_project(uf);
    VectorField oracle = ns_rk4(uf, 0.25, 400, engf);

    CountertermSet cts = make_counterterms(L, 0.25);
    NoiseConfig nc{&L, 0.25, 1, 0.25, 64};
    SolverParams p;
    p.zero_noise = true;
    p.decomp_check_every = 0;

    auto err_for = [&](int steps) {
        SolverParams q = p;
        q.steps = steps;
        SolveResult r = solve_paracontrolled(nc, q, cts, u0);
        double num = 0.0;
        for (int c = 0; c < 3; ++c)
            for (long idx = 0; idx < L.n_modes(); ++idx) {
                auto k = L.mode(idx);
                num = std::max(num, std::abs(r.u_final[c].c[idx] - oracle[c].c[Lf.index(k[0], k[1], k[2])]));
            }
        return num / linf_vec(oracle);
    };

    double e64 = err_for(64);
    double e128 = err_for(128);
    CHECK(e64 < 5e-4);
    CHECK(e128 < 0.6 * e64);
}

TEST_CASE("fixed-eps cancellation against the direct solver on one path")
{
    TorusLattice L(8);
    double eps = 0.35;
    CountertermSet cts = make_counterterms(L, eps);
    NoiseConfig nc{&L, eps, 7, 0.25, 32};
    VectorField u0 = smooth_u0(L, 0.2, 41);

    SolverParams p;
    p.steps = 32;
    SolveResult a = solve_paracontrolled(nc, p, cts, u0);
    p.steps = 64;
    SolveResult b = solve_paracontrolled(nc, p, cts, u0);

    CHECK(a.sup_diff_rel < 5e-6);
    CHECK(b.sup_diff_rel < 0.5 * a.sup_diff_rel);
    CHECK(std::isfinite(a.sup_phi_weighted));
    CHECK(std::isfinite(b.sup_phi_weighted));
    // weighted a-priori quantity is stable under step halving
    CHECK(b.sup_phi_weighted < 2.0 * a.sup_phi_weighted + 1e-12);
    CHECK(b.sup_phi_weighted > 0.5 * a.sup_phi_weighted - 1e-12);
}
