#include "nswn/solver.hpp"

#include <cmath>
#include <limits>

namespace nswn {

namespace {

double linf_modes(const VectorField& v)
{
    double m = 0.0;
    for (int i = 0; i < 3; ++i)
        for (const cplx& z : v[i].c) m = std::max(m, std::abs(z));
    return m;
}

bool finite_field(const VectorField& v)
{
    for (int i = 0; i < 3; ++i)
        for (const cplx& z : v[i].c)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

TensorField33 sym_sum(const TensorField33& T)
{
    TensorField33 R;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            R[a][b] = T[a][b];
            R[a][b] += T[b][a];
        }
    return R;
}

NoiseConfig checked_cfg(const NoiseConfig& ncfg, const SolverParams& prm)
{
    prm.validate();
    if (ncfg.lat == nullptr) throw std::invalid_argument("noise config: lattice missing");
    NoiseConfig c = ncfg;
    c.T = prm.T;
    c.steps = prm.steps;
    return c;
}

} // namespace

double blowup_time(const std::vector<double>& t, const std::vector<double>& norm, double L)
{
    if (t.empty()) return 0.0;
    for (size_t i = 0; i < t.size(); ++i)
        if (norm[i] >= L) return std::min(t[i], L);
    return std::min(t.back(), L);
}

TensorField33 pi0_u4_u1_decomposed(const VectorField& usharp, const VectorField& u34,
                                   const VectorField& k_field, const VectorField& u1,
                                   const PdkObjects& pdk, const DyadicPartition& P, FftEngine& eng)
{
    const TorusLattice& L = *u1.lat();
    auto flat = [](int i, int i1, int j0, int j1) { return ((i * 3 + i1) * 3 + j0) * 3 + j1; };

    std::array<BlockedField, 3> bu1, bK, bus;
    for (int b = 0; b < 3; ++b) {
        bu1[b] = make_blocked(u1[b], P, eng);
        bK[b] = make_blocked(k_field[b], P, eng);
        bus[b] = make_blocked(usharp[b], P, eng);
    }
    ScalarField div_k = divergence(k_field);
    ScalarField div_u = divergence(u34);
    BlockedField b_divu = make_blocked(div_u, P, eng);

    // literal paraproduct families of the expanded Q(u34) derivative:
    // A^{i1} = sum_j0 pi_<(D_j0 u34^{i1}, K^{j0}),  W^{i1} = pi_<(div u34, K^{i1})
    std::array<ScalarField, 3> AW;
    for (int i1 = 0; i1 < 3; ++i1) {
        AW[i1] = ScalarField(L);
        for (int j0 = 0; j0 < 3; ++j0) {
            BlockedField bd = make_blocked(spatial_derivative(u34[i1], j0), P, eng);
            AW[i1] += para_lt(bd, bK[j0], eng);
        }
        AW[i1] += para_lt(b_divu, bK[i1], eng);
    }

    TensorField33 R;
    for (int i = 0; i < 3; ++i)
        for (int j1 = 0; j1 < 3; ++j1) {
            ScalarField acc = para_res(bus[i], bu1[j1], eng);
            ScalarField corr(L);
            for (int i1 = 0; i1 < 3; ++i1) {
                // literal families, Leray-projected then paired
                ScalarField plit = leray_component(AW[i1], i, i1);
                corr += para_res(make_blocked(plit, P, eng), bu1[j1], eng);

                // pi_<(u34^{i1}, div K): product term + commutators
                ScalarField v6sum(L);
                for (int j0 = 0; j0 < 3; ++j0) v6sum += pdk.v6[flat(i, i1, j0, j1)];
                corr += eng.product(u34[i1], v6sum);
                corr += commutator_c(u34[i1], leray_component(div_k, i, i1), u1[j1], P, eng);
                corr += para_res(make_blocked(leray_para_commutator(u34[i1], div_k, i, i1, P, eng), P, eng),
                                 bu1[j1], eng);

                // pi_<(u34^{j0}, D_j0 K^{i1}): same split against the v7 family
                for (int j0 = 0; j0 < 3; ++j0) {
                    ScalarField g = spatial_derivative(k_field[i1], j0);
                    corr += eng.product(u34[j0], pdk.v7[flat(i, i1, j0, j1)]);
                    corr += commutator_c(u34[j0], leray_component(g, i, i1), u1[j1], P, eng);
                    corr += para_res(make_blocked(leray_para_commutator(u34[j0], g, i, i1, P, eng), P, eng),
                                     bu1[j1], eng);
                }
            }
            acc.axpy(-1.0, corr);
            R[i][j1] = acc;
        }
    return R;
}

Flow::Flow(const NoiseConfig& ncfg, const SolverParams& prm, const CountertermSet& cts, const VectorField& u0)
    : prm_(prm),
      cts_(cts),
      st_(checked_cfg(ncfg, prm)),
      eng_(*ncfg.lat),
      part_(*ncfg.lat),
      u2_(*ncfg.lat),
      u3_(*ncfg.lat)
{
    if (std::abs(cts_.eps - ncfg.eps) > 1e-15)
        throw std::invalid_argument("counterterms built for a different mollification level");
    if (prm_.zero_noise) {
        st_.u1.zero();
        st_.k_field.zero();
    }
    refresh_path_caches();
    for (int a = 0; a < 3; ++a) g_u2_[a] = eng_.to_grid(u2_[a]);

    udir_ = u0;
    leray_project(udir_);
    u4_ = udir_ - st_.u1;
    usharp_ = u4_ - q_ansatz(u3_ + u4_);

    double dt = st_.cfg.dt();
    c1_grid_.resize(prm_.steps + 1);
    c2_grid_.resize(prm_.steps + 1);
    for (int m = 0; m <= prm_.steps; ++m) {
        c1_grid_[m] = cts_.c1.eval(m * dt);
        c2_grid_[m] = cts_.c2.eval(m * dt);
    }

    f2_old_ = force2();
    f3_old_ = force3();
    phi_old_ = phi_sharp(u4_, f3_old_, 0);
    fdir_old_ = force_direct(udir_);
    record_step(phi_old_);
}

void Flow::refresh_path_caches()
{
    for (int b = 0; b < 3; ++b) {
        bu1_[b] = make_blocked(st_.u1[b], part_, eng_);
        bK_[b] = make_blocked(st_.k_field[b], part_, eng_);
        g_u1_[b] = eng_.to_grid(st_.u1[b]);
        for (int l = 0; l < 3; ++l) bdK_[l][b] = make_blocked(spatial_derivative(st_.k_field[b], l), part_, eng_);
    }
}

VectorField Flow::force2()
{
    TensorField33 T;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) T[a][b] = eng_.product_of_grids(g_u1_[a], g_u1_[b]);
    subtract_constant(T, cts_.c0);
    VectorField f = pd_force(T);
    f *= 2.0;
    return f;
}

VectorField Flow::force3()
{
    TensorField33 T;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) T[a][b] = eng_.product_of_grids(g_u1_[a], g_u2_[b]);
    VectorField f = pd_force(sym_sum(T));
    f *= 2.0;
    return f;
}

VectorField Flow::force_direct(const VectorField& u)
{
    std::array<std::vector<cplx>, 3> g;
    for (int a = 0; a < 3; ++a) g[a] = eng_.to_grid(u[a]);
    TensorField33 T;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) T[a][b] = eng_.product_of_grids(g[a], g[b]);
    VectorField f = pd_force(T);
    f *= 2.0;
    return f;
}

VectorField Flow::q_ansatz(const VectorField& w)
{
    TensorField33 T;
    for (int a = 0; a < 3; ++a) {
        BlockedField bw = make_blocked(w[a], part_, eng_);
        for (int b = 0; b < 3; ++b) T[a][b] = para_lt(bw, bK_[b], eng_);
    }
    // coefficient 1 on the symmetrized bracket: matched to the nonlinearity
    // normalization F(u) = -P div(u x u) so the singular pi_<(u34,u1) cancels
    VectorField q = pd_force(sym_sum(T));
    q *= 2.0;
    return q;
}

VectorField Flow::fixed_point(const VectorField& target_usharp, VectorField u4_start)
{
    for (int it = 0; it < prm_.fp_max_iter; ++it) {
        VectorField cand = target_usharp + q_ansatz(u3_ + u4_start);
        double scale = std::max(linf_modes(cand), 1e-12);
        double res = linf_modes(u4_start - cand) / scale;
        last_fp_res_ = res;
        if (!std::isfinite(res)) throw SolverError("non-finite ansatz fixed point");
        if (res <= prm_.fp_tol) return cand;
        u4_start *= 1.0 - prm_.fp_damping;
        u4_start.axpy(prm_.fp_damping, cand);
    }
    throw FixedPointError(st_.step, last_fp_res_);
}

VectorField Flow::phi_sharp(const VectorField& u4_candidate, const VectorField& f3_new, int grid_m)
{
    VectorField u34 = u3_ + u4_candidate;
    std::array<BlockedField, 3> bu34;
    std::array<std::vector<cplx>, 3> g34;
    for (int a = 0; a < 3; ++a) {
        bu34[a] = make_blocked(u34[a], part_, eng_);
        g34[a] = eng_.to_grid(u34[a]);
    }

    TensorField33 Psi, T4;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            ScalarField q22 = eng_.product_of_grids(g_u2_[a], g_u2_[b]);
            ScalarField q24 = eng_.product_of_grids(g_u2_[a], g34[b]);
            ScalarField q44 = eng_.product_of_grids(g34[a], g34[b]);

            ScalarField s = para_res(bu34[a], bu1_[b], eng_);
            s += para_lt(bu1_[b], bu34[a], eng_); // pi_>(u34^a, u1^b)
            s *= 2.0;
            s += q22;
            s.axpy(2.0, q24);
            s += q44;
            Psi[a][b] = s;

            ScalarField t = q22;
            t.axpy(2.0, q24);
            t += q44;
            t.axpy(2.0, eng_.product_of_grids(g_u1_[a], g34[b]));
            T4[a][b] = t;
        }

    // heat-paraproduct commutator of the ansatz correction
    for (int l = 0; l < 3; ++l)
        for (int a = 0; a < 3; ++a) {
            BlockedField bd = make_blocked(spatial_derivative(u34[a], l), part_, eng_);
            for (int b = 0; b < 3; ++b) Psi[a][b].axpy(4.0, para_lt(bd, bdK_[l][b], eng_));
        }

    Mat3 cc = c1_grid_[grid_m] * 2.0;
    cc += c2_grid_[grid_m];
    subtract_constant(Psi, cc);
    subtract_constant(T4, c2_grid_[grid_m]);

    // forcing felt by u3 + u4, fed back through the paracontrolled remainder
    VectorField phi34 = f3_new + pd_force(sym_sum(T4));
    for (int a = 0; a < 3; ++a) {
        BlockedField bp = make_blocked(phi34[a], part_, eng_);
        for (int b = 0; b < 3; ++b) Psi[a][b].axpy(-2.0, para_lt(bp, bK_[b], eng_));
    }
    return pd_force(sym_sum(Psi));
}

void Flow::march_direct(const VectorField& u1_prev)
{
    double dt = st_.cfg.dt();
    VectorField noiseinc = st_.u1;
    {
        VectorField e = u1_prev;
        heat_propagate(e, dt);
        noiseinc -= e;
    }
    VectorField ustar = udir_;
    duhamel_step(ustar, fdir_old_, fdir_old_, dt);
    ustar += noiseinc;
    VectorField fstar = force_direct(ustar);
    duhamel_step(udir_, fdir_old_, fstar, dt);
    udir_ += noiseinc;
    fdir_old_ = force_direct(udir_);
}

void Flow::check_decomposition()
{
    PdkObjects pdk = pi0_pdk_u1(st_.k_field, st_.u1, part_, eng_);
    TensorField33 dec = pi0_u4_u1_decomposed(usharp_, u3_ + u4_, st_.k_field, st_.u1, pdk, part_, eng_);
    TensorField33 dir = pi0_pair(u4_, st_.u1, part_, eng_);
    double num = 0.0, den = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (size_t i = 0; i < dir[a][b].c.size(); ++i) {
                num = std::max(num, std::abs(dec[a][b].c[i] - dir[a][b].c[i]));
                den = std::max(den, std::abs(dir[a][b].c[i]));
            }
    if (num > prm_.decomp_tol * std::max(den, 1e-12))
        throw SolverError("commutator expansion of pi0(u4,u1) drifted from the resonant product");
}

void Flow::record_step(const VectorField& phi_new)
{
    StepRecord r;
    r.t = time();
    BesovIndex mz{-prm_.z, INFINITY, INFINITY};
    VectorField u = assembled();
    if (!finite_field(u)) throw SolverError("non-finite paracontrolled state");
    r.u_norm = besov_norm(u, mz, part_, eng_);
    r.u4_weighted = std::pow(r.t, 0.5 * (0.5 - prm_.delta0 + prm_.z)) *
                    besov_norm(u4_, BesovIndex{0.5 - prm_.delta0, INFINITY, INFINITY}, part_, eng_);
    r.phi_weighted = std::pow(r.t, prm_.delta + prm_.z) *
                     besov_norm(phi_new, BesovIndex{-1.0 - 2.0 * prm_.delta, INFINITY, INFINITY}, part_, eng_);
    r.residual = last_fp_res_;
    if (prm_.march_direct) {
        if (!finite_field(udir_)) throw SolverError("non-finite direct state");
        r.direct_norm = besov_norm(udir_, mz, part_, eng_);
        r.diff_norm = besov_norm(u - udir_, mz, part_, eng_);
    }
    r.tau_hit = (r.u_norm >= prm_.L);
    rec_.push_back(r);
    if (r.tau_hit) {
        tau_hit_ = true;
        finished_ = true;
    }
}

void Flow::step()
{
    if (finished_) return;
    double dt = st_.cfg.dt();
    VectorField u1_prev = st_.u1;
    st_.advance();
    if (prm_.zero_noise) {
        st_.u1.zero();
        st_.k_field.zero();
    }
    refresh_path_caches();
    int m = st_.step;

    VectorField f2n = force2();
    duhamel_step(u2_, f2_old_, f2n, dt);
    f2_old_ = f2n;
    for (int a = 0; a < 3; ++a) g_u2_[a] = eng_.to_grid(u2_[a]);

    VectorField f3n = force3();
    duhamel_step(u3_, f3_old_, f3n, dt);
    f3_old_ = f3n;

    // left-point predictor, then one Picard correction of the sharp remainder
    VectorField us_pred = usharp_;
    duhamel_step(us_pred, phi_old_, phi_old_, dt);
    VectorField u4_pred = fixed_point(us_pred, u4_);
    VectorField phi_star = phi_sharp(u4_pred, f3n, m);
    duhamel_step(usharp_, phi_old_, phi_star, dt);
    u4_ = fixed_point(usharp_, u4_pred);
    phi_old_ = phi_star;

    if (prm_.march_direct) march_direct(u1_prev);
    if (prm_.decomp_check_every > 0 && m % prm_.decomp_check_every == 0) check_decomposition();
    record_step(phi_star);
    if (m >= prm_.steps) finished_ = true;
}

VectorField Flow::assembled() const { return st_.u1 + u2_ + u3_ + u4_; }

double Flow::tau() const
{
    std::vector<double> t, n;
    t.reserve(rec_.size());
    n.reserve(rec_.size());
    for (const StepRecord& r : rec_) {
        t.push_back(r.t);
        n.push_back(r.u_norm);
    }
    return blowup_time(t, n, prm_.L);
}

SolveResult solve_paracontrolled(const NoiseConfig& ncfg, const SolverParams& prm, const CountertermSet& cts,
                                 const VectorField& u0)
{
    Flow f(ncfg, prm, cts, u0);
    while (!f.done()) f.step();
    SolveResult r;
    r.steps = f.records();
    r.tau = f.tau();
    double supd = 0.0, supdiff = 0.0, supphi = 0.0;
    for (const StepRecord& s : r.steps) {
        supd = std::max(supd, s.direct_norm);
        supdiff = std::max(supdiff, s.diff_norm);
        supphi = std::max(supphi, s.phi_weighted);
    }
    r.sup_diff_rel = supd > 0.0 ? supdiff / supd : 0.0;
    r.sup_phi_weighted = supphi;
    r.u_final = f.assembled();
    r.u_direct_final = f.direct_u();
    return r;
}

DirectResult direct_mollified_solve(const NoiseConfig& ncfg, const SolverParams& prm, const VectorField& u0)
{
    NoiseConfig c = checked_cfg(ncfg, prm);
    OuState st(c);
    if (prm.zero_noise) {
        st.u1.zero();
        st.k_field.zero();
    }
    FftEngine eng(*c.lat);
    DyadicPartition part(*c.lat);
    BesovIndex mz{-prm.z, INFINITY, INFINITY};

    auto force = [&](const VectorField& u) {
        if (prm.nonlinearity_off) return VectorField(*c.lat);
        std::array<std::vector<cplx>, 3> g;
        for (int a = 0; a < 3; ++a) g[a] = eng.to_grid(u[a]);
        TensorField33 T;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) T[a][b] = eng.product_of_grids(g[a], g[b]);
        VectorField f = pd_force(T);
        f *= 2.0;
        return f;
    };
    auto l2_norm = [](const VectorField& u) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (const cplx& z : u[i].c) s += std::norm(z);
        return std::sqrt(s);
    };

    VectorField u = u0;
    leray_project(u);
    VectorField f_old = force(u);
    DirectResult r;
    double dt = c.dt();
    r.t.push_back(0.0);
    r.norm.push_back(besov_norm(u, mz, part, eng));
    r.l2.push_back(l2_norm(u));
    for (int m = 1; m <= c.steps; ++m) {
        VectorField u1_prev = st.u1;
        st.advance();
        if (prm.zero_noise) {
            st.u1.zero();
            st.k_field.zero();
        }
        VectorField noiseinc = st.u1;
        {
            VectorField e = u1_prev;
            heat_propagate(e, dt);
            noiseinc -= e;
        }
        VectorField ustar = u;
        duhamel_step(ustar, f_old, f_old, dt);
        ustar += noiseinc;
        VectorField fstar = force(ustar);
        duhamel_step(u, f_old, fstar, dt);
        u += noiseinc;
        if (!finite_field(u)) {
            r.blew_up = true;
            break;
        }
        f_old = force(u);
        r.t.push_back(m * dt);
        r.norm.push_back(besov_norm(u, mz, part, eng));
        r.l2.push_back(l2_norm(u));
        ScalarField dv = divergence(u);
        for (const cplx& z : dv.c) r.max_div = std::max(r.max_div, std::abs(z));
    }
    r.u_final = u;
    return r;
}

namespace {

struct BundleObjects {
    VectorField u1;
    TensorField33 u1u1, u1u2, u2u2, p31;
    PdkObjects pdk;
};

BundleObjects collect_bundle(Flow& f)
{
    FftEngine& eng = f.engine();
    const DyadicPartition& P = f.partition();
    double t = f.time();
    BundleObjects o;
    o.u1 = f.u1();
    o.u1u1 = wick_u1u1(f.u1(), f.counterterms().c0, eng);
    o.u1u2 = product_pair(f.u1(), f.u2(), eng);
    o.u2u2 = product_pair(f.u2(), f.u2(), eng);
    subtract_constant(o.u2u2, f.counterterms().c2.eval(t));
    o.p31 = pi0_diamond_u3_u1(f.u3(), f.u1(), f.counterterms().c1.eval(t), P, eng);
    o.pdk = pi0_pdk_u1(f.k_field(), f.u1(), P, eng);
    return o;
}

double tensor_norm(const TensorField33& T, const BesovIndex& idx, const DyadicPartition& P, FftEngine& eng)
{
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += besov_norm(T[a][b], idx, P, eng);
    return s;
}

double list_norm(const std::vector<ScalarField>& v, const BesovIndex& idx, const DyadicPartition& P,
                 FftEngine& eng)
{
    double s = 0.0;
    for (const ScalarField& f : v) s += besov_norm(f, idx, P, eng);
    return s;
}

BundleNorms norms_of(const BundleObjects& o, double delta, const DyadicPartition& P, FftEngine& eng)
{
    BundleNorms n;
    n.u1 = besov_norm(o.u1, BesovIndex{-0.5 - delta / 2.0, INFINITY, INFINITY}, P, eng);
    n.u1u1 = tensor_norm(o.u1u1, BesovIndex{-1.0 - delta / 2.0, INFINITY, INFINITY}, P, eng);
    n.u1u2 = tensor_norm(o.u1u2, BesovIndex{-0.5 - delta / 2.0, INFINITY, INFINITY}, P, eng);
    n.u2u2 = tensor_norm(o.u2u2, BesovIndex{-delta, INFINITY, INFINITY}, P, eng);
    n.pi0_u3u1 = tensor_norm(o.p31, BesovIndex{-delta, INFINITY, INFINITY}, P, eng);
    n.v6 = list_norm(o.pdk.v6, BesovIndex{-delta, INFINITY, INFINITY}, P, eng);
    n.v7 = list_norm(o.pdk.v7, BesovIndex{-delta, INFINITY, INFINITY}, P, eng);
    return n;
}

} // namespace

BundleNorms bundle_norms(Flow& flow, double delta)
{
    BundleObjects o = collect_bundle(flow);
    return norms_of(o, delta, flow.partition(), flow.engine());
}

PairDistance level_distance(Flow& fine, Flow& coarse, double delta, double z)
{
    BundleObjects a = collect_bundle(fine);
    BundleObjects b = collect_bundle(coarse);
    a.u1 -= b.u1;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            a.u1u1[i][j] -= b.u1u1[i][j];
            a.u1u2[i][j] -= b.u1u2[i][j];
            a.u2u2[i][j] -= b.u2u2[i][j];
            a.p31[i][j] -= b.p31[i][j];
        }
    for (size_t i = 0; i < a.pdk.v6.size(); ++i) a.pdk.v6[i] -= b.pdk.v6[i];
    for (size_t i = 0; i < a.pdk.v7.size(); ++i) a.pdk.v7[i] -= b.pdk.v7[i];

    PairDistance d;
    d.bundle = norms_of(a, delta, fine.partition(), fine.engine()).total();
    VectorField du = fine.assembled() - coarse.assembled();
    d.solution = besov_norm(du, BesovIndex{-z, INFINITY, INFINITY}, fine.partition(), fine.engine());
    return d;
}

} // namespace nswn
