#include "nswn/noise.hpp"

namespace nswn {

ScalarField mollify(const ScalarField& f, double eps)
{
    return apply_multiplier(f, [eps](const std::array<int, 3>& k) { return mollifier(eps, k); });
}

namespace {

/// complex standard Gaussian 3-vector for (mode, time index); components are
/// independent of eps so that coupled levels share randomness
void gauss_vec(uint64_t seed, uint64_t mode, uint64_t tidx, cplx z[3])
{
    const double isq2 = M_SQRT1_2;
    for (int i = 0; i < 3; ++i) {
        double a, b;
        CounterRng::gauss_pair(seed, mode, tidx, (uint64_t)i, a, b);
        z[i] = cplx(a * isq2, b * isq2);
    }
}

void project(const std::array<int, 3>& k, cplx v[3])
{
    double n2 = TorusLattice::norm2(k);
    if (n2 == 0.0) return;
    cplx dot = (double)k[0] * v[0] + (double)k[1] * v[1] + (double)k[2] * v[2];
    dot /= n2;
    for (int i = 0; i < 3; ++i) v[i] -= (double)k[i] * dot;
}

} // namespace

OuState::OuState(const NoiseConfig& c) : cfg(c), u1(*c.lat), k_field(*c.lat)
{
    if (cfg.eps <= 0.0) throw std::invalid_argument("noise: eps > 0 required");
    if (cfg.steps < 1) throw std::invalid_argument("noise: empty time grid");
    fill_initial();
}

void OuState::fill_initial()
{
    const TorusLattice& L = *cfg.lat;
    par_for(L.n_modes(), [&](long idx) {
        auto k = L.mode(idx);
        if (!mode_canonical(k)) return;
        double n2 = TorusLattice::norm2(k);
        double sigma = mollifier(cfg.eps, k) / std::sqrt(2.0 * n2);
        cplx z[3];
        gauss_vec(cfg.seed, mode_code(k), 0, z);
        for (int i = 0; i < 3; ++i) z[i] *= sigma;
        project(k, z);
        long neg = L.index(-k[0], -k[1], -k[2]);
        for (int i = 0; i < 3; ++i) {
            u1[i].c[idx] = z[i];
            u1[i].c[neg] = std::conj(z[i]);
        }
    });
}

void OuState::advance()
{
    const TorusLattice& L = *cfg.lat;
    const double dt = cfg.dt();
    const uint64_t tidx = (uint64_t)step + 1;
    par_for(L.n_modes(), [&](long idx) {
        auto k = L.mode(idx);
        if (!mode_canonical(k)) return;
        double n2 = TorusLattice::norm2(k);
        double decay = std::exp(-n2 * dt);
        double sigma = mollifier(cfg.eps, k) * std::sqrt(-std::expm1(-2.0 * n2 * dt) / (2.0 * n2));
        cplx z[3];
        gauss_vec(cfg.seed, mode_code(k), tidx, z);
        for (int i = 0; i < 3; ++i) z[i] *= sigma;
        project(k, z);
        double w0 = etd_w0(n2, dt), w1 = etd_w1(n2, dt);
        long neg = L.index(-k[0], -k[1], -k[2]);
        for (int i = 0; i < 3; ++i) {
            cplx old = u1[i].c[idx];
            cplx nw = decay * old + z[i];
            u1[i].c[idx] = nw;
            u1[i].c[neg] = std::conj(nw);
            cplx kk = decay * k_field[i].c[idx] + w0 * old + w1 * nw;
            k_field[i].c[idx] = kk;
            k_field[i].c[neg] = std::conj(kk);
        }
    });
    ++step;
}

OuPath sample_ou_path(const NoiseConfig& cfg)
{
    OuPath p;
    p.cfg = cfg;
    OuState st(cfg);
    p.t.push_back(0.0);
    p.u1.push_back(st.u1);
    p.k_field.push_back(st.k_field);
    for (int m = 0; m < cfg.steps; ++m) {
        st.advance();
        p.t.push_back(st.time());
        p.u1.push_back(st.u1);
        p.k_field.push_back(st.k_field);
    }
    return p;
}

} // namespace nswn
