#include "nswn/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace nswn {

namespace {
std::mutex plan_mutex; // FFTW planner is not thread safe
const double TWO_PI = 2.0 * M_PI;
} // namespace

double enforce_reality(ScalarField& f)
{
    const TorusLattice& L = *f.lat;
    double worst = 0.0;
    for (long idx = 0; idx < L.n_modes(); ++idx) {
        auto k = L.mode(idx);
        long j = L.index(-k[0], -k[1], -k[2]);
        if (j < idx) continue;
        cplx a = f.c[idx], b = f.c[j];
        double d = std::abs(a - std::conj(b));
        if (d > worst) worst = d;
        cplx avg = 0.5 * (a + std::conj(b));
        f.c[idx] = avg;
        f.c[j] = std::conj(avg);
    }
    return worst;
}

double reality_defect(const ScalarField& f)
{
    const TorusLattice& L = *f.lat;
    double worst = 0.0;
    for (long idx = 0; idx < L.n_modes(); ++idx) {
        auto k = L.mode(idx);
        double d = std::abs(f.c[idx] - std::conj(f.c[L.index(-k[0], -k[1], -k[2])]));
        if (d > worst) worst = d;
    }
    return worst;
}

FftEngine::FftEngine(const TorusLattice& lat) : lat_(lat), buf_(lat.n_grid())
{
    std::lock_guard<std::mutex> lk(plan_mutex);
    int M = lat_.M;
    auto* b = reinterpret_cast<fftw_complex*>(buf_.data());
    fwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_dft_3d(M, M, M, b, b, FFTW_FORWARD, FFTW_ESTIMATE));
    bwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_dft_3d(M, M, M, b, b, FFTW_BACKWARD, FFTW_ESTIMATE));
}

FftEngine::~FftEngine()
{
    std::lock_guard<std::mutex> lk(plan_mutex);
    fftw_destroy_plan(reinterpret_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(reinterpret_cast<fftw_plan>(bwd_));
}

long FftEngine::gidx(int k, int) const { return (k % lat_.M + lat_.M) % lat_.M; }

void FftEngine::to_grid(const ScalarField& f, std::vector<cplx>& grid)
{
    const int M = lat_.M, N = lat_.N;
    std::fill(buf_.begin(), buf_.end(), cplx(0.0));
    const double norm = std::pow(TWO_PI, -1.5);
    for (int k1 = -N; k1 <= N; ++k1)
        for (int k2 = -N; k2 <= N; ++k2) {
            long base = lat_.index(k1, k2, -N);
            long row = (gidx(k1, 0) * (long)M + gidx(k2, 1)) * M;
            for (int k3 = -N; k3 <= N; ++k3)
                buf_[row + gidx(k3, 2)] = norm * f.c[base + (k3 + N)];
        }
    fftw_execute(reinterpret_cast<fftw_plan>(bwd_));
    grid = buf_;
}

std::vector<cplx> FftEngine::to_grid(const ScalarField& f)
{
    std::vector<cplx> g;
    to_grid(f, g);
    return g;
}

ScalarField FftEngine::to_modes(const std::vector<cplx>& grid, bool drop_outside_cutoff)
{
    const int M = lat_.M, N = lat_.N;
    buf_ = grid;
    fftw_execute(reinterpret_cast<fftw_plan>(fwd_));
    ScalarField f(lat_);
    const double norm = std::pow(TWO_PI, 1.5) / lat_.n_grid();
    const int c = drop_outside_cutoff ? lat_.cutoff() : N;
    for (int k1 = -c; k1 <= c; ++k1)
        for (int k2 = -c; k2 <= c; ++k2) {
            long base = lat_.index(k1, k2, 0);
            long row = (gidx(k1, 0) * (long)M + gidx(k2, 1)) * M;
            for (int k3 = -c; k3 <= c; ++k3)
                f.c[base + k3] = norm * buf_[row + gidx(k3, 2)];
        }
    return f;
}

ScalarField FftEngine::product(const ScalarField& f, const ScalarField& g)
{
    std::vector<cplx> a = to_grid(f), b;
    to_grid(g, b);
    return product_of_grids(a, b);
}

ScalarField FftEngine::product_of_grids(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    par_for((long)buf_.size(), [&](long i) { buf_[i] = a[i] * b[i]; });
    fftw_execute(reinterpret_cast<fftw_plan>(fwd_));
    const int M = lat_.M, c = lat_.cutoff();
    ScalarField f(lat_);
    const double norm = std::pow(TWO_PI, 1.5) / lat_.n_grid();
    for (int k1 = -c; k1 <= c; ++k1)
        for (int k2 = -c; k2 <= c; ++k2) {
            long base = lat_.index(k1, k2, 0);
            long row = (gidx(k1, 0) * (long)M + gidx(k2, 1)) * M;
            for (int k3 = -c; k3 <= c; ++k3)
                f.c[base + k3] = norm * buf_[row + gidx(k3, 2)];
        }
    return f;
}

ScalarField product_bruteforce(const ScalarField& f, const ScalarField& g)
{
    const TorusLattice& L = *f.lat;
    const int N = L.N;
    ScalarField r(L);
    const double norm = std::pow(TWO_PI, -1.5);
    for (int m1 = -N; m1 <= N; ++m1)
        for (int m2 = -N; m2 <= N; ++m2)
            for (int m3 = -N; m3 <= N; ++m3) {
                if (!L.in_cutoff(m1, m2, m3)) continue;
                cplx s(0.0);
                for (int k1 = std::max(-N, m1 - N); k1 <= std::min(N, m1 + N); ++k1)
                    for (int k2 = std::max(-N, m2 - N); k2 <= std::min(N, m2 + N); ++k2)
                        for (int k3 = std::max(-N, m3 - N); k3 <= std::min(N, m3 + N); ++k3)
                            s += f.at(k1, k2, k3) * g.at(m1 - k1, m2 - k2, m3 - k3);
                r.at(m1, m2, m3) = norm * s;
            }
    return r;
}

} // namespace nswn
