#include "nswn/lp.hpp"

#include <cmath>

namespace nswn {

ScalarField lp_block(const ScalarField& u, const DyadicPartition& P, int j)
{
    if (j < -1) throw std::invalid_argument("lp_block: j >= -1 required");
    return apply_multiplier(u, [&](const std::array<int, 3>& k) {
        return P.weight(j, std::sqrt(TorusLattice::norm2(k)));
    });
}

double grid_lp_norm(const std::vector<cplx>& grid, const TorusLattice& lat, double p)
{
    if (std::isinf(p)) {
        double m = 0.0;
        for (auto& v : grid) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (auto& v : grid) s += std::pow(std::abs(v), p);
    s *= std::pow(2.0 * M_PI, 3) / lat.n_grid();
    return std::pow(s, 1.0 / p);
}

double besov_norm(const ScalarField& u, const BesovIndex& idx, const DyadicPartition& P, FftEngine& eng)
{
    const TorusLattice& L = *u.lat;
    double acc = 0.0, mx = 0.0;
    for (int j = -1; j <= P.J; ++j) {
        ScalarField blk = lp_block(u, P, j);
        double lp = grid_lp_norm(eng.to_grid(blk), L, idx.p);
        double w = std::pow(2.0, j * idx.alpha) * lp;
        if (std::isinf(idx.q)) mx = std::max(mx, w);
        else acc += std::pow(w, idx.q);
    }
    return std::isinf(idx.q) ? mx : std::pow(acc, 1.0 / idx.q);
}

double besov_norm(const VectorField& u, const BesovIndex& idx, const DyadicPartition& P, FftEngine& eng)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += besov_norm(u[i], idx, P, eng);
    return s;
}

double embedding_check(const ScalarField& u, double p1, double q1, double p2, double q2, double alpha,
                       const DyadicPartition& P, FftEngine& eng)
{
    if (p1 > p2 || q1 > q2) throw std::invalid_argument("embedding_check: need p1 <= p2, q1 <= q2");
    double a2 = alpha - 3.0 * (1.0 / p1 - 1.0 / p2);
    double n1 = besov_norm(u, BesovIndex{alpha, p1, q1}, P, eng);
    double n2 = besov_norm(u, BesovIndex{a2, p2, q2}, P, eng);
    return n2 / n1;
}

} // namespace nswn
