#include "nswn/paraproduct.hpp"

namespace nswn {

namespace {

void mul_acc(std::vector<cplx>& acc, const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    par_for((long)acc.size(), [&](long i) { acc[i] += a[i] * b[i]; });
}

void add(std::vector<cplx>& acc, const std::vector<cplx>& a)
{
    par_for((long)acc.size(), [&](long i) { acc[i] += a[i]; });
}

} // namespace

BlockedField make_blocked(const ScalarField& f, const DyadicPartition& P, FftEngine& eng)
{
    BlockedField b;
    b.lat = f.lat;
    b.J = P.J;
    b.g.resize(P.J + 2);
    for (int j = -1; j <= P.J; ++j)
        eng.to_grid(lp_block(f, P, j), b.g[j + 1]);
    return b;
}

ScalarField para_lt(const BlockedField& f, const BlockedField& g, FftEngine& eng)
{
    const long n = (long)f.g[0].size();
    std::vector<cplx> acc(n, cplx(0.0)), run(n, cplx(0.0));
    for (int j = 1; j <= f.J; ++j) {
        add(run, f.block(j - 2)); // run = S_{j-1} f = sum_{i <= j-2} Delta_i f
        mul_acc(acc, run, g.block(j));
    }
    return eng.to_modes(acc, true);
}

ScalarField para_res(const BlockedField& f, const BlockedField& g, FftEngine& eng)
{
    const long n = (long)f.g[0].size();
    std::vector<cplx> acc(n, cplx(0.0));
    for (int i = -1; i <= f.J; ++i)
        for (int j = std::max(-1, i - 1); j <= std::min(f.J, i + 1); ++j)
            mul_acc(acc, f.block(i), g.block(j));
    return eng.to_modes(acc, true);
}

ScalarField para_gt(const BlockedField& f, const BlockedField& g, FftEngine& eng)
{
    return para_lt(g, f, eng);
}

ScalarField para_lt(const ScalarField& f, const ScalarField& g, const DyadicPartition& P, FftEngine& eng)
{
    return para_lt(make_blocked(f, P, eng), make_blocked(g, P, eng), eng);
}

ScalarField para_res(const ScalarField& f, const ScalarField& g, const DyadicPartition& P, FftEngine& eng)
{
    return para_res(make_blocked(f, P, eng), make_blocked(g, P, eng), eng);
}

ScalarField para_gt(const ScalarField& f, const ScalarField& g, const DyadicPartition& P, FftEngine& eng)
{
    return para_lt(g, f, P, eng);
}

ScalarField commutator_c(const ScalarField& f, const ScalarField& g, const ScalarField& h,
                         const DyadicPartition& P, FftEngine& eng)
{
    BlockedField bf = make_blocked(f, P, eng);
    BlockedField bg = make_blocked(g, P, eng);
    BlockedField bh = make_blocked(h, P, eng);
    ScalarField lt = para_lt(bf, bg, eng);
    ScalarField first = para_res(make_blocked(lt, P, eng), bh, eng);
    ScalarField second = eng.product(f, para_res(bg, bh, eng));
    return first - second;
}

ScalarField leray_para_commutator(const ScalarField& u, const ScalarField& v, int k, int l,
                                  const DyadicPartition& P, FftEngine& eng)
{
    if (k < 0 || k > 2 || l < 0 || l > 2) throw std::invalid_argument("component index outside 0..2");
    ScalarField a = leray_component(para_lt(u, v, P, eng), k, l);
    ScalarField b = para_lt(u, leray_component(v, k, l), P, eng);
    return a - b;
}

} // namespace nswn
