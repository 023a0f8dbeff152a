#pragma once

#include "nswn/lp.hpp"

namespace nswn {

/// Littlewood-Paley block grids of one field, cached for repeated paraproducts
struct BlockedField {
    const TorusLattice* lat = nullptr;
    int J = 0;
    std::vector<std::vector<cplx>> g; // grid of Delta_j, slot j+1 for j = -1..J

    const std::vector<cplx>& block(int j) const { return g[j + 1]; }
};

BlockedField make_blocked(const ScalarField& f, const DyadicPartition& P, FftEngine& eng);

/// pi_<(f,g) = sum_{j} S_{j-1} f Delta_j g (f low, g high)
ScalarField para_lt(const BlockedField& f, const BlockedField& g, FftEngine& eng);
/// pi_0(f,g) = sum_{|i-j|<=1} Delta_i f Delta_j g
ScalarField para_res(const BlockedField& f, const BlockedField& g, FftEngine& eng);
/// pi_>(f,g) = pi_<(g,f)
ScalarField para_gt(const BlockedField& f, const BlockedField& g, FftEngine& eng);

ScalarField para_lt(const ScalarField& f, const ScalarField& g, const DyadicPartition& P, FftEngine& eng);
ScalarField para_res(const ScalarField& f, const ScalarField& g, const DyadicPartition& P, FftEngine& eng);
ScalarField para_gt(const ScalarField& f, const ScalarField& g, const DyadicPartition& P, FftEngine& eng);

/// C(f,g,h) = pi_0(pi_<(f,g),h) - f pi_0(g,h)
ScalarField commutator_c(const ScalarField& f, const ScalarField& g, const ScalarField& h,
                         const DyadicPartition& P, FftEngine& eng);

/// P^{kl} pi_<(u,v) - pi_<(u, P^{kl} v)
ScalarField leray_para_commutator(const ScalarField& u, const ScalarField& v, int k, int l,
                                  const DyadicPartition& P, FftEngine& eng);

} // namespace nswn
