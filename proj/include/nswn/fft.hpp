#pragma once

#include <vector>

#include "nswn/field.hpp"

struct fftw_plan_s;

namespace nswn {

/// FFT transcriber between mode coefficients and M^3 collocation grids.
/// One engine per thread of use; plan creation is serialized internally.
class FftEngine {
public:
    explicit FftEngine(const TorusLattice& lat);
    ~FftEngine();
    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

    const TorusLattice& lattice() const { return lat_; }

    /// grid values u(x_j) on the M^3 grid (row-major, x = 2 pi j / M)
    void to_grid(const ScalarField& f, std::vector<cplx>& grid);
    std::vector<cplx> to_grid(const ScalarField& f);

    /// back to mode coefficients; drop_outside_cutoff truncates to the
    /// dealias box (used after products), otherwise keeps all |k_i| <= N
    ScalarField to_modes(const std::vector<cplx>& grid, bool drop_outside_cutoff);

    /// dealiased pointwise product
    ScalarField product(const ScalarField& f, const ScalarField& g);

    /// product accumulated from precomputed grids
    ScalarField product_of_grids(const std::vector<cplx>& a, const std::vector<cplx>& b);

private:
    TorusLattice lat_;
    fftw_plan_s* fwd_;
    fftw_plan_s* bwd_;
    std::vector<cplx> buf_;
    long gidx(int k, int axis) const; // grid index of mode k on one axis
};

/// brute-force dealiased product via direct convolution (oracle, O(modes^2))
ScalarField product_bruteforce(const ScalarField& f, const ScalarField& g);

} // namespace nswn
