#pragma once

#include <stdexcept>

#include "nswn/renorm.hpp"

namespace nswn {

struct SolverParams {
    // regularity exponents; defaults satisfy every inequality below
    double z = 0.55;
    double delta0 = 0.1;
    double delta = 0.05;
    double beta = 0.06;
    double L = 10.0; // blow-up cutoff in C^{-z}

    double T = 0.25;
    int steps = 64;

    double fp_tol = 1e-10;
    int fp_max_iter = 60;
    double fp_damping = 0.5;

    // every decomp_check_every-th step, re-evaluate pi0(u4,u1) through the
    // commutator expansion and assert agreement with the direct resonant
    // product (0 disables)
    int decomp_check_every = 16;
    double decomp_tol = 1e-7;

    bool zero_noise = false;       // null the path (deterministic Navier-Stokes)
    bool march_direct = true;      // co-march the plain mild solver on the same path
    bool nonlinearity_off = false; // direct solver only: drop the quadratic term

    void validate() const
    {
        auto req = [](bool ok, const char* what) {
            if (!ok) throw std::invalid_argument(std::string("solver params: ") + what);
        };
        req(delta0 > 0.0 && delta0 < 0.5, "delta0 in (0,1/2)");
        req(z > 0.5 && z < 0.5 + delta0, "z in (1/2, 1/2+delta0)");
        req(delta > 0.0, "delta > 0");
        req(delta < delta0, "delta < delta0");
        req(delta < (1.0 - 2.0 * delta0) / 3.0, "delta < (1-2 delta0)/3");
        req(delta < (1.0 - z) / 4.0, "delta < (1-z)/4");
        req(delta < 2.0 * z - 1.0, "delta < 2z-1");
        req(beta > delta / 2.0 && beta < z + 2.0 * delta - 0.5, "beta in (delta/2, z+2delta-1/2)");
        req(L > 0.0, "L > 0");
        req(T > 0.0 && steps >= 1, "positive time grid");
        req(fp_tol > 0.0 && fp_max_iter >= 1, "fixed-point controls");
        req(fp_damping > 0.0 && fp_damping <= 1.0, "damping in (0,1]");
    }
};

/// damped fixed point for u4 inside pi_< failed to converge
struct FixedPointError : std::runtime_error {
    int step;
    double residual;
    FixedPointError(int s, double r)
        : std::runtime_error("ansatz fixed point stalled at step " + std::to_string(s)), step(s), residual(r)
    {
    }
};

/// numerical blow-up (non-finite field) outside the tau_L mechanism
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepRecord {
    double t = 0.0;
    double u_norm = 0.0;        // ||u(t)||_{-z}
    double u4_weighted = 0.0;   // t^{(1/2-delta0+z)/2} ||u4||_{1/2-delta0}
    double residual = 0.0;      // ansatz identity residual (mode sup, relative)
    double phi_weighted = 0.0;  // t^{delta+z} ||phi_sharp||_{-1-2delta}
    double direct_norm = 0.0;   // ||u_direct||_{-z} (when co-marched)
    double diff_norm = 0.0;     // ||u - u_direct||_{-z}
    bool tau_hit = false;
};

/// first grid time with norm >= L, capped at L
double blowup_time(const std::vector<double>& t, const std::vector<double>& norm, double L);

/// pi0(u4^i, u1^j) through the commutator expansion: pi0(u_sharp, u1) plus the
/// paracontrolled correction expanded with commutator_c, leray_para_commutator
/// and the pi0(P D K, u1) objects; algebraically equal to the direct resonant
/// product (exactly so on alias-free lattices)
TensorField33 pi0_u4_u1_decomposed(const VectorField& usharp, const VectorField& u34,
                                   const VectorField& k_field, const VectorField& u1,
                                   const PdkObjects& pdk, const DyadicPartition& P, FftEngine& eng);

/// concurrent time-marching of the whole decomposition u1,K,u2,u3,u_sharp/u4
/// plus (optionally) the plain mild solver on the same path
class Flow {
public:
    Flow(const NoiseConfig& ncfg, const SolverParams& prm, const CountertermSet& cts, const VectorField& u0);

    /// advance one time step; no-op after blow-up or the final step
    void step();
    bool done() const { return finished_; }
    int step_index() const { return st_.step; }
    double time() const { return st_.time(); }

    const VectorField& u1() const { return st_.u1; }
    const VectorField& k_field() const { return st_.k_field; }
    const VectorField& u2() const { return u2_; }
    const VectorField& u3() const { return u3_; }
    const VectorField& u4() const { return u4_; }
    const VectorField& usharp() const { return usharp_; }
    const VectorField& direct_u() const { return udir_; }
    VectorField assembled() const;

    const std::vector<StepRecord>& records() const { return rec_; }
    bool tau_hit() const { return tau_hit_; }
    double tau() const; // blow-up time estimate (cap L)

    FftEngine& engine() { return eng_; }
    const DyadicPartition& partition() const { return part_; }
    const CountertermSet& counterterms() const { return cts_; }
    const SolverParams& params() const { return prm_; }
    const NoiseConfig& noise_config() const { return st_.cfg; }

private:
    SolverParams prm_;
    CountertermSet cts_;
    OuState st_;
    FftEngine eng_;
    DyadicPartition part_;
    VectorField u2_, u3_, u4_, usharp_, udir_;
    VectorField f2_old_, f3_old_, phi_old_, fdir_old_;
    std::vector<Mat3> c1_grid_, c2_grid_; // counterterms cached on the time grid
    std::vector<StepRecord> rec_;
    bool tau_hit_ = false, finished_ = false;

    // step-scope caches (valid for the time level being assembled)
    std::array<BlockedField, 3> bu1_, bK_;
    std::array<std::array<BlockedField, 3>, 3> bdK_; // [l][b] blocks of D_l K^b
    std::array<std::vector<cplx>, 3> g_u1_, g_u2_;
    void refresh_path_caches();

    double last_fp_res_ = 0.0;

    VectorField force2();
    VectorField force3();
    VectorField force_direct(const VectorField& u);
    VectorField q_ansatz(const VectorField& w);
    VectorField fixed_point(const VectorField& target_usharp, VectorField u4_start);
    VectorField phi_sharp(const VectorField& u4_candidate, const VectorField& f3_new, int grid_m);
    void record_step(const VectorField& phi_new);
    void march_direct(const VectorField& u1_prev);
    void check_decomposition();
};

struct SolveResult {
    std::vector<StepRecord> steps;
    double tau = 0.0;
    double sup_diff_rel = 0.0;     // sup_t ||u - u_direct||_{-z} / sup_t ||u_direct||_{-z}
    double sup_phi_weighted = 0.0; // sup_t t^{delta+z} ||phi_sharp||_{-1-2delta}
    VectorField u_final, u_direct_final;
};

SolveResult solve_paracontrolled(const NoiseConfig& ncfg, const SolverParams& prm, const CountertermSet& cts,
                                 const VectorField& u0);

struct DirectResult {
    std::vector<double> t, norm; // ||u(t)||_{-z}
    std::vector<double> l2;      // mode-space L2 norm per step
    double max_div = 0.0;        // worst divergence defect over the run
    VectorField u_final;
    bool blew_up = false;
};

/// plain mild pseudo-spectral integration of the mollified equation
DirectResult direct_mollified_solve(const NoiseConfig& ncfg, const SolverParams& prm, const VectorField& u0);

/// X-norm bundle of one flow at its current time (for coupled-level distances
/// the same function is applied to differences of raw objects)
BundleNorms bundle_norms(Flow& flow, double delta);

/// distances between two coupled flows at their shared current time:
/// X-norm of the bundle difference and C^{-z} distance of the assembled fields
struct PairDistance {
    double bundle = 0.0;
    double solution = 0.0;
};
PairDistance level_distance(Flow& fine, Flow& coarse, double delta, double z);

} // namespace nswn
