#pragma once

#include <vector>

#include "nswn/config.hpp"

namespace nswn {

/// fitted log-log slope of S(K) = sum_{k1+k2 = K e1} |k1|^{-l} |k2|^{-m}
/// against K; the summation box scales with K so truncation cannot tilt the fit
double conv_sum_slope(double l, double m, const std::vector<int>& Ks, int box_factor = 6);

/// heat-multiplier difference bound scan: sup over (k1, k2, t) of
/// |F(k1+k2) - F(k2)| / (|k1|^eta t^{-(1-eta)/2}) with
/// F(k) = e^{-|k|^2 t} k^i Leray^{jl}(k), plus the large-t decay probe
struct MultiplierScan {
    double fitted_const = 0.0; // sup of the ratio over the scan
    double tail_value = 0.0;   // sup over k of |F(k)| at the largest scanned t
};
MultiplierScan multiplier_difference_scan(double eta, int kmax, const std::vector<double>& ts);

/// empirical constants of the paraproduct / commutator / heat / projection
/// estimates, maximized over n_fields random slope fields at resolution N
struct EstimateConstants {
    double para_lt = 0.0;    // ||pi_<(f,g)||_beta / (||f||_inf ||g||_beta)
    double para_res = 0.0;   // ||pi_0(f,g)||_{a+b} / (||f||_a ||g||_b), a+b > 0
    double commutator = 0.0; // commutator_c against ||f||_a ||g||_b ||h||_c
    double leray_comm = 0.0; // leray_para_commutator against ||u||_a ||v||_b
    double heat = 0.0;       // t^gamma ||e^{tL} f||_{a+2gamma} / ||f||_a
    double leray = 0.0;      // ||P f||_a / ||f||_a
};
EstimateConstants estimate_constants(int N, int n_fields, unsigned seed0);

struct ConvergeLevel {
    double eps_fine = 0.0, eps_coarse = 0.0;
    double med_bundle = 0.0, q1_bundle = 0.0, q3_bundle = 0.0;
    double med_solution = 0.0, q1_solution = 0.0, q3_solution = 0.0;
};
struct ConvergeReport {
    std::vector<ConvergeLevel> levels; // consecutive ladder pairs, coarse to fine
    double bundle_decay_exp = 0.0;     // fitted slope of log median vs level
    double solution_decay_exp = 0.0;
    int seeds_done = 0, seeds_failed = 0;
};
/// coupled-noise ladder study: for every seed, march consecutive ladder pairs
/// on the same underlying path and record the sup over sample times (up to
/// tau_L) of the bundle X-distance and the C^{-z} solution distance
ConvergeReport run_convergence_study(const RunConfig& cfg);

struct DivergeRow {
    double eps = 0.0;
    double c0_diag = 0.0, c0_offdiag = 0.0;
    double c1_tstar = 0.0, c2_tstar = 0.0;
    double ratio_prev = 0.0; // c0_diag relative to the previous ladder level
};
struct DivergeReport {
    double tstar = 0.0;
    std::vector<DivergeRow> rows;
    double c0_growth_exp = 0.0; // fitted slope of log c0 vs log(1/eps)
};
DivergeReport run_divergence_study(const RunConfig& cfg);

/// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace nswn
