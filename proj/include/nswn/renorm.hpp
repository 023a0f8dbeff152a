#pragma once

#include <array>
#include <vector>

#include "nswn/noise.hpp"
#include "nswn/paraproduct.hpp"

namespace nswn {

struct Mat3 {
    std::array<std::array<double, 3>, 3> a{};

    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }
    Mat3& operator+=(const Mat3& o)
    {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a[i][j] += o.a[i][j];
        return *this;
    }
    Mat3 operator*(double s) const
    {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.a[i][j] = a[i][j] * s;
        return r;
    }
    Mat3 operator-(const Mat3& o) const
    {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.a[i][j] = a[i][j] - o.a[i][j];
        return r;
    }
    double max_abs() const
    {
        double m = 0.0;
        for (auto& row : a)
            for (double v : row) m = std::max(m, std::abs(v));
        return m;
    }
    double max_offdiag() const
    {
        double m = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) m = std::max(m, std::abs(a[i][j]));
        return m;
    }
};

/// C0^{ij} = (2pi)^{-3} sum_{k != 0} f(eps k)^2 / (2|k|^2) P^{ij}(k), resolved modes
Mat3 counterterm_c0(const TorusLattice& lat, double eps);
/// independent naive triple-loop oracle for the same sum
Mat3 counterterm_c0_naive(const TorusLattice& lat, double eps);

/// (1 - e^{-2at})/(2a) - int_0^t e^{-2a(t-s)} e^{-S s} ds, in closed form
double bracket_closed(double a, double S, double t);
/// adaptive-refinement quadrature oracle for the same quantity
double bracket_quadrature(double a, double S, double t);

/// one-pass accumulation of a mode-pair double sum: geometry collected per
/// integer rate pair (a,S), time factor applied at evaluation
struct PairSumTable {
    struct Entry {
        int a, S;
        Mat3 g;
    };
    std::vector<Entry> entries; // sorted by (a,S)

    Mat3 eval(double t) const
    {
        Mat3 r;
        for (const Entry& e : entries) r += e.g * bracket_closed((double)e.a, (double)e.S, t);
        return r;
    }
};

/// C1(t) = C11(t) + C12(t): centered constants for pi0(u3, u1)
PairSumTable build_c1_table(const TorusLattice& lat, double eps);
/// C2(t): centered constant for u2 u2
PairSumTable build_c2_table(const TorusLattice& lat, double eps);

struct CountertermSet {
    double eps = 0.0;
    Mat3 c0;
    PairSumTable c1, c2;
};
CountertermSet make_counterterms(const TorusLattice& lat, double eps);

/// 3x3 family of scalar fields (tensor objects u^i v^j, pi0(u^i, v^j), ...)
using TensorField33 = std::array<std::array<ScalarField, 3>, 3>;

/// plain dealiased products a^i b^j
TensorField33 product_pair(const VectorField& a, const VectorField& b, FftEngine& eng);
/// pi0(a^i, b^j)
TensorField33 pi0_pair(const VectorField& a, const VectorField& b, const DyadicPartition& P, FftEngine& eng);
/// subtract the constant matrix (zero mode carries (2pi)^{3/2} c with the e_0 normalization)
void subtract_constant(TensorField33& T, const Mat3& c);

/// u1^i diamond u1^j = u1^i u1^j - C0^{ij}
TensorField33 wick_u1u1(const VectorField& u1, const Mat3& c0, FftEngine& eng);
/// pi0_diamond(u3^i, u1^j) = pi0(u3^i, u1^j) - C1^{ij}(t)
TensorField33 pi0_diamond_u3_u1(const VectorField& u3, const VectorField& u1, const Mat3& c1_t,
                                const DyadicPartition& P, FftEngine& eng);

/// Duhamel forcing F^i = -1/2 sum_{i1} P^{i i1} sum_j D_j T^{i1 j}
VectorField pd_force(const TensorField33& T);

/// exponential-trapezoid Duhamel step: u <- e^{dt Lap} u + quadrature(F)
void duhamel_step(VectorField& u, const VectorField& f_old, const VectorField& f_new, double dt);

/// the two pi0(P D K, u1) families (no subtraction: the chaos-0 part vanishes).
/// first family: pi0(P^{i i1} D_{j0} K^{j0}, u1^{j1});  second: K^{i1} in place of K^{j0}.
/// flat index ((i*3 + i1)*3 + j0)*3 + j1
struct PdkObjects {
    std::vector<ScalarField> v6, v7;
};
PdkObjects pi0_pdk_u1(const VectorField& k_field, const VectorField& u1, const DyadicPartition& P, FftEngine& eng);

/// the seven Besov norms of the bundle at one time slice
struct BundleNorms {
    double u1 = 0, u1u1 = 0, u1u2 = 0, u2u2 = 0, pi0_u3u1 = 0, v6 = 0, v7 = 0;
    double total() const { return u1 + u1u1 + u1u2 + u2u2 + pi0_u3u1 + v6 + v7; }
};

} // namespace nswn
