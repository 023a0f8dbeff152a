#include "nswn/renorm.hpp"

#include <map>

namespace nswn {

namespace {

const double TWO_PI = 2.0 * M_PI;

using Vec3 = std::array<double, 3>;

Mat3 proj_mat(const std::array<int, 3>& k)
{
    Mat3 p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p(i, j) = leray_sym(k, i, j);
    return p;
}

Vec3 matvec(const Mat3& m, const Vec3& v)
{
    Vec3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i] += m(i, j) * v[j];
    return r;
}

Mat3 matmat(const Mat3& x, const Mat3& y)
{
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int l = 0; l < 3; ++l) s += x(i, l) * y(l, j);
            r(i, j) = s;
        }
    return r;
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 to_vec(const std::array<int, 3>& k) { return {(double)k[0], (double)k[1], (double)k[2]}; }

} // namespace

Mat3 counterterm_c0(const TorusLattice& lat, double eps)
{
    Mat3 c;
    const int N = lat.N;
    for (int k1 = -N; k1 <= N; ++k1)
        for (int k2 = -N; k2 <= N; ++k2)
            for (int k3 = -N; k3 <= N; ++k3) {
                std::array<int, 3> k = {k1, k2, k3};
                double n2 = TorusLattice::norm2(k);
                if (n2 == 0.0) continue;
                double f = mollifier(eps, k);
                if (f == 0.0) continue;
                double w = f * f / (2.0 * n2);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) c(i, j) += w * leray_sym(k, i, j);
            }
    return c * std::pow(TWO_PI, -3);
}

Mat3 counterterm_c0_naive(const TorusLattice& lat, double eps)
{
    // deliberately independent code path: no shared helpers
    Mat3 c;
    const int N = lat.N;
    for (int a = -N; a <= N; ++a)
        for (int b = -N; b <= N; ++b)
            for (int d = -N; d <= N; ++d) {
                double n2 = (double)a * a + (double)b * b + (double)d * d;
                if (n2 == 0.0) continue;
                double r = eps * std::sqrt(n2);
                if (r >= 1.0) continue;
                double f = 1.0;
                if (r > 0.5) {
                    double u = (1.0 - r) / 0.5;
                    double p = std::exp(1.0 - 1.0 / (1.0 - (u - 1.0) * (u - 1.0)));
                    double q = std::exp(1.0 - 1.0 / (1.0 - u * u));
                    f = p / (p + q);
                }
                double kk[3] = {(double)a, (double)b, (double)d};
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        double pij = (i == j ? 1.0 : 0.0) - kk[i] * kk[j] / n2;
                        c(i, j) += f * f / (2.0 * n2) * pij;
                    }
            }
    double norm = 1.0 / (TWO_PI * TWO_PI * TWO_PI);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c(i, j) *= norm;
    return c;
}

double bracket_closed(double a, double S, double t)
{
    double first = -std::expm1(-2.0 * a * t) / (2.0 * a);
    double J;
    double d = 2.0 * a - S;
    if (std::abs(d) < 1e-9 * (2.0 * a + S))
        J = t * std::exp(-2.0 * a * t);
    else
        J = (std::exp(-S * t) - std::exp(-2.0 * a * t)) / d;
    return first - J;
}

namespace {

double simpson(double a2, double S, double lo, double hi, double t)
{
    auto g = [&](double s) { return std::exp(-2.0 * a2 * (t - s)) * std::exp(-S * s); };
    double mid = 0.5 * (lo + hi);
    return (hi - lo) / 6.0 * (g(lo) + 4.0 * g(mid) + g(hi));
}

double adaptive(double a2, double S, double lo, double hi, double t, double whole, double tol, int depth)
{
    double mid = 0.5 * (lo + hi);
    double left = simpson(a2, S, lo, mid, t), right = simpson(a2, S, mid, hi, t);
    if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(a2, S, lo, mid, t, left, tol / 2, depth + 1) +
           adaptive(a2, S, mid, hi, t, right, tol / 2, depth + 1);
}

} // namespace

double bracket_quadrature(double a, double S, double t)
{
    if (t == 0.0) return 0.0;
    double first = -std::expm1(-2.0 * a * t) / (2.0 * a);
    double J = adaptive(a, S, 0.0, t, t, simpson(a, S, 0.0, t, t), 1e-14, 0);
    return first - J;
}

namespace {

using PairMap = std::map<std::pair<int, int>, Mat3>;

PairSumTable to_table(const PairMap& m)
{
    PairSumTable t;
    t.entries.reserve(m.size());
    for (auto& [key, g] : m) t.entries.push_back({key.first, key.second, g});
    return t;
}

/// modes with f(eps k) > 0 inside the given per-axis box
std::vector<std::array<int, 3>> support_modes(int box, double eps, bool canonical_only)
{
    std::vector<std::array<int, 3>> v;
    for (int a = -box; a <= box; ++a)
        for (int b = -box; b <= box; ++b)
            for (int c = -box; c <= box; ++c) {
                std::array<int, 3> k = {a, b, c};
                if (TorusLattice::norm2(k) == 0.0) continue;
                if (canonical_only && !mode_canonical(k)) continue;
                if (mollifier(eps, k) == 0.0) continue;
                v.push_back(k);
            }
    return v;
}

} // namespace

PairSumTable build_c1_table(const TorusLattice& lat, double eps)
{
    const int c = lat.cutoff();
    // k2: mode of u31/u32 (inside dealias box); k1: mode of u1; k12: mode of u2
    auto k2list = support_modes(c, eps, true);
    auto k1list = support_modes(lat.N, eps, false);
    const double pref = -2.0 * std::pow(TWO_PI, -6); // x2 negation symmetry
    const int nchunk = 16;
    std::vector<PairMap> partial(nchunk);
#pragma omp parallel for schedule(dynamic)
    for (int ch = 0; ch < nchunk; ++ch) {
        PairMap& acc = partial[ch];
        for (size_t i2 = ch; i2 < k2list.size(); i2 += nchunk) {
            const auto& k2 = k2list[i2];
            double n2k2 = TorusLattice::norm2(k2);
            double f2 = mollifier(eps, k2);
            Mat3 C = proj_mat(k2);
            Vec3 vk2 = to_vec(k2);
            for (const auto& k1 : k1list) {
                std::array<int, 3> k12 = {k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]};
                if (std::abs(k12[0]) > c || std::abs(k12[1]) > c || std::abs(k12[2]) > c) continue;
                double n2k12 = TorusLattice::norm2(k12);
                if (n2k12 == 0.0) continue;
                double n2k1 = TorusLattice::norm2(k1);
                double f1 = mollifier(eps, k1);
                int S = (int)(n2k1 + n2k2 + n2k12);
                double w = pref * f1 * f1 * f2 * f2 / (4.0 * n2k1 * n2k2 * (double)S);
                Mat3 A = proj_mat(k12), B = proj_mat(k1);
                Vec3 vk12 = to_vec(k12);
                Mat3 CA = matmat(C, A);
                // C11 geometry
                Vec3 Bk2 = matvec(B, vk2);
                double t1 = dot(vk12, Bk2);
                Mat3 CAC = matmat(CA, C);
                Vec3 CABk2 = matvec(CA, Bk2);
                Vec3 Ck12 = matvec(C, vk12);
                // C12 geometry
                Mat3 CB = matmat(C, B);
                Vec3 CBAk2 = matvec(CB, matvec(A, vk2));
                Vec3 CBk12 = matvec(CB, vk12);
                Vec3 CAk2 = matvec(CA, vk2);
                Mat3 g;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        g(i, j) = w * (t1 * CAC(i, j) + CABk2[i] * Ck12[j]      // C11
                                       + CBAk2[i] * Ck12[j] + CBk12[i] * CAk2[j]); // C12
                acc[{(int)n2k2, S}] += g;
            }
        }
    }
    PairMap merged; // deterministic: std::map keyed merge, order-independent addition per key
    for (int ch = 0; ch < nchunk; ++ch)
        for (auto& [key, g] : partial[ch]) merged[key] += g;
    return to_table(merged);
}

PairSumTable build_c2_table(const TorusLattice& lat, double eps)
{
    const int c = lat.cutoff();
    auto k2list = support_modes(lat.N, eps, true);
    auto k1list = support_modes(lat.N, eps, false);
    const double pref = 2.0 * std::pow(TWO_PI, -6);
    const int nchunk = 16;
    std::vector<PairMap> partial(nchunk);
#pragma omp parallel for schedule(dynamic)
    for (int ch = 0; ch < nchunk; ++ch) {
        PairMap& acc = partial[ch];
        for (size_t i2 = ch; i2 < k2list.size(); i2 += nchunk) {
            const auto& k2 = k2list[i2];
            double n2k2 = TorusLattice::norm2(k2);
            double f2 = mollifier(eps, k2);
            Mat3 C = proj_mat(k2);
            for (const auto& k1 : k1list) {
                std::array<int, 3> k12 = {k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]};
                if (std::abs(k12[0]) > c || std::abs(k12[1]) > c || std::abs(k12[2]) > c) continue;
                double n2k12 = TorusLattice::norm2(k12);
                if (n2k12 == 0.0) continue;
                double n2k1 = TorusLattice::norm2(k1);
                double f1 = mollifier(eps, k1);
                int S = (int)(n2k1 + n2k2 + n2k12);
                double w = pref * f1 * f1 * f2 * f2 / (2.0 * n2k1 * n2k2 * (double)S);
                Mat3 A = proj_mat(k12), B = proj_mat(k1);
                Vec3 vk12 = to_vec(k12);
                Mat3 AB = matmat(A, B);
                Mat3 ABA = matmat(AB, A);
                double t1 = dot(vk12, matvec(C, vk12));
                Vec3 ABk12 = matvec(AB, vk12);
                Vec3 ACk12 = matvec(matmat(A, C), vk12);
                Mat3 g;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) g(i, j) = w * (ABA(i, j) * t1 + ABk12[i] * ACk12[j]);
                acc[{(int)n2k12, S}] += g;
            }
        }
    }
    PairMap merged;
    for (int ch = 0; ch < nchunk; ++ch)
        for (auto& [key, g] : partial[ch]) merged[key] += g;
    return to_table(merged);
}

CountertermSet make_counterterms(const TorusLattice& lat, double eps)
{
    CountertermSet s;
    s.eps = eps;
    s.c0 = counterterm_c0(lat, eps);
    s.c1 = build_c1_table(lat, eps);
    s.c2 = build_c2_table(lat, eps);
    return s;
}

TensorField33 product_pair(const VectorField& a, const VectorField& b, FftEngine& eng)
{
    std::array<std::vector<cplx>, 3> ga, gb;
    for (int i = 0; i < 3; ++i) {
        eng.to_grid(a[i], ga[i]);
        eng.to_grid(b[i], gb[i]);
    }
    TensorField33 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = eng.product_of_grids(ga[i], gb[j]);
    return r;
}

TensorField33 pi0_pair(const VectorField& a, const VectorField& b, const DyadicPartition& P, FftEngine& eng)
{
    std::array<BlockedField, 3> ba, bb;
    for (int i = 0; i < 3; ++i) {
        ba[i] = make_blocked(a[i], P, eng);
        bb[i] = make_blocked(b[i], P, eng);
    }
    TensorField33 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = para_res(ba[i], bb[j], eng);
    return r;
}

void subtract_constant(TensorField33& T, const Mat3& c)
{
    const double e0 = std::pow(TWO_PI, 1.5);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            ScalarField& f = T[i][j];
            f.c[f.lat->index(0, 0, 0)] -= e0 * c(i, j);
        }
}

TensorField33 wick_u1u1(const VectorField& u1, const Mat3& c0, FftEngine& eng)
{
    TensorField33 T = product_pair(u1, u1, eng);
    subtract_constant(T, c0);
    return T;
}

TensorField33 pi0_diamond_u3_u1(const VectorField& u3, const VectorField& u1, const Mat3& c1_t,
                                const DyadicPartition& P, FftEngine& eng)
{
    TensorField33 T = pi0_pair(u3, u1, P, eng);
    subtract_constant(T, c1_t);
    return T;
}

VectorField pd_force(const TensorField33& T)
{
    const TorusLattice& L = *T[0][0].lat;
    VectorField F(L);
    par_for(L.n_modes(), [&](long idx) {
        auto k = L.mode(idx);
        cplx d[3];
        for (int i1 = 0; i1 < 3; ++i1) {
            cplx s(0.0);
            for (int j = 0; j < 3; ++j) s += cplx(0.0, (double)k[j]) * T[i1][j].c[idx];
            d[i1] = s;
        }
        for (int i = 0; i < 3; ++i) {
            cplx s(0.0);
            for (int i1 = 0; i1 < 3; ++i1) s += leray_sym(k, i, i1) * d[i1];
            F[i].c[idx] = -0.5 * s;
        }
    });
    return F;
}

void duhamel_step(VectorField& u, const VectorField& f_old, const VectorField& f_new, double dt)
{
    const TorusLattice& L = *u.lat();
    par_for(L.n_modes(), [&](long idx) {
        double a = TorusLattice::norm2(L.mode(idx));
        double e = std::exp(-a * dt), w0 = etd_w0(a, dt), w1 = etd_w1(a, dt);
        for (int i = 0; i < 3; ++i)
            u[i].c[idx] = e * u[i].c[idx] + w0 * f_old[i].c[idx] + w1 * f_new[i].c[idx];
    });
}

PdkObjects pi0_pdk_u1(const VectorField& k_field, const VectorField& u1, const DyadicPartition& P, FftEngine& eng)
{
    const TorusLattice& L = *u1.lat();
    std::array<BlockedField, 3> bu1;
    for (int j = 0; j < 3; ++j) bu1[j] = make_blocked(u1[j], P, eng);

    PdkObjects out;
    out.v6.assign(81, ScalarField());
    out.v7.assign(81, ScalarField());

    // family 1: first arg P^{i i1}(D_{j0} K^{j0}), j0 free (no sum)
    for (int j0 = 0; j0 < 3; ++j0) {
        ScalarField h = spatial_derivative(k_field[j0], j0);
        for (int i = 0; i < 3; ++i)
            for (int i1 = i; i1 < 3; ++i1) {
                BlockedField bh = make_blocked(leray_component(h, i, i1), P, eng);
                for (int j1 = 0; j1 < 3; ++j1) {
                    ScalarField r = para_res(bh, bu1[j1], eng);
                    out.v6[((i * 3 + i1) * 3 + j0) * 3 + j1] = r;
                    if (i1 != i) out.v6[((i1 * 3 + i) * 3 + j0) * 3 + j1] = r;
                }
            }
    }
    // family 2: first arg P^{i i1}(D_{j0} K^{i1})
    for (int i1 = 0; i1 < 3; ++i1)
        for (int j0 = 0; j0 < 3; ++j0) {
            ScalarField h = spatial_derivative(k_field[i1], j0);
            for (int i = 0; i < 3; ++i) {
                BlockedField bh = make_blocked(leray_component(h, i, i1), P, eng);
                for (int j1 = 0; j1 < 3; ++j1)
                    out.v7[((i * 3 + i1) * 3 + j0) * 3 + j1] = para_res(bh, bu1[j1], eng);
            }
        }
    (void)L;
    return out;
}

} // namespace nswn
