#include "nswn/trees.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace nswn::trees {

const Rat kAlphaLeft(-13, 5);
const Rat kAlphaRight(-5, 2);

int sdeg(const MIdx& k) { return 2 * k[0] + k[1] + k[2] + k[3]; }

namespace {

std::string rat_str(const Rat& r)
{
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << '/' << r.denominator();
    return os.str();
}

} // namespace

UndecidableSign::UndecidableSign(const Hom& h)
    : std::runtime_error("sign of " + rat_str(h.a) + " + " + rat_str(h.b) +
                         "*alpha undecidable on (-13/5,-5/2)")
{
}

bool nonpositive_on_interval(const Hom& h)
{
    return h.at(kAlphaLeft) <= Rat(0) && h.at(kAlphaRight) <= Rat(0);
}

bool positive_on_interval(const Hom& h)
{
    // comparisons stay rational-vs-rational: boost 1.74's mixed int overloads
    // recurse through the C++20 rewritten-candidate set and never return
    const Rat zero(0);
    const Rat vl = h.at(kAlphaLeft), vr = h.at(kAlphaRight);
    if (vl > zero && vr > zero) return true;
    if (vl <= zero && vr <= zero) return false;
    // one endpoint zero, the other positive: positive on the open interval
    if (vl >= zero && vr >= zero) return !(h.a == zero && h.b == zero);
    throw UndecidableSign(h);
}

// ---------------------------------------------------------------------------
// hash-consed arena
namespace {

std::vector<Node> g_nodes;
std::vector<std::string> g_repr;
std::vector<Hom> g_hom;
std::unordered_map<std::string, Id> g_index;

std::string make_repr(const Node& n)
{
    switch (n.kind) {
    case Kind::One: return "1";
    case Kind::Noise: return "N" + std::to_string(n.i);
    case Kind::Poly: {
        std::string s = "X";
        for (int d : n.k) s += std::to_string(d) + ",";
        return s;
    }
    case Kind::Integ: {
        std::string s = "I" + std::to_string(n.i) + "," + std::to_string(n.i1) + ";";
        for (int d : n.k) s += std::to_string(d) + ",";
        return s + "(" + g_repr[n.ch[0]] + ")";
    }
    case Kind::Prod: {
        std::string s = "[";
        for (Id c : n.ch) s += g_repr[c] + "|";
        return s + "]";
    }
    }
    return {};
}

Hom make_hom(const Node& n)
{
    switch (n.kind) {
    case Kind::One: return {Rat(0), Rat(0)};
    case Kind::Noise: return {Rat(0), Rat(1)};
    case Kind::Poly: return {Rat(sdeg(n.k)), Rat(0)};
    case Kind::Integ: return g_hom[n.ch[0]] + Hom{Rat(2 - sdeg(n.k)), Rat(0)};
    case Kind::Prod: {
        Hom h{Rat(0), Rat(0)};
        for (Id c : n.ch) h = h + g_hom[c];
        return h;
    }
    }
    return {};
}

Id intern(Node n)
{
    const std::string key = make_repr(n);
    auto it = g_index.find(key);
    if (it != g_index.end()) return it->second;
    const Id id = static_cast<Id>(g_nodes.size());
    g_nodes.push_back(std::move(n));
    g_repr.push_back(key);
    g_hom.push_back(make_hom(g_nodes.back()));
    g_index.emplace(g_repr.back(), id);
    return id;
}

} // namespace

Id one()
{
    static const Id id = intern(Node{Kind::One, 0, 0, {}, {}});
    return id;
}

Id noise(int i) { return intern(Node{Kind::Noise, i, 0, {}, {}}); }

Id poly(const MIdx& k)
{
    if (sdeg(k) == 0) return one();
    return intern(Node{Kind::Poly, 0, 0, k, {}});
}

Id integ(int i, int i1, const MIdx& k, Id child)
{
    return intern(Node{Kind::Integ, i, i1, k, {child}});
}

Id ixi(int i, int i1) { return integ(i, i1, MIdx{}, noise(i1)); }

Id prod(std::vector<Id> factors)
{
    std::vector<Id> flat;
    for (Id f : factors) {
        const Node& n = g_nodes[f];
        if (n.kind == Kind::One) continue;
        if (n.kind == Kind::Prod)
            flat.insert(flat.end(), n.ch.begin(), n.ch.end());
        else
            flat.push_back(f);
    }
    if (flat.empty()) return one();
    if (flat.size() == 1) return flat[0];
    std::sort(flat.begin(), flat.end(), [](Id a, Id b) { return g_repr[a] < g_repr[b]; });
    return intern(Node{Kind::Prod, 0, 0, {}, std::move(flat)});
}

const Node& node(Id t) { return g_nodes[t]; }

Hom homogeneity(Id t) { return g_hom[t]; }

namespace {

std::string midx_str(const MIdx& k)
{
    std::string s = "(";
    for (int a = 0; a < 4; ++a) s += std::to_string(k[a]) + (a < 3 ? "," : ")");
    return s;
}

// single spatial derivative prints as _j, general multi-indices in full
std::string deriv_str(const MIdx& k)
{
    if (sdeg(k) == 0) return {};
    for (int a = 1; a < 4; ++a) {
        MIdx e{};
        e[a] = 1;
        if (k == e) return "_" + std::to_string(a);
    }
    return "_" + midx_str(k);
}

} // namespace

std::string render(Id t)
{
    const Node& n = g_nodes[t];
    switch (n.kind) {
    case Kind::One: return "1";
    case Kind::Noise: return "Xi_" + std::to_string(n.i + 1);
    case Kind::Poly: return "X^" + midx_str(n.k);
    case Kind::Integ:
        return "I[" + std::to_string(n.i + 1) + "," + std::to_string(n.i1 + 1) + "]" +
               deriv_str(n.k) + "(" + render(n.ch[0]) + ")";
    case Kind::Prod: {
        std::string s;
        for (size_t a = 0; a < n.ch.size(); ++a) s += (a ? " " : "") + render(n.ch[a]);
        return s;
    }
    }
    return {};
}

std::string shape_key(Id t)
{
    const Node& n = g_nodes[t];
    switch (n.kind) {
    case Kind::One: return "1";
    case Kind::Noise: return "N";
    case Kind::Poly: return "X" + std::to_string(sdeg(n.k));
    case Kind::Integ: {
        const int d = sdeg(n.k);
        return "I" + (d ? std::to_string(d) : "") + "(" + shape_key(n.ch[0]) + ")";
    }
    case Kind::Prod: {
        std::vector<std::string> parts;
        for (Id c : n.ch) parts.push_back(shape_key(c));
        std::sort(parts.begin(), parts.end());
        std::string s = "{";
        for (const auto& p : parts) s += p + "*";
        return s + "}";
    }
    }
    return {};
}

// ---------------------------------------------------------------------------
// grammar
namespace {

MIdx spatial_e(int axis)
{
    MIdx k{};
    k[axis + 1] = 1;
    return k;
}

void enumerate_midx(int deg, std::vector<MIdx>& out)
{
    for (int k0 = 0; 2 * k0 <= deg; ++k0)
        for (int k1 = 0; 2 * k0 + k1 <= deg; ++k1)
            for (int k2 = 0; 2 * k0 + k1 + k2 <= deg; ++k2) {
                MIdx k{k0, k1, k2, deg - 2 * k0 - k1 - k2};
                out.push_back(k);
            }
}

// keep a generated product/tree only if it can still matter for the
// nonpositive sector: either it is nonpositive on the interval already, or
// its left-endpoint value is negative (every later operation -- one
// integration wrap plus a cofactor of homogeneity >= alpha+2 -- raises the
// left-endpoint value by at least 2/5, so anything >= 0 there and positive on
// the interval can never reach a nonpositive descendant)
bool keep_w(const Hom& h)
{
    return nonpositive_on_interval(h) || h.at(kAlphaLeft) < Rat(0);
}

// a P element enters products only against cofactors of left-endpoint value
// >= -3/5 (the plain stochastic convolution); anything above 2/5 at the left
// endpoint can never make the pair nonpositive at both endpoints
bool keep_p(const Hom& h) { return h.at(kAlphaLeft) <= Rat(2, 5); }

using HomKey = std::pair<Rat, Rat>;
HomKey hom_key(const Hom& h) { return {h.a, h.b}; }

} // namespace

std::set<Id> Grammar::forest() const
{
    std::set<Id> out;
    out.insert(one());
    for (int i = 0; i < 3; ++i) out.insert(noise(i));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.insert(W[i][j].begin(), W[i][j].end());
    for (int i = 0; i < 3; ++i) out.insert(P[i].begin(), P[i].end());
    return out;
}

Grammar generate_grammar(int max_iter)
{
    Grammar g;

    std::vector<Id> xs; // X^k, |k|_s <= 2
    {
        std::vector<MIdx> ks;
        enumerate_midx(1, ks);
        enumerate_midx(2, ks);
        for (const auto& k : ks) xs.push_back(poly(k));
    }

    for (int it = 1; it <= max_iter; ++it) {
        // P_n from W_{n-1}
        std::array<std::set<Id>, 3> newP;
        for (int i = 0; i < 3; ++i) {
            newP[i].insert(xs.begin(), xs.end());
            for (int i1 = 0; i1 < 3; ++i1)
                for (int i2 = 0; i2 < 3; ++i2)
                    for (Id tau : g.W[i1][i2]) {
                        const Id w = integ(i, i1, spatial_e(i2), tau);
                        if (keep_p(g_hom[w])) newP[i].insert(w);
                    }
        }

        // W_n from P_{n-1}; bucket P by homogeneity so only class pairs that
        // can stay relevant are expanded
        std::array<std::map<HomKey, std::vector<Id>>, 3> byhom;
        for (int i = 0; i < 3; ++i)
            for (Id u : g.P[i]) byhom[i][hom_key(g_hom[u])].push_back(u);

        std::array<std::array<std::set<Id>, 3>, 3> newW = g.W;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                auto& cell = newW[i][j];
                auto add = [&](Id t) {
                    if (keep_w(g_hom[t])) cell.insert(t);
                };
                add(one());
                for (int i1 = 0; i1 < 3; ++i1) add(ixi(i, i1));
                for (int j1 = 0; j1 < 3; ++j1) add(ixi(j, j1));
                for (int i1 = 0; i1 < 3; ++i1)
                    for (int j1 = 0; j1 < 3; ++j1) add(prod({ixi(i, i1), ixi(j, j1)}));
                for (Id u : g.P[i]) add(u);
                for (Id u : g.P[j]) add(u);
                const Hom hxi{Rat(2), Rat(1)};
                for (int c = 0; c < 3; ++c) { // I(Xi) U and U I(Xi)
                    for (auto& [hk, us] : byhom[j]) {
                        if (!keep_w(Hom{hk.first, hk.second} + hxi)) continue;
                        for (Id u : us) add(prod({ixi(i, c), u}));
                    }
                    for (auto& [hk, us] : byhom[i]) {
                        if (!keep_w(Hom{hk.first, hk.second} + hxi)) continue;
                        for (Id u : us) add(prod({u, ixi(j, c)}));
                    }
                }
                for (auto& [hka, ua] : byhom[i]) // U_i U_j
                    for (auto& [hkb, ub] : byhom[j]) {
                        if (!keep_w(Hom{hka.first + hkb.first, hka.second + hkb.second}))
                            continue;
                        for (Id a : ua)
                            for (Id b : ub) add(prod({a, b}));
                    }
            }

        g.iterations = it;
        const bool same = newW == g.W && newP == g.P;
        g.W = std::move(newW);
        g.P = std::move(newP);
        if (same) {
            g.stabilized = true;
            break;
        }
    }

    for (Id t : g.forest())
        if (nonpositive_on_interval(g_hom[t])) g.negative.insert(t);
    return g;
}

// ---------------------------------------------------------------------------
// hand-enumerated families
namespace {

// I^{a a1}_d ( I^{a1 c}(Xi_c) I^{d e}(Xi_e) )
Id f6core(int a, int a1, int c, int d, int e)
{
    return integ(a, a1, spatial_e(d), prod({ixi(a1, c), ixi(d, e)}));
}

} // namespace

std::set<Id> expected_negative_sector()
{
    std::set<Id> s;
    s.insert(one());
    for (int i = 0; i < 3; ++i) s.insert(noise(i));
    for (int i = 0; i < 3; ++i)
        for (int i1 = 0; i1 < 3; ++i1) s.insert(ixi(i, i1));
    for (int i = 0; i < 3; ++i)
        for (int i1 = 0; i1 < 3; ++i1)
            for (int j = 0; j < 3; ++j)
                for (int j1 = 0; j1 < 3; ++j1) s.insert(prod({ixi(i, i1), ixi(j, j1)}));
    for (int i = 0; i < 3; ++i)
        for (int i1 = 0; i1 < 3; ++i1)
            for (int i2 = 0; i2 < 3; ++i2)
                for (int j = 0; j < 3; ++j)
                    for (int j1 = 0; j1 < 3; ++j1) {
                        s.insert(f6core(i, i1, i2, j, j1));
                        // single-derivative one-noise factors times I(Xi)
                        for (int k = 0; k < 3; ++k) {
                            s.insert(prod({integ(i, i1, spatial_e(k), ixi(i1, i2)), ixi(j, j1)}));
                            s.insert(prod({integ(i, i1, spatial_e(k), ixi(k, i2)), ixi(j, j1)}));
                        }
                    }
    // two-noise core times I(Xi), all decorations
    for (int i = 0; i < 3; ++i)
        for (int i1 = 0; i1 < 3; ++i1)
            for (int i2 = 0; i2 < 3; ++i2)
                for (int k = 0; k < 3; ++k)
                    for (int k1 = 0; k1 < 3; ++k1)
                        for (int j = 0; j < 3; ++j)
                            for (int j1 = 0; j1 < 3; ++j1)
                                s.insert(prod({f6core(i, i1, i2, k, k1), ixi(j, j1)}));
    // pairs of two-noise cores
    std::vector<Id> cores;
    for (int i = 0; i < 3; ++i)
        for (int i1 = 0; i1 < 3; ++i1)
            for (int i2 = 0; i2 < 3; ++i2)
                for (int k = 0; k < 3; ++k)
                    for (int k1 = 0; k1 < 3; ++k1) cores.push_back(f6core(i, i1, i2, k, k1));
    for (Id a : cores)
        for (Id b : cores) s.insert(prod({a, b}));
    // depth-three families: both wirings of I_l(core . I(Xi)) I(Xi)
    for (int i = 0; i < 3; ++i)
        for (int i1 = 0; i1 < 3; ++i1)
            for (int i2 = 0; i2 < 3; ++i2)
                for (int i3 = 0; i3 < 3; ++i3)
                    for (int k = 0; k < 3; ++k)
                        for (int k1 = 0; k1 < 3; ++k1)
                            for (int l = 0; l < 3; ++l)
                                for (int l1 = 0; l1 < 3; ++l1)
                                    for (int j = 0; j < 3; ++j)
                                        for (int j1 = 0; j1 < 3; ++j1) {
                                            s.insert(prod(
                                                {integ(i, i1, spatial_e(l),
                                                       prod({f6core(i1, i2, i3, k, k1), ixi(l, l1)})),
                                                 ixi(j, j1)}));
                                            s.insert(prod(
                                                {integ(i, i1, spatial_e(l),
                                                       prod({f6core(l, l1, i3, k, k1), ixi(i1, i2)})),
                                                 ixi(j, j1)}));
                                        }
    return s;
}

std::set<Id> f0_sector()
{
    std::set<Id> s = expected_negative_sector();
    for (int i = 0; i < 3; ++i)
        for (int i1 = 0; i1 < 3; ++i1)
            for (int i2 = 0; i2 < 3; ++i2)
                for (int j = 0; j < 3; ++j) {
                    s.insert(integ(i, i1, spatial_e(j), ixi(i1, i2)));
                    s.insert(integ(i, i1, spatial_e(j), ixi(j, i2)));
                }
    return s;
}

std::set<Id> star_sector()
{
    std::set<Id> s;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) s.insert(ixi(i, k));
    for (int i = 0; i < 3; ++i)
        for (int i1 = 0; i1 < 3; ++i1)
            for (int i2 = 0; i2 < 3; ++i2)
                for (int k = 0; k < 3; ++k)
                    for (int k1 = 0; k1 < 3; ++k1)
                        for (int j = 0; j < 3; ++j)
                            for (int j1 = 0; j1 < 3; ++j1)
                                s.insert(prod({f6core(i, i1, i2, k, k1), ixi(j, j1)}));
    return s;
}

namespace {

bool alg_factor_ok(Id f, const std::set<Id>& star)
{
    const Node& n = g_nodes[f];
    if (n.kind == Kind::Poly) return true;
    if (n.kind != Kind::Integ) return false;
    if (!star.count(n.ch[0])) return false;
    return positive_on_interval(g_hom[f]);
}

} // namespace

bool in_alg_star(Id t, const std::set<Id>& star)
{
    const Node& n = g_nodes[t];
    if (n.kind == Kind::One) return true;
    if (n.kind == Kind::Prod) {
        for (Id c : n.ch)
            if (!alg_factor_ok(c, star)) return false;
        return true;
    }
    return alg_factor_ok(t, star);
}

// ---------------------------------------------------------------------------
// coproducts
namespace {

Rat fact_midx(const MIdx& k)
{
    long long f = 1;
    for (int a = 0; a < 4; ++a)
        for (int v = 2; v <= k[a]; ++v) f *= v;
    return Rat(f);
}

Rat binom_midx(const MIdx& k, const MIdx& l)
{
    Rat b(1);
    for (int a = 0; a < 4; ++a) {
        long long c = 1;
        for (int v = 0; v < l[a]; ++v) c = c * (k[a] - v) / (v + 1);
        b *= Rat(c);
    }
    return b;
}

MIdx midx_add(const MIdx& a, const MIdx& b)
{
    MIdx r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + b[i];
    return r;
}

void ts_add(TensorSum& s, Id l, Id r, const Rat& c)
{
    auto& v = s[{l, r}];
    v += c;
    if (v == Rat(0)) s.erase({l, r});
}

TensorSum poly_coproduct(const MIdx& k)
{
    TensorSum s;
    std::vector<MIdx> ls;
    for (int l0 = 0; l0 <= k[0]; ++l0)
        for (int l1 = 0; l1 <= k[1]; ++l1)
            for (int l2 = 0; l2 <= k[2]; ++l2)
                for (int l3 = 0; l3 <= k[3]; ++l3) {
                    const MIdx l{l0, l1, l2, l3};
                    const MIdx m{k[0] - l0, k[1] - l1, k[2] - l2, k[3] - l3};
                    ts_add(s, poly(l), poly(m), binom_midx(k, l));
                }
    return s;
}

std::unordered_map<Id, TensorSum> g_delta_memo, g_deltap_memo;

} // namespace

TensorSum tensor_mul(const TensorSum& x, const TensorSum& y)
{
    TensorSum s;
    for (const auto& [px, cx] : x)
        for (const auto& [py, cy] : y)
            ts_add(s, prod({px.first, py.first}), prod({px.second, py.second}), cx * cy);
    return s;
}

TensorSum coproduct_delta(Id t)
{
    auto it = g_delta_memo.find(t);
    if (it != g_delta_memo.end()) return it->second;

    TensorSum s;
    // recursion interns new nodes and may reallocate the arena: copy the node
    const Node n = g_nodes[t];
    switch (n.kind) {
    case Kind::One: ts_add(s, one(), one(), Rat(1)); break;
    case Kind::Noise: ts_add(s, t, one(), Rat(1)); break;
    case Kind::Poly: s = poly_coproduct(n.k); break;
    case Kind::Prod: {
        s = coproduct_delta(n.ch[0]);
        for (size_t a = 1; a < n.ch.size(); ++a) s = tensor_mul(s, coproduct_delta(n.ch[a]));
        break;
    }
    case Kind::Integ: {
        for (const auto& [p, c] : coproduct_delta(n.ch[0]))
            ts_add(s, integ(n.i, n.i1, n.k, p.first), p.second, c);
        const Hom h0 = g_hom[n.ch[0]] + Hom{Rat(2 - sdeg(n.k)), Rat(0)};
        for (int d = 0; h0.at(kAlphaRight) > Rat(d); ++d) {
            const Hom hd{h0.a - d, h0.b};
            if (!positive_on_interval(hd)) continue;
            std::vector<MIdx> ls;
            for (int dl = 0; dl <= d; ++dl) enumerate_midx(dl, ls);
            for (const auto& l : ls) {
                std::vector<MIdx> ms;
                enumerate_midx(d - sdeg(l), ms);
                for (const auto& m : ms) {
                    const Id sig = integ(n.i, n.i1, midx_add(n.k, midx_add(l, m)), n.ch[0]);
                    ts_add(s, poly(l), prod({poly(m), sig}),
                           Rat(1) / (fact_midx(l) * fact_midx(m)));
                }
            }
        }
        break;
    }
    }
    g_delta_memo.emplace(t, s);
    return s;
}

TensorSum coproduct_delta_plus(Id t)
{
    auto it = g_deltap_memo.find(t);
    if (it != g_deltap_memo.end()) return it->second;

    TensorSum s;
    const Node n = g_nodes[t]; // copy: recursion may reallocate the arena
    switch (n.kind) {
    case Kind::One: ts_add(s, one(), one(), Rat(1)); break;
    case Kind::Noise: throw std::invalid_argument("noise symbol is not in H_+");
    case Kind::Poly: s = poly_coproduct(n.k); break;
    case Kind::Prod: {
        s = coproduct_delta_plus(n.ch[0]);
        for (size_t a = 1; a < n.ch.size(); ++a)
            s = tensor_mul(s, coproduct_delta_plus(n.ch[a]));
        break;
    }
    case Kind::Integ: {
        ts_add(s, one(), t, Rat(1));
        for (const auto& [p, c] : coproduct_delta(n.ch[0])) {
            const Hom hL = g_hom[p.first] + Hom{Rat(2 - sdeg(n.k)), Rat(0)};
            for (int d = 0; hL.at(kAlphaRight) > Rat(d); ++d) {
                const Hom hd{hL.a - d, hL.b};
                if (!positive_on_interval(hd)) continue;
                std::vector<MIdx> ls;
                enumerate_midx(d, ls);
                for (const auto& l : ls) {
                    const Id left = integ(n.i, n.i1, midx_add(n.k, l), p.first);
                    const int par = l[0] + l[1] + l[2] + l[3];
                    const Rat sign = (par % 2 == 0) ? Rat(1) : Rat(-1);
                    ts_add(s, left, prod({poly(l), p.second}), c * sign / fact_midx(l));
                }
            }
        }
        break;
    }
    }
    g_deltap_memo.emplace(t, s);
    return s;
}

// ---------------------------------------------------------------------------
// renormalization map
namespace {

bool is_plain_ixi(Id t, int* head = nullptr)
{
    const Node& n = g_nodes[t];
    if (n.kind != Kind::Integ || sdeg(n.k) != 0) return false;
    const Node& c = g_nodes[n.ch[0]];
    if (c.kind != Kind::Noise || c.i != n.i1) return false;
    if (head) *head = n.i;
    return true;
}

// I^{a a1}_d (I(Xi) I(Xi)) with inner heads {a1, d}
bool is_core(Id t, int* head = nullptr, int* tail = nullptr)
{
    const Node& n = g_nodes[t];
    if (n.kind != Kind::Integ || sdeg(n.k) != 1 || n.k[0] != 0) return false;
    int d = -1;
    for (int a = 1; a < 4; ++a)
        if (n.k[a] == 1) d = a - 1;
    const Node& p = g_nodes[n.ch[0]];
    if (p.kind != Kind::Prod || p.ch.size() != 2) return false;
    int h0, h1;
    if (!is_plain_ixi(p.ch[0], &h0) || !is_plain_ixi(p.ch[1], &h1)) return false;
    const bool ok = (h0 == n.i1 && h1 == d) || (h0 == d && h1 == n.i1);
    if (!ok) return false;
    if (head) *head = n.i;
    if (tail) *tail = n.i1;
    return true;
}

} // namespace

int renorm_family(Id t)
{
    const Node& n = g_nodes[t];
    if (n.kind != Kind::Prod || n.ch.size() != 2) return 0;
    if (is_plain_ixi(n.ch[0]) && is_plain_ixi(n.ch[1])) return 1;
    if (is_core(n.ch[0]) && is_core(n.ch[1])) return 2;
    for (int a = 0; a < 2; ++a) {
        if (!is_plain_ixi(n.ch[1 - a])) continue;
        const Node& w = g_nodes[n.ch[a]];
        if (w.kind != Kind::Integ || sdeg(w.k) != 1 || w.k[0] != 0) continue;
        int l = -1;
        for (int b = 1; b < 4; ++b)
            if (w.k[b] == 1) l = b - 1;
        const Node& p = g_nodes[w.ch[0]];
        if (p.kind != Kind::Prod || p.ch.size() != 2) continue;
        for (int b = 0; b < 2; ++b) {
            int chead, phead;
            if (!is_core(p.ch[b], &chead) || !is_plain_ixi(p.ch[1 - b], &phead)) continue;
            if (chead == w.i1 && phead == l) return 3;
            if (chead == l && phead == w.i1) return 4;
        }
    }
    return 0;
}

Rat RenormMap::constant_for(Id t) const
{
    auto it = overrides.find(t);
    if (it != overrides.end()) return it->second;
    switch (renorm_family(t)) {
    case 1: return c1;
    case 2: return c2;
    case 3: return c3;
    case 4: return c4;
    default: return Rat(0);
    }
}

Lin renorm_apply(const RenormMap& m, const Lin& v)
{
    Lin out = v;
    Rat shift(0);
    for (const auto& [t, c] : v) shift += c * m.constant_for(t);
    if (shift != Rat(0)) {
        out[one()] -= shift;
        if (out[one()] == Rat(0)) out.erase(one());
    }
    return out;
}

// ---------------------------------------------------------------------------
// emission
namespace {

void indent_render(std::ostream& os, Id t, int depth)
{
    const Node& n = g_nodes[t];
    const std::string pad(2 * depth, ' ');
    switch (n.kind) {
    case Kind::One: os << pad << "1\n"; return;
    case Kind::Noise: os << pad << "Xi_" << n.i + 1 << "\n"; return;
    case Kind::Poly: os << pad << "X^" << midx_str(n.k) << "\n"; return;
    case Kind::Integ:
        os << pad << "I[" << n.i + 1 << "," << n.i1 + 1 << "]" << deriv_str(n.k) << "\n";
        indent_render(os, n.ch[0], depth + 1);
        return;
    case Kind::Prod:
        os << pad << "*\n";
        for (Id c : n.ch) indent_render(os, c, depth + 1);
        return;
    }
}

struct ShapeInfo {
    Hom hom;
    int count = 0;
    Id rep = 0;
    std::string rep_render;
};

std::map<std::string, ShapeInfo> shape_table(const std::set<Id>& trees)
{
    std::map<std::string, ShapeInfo> tab;
    for (Id t : trees) {
        auto& si = tab[shape_key(t)];
        si.hom = g_hom[t];
        ++si.count;
        const std::string r = render(t);
        if (si.count == 1 || r < si.rep_render) {
            si.rep = t;
            si.rep_render = r;
        }
    }
    return tab;
}

} // namespace

void emit_forest(std::ostream& os, const Grammar& g)
{
    os << "# stabilized nonpositive sector: " << g.negative.size() << " decorated trees, "
       << (g.stabilized ? "stabilized" : "NOT stabilized") << " after " << g.iterations
       << " iterations\n";
    int sid = 0;
    for (const auto& [key, si] : shape_table(g.negative)) {
        os << "shape " << sid++ << "  " << key << "  hom " << rat_str(si.hom.a) << " + "
           << rat_str(si.hom.b) << "*alpha  count " << si.count << "\n";
        indent_render(os, si.rep, 1);
    }
}

void emit_csv(std::ostream& os, const Grammar& g)
{
    const std::set<Id> all = g.forest();
    std::map<std::string, int> sid;
    for (Id t : all) sid.emplace(shape_key(t), 0);
    int next = 0;
    for (auto& [k, v] : sid) v = next++;

    std::vector<std::pair<std::pair<int, std::string>, Id>> rows;
    rows.reserve(all.size());
    for (Id t : all) rows.push_back({{sid[shape_key(t)], render(t)}, t});
    std::sort(rows.begin(), rows.end());

    os << "shape_id,index_decoration,a,b,negative_at_left_endpoint,negative_at_right_endpoint\n";
    for (const auto& [key, t] : rows) {
        const Hom h = g_hom[t];
        os << key.first << ",\"" << key.second << "\"," << rat_str(h.a) << "," << rat_str(h.b)
           << "," << (h.at(kAlphaLeft) <= Rat(0) ? 1 : 0) << "," << (h.at(kAlphaRight) <= Rat(0) ? 1 : 0)
           << "\n";
    }
}

} // namespace nswn::trees
