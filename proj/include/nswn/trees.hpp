#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

// Symbolic engine for the decorated-tree algebra: grammar generation, exact
// homogeneity arithmetic in alpha, the negative sector, the renormalization
// map M and the coproducts Delta / Delta+.
namespace nswn::trees {

using Rat = boost::rational<long long>;

// parabolic scaling s = (2,1,1,1); multi-indices over (t, x1, x2, x3)
using MIdx = std::array<int, 4>;
int sdeg(const MIdx& k); // scaled degree |k|_s

/// homogeneity a + b*alpha with exact rational (a,b)
struct Hom {
    Rat a{0}, b{0};
    Hom operator+(const Hom& o) const { return {a + o.a, b + o.b}; }
    bool operator==(const Hom& o) const { return a == o.a && b == o.b; }
    Rat at(const Rat& alpha) const { return a + b * alpha; }
};

extern const Rat kAlphaLeft;  // -13/5
extern const Rat kAlphaRight; // -5/2

/// sign of a linear form with a root strictly inside the alpha interval
struct UndecidableSign : std::runtime_error {
    UndecidableSign(const Hom& h);
};

/// <= 0 everywhere on the open interval (iff <= 0 at both endpoints)
bool nonpositive_on_interval(const Hom& h);
/// > 0 everywhere on the open interval; throws UndecidableSign when the
/// endpoint values have strictly opposite signs
bool positive_on_interval(const Hom& h);

// Trees are hash-consed into a process-wide arena; an Id identifies one
// canonical tree (equal trees share the Id). Products are flattened, unit-free
// and sorted, so structural equality is Id equality.
using Id = int;

enum class Kind { One, Noise, Poly, Integ, Prod };

struct Node {
    Kind kind;
    int i = 0, i1 = 0; // Noise component (i); integration superscripts (i,i1)
    MIdx k{};          // Poly exponents or integration derivative multi-index
    std::vector<Id> ch;
};

Id one();
Id noise(int i);             // Xi_i, i in 0..2
Id poly(const MIdx& k);      // X^k (k = 0 collapses to 1)
Id integ(int i, int i1, const MIdx& k, Id child);
Id ixi(int i, int i1);       // I^{i i1}(Xi_{i1})
Id prod(std::vector<Id> factors);
const Node& node(Id t);

Hom homogeneity(Id t);
std::string render(Id t);    // decorated human-readable form
std::string shape_key(Id t); // component indices erased, derivative degree kept

/// grammar iteration: W_n^{ij} = W_{n-1}^{ij} u Q(P^i_{n-1}, P^j_{n-1}) over
/// the generator shapes {1, I(Xi), I(Xi)I(Xi), U, UU, I(Xi)U}, and
/// P_n^i = {X^k} u {I^{ii1}_{i2}(tau) : tau in W_{n-1}^{i1 i2}}. Trees that
/// provably cannot reach the nonpositive sector are pruned (see trees.cpp).
struct Grammar {
    bool stabilized = false;
    int iterations = 0;
    std::array<std::array<std::set<Id>, 3>, 3> W;
    std::array<std::set<Id>, 3> P;
    std::set<Id> negative; // stabilized nonpositive sector (incl. 1 and Xi_i)

    std::set<Id> forest() const; // all generated trees plus the postulated atoms
};
Grammar generate_grammar(int max_iter);

/// hand-enumerated decorated families of nonpositive homogeneity (the oracle
/// the generated negative sector is compared against)
std::set<Id> expected_negative_sector();
/// negative sector plus the positive one-noise integration atoms I_j(I(Xi))
std::set<Id> f0_sector();
/// the two starred families: I^{ik}(Xi_k) and I^{ii1}_k(I(Xi)I(Xi))I^{jj1}(Xi)
std::set<Id> star_sector();
/// member of Alg(F_*): X^k times integrations I_l(tau_i) of positive
/// homogeneity with tau_i in the starred set
bool in_alg_star(Id t, const std::set<Id>& star);

using Lin = std::map<Id, Rat>;
using TensorSum = std::map<std::pair<Id, Id>, Rat>;

TensorSum tensor_mul(const TensorSum& x, const TensorSum& y);
TensorSum coproduct_delta(Id t);      // Delta: H -> H (x) H_+
TensorSum coproduct_delta_plus(Id t); // Delta+: H_+ -> H_+ (x) H_+

/// which renormalized family a tree belongs to: 0 none, 1..4 the four
/// product families carrying C^1..C^4 (coincident-index trees matching both
/// deep wirings are reported as family 3)
int renorm_family(Id t);

struct RenormMap {
    Rat c1{0}, c2{0}, c3{0}, c4{0}; // uniform per-family constants
    std::map<Id, Rat> overrides;    // per decorated tree
    Rat constant_for(Id t) const;
};
/// the map M: subtracts constant_for(tau) * 1 on the four families, identity
/// on the remaining basis vectors
Lin renorm_apply(const RenormMap& m, const Lin& v);

void emit_forest(std::ostream& os, const Grammar& g); // indented, per shape
void emit_csv(std::ostream& os, const Grammar& g);

} // namespace nswn::trees
