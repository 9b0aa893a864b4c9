#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qforma/isotropy.hpp"
#include "qforma/polyfactor.hpp"

using namespace qforma;

namespace {

// Brute-force oracle over the rationals: search integer vectors with entries
// in [-bound, bound] for a nontrivial zero.
std::optional<std::vector<long>> brute_isotropic_ints(const std::vector<long>& cs, long bound) {
    size_t n = cs.size();
    std::vector<long> v(n, -bound);
    for (;;) {
        bool nonzero = false;
        long s = 0;
        for (size_t i = 0; i < n; ++i) {
            if (v[i] != 0) nonzero = true;
            s += cs[i] * v[i] * v[i];
        }
        if (nonzero && s == 0) return v;
        size_t k = 0;
        while (k < n && v[k] == bound) v[k++] = -bound;
        if (k == n) return std::nullopt;
        ++v[k];
    }
}

// Exhaustive oracle over GF(p).
bool brute_isotropic_gfp(const std::vector<long>& cs, long p) {
    size_t n = cs.size();
    std::vector<long> v(n, 0);
    for (;;) {
        bool nonzero = false;
        long s = 0;
        for (size_t i = 0; i < n; ++i) {
            if (v[i] != 0) nonzero = true;
            s = (s + cs[i] * v[i] % p * v[i]) % p;
        }
        if (nonzero && s % p == 0) return true;
        size_t k = 0;
        while (k < n && v[k] == p - 1) v[k++] = 0;
        if (k == n) return false;
        ++v[k];
    }
}

bool brute_represents_gfp(const std::vector<long>& cs, long c, long p) {
    std::vector<long> ext = cs;
    ext.push_back(pf_norm(-c, p));
    // phi represents c iff phi + <-c> has a zero with last slot forced on,
    // or phi is isotropic (then universal); the extension test covers both.
    if (cs.size() >= 1) {
        size_t n = ext.size();
        std::vector<long> v(n, 0);
        for (;;) {
            long s = 0;
            for (size_t i = 0; i < n; ++i) s = (s + ext[i] * v[i] % p * v[i]) % p;
            if (v[n - 1] != 0 && s % p == 0) return true;
            size_t k = 0;
            while (k < n && v[k] == p - 1) v[k++] = 0;
            if (k == n) break;
            ++v[k];
        }
    }
    return brute_isotropic_gfp(cs, p);
}

std::mt19937_64 rng(20260819);

long rand_coeff(long lo, long hi) {
    std::uniform_int_distribution<long> d(lo, hi);
    long c = d(rng);
    return c == 0 ? 1 : c;
}

} // namespace

TEST_CASE("rational isotropy agrees with brute-force search") {
    FieldPtr Q = make_rationals();
    // Anisotropic reference points checked by hand via local conditions.
    CHECK(is_isotropic(make_form_ints(Q, {1, 1, -3})).status == Truth::Refuted);
    CHECK(is_isotropic(make_form_ints(Q, {1, 1, 1})).status == Truth::Refuted);
    CHECK(is_isotropic(make_form_ints(Q, {1, -2})).status == Truth::Refuted);
    CHECK(is_isotropic(make_form_ints(Q, {2, -2})).status == Truth::Proven);

    int proven = 0, refuted = 0;
    for (int iter = 0; iter < 300; ++iter) {
        size_t n = 2 + (size_t)(rng() % 3);
        std::vector<long> cs;
        for (size_t i = 0; i < n; ++i) cs.push_back(rand_coeff(-9, 9));
        QuadForm f = make_form_ints(Q, cs);
        IsoResult r = is_isotropic(f);
        REQUIRE(r.status != Truth::Unknown);
        auto brute = brute_isotropic_ints(cs, 8);
        if (brute) {
            // A small zero exists, so the decision must be Proven.
            CHECK(r.status == Truth::Proven);
        }
        if (r.status == Truth::Proven) {
            ++proven;
            REQUIRE(r.witness.has_value());
            CHECK_FALSE(vec_is_zero(*r.witness));
            CHECK(fe_is_zero(evaluate(f, *r.witness)));
        } else {
            ++refuted;
            CHECK_FALSE(brute.has_value());
        }
    }
    // The sample must exercise both outcomes.
    CHECK(proven > 50);
    CHECK(refuted > 50);
}

TEST_CASE("prime field isotropy matches the exhaustive oracle") {
    for (long p : {3L, 5L, 7L, 11L}) {
        FieldPtr F = make_prime_field(p);
        for (int iter = 0; iter < 60; ++iter) {
            size_t n = 2 + (size_t)(rng() % 3);
            std::vector<long> cs;
            for (size_t i = 0; i < n; ++i) cs.push_back(1 + (long)(rng() % (p - 1)));
            QuadForm f = make_form_ints(F, cs);
            IsoResult r = is_isotropic(f);
            bool oracle = brute_isotropic_gfp(cs, p);
            CHECK((r.status == Truth::Proven) == oracle);
            if (r.witness) {
                CHECK_FALSE(vec_is_zero(*r.witness));
                CHECK(fe_is_zero(evaluate(f, *r.witness)));
            }
            if (r.status == Truth::Proven) CHECK(r.witness.has_value());
        }
        // Dimension >= 3 over a finite field is always isotropic.
        CHECK(is_isotropic(make_form_ints(F, {1, 1, 1})).status == Truth::Proven);
    }
}

TEST_CASE("representation round-trips over the rationals") {
    FieldPtr Q = make_rationals();
    for (int iter = 0; iter < 120; ++iter) {
        size_t n = 1 + (size_t)(rng() % 4);
        std::vector<long> cs;
        for (size_t i = 0; i < n; ++i) cs.push_back(rand_coeff(-9, 9));
        QuadForm f = make_form_ints(Q, cs);
        // Evaluate at a random vector to get a guaranteed-represented value.
        Vec v;
        for (size_t i = 0; i < n; ++i) v.push_back(fe_from_int(Q, (long)(rng() % 7) - 3));
        FieldElem c = evaluate(f, v);
        if (fe_is_zero(c)) continue;
        RepResult r = represents(f, c);
        REQUIRE(r.status == Truth::Proven);
        REQUIRE(r.witness.has_value());
        CHECK(fe_eq(evaluate(f, *r.witness), c));
    }
    // Values that are not represented.
    CHECK(represents(make_form_ints(Q, {1, 1}), fe_from_int(Q, -1)).status == Truth::Refuted);
    CHECK(represents(make_form_ints(Q, {1, 1, 1}), fe_from_int(Q, 7)).status == Truth::Refuted);
    CHECK(represents(make_form_ints(Q, {1}), fe_from_int(Q, 2)).status == Truth::Refuted);
    CHECK(represents(make_form_ints(Q, {1, 1, 1}), fe_from_int(Q, 6)).status == Truth::Proven);
}

TEST_CASE("representation matches the exhaustive oracle over GF(p)") {
    for (long p : {3L, 5L, 7L}) {
        FieldPtr F = make_prime_field(p);
        for (int iter = 0; iter < 40; ++iter) {
            size_t n = 1 + (size_t)(rng() % 3);
            std::vector<long> cs;
            for (size_t i = 0; i < n; ++i) cs.push_back(1 + (long)(rng() % (p - 1)));
            long c = 1 + (long)(rng() % (p - 1));
            QuadForm f = make_form_ints(F, cs);
            RepResult r = represents(f, fe_from_int(F, c));
            CHECK((r.status == Truth::Proven) == brute_represents_gfp(cs, c, p));
            if (r.status == Truth::Proven) {
                REQUIRE(r.witness.has_value());
                CHECK(fe_eq(evaluate(f, *r.witness), fe_from_int(F, c)));
            }
        }
    }
}

TEST_CASE("Witt decomposition laws") {
    FieldPtr Q = make_rationals();
    for (int iter = 0; iter < 80; ++iter) {
        size_t n = 2 + (size_t)(rng() % 4);
        std::vector<long> cs;
        for (size_t i = 0; i < n; ++i) cs.push_back(rand_coeff(-9, 9));
        QuadForm f = make_form_ints(Q, cs);
        WittDecomposition w = witt_decompose(f);
        REQUIRE(w.decided);
        CHECK(form_dim(w.kernel) + 2 * w.index == n);
        // The kernel is anisotropic.
        if (form_dim(w.kernel) >= 2)
            CHECK(is_isotropic(w.kernel).status == Truth::Refuted);
        // kernel + index * H is isometric to the original form.
        QuadForm rebuilt = orth_sum(w.kernel, hyperbolic_planes(Q, w.index));
        CHECK(is_isometric(f, rebuilt) == Truth::Proven);
        // Adding a hyperbolic plane bumps the index by exactly one.
        WittDecomposition w2 = witt_decompose(orth_sum(f, hyperbolic_plane(Q)));
        CHECK(w2.index == w.index + 1);
        // f + (-f) is split.
        std::vector<long> neg;
        for (long c : cs) neg.push_back(-c);
        WittDecomposition ws = witt_decompose(orth_sum(f, make_form_ints(Q, neg)));
        CHECK(ws.index == n);
    }
    for (long p : {3L, 5L, 7L}) {
        FieldPtr F = make_prime_field(p);
        for (int iter = 0; iter < 30; ++iter) {
            size_t n = 2 + (size_t)(rng() % 3);
            std::vector<long> cs;
            for (size_t i = 0; i < n; ++i) cs.push_back(1 + (long)(rng() % (p - 1)));
            QuadForm f = make_form_ints(F, cs);
            WittDecomposition w = witt_decompose(f);
            REQUIRE(w.decided);
            CHECK(form_dim(w.kernel) + 2 * w.index == n);
            if (form_dim(w.kernel) >= 2)
                CHECK(is_isotropic(w.kernel).status == Truth::Refuted);
            CHECK(is_isometric(f, orth_sum(w.kernel, hyperbolic_planes(F, w.index))) ==
                  Truth::Proven);
        }
    }
}

TEST_CASE("rational isometry invariants") {
    FieldPtr Q = make_rationals();
    CHECK(is_isometric(make_form_ints(Q, {1, -1}), make_form_ints(Q, {2, -2})) == Truth::Proven);
    CHECK(is_isometric(make_form_ints(Q, {1, 1}), make_form_ints(Q, {1, -1})) == Truth::Refuted);
    CHECK(is_isometric(make_form_ints(Q, {1, 1}), make_form_ints(Q, {2, 2})) == Truth::Proven);
    CHECK(is_isometric(make_form_ints(Q, {1, 1}), make_form_ints(Q, {3, 3})) == Truth::Refuted);
    CHECK(is_isometric(make_form_ints(Q, {1, 2}), make_form_ints(Q, {3, 6})) == Truth::Proven);
    CHECK(is_isometric(make_form_ints(Q, {1, 2}), make_form_ints(Q, {1, 3})) == Truth::Refuted);
    // Same determinant class and signature, different local invariants at 2
    // and 3: 2x^2 + 3y^2 = 1 has no rational solution.
    CHECK(is_isometric(make_form_ints(Q, {1, 6}), make_form_ints(Q, {2, 3})) == Truth::Refuted);
    // Isometry is invariant under permutations and square scalings.
    for (int iter = 0; iter < 50; ++iter) {
        size_t n = 2 + (size_t)(rng() % 3);
        std::vector<long> cs;
        for (size_t i = 0; i < n; ++i) cs.push_back(rand_coeff(-9, 9));
        std::vector<long> shuffled = cs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        for (long& c : shuffled) c *= (long)(1 + rng() % 3) * (long)(1 + rng() % 3);
        // shuffled scaled each slot by a square only when the factor repeats;
        // redo properly: scale slot i by k^2.
        shuffled = cs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        for (long& c : shuffled) {
            long k = 1 + (long)(rng() % 3);
            c *= k * k;
        }
        CHECK(is_isometric(make_form_ints(Q, cs), make_form_ints(Q, shuffled)) == Truth::Proven);
    }
}

TEST_CASE("Laurent tower isotropy via residue forms") {
    FieldPtr F3 = make_prime_field(3);
    FieldPtr F3XY = make_laurent_tower(F3, {"X", "Y"});
    FieldElem X = tower_monomial(F3XY, {1, 0}, fe_one(F3));
    FieldElem Y = tower_monomial(F3XY, {0, 1}, fe_one(F3));
    FieldElem XY = fe_mul(X, Y);

    // <X, Y, XY> over GF(3)((X))((Y)): residues <X> and <1, X> over
    // GF(3)((X)) are both anisotropic.
    QuadForm f = make_form(F3XY, {X, Y, XY});
    CHECK(is_isotropic(f).status == Truth::Refuted);

    // <1, -1> splits regardless of the tower.
    CHECK(is_isotropic(make_form(F3XY, {fe_one(F3XY), fe_neg(fe_one(F3XY))})).status ==
          Truth::Proven);

    // <1, 1> over GF(3)((X))((Y)): residue <1, 1> over GF(3)((X)) descends to
    // GF(3) where it is isotropic (1 + 1 + 1 = 0 has no... check: x^2+y^2=0
    // with x=1: y^2=-1=2, squares mod 3 are {0,1}, so anisotropic).
    CHECK(is_isotropic(make_form_ints(F3XY, {1, 1})).status == Truth::Refuted);

    FieldPtr F5 = make_prime_field(5);
    FieldPtr F5t = make_laurent_tower(F5, {"t"});
    // <1, 1> over GF(5)((t)): squares mod 5 are {0,1,4}; -1 = 4 is a square.
    CHECK(is_isotropic(make_form_ints(F5t, {1, 1})).status == Truth::Proven);
    // <1, t> anisotropic by valuation parity.
    FieldElem t = tower_monomial(F5t, {1}, fe_one(F5));
    CHECK(is_isotropic(make_form(F5t, {fe_one(F5t), t})).status == Truth::Refuted);

    // <1, -(1+t)> is isotropic (1+t is a square by residue lifting) but has
    // no finite Laurent witness; the decision is still exact.
    FieldElem one_plus_t = fe_add(fe_one(F5t), t);
    IsoResult r = is_isotropic(make_form(F5t, {fe_one(F5t), fe_neg(one_plus_t)}));
    CHECK(r.status == Truth::Proven);
    CHECK_FALSE(r.witness.has_value());
}

TEST_CASE("Laurent tower Witt decomposition and isometry") {
    FieldPtr F3 = make_prime_field(3);
    FieldPtr F3t = make_laurent_tower(F3, {"t"});
    FieldElem t = tower_monomial(F3t, {1}, fe_one(F3));

    // <1, -1, t> has kernel <t> and index 1.
    QuadForm f = make_form(F3t, {fe_one(F3t), fe_neg(fe_one(F3t)), t});
    WittDecomposition w = witt_decompose(f);
    REQUIRE(w.decided);
    CHECK(w.index == 1);
    REQUIRE(form_dim(w.kernel) == 1);
    CHECK(same_square_class(w.kernel.coeffs[0], t));

    // <1, -1> and <t, -t> are isometric (both hyperbolic) although their
    // residue splits differ before decomposition.
    QuadForm h1 = make_form(F3t, {fe_one(F3t), fe_neg(fe_one(F3t))});
    QuadForm h2 = make_form(F3t, {t, fe_neg(t)});
    CHECK(is_isometric(h1, h2) == Truth::Proven);
    CHECK(is_hyperbolic(h1) == Truth::Proven);
    CHECK(is_hyperbolic(h2) == Truth::Proven);

    // <1, t> vs <1, 2t>: kernels differ in the odd part (2 is not a square
    // mod 3).
    QuadForm a = make_form(F3t, {fe_one(F3t), t});
    QuadForm b = make_form(F3t, {fe_one(F3t), fe_mul(fe_from_int(F3t, 2), t)});
    CHECK(is_isometric(a, b) == Truth::Refuted);
    CHECK(is_isometric(a, a) == Truth::Proven);

    // Exhaustive square-class cross-check over GF(3)((t)) in dimension 2:
    // forms <c1, c2> indexed by class reps {1, 2, t, 2t}.
    ClassGroup g = class_group(F3t);
    REQUIRE(g.finite);
    REQUIRE(g.elems.size() == 4);
    for (const SquareClass& c1 : g.elems)
        for (const SquareClass& c2 : g.elems) {
            QuadForm u = make_form(F3t, {c1.rep, c2.rep});
            // Isometry must be reflexive and decided.
            CHECK(is_isometric(u, u) == Truth::Proven);
            IsoResult iso = is_isotropic(u);
            CHECK(iso.status != Truth::Unknown);
            // Binary isotropy iff -c1c2 is a square.
            CHECK((iso.status == Truth::Proven) == fe_is_square(fe_neg(fe_mul(c1.rep, c2.rep))));
        }
}

TEST_CASE("tower representation agrees with residue criteria") {
    FieldPtr F5 = make_prime_field(5);
    FieldPtr F5t = make_laurent_tower(F5, {"t"});
    FieldElem t = tower_monomial(F5t, {1}, fe_one(F5));
    QuadForm f = make_form(F5t, {fe_one(F5t), t});   // <1, t>
    // Represented: squares, t * squares, 2 (= 1 + ... no: <1,t> represents
    // u^2 and t u^2 classes plus sums; 1 and t are immediate).
    CHECK(represents(f, fe_one(F5t)).status == Truth::Proven);
    CHECK(represents(f, t).status == Truth::Proven);
    CHECK(represents(f, fe_from_int(F5t, 4)).status == Truth::Proven);
    // 2 is a nonsquare mod 5; <1, t, -2> has residues <1, -2> and <t>:
    // <1, -2> anisotropic over GF(5), so not represented.
    CHECK(represents(f, fe_from_int(F5t, 2)).status == Truth::Refuted);
    CHECK(represents(f, fe_mul(fe_from_int(F5t, 2), t)).status == Truth::Refuted);
}

TEST_CASE("rational function field partial decisions") {
    FieldPtr Q = make_rationals();
    FieldPtr QX = make_rational_functions(Q, {"X"});
    Poly X = poly_var(QX->base, {"X"}, "X");
    FieldElem x = fe_from_poly(QX, X);

    // Constant forms decide over the base field and lift witnesses.
    QuadForm cf = make_form_ints(QX, {1, 1, -2});
    IsoResult r = is_isotropic(cf);
    CHECK(r.status == Truth::Proven);
    REQUIRE(r.witness.has_value());
    CHECK(fe_is_zero(evaluate(cf, *r.witness)));
    CHECK(is_isotropic(make_form_ints(QX, {1, 1, 3})).status == Truth::Refuted);

    // Binary forms decide exactly: <X, -X> isotropic, <1, -X> not.
    QuadForm hx = make_form(QX, {x, fe_neg(x)});
    IsoResult rh = is_isotropic(hx);
    CHECK(rh.status == Truth::Proven);
    REQUIRE(rh.witness.has_value());
    CHECK(fe_is_zero(evaluate(hx, *rh.witness)));
    CHECK(is_isotropic(make_form(QX, {fe_one(QX), fe_neg(x)})).status == Truth::Refuted);

    // <1, -X^2> is isotropic with an exact square-root witness.
    FieldElem x2 = fe_mul(x, x);
    IsoResult rs = is_isotropic(make_form(QX, {fe_one(QX), fe_neg(x2)}));
    CHECK(rs.status == Truth::Proven);
    REQUIRE(rs.witness.has_value());

    // Nonconstant ternary with no syntactic hit: honestly Unknown.
    CHECK(is_isotropic(make_form(QX, {fe_one(QX), x, fe_neg(fe_add(x, fe_one(QX)))})).status ==
          Truth::Unknown);

    // Over GF(p)(X) dimension 5 is always isotropic.
    FieldPtr F7 = make_prime_field(7);
    FieldPtr F7X = make_rational_functions(F7, {"X"});
    FieldElem y = fe_from_poly(F7X, poly_var(F7X->base, {"X"}, "X"));
    QuadForm big = make_form(F7X, {fe_one(F7X), y, fe_add(y, fe_one(F7X)), fe_mul(y, y),
                                   fe_add(fe_mul(y, y), y)});
    CHECK(is_isotropic(big).status == Truth::Proven);

    // Witt decomposition strips exact hyperbolic pairs.
    WittDecomposition w = witt_decompose(make_form(QX, {x, fe_neg(x), fe_one(QX)}));
    REQUIRE(w.decided);
    CHECK(w.index == 1);
    CHECK(form_dim(w.kernel) == 1);

    // Constant forms route through the base Witt decomposition, which the
    // greedy pair scan would undercount.
    WittDecomposition wc = witt_decompose(make_form_ints(QX, {1, 1, -2}));
    REQUIRE(wc.decided);
    CHECK(wc.index == 1);
}

TEST_CASE("subform peeling") {
    FieldPtr Q = make_rationals();
    QuadForm big = make_form_ints(Q, {1, 1, 1, 1});
    CHECK(is_subform(make_form_ints(Q, {1, 1}), big) == Truth::Proven);
    CHECK(is_subform(make_form_ints(Q, {2, 2}), big) == Truth::Proven);
    CHECK(is_subform(make_form_ints(Q, {-1}), big) == Truth::Refuted);
    CHECK(is_subform(make_form_ints(Q, {1, -1}), big) == Truth::Refuted);
    CHECK(is_subform(big, big) == Truth::Proven);
    CHECK(is_subform(make_form_ints(Q, {1, 1, 1, 1, 1}), big) == Truth::Refuted);
    // <2, 3> sits inside <1, 1, 1, 1, 1, 1> (2 = 1+1, then 3 = 1+1+1 in the
    // complement); the peeling must find it.
    CHECK(is_subform(make_form_ints(Q, {2, 3}), make_form_ints(Q, {1, 1, 1, 1, 1, 1})) ==
          Truth::Proven);
    // Any binary form sits inside a split form of enough dimension.
    CHECK(is_subform(make_form_ints(Q, {7, -5}), hyperbolic_planes(Q, 2)) == Truth::Proven);

    for (long p : {3L, 5L}) {
        FieldPtr F = make_prime_field(p);
        QuadForm sup = make_form_ints(F, {1, 1, 2});
        for (long c1 = 1; c1 < p; ++c1)
            for (long c2 = 1; c2 < p; ++c2) {
                // Dimension-3 forms over GF(p) are universal and any binary
                // form embeds into any ternary form sharing... not a theorem;
                // just check consistency with direct isometry enumeration.
                QuadForm sub = make_form_ints(F, {c1, c2});
                Truth got = is_subform(sub, sup);
                REQUIRE(got != Truth::Unknown);
                // Oracle: sub embeds iff sup = sub + <d> for some d, i.e.
                // some d with det matching and sup isometric to sub + <d>.
                bool oracle = false;
                for (long d = 1; d < p && !oracle; ++d)
                    oracle = is_isometric(orth_sum(sub, make_form_ints(F, {d})), sup) ==
                             Truth::Proven;
                CHECK((got == Truth::Proven) == oracle);
            }
    }
}

TEST_CASE("similarity detection") {
    FieldPtr Q = make_rationals();
    for (int iter = 0; iter < 40; ++iter) {
        size_t n = 1 + (size_t)(rng() % 3);
        std::vector<long> cs;
        for (size_t i = 0; i < n; ++i) cs.push_back(rand_coeff(-9, 9));
        QuadForm f = make_form_ints(Q, cs);
        long k = rand_coeff(-6, 6);
        CHECK(is_similar(f, scale_form(fe_from_int(Q, k), f)) == Truth::Proven);
    }
    CHECK(is_similar(make_form_ints(Q, {1, 1}), make_form_ints(Q, {1, -1})) == Truth::Refuted);
    CHECK(is_similar(make_form_ints(Q, {1, 1, 1}), make_form_ints(Q, {2, 2, 3})) == Truth::Refuted);
    CHECK(is_similar(make_form_ints(Q, {1, 2}), make_form_ints(Q, {3, 6})) == Truth::Proven);

    FieldPtr F5 = make_prime_field(5);
    // Exhaustive over GF(5) dimension 2: similarity iff some scalar works.
    for (long a1 = 1; a1 < 5; ++a1)
        for (long a2 = 1; a2 < 5; ++a2)
            for (long b1 = 1; b1 < 5; ++b1)
                for (long b2 = 1; b2 < 5; ++b2) {
                    QuadForm fa = make_form_ints(F5, {a1, a2});
                    QuadForm fb = make_form_ints(F5, {b1, b2});
                    bool oracle = false;
                    for (long c = 1; c < 5 && !oracle; ++c)
                        oracle = is_isometric(fa, scale_form(fe_from_int(F5, c), fb)) ==
                                 Truth::Proven;
                    Truth got = is_similar(fa, fb);
                    REQUIRE(got != Truth::Unknown);
                    CHECK((got == Truth::Proven) == oracle);
                }
}

TEST_CASE("Pfister forms expand multiplicatively") {
    FieldPtr F3 = make_prime_field(3);
    FieldPtr F3XY = make_laurent_tower(F3, {"X", "Y"});
    FieldElem X = tower_monomial(F3XY, {1, 0}, fe_one(F3));
    FieldElem Y = tower_monomial(F3XY, {0, 1}, fe_one(F3));
    // <<-X, -Y>> = <1, X> x <1, Y> = <1, X, Y, XY>.
    QuadForm pf = pfister_form(F3XY, {fe_neg(X), fe_neg(Y)});
    REQUIRE(form_dim(pf) == 4);
    QuadForm expect = make_form(F3XY, {fe_one(F3XY), X, Y, fe_mul(X, Y)});
    // Coefficients agree slotwise up to ordering.
    CHECK(is_isometric(pf, expect) == Truth::Proven);

    FieldPtr Q = make_rationals();
    // <<a>> = <1, -a>; <<a, b>> = <1, -a, -b, ab>.
    QuadForm p1 = pfister_form(Q, {fe_from_int(Q, 5)});
    CHECK(form_dim(p1) == 2);
    CHECK(fe_eq(p1.coeffs[1], fe_from_int(Q, -5)));
    QuadForm p2 = pfister_form(Q, {fe_from_int(Q, 2), fe_from_int(Q, 3)});
    CHECK(is_isometric(p2, make_form_ints(Q, {1, -2, -3, 6})) == Truth::Proven);
    // Isotropic Pfister forms are hyperbolic.
    QuadForm p3 = pfister_form(Q, {fe_from_int(Q, 1)});   // <1, -1>
    CHECK(is_hyperbolic(p3) == Truth::Proven);
    QuadForm p4 = pfister_form(Q, {fe_from_int(Q, 2), fe_from_int(Q, -1)});
    WittDecomposition w4 = witt_decompose(p4);
    REQUIRE(w4.decided);
    if (is_isotropic(p4).status == Truth::Proven) CHECK(form_dim(w4.kernel) == 0);
}

TEST_CASE("Gram diagonalization") {
    FieldPtr Q = make_rationals();
    for (int iter = 0; iter < 60; ++iter) {
        size_t n = 2 + (size_t)(rng() % 3);
        Matrix g(n, Vec(n, fe_zero(Q)));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i; j < n; ++j) {
                long v = (long)(rng() % 11) - 5;
                g[i][j] = fe_from_int(Q, v);
                g[j][i] = g[i][j];
            }
        DiagonalizedForm d;
        try {
            d = gram_diagonalize(Q, g);
        } catch (const DegenerateForm&) {
            continue;
        }
        // B^T G B must be the claimed diagonal.
        Matrix bt = mat_transpose(d.basis);
        Matrix m = mat_mul(mat_mul(bt, g), d.basis);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                if (i == j)
                    CHECK(fe_eq(m[i][j], d.form.coeffs[i]));
                else
                    CHECK(fe_is_zero(m[i][j]));
            }
    }
    // All-zero diagonal needs the off-diagonal pivot path.
    Matrix h(2, Vec(2, fe_zero(Q)));
    h[0][1] = fe_one(Q);
    h[1][0] = fe_one(Q);
    DiagonalizedForm dh = gram_diagonalize(Q, h);
    CHECK(form_dim(dh.form) == 2);
    CHECK(is_isotropic(make_form(Q, dh.form.coeffs)).status == Truth::Proven);
    // Singular matrices are rejected.
    Matrix s(2, Vec(2, fe_zero(Q)));
    s[0][0] = fe_one(Q);
    CHECK_THROWS_AS(gram_diagonalize(Q, s), DegenerateForm);
}

TEST_CASE("Hilbert symbol laws") {
    std::vector<BigRat> vals;
    for (long v : {1, -1, 2, -2, 3, 5, 6, 7, 10, 15, 30, -30}) vals.push_back(BigRat(v));
    std::vector<Place> places{infinite_place()};
    for (long p : {2, 3, 5, 7}) places.push_back(finite_place(BigInt(p)));
    for (const Place& v : places)
        for (const BigRat& a : vals)
            for (const BigRat& b : vals) {
                int hab = hilbert_symbol(a, b, v);
                CHECK((hab == 1 || hab == -1));
                // Symmetry.
                CHECK(hab == hilbert_symbol(b, a, v));
                // Bilinearity in the first slot.
                for (const BigRat& c : vals)
                    CHECK(hilbert_symbol(a * c, b, v) ==
                          hab * hilbert_symbol(c, b, v));
                // (a, -a) = 1.
                CHECK(hilbert_symbol(a, -a, v) == 1);
            }
    // (a, 1 - a) = 1 whenever both sides are nonzero.
    for (long a : {-5, -2, 2, 3, 5, 7})
        for (const Place& v : places)
            CHECK(hilbert_symbol(BigRat(a), BigRat(1 - a), v) == 1);
    // Product formula over all places of the support.
    std::mt19937_64 prng(7);
    for (int iter = 0; iter < 200; ++iter) {
        long a = (long)(prng() % 200) - 100;
        long b = (long)(prng() % 200) - 100;
        if (a == 0 || b == 0) continue;
        std::vector<Place> supp = rational_support({BigRat(a), BigRat(b)});
        int prod = 1;
        for (const Place& v : supp) prod *= hilbert_symbol(BigRat(a), BigRat(b), v);
        CHECK(prod == 1);
    }
}

TEST_CASE("ternary descent solves random isotropic forms") {
    std::mt19937_64 prng(99);
    int solved = 0;
    for (int iter = 0; iter < 4000 && solved < 120; ++iter) {
        long a = (long)(prng() % 60) - 30;
        long b = (long)(prng() % 60) - 30;
        long c = (long)(prng() % 60) - 30;
        if (a == 0 || b == 0 || c == 0) continue;
        std::vector<BigRat> cs{BigRat(a), BigRat(b), BigRat(c)};
        if (!is_isotropic_rationals(cs)) continue;
        auto sol = solve_ternary_rationals(cs[0], cs[1], cs[2]);
        BigRat s = cs[0] * sol[0] * sol[0] + cs[1] * sol[1] * sol[1] + cs[2] * sol[2] * sol[2];
        CHECK(s == 0);
        CHECK((sol[0] != 0 || sol[1] != 0 || sol[2] != 0));
        ++solved;
    }
    CHECK(solved >= 120);
}

TEST_CASE("evaluate matches polynomial substitution") {
    FieldPtr Q = make_rationals();
    QuadForm f = make_form_ints(Q, {2, -3, 5});
    std::vector<std::string> vars{"u", "v", "w"};
    std::vector<Poly> subst;
    for (const std::string& s : vars) subst.push_back(poly_var(Q, vars, s));
    Poly pf = evaluate_poly(f, subst);
    // pf = 2u^2 - 3v^2 + 5w^2; check a few points.
    for (long u = -2; u <= 2; ++u)
        for (long v = -2; v <= 2; ++v) {
            Vec pt{fe_from_int(Q, u), fe_from_int(Q, v), fe_from_int(Q, 1)};
            FieldElem direct = evaluate(f, pt);
            FieldElem via = poly_eval(pf, pt);
            CHECK(fe_eq(direct, via));
        }
}
