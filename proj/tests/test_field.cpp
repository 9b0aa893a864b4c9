// Field tower, element arithmetic, and polynomial algebra tests.

#include <catch2/catch_amalgamated.hpp>

#include "qforma/algebra.hpp"

using namespace qforma;

namespace {

Poly P(const FieldPtr& cf, std::vector<std::string> vars) { return poly_zero(cf, std::move(vars)); }

// Term builder: exponents paired with an integer coefficient.
Poly term(const Poly& ring, std::vector<int> exps, long c) {
    Poly t = poly_zero(ring.coeff_field, ring.vars);
    FieldElem cc = fe_from_int(ring.coeff_field, c);
    if (!fe_is_zero(cc)) t.terms.emplace(Exps(exps.begin(), exps.end()), cc);
    return t;
}

} // namespace

TEST_CASE("field construction and validation") {
    FieldPtr q = make_rationals();
    FieldPtr f7 = make_prime_field(7);
    CHECK(field_to_string(*q) == "QQ");
    CHECK(field_to_string(*f7) == "GF(7)");
    CHECK_THROWS_AS(make_prime_field(2), ConstructionError);
    CHECK_THROWS_AS(make_prime_field(9), ConstructionError);
    CHECK_THROWS_AS(make_prime_field(-3), ConstructionError);

    FieldPtr tower = make_laurent_tower(make_prime_field(3), {"X", "Y"});
    CHECK(field_to_string(*tower) == "GF(3)((X))((Y))");
    CHECK_THROWS_AS(make_laurent_tower(q, {"X", "X"}), ConstructionError);
    CHECK_THROWS_AS(make_laurent_tower(make_laurent_tower(q, {"X"}), {"X"}), ConstructionError);

    FieldPtr ff = make_rational_functions(q, {"X1", "X2"});
    CHECK(field_to_string(*ff) == "QQ(X1,X2)");
    CHECK_THROWS_AS(make_rational_functions(tower, {"Z"}), UnsupportedField);

    CHECK(field_eq(make_prime_field(7), f7));
    CHECK(!field_eq(f7, make_prime_field(5)));
    CHECK(has_finite_class_group(*tower));
    CHECK(!has_finite_class_group(*make_laurent_tower(q, {"T"})));
}

TEST_CASE("rational and prime field arithmetic") {
    FieldPtr q = make_rationals();
    FieldElem a = fe_from_rat(q, BigRat(3, 4));
    FieldElem b = fe_from_rat(q, BigRat(1, 4));
    CHECK(fe_eq(fe_add(a, b), fe_one(q)));
    CHECK(fe_eq(fe_div(a, b), fe_from_int(q, 3)));
    CHECK_THROWS_AS(fe_div(a, fe_zero(q)), DivisionByZero);

    FieldPtr f7 = make_prime_field(7);
    FieldElem x = fe_from_int(f7, 3);
    CHECK(fe_eq(fe_mul(x, fe_inv(x)), fe_one(f7)));
    CHECK(fe_eq(fe_from_int(f7, 10), fe_from_int(f7, 3)));
    CHECK(fe_eq(fe_from_rat(f7, BigRat(1, 2)), fe_from_int(f7, 4)));   // 1/2 = 4 mod 7
    CHECK_THROWS_AS(fe_add(x, fe_from_int(make_prime_field(5), 1)), FieldMismatch);

    // Squares mod 7 are {1, 2, 4}; the smallest nonresidue is 3.
    std::set<long> sq;
    for (long v = 1; v < 7; ++v)
        if (fe_is_square(fe_from_int(f7, v))) sq.insert(v);
    CHECK(sq == std::set<long>{1, 2, 4});
    CHECK(fe_eq(square_class(fe_from_int(f7, 2)).rep, fe_one(f7)));
    CHECK(fe_eq(square_class(fe_from_int(f7, 5)).rep, fe_from_int(f7, 3)));
}

TEST_CASE("rational squares and square classes") {
    FieldPtr q = make_rationals();
    CHECK(fe_is_square(fe_from_rat(q, BigRat(4, 9))));
    CHECK(!fe_is_square(fe_from_rat(q, BigRat(2))));
    CHECK(!fe_is_square(fe_from_int(q, -1)));
    CHECK(fe_eq(square_class(fe_from_rat(q, BigRat(8, 9))).rep, fe_from_int(q, 2)));
    CHECK(fe_eq(square_class(fe_from_int(q, -12)).rep, fe_from_int(q, -3)));
    CHECK_THROWS_AS(square_class(fe_zero(q)), ZeroInput);
    CHECK(!class_group(q).finite);
}

TEST_CASE("Laurent tower arithmetic and division") {
    FieldPtr k = make_laurent_tower(make_prime_field(3), {"t"});
    FieldElem t = tower_monomial(k, {1}, fe_one(k->base));
    FieldElem one = fe_one(k);
    FieldElem u = fe_add(one, t);                       // 1 + t
    FieldElem v = fe_sub(one, t);                       // 1 - t
    FieldElem w = fe_mul(u, v);                         // 1 - t^2
    CHECK(fe_eq(fe_div(w, u), v));
    CHECK(fe_eq(fe_div(w, v), u));
    CHECK_THROWS_AS(fe_div(one, u), InexactDivision);   // 1/(1+t) is an infinite series
    CHECK_THROWS_AS(fe_div(u, fe_zero(k)), DivisionByZero);

    CHECK(valuation(fe_mul(t, w), "t") == 1);
    CHECK(valuation(fe_div(one, t), "t") == -1);
    CHECK_THROWS_AS(valuation(fe_zero(k), "t"), ZeroInput);
    CHECK_THROWS_AS(valuation(u, "s"), NotTowerVariable);

    // Valuation is additive on products.
    FieldElem a = fe_mul(t, u);
    FieldElem b = fe_mul(fe_div(one, fe_mul(t, t)), v);
    CHECK(valuation(fe_mul(a, b), "t") == valuation(a, "t") + valuation(b, "t"));
}

TEST_CASE("Laurent tower squares") {
    FieldPtr k = make_laurent_tower(make_prime_field(3), {"t"});
    FieldElem t = tower_monomial(k, {1}, fe_one(k->base));
    FieldElem one = fe_one(k);
    CHECK(fe_is_square(fe_mul(t, t)));
    CHECK(!fe_is_square(t));
    CHECK(!fe_is_square(fe_mul(fe_from_int(k, 2), fe_mul(t, t))));   // 2 is not a square mod 3
    CHECK(fe_is_square(fe_add(one, t)));                             // unit with square residue
    FieldElem s = fe_add(one, fe_mul(t, t));
    CHECK(fe_is_square(fe_mul(s, fe_mul(t, t))));
}

TEST_CASE("square class group of an iterated tower") {
    FieldPtr k = make_laurent_tower(make_prime_field(3), {"X", "Y"});
    ClassGroup g = class_group(k);
    REQUIRE(g.finite);
    CHECK(g.elems.size() == 8);   // {1,2} x {1,X} x {1,Y}

    // Representatives are distinct classes and closed under multiplication.
    for (auto& c1 : g.elems) {
        for (auto& c2 : g.elems) {
            SquareClass prod = square_class(fe_mul(c1.rep, c2.rep));
            CHECK(std::count(g.elems.begin(), g.elems.end(), prod) == 1);
        }
    }

    // X^3 Y^2 lands in the class of X.
    FieldElem m = tower_monomial(k, {3, 2}, fe_one(k->base));
    FieldElem x = tower_monomial(k, {1, 0}, fe_one(k->base));
    CHECK(same_square_class(m, x));
    CHECK(!same_square_class(m, tower_monomial(k, {0, 1}, fe_one(k->base))));

    // The same field built as a tower over a tower has the same class count.
    FieldPtr nested = make_laurent_tower(make_laurent_tower(make_prime_field(3), {"X"}), {"Y"});
    CHECK(class_group(nested).elems.size() == 8);
}

TEST_CASE("square class canonicality and homomorphism") {
    FieldPtr k = make_laurent_tower(make_prime_field(5), {"t"});
    FieldElem t = tower_monomial(k, {1}, fe_one(k->base));
    std::vector<FieldElem> samples;
    for (long c0 = 1; c0 < 5; ++c0) {
        for (long c1 = 0; c1 < 5; ++c1) {
            FieldElem e = fe_add(fe_from_int(k, c0), fe_mul(fe_from_int(k, c1), t));
            samples.push_back(fe_mul(e, t));
            samples.push_back(e);
        }
    }
    for (auto& a : samples) {
        SquareClass ca = square_class(a);
        CHECK(fe_eq(square_class(ca.rep).rep, ca.rep));          // idempotent
        CHECK(same_square_class(a, ca.rep));                     // representative is in the class
        for (auto& b : samples) {
            SquareClass cab = square_class(fe_mul(a, b));
            SquareClass prod = square_class(fe_mul(ca.rep, square_class(b).rep));
            CHECK(fe_eq(cab.rep, prod.rep));                     // multiplicative
        }
    }
}

TEST_CASE("polynomial arithmetic and division") {
    FieldPtr q = make_rationals();
    Poly ring = P(q, {"X", "Y"});
    Poly x = poly_var(q, ring.vars, "X");
    Poly y = poly_var(q, ring.vars, "Y");
    Poly f = poly_mul(poly_add(x, y), poly_sub(x, y));   // X^2 - Y^2
    CHECK(poly_deg(f, 0) == 2);
    CHECK(poly_deg(f, 1) == 2);
    CHECK(poly_total_deg(f) == 2);
    CHECK(poly_eq(poly_div_exact(f, poly_add(x, y)), poly_sub(x, y)));
    CHECK(!poly_try_div(f, x).has_value());
    CHECK_THROWS_AS(poly_div_exact(f, poly_zero(q, ring.vars)), DivisionByZero);

    // divmod in X by a unitary divisor: X^2*Y + X + 1 mod (X - Y).
    Poly g = poly_add(poly_add(poly_mul(poly_mul(x, x), y), x), term(ring, {0, 0}, 1));
    auto [quo, rem] = poly_divmod_univ(g, poly_sub(x, y), 0);
    Poly expect_rem = poly_add(poly_add(poly_mul(poly_mul(y, y), y), y), term(ring, {0, 0}, 1));
    CHECK(poly_eq(rem, expect_rem));
    CHECK(poly_eq(poly_add(poly_mul(quo, poly_sub(x, y)), rem), g));

    CHECK(poly_eq(poly_derivative(poly_mul(x, poly_mul(y, y)), 1),
                  poly_scale(fe_from_int(q, 2), poly_mul(x, y))));
}

TEST_CASE("polynomial gcd") {
    FieldPtr q = make_rationals();
    std::vector<std::string> vars{"X", "Y"};
    Poly x = poly_var(q, vars, "X");
    Poly y = poly_var(q, vars, "Y");
    Poly a = poly_mul(poly_add(x, y), poly_sub(x, y));
    Poly b = poly_mul(poly_add(x, y), x);
    CHECK(poly_eq(poly_gcd(a, b), poly_add(x, y)));
    CHECK(poly_eq(poly_gcd(a, poly_zero(q, vars)), poly_monic_lex(a)));

    // Scalar content does not leak into the gcd.
    Poly a2 = poly_scale(fe_from_rat(q, BigRat(3, 2)), a);
    CHECK(poly_eq(poly_gcd(a2, b), poly_add(x, y)));

    // Univariate Euclid over GF(7).
    FieldPtr f7 = make_prime_field(7);
    Poly t = poly_var(f7, {"T"}, "T");
    Poly p1 = poly_add(poly_mul(t, t), term(poly_zero(f7, {"T"}), {0}, -1));   // T^2 - 1
    Poly p2 = poly_add(t, term(poly_zero(f7, {"T"}), {0}, 1));                 // T + 1
    CHECK(poly_eq(poly_gcd(p1, p2), p2));

    // gcd of coprime polynomials is 1.
    Poly one = term(poly_zero(q, vars), {0, 0}, 1);
    CHECK(poly_eq(poly_gcd(poly_add(x, one), poly_add(y, one)), one));
}

TEST_CASE("polynomial square roots") {
    FieldPtr q = make_rationals();
    std::vector<std::string> vars{"X", "Y"};
    Poly x = poly_var(q, vars, "X");
    Poly y = poly_var(q, vars, "Y");
    Poly one = term(poly_zero(q, vars), {0, 0}, 1);

    Poly r = poly_add(poly_add(x, y), one);
    auto s = poly_sqrt(poly_mul(r, r));
    REQUIRE(s.has_value());
    CHECK(poly_eq(poly_mul(*s, *s), poly_mul(r, r)));

    CHECK(!poly_sqrt(x).has_value());
    CHECK(!poly_sqrt(poly_add(poly_mul(x, x), one)).has_value());
    CHECK(!poly_sqrt(poly_scale(fe_from_int(q, -1), poly_mul(x, x))).has_value());
    CHECK(poly_sqrt(poly_scale(fe_from_rat(q, BigRat(9, 4)), poly_mul(x, x))).has_value());

    // Sparse square over GF(7).
    FieldPtr f7 = make_prime_field(7);
    Poly t = poly_var(f7, {"T"}, "T");
    Poly c3 = poly_add(poly_mul(poly_mul(t, t), t), term(poly_zero(f7, {"T"}), {0}, -2));   // T^3 - 2
    Poly sq = poly_mul(c3, c3);
    auto rt = poly_sqrt(sq);
    REQUIRE(rt.has_value());
    CHECK(poly_eq(poly_mul(*rt, *rt), sq));
}

TEST_CASE("squarefree reduction modulo squares") {
    FieldPtr q = make_rationals();
    std::vector<std::string> vars{"X"};
    Poly x = poly_var(q, vars, "X");
    Poly one = term(poly_zero(q, vars), {0}, 1);

    // X^2 (X+1)^3 (X-1) reduces to the class of (X+1)(X-1).
    Poly f = poly_mul(poly_mul(poly_mul(x, x), poly_pow(poly_add(x, one), 3)), poly_sub(x, one));
    Poly sf = poly_squarefree_part(f);
    Poly target = poly_mul(poly_add(x, one), poly_sub(x, one));
    Poly ratio_num = poly_mul(sf, target);
    auto rt = poly_sqrt(poly_scale(fe_inv(ratio_num.terms.begin()->second), ratio_num));
    CHECK(rt.has_value());   // sf * target is a square up to a square scalar

    // Over GF(3), X^3 reduces to the class of X (cube = element times a square).
    FieldPtr f3 = make_prime_field(3);
    Poly t = poly_var(f3, {"T"}, "T");
    Poly s3 = poly_squarefree_part(poly_mul(poly_mul(t, t), t));
    CHECK(poly_eq(poly_monic_lex(s3), t));
}

TEST_CASE("rational function field elements") {
    FieldPtr q = make_rationals();
    FieldPtr ff = make_rational_functions(q, {"X"});
    std::vector<std::string> vars = ff->vars;
    Poly x = poly_var(q, vars, "X");
    Poly one = term(poly_zero(q, vars), {0}, 1);

    // (2X^2 - 2) / (2X - 2) reduces to X + 1.
    Poly numr = poly_scale(fe_from_int(q, 2), poly_sub(poly_mul(x, x), one));
    Poly denr = poly_scale(fe_from_int(q, 2), poly_sub(x, one));
    FieldElem e = fe_from_fraction(ff, numr, denr);
    CHECK(fe_eq(e, fe_from_poly(ff, poly_add(x, one))));
    CHECK(fe_to_string(e) == "X + 1");

    FieldElem inv = fe_inv(e);
    CHECK(fe_eq(fe_mul(e, inv), fe_one(ff)));
    CHECK_THROWS_AS(fe_div(e, fe_zero(ff)), DivisionByZero);

    // Squares: X^2 yes, X no, 4X^2 yes, X^2+1 no, 1/(X^2) yes.
    CHECK(fe_is_square(fe_from_poly(ff, poly_mul(x, x))));
    CHECK(!fe_is_square(fe_from_poly(ff, x)));
    CHECK(fe_is_square(fe_from_poly(ff, poly_scale(fe_from_int(q, 4), poly_mul(x, x)))));
    CHECK(!fe_is_square(fe_from_poly(ff, poly_add(poly_mul(x, x), one))));
    CHECK(fe_is_square(fe_from_fraction(ff, one, poly_mul(x, x))));

    // Square classes: 2(X-1)^2 ~ 2, X^3 ~ X, and representatives are canonical.
    Poly f1 = poly_scale(fe_from_int(q, 2), poly_mul(poly_sub(x, one), poly_sub(x, one)));
    CHECK(fe_eq(square_class(fe_from_poly(ff, f1)).rep, fe_from_int(ff, 2)));
    FieldElem x3 = fe_from_poly(ff, poly_mul(poly_mul(x, x), x));
    CHECK(fe_eq(square_class(x3).rep, fe_from_poly(ff, x)));
    CHECK(same_square_class(x3, fe_from_poly(ff, x)));
    CHECK(!class_group(ff).finite);
}

TEST_CASE("element printing") {
    FieldPtr k = make_laurent_tower(make_prime_field(3), {"X", "Y"});
    FieldElem m = tower_monomial(k, {-1, 2}, fe_from_int(k->base, 2));
    FieldElem e = fe_add(m, fe_one(k));
    CHECK(fe_to_string(e) == "1 + 2*X^-1*Y^2");   // descending lex: X^0 precedes X^-1
    CHECK(fe_to_string(fe_zero(k)) == "0");
    CHECK(fe_to_string(fe_neg(fe_one(make_rationals()))) == "-1");
    CHECK(rat_to_string(BigRat(-3, 7)) == "-3/7");
}
