#include <catch2/catch_amalgamated.hpp>

#include "qforma/stabbir.hpp"

using namespace qforma;

namespace {

FieldPtr rationals() { return make_rationals(); }

FieldPtr gf5_u() { return make_laurent_tower(make_prime_field(5), {"u"}); }

FieldPtr gf3_xy() { return make_laurent_tower(make_prime_field(3), {"X", "Y"}); }

FieldElem var_elem(const FieldPtr& tower, const std::string& name) {
    std::vector<std::string> vars;
    detail::collect_tower_vars(tower, vars);
    Exps e(tower->vars.size(), 0);
    auto it = std::find(tower->vars.begin(), tower->vars.end(), name);
    if (it != tower->vars.end()) {
        e[static_cast<size_t>(it - tower->vars.begin())] = 1;
        return tower_monomial(tower, e, fe_one(tower->base));
    }
    return tower_embed(tower, var_elem(tower->base, name));
}

QuadForm tower_form(const FieldPtr& tower, const std::vector<std::pair<long, std::string>>& cs) {
    std::vector<FieldElem> coeffs;
    for (const auto& [c, v] : cs) {
        FieldElem x = fe_from_int(tower, c);
        if (!v.empty()) {
            for (char ch : v) x = fe_mul(x, var_elem(tower, std::string(1, ch)));
        }
        coeffs.push_back(x);
    }
    return make_form(tower, coeffs);
}

} // namespace

TEST_CASE("function field descriptor normalizes and flags degenerations", "[stabbir]") {
    FieldPtr q = rationals();

    SECTION("isotropic quadric gives a purely transcendental extension") {
        FunctionFieldDesc d = function_field(make_form_ints(q, {1, -1, 1}));
        CHECK(d.purely_transcendental);
        CHECK(d.trans_vars == std::vector<std::string>{"X2", "X3"});
        CHECK_FALSE(d.quadratic_extension);
    }

    SECTION("anisotropic ternary form over the rationals") {
        FunctionFieldDesc d = function_field(make_form_ints(q, {1, 1, 1}));
        CHECK_FALSE(d.purely_transcendental);
        CHECK_FALSE(d.quadratic_extension);
        // radicand -(X2^2 + X3^2)
        Poly x2 = poly_var(q, d.trans_vars, "X2");
        Poly x3 = poly_var(q, d.trans_vars, "X3");
        Poly expected = poly_neg(poly_add(poly_mul(x2, x2), poly_mul(x3, x3)));
        CHECK(poly_eq(d.radicand, expected));
    }

    SECTION("scaling the form leaves the descriptor unchanged") {
        QuadForm psi = make_form_ints(q, {1, 1, 1});
        QuadForm five_psi = scale_form(fe_from_int(q, 5), psi);
        CHECK(ffdesc_eq(function_field(psi), function_field(five_psi)));
    }

    SECTION("slopes are square-class reduced") {
        FunctionFieldDesc d = function_field(make_form_ints(q, {2, 1, 8}));
        CHECK(fe_eq(d.form.coeffs[0], fe_from_int(q, 1)));
        CHECK(fe_eq(d.form.coeffs[1], fe_from_int(q, 2)));  // 1/2 ~ 2
        CHECK(fe_eq(d.form.coeffs[2], fe_from_int(q, 1)));  // 8/2 = 4 ~ 1
    }

    SECTION("binary form degenerates to a quadratic extension") {
        FunctionFieldDesc d = function_field(make_form_ints(q, {1, -2}));
        CHECK(d.quadratic_extension);
        CHECK_FALSE(d.purely_transcendental);
        CHECK(d.trans_vars == std::vector<std::string>{"X2"});
    }

    SECTION("unary form is rejected") {
        CHECK_THROWS_AS(function_field(make_form_ints(q, {3})), DimensionTooSmall);
    }
}

TEST_CASE("function field isotropy: base-field shortcuts", "[stabbir]") {
    FieldPtr q = rationals();

    SECTION("isotropic form stays isotropic, with a witness") {
        Verdict v = isotropy_over_ff(make_form_ints(q, {1, -1}), make_form_ints(q, {1, 1}));
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "isotropic-base");
        REQUIRE(v.witness.has_value());
        verify_ff_verdict(make_form_ints(q, {1, -1}), make_form_ints(q, {1, 1}), v);
    }

    SECTION("purely transcendental extension changes nothing") {
        QuadForm phi = make_form_ints(q, {1, -2});
        QuadForm psi = make_form_ints(q, {1, -1});
        Verdict v = isotropy_over_ff(phi, psi);
        CHECK(v.status == Truth::Refuted);
        CHECK(v.reason == "purely-transcendental-descent");
        verify_ff_verdict(phi, psi, v);
    }

    SECTION("dimension and field preconditions") {
        CHECK_THROWS_AS(isotropy_over_ff(make_form_ints(q, {1}), make_form_ints(q, {1, 1})),
                        DimensionTooSmall);
        FieldPtr f5 = make_prime_field(5);
        CHECK_THROWS_AS(isotropy_over_ff(make_form_ints(q, {1, 1}), make_form_ints(f5, {1, 1})),
                        FieldMismatch);
    }
}

TEST_CASE("form becomes isotropic over its own function field", "[stabbir]") {
    FieldPtr q = rationals();
    QuadForm phi = make_form_ints(q, {1, 1, 1});
    Verdict v = isotropy_over_ff(phi, phi);
    CHECK(v.status == Truth::Proven);
    CHECK(v.reason == "subform-rule");
    REQUIRE(v.product.has_value());
    verify_ff_verdict(phi, phi, v);
}

TEST_CASE("subform pairs give verified product certificates", "[stabbir]") {
    FieldPtr q = rationals();

    SECTION("quaternary over binary, rationals") {
        QuadForm phi = make_form_ints(q, {1, 1, 1, 1});
        QuadForm psi = make_form_ints(q, {1, 1});
        Verdict v = isotropy_over_ff(phi, psi);
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "subform-rule");
        REQUIRE(v.product.has_value());
        CHECK(v.product->factors.size() <= 2);
        verify_ff_verdict(phi, psi, v);
    }

    SECTION("mixed-slot tower pair") {
        FieldPtr k = gf5_u();
        QuadForm phi = tower_form(k, {{1, ""}, {1, "u"}, {2, ""}});
        QuadForm psi = tower_form(k, {{1, ""}, {1, "u"}});
        REQUIRE(is_isotropic(phi).status == Truth::Refuted);
        REQUIRE(is_isotropic(psi).status == Truth::Refuted);
        Verdict v = isotropy_over_ff(phi, psi);
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "subform-rule");
        REQUIRE(v.product.has_value());
        verify_ff_verdict(phi, psi, v);
    }

    SECTION("scaled subform needs a similarity factor") {
        // 3<1,1> = <3,3> sits inside <1,1,3,3> only after scaling.
        QuadForm phi = make_form_ints(q, {3, 3, 2});
        QuadForm psi = make_form_ints(q, {1, 1});
        REQUIRE(is_isotropic(phi).status == Truth::Refuted);
        Verdict v = isotropy_over_ff(phi, psi);
        CHECK(v.status == Truth::Proven);
        verify_ff_verdict(phi, psi, v);
    }
}

TEST_CASE("value-product probe refutes the rational counterexample", "[stabbir]") {
    FieldPtr q = rationals();
    QuadForm phi = make_form_ints(q, {1, 1});
    QuadForm psi = make_form_ints(q, {1, 1, 1});
    Verdict v = isotropy_over_ff(phi, psi);
    CHECK(v.status == Truth::Refuted);
    CHECK(v.reason == "value-product-containment-probe");
    REQUIRE(v.refutation.has_value());
    // 3 is a product of represented values of <1,1,1> but of no two values
    // of <1,1>: <1,1,-3,-3> is anisotropic.
    CHECK(fe_eq(v.refutation->witness, fe_from_int(q, 3)));
    CHECK(v.refutation->probe.kind == ProbeKind::Base);
    verify_ff_verdict(phi, psi, v);
}

TEST_CASE("ternary over quaternary stays honestly undecided", "[stabbir]") {
    // <1,1,1> does become isotropic over the function field of <1,1,1,1>,
    // but only via non-constant pivot vectors outside the bounded search;
    // no probe can refute a true statement, so Unknown is the honest output.
    FieldPtr q = rationals();
    QuadForm phi = make_form_ints(q, {1, 1, 1});
    QuadForm psi = make_form_ints(q, {1, 1, 1, 1});
    Verdict v = isotropy_over_ff(phi, psi);
    CHECK(v.status == Truth::Unknown);
    CHECK(v.reason == "search-exhausted");
}

TEST_CASE("hand-built two-factor certificate for the ternary sum of squares", "[stabbir]") {
    // phi = <1,1,1> over the function field of psi = <1,1,1,1>: with
    // h = X1^2 + X2^2 and p = (X2X3 + X1X4, X2X4 - X1X3, h), phi(p) = h psi(X),
    // so psi(X) = (h psi(X)) * (1/h) is a two-factor product of phi values.
    FieldPtr q = rationals();
    QuadForm phi = make_form_ints(q, {1, 1, 1});
    QuadForm psi = make_form_ints(q, {1, 1, 1, 1});
    std::vector<std::string> vars{"X1", "X2", "X3", "X4"};
    auto X = [&](const std::string& v) { return poly_var(q, vars, v); };
    Poly one = poly_const(q, vars, fe_one(q));
    Poly zero = poly_const(q, vars, fe_zero(q));
    Poly h = poly_add(poly_mul(X("X1"), X("X1")), poly_mul(X("X2"), X("X2")));
    Poly target = detail::psi_poly(psi, vars, fe_one(q));

    std::vector<Poly> p{poly_add(poly_mul(X("X2"), X("X3")), poly_mul(X("X1"), X("X4"))),
                        poly_sub(poly_mul(X("X2"), X("X4")), poly_mul(X("X1"), X("X3"))), h};
    std::vector<Poly> w{X("X1"), X("X2"), zero};

    ProductCertificate cert{phi, target, 2, {}};
    cert.factors.push_back({poly_mul(h, target), one, p, one});
    cert.factors.push_back({one, h, w, h});
    CHECK_NOTHROW(verify_certificate(cert));
}

TEST_CASE("stable equivalence of similar forms", "[stabbir]") {
    FieldPtr q = rationals();

    SECTION("isometric pair") {
        Verdict v = stb_check(make_form_ints(q, {1, 2}), make_form_ints(q, {2, 1}));
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "similar-forms");
    }

    SECTION("similar pair") {
        Verdict v = stb_check(make_form_ints(q, {1, 1}), make_form_ints(q, {2, 2}));
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "similar-forms");
    }

    SECTION("preconditions") {
        CHECK_THROWS_AS(stb_check(make_form_ints(q, {2}), make_form_ints(q, {1, 1})),
                        DimensionTooSmall);
        CHECK_THROWS_AS(stb_check(make_form_ints(q, {1, -1}), make_form_ints(q, {1, 1})),
                        HypothesisViolated);
    }
}

TEST_CASE("stable equivalence refuted through value groups", "[stabbir]") {
    SECTION("two-layer tower, last slope twisted") {
        FieldPtr k = gf3_xy();
        QuadForm phi = tower_form(k, {{1, ""}, {1, "X"}, {1, "Y"}});
        QuadForm psi = tower_form(k, {{1, ""}, {1, "X"}, {2, "Y"}});
        REQUIRE(is_isotropic(phi).status == Truth::Refuted);
        REQUIRE(is_isotropic(psi).status == Truth::Refuted);
        Verdict v = stb_check(phi, psi);
        CHECK(v.status == Truth::Refuted);
        REQUIRE(v.refutation.has_value());
        // re-verify the witness class against both value-product sets
        const ProbeRefutation& r = *v.refutation;
        auto pf = detail::probe_field(k, r.probe);
        REQUIRE(pf.has_value());
        QuadForm phi_f = detail::form_on_probe(phi, *pf, r.probe);
        QuadForm psi_f = detail::form_on_probe(psi, *pf, r.probe);
        bool in_phi = dd_membership(phi_f, r.witness) == Truth::Proven;
        bool in_psi = dd_membership(psi_f, r.witness) == Truth::Proven;
        CHECK(in_phi != in_psi);
    }

    SECTION("single Laurent layer distinguishes unit and uniformizer slopes") {
        FieldPtr k = make_laurent_tower(make_prime_field(3), {"t"});
        QuadForm phi = tower_form(k, {{1, ""}, {1, ""}});
        QuadForm psi = tower_form(k, {{1, ""}, {1, "t"}});
        Verdict v = stb_check(phi, psi);
        CHECK(v.status == Truth::Refuted);
        REQUIRE(v.refutation.has_value());
        CHECK(fe_eq(v.refutation->witness, var_elem(k, "t")));
    }
}

TEST_CASE("generic doubling preserves verdicts", "[stabbir]") {
    FieldPtr q = rationals();

    SECTION("a form against itself") {
        QuadForm phi = make_form_ints(q, {1, 1});
        Verdict v = generic_double(phi, phi);
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "generic-double/subform-rule");
        REQUIRE(v.product.has_value());
    }

    SECTION("tower subform pair stays proven") {
        FieldPtr k = gf5_u();
        QuadForm phi = tower_form(k, {{1, ""}, {1, "u"}, {2, ""}});
        QuadForm psi = tower_form(k, {{1, ""}, {1, "u"}});
        Verdict v = generic_double(phi, psi);
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "generic-double/subform-rule");
    }

    SECTION("refuted pair stays refuted") {
        FieldPtr k = make_laurent_tower(make_prime_field(3), {"t"});
        QuadForm phi = tower_form(k, {{1, ""}, {1, ""}});
        QuadForm psi = tower_form(k, {{1, ""}, {1, "t"}});
        Verdict v = generic_double(phi, psi);
        CHECK(v.status == Truth::Refuted);
    }

    SECTION("isotropic input is rejected") {
        CHECK_THROWS_AS(generic_double(make_form_ints(q, {1, -1}), make_form_ints(q, {1, 1})),
                        HypothesisViolated);
    }
}

TEST_CASE("Pfister-similar recognition", "[stabbir]") {
    FieldPtr q = rationals();

    SECTION("binary forms always decompose") {
        auto d = gp_recognize(make_form_ints(q, {3, 5}));
        REQUIRE(d.has_value());
        CHECK(fe_eq(d->scale, fe_from_int(q, 3)));
        REQUIRE(d->slots.size() == 1);
        QuadForm rebuilt = scale_form(d->scale, pfister_form(q, d->slots));
        CHECK(is_isometric(rebuilt, make_form_ints(q, {3, 5})) == Truth::Proven);
    }

    SECTION("sum of four squares") {
        auto d = gp_recognize(make_form_ints(q, {1, 1, 1, 1}));
        REQUIRE(d.has_value());
        QuadForm rebuilt = scale_form(d->scale, pfister_form(q, d->slots));
        CHECK(is_isometric(rebuilt, make_form_ints(q, {1, 1, 1, 1})) == Truth::Proven);
    }

    SECTION("two-fold tower multiple") {
        FieldPtr k = gf5_u();
        QuadForm pi = tower_form(k, {{1, ""}, {2, ""}, {1, "u"}, {2, "u"}});
        auto d = gp_recognize(pi);
        REQUIRE(d.has_value());
        QuadForm rebuilt = scale_form(d->scale, pfister_form(k, d->slots));
        CHECK(is_isometric(rebuilt, pi) == Truth::Proven);
    }

    SECTION("determinant obstruction") {
        CHECK_FALSE(gp_recognize(make_form_ints(q, {1, 1, 1, 2})).has_value());
        CHECK_FALSE(gp_recognize(make_form_ints(q, {1, 1, 1})).has_value());
    }
}

TEST_CASE("Pfister multiple transfer", "[stabbir]") {
    FieldPtr q = rationals();

    SECTION("trivial multiplier reduces to plain isotropy") {
        QuadForm one = make_form(q, {fe_one(q)});
        Verdict fwd = pfister_transfer(make_form_ints(q, {1, 1, 1, 1}),
                                       make_form_ints(q, {1, 1}), one,
                                       TransferDirection::Forward);
        CHECK(fwd.status == Truth::Proven);
        Verdict conv = pfister_transfer(make_form_ints(q, {1, 1}),
                                        make_form_ints(q, {1, 1, 1}), one,
                                        TransferDirection::Converse);
        CHECK(conv.status == Truth::Refuted);
        CHECK(conv.reason == "converse-base/value-product-containment-probe");
    }

    SECTION("identical forms with a binary multiplier") {
        QuadForm phi = make_form_ints(q, {1, 1, 1});
        QuadForm pi = pfister_form(q, {fe_from_int(q, -1)});  // <1,1>
        Verdict v = pfister_transfer(phi, phi, pi, TransferDirection::Forward);
        CHECK(v.status == Truth::Proven);
    }

    SECTION("tower subform pair transfers along the uniformizer multiplier") {
        FieldPtr k = gf5_u();
        QuadForm phi = tower_form(k, {{1, ""}, {1, "u"}, {2, ""}});
        QuadForm psi = tower_form(k, {{1, ""}, {1, "u"}});
        QuadForm pi = pfister_form(k, {var_elem(k, "u")});
        Verdict v = pfister_transfer(phi, psi, pi, TransferDirection::Forward);
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "transfer-subform");
        REQUIRE(v.scale.has_value());
        CHECK(is_subform(tensor_form(pi, psi),
                         scale_form(*v.scale, tensor_form(pi, phi))) == Truth::Proven);
    }

    SECTION("converse battery refutes through an instance") {
        FieldPtr k = make_laurent_tower(make_prime_field(3), {"t"});
        QuadForm phi = tower_form(k, {{1, ""}, {1, ""}});
        QuadForm psi = tower_form(k, {{1, ""}, {1, "t"}});
        QuadForm pi = pfister_form(k, {var_elem(k, "t")});
        Verdict v = pfister_transfer(phi, psi, pi, TransferDirection::Converse);
        CHECK(v.status == Truth::Refuted);
    }

    SECTION("hypothesis checks") {
        QuadForm phi = make_form_ints(q, {1, 1, 1});
        CHECK_THROWS_AS(pfister_transfer(phi, phi, make_form_ints(q, {1, 1, 1}),
                                         TransferDirection::Forward),
                        HypothesisViolated);
        CHECK_THROWS_AS(pfister_transfer(phi, phi, make_form_ints(q, {1, 1, 1, 2}),
                                         TransferDirection::Forward),
                        HypothesisViolated);
        CHECK_THROWS_AS(pfister_transfer(make_form_ints(q, {1, -1}), phi,
                                         make_form_ints(q, {1, 1}),
                                         TransferDirection::Forward),
                        HypothesisViolated);
    }
}

TEST_CASE("hyperbolicity over a function field", "[stabbir]") {
    FieldPtr q = rationals();

    SECTION("a Pfister multiple over its own quadric") {
        QuadForm phi = pfister_form(q, {fe_from_int(q, -1), fe_from_int(q, -1)});
        Verdict v = hyperbolicity_over_ff(phi, phi);
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "similar-subform");
        REQUIRE(v.scale.has_value());
        CHECK(is_subform(scale_form(*v.scale, phi), phi) == Truth::Proven);
    }

    SECTION("two-fold tower multiple splits over a binary slope quadric") {
        FieldPtr k = gf3_xy();
        FieldElem X = var_elem(k, "X"), Y = var_elem(k, "Y");
        QuadForm phi = pfister_form(k, {fe_neg(X), fe_neg(Y)});  // <1,X,Y,XY>
        QuadForm psi = tower_form(k, {{1, ""}, {1, "X"}});
        REQUIRE(is_isotropic(phi).status == Truth::Refuted);
        Verdict v = hyperbolicity_over_ff(phi, psi);
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "similar-subform");
    }

    SECTION("mismatched slope variable is refuted by a complete scan") {
        FieldPtr k = gf3_xy();
        QuadForm phi = pfister_form(k, {fe_neg(var_elem(k, "X"))});  // <1,X>
        QuadForm psi = tower_form(k, {{1, ""}, {1, "Y"}});
        Verdict v = hyperbolicity_over_ff(phi, psi);
        CHECK(v.status == Truth::Refuted);
        CHECK(v.reason == "similar-subform-scan");
    }

    SECTION("hyperbolic input is already split") {
        Verdict v = hyperbolicity_over_ff(make_form_ints(q, {1, -1}),
                                          make_form_ints(q, {1, 1}));
        CHECK(v.status == Truth::Proven);
        CHECK(v.reason == "already-hyperbolic");
    }

    SECTION("not Pfister-similar inputs are rejected") {
        CHECK_THROWS_AS(hyperbolicity_over_ff(make_form_ints(q, {1, 1, 1}),
                                              make_form_ints(q, {1, 1})),
                        NotPfisterSimilar);
        CHECK_THROWS_AS(hyperbolicity_over_ff(make_form_ints(q, {1, 1, 1, 2}),
                                              make_form_ints(q, {1, 1})),
                        NotPfisterSimilar);
        // isotropic of two-power dimension but of Witt index below half
        CHECK_THROWS_AS(hyperbolicity_over_ff(make_form_ints(q, {1, -1, 1, -1, 1, 1, 1, 1}),
                                              make_form_ints(q, {1, 1})),
                        NotPfisterSimilar);
    }

    SECTION("incomplete scan over the rationals stays Unknown") {
        Verdict v = hyperbolicity_over_ff(make_form_ints(q, {1, -2}),
                                          make_form_ints(q, {1, 1}));
        CHECK(v.status == Truth::Unknown);
    }
}

TEST_CASE("verdict soundness across a mixed battery", "[stabbir][property]") {
    std::vector<std::pair<QuadForm, QuadForm>> pairs;
    FieldPtr q = rationals();
    pairs.emplace_back(make_form_ints(q, {1, 1, 1, 1}), make_form_ints(q, {1, 1}));
    pairs.emplace_back(make_form_ints(q, {1, 1}), make_form_ints(q, {1, 1, 1}));
    pairs.emplace_back(make_form_ints(q, {1, 2, 3}), make_form_ints(q, {2, 3}));
    pairs.emplace_back(make_form_ints(q, {1, 1, 1}), make_form_ints(q, {1, 1, 1, 1}));
    pairs.emplace_back(make_form_ints(q, {1, -2}), make_form_ints(q, {1, -1}));
    pairs.emplace_back(make_form_ints(q, {2, 3}), make_form_ints(q, {1, 1}));
    FieldPtr k5 = gf5_u();
    pairs.emplace_back(tower_form(k5, {{1, ""}, {1, "u"}, {2, ""}}),
                       tower_form(k5, {{1, ""}, {1, "u"}}));
    pairs.emplace_back(tower_form(k5, {{1, ""}, {2, ""}}),
                       tower_form(k5, {{1, ""}, {1, "u"}}));
    FieldPtr k3 = gf3_xy();
    pairs.emplace_back(tower_form(k3, {{1, ""}, {1, "X"}, {1, "Y"}}),
                       tower_form(k3, {{1, ""}, {1, "X"}}));
    pairs.emplace_back(tower_form(k3, {{1, ""}, {1, "X"}}),
                       tower_form(k3, {{1, ""}, {1, "Y"}}));

    for (const auto& [phi, psi] : pairs) {
        Verdict v = isotropy_over_ff(phi, psi);
        CHECK_NOTHROW(verify_ff_verdict(phi, psi, v));
    }
}

TEST_CASE("subform relation forces a proven verdict", "[stabbir][property]") {
    std::vector<std::pair<QuadForm, QuadForm>> pairs;
    FieldPtr q = rationals();
    pairs.emplace_back(make_form_ints(q, {1, 1, 1, 1}), make_form_ints(q, {1, 1}));
    pairs.emplace_back(make_form_ints(q, {1, 1, 2}), make_form_ints(q, {1, 2}));
    pairs.emplace_back(make_form_ints(q, {1, 2, 3}), make_form_ints(q, {2, 3}));
    FieldPtr k5 = gf5_u();
    pairs.emplace_back(tower_form(k5, {{1, ""}, {1, "u"}, {2, ""}}),
                       tower_form(k5, {{1, ""}, {1, "u"}}));
    pairs.emplace_back(tower_form(k5, {{1, ""}, {1, "u"}, {2, ""}, {2, "u"}}),
                       tower_form(k5, {{1, ""}, {1, "u"}, {2, ""}}));
    FieldPtr k3 = gf3_xy();
    pairs.emplace_back(tower_form(k3, {{1, ""}, {1, "X"}, {1, "Y"}}),
                       tower_form(k3, {{1, ""}, {1, "X"}}));
    pairs.emplace_back(tower_form(k3, {{1, ""}, {1, "X"}, {1, "Y"}, {1, "XY"}}),
                       tower_form(k3, {{1, ""}, {1, "X"}, {1, "Y"}}));

    for (const auto& [phi, psi] : pairs) {
        REQUIRE(is_subform(psi, phi) == Truth::Proven);
        Verdict v = isotropy_over_ff(phi, psi);
        CHECK(v.status == Truth::Proven);
        CHECK_NOTHROW(verify_ff_verdict(phi, psi, v));
    }
}

TEST_CASE("monotone consistency along subform chains", "[stabbir][property]") {
    // If psi splits over K(xi) by the subform rule and (phi, psi) is proven,
    // (phi, xi) must never be refuted.
    struct Triple {
        QuadForm phi, psi, xi;
    };
    std::vector<Triple> triples;
    FieldPtr q = rationals();
    triples.push_back({make_form_ints(q, {1, 1, 1, 1, 1}), make_form_ints(q, {1, 1, 1, 1}),
                       make_form_ints(q, {1, 1, 1})});
    FieldPtr k5 = gf5_u();
    triples.push_back({tower_form(k5, {{1, ""}, {1, "u"}, {2, ""}, {2, "u"}}),
                       tower_form(k5, {{1, ""}, {1, "u"}, {2, ""}}),
                       tower_form(k5, {{1, ""}, {1, "u"}})});
    FieldPtr k3 = gf3_xy();
    triples.push_back({tower_form(k3, {{1, ""}, {1, "X"}, {1, "Y"}, {1, "XY"}}),
                       tower_form(k3, {{1, ""}, {1, "X"}, {1, "Y"}}),
                       tower_form(k3, {{1, ""}, {1, "X"}})});

    for (const Triple& t : triples) {
        REQUIRE(is_subform(t.xi, t.psi) == Truth::Proven);
        Verdict big = isotropy_over_ff(t.phi, t.psi);
        REQUIRE(big.status == Truth::Proven);
        Verdict small = isotropy_over_ff(t.phi, t.xi);
        CHECK(small.status != Truth::Refuted);
    }
}

TEST_CASE("tensoring by a Pfister multiple never refutes a proven pair", "[stabbir][property]") {
    FieldPtr k = gf5_u();
    QuadForm tau = pfister_form(k, {var_elem(k, "u")});
    // unit-slope similar pair: the tensor products stay anisotropic
    QuadForm phi = tower_form(k, {{1, ""}, {2, ""}});
    QuadForm psi = tower_form(k, {{2, ""}, {4, ""}});
    REQUIRE(stb_check(phi, psi).status == Truth::Proven);
    QuadForm tf = tensor_form(tau, phi);
    QuadForm tp = tensor_form(tau, psi);
    REQUIRE(is_isotropic(tf).status == Truth::Refuted);
    REQUIRE(is_isotropic(tp).status == Truth::Refuted);
    Verdict v = stb_check(tf, tp);
    CHECK(v.status != Truth::Refuted);

    // subform-curated pair: products may split, the transfer must still verify
    QuadForm big = tower_form(k, {{1, ""}, {1, "u"}, {2, ""}});
    QuadForm sub = tower_form(k, {{1, ""}, {1, "u"}});
    Verdict fwd = pfister_transfer(big, sub, tau, TransferDirection::Forward);
    CHECK(fwd.status == Truth::Proven);
}

TEST_CASE("var-sqrt probe maps square classes faithfully", "[stabbir]") {
    FieldPtr k = gf3_xy();
    FieldElem X = var_elem(k, "X"), Y = var_elem(k, "Y");
    // X becomes a square after adjoining its root; Y stays a non-square.
    FieldElem mx = detail::var_sqrt_map(X, "X");
    CHECK(fe_is_square(mx));
    FieldElem my = detail::var_sqrt_map(Y, "X");
    CHECK_FALSE(fe_is_square(my));
    FieldElem mixed = detail::var_sqrt_map(fe_add(X, fe_mul(Y, Y)), "Y");
    CHECK(fe_eq(mixed, fe_add(X, fe_mul(fe_mul(Y, Y), fe_mul(Y, Y)))));
}
