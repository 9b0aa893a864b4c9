#ifndef QFORMA_ISOTROPY_HPP
#define QFORMA_ISOTROPY_HPP

// Isotropy, Witt decomposition, representation, isometry, subform and
// similarity tests, dispatched over the supported fields:
//  - rationals: local-global decisions with constructive witnesses,
//  - prime fields: direct residue search, always constructive,
//  - Laurent towers: residue-form recursion; the decisions are exact but
//    witnesses may fail to exist as finite Laurent vectors, so none are
//    produced,
//  - rational function fields: exact partial criteria, Unknown otherwise.

#include "qforma/hasse.hpp"
#include "qforma/quadform.hpp"

namespace qforma {

struct IsoResult {
    Truth status;
    std::optional<Vec> witness;   // nonzero vector on which the form vanishes
};

struct RepResult {
    Truth status;
    std::optional<Vec> witness;   // vector on which the form takes the value
};

struct WittDecomposition {
    bool decided;
    size_t index;      // number of hyperbolic planes split off
    QuadForm kernel;   // anisotropic part; meaningful only when decided
};

inline IsoResult is_isotropic(const QuadForm& f);
inline WittDecomposition witt_decompose(const QuadForm& f);
inline Truth is_isometric(const QuadForm& a, const QuadForm& b);

namespace detail {

inline std::vector<BigRat> form_rats(const QuadForm& f) {
    std::vector<BigRat> cs;
    cs.reserve(f.coeffs.size());
    for (const FieldElem& c : f.coeffs) cs.push_back(std::get<BigRat>(c.val));
    return cs;
}

inline Vec rats_vec(const FieldPtr& field, const std::vector<BigRat>& v) {
    Vec out;
    out.reserve(v.size());
    for (const BigRat& x : v) out.push_back(fe_from_rat(field, x));
    return out;
}

// Constant fraction -> base field element.
inline std::optional<FieldElem> fraction_as_constant(const FieldElem& a) {
    if (a.field->kind != FieldKind::RationalFunctions) throw UnsupportedField("not a fraction");
    if (fe_is_zero(a)) return fe_zero(a.field->base);
    const FracVal& x = *std::get<FracPtr>(a.val);
    if (poly_total_deg(x.num) != 0 || poly_total_deg(x.den) != 0) return std::nullopt;
    return fe_div(x.num.terms.begin()->second, x.den.terms.begin()->second);
}

inline FieldElem constant_to_fraction(const FieldPtr& field, const FieldElem& base_val) {
    return fe_from_poly(field, poly_const(field->base, field->vars, base_val));
}

} // namespace detail

// Residue forms of a tower form under the outermost valuation: even-parity
// and odd-parity coefficient residues over the inner field.
inline std::pair<std::vector<FieldElem>, std::vector<FieldElem>> tower_residue_split(
    const QuadForm& f) {
    if (f.field->kind != FieldKind::LaurentTower) throw UnsupportedField("not a tower form");
    std::vector<FieldElem> even, odd;
    for (const FieldElem& a : f.coeffs) {
        long v = tower_valuation(a);
        FieldElem r = tower_coeff(a, v);
        (((v % 2) + 2) % 2 == 0 ? even : odd).push_back(r);
    }
    return {std::move(even), std::move(odd)};
}

// Nontrivial zero over GF(p), if one exists. Dimension >= 3 always has one.
inline std::optional<Vec> isotropic_vector_primefield(const QuadForm& f) {
    const FieldPtr& field = f.field;
    long p = field->p;
    size_t n = form_dim(f);
    if (n <= 1) return std::nullopt;
    auto cv = [&](size_t i) { return std::get<long>(f.coeffs[i].val); };
    auto sqrt_p = [&](long x) { return sqrt_mod_prime(BigInt(x), BigInt(p)).convert_to<long>(); };
    if (n == 2) {
        long t2 = pf_mul(pf_norm(-cv(1), p), pf_inv(cv(0), p), p);
        if (!pf_is_square(t2, p)) return std::nullopt;
        Vec v{fe_from_int(field, sqrt_p(t2)), fe_one(field)};
        return v;
    }
    // a0 x^2 + a1 y^2 = -a2 always has a solution mod p.
    long a0 = cv(0), a1 = cv(1), a2 = cv(2);
    for (long x = 0; x < p; ++x) {
        long rhs = pf_mul(pf_norm(-a2 - pf_mul(pf_mul(a0, x, p), x, p), p), pf_inv(a1, p), p);
        if (!pf_is_square(rhs, p)) continue;
        Vec v(n, fe_zero(field));
        v[0] = fe_from_int(field, x);
        v[1] = fe_from_int(field, sqrt_p(rhs));
        v[2] = fe_one(field);
        return v;
    }
    throw Error("binary value scan over GF(p) cannot fail");
}

namespace detail {

inline IsoResult isotropy_function_field(const QuadForm& f) {
    const FieldPtr& field = f.field;
    size_t n = form_dim(f);
    // Forms with constant coefficients reduce to the base field: a base form
    // is isotropic over K(X) exactly when it is isotropic over K.
    {
        std::vector<FieldElem> consts;
        bool all_const = true;
        for (const FieldElem& c : f.coeffs) {
            auto b = fraction_as_constant(c);
            if (!b) { all_const = false; break; }
            consts.push_back(*b);
        }
        if (all_const) {
            IsoResult r = is_isotropic(make_form(field->base, consts));
            if (r.witness) {
                Vec lifted;
                for (const FieldElem& e : *r.witness) lifted.push_back(constant_to_fraction(field, e));
                return {r.status, std::move(lifted)};
            }
            return {r.status, std::nullopt};
        }
    }
    // Exact binary hits: -a_i a_j a square.
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            FieldElem ratio = fe_neg(fe_div(f.coeffs[j], f.coeffs[i]));
            if (!fe_is_square(ratio)) continue;
            auto t = fe_sqrt(ratio);
            if (!t) throw Error("fraction square without explicit root");
            Vec v(n, fe_zero(field));
            v[i] = *t;
            v[j] = fe_one(field);
            return {Truth::Proven, std::move(v)};
        }
    if (n == 2) return {Truth::Refuted, std::nullopt};
    // Function fields in one variable over a finite field have u-invariant 4.
    if (field->base->kind == FieldKind::PrimeField && field->vars.size() == 1 && n >= 5)
        return {Truth::Proven, std::nullopt};
    return {Truth::Unknown, std::nullopt};
}

} // namespace detail

inline IsoResult is_isotropic(const QuadForm& f) {
    size_t n = form_dim(f);
    if (n <= 1) return {Truth::Refuted, std::nullopt};
    switch (f.field->kind) {
        case FieldKind::Rationals: {
            auto cs = detail::form_rats(f);
            if (!is_isotropic_rationals(cs)) return {Truth::Refuted, std::nullopt};
            try {
                return {Truth::Proven, detail::rats_vec(f.field, isotropic_vector_rationals(cs))};
            } catch (const SearchExhausted&) {
                return {Truth::Proven, std::nullopt};
            }
        }
        case FieldKind::PrimeField: {
            auto v = isotropic_vector_primefield(f);
            if (v) return {Truth::Proven, std::move(v)};
            return {Truth::Refuted, std::nullopt};
        }
        case FieldKind::LaurentTower: {
            auto [even, odd] = tower_residue_split(f);
            FieldPtr inner = tower_inner_field(f.field);
            Truth t0 = even.size() >= 2 ? is_isotropic(make_form(inner, even)).status : Truth::Refuted;
            Truth t1 = odd.size() >= 2 ? is_isotropic(make_form(inner, odd)).status : Truth::Refuted;
            if (t0 == Truth::Proven || t1 == Truth::Proven) return {Truth::Proven, std::nullopt};
            if (t0 == Truth::Refuted && t1 == Truth::Refuted) return {Truth::Refuted, std::nullopt};
            return {Truth::Unknown, std::nullopt};
        }
        case FieldKind::RationalFunctions: return detail::isotropy_function_field(f);
    }
    throw Error("unreachable");
}

// Split one hyperbolic plane off a form along a known isotropic vector and
// return the diagonalized orthogonal complement.
inline QuadForm split_hyperbolic(const QuadForm& f, const Vec& v) {
    const FieldPtr& field = f.field;
    size_t n = form_dim(f);
    if (v.size() != n || vec_is_zero(v)) throw BadCertificate("invalid isotropic vector");
    if (!fe_is_zero(evaluate(f, v))) throw BadCertificate("vector is not isotropic");
    size_t j = n;
    for (size_t i = 0; i < n; ++i)
        if (!fe_is_zero(v[i])) { j = i; break; }
    Vec u(n, fe_zero(field));
    u[j] = fe_inv(fe_mul(f.coeffs[j], v[j]));   // b(v, u) = 1
    FieldElem half_qu = fe_div(evaluate(f, u), fe_from_int(field, 2));
    Vec w = vec_sub(u, vec_scale(half_qu, v));  // q(w) = 0, b(v, w) = 1
    // Orthogonal projection of the standard basis, then a maximal
    // independent subset.
    std::vector<Vec> basis;
    Matrix stacked;
    for (size_t k = 0; k < n && basis.size() < n - 2; ++k) {
        Vec e(n, fe_zero(field));
        e[k] = fe_one(field);
        Vec c = vec_sub(e, vec_add(vec_scale(polar_form(f, e, w), v), vec_scale(polar_form(f, e, v), w)));
        stacked.push_back(c);
        if (mat_rank(stacked) == basis.size() + 1)
            basis.push_back(c);
        else
            stacked.pop_back();
    }
    if (basis.size() != n - 2) throw Error("hyperbolic complement has wrong rank");
    if (n == 2) return QuadForm{field, {}};
    Matrix g(n - 2, Vec(n - 2, fe_zero(field)));
    for (size_t r = 0; r < n - 2; ++r)
        for (size_t c = 0; c < n - 2; ++c) g[r][c] = polar_form(f, basis[r], basis[c]);
    return gram_diagonalize(field, g).form;
}

inline WittDecomposition witt_decompose(const QuadForm& f) {
    const FieldPtr& field = f.field;
    switch (field->kind) {
        case FieldKind::Rationals:
        case FieldKind::PrimeField: {
            QuadForm cur = f;
            size_t idx = 0;
            while (form_dim(cur) >= 2) {
                IsoResult r = is_isotropic(cur);
                if (r.status == Truth::Refuted) break;
                if (!r.witness) throw SearchExhausted("no isotropy witness available for splitting");
                cur = split_hyperbolic(cur, *r.witness);
                ++idx;
            }
            if (field->kind == FieldKind::Rationals &&
                (int)idx != witt_index_rationals(detail::form_rats(f)))
                throw Error("Witt index mismatch between splitting and the local formula");
            return {true, idx, std::move(cur)};
        }
        case FieldKind::LaurentTower: {
            auto [even, odd] = tower_residue_split(f);
            FieldPtr inner = tower_inner_field(field);
            WittDecomposition w0{true, 0, QuadForm{inner, {}}};
            WittDecomposition w1{true, 0, QuadForm{inner, {}}};
            if (!even.empty()) w0 = witt_decompose(make_form(inner, even));
            if (!odd.empty()) w1 = witt_decompose(make_form(inner, odd));
            if (!w0.decided || !w1.decided) return {false, 0, f};
            std::vector<FieldElem> lifted;
            for (const FieldElem& c : w0.kernel.coeffs)
                lifted.push_back(tower_assemble(field, {{0, c}}));
            for (const FieldElem& c : w1.kernel.coeffs)
                lifted.push_back(tower_assemble(field, {{1, c}}));
            return {true, w0.index + w1.index, QuadForm{field, std::move(lifted)}};
        }
        case FieldKind::RationalFunctions: {
            // Exact reductions only: full constant forms drop to the base
            // field; otherwise hyperbolic pairs visible as square ratios are
            // stripped greedily.
            std::vector<FieldElem> rem = f.coeffs;
            {
                std::vector<FieldElem> consts;
                bool all_const = true;
                for (const FieldElem& c : rem) {
                    auto b = detail::fraction_as_constant(c);
                    if (!b) { all_const = false; break; }
                    consts.push_back(*b);
                }
                if (all_const) {
                    WittDecomposition wb = witt_decompose(make_form(field->base, consts));
                    if (!wb.decided) return {false, 0, f};
                    std::vector<FieldElem> lifted;
                    for (const FieldElem& c : wb.kernel.coeffs)
                        lifted.push_back(detail::constant_to_fraction(field, c));
                    return {true, wb.index, QuadForm{field, std::move(lifted)}};
                }
            }
            size_t idx = 0;
            bool progress = true;
            while (progress) {
                progress = false;
                for (size_t i = 0; i < rem.size() && !progress; ++i)
                    for (size_t j = i + 1; j < rem.size() && !progress; ++j) {
                        if (!fe_is_square(fe_neg(fe_mul(rem[i], rem[j])))) continue;
                        rem.erase(rem.begin() + j);
                        rem.erase(rem.begin() + i);
                        ++idx;
                        progress = true;
                    }
            }
            if (rem.size() <= 2) return {true, idx, QuadForm{field, std::move(rem)}};
            return {false, 0, f};
        }
    }
    throw Error("unreachable");
}

inline std::optional<size_t> witt_index(const QuadForm& f) {
    WittDecomposition w = witt_decompose(f);
    if (!w.decided) return std::nullopt;
    return w.index;
}

inline Truth is_hyperbolic(const QuadForm& f) {
    if (form_dim(f) % 2) return Truth::Refuted;
    WittDecomposition w = witt_decompose(f);
    if (!w.decided) return Truth::Unknown;
    return form_dim(w.kernel) == 0 ? Truth::Proven : Truth::Refuted;
}

// Given a nonzero isotropic vector of f, a vector on which f takes any
// requested nonzero value (isotropic forms are universal).
inline Vec represent_via_isotropic_vec(const QuadForm& f, const Vec& v, const FieldElem& c) {
    const FieldPtr& field = f.field;
    size_t j = form_dim(f);
    for (size_t i = 0; i < v.size(); ++i)
        if (!fe_is_zero(v[i])) { j = i; break; }
    if (j == form_dim(f)) throw BadCertificate("isotropic vector is zero");
    FieldElem beta = fe_mul(f.coeffs[j], v[j]);
    FieldElem alpha = fe_div(fe_sub(c, f.coeffs[j]), fe_mul(fe_from_int(field, 2), beta));
    Vec u = vec_scale(alpha, v);
    u[j] = fe_add(u[j], fe_one(field));
    return u;
}

inline RepResult represents(const QuadForm& f, const FieldElem& c) {
    if (!field_eq(f.field, c.field)) throw FieldMismatch("value from a different field");
    if (fe_is_zero(c)) throw ZeroInput("representation of zero; use the isotropy test");
    const FieldPtr& field = f.field;
    size_t n = form_dim(f);
    if (n == 0) return {Truth::Refuted, std::nullopt};
    switch (field->kind) {
        case FieldKind::Rationals: {
            try {
                auto r = represent_rationals(detail::form_rats(f), std::get<BigRat>(c.val));
                if (!r) return {Truth::Refuted, std::nullopt};
                return {Truth::Proven, detail::rats_vec(field, *r)};
            } catch (const SearchExhausted&) {
                return {Truth::Proven, std::nullopt};
            }
        }
        case FieldKind::PrimeField: {
            QuadForm ext = orth_sum(f, make_form(field, {fe_neg(c)}));
            auto v = isotropic_vector_primefield(ext);
            if (!v) return {Truth::Refuted, std::nullopt};
            if (!fe_is_zero((*v)[n])) {
                Vec u(n, fe_zero(field));
                for (size_t i = 0; i < n; ++i) u[i] = fe_div((*v)[i], (*v)[n]);
                return {Truth::Proven, std::move(u)};
            }
            v->pop_back();
            return {Truth::Proven, represent_via_isotropic_vec(f, *v, c)};
        }
        case FieldKind::LaurentTower: {
            for (size_t i = 0; i < n; ++i)
                if (fe_is_square(fe_div(c, f.coeffs[i]))) return {Truth::Proven, std::nullopt};
            QuadForm ext = orth_sum(f, make_form(field, {fe_neg(c)}));
            return {is_isotropic(ext).status, std::nullopt};
        }
        case FieldKind::RationalFunctions: {
            for (size_t i = 0; i < n; ++i) {
                auto t = fe_sqrt(fe_div(c, f.coeffs[i]));
                if (!t) continue;
                Vec u(n, fe_zero(field));
                u[i] = *t;
                return {Truth::Proven, std::move(u)};
            }
            QuadForm ext = orth_sum(f, make_form(field, {fe_neg(c)}));
            IsoResult r = is_isotropic(ext);
            if (r.status != Truth::Proven) return {r.status, std::nullopt};
            if (r.witness) {
                if (!fe_is_zero((*r.witness)[n])) {
                    Vec u(n, fe_zero(field));
                    for (size_t i = 0; i < n; ++i) u[i] = fe_div((*r.witness)[i], (*r.witness)[n]);
                    return {Truth::Proven, std::move(u)};
                }
                Vec v = *r.witness;
                v.pop_back();
                return {Truth::Proven, represent_via_isotropic_vec(f, v, c)};
            }
            return {Truth::Proven, std::nullopt};
        }
    }
    throw Error("unreachable");
}

namespace detail {

// Anisotropic tower forms are isometric exactly when both residue parts are.
inline Truth tower_kernel_isometric(const QuadForm& a, const QuadForm& b) {
    if (form_dim(a) != form_dim(b)) return Truth::Refuted;
    if (form_dim(a) == 0) return Truth::Proven;
    auto [ae, ao] = tower_residue_split(a);
    auto [be, bo] = tower_residue_split(b);
    if (ae.size() != be.size()) return Truth::Refuted;
    FieldPtr inner = tower_inner_field(a.field);
    Truth t0 = ae.empty() ? Truth::Proven : is_isometric(make_form(inner, ae), make_form(inner, be));
    if (t0 == Truth::Refuted) return Truth::Refuted;
    Truth t1 = ao.empty() ? Truth::Proven : is_isometric(make_form(inner, ao), make_form(inner, bo));
    if (t1 == Truth::Refuted) return Truth::Refuted;
    if (t0 == Truth::Proven && t1 == Truth::Proven) return Truth::Proven;
    return Truth::Unknown;
}

} // namespace detail

inline Truth is_isometric(const QuadForm& a, const QuadForm& b) {
    if (!field_eq(a.field, b.field)) throw FieldMismatch("isometry across different fields");
    if (form_dim(a) != form_dim(b)) return Truth::Refuted;
    size_t n = form_dim(a);
    if (n == 0) return Truth::Proven;
    // Same square-class multiset is a sufficient syntactic criterion.
    {
        auto classes = [](const QuadForm& f) {
            std::vector<FieldElem> cs;
            for (const FieldElem& c : f.coeffs) cs.push_back(square_class(c).rep);
            std::sort(cs.begin(), cs.end(),
                      [](const FieldElem& x, const FieldElem& y) { return fe_cmp(x, y) < 0; });
            return cs;
        };
        auto ca = classes(a), cb = classes(b);
        bool same = true;
        for (size_t i = 0; i < n && same; ++i) same = fe_eq(ca[i], cb[i]);
        if (same) return Truth::Proven;
    }
    switch (a.field->kind) {
        case FieldKind::Rationals:
            return is_isometric_rationals(detail::form_rats(a), detail::form_rats(b))
                       ? Truth::Proven
                       : Truth::Refuted;
        case FieldKind::PrimeField:
            return same_square_class(form_det(a), form_det(b)) ? Truth::Proven : Truth::Refuted;
        case FieldKind::LaurentTower: {
            WittDecomposition wa = witt_decompose(a), wb = witt_decompose(b);
            if (!wa.decided || !wb.decided) return Truth::Unknown;
            if (wa.index != wb.index) return Truth::Refuted;
            return detail::tower_kernel_isometric(wa.kernel, wb.kernel);
        }
        case FieldKind::RationalFunctions: {
            if (!same_square_class(form_det(a), form_det(b))) return Truth::Refuted;
            if (n == 1) return Truth::Proven;   // equal determinant classes
            if (n == 2) return represents(a, b.coeffs[0]).status;
            return Truth::Unknown;
        }
    }
    throw Error("unreachable");
}

// Is sub isometric to a subform of sup (represented orthogonal summand)?
inline Truth is_subform(const QuadForm& sub, const QuadForm& sup) {
    if (!field_eq(sub.field, sup.field)) throw FieldMismatch("subform test across different fields");
    if (form_dim(sub) > form_dim(sup)) return Truth::Refuted;
    if (form_dim(sub) == 0) return Truth::Proven;
    const FieldElem& b = sub.coeffs[0];
    RepResult rep = represents(sup, b);
    if (rep.status != Truth::Proven) return rep.status;
    QuadForm ext = orth_sum(sup, make_form(sup.field, {fe_neg(b)}));
    WittDecomposition wd = witt_decompose(ext);
    if (!wd.decided) return Truth::Unknown;
    if (wd.index == 0) throw Error("represented value produced an anisotropic extension");
    QuadForm comp = orth_sum(wd.kernel, hyperbolic_planes(sup.field, wd.index - 1));
    QuadForm tail{sub.field, std::vector<FieldElem>(sub.coeffs.begin() + 1, sub.coeffs.end())};
    return is_subform(tail, comp);
}

// Is a isometric to c*b for some nonzero scalar c?
inline Truth is_similar(const QuadForm& a, const QuadForm& b) {
    if (!field_eq(a.field, b.field)) throw FieldMismatch("similarity across different fields");
    if (form_dim(a) != form_dim(b)) return Truth::Refuted;
    size_t n = form_dim(a);
    if (n == 0) return Truth::Proven;
    const FieldPtr& field = a.field;

    std::vector<FieldElem> cands;
    auto push_cand = [&](const FieldElem& c) {
        if (fe_is_zero(c)) return;
        FieldElem rep = square_class(c).rep;
        for (const FieldElem& x : cands)
            if (fe_eq(x, rep)) return;
        cands.push_back(rep);
    };
    for (const FieldElem& x : a.coeffs)
        for (const FieldElem& y : b.coeffs) push_cand(fe_div(x, y));

    ClassGroup g = class_group(field);
    if (g.finite)
        for (const SquareClass& c : g.elems) push_cand(c.rep);
    else if (field->kind == FieldKind::Rationals) {
        if (n % 2) {
            cands.clear();
            push_cand(fe_mul(form_det(a), form_det(b)));   // determinant pins the factor
        } else {
            if (!same_square_class(form_det(a), form_det(b))) return Truth::Refuted;
            std::vector<BigRat> all = detail::form_rats(a);
            for (const BigRat& x : detail::form_rats(b)) all.push_back(x);
            std::set<BigInt> primes{BigInt(2)};
            for (const BigRat& x : all)
                for (auto& [p, e] : factorize(abs_int(squarefree_part(x)))) {
                    (void)e;
                    primes.insert(p);
                }
            std::vector<BigInt> ps(primes.begin(), primes.end());
            if (ps.size() <= 16)
                for (size_t mask = 0; mask < (size_t(1) << ps.size()); ++mask) {
                    BigInt m = 1;
                    for (size_t i = 0; i < ps.size(); ++i)
                        if (mask & (size_t(1) << i)) m *= ps[i];
                    push_cand(fe_from_rat(field, BigRat(m)));
                    push_cand(fe_from_rat(field, BigRat(-m)));
                }
        }
    }

    bool any_unknown = false;
    for (const FieldElem& c : cands) {
        Truth t = is_isometric(a, scale_form(c, b));
        if (t == Truth::Proven) return Truth::Proven;
        if (t == Truth::Unknown) any_unknown = true;
    }
    // The candidate set is exhaustive for finite class groups and for odd
    // dimension over the rationals.
    bool complete = g.finite || (field->kind == FieldKind::Rationals && n % 2);
    if (complete && !any_unknown) return Truth::Refuted;
    return Truth::Unknown;
}

} // namespace qforma

#endif
