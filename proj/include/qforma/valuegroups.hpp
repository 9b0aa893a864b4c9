#ifndef QFORMA_VALUEGROUPS_HPP
#define QFORMA_VALUEGROUPS_HPP

// Value sets and groups attached to a quadratic form:
//  - D(f): square classes represented by f,
//  - D(f)D(f): pairwise products of represented classes,
//  - N(f): the group generated by D(f)D(f),
//  - T(f): the group generated by D(f),
//  - G(f): similarity factors.
// Over a finite square-class group the sets are enumerated exactly; over the
// rationals they are exposed as membership predicates (D and D.D decide
// exactly, T and N use a bounded product search and may answer Unknown).

#include <functional>
#include <set>

#include "qforma/isotropy.hpp"

namespace qforma {

struct ClassSet {
    FieldPtr field;
    bool finite;
    std::vector<SquareClass> classes;             // populated in finite mode, sorted
    std::function<Truth(const FieldElem&)> member;
    std::string provenance;                       // operation that built the set
};

inline Truth class_set_member(const ClassSet& s, const FieldElem& c) {
    if (fe_is_zero(c)) throw ZeroInput("zero has no square class");
    return s.member(c);
}

inline bool class_set_equal(const ClassSet& a, const ClassSet& b) {
    if (!a.finite || !b.finite) throw UndecidableField("set equality needs finite mode");
    if (a.classes.size() != b.classes.size()) return false;
    for (size_t i = 0; i < a.classes.size(); ++i)
        if (!fe_eq(a.classes[i].rep, b.classes[i].rep)) return false;
    return true;
}

inline bool class_set_subset(const ClassSet& a, const ClassSet& b) {
    if (!a.finite) throw UndecidableField("subset test needs a finite left side");
    for (const SquareClass& c : a.classes)
        if (b.member(c.rep) != Truth::Proven) return false;
    return true;
}

namespace detail {

inline ClassSet finite_class_set(const FieldPtr& field, std::set<SquareClass> classes,
                                 std::string provenance) {
    auto elems = std::make_shared<std::vector<SquareClass>>(classes.begin(), classes.end());
    auto member = [elems](const FieldElem& c) {
        SquareClass sc = square_class(c);
        for (const SquareClass& x : *elems)
            if (fe_eq(x.rep, sc.rep)) return Truth::Proven;
        return Truth::Refuted;
    };
    return {field, true, *elems, std::move(member), std::move(provenance)};
}

// Square classes form an elementary abelian 2-group, so the subgroup
// generated by a set is its closure under products.
inline std::set<SquareClass> subgroup_closure(const FieldPtr& field,
                                              const std::set<SquareClass>& gens) {
    std::set<SquareClass> out{SquareClass{fe_one(field)}};
    for (const SquareClass& g : gens) out.insert(square_class(g.rep));
    for (;;) {
        std::set<SquareClass> next = out;
        for (const SquareClass& a : out)
            for (const SquareClass& b : out) next.insert(square_class(fe_mul(a.rep, b.rep)));
        if (next.size() == out.size()) return out;
        out = std::move(next);
    }
}

// Decision-only representation test (no witness synthesis).
inline Truth represents_decision(const QuadForm& f, const FieldElem& c) {
    if (f.field->kind == FieldKind::Rationals) {
        auto cs = form_rats(f);
        cs.push_back(-std::get<BigRat>(c.val));
        return is_isotropic_rationals(cs) ? Truth::Proven : Truth::Refuted;
    }
    switch (f.field->kind) {
        case FieldKind::PrimeField:
        case FieldKind::LaurentTower: {
            for (const FieldElem& a : f.coeffs)
                if (fe_is_square(fe_div(c, a))) return Truth::Proven;
            return is_isotropic(orth_sum(f, make_form(f.field, {fe_neg(c)}))).status;
        }
        default: return represents(f, c).status;
    }
}

} // namespace detail

// c in D(f)D(f), decided through isotropy of f + (-c f): the two forms share
// a represented value exactly when the sum has a nontrivial zero.
inline Truth dd_membership(const QuadForm& f, const FieldElem& c) {
    if (!field_eq(f.field, c.field)) throw FieldMismatch("value from a different field");
    if (fe_is_zero(c)) throw ZeroInput("zero is not a product of represented values");
    if (form_dim(f) == 0) return Truth::Refuted;
    return is_isotropic(orth_sum(f, scale_form(fe_neg(c), f))).status;
}

inline bool dd_member(const QuadForm& f, const FieldElem& c) {
    Truth t = dd_membership(f, c);
    if (t == Truth::Unknown) throw UndecidableField("product-set membership undecided");
    return t == Truth::Proven;
}

inline ClassSet d_set(const QuadForm& f) {
    const FieldPtr& field = f.field;
    ClassGroup g = class_group(field);
    if (g.finite) {
        std::set<SquareClass> hits;
        for (const SquareClass& c : g.elems)
            if (detail::represents_decision(f, c.rep) == Truth::Proven) hits.insert(c);
        return detail::finite_class_set(field, std::move(hits), "d-set");
    }
    QuadForm copy = f;
    auto member = [copy](const FieldElem& c) { return detail::represents_decision(copy, c); };
    return {field, false, {}, std::move(member), "d-set"};
}

inline ClassSet dd_set(const QuadForm& f) {
    const FieldPtr& field = f.field;
    ClassGroup g = class_group(field);
    if (g.finite) {
        ClassSet d = d_set(f);
        std::set<SquareClass> prods;
        for (const SquareClass& a : d.classes)
            for (const SquareClass& b : d.classes) prods.insert(square_class(fe_mul(a.rep, b.rep)));
        return detail::finite_class_set(field, std::move(prods), "dd-set");
    }
    QuadForm copy = f;
    auto member = [copy](const FieldElem& c) { return dd_membership(copy, c); };
    return {field, false, {}, std::move(member), "dd-set"};
}

namespace detail {

// Bounded product-length membership over the rationals. Exact for lengths
// 1 and 2; lengths 3 and 4 restrict the split factor to square classes
// supported on the primes of the form and the target. Beyond the bound the
// answer is Unknown.
inline Truth bounded_product_membership(const QuadForm& f, const FieldElem& c, bool even_only) {
    const FieldPtr& field = f.field;
    const BigRat cr = std::get<BigRat>(c.val);
    auto cs = form_rats(f);

    if (form_dim(f) == 1) {
        // D = aK*^2: T = {1, a}, N = {1}.
        if (is_square_rat(cr)) return Truth::Proven;
        if (even_only) return Truth::Refuted;
        return is_square_rat(cr / cs[0]) ? Truth::Proven : Truth::Refuted;
    }
    if (is_isotropic_rationals(cs)) return Truth::Proven;   // universal form
    auto [pos, neg] = signature_rationals(cs);
    bool pos_def = neg == 0, neg_def = pos == 0;
    // Positive definite: all represented values are positive. Any definite
    // form: products of evenly many values are positive.
    if (cr < 0 && (pos_def || (neg_def && even_only))) return Truth::Refuted;

    auto dd = [&](const BigRat& x) {
        std::vector<BigRat> ext = cs;
        for (const BigRat& a : cs) ext.push_back(-x * a);
        return is_isotropic_rationals(ext);
    };
    auto rep = [&](const BigRat& x) {
        std::vector<BigRat> ext = cs;
        ext.push_back(-x);
        return is_isotropic_rationals(ext);
    };
    if (!even_only && rep(cr)) return Truth::Proven;   // length 1
    if (dd(cr)) return Truth::Proven;                  // length 2

    std::set<BigInt> primes{BigInt(2)};
    for (const BigRat& x : cs)
        for (auto& [p, e] : factorize(abs_int(squarefree_part(x)))) {
            (void)e;
            primes.insert(p);
        }
    for (auto& [p, e] : factorize(abs_int(squarefree_part(cr)))) {
        (void)e;
        primes.insert(p);
    }
    if (primes.size() > 16) return Truth::Unknown;
    std::vector<BigInt> ps(primes.begin(), primes.end());
    std::vector<BigRat> pool;
    for (size_t mask = 0; mask < (size_t(1) << ps.size()); ++mask) {
        BigInt m = 1;
        for (size_t i = 0; i < ps.size(); ++i)
            if (mask & (size_t(1) << i)) m *= ps[i];
        pool.push_back(BigRat(m));
        pool.push_back(BigRat(-m));
    }
    if (!even_only)
        for (const BigRat& d : pool)     // length 3: c = d * (pair), d in D
            if (rep(d) && dd(cr * d)) return Truth::Proven;
    for (const BigRat& e : pool)         // length 4: c = (pair) * (pair)
        if (dd(e) && dd(cr * e)) return Truth::Proven;
    (void)field;
    return Truth::Unknown;
}

inline ClassSet generated_group(const QuadForm& f, bool even_only, const char* provenance) {
    const FieldPtr& field = f.field;
    ClassGroup g = class_group(field);
    if (g.finite) {
        ClassSet base = even_only ? dd_set(f) : d_set(f);
        std::set<SquareClass> gens(base.classes.begin(), base.classes.end());
        return finite_class_set(field, subgroup_closure(field, gens), provenance);
    }
    if (field->kind != FieldKind::Rationals)
        throw UndecidableField("group closure needs a finite class group or the rationals");
    QuadForm copy = f;
    auto member = [copy, even_only](const FieldElem& c) {
        return bounded_product_membership(copy, c, even_only);
    };
    ClassSet out{field, false, {}, std::move(member), provenance};
    return out;
}

} // namespace detail

inline ClassSet t_group(const QuadForm& f) { return detail::generated_group(f, false, "t-group"); }
inline ClassSet n_group(const QuadForm& f) { return detail::generated_group(f, true, "n-group"); }

// c a similarity factor of f: scale(c, f) isometric to f.
inline bool g_member(const QuadForm& f, const FieldElem& c) {
    if (fe_is_zero(c)) throw ZeroInput("zero is not a similarity factor");
    Truth t = is_isometric(scale_form(c, f), f);
    if (t == Truth::Unknown) throw UndecidableField("similarity factor test undecided");
    return t == Truth::Proven;
}

// Diagnostic law: for a represented value a, the group generated by the
// values of the scaled form a*f equals N(f).
inline bool scaled_t_equals_n(const QuadForm& f, const FieldElem& a) {
    if (detail::represents_decision(f, a) != Truth::Proven)
        throw NotRepresented("scaling value is not represented by the form");
    ClassSet t = t_group(scale_form(a, f));
    ClassSet n = n_group(f);
    return class_set_equal(t, n);
}

} // namespace qforma

#endif
