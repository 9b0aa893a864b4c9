#ifndef QFORMA_REPTFACTOR_HPP
#define QFORMA_REPTFACTOR_HPP

#include "qforma/hasse.hpp"
#include "qforma/isotropy.hpp"
#include "qforma/polyfactor.hpp"
#include "qforma/quadform.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qforma {

// A divisibility witness for f against a diagonal form: polynomials p with
// form(p) = f*h exactly, and not every entry divisible by f.
struct DivisibilityWitness {
    std::vector<Poly> p;
    Poly h;
    Poly f;
};

// One factor of a product certificate, in cleared-denominator shape:
//   value  = value_num / value_den,
//   vector = vec_nums / vec_den,
// tied together by the polynomial identity
//   form(vec_nums) * value_den = value_num * vec_den^2,
// which says exactly that the form takes the stated value on the vector.
struct ProductFactor {
    Poly value_num;
    Poly value_den;
    std::vector<Poly> vec_nums;
    Poly vec_den;
};

// Certificate that the target equals a product of at most `bound` nonzero
// values of the form over the rational function field of the target's ring.
struct ProductCertificate {
    QuadForm form;
    Poly target;
    size_t bound = 0;
    std::vector<ProductFactor> factors;
};

struct RepVerdict {
    Truth status;
    std::optional<ProductCertificate> certificate;
};

namespace detail {

inline Poly poly_one(const FieldPtr& cf, const std::vector<std::string>& vars) {
    return poly_const(cf, vars, fe_one(cf));
}

inline FieldElem poly_const_value(const Poly& f) {
    if (poly_is_zero(f)) return fe_zero(f.coeff_field);
    if (poly_total_deg(f) != 0) throw Error("nonconstant polynomial used as a scalar");
    return f.terms.begin()->second;
}

// Index of the unique variable occurring in f; rejects constants.
inline size_t only_active_var(const Poly& f) {
    size_t vi = f.vars.size();
    for (size_t i = 0; i < f.vars.size(); ++i) {
        if (poly_deg(f, i) <= 0) continue;
        if (vi != f.vars.size())
            throw HypothesisViolated("polynomial is not univariate: " + poly_to_string(f));
        vi = i;
    }
    if (vi == f.vars.size())
        throw HypothesisViolated("constant polynomial where a univariate was expected");
    return vi;
}

inline void require_unitary_univ(const Poly& f, size_t vi) {
    int d = poly_deg(f, vi);
    if (d <= 0) throw HypothesisViolated("nonconstant polynomial expected");
    Poly lead = poly_coeff_of(f, vi, d);
    if (poly_total_deg(lead) != 0 || !fe_is_one(lead.terms.begin()->second))
        throw HypothesisViolated("polynomial is not unitary in " + f.vars[vi]);
}

// Irreducibility precondition; accepted untested over coefficient fields
// without a factorization routine.
inline void require_irreducible_univ(const Poly& f, size_t vi) {
    try {
        if (!poly_irreducible_in_var(f, vi))
            throw HypothesisViolated("reducible polynomial: " + poly_to_string(f));
    } catch (const UnsupportedField&) {
    }
}

inline Poly rem_mod(const Poly& g, const Poly& f, size_t vi) {
    return poly_divmod_univ(g, f, vi).second;
}

} // namespace detail

inline void verify_product_factor(const QuadForm& form, const ProductFactor& fac) {
    if (fac.vec_nums.size() != form_dim(form))
        throw BadCertificate("factor vector length does not match the form dimension");
    if (poly_is_zero(fac.value_num) || poly_is_zero(fac.value_den) || poly_is_zero(fac.vec_den))
        throw BadCertificate("zero value or denominator in a certificate factor");
    Poly lhs = poly_mul(evaluate_poly(form, fac.vec_nums), fac.value_den);
    Poly rhs = poly_mul(fac.value_num, poly_mul(fac.vec_den, fac.vec_den));
    if (!poly_eq(lhs, rhs)) throw BadCertificate("certificate factor identity fails");
}

inline void verify_certificate(const ProductCertificate& cert) {
    if (cert.factors.size() > cert.bound)
        throw BadCertificate("factor count exceeds the declared bound");
    Poly nums = detail::poly_one(cert.target.coeff_field, cert.target.vars);
    Poly dens = nums;
    for (const ProductFactor& fac : cert.factors) {
        verify_product_factor(cert.form, fac);
        nums = poly_mul(nums, fac.value_num);
        dens = poly_mul(dens, fac.value_den);
    }
    if (!poly_eq(nums, poly_mul(cert.target, dens)))
        throw BadCertificate("product of factor values does not equal the target");
}

inline void verify_divisibility_witness(const QuadForm& form, const DivisibilityWitness& w) {
    if (form_dim(form) == 0) throw BadWitness("empty form");
    if (w.p.size() != form_dim(form))
        throw BadWitness("witness length does not match the form dimension");
    if (poly_total_deg(w.f) <= 0) throw BadWitness("witness target must be nonconstant");
    Poly val = evaluate_poly(form, w.p);
    if (!poly_eq(val, poly_mul(w.f, w.h)))
        throw BadWitness("form value does not equal f*h");
    for (const Poly& q : w.p)
        if (!poly_try_div(q, w.f)) return;
    throw BadWitness("every witness entry is divisible by f");
}

inline DivisibilityWitness make_divisibility_witness(const QuadForm& form,
                                                     const std::vector<Poly>& p, const Poly& f) {
    if (p.empty()) throw BadWitness("empty witness vector");
    auto h = poly_try_div(evaluate_poly(form, p), f);
    if (!h) throw BadWitness("f does not divide the form value");
    DivisibilityWitness w{p, *h, f};
    verify_divisibility_witness(form, w);
    return w;
}

namespace detail {

// Certificate factor g = form(u) built from a constant isotropic vector v:
// u = alpha*v + e_j with alpha = (g - a_j) / (2 a_j v_j).
inline ProductFactor universal_factor(const QuadForm& form, const Vec& v, const Poly& g) {
    size_t n = form_dim(form);
    size_t j = n;
    for (size_t i = 0; i < n; ++i)
        if (!fe_is_zero(v[i])) { j = i; break; }
    if (j == n) throw Error("zero vector offered as an isotropic witness");
    FieldElem beta = fe_mul(form.coeffs[j], v[j]);
    FieldElem scale = fe_inv(fe_mul(fe_from_int(form.field, 2), beta));
    Poly aj = poly_const(g.coeff_field, g.vars, form.coeffs[j]);
    Poly alpha = poly_scale(scale, poly_sub(g, aj));
    std::vector<Poly> u;
    u.reserve(n);
    for (size_t i = 0; i < n; ++i) u.push_back(poly_scale(v[i], alpha));
    u[j] = poly_add(u[j], poly_one(g.coeff_field, g.vars));
    Poly one = poly_one(g.coeff_field, g.vars);
    return {g, one, std::move(u), one};
}

// (value, vector) -> (1/value, vector/value) in cleared-denominator shape.
inline ProductFactor invert_factor(const ProductFactor& fac) {
    std::vector<Poly> nums;
    nums.reserve(fac.vec_nums.size());
    for (const Poly& q : fac.vec_nums) nums.push_back(poly_mul(q, fac.value_den));
    return {fac.value_den, fac.value_num, std::move(nums), poly_mul(fac.vec_den, fac.value_num)};
}

// Core recursion: certificate with at most deg f factors for an irreducible
// unitary f from a witness vector p with f | form(p), for a base form with no
// constructive isotropic vector. Reduces p mod f, strips the gcd, peels the
// leading value, and inverts the certificates of the cofactor's irreducible
// factors.
inline ProductCertificate factor_univ_rec(const QuadForm& form, const Poly& f, size_t vi,
                                          const std::vector<Poly>& p) {
    size_t n = form_dim(form);
    int d = poly_deg(f, vi);
    if (d == 1)
        throw HypothesisViolated(
            "a linear target with a reduced witness exhibits an isotropic vector of the base form");

    std::vector<Poly> pbar;
    pbar.reserve(n);
    for (const Poly& q : p) pbar.push_back(rem_mod(q, f, vi));
    Poly g = poly_zero(f.coeff_field, f.vars);
    for (const Poly& q : pbar) g = poly_gcd(g, q);
    if (poly_is_zero(g)) throw BadWitness("every witness entry is divisible by f");
    if (poly_total_deg(g) > 0)
        for (Poly& q : pbar) q = poly_div_exact(q, g);

    // Leading vector and its value; anisotropy forces the top coefficients of
    // form(pbar) to survive, so the evaluated degree is twice the maximum.
    int D = -1;
    for (const Poly& q : pbar) D = std::max(D, poly_deg(q, vi));
    Vec lead;
    lead.reserve(n);
    for (const Poly& q : pbar)
        lead.push_back(poly_deg(q, vi) == D ? poly_const_value(poly_coeff_of(q, vi, D))
                                            : fe_zero(form.field));
    FieldElem a = evaluate(form, lead);
    if (fe_is_zero(a))
        throw HypothesisViolated(
            "leading coefficients cancel: the base form has an isotropic vector");
    Poly q = evaluate_poly(form, pbar);
    if (poly_deg(q, vi) != 2 * D || !fe_eq(poly_const_value(poly_coeff_of(q, vi, 2 * D)), a))
        throw Error("leading value does not match the evaluated degree");

    auto [hbar, hrem] = poly_divmod_univ(q, f, vi);
    if (!poly_is_zero(hrem)) throw Error("f stopped dividing the reduced form value");
    Poly hmon = poly_scale(fe_inv(a), hbar);

    Poly one = poly_one(f.coeff_field, f.vars);
    std::vector<ProductFactor> factors;
    if (!fe_is_one(a)) {
        // 1/a = form(lead/a), cleared: form(lead)*a = 1*a^2.
        std::vector<Poly> cl;
        cl.reserve(n);
        for (const FieldElem& c : lead) cl.push_back(poly_const(f.coeff_field, f.vars, c));
        Poly ac = poly_const(f.coeff_field, f.vars, a);
        factors.push_back({one, ac, std::move(cl), ac});
    }
    factors.push_back({q, one, pbar, one});

    if (poly_deg(hmon, vi) > 0) {
        PolyFactors hf = factor_in_var(hmon, vi);
        if (!fe_is_one(hf.unit)) throw Error("unitary cofactor factored with a nontrivial unit");
        for (auto& [hj, ej] : hf.factors) {
            if (poly_deg(hj, vi) == 1)
                throw HypothesisViolated(
                    "linear cofactor: the base form has an isotropic vector over the base field");
            ProductCertificate sub = factor_univ_rec(form, hj, vi, pbar);
            for (int e = 0; e < ej; ++e)
                for (const ProductFactor& fac : sub.factors)
                    factors.push_back(invert_factor(fac));
        }
    }

    ProductCertificate cert{form, f, static_cast<size_t>(d), std::move(factors)};
    if (cert.factors.size() > cert.bound) throw Error("factor count exceeds the degree bound");
    return cert;
}

} // namespace detail

// Lift an isotropic residue-ring vector to a divisibility witness: reduce the
// entries mod f and divide the form value by f.
inline DivisibilityWitness isotropy_to_divisibility(const QuadForm& form, const Poly& f,
                                                    const std::vector<Poly>& iso) {
    size_t vi = detail::only_active_var(f);
    detail::require_irreducible_univ(f, vi);
    if (!field_eq(f.coeff_field, form.field))
        throw FieldMismatch("polynomial ring over a different field");
    if (iso.size() != form_dim(form) || iso.empty())
        throw NotIsotropic("vector length does not match the form dimension");
    std::vector<Poly> p;
    p.reserve(iso.size());
    bool nonzero = false;
    for (const Poly& q : iso) {
        p.push_back(detail::rem_mod(q, f, vi));
        nonzero = nonzero || !poly_is_zero(p.back());
    }
    if (!nonzero) throw NotIsotropic("zero vector in the residue ring");
    auto [h, r] = poly_divmod_univ(evaluate_poly(form, p), f, vi);
    if (!poly_is_zero(r)) throw NotIsotropic("form value is nonzero in the residue ring");
    return {std::move(p), std::move(h), f};
}

// From a certificate whose target is a*f with a constant: strip factors whose
// vector is wholly divisible by f, locate a factor value divisible by f, and
// reduce its vector mod f. The result is a nonzero isotropic vector of the
// residue ring.
inline std::vector<Poly> divisibility_to_isotropy(const QuadForm& form, const Poly& f,
                                                  const ProductCertificate& w) {
    size_t vi = detail::only_active_var(f);
    detail::require_irreducible_univ(f, vi);
    if (form_dim(form) != form_dim(w.form))
        throw BadCertificate("certificate is for a different form");
    for (size_t i = 0; i < form_dim(form); ++i)
        if (!fe_eq(form.coeffs[i], w.form.coeffs[i]))
            throw BadCertificate("certificate is for a different form");
    verify_certificate(w);
    auto [tq, tr] = poly_divmod_univ(w.target, f, vi);
    if (!poly_is_zero(tr) || poly_is_zero(tq) || poly_total_deg(tq) != 0)
        throw BadCertificate("certificate target is not a scalar multiple of f");

    IsoResult iso = is_isotropic(form);
    if (iso.status == Truth::Proven && iso.witness) {
        std::vector<Poly> v;
        v.reserve(form_dim(form));
        for (const FieldElem& c : *iso.witness)
            v.push_back(poly_const(f.coeff_field, f.vars, c));
        return v;
    }

    std::vector<std::vector<Poly>> vecs;
    vecs.reserve(w.factors.size());
    for (const ProductFactor& fac : w.factors) vecs.push_back(fac.vec_nums);
    // Cancellation: a vector wholly divisible by f contributes an f^2 that
    // must cancel; divide it out until none remains.
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& vec : vecs) {
            bool all = true;
            for (const Poly& q : vec)
                if (!poly_is_zero(detail::rem_mod(q, f, vi))) { all = false; break; }
            if (!all) continue;
            for (Poly& q : vec) q = poly_divmod_univ(q, f, vi).first;
            changed = true;
        }
    }
    for (const auto& vec : vecs) {
        if (!poly_is_zero(detail::rem_mod(evaluate_poly(form, vec), f, vi))) continue;
        std::vector<Poly> out;
        out.reserve(vec.size());
        bool nonzero = false;
        for (const Poly& q : vec) {
            out.push_back(detail::rem_mod(q, f, vi));
            nonzero = nonzero || !poly_is_zero(out.back());
        }
        if (!nonzero) throw Error("cancellation left a zero residue vector");
        return out;
    }
    throw BadCertificate("no factor value is divisible by f after cancellation");
}

// Certificate with at most deg f factors for an irreducible unitary f from a
// divisibility witness, over an anisotropic base form. An isotropic base form
// short-circuits to a single universal factor.
inline ProductCertificate factor_univariate(const QuadForm& form, const Poly& f,
                                            const DivisibilityWitness& w) {
    size_t vi = detail::only_active_var(f);
    detail::require_unitary_univ(f, vi);
    detail::require_irreducible_univ(f, vi);
    if (!field_eq(f.coeff_field, form.field))
        throw FieldMismatch("polynomial ring over a different field");
    if (!poly_eq(w.f, f)) throw BadWitness("witness is for a different polynomial");
    verify_divisibility_witness(form, w);

    IsoResult iso = is_isotropic(form);
    if (iso.status == Truth::Proven) {
        if (!iso.witness)
            throw IsotropicBase("isotropic base form without a constructive vector");
        ProductCertificate cert{form, f, static_cast<size_t>(poly_deg(f, vi)),
                                {detail::universal_factor(form, *iso.witness, f)}};
        verify_certificate(cert);
        return cert;
    }
    ProductCertificate cert = detail::factor_univ_rec(form, f, vi, w.p);
    verify_certificate(cert);
    return cert;
}

namespace detail {

// Exhaustive isotropy in the residue field GF(p)[X]/(f) = GF(p^deg f).
// Dimension >= 3 is always isotropic over a finite field; dimension 2 reduces
// to a square-class test of -a1*a0 decided in GF(p) plus the parity of deg f.
// The optional vector is withheld when the residue field is too large to scan.
struct ResidueDecision {
    Truth status;
    std::optional<std::vector<Poly>> vec;
};

inline ResidueDecision residue_isotropic_primefield(const QuadForm& form, const Poly& f,
                                                    size_t vi) {
    long p = form.field->p;
    int d = poly_deg(f, vi);
    size_t n = form_dim(form);
    if (n <= 1) return {Truth::Refuted, std::nullopt};

    double qd = 1;
    for (int i = 0; i < d; ++i) qd *= static_cast<double>(p);
    long q = qd > 4e6 ? -1 : static_cast<long>(qd);

    auto elem = [&](long idx) {
        Poly r = poly_zero(f.coeff_field, f.vars);
        for (int pos = 0; pos < d && idx > 0; ++pos, idx /= p) {
            long digit = idx % p;
            if (digit == 0) continue;
            Exps e(f.vars.size(), 0);
            e[vi] = pos;
            r.terms.emplace(std::move(e), FieldElem{form.field, digit});
        }
        return r;
    };
    auto residue_zero = [&](const Poly& val) { return poly_is_zero(rem_mod(val, f, vi)); };

    if (n == 2) {
        long z = pf_mul(pf_norm(-fe_as_pf(form.coeffs[1]), p),
                        pf_inv(fe_as_pf(form.coeffs[0]), p), p);
        bool square = pf_is_square(z, p) || d % 2 == 0;
        if (!square) return {Truth::Refuted, std::nullopt};
        if (q < 0 || q > 4000) return {Truth::Proven, std::nullopt};
        for (long i = 1; i < q; ++i) {
            Poly t = elem(i);
            Poly val = poly_add(poly_scale(form.coeffs[0], poly_mul(t, t)),
                                poly_const(f.coeff_field, f.vars, form.coeffs[1]));
            if (!residue_zero(val)) continue;
            return {Truth::Proven, std::vector<Poly>{t, poly_one(f.coeff_field, f.vars)}};
        }
        throw Error("square class test and residue scan disagree");
    }

    // A binary subform represents every nonzero residue, so a vector of the
    // shape (t, u, 1, 0, ...) always exists.
    if (q < 0 || q > 2000) return {Truth::Proven, std::nullopt};
    for (long i = 0; i < q; ++i) {
        Poly t = elem(i);
        Poly at = poly_scale(form.coeffs[0], poly_mul(t, t));
        for (long j = 0; j < q; ++j) {
            Poly u = elem(j);
            Poly val = poly_add(at, poly_add(poly_scale(form.coeffs[1], poly_mul(u, u)),
                                             poly_const(f.coeff_field, f.vars, form.coeffs[2])));
            if (!residue_zero(val)) continue;
            std::vector<Poly> vec{t, u, poly_one(f.coeff_field, f.vars)};
            for (size_t k = 3; k < n; ++k) vec.push_back(poly_zero(f.coeff_field, f.vars));
            return {Truth::Proven, std::move(vec)};
        }
    }
    throw Error("residue scan over a finite field found no vector in dimension >= 3");
}

// Isotropic residue vector over QQ[X]/(f) for quadratic f = X^2 + bX + c,
// built from an orthogonal pair: x = e_j with value a_j, and y in the
// coordinate complement with value -a_j*disc. Then y + (2X+b)x works, since
// (2X+b)^2 reduces to disc = b^2 - 4c.
inline std::optional<std::vector<Poly>> quadext_slot_vector(const QuadForm& form, const Poly& f,
                                                            size_t vi, const BigRat& b,
                                                            const BigRat& disc) {
    std::vector<BigRat> cs = form_rats(form);
    size_t n = cs.size();
    Poly root = poly_add(poly_scale(fe_from_int(form.field, 2),
                                    poly_var(f.coeff_field, f.vars, f.vars[vi])),
                         poly_const(f.coeff_field, f.vars, fe_from_rat(form.field, b)));
    for (size_t j = 0; j < n; ++j) {
        std::vector<BigRat> sub;
        for (size_t i = 0; i < n; ++i)
            if (i != j) sub.push_back(cs[i]);
        if (sub.empty()) continue;
        auto y = represent_rationals(sub, -cs[j] * disc);
        if (!y) continue;
        std::vector<Poly> vec(n, poly_zero(f.coeff_field, f.vars));
        size_t k = 0;
        for (size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            vec[i] = poly_const(f.coeff_field, f.vars, fe_from_rat(form.field, (*y)[k++]));
        }
        vec[j] = root;
        return vec;
    }
    return std::nullopt;
}

// Fallback scan over residue vectors with degree-<2 entries and small integer
// coordinates, one entry pinned to 1 or X.
inline std::optional<std::vector<Poly>> quadext_search(const QuadForm& form, const Poly& f,
                                                       size_t vi) {
    size_t n = form_dim(form);
    const long H = 2;
    const long range = 2 * H + 1;
    long budget = 200000;
    Poly x = poly_var(f.coeff_field, f.vars, f.vars[vi]);
    Poly one = poly_one(f.coeff_field, f.vars);
    auto entry = [&](long alpha, long beta) {
        return poly_add(poly_const(f.coeff_field, f.vars, fe_from_int(form.field, alpha)),
                        poly_scale(fe_from_int(form.field, beta), x));
    };
    for (size_t j = 0; j < n; ++j) {
        for (int pin = 0; pin < 2; ++pin) {
            std::vector<long> digits(2 * (n - 1), 0);
            bool done = false;
            while (!done) {
                if (--budget < 0) return std::nullopt;
                std::vector<Poly> vec(n, poly_zero(f.coeff_field, f.vars));
                vec[j] = pin ? x : one;
                size_t k = 0;
                for (size_t i = 0; i < n; ++i) {
                    if (i == j) continue;
                    vec[i] = entry(digits[2 * k] - H, digits[2 * k + 1] - H);
                    ++k;
                }
                if (poly_is_zero(rem_mod(evaluate_poly(form, vec), f, vi))) return vec;
                size_t pos = 0;
                while (pos < digits.size() && ++digits[pos] == range) digits[pos++] = 0;
                done = pos == digits.size();
            }
        }
    }
    return std::nullopt;
}

} // namespace detail

// Decide whether the form acquires an isotropic vector over K[X]/(f), and
// emit a product certificate for f when a constructive vector is available.
// Decidable residue fields: any extension of GF(p), the base field itself
// (deg f = 1), and quadratic extensions of QQ.
inline RepVerdict represent_decide_univariate(const QuadForm& form, const Poly& f) {
    size_t vi = detail::only_active_var(f);
    detail::require_unitary_univ(f, vi);
    detail::require_irreducible_univ(f, vi);
    if (!field_eq(f.coeff_field, form.field))
        throw FieldMismatch("polynomial ring over a different field");
    int d = poly_deg(f, vi);

    IsoResult iso = is_isotropic(form);
    if (iso.status == Truth::Proven) {
        if (!iso.witness) return {Truth::Proven, std::nullopt};
        ProductCertificate cert{form, f, static_cast<size_t>(d),
                                {detail::universal_factor(form, *iso.witness, f)}};
        verify_certificate(cert);
        return {Truth::Proven, std::move(cert)};
    }
    if (represents(form, fe_one(form.field)).status != Truth::Proven)
        throw HypothesisViolated("the form must represent 1");
    if (iso.status == Truth::Unknown) return {Truth::Unknown, std::nullopt};
    if (d == 1) return {Truth::Refuted, std::nullopt};

    auto emit = [&](const std::vector<Poly>& vec) -> RepVerdict {
        DivisibilityWitness w = isotropy_to_divisibility(form, f, vec);
        return {Truth::Proven, factor_univariate(form, f, w)};
    };

    if (form.field->kind == FieldKind::PrimeField) {
        detail::ResidueDecision rd = detail::residue_isotropic_primefield(form, f, vi);
        if (rd.status != Truth::Proven) return {rd.status, std::nullopt};
        if (!rd.vec) return {Truth::Proven, std::nullopt};
        return emit(*rd.vec);
    }

    if (form.field->kind == FieldKind::Rationals && d == 2) {
        BigRat b = detail::fe_as_rat(detail::poly_const_value(poly_coeff_of(f, vi, 1)));
        BigRat c = detail::fe_as_rat(detail::poly_const_value(poly_coeff_of(f, vi, 0)));
        BigRat disc = b * b - 4 * c;
        if (!is_isotropic_quadratic_ext(detail::form_rats(form), disc))
            return {Truth::Refuted, std::nullopt};
        if (auto vec = detail::quadext_slot_vector(form, f, vi, b, disc)) return emit(*vec);
        if (auto vec = detail::quadext_search(form, f, vi)) return emit(*vec);
        return {Truth::Proven, std::nullopt};
    }

    return {Truth::Unknown, std::nullopt};
}

namespace detail {

// Reindex a polynomial with zero degree in slot vi into the ring without that
// variable, and back.
inline Poly drop_var(const Poly& q, size_t vi, const std::vector<std::string>& subvars) {
    Poly r = poly_zero(q.coeff_field, subvars);
    for (auto& [e, c] : q.terms) {
        Exps ee;
        ee.reserve(e.size() - 1);
        for (size_t i = 0; i < e.size(); ++i) {
            if (i == vi) {
                if (e[i] != 0) throw Error("dropped variable occurs in the polynomial");
                continue;
            }
            ee.push_back(e[i]);
        }
        r.terms.emplace(std::move(ee), c);
    }
    return r;
}

inline Poly insert_var(const Poly& q, size_t vi, const std::vector<std::string>& vars) {
    Poly r = poly_zero(q.coeff_field, vars);
    for (auto& [e, c] : q.terms) {
        Exps ee(vars.size(), 0);
        size_t src = 0;
        for (size_t i = 0; i < vars.size(); ++i) ee[i] = i == vi ? 0 : e[src++];
        r.terms.emplace(std::move(ee), c);
    }
    return r;
}

// View q in (K[X'])[X_vi] and push the coefficients into L = K(X'): the
// result is univariate over L.
inline Poly poly_over_ff(const Poly& q, size_t vi, const FieldPtr& L) {
    Poly r = poly_zero(L, {q.vars[vi]});
    for (auto& [k, coeff] : poly_univar_view(q, vi)) {
        FieldElem ce = fe_from_poly(L, drop_var(coeff, vi, L->vars));
        if (!fe_is_zero(ce)) r.terms.emplace(Exps{k}, ce);
    }
    return r;
}

// Split a univariate polynomial over K(X') into a numerator in the full ring
// K[X] and a denominator free of the distinguished variable.
inline std::pair<Poly, Poly> flatten_ff_poly(const Poly& P, size_t vi,
                                             const std::vector<std::string>& vars) {
    const FieldPtr& L = P.coeff_field;
    const FieldPtr& K = L->base;
    Poly common = poly_one(K, L->vars);
    for (auto& [e, c] : P.terms) {
        const FracVal& fv = *std::get<FracPtr>(c.val);
        Poly g = poly_gcd(common, fv.den);
        common = poly_div_exact(poly_mul(common, fv.den), g);
    }
    Poly num = poly_zero(K, vars);
    for (auto& [e, c] : P.terms) {
        const FracVal& fv = *std::get<FracPtr>(c.val);
        Poly scaled = poly_mul(fv.num, poly_div_exact(common, fv.den));
        for (auto& [ee, cc] : scaled.terms) {
            Exps big(vars.size(), 0);
            size_t src = 0;
            for (size_t i = 0; i < vars.size(); ++i) big[i] = i == vi ? e[0] : ee[src++];
            num.terms.emplace(std::move(big), cc);
        }
    }
    return {std::move(num), insert_var(common, vi, vars)};
}

// Convert a certificate factor over L = K(X') back to the polynomial ring
// K[X], preserving the value and the vector as rational functions.
inline ProductFactor refactor_from_ff(const QuadForm& form, const ProductFactor& fac, size_t vi,
                                      const std::vector<std::string>& vars) {
    auto [vn, vnd] = flatten_ff_poly(fac.value_num, vi, vars);
    auto [vd, vdd] = flatten_ff_poly(fac.value_den, vi, vars);
    Poly num = poly_mul(vn, vdd);
    Poly den = poly_mul(vd, vnd);
    Poly g = poly_gcd(num, den);
    num = poly_div_exact(num, g);
    den = poly_div_exact(den, g);

    auto [dt, gam] = flatten_ff_poly(fac.vec_den, vi, vars);
    const FieldPtr& K = form.field;
    Poly beta = poly_one(K, vars);
    std::vector<Poly> ns, bs;
    ns.reserve(fac.vec_nums.size());
    bs.reserve(fac.vec_nums.size());
    for (const Poly& q : fac.vec_nums) {
        auto [ni, bi] = flatten_ff_poly(q, vi, vars);
        beta = poly_div_exact(poly_mul(beta, bi), poly_gcd(beta, bi));
        ns.push_back(std::move(ni));
        bs.push_back(std::move(bi));
    }
    std::vector<Poly> vecn;
    vecn.reserve(ns.size());
    for (size_t i = 0; i < ns.size(); ++i)
        vecn.push_back(poly_mul(poly_mul(ns[i], poly_div_exact(beta, bs[i])), gam));
    ProductFactor out{std::move(num), std::move(den), std::move(vecn), poly_mul(beta, dt)};
    verify_product_factor(form, out);
    return out;
}

// Induction on the variable count. The target is split as f = f_m * F with
// F unitary univariate over L = K(X'), the univariate recursion handles F,
// and f_m = r^2 * s is settled by one squared factor plus recursion on the
// squarefree part, whose witnesses come from specializing the product
// identity at X_vi = c.
inline ProductCertificate factor_multi_rec(const QuadForm& form, const Poly& f,
                                           const std::vector<Poly>& p) {
    const FieldPtr& K = form.field;
    LexLeading ll = poly_lex_leading(f);
    size_t M = static_cast<size_t>(ll.total_degree);
    std::vector<size_t> act;
    for (size_t i = 0; i < f.vars.size(); ++i)
        if (poly_deg(f, i) > 0) act.push_back(i);
    if (act.empty()) throw Error("constant target in the factorization recursion");
    if (!poly_try_div(evaluate_poly(form, p), f))
        throw Error("witness stopped dividing inside the recursion");
    size_t vi = act[0];
    if (act.size() == 1) return factor_univ_rec(form, f, vi, p);

    int m = poly_deg(f, vi);
    Poly fm = poly_coeff_of(f, vi, m);
    std::vector<std::string> sub;
    for (size_t i = 0; i < f.vars.size(); ++i)
        if (i != vi) sub.push_back(f.vars[i]);
    FieldPtr L = make_rational_functions(K, sub);

    std::vector<FieldElem> cl;
    cl.reserve(form_dim(form));
    for (const FieldElem& c : form.coeffs) cl.push_back(fe_from_poly(L, poly_const(K, sub, c)));
    QuadForm formL = make_form(L, std::move(cl));

    Poly fmd = drop_var(fm, vi, sub);
    Poly F = poly_zero(L, {f.vars[vi]});
    for (auto& [k, ck] : poly_univar_view(f, vi)) {
        FieldElem ce = fe_from_fraction(L, drop_var(ck, vi, sub), fmd);
        if (!fe_is_zero(ce)) F.terms.emplace(Exps{k}, ce);
    }
    std::vector<Poly> pL;
    pL.reserve(p.size());
    for (const Poly& q : p) pL.push_back(poly_over_ff(q, vi, L));
    ProductCertificate certF = factor_univ_rec(formL, F, 0, pL);

    std::vector<ProductFactor> factors;
    factors.reserve(certF.factors.size());
    for (const ProductFactor& fac : certF.factors)
        factors.push_back(refactor_from_ff(form, fac, vi, f.vars));
    size_t univ_count = factors.size();

    if (poly_total_deg(fm) > 0) {
        PolyFactors pfm = factor_poly(fm);
        if (!fe_is_one(pfm.unit))
            throw Error("unitary leading coefficient factored with a nontrivial unit");
        Poly one = poly_one(K, f.vars);
        Poly r = one;
        std::vector<Poly> odd;
        for (auto& [t, e] : pfm.factors) {
            for (int i = 0; i < e / 2; ++i) r = poly_mul(r, t);
            if (e % 2) odd.push_back(t);
        }
        if (poly_total_deg(r) > 0) {
            RepResult rep = represents(form, fe_one(K));
            if (rep.status != Truth::Proven || !rep.witness)
                throw UnsupportedField("no constructive representation of 1 over this field");
            std::vector<Poly> vec;
            vec.reserve(form_dim(form));
            for (const FieldElem& c : *rep.witness) vec.push_back(poly_scale(c, r));
            factors.push_back({poly_mul(r, r), one, std::move(vec), one});
        }
        if (!odd.empty()) {
            // Product identity with the denominators cleared: for each
            // univariate factor j, ptilde_j = vec_nums_j * prod_{k!=j} vec_den_k
            // satisfies s * r^2 * prod_j form(ptilde_j) = f * Gamma^(2u).
            Poly gamma = one;
            for (size_t j = 0; j < univ_count; ++j) gamma = poly_mul(gamma, factors[j].vec_den);
            std::vector<std::vector<Poly>> ptilde(univ_count);
            for (size_t j = 0; j < univ_count; ++j) {
                Poly cof = poly_div_exact(gamma, factors[j].vec_den);
                for (const Poly& q : factors[j].vec_nums) ptilde[j].push_back(poly_mul(q, cof));
            }
            for (const Poly& t : odd) {
                bool recursed = false;
                for (long step = 0; step < 1000 && !recursed; ++step) {
                    long cval = step == 0 ? 0 : (step % 2 ? (step + 1) / 2 : -step / 2);
                    FieldElem cv = fe_from_int(K, cval);
                    Poly fc = poly_subst_elem(f, vi, cv);
                    if (poly_is_zero(fc) || poly_try_div(fc, t)) continue;
                    if (poly_is_zero(poly_subst_elem(gamma, vi, cv))) continue;
                    std::vector<std::vector<Poly>> qs(univ_count);
                    for (size_t j = 0; j < univ_count; ++j)
                        for (const Poly& q : ptilde[j])
                            qs[j].push_back(poly_subst_elem(q, vi, cv));
                    bool changed = true;
                    while (changed) {
                        changed = false;
                        for (auto& vec : qs) {
                            std::vector<Poly> quot;
                            quot.reserve(vec.size());
                            bool all = true;
                            for (const Poly& q : vec) {
                                auto d = poly_try_div(q, t);
                                if (!d) { all = false; break; }
                                quot.push_back(std::move(*d));
                            }
                            if (!all) continue;
                            vec = std::move(quot);
                            changed = true;
                        }
                    }
                    for (const auto& vec : qs) {
                        if (!poly_try_div(evaluate_poly(form, vec), t)) continue;
                        ProductCertificate sub2 = factor_multi_rec(form, t, vec);
                        for (ProductFactor& fac : sub2.factors)
                            factors.push_back(std::move(fac));
                        recursed = true;
                        break;
                    }
                    if (!recursed)
                        throw Error("no specialized factor value is divisible after stripping");
                }
                if (!recursed) throw Error("specialization scan exhausted its budget");
            }
        }
    }

    ProductCertificate cert{form, f, M, std::move(factors)};
    if (cert.factors.size() > cert.bound)
        throw Error("factor count exceeds the lexicographic degree bound");
    return cert;
}

} // namespace detail

// Certificate with at most M factors for an irreducible multivariate f that
// is unitary for the lexicographic order, where M is the total degree of the
// lex-leading monomial. The witness supplies the divisibility data the
// recursion starts from; irreducibility is checked unless asserted.
inline ProductCertificate factor_multivariate(const QuadForm& form, const Poly& f,
                                              const DivisibilityWitness& w,
                                              bool assert_irreducible = false) {
    if (!field_eq(f.coeff_field, form.field))
        throw FieldMismatch("polynomial ring over a different field");
    if (form.field->kind == FieldKind::PrimeField)
        throw FiniteBaseField("the finite-base branch needs completed Laurent series arithmetic");
    if (poly_total_deg(f) <= 0) throw HypothesisViolated("constant target");
    LexLeading ll = poly_lex_leading(f);
    if (!fe_is_one(ll.coeff))
        throw HypothesisViolated("target is not unitary for the lexicographic order");
    if (!assert_irreducible) {
        size_t act = 0, avar = 0;
        for (size_t i = 0; i < f.vars.size(); ++i)
            if (poly_deg(f, i) > 0) { ++act; avar = i; }
        bool irr;
        try {
            irr = act == 1 ? poly_irreducible_in_var(f, avar) : poly_irreducible(f);
        } catch (const UnsupportedField&) {
            throw AssertionUnverifiable(
                "irreducibility cannot be checked over this coefficient field");
        }
        if (!irr) throw HypothesisViolated("target polynomial is reducible");
    }
    if (!poly_eq(w.f, f)) throw BadWitness("witness is for a different polynomial");
    verify_divisibility_witness(form, w);

    IsoResult iso = is_isotropic(form);
    if (iso.status == Truth::Proven) {
        if (!iso.witness)
            throw IsotropicBase("isotropic base form without a constructive vector");
        ProductCertificate cert{form, f, static_cast<size_t>(ll.total_degree),
                                {detail::universal_factor(form, *iso.witness, f)}};
        verify_certificate(cert);
        return cert;
    }
    if (represents(form, fe_one(form.field)).status != Truth::Proven)
        throw HypothesisViolated("the form must represent 1");

    ProductCertificate cert = detail::factor_multi_rec(form, f, w.p);
    verify_certificate(cert);
    return cert;
}

// Push a scalar product certificate over K((Y)) down to K: normalize each
// factor value to valuation zero by an even power of Y, check the exponents
// cancel, and read off the residue at Y = 0.
inline ProductCertificate descend_laurent(const QuadForm& form, const FieldElem& a,
                                          const ProductCertificate& w) {
    const FieldPtr& T = w.form.field;
    if (T->kind != FieldKind::LaurentTower)
        throw UnsupportedField("descent needs a certificate over a Laurent series field");
    FieldPtr K = tower_inner_field(T);
    if (!field_eq(K, form.field) || !field_eq(a.field, K))
        throw FieldMismatch("descent target is not over the residue field");
    if (fe_is_zero(a)) throw ZeroInput("descent of zero");
    if (form_dim(form) != form_dim(w.form)) throw FormMismatch("certificate form dimension differs");
    for (size_t i = 0; i < form_dim(form); ++i)
        if (!fe_eq(tower_embed(T, form.coeffs[i]), w.form.coeffs[i]))
            throw FormMismatch("certificate form is not the constant lift");
    verify_certificate(w);
    if (poly_total_deg(w.target) != 0)
        throw BadCertificate("descent target must be a scalar certificate");
    if (!fe_eq(detail::poly_const_value(w.target), tower_embed(T, a)))
        throw BadCertificate("certificate target differs from the descent scalar");

    const std::vector<std::string>& tv = w.target.vars;
    Poly one = detail::poly_one(K, tv);
    Exps yexp(T->vars.size(), 0);
    long ksum = 0;
    std::vector<ProductFactor> out;
    out.reserve(w.factors.size());
    for (const ProductFactor& fac : w.factors) {
        FieldElem vnum, vden, den;
        std::vector<FieldElem> vec;
        try {
            vnum = detail::poly_const_value(fac.value_num);
            vden = detail::poly_const_value(fac.value_den);
            den = detail::poly_const_value(fac.vec_den);
            for (const Poly& q : fac.vec_nums) vec.push_back(detail::poly_const_value(q));
        } catch (const Error&) {
            throw BadCertificate("descent factors must be scalars of the Laurent field");
        }
        FieldElem v = fe_div(vnum, vden);
        long val = tower_valuation(v);
        if (val % 2 != 0)
            throw BadCertificate("factor value has odd valuation; the valuation law fails");
        long k = -val / 2;
        ksum += k;
        yexp.back() = static_cast<int>(k);
        FieldElem sc = tower_monomial(T, yexp, fe_one(T->base));
        FieldElem v0 = tower_coeff(fe_mul(v, fe_mul(sc, sc)), 0);
        std::vector<Poly> nums;
        nums.reserve(vec.size());
        for (FieldElem& e : vec) {
            if (fe_is_zero(e)) {
                nums.push_back(poly_zero(K, tv));
                continue;
            }
            FieldElem scaled = fe_mul(fe_div(e, den), sc);
            if (tower_valuation(scaled) < 0)
                throw NonLaurentEntries("vector entry has a pole at the residue point");
            nums.push_back(poly_const(K, tv, tower_coeff(scaled, 0)));
        }
        out.push_back({poly_const(K, tv, v0), one, std::move(nums), one});
    }
    if (ksum != 0) throw BadCertificate("valuation normalization does not cancel");

    ProductCertificate cert{form, poly_const(K, tv, a), w.bound, std::move(out)};
    verify_certificate(cert);
    return cert;
}

} // namespace qforma

#endif
