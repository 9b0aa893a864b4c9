#ifndef QFORMA_CLIFFSPIN_HPP
#define QFORMA_CLIFFSPIN_HPP

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qforma/linalg.hpp"
#include "qforma/stabbir.hpp"
#include "qforma/valuegroups.hpp"

namespace qforma {

// Element of the Clifford algebra of a diagonal form. Basis words e_S are
// indexed by generator subsets (bitmask, letters in ascending index order)
// under e_i^2 = a_i and e_i e_j = -e_j e_i for i != j. Zero coefficients are
// never stored, so the zero element has an empty map.
struct CliffordElem {
    QuadForm form;
    std::map<std::uint32_t, FieldElem> coeffs;
};

namespace detail {

constexpr size_t cliff_max_dim = 16;

inline void cliff_dim_guard(const QuadForm& f) {
    if (form_dim(f) > cliff_max_dim)
        throw UnsupportedField("clifford support is limited to dimension 16");
}

inline bool same_form(const QuadForm& a, const QuadForm& b) {
    if (!field_eq(a.field, b.field) || a.coeffs.size() != b.coeffs.size()) return false;
    for (size_t i = 0; i < a.coeffs.size(); ++i)
        if (!fe_eq(a.coeffs[i], b.coeffs[i])) return false;
    return true;
}

// Parity of the transposition count that merges the ascending words e_S e_T:
// each letter j of T moves left past every letter of S above j.
inline int merge_parity(std::uint32_t s, std::uint32_t t) {
    int parity = 0;
    for (std::uint32_t bits = t; bits; bits &= bits - 1)
        parity ^= std::popcount(s >> (std::countr_zero(bits) + 1)) & 1;
    return parity;
}

inline void cliff_accum(CliffordElem& x, std::uint32_t mask, const FieldElem& c) {
    if (fe_is_zero(c)) return;
    auto it = x.coeffs.find(mask);
    if (it == x.coeffs.end()) {
        x.coeffs.emplace(mask, c);
        return;
    }
    it->second = fe_add(it->second, c);
    if (fe_is_zero(it->second)) x.coeffs.erase(it);
}

} // namespace detail

inline CliffordElem cliff_zero(const QuadForm& f) {
    detail::cliff_dim_guard(f);
    return {f, {}};
}

inline CliffordElem cliff_scalar(const QuadForm& f, const FieldElem& c) {
    if (!field_eq(c.field, f.field)) throw FieldMismatch("scalar from a different field");
    CliffordElem x = cliff_zero(f);
    if (!fe_is_zero(c)) x.coeffs.emplace(0u, c);
    return x;
}

inline CliffordElem cliff_vector(const QuadForm& f, const Vec& v) {
    if (v.size() != form_dim(f)) throw FormMismatch("vector length does not match form dimension");
    CliffordElem x = cliff_zero(f);
    for (size_t i = 0; i < v.size(); ++i)
        if (!fe_is_zero(v[i])) x.coeffs.emplace(std::uint32_t{1} << i, v[i]);
    return x;
}

inline CliffordElem cliff_basis_word(const QuadForm& f, std::uint32_t mask) {
    detail::cliff_dim_guard(f);
    if (form_dim(f) < 32 && (mask >> form_dim(f)))
        throw FormMismatch("basis word uses generators beyond the form dimension");
    return {f, {{mask, fe_one(f.field)}}};
}

inline bool cliff_is_zero(const CliffordElem& x) { return x.coeffs.empty(); }

inline bool cliff_eq(const CliffordElem& x, const CliffordElem& y) {
    if (!detail::same_form(x.form, y.form) || x.coeffs.size() != y.coeffs.size()) return false;
    auto iy = y.coeffs.begin();
    for (auto ix = x.coeffs.begin(); ix != x.coeffs.end(); ++ix, ++iy)
        if (ix->first != iy->first || !fe_eq(ix->second, iy->second)) return false;
    return true;
}

inline bool cliff_is_even(const CliffordElem& x) {
    for (const auto& [mask, c] : x.coeffs)
        if (std::popcount(mask) & 1) return false;
    return true;
}

inline bool cliff_is_scalar(const CliffordElem& x) {
    return x.coeffs.empty() || (x.coeffs.size() == 1 && x.coeffs.begin()->first == 0);
}

inline CliffordElem cliff_add(const CliffordElem& x, const CliffordElem& y) {
    if (!detail::same_form(x.form, y.form)) throw FormMismatch("clifford elements over different forms");
    CliffordElem out = x;
    for (const auto& [mask, c] : y.coeffs) detail::cliff_accum(out, mask, c);
    return out;
}

inline CliffordElem cliff_scale(const FieldElem& c, const CliffordElem& x) {
    if (!field_eq(c.field, x.form.field)) throw FieldMismatch("scalar from a different field");
    CliffordElem out = cliff_zero(x.form);
    if (fe_is_zero(c)) return out;
    for (const auto& [mask, v] : x.coeffs) out.coeffs.emplace(mask, fe_mul(c, v));
    return out;
}

inline CliffordElem cliff_neg(const CliffordElem& x) {
    return cliff_scale(fe_neg(fe_one(x.form.field)), x);
}

inline CliffordElem cliff_sub(const CliffordElem& x, const CliffordElem& y) {
    return cliff_add(x, cliff_neg(y));
}

inline CliffordElem cliff_mul(const CliffordElem& x, const CliffordElem& y) {
    if (!detail::same_form(x.form, y.form)) throw FormMismatch("clifford elements over different forms");
    CliffordElem out = cliff_zero(x.form);
    for (const auto& [s, a] : x.coeffs)
        for (const auto& [t, b] : y.coeffs) {
            FieldElem c = fe_mul(a, b);
            if (detail::merge_parity(s, t)) c = fe_neg(c);
            for (std::uint32_t common = s & t; common; common &= common - 1)
                c = fe_mul(c, x.form.coeffs[size_t(std::countr_zero(common))]);
            detail::cliff_accum(out, s ^ t, c);
        }
    return out;
}

// Reversal of each basis word; a k-letter word picks up (-1)^{k(k-1)/2}.
inline CliffordElem transpose(const CliffordElem& x) {
    CliffordElem out = cliff_zero(x.form);
    for (const auto& [mask, c] : x.coeffs) {
        int k = std::popcount(mask);
        out.coeffs.emplace(mask, ((k * (k - 1) / 2) & 1) ? fe_neg(c) : c);
    }
    return out;
}

// transpose(x) * x, demanded to be an invertible scalar.
inline FieldElem spinor_norm(const CliffordElem& x) {
    if (cliff_is_zero(x)) throw NotScalarNorm("zero element has no spinor norm");
    CliffordElem p = cliff_mul(transpose(x), x);
    if (!cliff_is_scalar(p) || cliff_is_zero(p))
        throw NotScalarNorm("transpose(x) * x is not an invertible scalar");
    return p.coeffs.begin()->second;
}

// Two-sided inverse by a linear solve of x * y = 1. Even input keeps the
// solve inside the even subalgebra (half the basis words).
inline std::optional<CliffordElem> cliff_inverse(const CliffordElem& x) {
    if (cliff_is_zero(x)) return std::nullopt;
    size_t n = form_dim(x.form);
    bool even = cliff_is_even(x);
    std::vector<std::uint32_t> words;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask)
        if (!even || !(std::popcount(mask) & 1)) words.push_back(mask);
    std::map<std::uint32_t, size_t> row;
    for (size_t i = 0; i < words.size(); ++i) row.emplace(words[i], i);
    const FieldPtr& field = x.form.field;
    Matrix a(words.size(), Vec(words.size(), fe_zero(field)));
    for (size_t j = 0; j < words.size(); ++j) {
        CliffordElem col = cliff_mul(x, cliff_basis_word(x.form, words[j]));
        for (const auto& [mask, c] : col.coeffs) a[row.at(mask)][j] = c;
    }
    Vec b(words.size(), fe_zero(field));
    b[row.at(0)] = fe_one(field);
    auto sol = solve_linear(a, b);
    if (!sol) return std::nullopt;
    CliffordElem y = cliff_zero(x.form);
    for (size_t j = 0; j < words.size(); ++j)
        if (!fe_is_zero((*sol)[j])) y.coeffs.emplace(words[j], (*sol)[j]);
    CliffordElem one = cliff_scalar(x.form, fe_one(field));
    if (!cliff_eq(cliff_mul(x, y), one) || !cliff_eq(cliff_mul(y, x), one)) return std::nullopt;
    return y;
}

// Vector part of a degree-one element; nullopt when any word has length != 1.
inline std::optional<Vec> cliff_vector_part(const CliffordElem& x) {
    Vec out(form_dim(x.form), fe_zero(x.form.field));
    for (const auto& [mask, c] : x.coeffs) {
        if (std::popcount(mask) != 1) return std::nullopt;
        out[size_t(std::countr_zero(mask))] = c;
    }
    return out;
}

// Membership in the special Clifford group: even, invertible, and the
// conjugation x v x^{-1} keeps every basis vector inside the vector space.
inline bool in_special_clifford(const CliffordElem& x) {
    if (cliff_is_zero(x) || !cliff_is_even(x)) return false;
    auto inv = cliff_inverse(x);
    if (!inv) return false;
    size_t n = form_dim(x.form);
    const FieldPtr& field = x.form.field;
    for (size_t i = 0; i < n; ++i) {
        Vec e(n, fe_zero(field));
        e[i] = fe_one(field);
        CliffordElem conj = cliff_mul(cliff_mul(x, cliff_vector(x.form, e)), *inv);
        if (!cliff_vector_part(conj)) return false;
    }
    return true;
}

// Special Clifford group member with its spinor norm and, when produced by
// the plane-element search, the product decomposition that realizes it.
struct SGammaElem {
    CliffordElem value;
    FieldElem spinor_norm;
    std::optional<std::vector<std::pair<Vec, Vec>>> plane_decomposition;
};

inline SGammaElem make_sgamma(const CliffordElem& x) {
    if (!in_special_clifford(x)) throw HypothesisViolated("element is not in the special Clifford group");
    return {x, spinor_norm(x), std::nullopt};
}

namespace detail {

struct PlaneWitness {
    Vec v;
    Vec w;
};

// Spinor-norm classes of plane elements, with explicit vector-pair witnesses
// where the sampling found one. Witnesses satisfy sn(v w) = q(v) q(w).
struct PlaneData {
    std::set<SquareClass> classes;
    std::map<SquareClass, PlaneWitness> witnesses;
};

// Coordinates used to sample vectors inside a coordinate plane. Prime fields
// are exhausted; towers mix 0, 1, the class representatives, and unit shifts
// of them so residue sums show up.
inline std::vector<FieldElem> plane_coordinate_pool(const FieldPtr& field) {
    std::vector<FieldElem> out{fe_zero(field), fe_one(field)};
    if (field->kind == FieldKind::PrimeField) {
        for (long k = 2; k < field->p; ++k) out.push_back(fe_from_int(field, k));
        return out;
    }
    auto push = [&out](const FieldElem& c) {
        for (const FieldElem& have : out)
            if (fe_eq(have, c)) return;
        out.push_back(c);
    };
    for (const SquareClass& c : class_group(field).elems) {
        push(c.rep);
        push(fe_add(fe_one(field), c.rep));
    }
    return out;
}

// Nonzero value classes of the binary slice through axes i < j, each with a
// witness vector in the ambient space.
inline void plane_samples(const QuadForm& phi, size_t i, size_t j,
                          std::map<SquareClass, Vec>& values) {
    const FieldPtr& field = phi.field;
    std::vector<FieldElem> pool = plane_coordinate_pool(field);
    size_t n = form_dim(phi);
    for (const FieldElem& x : pool)
        for (const FieldElem& y : pool) {
            if (fe_is_zero(x) && fe_is_zero(y)) continue;
            Vec v(n, fe_zero(field));
            v[i] = x;
            v[j] = y;
            FieldElem val = evaluate(phi, v);
            if (fe_is_zero(val)) continue;
            SquareClass cls = square_class(val);
            if (!values.count(cls)) values.emplace(std::move(cls), std::move(v));
        }
}

// Plane spinor-norm classes over a finite class group. Witnessed classes come
// from sampled vector pairs in coordinate planes; completeness at class level
// comes from scanning every isometry class of binary subform (decided
// exactly) and taking the value products of each slice. Scalars contribute
// the trivial class only.
inline PlaneData plane_data(const QuadForm& phi) {
    const FieldPtr& field = phi.field;
    size_t n = form_dim(phi);
    if (n < 2) throw DimensionTooSmall("plane elements need a 2-dimensional subform");
    cliff_dim_guard(phi);
    if (!has_finite_class_group(*field))
        throw InfiniteClassGroup("plane enumeration needs a finite class group");
    PlaneData out;
    SquareClass one{fe_one(field)};
    out.classes.insert(one);
    {
        Vec e0(n, fe_zero(field));
        e0[0] = fe_one(field);
        out.witnesses.emplace(one, PlaneWitness{e0, e0});
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            std::map<SquareClass, Vec> vals;
            plane_samples(phi, i, j, vals);
            for (const auto& [ca, va] : vals)
                for (const auto& [cb, vb] : vals) {
                    SquareClass prod = square_class(fe_mul(ca.rep, cb.rep));
                    out.classes.insert(prod);
                    if (!out.witnesses.count(prod)) out.witnesses.emplace(prod, PlaneWitness{va, vb});
                }
        }
    ClassSet d = d_set(phi);
    for (const SquareClass& c1 : d.classes)
        for (const SquareClass& c2 : d.classes) {
            QuadForm slice = make_form(field, {c1.rep, c2.rep});
            if (is_subform(slice, phi) != Truth::Proven) continue;
            for (const SquareClass& c : dd_set(slice).classes) out.classes.insert(c);
        }
    return out;
}

inline bool class_sets_equal(const std::set<SquareClass>& a, const std::set<SquareClass>& b) {
    if (a.size() != b.size()) return false;
    auto ib = b.begin();
    for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib)
        if (!fe_eq(ia->rep, ib->rep)) return false;
    return true;
}

} // namespace detail

// Spinor-norm classes of plane elements. Finite class groups get the full
// finite set. Otherwise a membership-mode set is returned: Proven when some
// binary coordinate slice has the value in its product set (an explicit
// plane certificate), Refuted when even the full value-product set misses it.
inline ClassSet plane_spinor_set(const QuadForm& phi) {
    size_t n = form_dim(phi);
    if (n < 2) throw DimensionTooSmall("plane elements need a 2-dimensional subform");
    const FieldPtr& field = phi.field;
    if (!has_finite_class_group(*field)) {
        QuadForm copy = phi;
        auto member = [copy](const FieldElem& c) -> Truth {
            size_t dim = form_dim(copy);
            for (size_t i = 0; i < dim; ++i)
                for (size_t j = i + 1; j < dim; ++j) {
                    QuadForm slice = make_form(copy.field, {copy.coeffs[i], copy.coeffs[j]});
                    if (dd_membership(slice, c) == Truth::Proven) return Truth::Proven;
                }
            if (dd_membership(copy, c) == Truth::Refuted) return Truth::Refuted;
            return Truth::Unknown;
        };
        return {field, false, {}, std::move(member), "plane-spinor-set"};
    }
    detail::PlaneData data = detail::plane_data(phi);
    return detail::finite_class_set(field, std::move(data.classes), "plane-spinor-set");
}

// Desk-scale verification of the product identity P(q) = D(q)D(q).
inline bool rost_check(const QuadForm& phi) {
    if (!has_finite_class_group(*phi.field))
        throw InfiniteClassGroup("set equality needs a finite class group");
    return class_set_equal(plane_spinor_set(phi), dd_set(phi));
}

// The multiplicative group generated by the plane spinor-norm classes.
inline ClassSet ntilde_group(const QuadForm& phi) {
    if (!has_finite_class_group(*phi.field))
        throw InfiniteClassGroup("group closure needs a finite class group");
    detail::PlaneData data = detail::plane_data(phi);
    return detail::finite_class_set(phi.field,
                                    detail::subgroup_closure(phi.field, data.classes),
                                    "ntilde-group");
}

// Explicit section of the spinor norm: a product of plane elements whose
// norm lands in the requested class. Distinct classes get elements with
// distinct norm classes, which exhibits the norm-group isomorphism.
inline SGammaElem theta_map(const QuadForm& phi, const FieldElem& c) {
    if (!field_eq(c.field, phi.field)) throw FieldMismatch("class representative from a different field");
    if (fe_is_zero(c)) throw ZeroInput("zero has no square class");
    if (!has_finite_class_group(*phi.field))
        throw InfiniteClassGroup("explicit plane search needs a finite class group");
    detail::PlaneData data = detail::plane_data(phi);
    std::set<SquareClass> closure = detail::subgroup_closure(phi.field, data.classes);
    SquareClass target = square_class(c);
    if (!closure.count(target))
        throw NotInNtilde("class is not in the group generated by plane norms");
    const FieldPtr& field = phi.field;
    SquareClass one{fe_one(field)};
    if (fe_eq(target.rep, one.rep))
        return {cliff_scalar(phi, fe_one(field)), fe_one(field),
                std::vector<std::pair<Vec, Vec>>{}};
    std::map<SquareClass, std::pair<SquareClass, SquareClass>> parent;
    std::vector<SquareClass> frontier{one};
    parent.emplace(one, std::make_pair(one, one));
    while (!frontier.empty() && !parent.count(target)) {
        std::vector<SquareClass> next;
        for (const SquareClass& cur : frontier)
            for (const auto& [gen, wit] : data.witnesses) {
                SquareClass to = square_class(fe_mul(cur.rep, gen.rep));
                if (parent.count(to)) continue;
                parent.emplace(to, std::make_pair(cur, gen));
                next.push_back(to);
            }
        frontier = std::move(next);
    }
    if (!parent.count(target))
        throw SearchExhausted("no witnessed plane product realizes the class");
    std::vector<std::pair<Vec, Vec>> decomposition;
    for (SquareClass cur = target; !fe_eq(cur.rep, one.rep);) {
        auto [prev, gen] = parent.at(cur);
        const detail::PlaneWitness& wit = data.witnesses.at(gen);
        decomposition.emplace_back(wit.v, wit.w);
        cur = prev;
    }
    CliffordElem value = cliff_scalar(phi, fe_one(field));
    for (const auto& [v, w] : decomposition)
        value = cliff_mul(value, cliff_mul(cliff_vector(phi, v), cliff_vector(phi, w)));
    FieldElem sn = spinor_norm(value);
    if (!fe_eq(square_class(sn).rep, target.rep))
        throw BadCertificate("plane product landed in the wrong class");
    return {std::move(value), std::move(sn), std::move(decomposition)};
}

// Stable-equivalence check through the norm groups of the even Clifford
// algebras. Each probe with a finite class group must give equal generated
// norm groups on both sides; a mismatch is a sound refutation, and agreement
// plus a two-sided isotropy verdict upgrades to Proven with the class-by-
// class table of the norm-preserving correspondence.
inline Verdict stb_via_clifford(const QuadForm& phi, const QuadForm& psi, size_t probe_cap = 6) {
    if (!field_eq(phi.field, psi.field)) throw FieldMismatch("forms over different fields");
    if (form_dim(phi) < 2 || form_dim(psi) < 2)
        throw DimensionTooSmall("stable equivalence needs dimensions at least 2");
    for (const QuadForm* f : {&phi, &psi}) {
        Truth t = is_isotropic(*f).status;
        if (t == Truth::Proven)
            throw HypothesisViolated("stable equivalence expects anisotropic forms");
        if (t == Truth::Unknown) throw UndecidableField("base isotropy undecided");
    }
    const FieldPtr& base = phi.field;
    std::vector<ProbeSpec> probes = detail::build_probes(base, phi, psi, probe_cap);
    for (const ProbeSpec& spec : probes) {
        auto pf = detail::probe_field(base, spec);
        if (!pf || !has_finite_class_group(**pf)) continue;
        QuadForm phi_f = detail::form_on_probe(phi, *pf, spec);
        QuadForm psi_f = detail::form_on_probe(psi, *pf, spec);
        std::set<SquareClass> np = detail::subgroup_closure(*pf, detail::plane_data(phi_f).classes);
        std::set<SquareClass> nq = detail::subgroup_closure(*pf, detail::plane_data(psi_f).classes);
        if (detail::class_sets_equal(np, nq)) continue;
        std::optional<FieldElem> witness;
        for (const SquareClass& s : np)
            if (!nq.count(s)) {
                witness = s.rep;
                break;
            }
        if (!witness)
            for (const SquareClass& s : nq)
                if (!np.count(s)) {
                    witness = s.rep;
                    break;
                }
        Verdict out;
        out.status = Truth::Refuted;
        out.reason = "ntilde-mismatch(" + spec.label + ")";
        out.refutation = ProbeRefutation{spec, *witness, "ntilde-group"};
        return out;
    }
    Verdict vd = stb_check(phi, psi);
    if (vd.status == Truth::Refuted) {
        vd.reason = "clifford/" + vd.reason;
        return vd;
    }
    if (vd.status != Truth::Proven) {
        Verdict out;
        out.status = Truth::Unknown;
        out.reason = "clifford-probes-passed/" + vd.reason;
        return out;
    }
    vd.reason = "clifford/" + vd.reason;
    if (has_finite_class_group(*base)) {
        std::vector<std::pair<FieldElem, FieldElem>> table;
        std::set<SquareClass> ntilde =
            detail::subgroup_closure(base, detail::plane_data(phi).classes);
        for (const SquareClass& cls : ntilde) {
            FieldElem left = cls.rep, right = cls.rep;
            try {
                left = square_class(theta_map(phi, cls.rep).spinor_norm).rep;
                right = square_class(theta_map(psi, cls.rep).spinor_norm).rep;
            } catch (const SearchExhausted&) {
            }
            table.emplace_back(std::move(left), std::move(right));
        }
        vd.norm_table = std::move(table);
    }
    return vd;
}

} // namespace qforma

#endif
