#ifndef QFORMA_ALGEBRA_HPP
#define QFORMA_ALGEBRA_HPP

// Field towers, their elements, and multivariate polynomials over them.
//
// Supported coefficient domains: Q, GF(p) for odd p, fields of iterated
// Laurent series over a base (elements restricted to the finite
// Laurent-polynomial subring), and rational function fields over Q or GF(p).
// All values are canonical on construction, so structural equality is
// semantic equality.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qforma/errors.hpp"
#include "qforma/numutil.hpp"

namespace qforma {

// ---------------------------------------------------------------------------
// Field descriptors
// ---------------------------------------------------------------------------

enum class FieldKind { Rationals, PrimeField, LaurentTower, RationalFunctions };

struct FieldDesc;
using FieldPtr = std::shared_ptr<const FieldDesc>;

struct FieldDesc {
    FieldKind kind;
    long p = 0;                      // PrimeField characteristic
    FieldPtr base;                   // LaurentTower / RationalFunctions only
    std::vector<std::string> vars;   // tower: inner..outer; function field: X1..Xn
};

inline bool desc_eq(const FieldDesc& a, const FieldDesc& b) {
    if (a.kind != b.kind || a.p != b.p || a.vars != b.vars) return false;
    if (!a.base != !b.base) return false;
    return !a.base || desc_eq(*a.base, *b.base);
}

inline bool field_eq(const FieldPtr& a, const FieldPtr& b) {
    return a == b || (a && b && desc_eq(*a, *b));
}

inline int field_depth(const FieldDesc& f) {
    return 1 + (f.base ? field_depth(*f.base) : 0);
}

inline void collect_vars(const FieldDesc& f, std::vector<std::string>& out) {
    if (f.base) collect_vars(*f.base, out);
    out.insert(out.end(), f.vars.begin(), f.vars.end());
}

constexpr int kMaxFieldDepth = 4;

inline FieldPtr make_rationals() {
    static const FieldPtr f = std::make_shared<FieldDesc>(FieldDesc{FieldKind::Rationals, 0, nullptr, {}});
    return f;
}

inline FieldPtr make_prime_field(long p) {
    if (p == 2) throw ConstructionError("characteristic 2 is not supported");
    if (p < 3 || !is_prime(BigInt(p))) throw ConstructionError("GF(p) requires an odd prime");
    return std::make_shared<FieldDesc>(FieldDesc{FieldKind::PrimeField, p, nullptr, {}});
}

inline void check_new_vars(const FieldPtr& base, const std::vector<std::string>& vars) {
    if (vars.empty()) throw ConstructionError("at least one variable required");
    std::vector<std::string> seen;
    if (base) collect_vars(*base, seen);
    for (auto& v : vars) {
        if (v.empty()) throw ConstructionError("empty variable name");
        if (std::count(vars.begin(), vars.end(), v) != 1 ||
            std::count(seen.begin(), seen.end(), v) != 0)
            throw ConstructionError("duplicate variable " + v);
    }
}

inline FieldPtr make_laurent_tower(FieldPtr base, std::vector<std::string> vars) {
    if (!base) throw ConstructionError("tower needs a base field");
    check_new_vars(base, vars);
    if (field_depth(*base) + 1 > kMaxFieldDepth) throw ConstructionError("field nesting too deep");
    return std::make_shared<FieldDesc>(FieldDesc{FieldKind::LaurentTower, 0, std::move(base), std::move(vars)});
}

inline FieldPtr make_rational_functions(FieldPtr base, std::vector<std::string> vars) {
    if (!base) throw ConstructionError("function field needs a base field");
    if (base->kind != FieldKind::Rationals && base->kind != FieldKind::PrimeField)
        throw UnsupportedField("rational function fields are supported over QQ and GF(p) bases");
    check_new_vars(base, vars);
    if (field_depth(*base) + 1 > kMaxFieldDepth) throw ConstructionError("field nesting too deep");
    return std::make_shared<FieldDesc>(FieldDesc{FieldKind::RationalFunctions, 0, std::move(base), std::move(vars)});
}

inline std::string field_to_string(const FieldDesc& f) {
    switch (f.kind) {
        case FieldKind::Rationals: return "QQ";
        case FieldKind::PrimeField: return "GF(" + std::to_string(f.p) + ")";
        case FieldKind::LaurentTower: {
            std::string s = field_to_string(*f.base);
            for (auto& v : f.vars) s += "((" + v + "))";
            return s;
        }
        case FieldKind::RationalFunctions: {
            std::string s = field_to_string(*f.base) + "(";
            for (size_t i = 0; i < f.vars.size(); ++i) s += (i ? "," : "") + f.vars[i];
            return s + ")";
        }
    }
    return "?";
}

// Residue characteristic: p for GF(p)-based fields, 0 for Q-based.
inline long field_char(const FieldDesc& f) {
    return f.base ? field_char(*f.base) : f.p;
}

// The class group is finite exactly when the leaf field is GF(p).
inline bool has_finite_class_group(const FieldDesc& f) {
    if (f.kind == FieldKind::PrimeField) return true;
    if (f.kind == FieldKind::LaurentTower) return has_finite_class_group(*f.base);
    return false;
}

// ---------------------------------------------------------------------------
// Elements and polynomials
// ---------------------------------------------------------------------------

struct LaurentVal;
struct FracVal;
using LaurentPtr = std::shared_ptr<const LaurentVal>;
using FracPtr = std::shared_ptr<const FracVal>;

using Exps = std::vector<int>;

struct FieldElem {
    FieldPtr field;
    std::variant<BigRat, long, LaurentPtr, FracPtr> val;
};

// Sparse multivariate polynomial; terms keyed by exponent vectors in
// descending lexicographic order (vars[0] is the most significant variable).
// Exponents are non-negative.
struct Poly {
    FieldPtr coeff_field;
    std::vector<std::string> vars;
    std::map<Exps, FieldElem, std::greater<Exps>> terms;
};

// Finite Laurent polynomial in the tower variables (exponents may be
// negative), coefficients in the tower's base field. Key order: outermost
// variable last in the exponent vector.
struct LaurentVal {
    std::map<Exps, FieldElem, std::greater<Exps>> terms;
};

// Reduced fraction of polynomials over the function field's base;
// denominator unitary (lex-leading coefficient 1) and nonzero.
struct FracVal {
    Poly num;
    Poly den;
};

// ---------------------------------------------------------------------------
// Declarations (mutually recursive definitions follow)
// ---------------------------------------------------------------------------

inline FieldElem fe_zero(const FieldPtr& f);
inline FieldElem fe_one(const FieldPtr& f);
inline FieldElem fe_from_rat(const FieldPtr& f, const BigRat& q);
inline FieldElem fe_from_int(const FieldPtr& f, long n);
inline bool fe_is_zero(const FieldElem& a);
inline bool fe_eq(const FieldElem& a, const FieldElem& b);
inline int fe_cmp(const FieldElem& a, const FieldElem& b);
inline FieldElem fe_add(const FieldElem& a, const FieldElem& b);
inline FieldElem fe_sub(const FieldElem& a, const FieldElem& b);
inline FieldElem fe_neg(const FieldElem& a);
inline FieldElem fe_mul(const FieldElem& a, const FieldElem& b);
inline FieldElem fe_div(const FieldElem& a, const FieldElem& b);
inline FieldElem fe_inv(const FieldElem& a);
inline std::string fe_to_string(const FieldElem& a);

inline Poly poly_zero(const FieldPtr& cf, std::vector<std::string> vars);
inline Poly poly_const(const FieldPtr& cf, std::vector<std::string> vars, const FieldElem& c);
inline Poly poly_var(const FieldPtr& cf, std::vector<std::string> vars, const std::string& v);
inline bool poly_is_zero(const Poly& f);
inline bool poly_eq(const Poly& f, const Poly& g);
inline int poly_cmp(const Poly& f, const Poly& g);
inline Poly poly_add(const Poly& f, const Poly& g);
inline Poly poly_sub(const Poly& f, const Poly& g);
inline Poly poly_neg(const Poly& f);
inline Poly poly_mul(const Poly& f, const Poly& g);
inline Poly poly_scale(const FieldElem& c, const Poly& f);
inline Poly poly_pow(const Poly& f, unsigned e);
inline int poly_deg(const Poly& f, size_t vi);
inline int poly_total_deg(const Poly& f);
inline Poly poly_div_exact(const Poly& f, const Poly& g);
inline std::optional<Poly> poly_try_div(const Poly& f, const Poly& g);
inline std::pair<Poly, Poly> poly_divmod_univ(const Poly& f, const Poly& g, size_t vi);
inline Poly poly_derivative(const Poly& f, size_t vi);
inline Poly poly_gcd(const Poly& f, const Poly& g);
inline std::pair<Poly, Poly> poly_content_primitive(const Poly& f, size_t vi);
inline Poly poly_monic_lex(const Poly& f);
inline FieldElem poly_eval(const Poly& f, const std::vector<FieldElem>& point);
inline Poly poly_subst_elem(const Poly& f, size_t vi, const FieldElem& value);
inline std::string poly_to_string(const Poly& f);
inline std::optional<Poly> poly_sqrt(const Poly& f);

inline FieldElem fe_from_laurent_terms(const FieldPtr& f, std::map<Exps, FieldElem, std::greater<Exps>> terms);
inline FieldElem fe_from_fraction(const FieldPtr& f, Poly num, Poly den);
inline FieldElem fe_from_poly(const FieldPtr& f, const Poly& num);

// ---------------------------------------------------------------------------
// GF(p) scalar helpers
// ---------------------------------------------------------------------------

inline long pf_norm(long v, long p) {
    long r = v % p;
    return r < 0 ? r + p : r;
}
inline long pf_mul(long a, long b, long p) {
    return static_cast<long>(static_cast<long long>(a) * b % p);
}
inline long pf_pow(long a, long e, long p) {
    long r = 1;
    a = pf_norm(a, p);
    while (e) {
        if (e & 1) r = pf_mul(r, a, p);
        a = pf_mul(a, a, p);
        e >>= 1;
    }
    return r;
}
inline long pf_inv(long a, long p) {
    a = pf_norm(a, p);
    if (a == 0) throw DivisionByZero("inverse of 0 in GF(p)");
    return pf_pow(a, p - 2, p);
}
inline bool pf_is_square(long a, long p) {
    a = pf_norm(a, p);
    if (a == 0) return true;
    return pf_pow(a, (p - 1) / 2, p) == 1;
}
inline long pf_smallest_nonresidue(long p) {
    for (long n = 2; n < p; ++n)
        if (!pf_is_square(n, p)) return n;
    throw Error("no nonresidue found");
}

// ---------------------------------------------------------------------------
// Element basics
// ---------------------------------------------------------------------------

inline void require_same_field(const FieldElem& a, const FieldElem& b) {
    if (!field_eq(a.field, b.field))
        throw FieldMismatch(fe_to_string(a) + " vs " + fe_to_string(b));
}

inline FieldElem fe_zero(const FieldPtr& f) {
    switch (f->kind) {
        case FieldKind::Rationals: return {f, BigRat(0)};
        case FieldKind::PrimeField: return {f, 0L};
        case FieldKind::LaurentTower: return {f, std::make_shared<const LaurentVal>()};
        case FieldKind::RationalFunctions: {
            Poly z = poly_zero(f->base, f->vars);
            Poly one = poly_const(f->base, f->vars, fe_one(f->base));
            return {f, std::make_shared<const FracVal>(FracVal{z, one})};
        }
    }
    throw Error("unreachable");
}

inline FieldElem fe_from_rat(const FieldPtr& f, const BigRat& q) {
    switch (f->kind) {
        case FieldKind::Rationals: return {f, q};
        case FieldKind::PrimeField: {
            BigInt n = mod_floor(num(q), f->p), d = mod_floor(den(q), f->p);
            if (d == 0) throw DivisionByZero("denominator divisible by p");
            long nn = n.convert_to<long>(), dd = d.convert_to<long>();
            return {f, pf_mul(nn, pf_inv(dd, f->p), f->p)};
        }
        case FieldKind::LaurentTower: {
            FieldElem c = fe_from_rat(f->base, q);
            std::map<Exps, FieldElem, std::greater<Exps>> t;
            if (!fe_is_zero(c)) t.emplace(Exps(f->vars.size(), 0), c);
            return {f, std::make_shared<const LaurentVal>(LaurentVal{std::move(t)})};
        }
        case FieldKind::RationalFunctions: {
            Poly n = poly_const(f->base, f->vars, fe_from_rat(f->base, q));
            Poly d = poly_const(f->base, f->vars, fe_one(f->base));
            return {f, std::make_shared<const FracVal>(FracVal{std::move(n), std::move(d)})};
        }
    }
    throw Error("unreachable");
}

inline FieldElem fe_from_int(const FieldPtr& f, long n) { return fe_from_rat(f, BigRat(n)); }
inline FieldElem fe_one(const FieldPtr& f) { return fe_from_int(f, 1); }

inline bool fe_is_zero(const FieldElem& a) {
    switch (a.field->kind) {
        case FieldKind::Rationals: return std::get<BigRat>(a.val) == 0;
        case FieldKind::PrimeField: return std::get<long>(a.val) == 0;
        case FieldKind::LaurentTower: return std::get<LaurentPtr>(a.val)->terms.empty();
        case FieldKind::RationalFunctions: return std::get<FracPtr>(a.val)->num.terms.empty();
    }
    throw Error("unreachable");
}

inline bool fe_is_one(const FieldElem& a) { return fe_eq(a, fe_one(a.field)); }

inline int fe_cmp(const FieldElem& a, const FieldElem& b) {
    require_same_field(a, b);
    switch (a.field->kind) {
        case FieldKind::Rationals: {
            const BigRat &x = std::get<BigRat>(a.val), &y = std::get<BigRat>(b.val);
            return x < y ? -1 : (x == y ? 0 : 1);
        }
        case FieldKind::PrimeField: {
            long x = std::get<long>(a.val), y = std::get<long>(b.val);
            return x < y ? -1 : (x == y ? 0 : 1);
        }
        case FieldKind::LaurentTower: {
            const auto &x = std::get<LaurentPtr>(a.val)->terms, &y = std::get<LaurentPtr>(b.val)->terms;
            auto i = x.begin();
            auto j = y.begin();
            for (; i != x.end() && j != y.end(); ++i, ++j) {
                if (i->first != j->first) return i->first > j->first ? 1 : -1;
                int c = fe_cmp(i->second, j->second);
                if (c) return c;
            }
            if (i != x.end()) return 1;
            if (j != y.end()) return -1;
            return 0;
        }
        case FieldKind::RationalFunctions: {
            const auto &x = *std::get<FracPtr>(a.val), &y = *std::get<FracPtr>(b.val);
            int c = poly_cmp(x.num, y.num);
            return c ? c : poly_cmp(x.den, y.den);
        }
    }
    throw Error("unreachable");
}

inline bool fe_eq(const FieldElem& a, const FieldElem& b) { return fe_cmp(a, b) == 0; }

// ---------------------------------------------------------------------------
// Polynomial core
// ---------------------------------------------------------------------------

inline Poly poly_zero(const FieldPtr& cf, std::vector<std::string> vars) {
    return Poly{cf, std::move(vars), {}};
}

inline Poly poly_const(const FieldPtr& cf, std::vector<std::string> vars, const FieldElem& c) {
    Poly f = poly_zero(cf, std::move(vars));
    if (!fe_is_zero(c)) f.terms.emplace(Exps(f.vars.size(), 0), c);
    return f;
}

inline Poly poly_var(const FieldPtr& cf, std::vector<std::string> vars, const std::string& v) {
    Poly f = poly_zero(cf, std::move(vars));
    auto it = std::find(f.vars.begin(), f.vars.end(), v);
    if (it == f.vars.end()) throw NotTowerVariable("unknown variable " + v);
    Exps e(f.vars.size(), 0);
    e[static_cast<size_t>(it - f.vars.begin())] = 1;
    f.terms.emplace(std::move(e), fe_one(cf));
    return f;
}

inline void require_same_ring(const Poly& f, const Poly& g) {
    if (!field_eq(f.coeff_field, g.coeff_field) || f.vars != g.vars)
        throw FieldMismatch("polynomial rings differ");
}

inline bool poly_is_zero(const Poly& f) { return f.terms.empty(); }

inline int poly_cmp(const Poly& f, const Poly& g) {
    auto i = f.terms.begin();
    auto j = g.terms.begin();
    for (; i != f.terms.end() && j != g.terms.end(); ++i, ++j) {
        if (i->first != j->first) return i->first > j->first ? 1 : -1;
        int c = fe_cmp(i->second, j->second);
        if (c) return c;
    }
    if (i != f.terms.end()) return 1;
    if (j != g.terms.end()) return -1;
    return 0;
}

inline bool poly_eq(const Poly& f, const Poly& g) {
    return f.vars == g.vars && field_eq(f.coeff_field, g.coeff_field) && poly_cmp(f, g) == 0;
}

inline Poly poly_add(const Poly& f, const Poly& g) {
    require_same_ring(f, g);
    Poly r = f;
    for (auto& [e, c] : g.terms) {
        auto it = r.terms.find(e);
        if (it == r.terms.end()) {
            r.terms.emplace(e, c);
        } else {
            FieldElem s = fe_add(it->second, c);
            if (fe_is_zero(s)) r.terms.erase(it);
            else it->second = s;
        }
    }
    return r;
}

inline Poly poly_neg(const Poly& f) {
    Poly r = f;
    for (auto& [e, c] : r.terms) c = fe_neg(c);
    return r;
}

inline Poly poly_sub(const Poly& f, const Poly& g) { return poly_add(f, poly_neg(g)); }

inline Poly poly_scale(const FieldElem& c, const Poly& f) {
    if (fe_is_zero(c)) return poly_zero(f.coeff_field, f.vars);
    Poly r = f;
    for (auto& [e, cc] : r.terms) cc = fe_mul(c, cc);
    return r;
}

inline Poly poly_mul(const Poly& f, const Poly& g) {
    require_same_ring(f, g);
    Poly r = poly_zero(f.coeff_field, f.vars);
    for (auto& [ef, cf] : f.terms) {
        for (auto& [eg, cg] : g.terms) {
            Exps e(ef.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ef[i] + eg[i];
            FieldElem c = fe_mul(cf, cg);
            auto it = r.terms.find(e);
            if (it == r.terms.end()) {
                if (!fe_is_zero(c)) r.terms.emplace(std::move(e), std::move(c));
            } else {
                FieldElem s = fe_add(it->second, c);
                if (fe_is_zero(s)) r.terms.erase(it);
                else it->second = s;
            }
        }
    }
    return r;
}

inline Poly poly_pow(const Poly& f, unsigned e) {
    Poly r = poly_const(f.coeff_field, f.vars, fe_one(f.coeff_field));
    Poly b = f;
    while (e) {
        if (e & 1) r = poly_mul(r, b);
        b = poly_mul(b, b);
        e >>= 1;
    }
    return r;
}

inline int poly_deg(const Poly& f, size_t vi) {
    int d = -1;
    for (auto& [e, c] : f.terms) d = std::max(d, e[vi]);
    return d;   // -1 for the zero polynomial
}

inline int poly_total_deg(const Poly& f) {
    int d = -1;
    for (auto& [e, c] : f.terms) {
        int s = 0;
        for (int x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

// Leading term for the lexicographic order with vars[0] most significant.
struct LexLeading {
    Exps exps;
    FieldElem coeff;
    int total_degree;
};

inline LexLeading poly_lex_leading(const Poly& f) {
    if (f.terms.empty()) throw ZeroInput("lex_leading of zero polynomial");
    auto& [e, c] = *f.terms.begin();
    int s = 0;
    for (int x : e) s += x;
    return {e, c, s};
}

// Exact multivariate division; nullopt when g does not divide f.
inline std::optional<Poly> poly_try_div(const Poly& f, const Poly& g) {
    require_same_ring(f, g);
    if (poly_is_zero(g)) throw DivisionByZero("polynomial division by zero");
    Poly r = f;
    Poly q = poly_zero(f.coeff_field, f.vars);
    auto& glead = *g.terms.begin();
    while (!r.terms.empty()) {
        auto& rlead = *r.terms.begin();
        Exps e(rlead.first.size());
        for (size_t i = 0; i < e.size(); ++i) {
            e[i] = rlead.first[i] - glead.first[i];
            if (e[i] < 0) return std::nullopt;
        }
        FieldElem c = fe_div(rlead.second, glead.second);
        Poly t = poly_zero(f.coeff_field, f.vars);
        t.terms.emplace(e, c);
        q = poly_add(q, t);
        r = poly_sub(r, poly_mul(t, g));
    }
    return q;
}

inline Poly poly_div_exact(const Poly& f, const Poly& g) {
    auto q = poly_try_div(f, g);
    if (!q) throw InexactDivision("polynomial division not exact");
    return *q;
}

// View f as a univariate polynomial in vars[vi] with Poly coefficients.
inline std::map<int, Poly> poly_univar_view(const Poly& f, size_t vi) {
    std::map<int, Poly> out;
    for (auto& [e, c] : f.terms) {
        Exps rest = e;
        int k = rest[vi];
        rest[vi] = 0;
        auto it = out.find(k);
        if (it == out.end()) it = out.emplace(k, poly_zero(f.coeff_field, f.vars)).first;
        it->second.terms.emplace(std::move(rest), c);
    }
    return out;
}

inline Poly poly_from_univar_view(const FieldPtr& cf, const std::vector<std::string>& vars,
                                  size_t vi, const std::map<int, Poly>& view) {
    Poly r = poly_zero(cf, vars);
    for (auto& [k, coeff] : view) {
        for (auto& [e, c] : coeff.terms) {
            Exps ee = e;
            ee[vi] += k;
            r.terms.emplace(std::move(ee), c);
        }
    }
    return r;
}

inline Poly poly_coeff_of(const Poly& f, size_t vi, int k) {
    Poly r = poly_zero(f.coeff_field, f.vars);
    for (auto& [e, c] : f.terms) {
        if (e[vi] == k) {
            Exps rest = e;
            rest[vi] = 0;
            r.terms.emplace(std::move(rest), c);
        }
    }
    return r;
}

// Division with remainder in (K[other vars])[vars[vi]]. Requires the leading
// coefficient of g in that variable to be a nonzero constant (true in all
// internal uses: unitary divisors, or univariate over a field).
inline std::pair<Poly, Poly> poly_divmod_univ(const Poly& f, const Poly& g, size_t vi) {
    require_same_ring(f, g);
    if (poly_is_zero(g)) throw DivisionByZero("divmod by zero polynomial");
    int dg = poly_deg(g, vi);
    Poly glead = poly_coeff_of(g, vi, dg);
    if (glead.terms.size() != 1 || poly_total_deg(glead) != 0)
        throw UnsupportedField("divmod_univ requires an invertible leading coefficient");
    FieldElem lg = glead.terms.begin()->second;
    Poly q = poly_zero(f.coeff_field, f.vars);
    Poly r = f;
    int dr = poly_deg(r, vi);
    while (!poly_is_zero(r) && (dr = poly_deg(r, vi)) >= dg) {
        Poly c = poly_coeff_of(r, vi, dr);   // coefficient of vars[vi]^dr
        Poly t = poly_zero(f.coeff_field, f.vars);
        for (auto& [e, cc] : c.terms) {
            Exps ee = e;
            ee[vi] = dr - dg;
            t.terms.emplace(std::move(ee), fe_div(cc, lg));
        }
        q = poly_add(q, t);
        r = poly_sub(r, poly_mul(t, g));
    }
    return {q, r};
}

inline Poly poly_derivative(const Poly& f, size_t vi) {
    Poly r = poly_zero(f.coeff_field, f.vars);
    for (auto& [e, c] : f.terms) {
        if (e[vi] == 0) continue;
        FieldElem cc = fe_mul(fe_from_int(f.coeff_field, e[vi]), c);
        if (fe_is_zero(cc)) continue;
        Exps ee = e;
        ee[vi] -= 1;
        r.terms.emplace(std::move(ee), std::move(cc));
    }
    return r;
}

inline Poly poly_monic_lex(const Poly& f) {
    if (poly_is_zero(f)) return f;
    return poly_scale(fe_inv(f.terms.begin()->second), f);
}

// Number of variables actually present.
inline std::vector<size_t> poly_active_vars(const Poly& f, const Poly& g) {
    std::vector<size_t> act;
    for (size_t i = 0; i < f.vars.size(); ++i) {
        if (poly_deg(f, i) > 0 || poly_deg(g, i) > 0) act.push_back(i);
    }
    return act;
}

// Pseudo-remainder of f by g in the variable vars[vi]:
// lc(g)^(deg f - deg g + 1) * f = q*g + r with deg_vi r < deg_vi g.
inline Poly poly_pseudo_rem(const Poly& f, const Poly& g, size_t vi) {
    int dg = poly_deg(g, vi);
    Poly lcg = poly_coeff_of(g, vi, dg);
    Poly r = f;
    int e = poly_deg(f, vi) - dg + 1;
    int steps = 0;
    while (!poly_is_zero(r) && poly_deg(r, vi) >= dg) {
        int dr = poly_deg(r, vi);
        Poly lcr = poly_coeff_of(r, vi, dr);
        Poly xpow = poly_zero(f.coeff_field, f.vars);
        Exps ee(f.vars.size(), 0);
        ee[vi] = dr - dg;
        xpow.terms.emplace(ee, fe_one(f.coeff_field));
        r = poly_sub(poly_mul(lcg, r), poly_mul(poly_mul(lcr, xpow), g));
        ++steps;
    }
    for (int i = steps; i < e; ++i) r = poly_mul(lcg, r);
    return r;
}

inline Poly poly_gcd(const Poly& f, const Poly& g) {
    require_same_ring(f, g);
    if (poly_is_zero(f)) return poly_monic_lex(g);
    if (poly_is_zero(g)) return poly_monic_lex(f);
    auto act = poly_active_vars(f, g);
    if (act.empty()) return poly_const(f.coeff_field, f.vars, fe_one(f.coeff_field));
    if (act.size() == 1) {
        // Euclid over the coefficient field.
        size_t vi = act[0];
        Poly a = f, b = g;
        while (!poly_is_zero(b)) {
            if (poly_deg(a, vi) < poly_deg(b, vi)) std::swap(a, b);
            if (poly_is_zero(b)) break;
            a = poly_divmod_univ(poly_monic_lex(a), poly_monic_lex(b), vi).second;
            std::swap(a, b);
        }
        return poly_monic_lex(a);
    }
    // Multivariate: primitive PRS in the first active variable.
    size_t vi = act[0];
    auto [cf_, pf_] = poly_content_primitive(f, vi);
    auto [cg_, pg_] = poly_content_primitive(g, vi);
    Poly d = poly_gcd(cf_, cg_);
    Poly a = pf_, b = pg_;
    if (poly_deg(a, vi) < poly_deg(b, vi)) std::swap(a, b);
    while (true) {
        if (poly_is_zero(b)) break;
        if (poly_deg(b, vi) == 0) { b = poly_const(f.coeff_field, f.vars, fe_one(f.coeff_field)); break; }
        Poly r = poly_pseudo_rem(a, b, vi);
        if (poly_is_zero(r)) break;
        r = poly_content_primitive(r, vi).second;
        a = b;
        b = r;
    }
    Poly res = poly_is_zero(b) ? a : b;
    res = poly_content_primitive(res, vi).second;
    return poly_monic_lex(poly_mul(d, res));
}

// f = content * primitive with respect to vars[vi]; content is the gcd of the
// coefficient polynomials (a polynomial in the remaining variables).
inline std::pair<Poly, Poly> poly_content_primitive(const Poly& f, size_t vi) {
    if (poly_is_zero(f)) return {f, f};
    auto view = poly_univar_view(f, vi);
    Poly cont = poly_zero(f.coeff_field, f.vars);
    for (auto& [k, c] : view) cont = poly_gcd(cont, c);
    return {cont, poly_div_exact(f, cont)};
}

inline FieldElem poly_eval(const Poly& f, const std::vector<FieldElem>& point) {
    if (point.size() != f.vars.size()) throw FieldMismatch("evaluation arity mismatch");
    FieldElem acc = fe_zero(f.coeff_field);
    for (auto& [e, c] : f.terms) {
        FieldElem t = c;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] < 0) throw NonLaurentEntries("negative exponent in polynomial evaluation");
            for (int k = 0; k < e[i]; ++k) t = fe_mul(t, point[i]);
        }
        acc = fe_add(acc, t);
    }
    return acc;
}

inline Poly poly_subst_elem(const Poly& f, size_t vi, const FieldElem& value) {
    Poly r = poly_zero(f.coeff_field, f.vars);
    for (auto& [e, c] : f.terms) {
        FieldElem t = c;
        for (int k = 0; k < e[vi]; ++k) t = fe_mul(t, value);
        if (fe_is_zero(t)) continue;
        Exps ee = e;
        ee[vi] = 0;
        Poly term = poly_zero(f.coeff_field, f.vars);
        term.terms.emplace(std::move(ee), std::move(t));
        r = poly_add(r, term);
    }
    return r;
}

// Square root of a scalar, for Q and GF(p) coefficient fields only.
inline std::optional<FieldElem> scalar_sqrt(const FieldElem& c) {
    if (fe_is_zero(c)) return fe_zero(c.field);
    if (c.field->kind == FieldKind::Rationals) {
        BigRat q = std::get<BigRat>(c.val);
        if (!is_square_rat(q)) return std::nullopt;
        return fe_from_rat(c.field, BigRat(isqrt(num(q)), isqrt(den(q))));
    }
    if (c.field->kind == FieldKind::PrimeField) {
        long v = std::get<long>(c.val);
        if (!pf_is_square(v, c.field->p)) return std::nullopt;
        return fe_from_int(c.field, sqrt_mod_prime(BigInt(v), BigInt(c.field->p)).convert_to<long>());
    }
    return std::nullopt;
}

// Exact square root of a polynomial over Q or GF(p) coefficients, when one
// exists. Coefficients of the root are determined top-down in the first
// active variable; the candidate is verified by multiplication, so sparse
// squares are handled exactly.
inline std::optional<Poly> poly_sqrt(const Poly& f) {
    if (poly_is_zero(f)) return f;
    size_t vi = f.vars.size();
    for (size_t i = 0; i < f.vars.size(); ++i) {
        if (poly_deg(f, i) > 0) { vi = i; break; }
    }
    if (vi == f.vars.size()) {
        auto rc = scalar_sqrt(f.terms.begin()->second);
        if (!rc) return std::nullopt;
        return poly_const(f.coeff_field, f.vars, *rc);
    }
    int d = poly_deg(f, vi);
    if (d % 2) return std::nullopt;
    int h = d / 2;
    auto fv = poly_univar_view(f, vi);
    auto top = poly_sqrt(fv.at(d));   // coefficient polys only involve later variables
    if (!top) return std::nullopt;
    std::map<int, Poly> r;
    r[h] = *top;
    Poly two_rh = poly_scale(fe_from_int(f.coeff_field, 2), *top);
    for (int k = h - 1; k >= 0; --k) {
        // Coefficient of vi^(h+k) in r^2 is 2*r_h*r_k plus known cross terms.
        Poly s = fv.count(h + k) ? fv.at(h + k) : poly_zero(f.coeff_field, f.vars);
        Poly acc = poly_zero(f.coeff_field, f.vars);
        for (int i = k + 1; i <= h + k - i; ++i) {
            int j = h + k - i;
            Poly prod = poly_mul(r.at(i), r.at(j));
            acc = poly_add(acc, i == j ? prod : poly_scale(fe_from_int(f.coeff_field, 2), prod));
        }
        auto q = poly_try_div(poly_sub(s, acc), two_rh);
        if (!q) return std::nullopt;
        r[k] = *q;
    }
    Poly root = poly_from_univar_view(f.coeff_field, f.vars, vi, r);
    if (!poly_eq(poly_mul(root, root), f)) return std::nullopt;
    return root;
}

// Representative of f modulo nonzero polynomial squares: the product of the
// irreducible factors of odd multiplicity, times a scalar that keeps the
// result in the same square class as f. No factorization is performed; the
// reduction uses gcds with partial derivatives (with p-th power descent over
// GF(p), where the Frobenius fixes scalars).
inline Poly poly_squarefree_part(const Poly& f) {
    if (poly_is_zero(f)) throw ZeroInput("squarefree part of zero");
    if (f.coeff_field->kind != FieldKind::Rationals && f.coeff_field->kind != FieldKind::PrimeField)
        throw UnsupportedField("squarefree reduction needs Q or GF(p) coefficients");
    if (poly_total_deg(f) == 0) return f;
    long p = f.coeff_field->p;
    if (p > 0) {
        bool all_p = true;
        for (auto& [e, c] : f.terms) {
            for (int x : e) {
                if (x % p) { all_p = false; break; }
            }
            if (!all_p) break;
        }
        if (all_p) {
            // f = g^p with the same coefficients; g^p ~ g modulo squares (p odd).
            Poly g = poly_zero(f.coeff_field, f.vars);
            for (auto& [e, c] : f.terms) {
                Exps ee = e;
                for (int& x : ee) x /= static_cast<int>(p);
                g.terms.emplace(std::move(ee), c);
            }
            return poly_squarefree_part(g);
        }
    }
    Poly d = f;
    for (size_t i = 0; i < f.vars.size(); ++i) d = poly_gcd(d, poly_derivative(f, i));
    if (poly_total_deg(d) == 0) return f;   // already squarefree
    Poly r = poly_div_exact(f, d);
    Poly t = poly_squarefree_part(d);
    // f ~ r * t modulo squares; strip the square part they still share.
    while (true) {
        Poly g = poly_gcd(r, t);
        if (poly_total_deg(g) == 0) break;
        r = poly_div_exact(r, g);
        t = poly_div_exact(t, g);
    }
    return poly_mul(r, t);
}

// ---------------------------------------------------------------------------
// Laurent payload operations
// ---------------------------------------------------------------------------

inline FieldElem fe_from_laurent_terms(const FieldPtr& f, std::map<Exps, FieldElem, std::greater<Exps>> terms) {
    for (auto it = terms.begin(); it != terms.end();) {
        if (fe_is_zero(it->second)) it = terms.erase(it);
        else ++it;
    }
    return {f, std::make_shared<const LaurentVal>(LaurentVal{std::move(terms)})};
}

inline FieldElem laurent_add(const FieldElem& a, const FieldElem& b) {
    auto terms = std::get<LaurentPtr>(a.val)->terms;
    for (auto& [e, c] : std::get<LaurentPtr>(b.val)->terms) {
        auto it = terms.find(e);
        if (it == terms.end()) {
            terms.emplace(e, c);
        } else {
            FieldElem s = fe_add(it->second, c);
            if (fe_is_zero(s)) terms.erase(it);
            else it->second = s;
        }
    }
    return fe_from_laurent_terms(a.field, std::move(terms));
}

inline FieldElem laurent_mul(const FieldElem& a, const FieldElem& b) {
    std::map<Exps, FieldElem, std::greater<Exps>> terms;
    for (auto& [ea, ca] : std::get<LaurentPtr>(a.val)->terms) {
        for (auto& [eb, cb] : std::get<LaurentPtr>(b.val)->terms) {
            Exps e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            FieldElem c = fe_mul(ca, cb);
            auto it = terms.find(e);
            if (it == terms.end()) {
                if (!fe_is_zero(c)) terms.emplace(std::move(e), std::move(c));
            } else {
                FieldElem s = fe_add(it->second, c);
                if (fe_is_zero(s)) terms.erase(it);
                else it->second = s;
            }
        }
    }
    return fe_from_laurent_terms(a.field, std::move(terms));
}

// Per-variable minimum exponent over all terms (the "corner" of the support).
inline Exps laurent_min_exps(const LaurentVal& v) {
    if (v.terms.empty()) throw ZeroInput("valuation of zero");
    Exps m = v.terms.begin()->first;
    for (auto& [e, c] : v.terms)
        for (size_t i = 0; i < m.size(); ++i) m[i] = std::min(m[i], e[i]);
    return m;
}

// Exact division in the Laurent-polynomial subring. Throws InexactDivision
// when the true quotient (a Laurent series) is not a finite Laurent
// polynomial.
inline FieldElem laurent_div(const FieldElem& a, const FieldElem& b) {
    const LaurentVal& bv = *std::get<LaurentPtr>(b.val);
    if (bv.terms.empty()) throw DivisionByZero("Laurent division by zero");
    if (fe_is_zero(a)) return a;
    const LaurentVal& av = *std::get<LaurentPtr>(a.val);
    if (bv.terms.size() == 1) {
        auto& [be, bc] = *bv.terms.begin();
        std::map<Exps, FieldElem, std::greater<Exps>> terms;
        for (auto& [e, c] : av.terms) {
            Exps ee(e.size());
            for (size_t i = 0; i < e.size(); ++i) ee[i] = e[i] - be[i];
            terms.emplace(std::move(ee), fe_div(c, bc));
        }
        return fe_from_laurent_terms(a.field, std::move(terms));
    }
    // Quotient exponents are bounded below by corner(a) - corner(b); leading
    // cancellation descending past that bound proves inexactness.
    Exps amin = laurent_min_exps(av), bmin = laurent_min_exps(bv);
    Exps qmin(amin.size());
    for (size_t i = 0; i < amin.size(); ++i) qmin[i] = amin[i] - bmin[i];
    FieldElem r = a;
    std::map<Exps, FieldElem, std::greater<Exps>> qterms;
    auto& blead = *bv.terms.begin();
    while (!fe_is_zero(r)) {
        const LaurentVal& rv = *std::get<LaurentPtr>(r.val);
        auto& rlead = *rv.terms.begin();
        Exps e(rlead.first.size());
        for (size_t i = 0; i < e.size(); ++i) {
            e[i] = rlead.first[i] - blead.first[i];
            if (e[i] < qmin[i]) throw InexactDivision("Laurent quotient not a finite Laurent polynomial");
        }
        FieldElem c = fe_div(rlead.second, blead.second);
        std::map<Exps, FieldElem, std::greater<Exps>> t;
        t.emplace(e, c);
        FieldElem term = fe_from_laurent_terms(a.field, std::move(t));
        qterms.emplace(std::move(e), std::move(c));
        r = fe_sub(r, laurent_mul(term, b));
    }
    return fe_from_laurent_terms(a.field, std::move(qterms));
}

// ---------------------------------------------------------------------------
// Fraction payload operations
// ---------------------------------------------------------------------------

inline FieldElem fe_from_fraction(const FieldPtr& f, Poly num_, Poly den_) {
    if (poly_is_zero(den_)) throw DivisionByZero("zero denominator");
    if (poly_is_zero(num_)) return fe_zero(f);
    Poly g = poly_gcd(num_, den_);
    if (!poly_is_zero(g) && !(g.terms.size() == 1 && poly_total_deg(g) == 0 && fe_is_one(g.terms.begin()->second))) {
        num_ = poly_div_exact(num_, g);
        den_ = poly_div_exact(den_, g);
    }
    FieldElem lead = den_.terms.begin()->second;
    num_ = poly_scale(fe_inv(lead), num_);
    den_ = poly_scale(fe_inv(lead), den_);
    return {f, std::make_shared<const FracVal>(FracVal{std::move(num_), std::move(den_)})};
}

inline FieldElem fe_from_poly(const FieldPtr& f, const Poly& num_) {
    return fe_from_fraction(f, num_, poly_const(num_.coeff_field, num_.vars, fe_one(num_.coeff_field)));
}

// ---------------------------------------------------------------------------
// Element arithmetic dispatch
// ---------------------------------------------------------------------------

inline FieldElem fe_add(const FieldElem& a, const FieldElem& b) {
    require_same_field(a, b);
    switch (a.field->kind) {
        case FieldKind::Rationals: return {a.field, std::get<BigRat>(a.val) + std::get<BigRat>(b.val)};
        case FieldKind::PrimeField:
            return {a.field, pf_norm(std::get<long>(a.val) + std::get<long>(b.val), a.field->p)};
        case FieldKind::LaurentTower: return laurent_add(a, b);
        case FieldKind::RationalFunctions: {
            const FracVal &x = *std::get<FracPtr>(a.val), &y = *std::get<FracPtr>(b.val);
            return fe_from_fraction(a.field,
                                    poly_add(poly_mul(x.num, y.den), poly_mul(y.num, x.den)),
                                    poly_mul(x.den, y.den));
        }
    }
    throw Error("unreachable");
}

inline FieldElem fe_neg(const FieldElem& a) {
    switch (a.field->kind) {
        case FieldKind::Rationals: return {a.field, BigRat(-std::get<BigRat>(a.val))};
        case FieldKind::PrimeField: return {a.field, pf_norm(-std::get<long>(a.val), a.field->p)};
        case FieldKind::LaurentTower: {
            auto terms = std::get<LaurentPtr>(a.val)->terms;
            for (auto& [e, c] : terms) c = fe_neg(c);
            return fe_from_laurent_terms(a.field, std::move(terms));
        }
        case FieldKind::RationalFunctions: {
            const FracVal& x = *std::get<FracPtr>(a.val);
            return {a.field, std::make_shared<const FracVal>(FracVal{poly_neg(x.num), x.den})};
        }
    }
    throw Error("unreachable");
}

inline FieldElem fe_sub(const FieldElem& a, const FieldElem& b) { return fe_add(a, fe_neg(b)); }

inline FieldElem fe_mul(const FieldElem& a, const FieldElem& b) {
    require_same_field(a, b);
    switch (a.field->kind) {
        case FieldKind::Rationals: return {a.field, std::get<BigRat>(a.val) * std::get<BigRat>(b.val)};
        case FieldKind::PrimeField:
            return {a.field, pf_mul(std::get<long>(a.val), std::get<long>(b.val), a.field->p)};
        case FieldKind::LaurentTower: return laurent_mul(a, b);
        case FieldKind::RationalFunctions: {
            const FracVal &x = *std::get<FracPtr>(a.val), &y = *std::get<FracPtr>(b.val);
            return fe_from_fraction(a.field, poly_mul(x.num, y.num), poly_mul(x.den, y.den));
        }
    }
    throw Error("unreachable");
}

inline FieldElem fe_div(const FieldElem& a, const FieldElem& b) {
    require_same_field(a, b);
    if (fe_is_zero(b)) throw DivisionByZero("division by zero");
    switch (a.field->kind) {
        case FieldKind::Rationals: return {a.field, std::get<BigRat>(a.val) / std::get<BigRat>(b.val)};
        case FieldKind::PrimeField:
            return {a.field, pf_mul(std::get<long>(a.val), pf_inv(std::get<long>(b.val), a.field->p), a.field->p)};
        case FieldKind::LaurentTower: return laurent_div(a, b);
        case FieldKind::RationalFunctions: {
            const FracVal &x = *std::get<FracPtr>(a.val), &y = *std::get<FracPtr>(b.val);
            return fe_from_fraction(a.field, poly_mul(x.num, y.den), poly_mul(x.den, y.num));
        }
    }
    throw Error("unreachable");
}

inline FieldElem fe_inv(const FieldElem& a) { return fe_div(fe_one(a.field), a); }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

inline std::string rat_to_string(const BigRat& q) {
    std::ostringstream os;
    os << num(q);
    if (den(q) != 1) os << "/" << den(q);
    return os.str();
}

namespace detail {

// Shared term printer for polynomial-like maps.
inline std::string terms_to_string(const std::map<Exps, FieldElem, std::greater<Exps>>& terms,
                                   const std::vector<std::string>& vars) {
    if (terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto& [e, c] : terms) {
        std::string cs = fe_to_string(c);
        bool negated = false;
        if (!cs.empty() && cs[0] == '-' && cs.find_first_of("+-", 1) == std::string::npos) {
            negated = true;
            cs = cs.substr(1);
        }
        std::string mono;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += vars[i];
            if (e[i] != 1) mono += "^" + std::to_string(e[i]);
        }
        bool simple_coeff = cs.find_first_of("+-*/^ ()") == std::string::npos || mono.empty();
        std::string body;
        if (mono.empty()) body = cs;
        else if (cs == "1") body = mono;
        else if (simple_coeff) body = cs + "*" + mono;
        else body = "(" + cs + ")*" + mono;
        if (first) {
            out += (negated ? "-" : "") + body;
            first = false;
        } else {
            out += (negated ? " - " : " + ") + body;
        }
    }
    return out;
}

} // namespace detail

inline std::string poly_to_string(const Poly& f) { return detail::terms_to_string(f.terms, f.vars); }

inline std::string fe_to_string(const FieldElem& a) {
    switch (a.field->kind) {
        case FieldKind::Rationals: return rat_to_string(std::get<BigRat>(a.val));
        case FieldKind::PrimeField: return std::to_string(std::get<long>(a.val));
        case FieldKind::LaurentTower:
            return detail::terms_to_string(std::get<LaurentPtr>(a.val)->terms, a.field->vars);
        case FieldKind::RationalFunctions: {
            const FracVal& x = *std::get<FracPtr>(a.val);
            if (x.den.terms.size() == 1 && poly_total_deg(x.den) == 0)
                return poly_to_string(x.num);
            return "(" + poly_to_string(x.num) + ")/(" + poly_to_string(x.den) + ")";
        }
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// Tower structure utilities
// ---------------------------------------------------------------------------

// Field one level inside a tower (strips the outermost variable).
inline FieldPtr tower_inner_field(const FieldPtr& f) {
    if (f->kind != FieldKind::LaurentTower) throw UnsupportedField("not a Laurent tower");
    if (f->vars.size() == 1) return f->base;
    std::vector<std::string> inner(f->vars.begin(), f->vars.end() - 1);
    return make_laurent_tower(f->base, inner);
}

// Valuation of a nonzero element in the outermost tower variable.
inline long tower_valuation(const FieldElem& a) {
    if (a.field->kind != FieldKind::LaurentTower) throw UnsupportedField("valuation needs a Laurent tower");
    const LaurentVal& v = *std::get<LaurentPtr>(a.val);
    if (v.terms.empty()) throw ZeroInput("valuation of zero");
    size_t last = a.field->vars.size() - 1;
    long m = v.terms.begin()->first[last];
    for (auto& [e, c] : v.terms) m = std::min(m, static_cast<long>(e[last]));
    return m;
}

// Public valuation op: v must name the outermost tower variable.
inline long valuation(const FieldElem& a, const std::string& v) {
    if (a.field->kind != FieldKind::LaurentTower) throw UnsupportedField("valuation needs a Laurent tower");
    if (a.field->vars.back() != v) throw NotTowerVariable(v + " is not the outermost tower variable");
    return tower_valuation(a);
}

// Coefficient of (outermost var)^k as an element of the inner field.
inline FieldElem tower_coeff(const FieldElem& a, long k) {
    FieldPtr inner = tower_inner_field(a.field);
    const LaurentVal& v = *std::get<LaurentPtr>(a.val);
    size_t last = a.field->vars.size() - 1;
    if (a.field->vars.size() == 1) {
        // Single tower variable: coefficients are already base elements.
        for (auto& [e, c] : v.terms)
            if (e[last] == k) return c;
        return fe_zero(inner);
    }
    std::map<Exps, FieldElem, std::greater<Exps>> terms;
    for (auto& [e, c] : v.terms) {
        if (e[last] != k) continue;
        Exps ee(e.begin(), e.end() - 1);
        terms.emplace(std::move(ee), c);
    }
    return fe_from_laurent_terms(inner, std::move(terms));
}

// Build a tower element sum_k (outer var)^k * coeff_k from inner elements.
inline FieldElem tower_assemble(const FieldPtr& f, const std::map<long, FieldElem>& coeffs) {
    std::map<Exps, FieldElem, std::greater<Exps>> terms;
    for (auto& [k, c] : coeffs) {
        if (fe_is_zero(c)) continue;
        if (f->vars.size() == 1) {
            Exps e{static_cast<int>(k)};
            terms.emplace(std::move(e), c);
        } else {
            const LaurentVal& v = *std::get<LaurentPtr>(c.val);
            for (auto& [e, cc] : v.terms) {
                Exps ee = e;
                ee.push_back(static_cast<int>(k));
                terms.emplace(std::move(ee), cc);
            }
        }
    }
    return fe_from_laurent_terms(f, std::move(terms));
}

// Embed an element of the inner field (or base) as a constant of the tower.
inline FieldElem tower_embed(const FieldPtr& f, const FieldElem& inner_elem) {
    if (f->kind != FieldKind::LaurentTower) throw UnsupportedField("tower_embed needs a tower");
    FieldPtr inner = tower_inner_field(f);
    if (field_eq(inner_elem.field, f->base)) {
        std::map<Exps, FieldElem, std::greater<Exps>> terms;
        if (!fe_is_zero(inner_elem)) terms.emplace(Exps(f->vars.size(), 0), inner_elem);
        return fe_from_laurent_terms(f, std::move(terms));
    }
    if (!field_eq(inner_elem.field, inner)) throw FieldMismatch("tower_embed: element not from base or inner field");
    std::map<long, FieldElem> coeffs{{0, inner_elem}};
    return tower_assemble(f, coeffs);
}

// Monomial in the tower variables: product of vars[i]^exps[i] times a base coefficient.
inline FieldElem tower_monomial(const FieldPtr& f, const Exps& e, const FieldElem& base_coeff) {
    if (f->kind != FieldKind::LaurentTower || e.size() != f->vars.size())
        throw FieldMismatch("tower_monomial arity");
    std::map<Exps, FieldElem, std::greater<Exps>> terms;
    if (!fe_is_zero(base_coeff)) terms.emplace(e, base_coeff);
    return fe_from_laurent_terms(f, std::move(terms));
}

// ---------------------------------------------------------------------------
// Squares and square classes
// ---------------------------------------------------------------------------

inline bool fe_is_square(const FieldElem& a) {
    if (fe_is_zero(a)) return true;
    switch (a.field->kind) {
        case FieldKind::Rationals: return is_square_rat(std::get<BigRat>(a.val));
        case FieldKind::PrimeField: return pf_is_square(std::get<long>(a.val), a.field->p);
        case FieldKind::LaurentTower: {
            // Squares in K((t)): even valuation and square residue (char != 2).
            long v = tower_valuation(a);
            if (v % 2 != 0) return false;
            return fe_is_square(tower_coeff(a, v));
        }
        case FieldKind::RationalFunctions: {
            const FracVal& x = *std::get<FracPtr>(a.val);
            return poly_sqrt(poly_mul(x.num, x.den)).has_value();
        }
    }
    throw Error("unreachable");
}

struct SquareClass {
    FieldElem rep;   // canonical representative
};

inline bool operator==(const SquareClass& a, const SquareClass& b) { return fe_eq(a.rep, b.rep); }
inline bool operator<(const SquareClass& a, const SquareClass& b) { return fe_cmp(a.rep, b.rep) < 0; }

inline SquareClass square_class(const FieldElem& a) {
    if (fe_is_zero(a)) throw ZeroInput("square class of zero");
    switch (a.field->kind) {
        case FieldKind::Rationals:
            return {fe_from_rat(a.field, BigRat(squarefree_part(std::get<BigRat>(a.val))))};
        case FieldKind::PrimeField: {
            long p = a.field->p;
            bool sq = pf_is_square(std::get<long>(a.val), p);
            return {fe_from_int(a.field, sq ? 1 : pf_smallest_nonresidue(p))};
        }
        case FieldKind::LaurentTower: {
            long v = tower_valuation(a);
            FieldElem residue = tower_coeff(a, v);
            FieldElem inner_rep = square_class(residue).rep;
            // Representative: (outer var)^(v mod 2) * inner representative.
            std::map<long, FieldElem> coeffs{{((v % 2) + 2) % 2, inner_rep}};
            return {tower_assemble(a.field, coeffs)};
        }
        case FieldKind::RationalFunctions: {
            const FracVal& x = *std::get<FracPtr>(a.val);
            Poly prod = poly_mul(x.num, x.den);
            Poly sf = poly_squarefree_part(prod);
            // Normalize: unitary squarefree polynomial times base square class of
            // the removed leading scalar.
            FieldElem lead = sf.terms.begin()->second;
            Poly unitary = poly_scale(fe_inv(lead), sf);
            FieldElem scalar_cls = square_class(lead).rep;
            return {fe_from_poly(a.field, poly_scale(scalar_cls, unitary))};
        }
    }
    throw Error("unreachable");
}

inline bool same_square_class(const FieldElem& a, const FieldElem& b) {
    return fe_is_square(fe_mul(a, b));   // a*b square <=> a ~ b (nonzero)
}

// Explicit square root where one can be written down: rationals, prime
// fields, and fraction fields. Square Laurent elements may have no finite
// Laurent root, so towers always return nullopt.
inline std::optional<FieldElem> fe_sqrt(const FieldElem& a) {
    if (fe_is_zero(a)) return fe_zero(a.field);
    switch (a.field->kind) {
        case FieldKind::Rationals:
        case FieldKind::PrimeField:
            return scalar_sqrt(a);
        case FieldKind::LaurentTower:
            return std::nullopt;
        case FieldKind::RationalFunctions: {
            const FracVal& x = *std::get<FracPtr>(a.val);
            auto s = poly_sqrt(poly_mul(x.num, x.den));   // a = (s/den)^2
            if (!s) return std::nullopt;
            return fe_from_fraction(a.field, *s, x.den);
        }
    }
    throw Error("unreachable");
}

struct ClassGroup {
    bool finite;
    std::vector<SquareClass> elems;   // empty when infinite
};

inline ClassGroup class_group(const FieldPtr& f) {
    switch (f->kind) {
        case FieldKind::Rationals: return {false, {}};
        case FieldKind::PrimeField: {
            return {true, {SquareClass{fe_one(f)}, SquareClass{fe_from_int(f, pf_smallest_nonresidue(f->p))}}};
        }
        case FieldKind::LaurentTower: {
            if (!has_finite_class_group(*f)) return {false, {}};
            ClassGroup base = class_group(f->base);
            size_t n = f->vars.size();
            std::vector<SquareClass> out;
            for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
                Exps e(n, 0);
                for (size_t i = 0; i < n; ++i) e[i] = (mask >> i) & 1;
                for (auto& bc : base.elems) out.push_back({tower_monomial(f, e, bc.rep)});
            }
            std::sort(out.begin(), out.end());
            return {true, std::move(out)};
        }
        case FieldKind::RationalFunctions: return {false, {}};
    }
    throw Error("unreachable");
}

} // namespace qforma

#endif
