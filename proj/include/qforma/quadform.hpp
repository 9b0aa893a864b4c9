#ifndef QFORMA_QUADFORM_HPP
#define QFORMA_QUADFORM_HPP

// Diagonal quadratic forms over the supported fields: construction,
// orthogonal sums, tensor products, Pfister forms, evaluation, and
// diagonalization of symmetric Gram matrices by congruence.
//
// Forms are kept nondegenerate: every diagonal coefficient is nonzero.

#include "qforma/algebra.hpp"
#include "qforma/linalg.hpp"

namespace qforma {

struct QuadForm {
    FieldPtr field;
    std::vector<FieldElem> coeffs;   // nonzero diagonal entries
};

enum class Truth { Proven, Refuted, Unknown };

inline const char* truth_name(Truth t) {
    switch (t) {
        case Truth::Proven: return "proven";
        case Truth::Refuted: return "refuted";
        case Truth::Unknown: return "unknown";
    }
    return "?";
}

inline QuadForm make_form(const FieldPtr& field, std::vector<FieldElem> coeffs) {
    for (auto& c : coeffs) {
        if (!field_eq(c.field, field)) throw FieldMismatch("form coefficient from a different field");
        if (fe_is_zero(c)) throw DegenerateForm("zero diagonal coefficient");
    }
    return {field, std::move(coeffs)};
}

inline QuadForm make_form_ints(const FieldPtr& field, const std::vector<long>& cs) {
    std::vector<FieldElem> coeffs;
    coeffs.reserve(cs.size());
    for (long c : cs) coeffs.push_back(fe_from_int(field, c));
    return make_form(field, std::move(coeffs));
}

inline size_t form_dim(const QuadForm& f) { return f.coeffs.size(); }

inline QuadForm orth_sum(const QuadForm& a, const QuadForm& b) {
    if (!field_eq(a.field, b.field)) throw FieldMismatch("orthogonal sum over different fields");
    QuadForm r = a;
    r.coeffs.insert(r.coeffs.end(), b.coeffs.begin(), b.coeffs.end());
    return r;
}

inline QuadForm scale_form(const FieldElem& c, const QuadForm& f) {
    if (fe_is_zero(c)) throw ZeroInput("scaling a form by zero");
    QuadForm r = f;
    for (auto& a : r.coeffs) a = fe_mul(c, a);
    return r;
}

inline QuadForm tensor_form(const QuadForm& a, const QuadForm& b) {
    if (!field_eq(a.field, b.field)) throw FieldMismatch("tensor product over different fields");
    QuadForm r{a.field, {}};
    r.coeffs.reserve(a.coeffs.size() * b.coeffs.size());
    for (auto& x : a.coeffs)
        for (auto& y : b.coeffs) r.coeffs.push_back(fe_mul(x, y));
    return r;
}

// n-fold Pfister form <1,-a_1> x ... x <1,-a_n>.
inline QuadForm pfister_form(const FieldPtr& field, const std::vector<FieldElem>& slots) {
    if (slots.empty()) throw ZeroInput("Pfister form needs at least one slot");
    QuadForm r = make_form(field, {fe_one(field)});
    for (auto& a : slots) {
        if (fe_is_zero(a)) throw DegenerateForm("zero Pfister slot");
        r = tensor_form(r, make_form(field, {fe_one(field), fe_neg(a)}));
    }
    return r;
}

inline QuadForm hyperbolic_plane(const FieldPtr& field) {
    return make_form(field, {fe_one(field), fe_neg(fe_one(field))});
}

inline QuadForm hyperbolic_planes(const FieldPtr& field, size_t n) {
    QuadForm r{field, {}};
    for (size_t i = 0; i < n; ++i) r = orth_sum(r, hyperbolic_plane(field));
    return r;
}

inline FieldElem form_det(const QuadForm& f) {
    FieldElem d = fe_one(f.field);
    for (auto& c : f.coeffs) d = fe_mul(d, c);
    return d;
}

// Signed determinant (-1)^(n(n-1)/2) * det.
inline FieldElem form_disc(const QuadForm& f) {
    size_t n = form_dim(f);
    FieldElem d = form_det(f);
    if (((n * (n - 1)) / 2) % 2) d = fe_neg(d);
    return d;
}

inline FieldElem evaluate(const QuadForm& f, const std::vector<FieldElem>& v) {
    if (v.size() != form_dim(f)) throw FormMismatch("vector length does not match form dimension");
    FieldElem acc = fe_zero(f.field);
    for (size_t i = 0; i < v.size(); ++i) acc = fe_add(acc, fe_mul(f.coeffs[i], fe_mul(v[i], v[i])));
    return acc;
}

// Value of the form on a vector of polynomials (entries over f's field).
inline Poly evaluate_poly(const QuadForm& f, const std::vector<Poly>& v) {
    if (v.size() != form_dim(f)) throw FormMismatch("vector length does not match form dimension");
    if (v.empty()) throw ZeroInput("empty polynomial vector");
    Poly acc = poly_zero(v[0].coeff_field, v[0].vars);
    for (size_t i = 0; i < v.size(); ++i) {
        if (!field_eq(v[i].coeff_field, f.field)) throw FieldMismatch("polynomial entries over a different field");
        acc = poly_add(acc, poly_scale(f.coeffs[i], poly_mul(v[i], v[i])));
    }
    return acc;
}

// Polar form b(u, v) = (q(u+v) - q(u) - q(v)) / 2 = sum a_i u_i v_i.
inline FieldElem polar_form(const QuadForm& f, const std::vector<FieldElem>& u,
                            const std::vector<FieldElem>& v) {
    if (u.size() != form_dim(f) || v.size() != form_dim(f))
        throw FormMismatch("vector length does not match form dimension");
    FieldElem acc = fe_zero(f.field);
    for (size_t i = 0; i < u.size(); ++i) acc = fe_add(acc, fe_mul(f.coeffs[i], fe_mul(u[i], v[i])));
    return acc;
}

inline bool vec_is_zero(const std::vector<FieldElem>& v) {
    for (auto& x : v)
        if (!fe_is_zero(x)) return false;
    return true;
}

inline std::string form_to_string(const QuadForm& f) {
    std::string s = "<";
    for (size_t i = 0; i < f.coeffs.size(); ++i) s += (i ? "," : "") + fe_to_string(f.coeffs[i]);
    return s + ">";
}

// ---------------------------------------------------------------------------
// Gram matrix diagonalization by congruence (char != 2)
// ---------------------------------------------------------------------------

struct DiagonalizedForm {
    QuadForm form;       // diagonal entries of B^T G B
    Matrix basis;        // columns are the new basis vectors
};

// Diagonalize a symmetric nondegenerate Gram matrix. Throws DegenerateForm on
// singular input. Over Laurent towers the pivoting divisions can leave the
// finite Laurent subring, surfacing as InexactDivision.
inline DiagonalizedForm gram_diagonalize(const FieldPtr& field, Matrix g) {
    size_t n = g.size();
    if (n == 0) throw ZeroInput("empty Gram matrix");
    for (auto& row : g) {
        if (row.size() != n) throw FormMismatch("Gram matrix is not square");
        for (auto& e : row)
            if (!field_eq(e.field, field)) throw FieldMismatch("Gram entry from a different field");
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (!fe_eq(g[i][j], g[j][i])) throw FormMismatch("Gram matrix is not symmetric");

    Matrix basis = identity_matrix(field, n);
    auto add_col = [&](size_t dst, size_t src, const FieldElem& c) {
        // column_dst += c * column_src, applied congruently.
        for (size_t r = 0; r < n; ++r) g[r][dst] = fe_add(g[r][dst], fe_mul(c, g[r][src]));
        for (size_t cidx = 0; cidx < n; ++cidx) g[dst][cidx] = fe_add(g[dst][cidx], fe_mul(c, g[src][cidx]));
        for (size_t r = 0; r < n; ++r) basis[r][dst] = fe_add(basis[r][dst], fe_mul(c, basis[r][src]));
    };

    for (size_t k = 0; k < n; ++k) {
        if (fe_is_zero(g[k][k])) {
            // Find a usable pivot below/right of position k.
            size_t sw = n;
            for (size_t i = k + 1; i < n && sw == n; ++i)
                if (!fe_is_zero(g[i][i])) sw = i;
            if (sw != n) {
                std::swap(g[k], g[sw]);
                for (size_t r = 0; r < n; ++r) std::swap(g[r][k], g[r][sw]);
                for (size_t r = 0; r < n; ++r) std::swap(basis[r][k], basis[r][sw]);
            } else {
                size_t oi = n, oj = n;
                for (size_t i = k; i < n && oi == n; ++i)
                    for (size_t j = i + 1; j < n; ++j)
                        if (!fe_is_zero(g[i][j])) { oi = i; oj = j; break; }
                if (oi == n) throw DegenerateForm("Gram matrix is singular");
                add_col(oi, oj, fe_one(field));   // makes g[oi][oi] = 2 g[oi][oj] != 0
                if (oi != k) {
                    std::swap(g[k], g[oi]);
                    for (size_t r = 0; r < n; ++r) std::swap(g[r][k], g[r][oi]);
                    for (size_t r = 0; r < n; ++r) std::swap(basis[r][k], basis[r][oi]);
                }
            }
        }
        for (size_t j = k + 1; j < n; ++j) {
            if (fe_is_zero(g[k][j])) continue;
            add_col(j, k, fe_neg(fe_div(g[k][j], g[k][k])));
        }
    }
    std::vector<FieldElem> diag;
    diag.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        if (fe_is_zero(g[i][i])) throw DegenerateForm("Gram matrix is singular");
        diag.push_back(g[i][i]);
    }
    return {make_form(field, std::move(diag)), std::move(basis)};
}

} // namespace qforma

#endif
