#ifndef QFORMA_LINALG_HPP
#define QFORMA_LINALG_HPP

// Small exact linear algebra over the supported fields: row reduction, rank,
// and linear solves. Everything works on dense matrices of field elements.
//
// Row reduction divides by pivots; over Laurent towers that division can
// leave the finite Laurent subring and surface as InexactDivision.

#include "qforma/algebra.hpp"

namespace qforma {

using Vec = std::vector<FieldElem>;
using Matrix = std::vector<std::vector<FieldElem>>;

inline Matrix identity_matrix(const FieldPtr& field, size_t n) {
    Matrix m(n, Vec(n, fe_zero(field)));
    for (size_t i = 0; i < n; ++i) m[i][i] = fe_one(field);
    return m;
}

inline Matrix mat_transpose(const Matrix& a) {
    if (a.empty()) return {};
    Matrix r(a[0].size(), Vec(a.size(), a[0][0]));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[j][i] = a[i][j];
    return r;
}

inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.empty() || b.empty()) return {};
    size_t n = a.size(), k = b.size(), m = b[0].size();
    const FieldPtr& field = a[0][0].field;
    Matrix r(n, Vec(m, fe_zero(field)));
    for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < k; ++t)
            for (size_t j = 0; j < m; ++j) r[i][j] = fe_add(r[i][j], fe_mul(a[i][t], b[t][j]));
    return r;
}

inline Vec mat_vec(const Matrix& a, const Vec& x) {
    Vec r;
    r.reserve(a.size());
    for (auto& row : a) {
        FieldElem acc = fe_zero(x.empty() ? row[0].field : x[0].field);
        for (size_t j = 0; j < row.size(); ++j) acc = fe_add(acc, fe_mul(row[j], x[j]));
        r.push_back(acc);
    }
    return r;
}

inline Vec vec_scale(const FieldElem& c, const Vec& v) {
    Vec r = v;
    for (auto& x : r) x = fe_mul(c, x);
    return r;
}

inline Vec vec_add(const Vec& a, const Vec& b) {
    Vec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] = fe_add(r[i], b[i]);
    return r;
}

inline Vec vec_sub(const Vec& a, const Vec& b) {
    Vec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] = fe_sub(r[i], b[i]);
    return r;
}

// In-place reduced row echelon form; returns the pivot column of each pivot
// row in order.
inline std::vector<size_t> rref_in_place(Matrix& m) {
    std::vector<size_t> pivots;
    if (m.empty()) return pivots;
    size_t rows = m.size(), cols = m[0].size(), r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t sel = rows;
        for (size_t i = r; i < rows; ++i)
            if (!fe_is_zero(m[i][c])) { sel = i; break; }
        if (sel == rows) continue;
        std::swap(m[r], m[sel]);
        FieldElem inv = fe_inv(m[r][c]);
        for (size_t j = c; j < cols; ++j) m[r][j] = fe_mul(inv, m[r][j]);
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || fe_is_zero(m[i][c])) continue;
            FieldElem f = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] = fe_sub(m[i][j], fe_mul(f, m[r][j]));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline size_t mat_rank(Matrix m) { return rref_in_place(m).size(); }

// One solution of A x = b, if any.
inline std::optional<Vec> solve_linear(const Matrix& a, const Vec& b) {
    if (a.empty()) return Vec{};
    size_t rows = a.size(), cols = a[0].size();
    const FieldPtr& field = a[0][0].field;
    Matrix aug = a;
    for (size_t i = 0; i < rows; ++i) aug[i].push_back(b[i]);
    auto pivots = rref_in_place(aug);
    for (size_t k = 0; k < pivots.size(); ++k)
        if (pivots[k] == cols) return std::nullopt;   // pivot in the constant column
    Vec x(cols, fe_zero(field));
    for (size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = aug[k][cols];
    return x;
}

// Basis of the null space of A.
inline std::vector<Vec> null_space(const Matrix& a) {
    if (a.empty()) return {};
    size_t cols = a[0].size();
    const FieldPtr& field = a[0][0].field;
    Matrix m = a;
    auto pivots = rref_in_place(m);
    std::vector<bool> is_pivot(cols, false);
    for (size_t c : pivots) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (size_t fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc]) continue;
        Vec v(cols, fe_zero(field));
        v[fc] = fe_one(field);
        for (size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = fe_neg(m[k][fc]);
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace qforma

#endif
