#ifndef QFORMA_POLYFACTOR_HPP
#define QFORMA_POLYFACTOR_HPP

// Polynomial factorization into irreducibles.
//
// Univariate over GF(p): squarefree decomposition, distinct-degree splitting,
// and Cantor-Zassenhaus equal-degree splitting with a deterministically
// seeded generator, so results are reproducible.
//
// Univariate over Q: Yun squarefree decomposition, then Zassenhaus (factor
// modulo a good prime, Hensel lift past the Mignotte bound, recombine).
// The input is replaced by its monic integral transform first, so all lifted
// factors are monic and no leading-coefficient bookkeeping is needed.
//
// Multivariate over Q or GF(p), and univariate over a rational function
// field: Kronecker substitution into a single variable, then subset
// recombination with exact trial division. Exponential in the number of
// univariate factors, which is fine at the scale this library targets.
//
// Laurent-tower coefficient fields are rejected with UnsupportedField.

#include <cstdint>
#include <random>

#include "qforma/algebra.hpp"

namespace qforma {

struct PolyFactors {
    FieldElem unit;                               // constant scalar
    std::vector<std::pair<Poly, int>> factors;    // monic-lex irreducible, multiplicity >= 1
};

namespace detail {

// ---------------------------------------------------------------------------
// Dense polynomials over GF(p): coefficient of x^i at index i, no trailing
// zeros, entries in [0, p).
// ---------------------------------------------------------------------------

using ZpPoly = std::vector<long>;

inline void zp_trim(ZpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}
inline int zp_deg(const ZpPoly& f) { return static_cast<int>(f.size()) - 1; }

inline ZpPoly zp_add(const ZpPoly& a, const ZpPoly& b, long p) {
    ZpPoly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        long v = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
        r[i] = v % p;
    }
    zp_trim(r);
    return r;
}

inline ZpPoly zp_sub(const ZpPoly& a, const ZpPoly& b, long p) {
    ZpPoly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        long v = (i < a.size() ? a[i] : 0) - (i < b.size() ? b[i] : 0);
        r[i] = pf_norm(v, p);
    }
    zp_trim(r);
    return r;
}

inline ZpPoly zp_mul(const ZpPoly& a, const ZpPoly& b, long p) {
    if (a.empty() || b.empty()) return {};
    ZpPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + static_cast<long long>(a[i]) * b[j]) % p;
    }
    zp_trim(r);
    return r;
}

inline ZpPoly zp_scale(long c, const ZpPoly& a, long p) {
    c = pf_norm(c, p);
    if (c == 0) return {};
    ZpPoly r = a;
    for (auto& v : r) v = pf_mul(v, c, p);
    return r;
}

inline ZpPoly zp_monic(const ZpPoly& f, long p) {
    if (f.empty()) return f;
    return zp_scale(pf_inv(f.back(), p), f, p);
}

inline std::pair<ZpPoly, ZpPoly> zp_divmod(const ZpPoly& a, const ZpPoly& b, long p) {
    if (b.empty()) throw DivisionByZero("dense division by zero");
    if (a.size() < b.size()) return {{}, a};
    long inv = pf_inv(b.back(), p);
    ZpPoly r = a;
    ZpPoly q(a.size() - b.size() + 1, 0);
    for (int i = static_cast<int>(a.size() - b.size()); i >= 0; --i) {
        size_t top = i + b.size() - 1;
        if (top >= r.size() || r[top] == 0) continue;
        long c = pf_mul(r[top], inv, p);
        q[i] = c;
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = pf_norm(r[i + j] - pf_mul(c, b[j], p), p);
    }
    zp_trim(r);
    zp_trim(q);
    return {q, r};
}

inline ZpPoly zp_mod(const ZpPoly& a, const ZpPoly& b, long p) { return zp_divmod(a, b, p).second; }

inline ZpPoly zp_gcd(ZpPoly a, ZpPoly b, long p) {
    while (!b.empty()) {
        ZpPoly r = zp_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return zp_monic(a, p);
}

inline ZpPoly zp_derivative(const ZpPoly& f, long p) {
    ZpPoly r;
    for (size_t i = 1; i < f.size(); ++i) r.push_back(pf_mul(f[i], static_cast<long>(i % p), p));
    zp_trim(r);
    return r;
}

inline ZpPoly zp_mulmod(const ZpPoly& a, const ZpPoly& b, const ZpPoly& f, long p) {
    return zp_mod(zp_mul(a, b, p), f, p);
}

inline ZpPoly zp_powmod(ZpPoly a, const BigInt& e, const ZpPoly& f, long p) {
    ZpPoly r{1};
    a = zp_mod(a, f, p);
    BigInt k = e;
    while (k > 0) {
        if ((k & 1) != 0) r = zp_mulmod(r, a, f, p);
        a = zp_mulmod(a, a, f, p);
        k >>= 1;
    }
    return r;
}

// Inverse of a modulo f (gcd must be 1).
inline ZpPoly zp_invmod(const ZpPoly& a, const ZpPoly& f, long p) {
    ZpPoly r0 = f, r1 = zp_mod(a, f, p);
    ZpPoly s0{}, s1{1};
    while (!r1.empty()) {
        auto [q, r2] = zp_divmod(r0, r1, p);
        ZpPoly s2 = zp_sub(s0, zp_mul(q, s1, p), p);
        r0 = std::move(r1); r1 = std::move(r2);
        s0 = std::move(s1); s1 = std::move(s2);
    }
    if (zp_deg(r0) != 0) throw Error("zp_invmod: arguments not coprime");
    return zp_scale(pf_inv(r0[0], p), zp_mod(s0, f, p), p);
}

// Squarefree decomposition of a monic polynomial in characteristic p.
inline std::vector<std::pair<ZpPoly, int>> zp_squarefree(const ZpPoly& f0, long p) {
    std::vector<std::pair<ZpPoly, int>> out;
    ZpPoly f = zp_monic(f0, p);
    if (zp_deg(f) <= 0) return out;
    ZpPoly d = zp_derivative(f, p);
    ZpPoly c = d.empty() ? f : zp_gcd(f, d, p);
    ZpPoly w = d.empty() ? ZpPoly{1} : zp_divmod(f, c, p).first;
    int i = 1;
    while (zp_deg(w) > 0) {
        ZpPoly y = zp_gcd(w, c, p);
        ZpPoly z = zp_divmod(w, y, p).first;
        if (zp_deg(z) > 0) out.emplace_back(zp_monic(z, p), i);
        w = std::move(y);
        c = zp_divmod(c, w, p).first;
        ++i;
    }
    if (zp_deg(c) > 0) {
        // c is a p-th power: take the p-th root (Frobenius fixes GF(p)).
        ZpPoly root((c.size() - 1) / p + 1, 0);
        for (size_t k = 0; k < c.size(); ++k) {
            if (c[k] == 0) continue;
            if (k % p) throw Error("zp_squarefree: stray exponent in p-th power");
            root[k / p] = c[k];
        }
        for (auto& [g, m] : zp_squarefree(root, p)) out.emplace_back(g, m * static_cast<int>(p));
    }
    // Merge duplicate supports (can arise from the p-th power branch).
    std::map<ZpPoly, int> merged;
    for (auto& [g, m] : out) merged[g] += m;
    out.assign(merged.begin(), merged.end());
    return out;
}

// Distinct-degree splitting of a monic squarefree polynomial:
// returns (product of degree-d irreducibles, d).
inline std::vector<std::pair<ZpPoly, int>> zp_ddf(const ZpPoly& f0, long p) {
    std::vector<std::pair<ZpPoly, int>> out;
    ZpPoly f = f0;
    ZpPoly h{0, 1};   // x
    int d = 0;
    while (zp_deg(f) >= 2 * (d + 1)) {
        ++d;
        h = zp_powmod(h, BigInt(p), f, p);
        ZpPoly g = zp_gcd(zp_sub(h, ZpPoly{0, 1}, p), f, p);
        if (zp_deg(g) > 0) {
            out.emplace_back(g, d);
            f = zp_divmod(f, g, p).first;
            h = zp_mod(h, f, p);
        }
    }
    if (zp_deg(f) > 0) out.emplace_back(f, zp_deg(f));
    return out;
}

// Equal-degree splitting (Cantor-Zassenhaus) of a monic squarefree product of
// degree-d irreducibles.
inline void zp_edf(const ZpPoly& g, int d, long p, std::mt19937_64& rng, std::vector<ZpPoly>& out) {
    if (zp_deg(g) == d) {
        out.push_back(g);
        return;
    }
    BigInt e = (pow_int(BigInt(p), static_cast<unsigned>(d)) - 1) / 2;
    while (true) {
        ZpPoly a(static_cast<size_t>(zp_deg(g)), 0);
        for (auto& c : a) c = static_cast<long>(rng() % static_cast<unsigned long>(p));
        zp_trim(a);
        if (zp_deg(a) < 1) continue;
        ZpPoly t = zp_gcd(a, g, p);
        if (zp_deg(t) == 0) {
            ZpPoly b = zp_powmod(a, e, g, p);
            t = zp_gcd(zp_sub(b, ZpPoly{1}, p), g, p);
        }
        if (zp_deg(t) > 0 && zp_deg(t) < zp_deg(g)) {
            zp_edf(t, d, p, rng, out);
            zp_edf(zp_divmod(g, t, p).first, d, p, rng, out);
            return;
        }
    }
}

// Full monic factorization over GF(p).
inline std::vector<std::pair<ZpPoly, int>> zp_factor(const ZpPoly& f, long p) {
    std::vector<std::pair<ZpPoly, int>> out;
    std::mt19937_64 rng(0x51F0A5EDULL ^ (static_cast<unsigned long long>(p) << 20) ^ f.size());
    for (auto& [sf, mult] : zp_squarefree(f, p)) {
        for (auto& [prod, d] : zp_ddf(sf, p)) {
            std::vector<ZpPoly> irr;
            zp_edf(prod, d, p, rng, irr);
            for (auto& u : irr) out.emplace_back(zp_monic(u, p), mult);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dense polynomials over Z
// ---------------------------------------------------------------------------

using ZzPoly = std::vector<BigInt>;

inline void zz_trim(ZzPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}
inline int zz_deg(const ZzPoly& f) { return static_cast<int>(f.size()) - 1; }

inline ZzPoly zz_mul(const ZzPoly& a, const ZzPoly& b) {
    if (a.empty() || b.empty()) return {};
    ZzPoly r(a.size() + b.size() - 1, BigInt(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    zz_trim(r);
    return r;
}

inline BigInt zz_content(const ZzPoly& f) {
    BigInt g = 0;
    for (auto& c : f) g = gcd_int(g, c);
    return g;
}

// Exact division in Z[x]; nullopt if not divisible.
inline std::optional<ZzPoly> zz_try_div(const ZzPoly& a, const ZzPoly& b) {
    if (b.empty()) throw DivisionByZero("integer polynomial division by zero");
    if (a.empty()) return ZzPoly{};
    if (a.size() < b.size()) return std::nullopt;
    ZzPoly r = a;
    ZzPoly q(a.size() - b.size() + 1, BigInt(0));
    for (int i = static_cast<int>(q.size()) - 1; i >= 0; --i) {
        size_t top = i + b.size() - 1;
        if (top >= r.size()) continue;
        if (r[top] == 0) continue;
        if (r[top] % b.back() != 0) return std::nullopt;
        BigInt c = r[top] / b.back();
        q[i] = c;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] -= c * b[j];
    }
    zz_trim(r);
    if (!r.empty()) return std::nullopt;
    zz_trim(q);
    return q;
}

inline ZpPoly zz_to_zp(const ZzPoly& f, long p) {
    ZpPoly r(f.size());
    for (size_t i = 0; i < f.size(); ++i) r[i] = mod_floor(f[i], p).convert_to<long>();
    zp_trim(r);
    return r;
}

// Linear multifactor Hensel lifting: F monic over Z, F = prod(u_i) mod p with
// monic pairwise-coprime u_i; returns lifts mod q = p^k in symmetric range.
inline std::vector<ZzPoly> hensel_lift(const ZzPoly& F, const std::vector<ZpPoly>& us,
                                       long p, int k) {
    size_t m = us.size();
    // Bezout data: sigma_i = (prod_{j != i} u_j)^{-1} mod u_i over GF(p).
    std::vector<ZpPoly> sigma(m);
    for (size_t i = 0; i < m; ++i) {
        ZpPoly prod{1};
        for (size_t j = 0; j < m; ++j)
            if (j != i) prod = zp_mulmod(prod, zp_mod(us[j], us[i], p), us[i], p);
        sigma[i] = zp_invmod(prod, us[i], p);
    }
    std::vector<ZzPoly> U(m);
    for (size_t i = 0; i < m; ++i) {
        U[i].assign(us[i].begin(), us[i].end());
    }
    BigInt pj = p;
    for (int step = 1; step < k; ++step, pj *= p) {
        // error e = (F - prod U_i) / p^step mod p
        ZzPoly prod{BigInt(1)};
        for (auto& u : U) prod = zz_mul(prod, u);
        ZzPoly diff(std::max(F.size(), prod.size()), BigInt(0));
        for (size_t i = 0; i < diff.size(); ++i)
            diff[i] = (i < F.size() ? F[i] : 0) - (i < prod.size() ? prod[i] : 0);
        zz_trim(diff);
        ZpPoly e;
        e.reserve(diff.size());
        for (auto& c : diff) {
            if (c % pj != 0) throw Error("hensel_lift: invariant broken");
            e.push_back(mod_floor(c / pj, p).convert_to<long>());
        }
        zp_trim(e);
        if (e.empty()) continue;
        for (size_t i = 0; i < m; ++i) {
            ZpPoly delta = zp_mod(zp_mul(e, sigma[i], p), us[i], p);
            for (size_t t = 0; t < delta.size(); ++t) {
                if (delta[t] == 0) continue;
                if (U[i].size() <= t) U[i].resize(t + 1, BigInt(0));
                U[i][t] += pj * delta[t];
            }
        }
    }
    // Reduce to the symmetric range mod p^k.
    BigInt q = pow_int(BigInt(p), static_cast<unsigned>(k));
    for (auto& u : U) {
        for (auto& c : u) {
            c = mod_floor(c, q);
            if (c * 2 > q) c -= q;
        }
        zz_trim(u);
    }
    return U;
}

// Next subset of {0..n-1} of given size in lexicographic index order.
inline bool next_combination(std::vector<size_t>& idx, size_t n) {
    size_t k = idx.size();
    for (size_t i = k; i-- > 0;) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Zassenhaus factorization of a primitive squarefree polynomial of degree >= 1.
inline std::vector<ZzPoly> zassenhaus(const ZzPoly& g) {
    int n = zz_deg(g);
    if (n == 1) return {g};
    BigInt l = g.back();
    // Monic transform: G(x) = l^(n-1) g(x/l); factors of G are monic.
    ZzPoly G(g.size());
    G[n] = 1;
    BigInt pw = 1;
    for (int i = n - 1; i >= 0; --i) {
        G[i] = g[i] * pw;
        pw *= l;
    }
    // Prime with G squarefree mod p.
    long p = 0;
    for (long cand = 3;; cand += 2) {
        if (!is_prime(BigInt(cand))) continue;
        ZpPoly gp = zz_to_zp(G, cand);
        if (zp_deg(gp) != n) continue;   // p divides the leading coefficient
        if (zp_deg(zp_gcd(gp, zp_derivative(gp, cand), cand)) == 0) { p = cand; break; }
        if (cand > 20000) throw Error("zassenhaus: no good prime found");
    }
    std::vector<ZpPoly> us;
    for (auto& [u, m] : zp_factor(zz_to_zp(G, p), p)) {
        if (m != 1) throw Error("zassenhaus: modular factor not squarefree");
        us.push_back(u);
    }
    if (us.size() == 1) return {g};
    // Mignotte-style bound on factor coefficients of monic G.
    BigInt norm2 = 0;
    for (auto& c : G) norm2 += c * c;
    BigInt bound = (isqrt(norm2) + 1) * pow_int(BigInt(2), static_cast<unsigned>(n));
    int k = 1;
    BigInt q = p;
    while (q <= 2 * bound) { q *= p; ++k; }
    std::vector<ZzPoly> lifted = hensel_lift(G, us, p, k);

    // Subset recombination against the remaining cofactor of G.
    std::vector<ZzPoly> foundG;
    ZzPoly rem = G;
    std::vector<ZzPoly> avail = lifted;
    size_t s = 1;
    while (avail.size() >= 2 * s) {
        bool hit = false;
        std::vector<size_t> idx(s);
        for (size_t i = 0; i < s; ++i) idx[i] = i;
        do {
            ZzPoly cand{BigInt(1)};
            for (size_t i : idx) cand = zz_mul(cand, avail[i]);
            for (auto& c : cand) {
                c = mod_floor(c, q);
                if (c * 2 > q) c -= q;
            }
            zz_trim(cand);
            auto quo = zz_try_div(rem, cand);
            if (quo) {
                foundG.push_back(cand);
                rem = *quo;
                std::vector<ZzPoly> rest;
                for (size_t i = 0, j = 0; i < avail.size(); ++i) {
                    if (j < idx.size() && idx[j] == i) { ++j; continue; }
                    rest.push_back(avail[i]);
                }
                avail = std::move(rest);
                hit = true;
                break;
            }
        } while (next_combination(idx, avail.size()));
        if (!hit) ++s;
    }
    if (zz_deg(rem) > 0) foundG.push_back(rem);

    // Map factors of G back to primitive factors of g: h(x) -> pp(h(l x)).
    std::vector<ZzPoly> out;
    for (auto& h : foundG) {
        ZzPoly hg(h.size());
        BigInt lp = 1;
        for (size_t i = 0; i < h.size(); ++i) {
            hg[i] = h[i] * lp;
            lp *= l;
        }
        BigInt c = zz_content(hg);
        if (hg.back() < 0) c = -c;
        for (auto& cc : hg) cc /= c;
        out.push_back(std::move(hg));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conversions between sparse Poly and dense forms
// ---------------------------------------------------------------------------

inline long fe_as_pf(const FieldElem& a) { return std::get<long>(a.val); }
inline BigRat fe_as_rat(const FieldElem& a) { return std::get<BigRat>(a.val); }

inline void require_univariate(const Poly& f, size_t vi) {
    for (size_t i = 0; i < f.vars.size(); ++i)
        if (i != vi && poly_deg(f, i) > 0)
            throw HypothesisViolated("polynomial is not univariate in " + f.vars[vi]);
}

inline ZpPoly poly_to_zp(const Poly& f, size_t vi) {
    ZpPoly r(static_cast<size_t>(poly_deg(f, vi) + 1), 0);
    for (auto& [e, c] : f.terms) r[e[vi]] = fe_as_pf(c);
    zp_trim(r);
    return r;
}

inline Poly zp_to_poly(const ZpPoly& f, const FieldPtr& cf, const std::vector<std::string>& vars, size_t vi) {
    Poly r = poly_zero(cf, vars);
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) continue;
        Exps e(vars.size(), 0);
        e[vi] = static_cast<int>(i);
        r.terms.emplace(std::move(e), FieldElem{cf, f[i]});
    }
    return r;
}

// Primitive integer form of a univariate rational polynomial (content dropped).
inline ZzPoly poly_to_zz_primitive(const Poly& f, size_t vi) {
    BigInt lcm = 1;
    for (auto& [e, c] : f.terms) {
        BigInt d = den(fe_as_rat(c));
        lcm = lcm / gcd_int(lcm, d) * d;
    }
    ZzPoly r(static_cast<size_t>(poly_deg(f, vi) + 1), BigInt(0));
    for (auto& [e, c] : f.terms) {
        BigRat q = fe_as_rat(c) * BigRat(lcm);
        r[e[vi]] = num(q);
    }
    zz_trim(r);
    BigInt cont = zz_content(r);
    if (r.back() < 0) cont = -cont;
    for (auto& c : r) c /= cont;
    return r;
}

inline Poly zz_to_poly(const ZzPoly& f, const FieldPtr& cf, const std::vector<std::string>& vars, size_t vi) {
    Poly r = poly_zero(cf, vars);
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) continue;
        Exps e(vars.size(), 0);
        e[vi] = static_cast<int>(i);
        r.terms.emplace(std::move(e), fe_from_rat(cf, BigRat(f[i])));
    }
    return r;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Public factorization entry points
// ---------------------------------------------------------------------------

inline PolyFactors factor_in_var(const Poly& f, size_t vi);
inline PolyFactors factor_poly(const Poly& f);

namespace detail {

// Unit = f / prod(factors^mult); must come out constant.
inline PolyFactors finish_factorization(const Poly& f, std::vector<std::pair<Poly, int>> factors) {
    Poly prod = poly_const(f.coeff_field, f.vars, fe_one(f.coeff_field));
    for (auto& [h, m] : factors) prod = poly_mul(prod, poly_pow(h, static_cast<unsigned>(m)));
    Poly u = poly_div_exact(f, prod);
    if (poly_total_deg(u) != 0) throw Error("factorization unit is not constant");
    std::sort(factors.begin(), factors.end(),
              [](auto& a, auto& b) { return poly_cmp(a.first, b.first) > 0; });
    return {u.terms.begin()->second, std::move(factors)};
}

// Univariate factorization over GF(p) at the Poly level.
inline PolyFactors factor_univ_zp(const Poly& f, size_t vi) {
    long p = f.coeff_field->p;
    std::vector<std::pair<Poly, int>> factors;
    for (auto& [u, m] : zp_factor(zp_monic(poly_to_zp(f, vi), p), p))
        factors.emplace_back(zp_to_poly(u, f.coeff_field, f.vars, vi), m);
    return finish_factorization(f, std::move(factors));
}

// Univariate factorization over Q at the Poly level (Yun, then Zassenhaus).
inline PolyFactors factor_univ_qq(const Poly& f, size_t vi) {
    std::vector<std::pair<Poly, int>> factors;
    Poly fp = poly_derivative(f, vi);
    Poly a = poly_gcd(f, fp);
    Poly b = poly_div_exact(f, a);
    Poly c = poly_div_exact(fp, a);
    Poly d = poly_sub(c, poly_derivative(b, vi));
    for (int i = 1; poly_deg(b, vi) > 0; ++i) {
        Poly ai = poly_gcd(b, d);
        if (poly_deg(ai, vi) > 0) {
            for (auto& u : zassenhaus(poly_to_zz_primitive(ai, vi)))
                factors.emplace_back(poly_monic_lex(zz_to_poly(u, f.coeff_field, f.vars, vi)), i);
        }
        b = poly_div_exact(b, ai);
        c = poly_div_exact(d, ai);
        d = poly_sub(c, poly_derivative(b, vi));
    }
    return finish_factorization(f, std::move(factors));
}

// Kronecker substitution: factor a polynomial in several variables by
// encoding the active exponents into one variable.
inline std::vector<std::pair<Poly, int>> kronecker_factors(const Poly& f) {
    std::vector<size_t> act;
    for (size_t i = 0; i < f.vars.size(); ++i)
        if (poly_deg(f, i) > 0) act.push_back(i);
    std::vector<std::pair<Poly, int>> out;
    if (act.empty()) return out;
    if (act.size() == 1) {
        for (auto& [h, m] : factor_in_var(f, act[0]).factors) out.emplace_back(h, m);
        return out;
    }
    // Strip content in the first active variable and recurse on it.
    auto [cont, prim] = poly_content_primitive(f, act[0]);
    if (poly_total_deg(cont) > 0) out = kronecker_factors(cont);

    // Encode: exponent vector -> sum of e_i * D^i over active vars of prim.
    long long D = 0;
    for (size_t i : act) D = std::max<long long>(D, poly_deg(prim, i));
    D += 1;
    long long span = 1;
    for (size_t i = 0; i < act.size(); ++i) {
        span *= D;
        if (span > 2'000'000) throw SearchExhausted("Kronecker encoding degree too large");
    }
    Poly enc = poly_zero(prim.coeff_field, {"#kron"});
    for (auto& [e, c] : prim.terms) {
        long long k = 0, w = 1;
        for (size_t i : act) {
            k += e[i] * w;
            w *= D;
        }
        enc.terms.emplace(Exps{static_cast<int>(k)}, c);
    }
    std::vector<Poly> avail;
    for (auto& [u, m] : factor_in_var(enc, 0).factors)
        for (int i = 0; i < m; ++i) avail.push_back(u);

    auto decode = [&](const Poly& cand) {
        Poly r = poly_zero(prim.coeff_field, prim.vars);
        for (auto& [e, c] : cand.terms) {
            long long k = e[0];
            Exps ee(prim.vars.size(), 0);
            for (size_t i : act) {
                ee[i] = static_cast<int>(k % D);
                k /= D;
            }
            auto it = r.terms.find(ee);
            if (it != r.terms.end()) return poly_zero(prim.coeff_field, prim.vars);   // collision: reject
            r.terms.emplace(std::move(ee), c);
        }
        return r;
    };

    Poly rem = prim;
    size_t s = 1;
    long candidates = 0;
    while (avail.size() >= 2 * s) {
        bool hit = false;
        std::vector<size_t> idx(s);
        for (size_t i = 0; i < s; ++i) idx[i] = i;
        do {
            if (++candidates > 200000) throw SearchExhausted("Kronecker recombination too large");
            Poly cand = poly_const(prim.coeff_field, std::vector<std::string>{"#kron"}, fe_one(prim.coeff_field));
            for (size_t i : idx) cand = poly_mul(cand, avail[i]);
            Poly dec = decode(cand);
            if (poly_is_zero(dec)) continue;
            auto quo = poly_try_div(rem, dec);
            if (quo) {
                out.emplace_back(poly_monic_lex(dec), 1);
                rem = *quo;
                std::vector<Poly> rest;
                for (size_t i = 0, j = 0; i < avail.size(); ++i) {
                    if (j < idx.size() && idx[j] == i) { ++j; continue; }
                    rest.push_back(avail[i]);
                }
                avail = std::move(rest);
                hit = true;
                break;
            }
        } while (next_combination(idx, avail.size()));
        if (!hit) ++s;
    }
    if (poly_total_deg(rem) > 0) out.emplace_back(poly_monic_lex(rem), 1);

    // Collect equal factors into multiplicities.
    std::vector<std::pair<Poly, int>> merged;
    for (auto& [h, m] : out) {
        bool dup = false;
        for (auto& [h2, m2] : merged) {
            if (poly_eq(h, h2)) { m2 += m; dup = true; break; }
        }
        if (!dup) merged.emplace_back(h, m);
    }
    return merged;
}

// Univariate factorization over a rational function field: clear denominators,
// factor the flattened polynomial over the base, and regroup by the degree in
// the polynomial's own variable.
inline PolyFactors factor_univ_ff(const Poly& f, size_t vi) {
    const FieldPtr& L = f.coeff_field;
    std::vector<std::string> flat_vars = L->vars;
    size_t offset = flat_vars.size();
    flat_vars.insert(flat_vars.end(), f.vars.begin(), f.vars.end());

    // Common denominator of the coefficients.
    Poly common = poly_const(L->base, L->vars, fe_one(L->base));
    for (auto& [e, c] : f.terms) {
        const FracVal& fv = *std::get<FracPtr>(c.val);
        Poly g = poly_gcd(common, fv.den);
        common = poly_div_exact(poly_mul(common, fv.den), g);
    }
    Poly flat = poly_zero(L->base, flat_vars);
    for (auto& [e, c] : f.terms) {
        const FracVal& fv = *std::get<FracPtr>(c.val);
        Poly scaled = poly_mul(fv.num, poly_div_exact(common, fv.den));
        for (auto& [ee, cc] : scaled.terms) {
            Exps big(flat_vars.size(), 0);
            for (size_t i = 0; i < ee.size(); ++i) big[i] = ee[i];
            for (size_t i = 0; i < e.size(); ++i) big[offset + i] += e[i];
            flat.terms.emplace(std::move(big), cc);
        }
    }

    std::vector<std::pair<Poly, int>> factors;
    for (auto& [h, m] : factor_poly(flat).factors) {
        if (poly_deg(h, offset + vi) == 0) continue;   // constant in L
        // Regroup h as a polynomial over L in f's variables, then make it
        // unitary in the lex-leading sense.
        Poly lifted = poly_zero(L, f.vars);
        for (auto& [e, c] : h.terms) {
            Exps outer(f.vars.size(), 0);
            Exps innerExp(L->vars.size(), 0);
            for (size_t i = 0; i < L->vars.size(); ++i) innerExp[i] = e[i];
            for (size_t i = 0; i < f.vars.size(); ++i) outer[i] = e[offset + i];
            Poly mono = poly_zero(L->base, L->vars);
            mono.terms.emplace(std::move(innerExp), c);
            FieldElem coeff = fe_from_poly(L, mono);
            auto it = lifted.terms.find(outer);
            if (it == lifted.terms.end()) lifted.terms.emplace(std::move(outer), std::move(coeff));
            else it->second = fe_add(it->second, coeff);
        }
        factors.emplace_back(poly_monic_lex(lifted), m);
    }
    return finish_factorization(f, std::move(factors));
}

} // namespace detail

// Factor f as a univariate polynomial in vars[vi] over its coefficient field.
// Supports Q, GF(p), and rational function field coefficients.
inline PolyFactors factor_in_var(const Poly& f, size_t vi) {
    if (poly_is_zero(f)) throw ZeroInput("factorization of zero");
    detail::require_univariate(f, vi);
    if (poly_deg(f, vi) == 0) return {f.terms.begin()->second, {}};
    switch (f.coeff_field->kind) {
        case FieldKind::PrimeField: return detail::factor_univ_zp(f, vi);
        case FieldKind::Rationals: return detail::factor_univ_qq(f, vi);
        case FieldKind::RationalFunctions: return detail::factor_univ_ff(f, vi);
        case FieldKind::LaurentTower:
            throw UnsupportedField("factorization over Laurent series coefficients");
    }
    throw Error("unreachable");
}

// Factor a multivariate polynomial over Q or GF(p) into irreducibles.
inline PolyFactors factor_poly(const Poly& f) {
    if (poly_is_zero(f)) throw ZeroInput("factorization of zero");
    if (f.coeff_field->kind != FieldKind::Rationals && f.coeff_field->kind != FieldKind::PrimeField)
        throw UnsupportedField("multivariate factorization needs Q or GF(p) coefficients");
    return detail::finish_factorization(f, detail::kronecker_factors(f));
}

inline bool poly_irreducible_in_var(const Poly& f, size_t vi) {
    if (poly_is_zero(f) || poly_deg(f, vi) == 0) return false;
    PolyFactors pf = factor_in_var(f, vi);
    return pf.factors.size() == 1 && pf.factors[0].second == 1;
}

inline bool poly_irreducible(const Poly& f) {
    if (poly_is_zero(f) || poly_total_deg(f) <= 0) return false;
    PolyFactors pf = factor_poly(f);
    return pf.factors.size() == 1 && pf.factors[0].second == 1;
}

} // namespace qforma

#endif
