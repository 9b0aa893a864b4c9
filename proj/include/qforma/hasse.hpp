#ifndef QFORMA_HASSE_HPP
#define QFORMA_HASSE_HPP

// Quadratic forms over the rationals: Hilbert symbols, local invariants,
// the local-global isotropy decision, Witt indices, isometry testing, and
// constructive isotropic vectors and representations.
//
// Everything here works on plain rational coefficient vectors; the dispatch
// layer converts from field elements.

#include "qforma/errors.hpp"
#include "qforma/numutil.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qforma {

struct Place {
    bool infinite;
    BigInt p;   // prime when finite
};

inline Place infinite_place() { return {true, 0}; }
inline Place finite_place(const BigInt& p) { return {false, p}; }

inline std::string place_to_string(const Place& v) {
    return v.infinite ? "inf" : v.p.str();
}

// Unit part of a at p, reduced modulo `modulus` (a power of p or p itself).
inline BigInt rat_unit_residue(const BigRat& a, const BigInt& p, const BigInt& modulus) {
    BigInt n = num(a), d = den(a);
    while (n % p == 0) n /= p;
    while (d % p == 0) d /= p;
    return mod_floor(mod_floor(n, modulus) * inv_mod(mod_floor(d, modulus), modulus), modulus);
}

inline int hilbert_symbol(const BigRat& a, const BigRat& b, const Place& v) {
    if (a == 0 || b == 0) throw ZeroInput("Hilbert symbol of zero");
    if (v.infinite) return (a < 0 && b < 0) ? -1 : 1;
    const BigInt& p = v.p;
    long alpha = valuation_rat(a, p), beta = valuation_rat(b, p);
    if (p == 2) {
        BigInt u = rat_unit_residue(a, 2, 8), w = rat_unit_residue(b, 2, 8);
        auto eps = [](const BigInt& x) { return ((x - 1) / 2) % 2 != 0; };   // x = 3 mod 4
        auto omega = [](const BigInt& x) { return x == 3 || x == 5; };       // x = +-3 mod 8
        bool e = (eps(u) && eps(w)) ^ ((alpha % 2 != 0) && omega(w)) ^ ((beta % 2 != 0) && omega(u));
        return e ? -1 : 1;
    }
    int lu = legendre_symbol(rat_unit_residue(a, p, p), p);
    int lw = legendre_symbol(rat_unit_residue(b, p, p), p);
    int r = 1;
    if ((alpha % 2 != 0) && (beta % 2 != 0) && ((p - 1) / 2) % 2 != 0) r = -r;
    if (beta % 2 != 0 && lu == -1) r = -r;
    if (alpha % 2 != 0 && lw == -1) r = -r;
    return r;
}

inline bool local_square(const BigRat& a, const Place& v) {
    if (a == 0) throw ZeroInput("local square test of zero");
    if (v.infinite) return a > 0;
    if (valuation_rat(a, v.p) % 2 != 0) return false;
    if (v.p == 2) return rat_unit_residue(a, 2, 8) == 1;
    return legendre_symbol(rat_unit_residue(a, v.p, v.p), v.p) == 1;
}

// Places that can carry nontrivial invariants: the infinite place, 2, and the
// odd primes dividing some coefficient's square class.
inline std::vector<Place> rational_support(const std::vector<BigRat>& cs) {
    std::set<BigInt> primes{BigInt(2)};
    for (const BigRat& c : cs) {
        if (c == 0) throw ZeroInput("support of a degenerate form");
        for (auto& [p, e] : factorize(abs_int(squarefree_part(c)))) {
            (void)e;
            primes.insert(p);
        }
    }
    std::vector<Place> out{infinite_place()};
    for (const BigInt& p : primes) out.push_back(finite_place(p));
    return out;
}

inline BigRat form_det_rationals(const std::vector<BigRat>& cs) {
    BigRat d = 1;
    for (const BigRat& c : cs) d *= c;
    return d;
}

inline int hasse_invariant(const std::vector<BigRat>& cs, const Place& v) {
    int r = 1;
    for (size_t i = 0; i < cs.size(); ++i)
        for (size_t j = i + 1; j < cs.size(); ++j) r *= hilbert_symbol(cs[i], cs[j], v);
    return r;
}

inline std::pair<int, int> signature_rationals(const std::vector<BigRat>& cs) {
    int pos = 0, neg = 0;
    for (const BigRat& c : cs) (c > 0 ? pos : neg)++;
    return {pos, neg};
}

// Isotropy over the completion at v, from dimension, determinant and Hasse
// invariant (signature at the infinite place).
inline bool local_isotropic(size_t n, const BigRat& d, int eps, const std::pair<int, int>& sig,
                            const Place& v) {
    if (v.infinite) return n >= 2 && sig.first > 0 && sig.second > 0;
    if (n <= 1) return false;
    if (n == 2) return local_square(-d, v);
    if (n == 3) return eps == hilbert_symbol(-1, -d, v);
    if (n == 4) return !(local_square(d, v) && eps == -hilbert_symbol(BigRat(-1), BigRat(-1), v));
    return true;
}

inline bool local_isotropic(const std::vector<BigRat>& cs, const Place& v) {
    return local_isotropic(cs.size(), form_det_rationals(cs), hasse_invariant(cs, v),
                           signature_rationals(cs), v);
}

inline bool is_isotropic_rationals(const std::vector<BigRat>& cs) {
    size_t n = cs.size();
    for (const BigRat& c : cs)
        if (c == 0) throw ZeroInput("degenerate form");
    if (n <= 1) return false;
    if (n == 2) return is_square_rat(-cs[0] * cs[1]);
    auto sig = signature_rationals(cs);
    if (n >= 5) return sig.first > 0 && sig.second > 0;
    BigRat d = form_det_rationals(cs);
    for (const Place& v : rational_support(cs))
        if (!local_isotropic(n, d, hasse_invariant(cs, v), sig, v)) return false;
    return true;
}

inline int local_witt_index(const std::vector<BigRat>& cs, const Place& v) {
    if (v.infinite) {
        auto [pos, neg] = signature_rationals(cs);
        return pos < neg ? pos : neg;
    }
    size_t n = cs.size();
    BigRat d = form_det_rationals(cs);
    int eps = hasse_invariant(cs, v);
    int i = 0;
    while (n >= 2 && local_isotropic(n, d, eps, {0, 0}, v)) {
        // Splitting a hyperbolic plane: det flips sign, the Hasse invariant
        // picks up (-1, new det).
        d = -d;
        eps *= hilbert_symbol(BigRat(-1), d, v);
        n -= 2;
        ++i;
    }
    return i;
}

// Witt index over the rationals: the minimum of the local indices, including
// the value at primes outside the support.
inline int witt_index_rationals(const std::vector<BigRat>& cs) {
    size_t n = cs.size();
    if (n <= 1) return 0;
    int best;
    if (n % 2) {
        best = int((n - 1) / 2);   // unramified odd-dimensional kernel has dimension 1
    } else {
        BigRat c = form_det_rationals(cs);
        if ((n / 2) % 2) c = -c;
        best = is_square_rat(c) ? int(n / 2) : int((n - 2) / 2);
    }
    for (const Place& v : rational_support(cs)) best = std::min(best, local_witt_index(cs, v));
    return best;
}

inline bool is_isometric_rationals(const std::vector<BigRat>& a, const std::vector<BigRat>& b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    if (!is_square_rat(form_det_rationals(a) * form_det_rationals(b))) return false;
    if (signature_rationals(a) != signature_rationals(b)) return false;
    std::vector<BigRat> all = a;
    all.insert(all.end(), b.begin(), b.end());
    for (const Place& v : rational_support(all))
        if (hasse_invariant(a, v) != hasse_invariant(b, v)) return false;
    return true;
}

// Isotropy of a rational form after adjoining a square root of disc.  Binary
// forms reduce to a square-class test.  In dimension >= 3 the form stays
// anisotropic exactly when some rational place where it is anisotropic splits
// in the extension: at a non-split place the completion is a quadratic
// extension of the local field, and that kills every rational division
// quaternion algebra, hence every local obstruction in dimension 3 or 4.
inline bool is_isotropic_quadratic_ext(const std::vector<BigRat>& cs, const BigRat& disc) {
    if (disc == 0) throw ZeroInput("quadratic extension by zero");
    for (const BigRat& c : cs)
        if (c == 0) throw ZeroInput("degenerate form");
    if (is_square_rat(disc)) return is_isotropic_rationals(cs);
    size_t n = cs.size();
    if (n <= 1) return false;
    if (n == 2) {
        BigRat m = -cs[0] * cs[1];
        return is_square_rat(m) || is_square_rat(m * disc);
    }
    for (const Place& v : rational_support(cs)) {
        bool splits = v.infinite ? disc > 0 : local_square(disc, v);
        if (splits && !local_isotropic(cs, v)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Constructive layer
// ---------------------------------------------------------------------------

namespace detail {

inline void normalize_triple(std::array<BigInt, 3>& t) {
    BigInt g = gcd_int(gcd_int(t[0], t[1]), t[2]);
    if (g > 1)
        for (auto& x : t) x /= g;
}

// Nontrivial solution of x^2 = a y^2 + b z^2 for squarefree nonzero a, b,
// assuming one exists. Classical descent: reduce b modulo the larger
// coefficient and compose solutions through the norm identity
// (x1^2 - b z1^2)(t^2 - b) = (x1 t + b z1)^2 - b (x1 + t z1)^2.
inline std::array<BigInt, 3> legendre_descent(BigInt a, BigInt b, int depth = 0) {
    if (depth > 200) throw Error("ternary descent did not terminate");
    if (a == 1) return {1, 1, 0};
    if (b == 1) return {1, 0, 1};
    if (abs_int(b) > abs_int(a)) {
        auto [x, y, z] = legendre_descent(b, a, depth + 1);
        return {x, z, y};
    }
    if (a == -1) throw NotIsotropic("ternary descent reached an unsolvable core");
    BigInt am = abs_int(a);
    BigInt t;
    try {
        t = sqrt_mod_squarefree(mod_floor(b, am), am);
    } catch (const std::domain_error&) {
        throw NotIsotropic("ternary form fails a residue condition");
    }
    if (2 * t > am) t = am - t;
    BigInt r = (t * t - b) / a;
    if (r == 0) throw Error("ternary descent: unexpected square modulus");
    auto [a1, m] = squarefree_decompose(r);
    auto [x1, y1, z1] = legendre_descent(a1, b, depth + 1);
    std::array<BigInt, 3> out{x1 * t + b * z1, a1 * y1 * m, x1 + t * z1};
    normalize_triple(out);
    return out;
}

} // namespace detail

// Nontrivial rational zero of a x^2 + b y^2 + c z^2; the form must be
// isotropic (run the decision first).
inline std::array<BigRat, 3> solve_ternary_rationals(const BigRat& a, const BigRat& b,
                                                     const BigRat& c) {
    if (a == 0 || b == 0 || c == 0) throw ZeroInput("degenerate ternary form");
    // Scale the form to integer coefficients and strip squares per slot.
    BigInt l = den(a) * den(b) * den(c);
    auto strip = [&](const BigRat& q) { return squarefree_decompose(num(q * BigRat(l))); };
    auto [a0, sa] = strip(a);
    auto [b0, sb] = strip(b);
    auto [c0, sc] = strip(c);

    // Multiply by a0: (a0 x)^2 = (-a0 b0) y^2 + (-a0 c0) z^2.
    auto [ay, my] = squarefree_decompose(-a0 * b0);
    auto [az, mz] = squarefree_decompose(-a0 * c0);
    auto [xx, yy, zz] = detail::legendre_descent(ay, az);

    std::array<BigRat, 3> v{BigRat(xx) / a0, BigRat(yy) / my, BigRat(zz) / mz};
    // Undo the per-slot square scalings.
    v[0] /= sa;
    v[1] /= sb;
    v[2] /= sc;
    if (a * v[0] * v[0] + b * v[1] * v[1] + c * v[2] * v[2] != 0 ||
        (v[0] == 0 && v[1] == 0 && v[2] == 0))
        throw Error("ternary solver produced an invalid vector");
    // Clear denominators and common factors.
    BigInt common = den(v[0]) * den(v[1]) * den(v[2]);
    std::array<BigInt, 3> w{num(v[0] * common), num(v[1] * common), num(v[2] * common)};
    detail::normalize_triple(w);
    return {BigRat(w[0]), BigRat(w[1]), BigRat(w[2])};
}

namespace detail {

// Exact square root of a rational square.
inline BigRat rat_sqrt(const BigRat& q) {
    if (!is_square_rat(q)) throw Error("rat_sqrt: not a square");
    return BigRat(isqrt(num(q)), isqrt(den(q)));
}

// Given a nonzero isotropic vector v of the form, produce u with form(u) = c.
inline std::vector<BigRat> represent_via_isotropic(const std::vector<BigRat>& cs,
                                                   const std::vector<BigRat>& v, const BigRat& c) {
    size_t j = cs.size();
    for (size_t i = 0; i < cs.size(); ++i)
        if (v[i] != 0) { j = i; break; }
    if (j == cs.size()) throw Error("isotropic vector is zero");
    BigRat beta = cs[j] * v[j];
    BigRat alpha = (c - cs[j]) / (2 * beta);
    std::vector<BigRat> u(cs.size(), BigRat(0));
    for (size_t i = 0; i < cs.size(); ++i) u[i] = alpha * v[i];
    u[j] += 1;
    return u;
}

// Candidate link values: +-1 times squarefree products over the support
// primes, each optionally multiplied by one auxiliary prime. `fn` receives
// candidates until it returns true; returns false when the family runs out.
inline bool scan_link_values(const std::vector<BigRat>& coeffs,
                             const std::function<bool(const BigRat&)>& fn) {
    std::set<BigInt> sset{BigInt(2)};
    for (const BigRat& c : coeffs)
        for (auto& [p, e] : factorize(abs_int(squarefree_part(c)))) {
            (void)e;
            sset.insert(p);
        }
    std::vector<BigInt> ps(sset.begin(), sset.end());
    if (ps.size() > 20) throw SearchExhausted("link-value support too large");
    std::vector<BigInt> bases;
    for (size_t mask = 0; mask < (size_t(1) << ps.size()); ++mask) {
        BigInt m = 1;
        for (size_t i = 0; i < ps.size(); ++i)
            if (mask & (size_t(1) << i)) m *= ps[i];
        bases.push_back(m);
        bases.push_back(-m);
    }
    for (const BigInt& m : bases)
        if (fn(BigRat(m))) return true;
    BigInt q = 2;
    for (int count = 0; count < 3000; ++count) {
        do { ++q; } while (!is_prime(q) || sset.count(q));
        for (const BigInt& m : bases)
            if (fn(BigRat(m * q))) return true;
    }
    return false;
}

std::vector<BigRat> isotropic_vector_dim4(const std::vector<BigRat>& cs);

// Representation of c by an anisotropic binary or ternary subform paired
// against the rest; core of the dimension-4 representation search.
inline std::vector<BigRat> represent_dim4(const std::vector<BigRat>& cs, const BigRat& c) {
    // Direct single-slot and two-slot hits.
    for (size_t i = 0; i < 4; ++i)
        if (is_square_rat(c / cs[i])) {
            std::vector<BigRat> u(4, BigRat(0));
            u[i] = rat_sqrt(c / cs[i]);
            return u;
        }
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = i + 1; j < 4; ++j) {
            if (!is_isotropic_rationals({cs[i], cs[j], -c})) continue;
            auto [x, y, w] = solve_ternary_rationals(cs[i], cs[j], -c);
            std::vector<BigRat> u(4, BigRat(0));
            if (w != 0) {
                u[i] = x / w;
                u[j] = y / w;
                return u;
            }
            // The binary piece is isotropic, hence the whole form is universal.
            u[i] = x;
            u[j] = y;
            return represent_via_isotropic(cs, u, c);
        }
    if (is_isotropic_rationals(cs))
        return represent_via_isotropic(cs, isotropic_vector_dim4(cs), c);

    // Anisotropic case: link value e with <c1,c2> representing e and
    // <c3,c4,-c> representing -e.
    std::vector<BigRat> all = cs;
    all.push_back(c);
    std::vector<BigRat> result;
    bool found = scan_link_values(all, [&](const BigRat& e) {
        if (e == 0) return false;
        if (!is_isotropic_rationals({cs[0], cs[1], -e})) return false;
        if (!is_isotropic_rationals({cs[2], cs[3], -c, e})) return false;
        auto [x, y, w1] = solve_ternary_rationals(cs[0], cs[1], -e);
        if (w1 == 0) throw Error("link search hit an isotropic binary");
        auto side2 = isotropic_vector_dim4({cs[2], cs[3], -c, e});
        const BigRat &z = side2[0], &t = side2[1], &u = side2[2], &w = side2[3];
        if (w == 0 || u == 0) throw Error("link search produced a degenerate split");
        BigRat s = u * w1;
        result = {x * w / s, y * w / s, z * w1 / s, t * w1 / s};
        return true;
    });
    if (!found) throw SearchExhausted("no link value found for the representation");
    return result;
}

inline std::vector<BigRat> isotropic_vector_dim4(const std::vector<BigRat>& cs) {
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = i + 1; j < 4; ++j)
            if (is_square_rat(-cs[i] * cs[j])) {
                std::vector<BigRat> v(4, BigRat(0));
                v[i] = rat_sqrt(-cs[j] / cs[i]);
                v[j] = 1;
                return v;
            }
    std::vector<BigRat> result;
    bool found = scan_link_values(cs, [&](const BigRat& e) {
        if (e == 0) return false;
        if (!is_isotropic_rationals({cs[0], cs[1], -e})) return false;
        if (!is_isotropic_rationals({cs[2], cs[3], e})) return false;
        auto [x, y, w1] = solve_ternary_rationals(cs[0], cs[1], -e);
        auto [z, t, w2] = solve_ternary_rationals(cs[2], cs[3], e);
        if (w1 == 0 || w2 == 0) throw Error("link search hit an isotropic binary");
        result = {x * w2, y * w2, z * w1, t * w1};
        return true;
    });
    if (!found) throw SearchExhausted("no link value found for the isotropy witness");
    return result;
}

} // namespace detail

std::optional<std::vector<BigRat>> represent_rationals(const std::vector<BigRat>& cs,
                                                       const BigRat& c);

// Nontrivial rational zero of the form; the form must be isotropic.
inline std::vector<BigRat> isotropic_vector_rationals(const std::vector<BigRat>& cs) {
    size_t n = cs.size();
    if (!is_isotropic_rationals(cs)) throw NotIsotropic("form is anisotropic over the rationals");
    if (n == 2) return {detail::rat_sqrt(-cs[1] / cs[0]), BigRat(1)};
    if (n == 3) {
        auto [x, y, z] = solve_ternary_rationals(cs[0], cs[1], cs[2]);
        return {x, y, z};
    }
    if (n == 4) return detail::isotropic_vector_dim4(cs);
    // Shortest isotropic prefix; below it everything is anisotropic.
    for (size_t k = 2; k < n; ++k) {
        std::vector<BigRat> prefix(cs.begin(), cs.begin() + k);
        if (!is_isotropic_rationals(prefix)) continue;
        std::vector<BigRat> v = isotropic_vector_rationals(prefix);
        v.resize(n, BigRat(0));
        return v;
    }
    std::vector<BigRat> head(cs.begin(), cs.end() - 1);
    auto u = represent_rationals(head, -cs.back());
    if (!u) throw Error("isotropic form failed the representation step");
    u->push_back(BigRat(1));
    return *u;
}

// Vector u with form(u) = c, when c is represented.
inline std::optional<std::vector<BigRat>> represent_rationals(const std::vector<BigRat>& cs,
                                                              const BigRat& c) {
    if (c == 0) throw ZeroInput("representation of zero; use the isotropy test");
    size_t n = cs.size();
    std::vector<BigRat> ext = cs;
    ext.push_back(-c);
    if (!is_isotropic_rationals(ext)) return std::nullopt;
    if (n == 1) return std::vector<BigRat>{detail::rat_sqrt(c / cs[0])};
    if (n == 2) {
        auto [x, y, w] = solve_ternary_rationals(cs[0], cs[1], -c);
        if (w != 0) return std::vector<BigRat>{x / w, y / w};
        return detail::represent_via_isotropic(cs, {x, y}, c);
    }
    if (n == 3) {
        if (is_isotropic_rationals(cs))
            return detail::represent_via_isotropic(cs, isotropic_vector_rationals(cs), c);
        auto v = detail::isotropic_vector_dim4(ext);
        if (v[3] == 0) throw Error("anisotropic ternary yielded an isotropic witness");
        return std::vector<BigRat>{v[0] / v[3], v[1] / v[3], v[2] / v[3]};
    }
    if (n == 4) return detail::represent_dim4(cs, c);
    if (is_isotropic_rationals(cs))
        return detail::represent_via_isotropic(cs, isotropic_vector_rationals(cs), c);
    // Anisotropic in dimension >= 5: definite, and the sign already matched
    // (the extended form is isotropic), so the first four slots suffice.
    auto u = detail::represent_dim4({cs[0], cs[1], cs[2], cs[3]}, c);
    u.resize(n, BigRat(0));
    return u;
}

} // namespace qforma

#endif
