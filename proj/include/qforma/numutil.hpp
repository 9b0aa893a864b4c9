#ifndef QFORMA_NUMUTIL_HPP
#define QFORMA_NUMUTIL_HPP

// Exact integer and rational utilities: primality, factorization, square
// detection, Legendre/Jacobi symbols, modular square roots, p-adic valuations.
// Everything is deterministic; randomized subroutines use a fixed-seed
// generator so identical inputs give identical outputs.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qforma {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline BigInt num(const BigRat& q) { return boost::multiprecision::numerator(q); }
inline BigInt den(const BigRat& q) { return boost::multiprecision::denominator(q); }

inline BigInt abs_int(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }

inline BigInt gcd_int(BigInt a, BigInt b) {
    a = abs_int(a);
    b = abs_int(b);
    while (b != 0) {
        BigInt t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline BigInt pow_int(BigInt base, unsigned long e) {
    BigInt r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline BigInt mod_floor(const BigInt& a, const BigInt& m) {
    BigInt r = a % m;
    if (r < 0) r += abs_int(m);
    return r;
}

inline BigInt pow_mod(BigInt base, BigInt e, const BigInt& m) {
    if (m == 1) return 0;
    BigInt r = 1;
    base = mod_floor(base, m);
    while (e > 0) {
        if ((e & 1) != 0) r = r * base % m;
        base = base * base % m;
        e >>= 1;
    }
    return r;
}

inline BigInt inv_mod(const BigInt& a, const BigInt& m) {
    // Extended Euclid; requires gcd(a, m) == 1.
    BigInt r0 = mod_floor(a, m), r1 = m, s0 = 1, s1 = 0;
    while (r1 != 0) {
        BigInt q = r0 / r1;
        BigInt r2 = r0 - q * r1;
        BigInt s2 = s0 - q * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    if (r0 != 1) throw std::domain_error("inv_mod: arguments not coprime");
    return mod_floor(s0, m);
}

// Deterministic Miller-Rabin. The fixed base set decides correctly for all
// n < 3.3e24, far beyond the magnitudes this library manipulates.
inline bool is_prime(const BigInt& n) {
    if (n < 2) return false;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    BigInt d = n - 1;
    unsigned r = 0;
    while ((d & 1) == 0) { d >>= 1; ++r; }
    for (int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        BigInt x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 0; i + 1 < r; ++i) {
            x = x * x % n;
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

namespace detail {

// Pollard rho (Brent variant) with deterministic parameter sweep.
inline BigInt pollard_rho(const BigInt& n) {
    if (n % 2 == 0) return 2;
    for (BigInt c = 1; ; ++c) {
        BigInt x = 2, y = 2, d = 1;
        while (d == 1) {
            x = (x * x + c) % n;
            y = (y * y + c) % n;
            y = (y * y + c) % n;
            d = gcd_int(x - y, n);
        }
        if (d != n) return d;
    }
}

inline void factor_rec(BigInt n, std::map<BigInt, unsigned>& out) {
    if (n == 1) return;
    if (is_prime(n)) { ++out[n]; return; }
    BigInt d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

} // namespace detail

// Prime factorization of |n|, n != 0. Trial division for small primes, then
// Pollard rho. Keys ascending.
inline std::map<BigInt, unsigned> factorize(BigInt n) {
    if (n == 0) throw std::domain_error("factorize: zero input");
    n = abs_int(n);
    std::map<BigInt, unsigned> out;
    for (long p = 2; p < 10000 && BigInt(p) * p <= n; p = (p == 2 ? 3 : p + 2)) {
        while (n % p == 0) { ++out[BigInt(p)]; n /= p; }
    }
    if (n > 1) detail::factor_rec(n, out);
    return out;
}

inline BigInt isqrt(const BigInt& n) { return boost::multiprecision::sqrt(n); }

inline bool is_square_int(const BigInt& n) {
    if (n < 0) return false;
    BigInt r = isqrt(n);
    return r * r == n;
}

// n = sign * squarefree * square; returns {squarefree-with-sign, root-of-square}.
inline std::pair<BigInt, BigInt> squarefree_decompose(const BigInt& n) {
    if (n == 0) throw std::domain_error("squarefree_decompose: zero input");
    BigInt s = n < 0 ? -1 : 1;
    BigInt r = 1;
    for (auto& [p, e] : factorize(n)) {
        if (e % 2) s *= p;
        r *= pow_int(p, e / 2);
    }
    return {s, r};
}

// Legendre symbol (a|p) for odd prime p: 0, 1 or -1.
inline int legendre_symbol(const BigInt& a, const BigInt& p) {
    BigInt r = pow_mod(mod_floor(a, p), (p - 1) / 2, p);
    if (r == 0) return 0;
    return r == 1 ? 1 : -1;
}

// Jacobi symbol (a|n) for odd positive n.
inline int jacobi_symbol(BigInt a, BigInt n) {
    if (n <= 0 || n % 2 == 0) throw std::domain_error("jacobi_symbol: n must be odd positive");
    a = mod_floor(a, n);
    int t = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            BigInt r = n % 8;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) t = -t;
        a = mod_floor(a, n);
    }
    return n == 1 ? t : 0;
}

// Tonelli-Shanks: x with x^2 = a (mod p), p odd prime, (a|p) = 1.
inline BigInt sqrt_mod_prime(BigInt a, const BigInt& p) {
    a = mod_floor(a, p);
    if (a == 0) return 0;
    if (legendre_symbol(a, p) != 1) throw std::domain_error("sqrt_mod_prime: not a residue");
    if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);
    BigInt q = p - 1;
    unsigned s = 0;
    while ((q & 1) == 0) { q >>= 1; ++s; }
    BigInt z = 2;
    while (legendre_symbol(z, p) != -1) ++z;
    BigInt m = s, c = pow_mod(z, q, p), t = pow_mod(a, q, p), r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        BigInt tt = t;
        unsigned i = 0;
        while (tt != 1) { tt = tt * tt % p; ++i; }
        BigInt b = pow_mod(c, pow_int(2, (m - i - 1).convert_to<unsigned long>()), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    return r;
}

// CRT: x = r1 mod m1, x = r2 mod m2 with gcd(m1, m2) = 1.
inline BigInt crt_pair(const BigInt& r1, const BigInt& m1, const BigInt& r2, const BigInt& m2) {
    BigInt d = mod_floor(r2 - r1, m2);
    BigInt x = r1 + m1 * (d * inv_mod(m1 % m2, m2) % m2);
    return mod_floor(x, m1 * m2);
}

// Square root of a modulo squarefree odd m (prime-by-prime + CRT); a must be a
// residue mod every prime of m.
inline BigInt sqrt_mod_squarefree(const BigInt& a, const BigInt& m) {
    BigInt x = 0, mod = 1;
    for (auto& [p, e] : factorize(m)) {
        if (e != 1) throw std::domain_error("sqrt_mod_squarefree: modulus not squarefree");
        BigInt r = (p == 2) ? mod_floor(a, 2) : sqrt_mod_prime(a, p);
        x = (mod == 1) ? r : crt_pair(x, mod, r, p);
        mod *= p;
    }
    return x;
}

// p-adic valuation of a nonzero integer.
inline long valuation_int(BigInt n, const BigInt& p) {
    if (n == 0) throw std::domain_error("valuation_int: zero input");
    long v = 0;
    n = abs_int(n);
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

inline long valuation_rat(const BigRat& q, const BigInt& p) {
    return valuation_int(num(q), p) - valuation_int(den(q), p);
}

inline bool is_square_rat(const BigRat& q) {
    return q >= 0 && is_square_int(num(q)) && is_square_int(den(q));
}

// Squarefree signed integer representing the square class of a nonzero rational.
inline BigInt squarefree_part(const BigRat& q) {
    if (q == 0) throw std::domain_error("squarefree_part: zero input");
    return squarefree_decompose(num(q) * den(q)).first;
}

} // namespace qforma

#endif
