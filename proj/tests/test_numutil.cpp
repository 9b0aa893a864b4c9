#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "qforma/numutil.hpp"

using namespace qforma;

TEST_CASE("primality on small and structured inputs") {
    std::set<long> primes;
    for (long n = 2; n < 200; ++n)
        if (is_prime(BigInt(n))) primes.insert(n);
    REQUIRE(primes.count(2) == 1);
    REQUIRE(primes.count(97) == 1);
    REQUIRE(primes.count(91) == 0);
    REQUIRE(primes.size() == 46);
    REQUIRE(is_prime(BigInt("1000000007")));
    REQUIRE_FALSE(is_prime(BigInt("1000000007") * BigInt("998244353")));
}

TEST_CASE("factorization round-trips") {
    auto f = factorize(BigInt(2 * 2 * 2 * 3 * 49 * 11));
    REQUIRE(f[BigInt(2)] == 3);
    REQUIRE(f[BigInt(3)] == 1);
    REQUIRE(f[BigInt(7)] == 2);
    REQUIRE(f[BigInt(11)] == 1);
    BigInt n = BigInt("123456789012345678901");
    BigInt prod = 1;
    for (auto& [p, e] : factorize(n)) {
        REQUIRE(is_prime(p));
        prod *= pow_int(p, e);
    }
    REQUIRE(prod == n);
}

TEST_CASE("squarefree decomposition keeps sign and square part") {
    auto [s, r] = squarefree_decompose(BigInt(-12));
    REQUIRE(s == -3);
    REQUIRE(r == 2);
    REQUIRE(squarefree_part(BigRat(8, 9)) == 2);
    REQUIRE(squarefree_part(BigRat(-1, 2)) == -2);
    REQUIRE(squarefree_part(BigRat(49)) == 1);
}

TEST_CASE("quadratic residues match exhaustive tables") {
    // Squares mod 5 are {1,4}; mod 7 are {1,2,4}.
    std::set<long> q5, q7;
    for (long x = 1; x < 5; ++x) q5.insert(x * x % 5);
    for (long x = 1; x < 7; ++x) q7.insert(x * x % 7);
    REQUIRE(q5 == std::set<long>({1, 4}));
    REQUIRE(q7 == std::set<long>({1, 2, 4}));
    for (long a = 1; a < 5; ++a)
        REQUIRE((legendre_symbol(a, 5) == 1) == (q5.count(a) == 1));
    for (long a = 1; a < 7; ++a)
        REQUIRE((legendre_symbol(a, 7) == 1) == (q7.count(a) == 1));
}

TEST_CASE("jacobi agrees with legendre on prime moduli") {
    for (long p : {3, 5, 7, 11, 13}) {
        for (long a = 1; a < p; ++a)
            REQUIRE(jacobi_symbol(a, p) == legendre_symbol(a, p));
    }
    REQUIRE(jacobi_symbol(2, 15) == 1);   // (2|3)(2|5) = (-1)(-1)
    REQUIRE(jacobi_symbol(7, 15) == -1);
}

TEST_CASE("modular square roots verify") {
    for (long p : {3, 5, 7, 11, 13, 17, 97}) {
        for (long a = 1; a < p; ++a) {
            if (legendre_symbol(a, p) != 1) continue;
            BigInt r = sqrt_mod_prime(a, p);
            REQUIRE(mod_floor(r * r - a, p) == 0);
        }
    }
    BigInt m = BigInt(3) * 5 * 7;
    BigInt r = sqrt_mod_squarefree(4, m);
    REQUIRE(mod_floor(r * r - 4, m) == 0);
}

TEST_CASE("valuations and rational square tests") {
    REQUIRE(valuation_int(BigInt(48), 2) == 4);
    REQUIRE(valuation_rat(BigRat(9, 8), 2) == -3);
    REQUIRE(valuation_rat(BigRat(9, 8), 3) == 2);
    REQUIRE(is_square_rat(BigRat(49, 16)));
    REQUIRE_FALSE(is_square_rat(BigRat(-49, 16)));
    REQUIRE_FALSE(is_square_rat(BigRat(50, 16)));
}
