#include "doctest.h"

#include "qcert/ntheory.hpp"

#include <map>
#include <random>

using namespace qcert;

namespace {

// Legendre symbol by listing the squares
int legendre_by_squares(i64 a, i64 p)
{
    a = mod(a, p);
    if (a == 0)
        return 0;
    for (i64 x = 1; x < p; ++x)
        if (x * x % p == a)
            return 1;
    return -1;
}

bool prime_by_trial(i64 n)
{
    if (n < 2)
        return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

} // namespace

TEST_CASE("kronecker examples")
{
    CHECK(kronecker(1, 7) == 1);
    CHECK(kronecker(-3, 5) == -1);
    CHECK(kronecker(-3, 11) == -1);
    CHECK(kronecker(-3, 2) == -1);
    CHECK(kronecker(-4, 3) == -1);
    CHECK(kronecker(5, 10) == 0);
}

TEST_CASE("kronecker matches Legendre for odd primes")
{
    for (i64 p : primes_up_to(60)) {
        if (p == 2)
            continue;
        for (i64 a = -60; a <= 60; ++a)
            CHECK(kronecker(a, p) == legendre_by_squares(a, p));
    }
}

TEST_CASE("kronecker is multiplicative in both arguments")
{
    for (i64 a = -200; a <= 200; a += 7)
        for (i64 b = -200; b <= 200; b += 11)
            for (i64 n = 1; n <= 200; n += 3)
                CHECK(kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n));
    for (i64 a = -200; a <= 200; ++a)
        for (i64 m = 1; m <= 40; ++m)
            for (i64 n = 1; n <= 40; n += 3)
                CHECK(kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n));
}

TEST_CASE("factorize examples")
{
    CHECK(factorize(1).factors.empty());
    CHECK(factorize(11).factors == std::vector<PrimePower>{{11, 1}});
    CHECK(factorize(75).factors == std::vector<PrimePower>{{3, 1}, {5, 2}});
    CHECK(factorize(-75).factors == std::vector<PrimePower>{{3, 1}, {5, 2}});
    CHECK_THROWS_AS(factorize(i64{1} << 62), SizeError);
}

TEST_CASE("factorize round trip on random products")
{
    std::mt19937_64 rng(17);
    auto primes = primes_up_to(100000);
    for (int t = 0; t < 300; ++t) {
        std::map<i64, int> chosen;
        i64 n = 1;
        for (int k = 0; k < 4; ++k) {
            i64 p = primes[rng() % primes.size()];
            if (n > (i64{1} << 40) / p)
                break;
            n *= p;
            chosen[p] += 1;
        }
        auto f = factorize(n);
        std::vector<PrimePower> expected;
        for (auto [p, e] : chosen)
            expected.push_back({p, e});
        CHECK(f.factors == expected);
        CHECK(f.product() == n);
    }
    // semiprime needing rho
    auto f = factorize(i64{1000003} * 1000033);
    CHECK(f.factors == std::vector<PrimePower>{{1000003, 1}, {1000033, 1}});
}

TEST_CASE("is_prime")
{
    CHECK(is_prime(7919));
    CHECK_FALSE(is_prime(7917));
    for (i64 n = -5; n < 5000; ++n)
        CHECK(is_prime(n) == prime_by_trial(n));
    CHECK(is_prime(2305843009213693951LL));
    CHECK_FALSE(is_prime(2305843009213693953LL));
}

TEST_CASE("sqrt_mod")
{
    CHECK(sqrt_mod(0, 7) == 0);
    CHECK_FALSE(sqrt_mod(3, 7).has_value());
    for (i64 p : primes_up_to(300))
        for (i64 a = 0; a < p; ++a) {
            auto r = sqrt_mod(a, p);
            CHECK(r.has_value() == (legendre_by_squares(a, p) >= 0));
            if (r)
                CHECK(mulmod(*r, *r, p) == a);
        }
}

TEST_CASE("polynomial factorization examples")
{
    auto f = poly_factor_mod_p(PolyModP({1, 0, 1}, 2));
    REQUIRE(f.size() == 1);
    CHECK(f[0].factor == PolyModP({1, 1}, 2));
    CHECK(f[0].multiplicity == 2);

    auto g = poly_factor_mod_p(PolyModP({-1, 1}, 7));
    REQUIRE(g.size() == 1);
    CHECK(g[0].factor == PolyModP({6, 1}, 7));

    auto h = poly_factor_mod_p(PolyModP({1, 0, 1}, 7));
    REQUIRE(h.size() == 1);
    CHECK(h[0].factor.degree() == 2);

    // x^2+1 mod 5 = (x+2)(x+3), canonical order
    auto s = poly_factor_mod_p(PolyModP({1, 0, 1}, 5));
    REQUIRE(s.size() == 2);
    CHECK(s[0].factor == PolyModP({2, 1}, 5));
    CHECK(s[1].factor == PolyModP({3, 1}, 5));
}

TEST_CASE("polynomial factorization re-multiplies")
{
    std::mt19937_64 rng(2024);
    auto primes = primes_up_to(97);
    for (int t = 0; t < 1000; ++t) {
        i64 p = primes[rng() % primes.size()];
        int deg = 1 + static_cast<int>(rng() % 8);
        std::vector<i64> c(static_cast<size_t>(deg + 1));
        for (auto& v : c)
            v = static_cast<i64>(rng() % static_cast<u64>(p));
        if (c.back() == 0)
            c.back() = 1;
        PolyModP f(c, p);
        auto factors = poly_factor_mod_p(f);
        PolyModP prod({f.leading()}, p);
        for (size_t k = 0; k < factors.size(); ++k) {
            auto const& pf = factors[k];
            CHECK(pf.factor.leading() == 1);
            if (k > 0)
                CHECK(factors[k - 1].factor < pf.factor);
            for (int e = 0; e < pf.multiplicity; ++e)
                prod = prod * pf.factor;
            // irreducible: no roots for degree 2 or 3
            if (pf.factor.degree() <= 3 && pf.factor.degree() >= 2)
                for (i64 x = 0; x < p; ++x)
                    CHECK(pf.factor.eval(x) != 0);
        }
        CHECK(prod == f);
    }
}

TEST_CASE("cyclotomic polynomials")
{
    CHECK(cyclotomic_polynomial(1) == std::vector<i64>{-1, 1});
    CHECK(cyclotomic_polynomial(2) == std::vector<i64>{1, 1});
    CHECK(cyclotomic_polynomial(4) == std::vector<i64>{1, 0, 1});
    CHECK(cyclotomic_polynomial(6) == std::vector<i64>{1, -1, 1});
    for (int n = 1; n <= 120; ++n)
        CHECK(static_cast<int>(cyclotomic_polynomial(n).size()) - 1 == euler_phi(n));
}

TEST_CASE("fundamental discriminants")
{
    CHECK(is_fundamental_discriminant(-3));
    CHECK(is_fundamental_discriminant(-4));
    CHECK(is_fundamental_discriminant(-8));
    CHECK(is_fundamental_discriminant(-20));
    CHECK_FALSE(is_fundamental_discriminant(-12));
    CHECK_FALSE(is_fundamental_discriminant(-75));
    CHECK_FALSE(is_fundamental_discriminant(-16));
}
