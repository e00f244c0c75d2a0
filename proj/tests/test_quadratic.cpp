#include "doctest.h"

#include "qcert/quadratic.hpp"

using namespace qcert;

TEST_CASE("class group pins")
{
    auto g1 = class_group(QuadOrder::make(-3, 1));
    CHECK(g1.size() == 1);
    CHECK(g1.form(0) == Form{1, 1, 1});

    auto g = class_group(QuadOrder::make(-3, 5));
    REQUIRE(g.size() == 2);
    CHECK(g.form(0) == Form{1, 1, 19});
    CHECK(g.form(1) == Form{3, 3, 7});
    CHECK(g.mul(1, 1) == 0);
}

TEST_CASE("class number formula examples")
{
    CHECK(class_number_formula(-3, 1) == 1);
    CHECK(class_number_formula(-3, 5) == 2);
    CHECK(class_number_formula(-4, 3) == 2);
    CHECK(class_number_formula(-23, 1) == 3);
    CHECK(class_number_formula(-4, 1) == 1);
    CHECK(class_number_formula(-20, 1) == 2);
}

TEST_CASE("class group size matches the formula and the law is a group")
{
    for (i64 D = -3; D >= -700; --D) {
        if (!is_fundamental_discriminant(D))
            continue;
        for (i64 c = 1; c * c * (-D) <= 3000; ++c) {
            auto g = class_group(QuadOrder::make(D, c));
            CHECK(g.size() == class_number_formula(D, c));
            const int h = g.size();
            for (int i = 0; i < h; ++i) {
                CHECK(g.mul(i, g.identity()) == i);
                CHECK(g.mul(i, g.inverse(i)) == g.identity());
                for (int j = 0; j < h && h <= 12; ++j)
                    for (int k = 0; k < h; ++k)
                        CHECK(g.mul(g.mul(i, j), k) == g.mul(i, g.mul(j, k)));
            }
        }
    }
}

TEST_CASE("reduction leaves the class invariant")
{
    auto g = class_group(QuadOrder::make(-20, 3));
    for (int i = 0; i < g.size(); ++i) {
        Form f = g.form(i);
        // (a, b, c) -> (a, b + 2a, a + b + c) is an SL2(Z) translate
        Form t{f.a, f.b + 2 * f.a, f.a + f.b + f.c};
        CHECK(g.index_of(t) == i);
        Form s{f.c, -f.b, f.a};
        CHECK(g.index_of(s) == i);
    }
}

TEST_CASE("characters")
{
    auto g1 = class_group(QuadOrder::make(-3, 1));
    auto c1 = characters(g1);
    REQUIRE(c1.size() == 1);
    CHECK(c1[0].is_trivial());

    auto g2 = class_group(QuadOrder::make(-3, 5));
    auto c2 = characters(g2);
    REQUIRE(c2.size() == 2);
    CHECK(c2[0].n == 1);
    CHECK(c2[1].n == 2);
    CHECK(c2[1].exponents == std::vector<int>{0, 1});

    // h(-56) = 4, cyclic
    auto g4 = class_group(QuadOrder::make(-56, 1));
    REQUIRE(g4.size() == 4);
    auto c4 = characters(g4);
    std::vector<int> orders;
    for (auto const& c : c4)
        orders.push_back(c.n);
    CHECK(orders == std::vector<int>{1, 2, 4, 4});
}

TEST_CASE("characters are homomorphisms and orthogonal")
{
    for (i64 D : {-23, -47, -56, -71, -84, -260, -420}) {
        auto g = class_group(QuadOrder::make(D, 1));
        auto chars = characters(g);
        CHECK(static_cast<int>(chars.size()) == g.size());
        const int e = g.exponent();
        for (auto const& chi : chars) {
            CHECK(e % chi.n == 0);
            for (int i = 0; i < g.size(); ++i)
                for (int j = 0; j < g.size(); ++j)
                    CHECK(mod(chi.exponents[static_cast<size_t>(i)] + chi.exponents[static_cast<size_t>(j)] -
                                  chi.exponents[static_cast<size_t>(g.mul(i, j))],
                              chi.n) == 0);
        }
        // sum over characters of chi(sigma) in Z[zeta_e]
        for (int s = 0; s < g.size(); ++s) {
            auto total = CyclotomicValue::zero(e);
            for (auto const& chi : chars) {
                std::vector<i64> w(static_cast<size_t>(chi.n), 0);
                w[static_cast<size_t>(chi.exponents[static_cast<size_t>(s)])] = 1;
                total = total + CyclotomicValue::from_powers(chi.n, w).embed(e);
            }
            auto expect = CyclotomicValue::zero(e);
            if (s == g.identity())
                expect.coeffs[0] = g.size();
            CHECK(total == expect);
        }
    }
}

TEST_CASE("explicit character validation")
{
    auto g = class_group(QuadOrder::make(-3, 5));
    auto chi = character_from_exponents(g, {0, 3}, 6);
    CHECK(chi.n == 2);
    CHECK_THROWS(character_from_exponents(g, {1, 1}, 2));
}

TEST_CASE("frobenius classes")
{
    auto g = class_group(QuadOrder::make(-3, 5));
    // (-75|7) = (-3|7) = 1, so 7 splits
    auto f7 = frobenius_class(g, 7);
    CHECK(f7.kind == FrobeniusClass::Kind::Split);
    CHECK(g.form(f7.class_index) == Form{3, 3, 7});
    CHECK(frobenius_class(g, 11).kind == FrobeniusClass::Kind::Inert);
    auto f19 = frobenius_class(g, 19);
    CHECK(f19.kind == FrobeniusClass::Kind::Split);
    CHECK(f19.class_index == g.identity());
    CHECK(residue_degree_in_Hc(g, 19) == 1);
    auto f13 = frobenius_class(g, 13);
    CHECK(f13.kind == FrobeniusClass::Kind::Split);
    CHECK(g.form(f13.class_index) == Form{3, 3, 7});
    CHECK(residue_degree_in_Hc(g, 13) == 2);
    CHECK(residue_degree_in_Hc(g, 11) == 2);
    CHECK(frobenius_class(g, 3).kind == FrobeniusClass::Kind::Ramified);
    CHECK_THROWS_AS(frobenius_class(g, 5), BadPrime);
}

TEST_CASE("primes above p in cyclotomic rings")
{
    auto p1 = choose_prime_above(1, 7);
    REQUIRE(p1);
    CHECK(p1->residue_degree == 1);
    auto p2 = choose_prime_above(2, 7);
    REQUIRE(p2);
    CHECK(p2->factor == PolyModP({1, 1}, 7));
    auto p4 = choose_prime_above(4, 7);
    REQUIRE(p4);
    CHECK(p4->residue_degree == 2);
    // 5 = 1 mod 4 splits in Z[i]
    CHECK(primes_above(4, 5).size() == 2);
    auto none = choose_prime_above(4, 7, [](PrimeAbove const&) { return true; });
    CHECK_FALSE(none.has_value());
}

TEST_CASE("cyclotomic reduction")
{
    auto pr = *choose_prime_above(2, 7);
    CHECK(reduce_cyclotomic(CyclotomicValue::zero(2), pr).is_zero());
    CHECK(CyclotomicValue::from_powers(2, {1, 1}).is_zero());
    CHECK(reduce_cyclotomic(CyclotomicValue::from_powers(2, {1, 1}), pr).is_zero());
    CHECK(reduce_cyclotomic(CyclotomicValue::from_powers(2, {7}), pr).is_zero());
    CHECK_FALSE(reduce_cyclotomic(CyclotomicValue::from_powers(2, {1}), pr).is_zero());
    // 2 + zeta_4 has norm 5: in a prime above 5, one image is zero
    auto x = CyclotomicValue::from_powers(4, {2, 1});
    int zeros = 0;
    for (auto const& q : primes_above(4, 5))
        zeros += reduce_cyclotomic(x, q).is_zero() ? 1 : 0;
    CHECK(zeros == 1);
}

TEST_CASE("cyclotomic conjugation and embedding")
{
    auto x = CyclotomicValue::from_powers(6, {3, -1, 4, 1, 5});
    CHECK(x.conjugate().conjugate() == x);
    CHECK(x.embed(12).conjugate() == x.conjugate().embed(12));
    auto z3 = CyclotomicValue::from_powers(3, {0, 1});
    // zeta_3 + zeta_3^-1 = -1
    CHECK(z3 + z3.conjugate() == CyclotomicValue::from_powers(3, {-1}));
}
