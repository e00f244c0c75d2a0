#include "doctest.h"

#include "qcert/admissible.hpp"

using namespace qcert;

namespace {

CurveModel e11()
{
    return CurveModel::make("11a1", {0, -1, 1, -10, -20}, 11, 1);
}

CyclotomicValue integer_value(i64 v)
{
    return CyclotomicValue::from_powers(1, {v});
}

} // namespace

TEST_CASE("admissible primes for 11a1, D = -3, p = 7")
{
    auto e = e11();
    auto found = find_admissible(e, -3, 1, 7, 30);
    REQUIRE_FALSE(found.empty());
    CHECK(found.front() == AdmissiblePrime{5, -1, 1});
    // 2: (2+1)^2 - a_2^2 = 9 - 4 = 5, 7 does not divide it
    CHECK(is_admissible(2, e, -3, 1, 7).failed_condition == 4);
    // 13 = 1 mod 3 splits in Q(sqrt -3)
    CHECK(is_admissible(13, e, -3, 1, 7).failed_condition == 2);
    CHECK(is_admissible(11, e, -3, 1, 7).failed_condition == 1);
    CHECK(is_admissible(7, e, -3, 1, 7).failed_condition == 1);
    for (auto const& a : found) {
        auto again = is_admissible(a.ell, e, -3, 1, 7);
        CHECK(again.admissible);
        CHECK(*again.prime == a);
        CHECK(mod(a.ell + 1 - a.epsilon * a.a_ell, 7) == 0);
        CHECK(mod(a.ell + 1 + a.epsilon * a.a_ell, 7) != 0);
        CHECK(frobenius_class(class_group(QuadOrder::make(-3, 1)), a.ell).kind == FrobeniusClass::Kind::Inert);
    }
}

TEST_CASE("admissible primes are plentiful")
{
    auto e = e11();
    for (i64 p : {7, 13, 17}) {
        auto big = find_admissible(e, -3, 1, p, 10000);
        CHECK(big.size() >= 1);
        auto small = find_admissible(e, -3, 1, p, 1000);
        REQUIRE(small.size() <= big.size());
        for (size_t k = 0; k < small.size(); ++k)
            CHECK(small[k] == big[k]);
        for (size_t k = 1; k < big.size(); ++k)
            CHECK(big[k - 1].ell < big[k].ell);
    }
}

TEST_CASE("assumption report for 11a1")
{
    auto e = e11();
    auto g = class_group(QuadOrder::make(-3, 1));
    AssumptionInputs in{integer_value(-3), std::nullopt, 200};
    auto r = check_assumption(e, g, 7, in);
    for (auto const& it : r.items)
        CHECK(it.status == CheckStatus::Verified);
    CHECK(r.all_verified());
    REQUIRE(r.chosen_prime);
    CHECK(r.chosen_prime->p == 7);

    auto r3 = check_assumption(e, g, 3, in);
    CHECK(r3.items[0].status == CheckStatus::Failed);
    CHECK(r3.first_failure() == 1);
    // L = -3 vanishes mod 3 as well
    CHECK(r3.items[2].status == CheckStatus::Failed);

    auto r11 = check_assumption(e, g, 11, in);
    CHECK(r11.items[0].status == CheckStatus::Failed);

    AssumptionInputs zero{integer_value(14), std::nullopt, 200};
    auto rz = check_assumption(e, g, 7, zero);
    CHECK(rz.items[2].status == CheckStatus::Failed);
    CHECK_FALSE(rz.chosen_prime);

    auto unknown = CurveModel::make("11a1", {0, -1, 1, -10, -20}, 11);
    auto ru = check_assumption(unknown, g, 7, in);
    CHECK(ru.items[3].status == CheckStatus::Undetermined);
    CHECK(ru.first_failure() == 0);
}

TEST_CASE("special value over a split prime")
{
    auto e = e11();
    auto g = class_group(QuadOrder::make(-3, 5));
    // order 2 character: Z[chi] = Z; p = 7 is fine
    AssumptionInputs in{integer_value(5), std::nullopt, 200};
    auto r = check_assumption(e, g, 7, in);
    CHECK(r.items[2].status == CheckStatus::Verified);
    // zeta_3 - 1 has norm 3; mod 7 (which splits in Q(zeta_3)) it is a unit
    AssumptionInputs in3{CyclotomicValue::from_powers(3, {-1, 1}), std::nullopt, 200};
    auto r3 = check_assumption(e, g, 7, in3);
    CHECK(r3.items[2].status == CheckStatus::Verified);
    // zeta - 2 lies in exactly one prime above 7 (2 is a cube root of unity mod 7)
    auto x = CyclotomicValue::from_powers(3, {-2, 1});
    AssumptionInputs in_p{x, std::nullopt, 200};
    auto rp = check_assumption(e, g, 7, in_p);
    CHECK(rp.items[2].status == CheckStatus::Verified);
    REQUIRE(rp.chosen_prime);
    CHECK(nonvanishing_mod(x, *rp.chosen_prime));
    int vanishing = 0;
    for (auto const& P : primes_above(3, 7))
        vanishing += nonvanishing_mod(x, P) ? 0 : 1;
    CHECK(vanishing == 1);
}
