#include "doctest.h"

#include "qcert/curve.hpp"

#include <map>

using namespace qcert;

namespace {

CurveModel e11a1() { return CurveModel::make("11a1", {0, -1, 1, -10, -20}, 11, 1); }
CurveModel e37a1() { return CurveModel::make("37a1", {0, 0, 1, -1, 0}, 37, 2); }
CurveModel e14a1() { return CurveModel::make("14a1", {1, 0, 1, 4, -6}, 14, 1); }
CurveModel e27a1() { return CurveModel::make("27a1", {0, 0, 1, 0, -7}, 27); }

// affine enumeration with the full Weierstrass equation
i64 brute_trace(CurveModel const& e, i64 q)
{
    i64 affine = 0;
    for (i64 x = 0; x < q; ++x)
        for (i64 y = 0; y < q; ++y) {
            i64 lhs = y * y + e.a[0] * x * y + e.a[2] * y;
            i64 rhs = x * x * x + e.a[1] * x * x + e.a[3] * x + e.a[4];
            if (mod(lhs - rhs, q) == 0)
                ++affine;
        }
    return q + 1 - (affine + 1);
}

} // namespace

TEST_CASE("curve ingestion re-derives the discriminant")
{
    auto e = e11a1();
    CHECK(e.discriminant == -161051); // -11^5
    CHECK_THROWS(CurveModel::make("bad", {0, -1, 1, -10, -20}, 13));
    CHECK_THROWS(CurveModel::make("sing", {0, 0, 0, 0, 0}, 1));
}

TEST_CASE("traces of 11a1")
{
    auto e = e11a1();
    std::map<i64, i64> known{{2, -2}, {3, -1}, {5, 1},  {7, -2}, {13, 4},  {17, -2}, {19, 0},
                             {23, -1}, {29, 0}, {31, 7}, {37, 3}, {41, -8}, {43, -6}, {47, 8}};
    for (auto [q, a] : known)
        CHECK(trace_of_frobenius(e, q) == a);
    CHECK_THROWS_AS(trace_of_frobenius(e, 11), BadReduction);
    CHECK_THROWS_AS(trace_of_frobenius(e, 1000003), SizeLimit);
}

TEST_CASE("supersingular primes give trace zero")
{
    auto e = e11a1();
    CHECK(trace_of_frobenius(e, 19) == 0);
    CHECK(count_points_naive(e.a, 19) == 20);
}

TEST_CASE("trace agrees with brute force and respects Hasse")
{
    for (auto const& e : {e11a1(), e37a1(), e14a1()}) {
        for (i64 q : primes_up_to(1000)) {
            if (!e.good_at(q))
                continue;
            i64 a = trace_of_frobenius(e, q);
            CHECK(a * a <= 4 * q);
            if (q <= 100)
                CHECK(a == brute_trace(e, q));
        }
    }
}

TEST_CASE("baby-step giant-step agrees with the character sum")
{
    auto e = e37a1();
    for (i64 q : {10007, 10009, 10037, 20011, 49999}) {
        if (!is_prime(q))
            continue;
        CHECK(detail::trace_bsgs(e, q) == detail::trace_legendre(e, q));
    }
    i64 a = trace_of_frobenius(e11a1(), 999983);
    CHECK(a * a <= 4 * 999983);
}

TEST_CASE("reduction data")
{
    auto rd = reduction_data(e11a1(), 11);
    CHECK(rd.kind == ReductionKind::SplitMultiplicative);
    CHECK(rd.v_disc == 5);
    CHECK_THROWS_AS(reduction_data(e11a1(), 5), GoodReduction);
    auto ad = reduction_data(e27a1(), 3);
    CHECK(ad.kind == ReductionKind::Additive);
    CHECK(ad.v_disc >= 2);
    // 14a1: a_2 = -1 (nonsplit), a_7 = 1 (split)
    CHECK(reduction_data(e14a1(), 2).kind == ReductionKind::NonsplitMultiplicative);
    CHECK(reduction_data(e14a1(), 7).kind == ReductionKind::SplitMultiplicative);
}

TEST_CASE("surjectivity witnesses")
{
    auto r = surjectivity_witness(e11a1(), 7, 20);
    CHECK(r.surjective);
    CHECK(std::find(r.split_witnesses.begin(), r.split_witnesses.end(), 5) != r.split_witnesses.end());
    CHECK(std::find(r.nonsplit_witnesses.begin(), r.nonsplit_witnesses.end(), 2) != r.nonsplit_witnesses.end());
    CHECK(std::find(r.exceptional_witnesses.begin(), r.exceptional_witnesses.end(), 5) !=
          r.exceptional_witnesses.end());
    CHECK_FALSE(surjectivity_witness(e11a1(), 7, 1).surjective);
    // CM curve: a_l = 0 at inert primes, split primes never give a nonsquare discriminant
    CHECK_FALSE(surjectivity_witness(e27a1(), 7, 200).surjective);
}

TEST_CASE("surjectivity is monotone in the bound")
{
    auto e = e37a1();
    bool seen = false;
    for (i64 b = 1; b <= 60; ++b) {
        bool s = surjectivity_witness(e, 5, b).surjective;
        if (seen)
            CHECK(s);
        seen = seen || s;
    }
    CHECK(seen);
}

TEST_CASE("local torsion criterion")
{
    auto r = local_torsion_pfree(e11a1(), 11, 2, 7);
    CHECK(r.status == CheckStatus::Verified);
    CHECK(r.nonsingular_order == 120);
    CHECK(local_torsion_pfree(e27a1(), 3, 1, 5).status == CheckStatus::Verified);
    CHECK(local_torsion_pfree(e27a1(), 3, 4, 7).status == CheckStatus::Verified);
    // 11^1 - 1 = 10, divisible by 5
    CHECK(local_torsion_pfree(e11a1(), 11, 1, 5).status == CheckStatus::Undetermined);
    // v_disc = 5 for 11a1
    CHECK(local_torsion_pfree(e11a1(), 11, 2, 5).status == CheckStatus::Undetermined);
}
