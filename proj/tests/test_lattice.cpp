#include "doctest.h"

#include "qcert/lattice.hpp"

#include <Eigen/LU>

#include <random>

using namespace qcert;

namespace {

i64 sigma(i64 n)
{
    i64 s = 0;
    for (i64 d = 1; d <= n; ++d)
        if (n % d == 0)
            s += d;
    return s;
}

// Jacobi four-square theorem
i64 r4(i64 n)
{
    if (n == 0)
        return 1;
    return 8 * sigma(n) - (n % 4 == 0 ? 32 * sigma(n / 4) : 0);
}

} // namespace

TEST_CASE("hnf_mod is canonical")
{
    std::vector<Vec4> gens{Vec4(2, 0, 0, 0), Vec4(1, 1, 0, 0), Vec4(0, 0, 3, 1)};
    Mat4 h = hnf_mod(gens, 6);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < r; ++c)
            CHECK(h(r, c) == 0);
    for (int c = 1; c < 4; ++c)
        for (int r = 0; r < c; ++r) {
            CHECK(h(r, c) >= 0);
            CHECK(h(r, c) < h(c, c));
        }
    for (auto const& g : gens)
        CHECK(hnf_contains(h, g));
    // same lattice from a shuffled, redundant generating set
    std::vector<Vec4> gens2{Vec4(0, 0, 3, 7), Vec4(1, 1, 0, 0), Vec4(3, 1, 0, 0), Vec4(0, 0, 3, 1)};
    CHECK(hnf_mod(gens2, 6) == h);
}

TEST_CASE("determinant by Bareiss")
{
    IntMatrix m(3, 3);
    m << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    CHECK(determinant(m) == 4);
    IntMatrix z(2, 2);
    z << 0, 1, 1, 0;
    CHECK(determinant(z) == -1);
}

TEST_CASE("theta series of Z^4 equals the four-square count")
{
    IntMatrix g = IntMatrix::Identity(4, 4);
    auto counts = theta_counts(g, 40);
    for (i64 n = 0; n <= 40; ++n)
        CHECK(counts[static_cast<size_t>(n)] == r4(n));
}

TEST_CASE("short vectors agree with brute force on random forms")
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; ++t) {
        IntMatrix b(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                b(i, j) = static_cast<i64>(rng() % 7) - 3;
        if (determinant(b) == 0)
            continue;
        IntMatrix g = b * b.transpose();
        const i64 bound = 30;
        std::vector<i64> fp(static_cast<size_t>(bound + 1), 0);
        short_vectors(g, bound, [&](IntVector const& x, i64 v) {
            CHECK((x.transpose() * g * x)(0, 0) == v);
            fp[static_cast<size_t>(v)] += 1;
            return true;
        });
        // brute force with a box large enough: |x_i| <= sqrt(bound * (G^-1)_ii)
        Eigen::MatrixXd gd = g.cast<double>();
        Eigen::MatrixXd inv = gd.inverse();
        std::vector<i64> box(4);
        for (int i = 0; i < 4; ++i)
            box[static_cast<size_t>(i)] = static_cast<i64>(std::sqrt(bound * inv(i, i))) + 1;
        std::vector<i64> brute(static_cast<size_t>(bound + 1), 0);
        IntVector x(4);
        for (x(0) = -box[0]; x(0) <= box[0]; ++x(0))
            for (x(1) = -box[1]; x(1) <= box[1]; ++x(1))
                for (x(2) = -box[2]; x(2) <= box[2]; ++x(2))
                    for (x(3) = -box[3]; x(3) <= box[3]; ++x(3)) {
                        i64 v = (x.transpose() * g * x)(0, 0);
                        if (v <= bound)
                            brute[static_cast<size_t>(v)] += 1;
                    }
        CHECK(fp == brute);
    }
}

TEST_CASE("inhomogeneous enumeration around a rational center")
{
    RatMatrix q = RatMatrix::Identity(2, 2);
    RatVector c(2);
    c << mpq_class(1, 2), mpq_class(1, 3);
    int count = 0;
    enumerate_ellipsoid(q, c, mpq_class(1), [&](IntVector const& x, mpq_class const& v) {
        mpq_class d0 = x(0) - c(0), d1 = x(1) - c(1);
        CHECK(v == d0 * d0 + d1 * d1);
        ++count;
        return true;
    });
    // (0,0),(1,0),(0,1),(1,1)
    CHECK(count == 4);
}

TEST_CASE("early stop")
{
    IntMatrix g = IntMatrix::Identity(4, 4);
    int seen = 0;
    bool finished = short_vectors(g, 10, [&](IntVector const&, i64) { return ++seen < 3; });
    CHECK_FALSE(finished);
    CHECK(seen == 3);
}

TEST_CASE("mod p linear algebra")
{
    IntMatrix a(2, 2);
    a << 3, 2, 3, 2;
    CHECK(rank_mod_p(a, 7) == 1);
    IntMatrix k = kernel_mod_p(a, 7);
    REQUIRE(k.cols() == 1);
    CHECK(reduce_mod(a * k, 7).isZero());
    CHECK(matpow_mod_p(a, 2, 5).isZero());
    IntMatrix m(2, 3);
    m << 1, 2, 3, 0, 1, 4;
    IntMatrix ri = right_inverse_mod_p(m, 11);
    CHECK(reduce_mod(m * ri, 11) == IntMatrix::Identity(2, 2));
}

TEST_CASE("rational kernel and integer row kernel")
{
    RatMatrix m(1, 3);
    m << 1, 2, 3;
    RatMatrix k = kernel_rational(m);
    CHECK(k.cols() == 2);
    CHECK((m * k).isZero());
    IntVector row(4);
    row << 4, 6, 10, 0;
    auto rk = integer_row_kernel(row);
    CHECK(rk.gcd == 2);
    CHECK(row.dot(rk.particular) == 2);
    CHECK((row.transpose() * rk.kernel).isZero());
    CHECK(rk.kernel.cols() == 3);
}
