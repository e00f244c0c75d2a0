#include "qcert/lattice.hpp"

#include <cmath>

namespace qcert {

namespace {

struct Enumerator
{
    Eigen::Index n;
    RatMatrix coef; // upper part holds q_ij, diagonal q_ii
    RatVector center;
    EllipsoidVisitor const& visit;
    mpq_class bound;
    IntVector x;

    i64 floor_q(mpq_class const& v)
    {
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
        return r.get_si();
    }

    bool recurse(Eigen::Index i, mpq_class const& remaining)
    {
        if (i < 0)
            return visit(x, bound - remaining);
        mpq_class c = center(i);
        for (Eigen::Index j = i + 1; j < n; ++j)
            c -= coef(i, j) * (mpq_class(static_cast<long>(x(j))) - center(j));
        mpq_class const& qii = coef(i, i);
        auto fits = [&](i64 v) {
            mpq_class d = mpq_class(static_cast<long>(v)) - c;
            return qii * d * d <= remaining;
        };
        double radius = std::sqrt(std::max(0.0, mpq_class(remaining / qii).get_d()));
        double cd = c.get_d();
        i64 lo = static_cast<i64>(std::floor(cd - radius)) - 2;
        i64 hi = static_cast<i64>(std::ceil(cd + radius)) + 2;
        i64 mid = floor_q(c);
        while (lo <= mid && !fits(lo))
            ++lo;
        while (hi > mid && !fits(hi))
            --hi;
        // the double estimate might have been too narrow
        while (fits(lo - 1))
            --lo;
        while (fits(hi + 1))
            ++hi;
        for (i64 v = lo; v <= hi; ++v) {
            mpq_class d = mpq_class(static_cast<long>(v)) - c;
            mpq_class rest = remaining - qii * d * d;
            if (rest < 0)
                continue;
            x(i) = v;
            if (!recurse(i - 1, rest))
                return false;
        }
        return true;
    }
};

} // namespace

bool enumerate_ellipsoid(RatMatrix const& q, RatVector const& center, mpq_class const& bound,
                         EllipsoidVisitor const& visit)
{
    const Eigen::Index n = q.rows();
    RatMatrix a = q;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (a(i, i) <= 0)
            throw std::domain_error("enumerate_ellipsoid: form not positive definite");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            a(j, i) = a(i, j);
            a(i, j) = a(i, j) / a(i, i);
        }
        for (Eigen::Index k = i + 1; k < n; ++k)
            for (Eigen::Index l = k; l < n; ++l)
                a(k, l) -= a(k, i) * a(i, l);
    }
    if (bound < 0)
        return true;
    Enumerator e{n, a, center, visit, bound, IntVector::Zero(n)};
    if (n == 0)
        return visit(e.x, 0);
    return e.recurse(n - 1, bound);
}

bool short_vectors(IntMatrix const& gram, i64 bound, ShortVectorVisitor const& visit)
{
    const Eigen::Index n = gram.rows();
    IntMatrix t = lll_reduce_gram(gram);
    IntMatrix reduced = t * gram * t.transpose();
    IntMatrix tt = t.transpose();
    RatVector zero = RatVector::Zero(n);
    return enumerate_ellipsoid(to_rational(reduced), zero, mpq_class(static_cast<long>(bound)),
                               [&](IntVector const& y, mpq_class const&) {
                                   IntVector x = tt * y;
                                   i128 v = 0;
                                   for (Eigen::Index i = 0; i < n; ++i)
                                       for (Eigen::Index j = 0; j < n; ++j)
                                           v += static_cast<i128>(x(i)) * gram(i, j) * x(j);
                                   return visit(x, static_cast<i64>(v));
                               });
}

std::vector<i64> theta_counts(IntMatrix const& gram, i64 bound)
{
    std::vector<i64> counts(static_cast<size_t>(bound + 1), 0);
    short_vectors(gram, bound, [&](IntVector const&, i64 v) {
        counts[static_cast<size_t>(v)] += 1;
        return true;
    });
    return counts;
}

} // namespace qcert
