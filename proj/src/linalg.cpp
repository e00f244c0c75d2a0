#include "qcert/linalg.hpp"

#include <cstdlib>

namespace qcert {

namespace {

i64 mod128(i128 a, i64 m)
{
    i128 r = a % m;
    if (r < 0)
        r += m;
    return static_cast<i64>(r);
}

void insert_row(Mat4& h, Vec4 v, i64 modulus)
{
    for (int k = 0; k < 4; ++k) {
        for (int c = k; c < 4; ++c)
            v(c) = mod(v(c), modulus);
        if (v(k) == 0)
            continue;
        i64 pivot = h(k, k);
        i64 x, y;
        i64 g = ext_gcd(pivot, v(k), x, y);
        i64 fp = pivot / g, fv = v(k) / g;
        Vec4 row, rest;
        for (int c = 0; c < 4; ++c) {
            row(c) = mod128(static_cast<i128>(x) * h(k, c) + static_cast<i128>(y) * v(c), modulus);
            rest(c) = mod128(static_cast<i128>(fp) * v(c) - static_cast<i128>(fv) * h(k, c), modulus);
        }
        row(k) = g;
        rest(k) = 0;
        h.row(k) = row.transpose();
        v = rest;
    }
}

} // namespace

Mat4 hnf_mod(std::vector<Vec4> const& gens, i64 modulus)
{
    if (modulus <= 0)
        throw std::domain_error("hnf_mod: modulus must be positive");
    Mat4 h = Mat4::Identity() * modulus;
    for (auto const& v : gens)
        insert_row(h, v, modulus);
    for (int c = 1; c < 4; ++c) {
        for (int r = 0; r < c; ++r) {
            i64 q = floor_div(h(r, c), h(c, c));
            if (q != 0)
                h.row(r) -= q * h.row(c);
        }
    }
    return h;
}

std::optional<Vec4> hnf_coordinates(Mat4 const& hnf, Vec4 v)
{
    Vec4 coords;
    for (int k = 0; k < 4; ++k) {
        if (v(k) % hnf(k, k) != 0)
            return std::nullopt;
        coords(k) = v(k) / hnf(k, k);
        v -= coords(k) * hnf.row(k).transpose();
    }
    return coords;
}

bool hnf_contains(Mat4 const& hnf, Vec4 v)
{
    return hnf_coordinates(hnf, std::move(v)).has_value();
}

i128 determinant(IntMatrix const& m)
{
    const Eigen::Index n = m.rows();
    if (n != m.cols())
        throw std::domain_error("determinant: square matrix required");
    if (n == 0)
        return 1;
    Matrix<i128> a = m.cast<i128>();
    int sign = 1;
    i128 prev = 1;
    for (Eigen::Index k = 0; k < n - 1; ++k) {
        if (a(k, k) == 0) {
            Eigen::Index swap = -1;
            for (Eigen::Index r = k + 1; r < n; ++r)
                if (a(r, k) != 0) {
                    swap = r;
                    break;
                }
            if (swap < 0)
                return 0;
            a.row(k).swap(a.row(swap));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i)
            for (Eigen::Index j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

namespace {

mpz_class round_nearest(mpq_class const& x)
{
    mpq_class y = x + mpq_class(1, 2);
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    return r;
}

void gram_schmidt(RatMatrix const& g, RatMatrix& mu, std::vector<mpq_class>& bstar)
{
    const Eigen::Index n = g.rows();
    mu = RatMatrix::Zero(n, n);
    bstar.assign(static_cast<size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            mpq_class s = g(i, j);
            for (Eigen::Index k = 0; k < j; ++k)
                s -= mu(j, k) * mu(i, k) * bstar[static_cast<size_t>(k)];
            mu(i, j) = s / bstar[static_cast<size_t>(j)];
        }
        mpq_class s = g(i, i);
        for (Eigen::Index k = 0; k < i; ++k)
            s -= mu(i, k) * mu(i, k) * bstar[static_cast<size_t>(k)];
        bstar[static_cast<size_t>(i)] = s;
    }
}

} // namespace

IntMatrix lll_reduce_gram(IntMatrix const& gram)
{
    const Eigen::Index n = gram.rows();
    IntMatrix t = IntMatrix::Identity(n, n);
    if (n <= 1)
        return t;
    const RatMatrix g0 = to_rational(gram);
    const mpq_class delta(3, 4);
    auto current = [&] {
        RatMatrix tr = to_rational(t);
        return RatMatrix(tr * g0 * tr.transpose());
    };
    RatMatrix mu;
    std::vector<mpq_class> bstar;
    Eigen::Index k = 1;
    int guard = 0;
    while (k < n) {
        if (++guard > 100000)
            throw std::logic_error("lll_reduce_gram: no convergence");
        gram_schmidt(current(), mu, bstar);
        for (Eigen::Index j = k - 1; j >= 0; --j) {
            mpz_class r = round_nearest(mu(k, j));
            if (r != 0) {
                t.row(k) -= r.get_si() * t.row(j);
                gram_schmidt(current(), mu, bstar);
            }
        }
        auto kk = static_cast<size_t>(k);
        if (bstar[kk] >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bstar[kk - 1]) {
            ++k;
        } else {
            t.row(k).swap(t.row(k - 1));
            k = std::max<Eigen::Index>(k - 1, 1);
        }
    }
    return t;
}

IntMatrix reduce_mod(IntMatrix m, i64 p)
{
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = mod(m(i, j), p);
    return m;
}

namespace {

/* in-place reduced row echelon form mod p; returns pivot columns */
std::vector<Eigen::Index> rref_mod_p(IntMatrix& m, i64 p)
{
    m = reduce_mod(std::move(m), p);
    std::vector<Eigen::Index> pivots;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
        Eigen::Index sel = -1;
        for (Eigen::Index r = row; r < m.rows(); ++r)
            if (m(r, col) != 0) {
                sel = r;
                break;
            }
        if (sel < 0)
            continue;
        m.row(row).swap(m.row(sel));
        i64 inv = invmod(m(row, col), p);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(row, c) = mulmod(m(row, c), inv, p);
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (r == row || m(r, col) == 0)
                continue;
            i64 f = m(r, col);
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                m(r, c) = mod(m(r, c) - mulmod(f, m(row, c), p), p);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

} // namespace

int rank_mod_p(IntMatrix m, i64 p)
{
    return static_cast<int>(rref_mod_p(m, p).size());
}

IntMatrix kernel_mod_p(IntMatrix const& m, i64 p)
{
    IntMatrix r = m;
    auto pivots = rref_mod_p(r, p);
    const Eigen::Index n = m.cols();
    std::vector<bool> is_pivot(static_cast<size_t>(n), false);
    for (auto c : pivots)
        is_pivot[static_cast<size_t>(c)] = true;
    std::vector<IntVector> basis;
    for (Eigen::Index free = 0; free < n; ++free) {
        if (is_pivot[static_cast<size_t>(free)])
            continue;
        IntVector v = IntVector::Zero(n);
        v(free) = 1;
        for (size_t k = 0; k < pivots.size(); ++k)
            v(pivots[k]) = mod(-r(static_cast<Eigen::Index>(k), free), p);
        basis.push_back(v);
    }
    IntMatrix out(n, static_cast<Eigen::Index>(basis.size()));
    for (size_t k = 0; k < basis.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = basis[k];
    return out;
}

IntMatrix matmul_mod_p(IntMatrix const& a, IntMatrix const& b, i64 p)
{
    IntMatrix out = IntMatrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            i64 s = 0;
            for (Eigen::Index k = 0; k < a.cols(); ++k)
                s = (s + mulmod(a(i, k), b(k, j), p)) % p;
            out(i, j) = s;
        }
    return out;
}

IntMatrix matpow_mod_p(IntMatrix const& a, int e, i64 p)
{
    IntMatrix result = IntMatrix::Identity(a.rows(), a.cols());
    IntMatrix base = reduce_mod(a, p);
    while (e > 0) {
        if (e & 1)
            result = matmul_mod_p(result, base, p);
        base = matmul_mod_p(base, base, p);
        e >>= 1;
    }
    return result;
}

IntMatrix right_inverse_mod_p(IntMatrix const& m, i64 p)
{
    const Eigen::Index r = m.rows(), c = m.cols();
    // solve m^T-side by row reducing [m | I]
    IntMatrix aug(r, c + r);
    aug << m, IntMatrix::Identity(r, r);
    auto pivots = rref_mod_p(aug, p);
    if (static_cast<Eigen::Index>(pivots.size()) < r || pivots.back() >= c)
        throw std::domain_error("right_inverse_mod_p: matrix lacks full row rank");
    // rows of aug: [R | E] with E m = R; pick x supported on pivot columns
    IntMatrix x = IntMatrix::Zero(c, r);
    for (Eigen::Index k = 0; k < r; ++k)
        x.row(pivots[static_cast<size_t>(k)]) = aug.block(k, c, 1, r);
    return x;
}

RatMatrix kernel_rational(RatMatrix m)
{
    const Eigen::Index rows = m.rows(), n = m.cols();
    std::vector<Eigen::Index> pivots;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < n && row < rows; ++col) {
        Eigen::Index sel = -1;
        for (Eigen::Index r = row; r < rows; ++r)
            if (m(r, col) != 0) {
                sel = r;
                break;
            }
        if (sel < 0)
            continue;
        m.row(row).swap(m.row(sel));
        mpq_class inv = 1 / m(row, col);
        for (Eigen::Index c = 0; c < n; ++c)
            m(row, c) *= inv;
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (r == row || m(r, col) == 0)
                continue;
            mpq_class f = m(r, col);
            for (Eigen::Index c = 0; c < n; ++c)
                m(r, c) -= f * m(row, c);
        }
        pivots.push_back(col);
        ++row;
    }
    std::vector<bool> is_pivot(static_cast<size_t>(n), false);
    for (auto c : pivots)
        is_pivot[static_cast<size_t>(c)] = true;
    std::vector<RatVector> basis;
    for (Eigen::Index free = 0; free < n; ++free) {
        if (is_pivot[static_cast<size_t>(free)])
            continue;
        RatVector v = RatVector::Zero(n);
        v(free) = 1;
        for (size_t k = 0; k < pivots.size(); ++k)
            v(pivots[k]) = -m(static_cast<Eigen::Index>(k), free);
        basis.push_back(v);
    }
    RatMatrix out(n, static_cast<Eigen::Index>(basis.size()));
    for (size_t k = 0; k < basis.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = basis[k];
    return out;
}

RowKernel integer_row_kernel(IntVector const& row)
{
    const Eigen::Index n = row.size();
    IntVector r = row;
    IntMatrix u = IntMatrix::Identity(n, n);
    while (true) {
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < n; ++j)
            if (r(j) != 0 && (best < 0 || std::llabs(r(j)) < std::llabs(r(best))))
                best = j;
        if (best < 0)
            break;
        if (best != 0) {
            std::swap(r(0), r(best));
            u.col(0).swap(u.col(best));
        }
        bool done = true;
        for (Eigen::Index j = 1; j < n; ++j) {
            if (r(j) == 0)
                continue;
            i64 q = r(j) / r(0);
            r(j) -= q * r(0);
            u.col(j) -= q * u.col(0);
            if (r(j) != 0)
                done = false;
        }
        if (done)
            break;
    }
    if (r(0) < 0) {
        r(0) = -r(0);
        u.col(0) = -u.col(0);
    }
    return {u.rightCols(n - 1), u.col(0), r(0)};
}

} // namespace qcert
