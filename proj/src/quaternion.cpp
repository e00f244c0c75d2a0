#include "qcert/quaternion.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace qcert {

// ---------------------------------------------------------------------------
// algebra

i64 QuaternionAlgebra::discriminant() const
{
    i64 d = 1;
    for (i64 q : ramified_primes)
        d *= q;
    return d;
}

int hilbert_symbol(i64 a, i64 b, i64 q)
{
    if (a == 0 || b == 0)
        throw std::domain_error("hilbert_symbol: nonzero arguments required");
    if (q == 0)
        return (a < 0 && b < 0) ? -1 : 1;
    int alpha = valuation(a, q), beta = valuation(b, q);
    i64 u = a, v = b;
    for (int k = 0; k < alpha; ++k)
        u /= q;
    for (int k = 0; k < beta; ++k)
        v /= q;
    if (q == 2) {
        auto eps = [](i64 x) { return mod(x, 4) == 3 ? 1 : 0; };
        auto omega = [](i64 x) {
            i64 r = mod(x, 8);
            return (r == 3 || r == 5) ? 1 : 0;
        };
        int e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        return e % 2 ? -1 : 1;
    }
    int s = ((alpha * beta) % 2 == 1 && q % 4 == 3) ? -1 : 1;
    if (beta % 2)
        s *= kronecker(u, q);
    if (alpha % 2)
        s *= kronecker(v, q);
    return s;
}

QuaternionAlgebra build_algebra(FactoredInteger const& n_minus, i64 search_bound)
{
    if (!n_minus.is_squarefree() || n_minus.factors.size() % 2 == 0)
        throw std::invalid_argument("build_algebra: N- must be squarefree with an odd number of primes");
    auto ramified = n_minus.primes();
    for (i64 a = -1; a >= -search_bound; --a) {
        for (i64 b = a; b >= -search_bound; --b) {
            std::set<i64> places(ramified.begin(), ramified.end());
            places.insert(2);
            for (i64 q : factorize(a).primes())
                places.insert(q);
            for (i64 q : factorize(b).primes())
                places.insert(q);
            bool ok = true;
            for (i64 q : places) {
                bool want = std::find(ramified.begin(), ramified.end(), q) != ramified.end();
                if ((hilbert_symbol(a, b, q) == -1) != want) {
                    ok = false;
                    break;
                }
            }
            if (ok && hilbert_symbol(a, b, 0) == -1)
                return QuaternionAlgebra{a, b, ramified};
        }
    }
    throw SearchExhausted("build_algebra: no (a,b) found within the search bound");
}

// ---------------------------------------------------------------------------
// rational lattices in B, rows / den in the basis 1,i,j,k

namespace {

using QVec = Eigen::Matrix<mpq_class, 4, 1>;
using Vec4i128 = Eigen::Matrix<i128, 4, 1>;

struct RatLattice
{
    Mat4 rows;
    i64 den = 1;
    bool operator==(RatLattice const& o) const { return den == o.den && rows == o.rows; }
};

i128 bilinear(QuaternionAlgebra const& B, Vec4 const& x, Vec4 const& y)
{
    // nrd(x+y) - nrd(x) - nrd(y) = 2 * bilinear
    return static_cast<i128>(x(0)) * y(0) - static_cast<i128>(B.a) * x(1) * y(1) -
           static_cast<i128>(B.b) * x(2) * y(2) + static_cast<i128>(B.a) * B.b * x(3) * y(3);
}

Vec4 mul_int(QuaternionAlgebra const& B, Vec4 const& x, Vec4 const& y)
{
    Vec4i128 r = quat_mul<i128>(B, x.cast<i128>(), y.cast<i128>());
    for (int k = 0; k < 4; ++k)
        if (r(k) > (i128{1} << 62) || r(k) < -(i128{1} << 62))
            throw SizeError("quaternion product overflow");
    return r.cast<i64>();
}

RatLattice normalize(Mat4 rows, i64 den)
{
    i64 g = den;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            g = std::gcd(g, rows(r, c));
    return RatLattice{rows / g, den / g};
}

i64 abs_det(Mat4 const& m)
{
    i128 d = determinant(IntMatrix(m));
    if (d < 0)
        d = -d;
    if (d > (i128{1} << 62))
        throw SizeError("lattice determinant too large");
    return static_cast<i64>(d);
}

/* lattice spanned by L and extra vectors, all extras at denominator den_extra */
RatLattice span(RatLattice const& L, std::vector<Vec4> const& extra, i64 den_extra)
{
    i64 den = std::lcm(L.den, den_extra);
    std::vector<Vec4> gens;
    Mat4 scaled = L.rows * (den / L.den);
    for (int r = 0; r < 4; ++r)
        gens.push_back(scaled.row(r).transpose());
    for (auto const& v : extra)
        gens.push_back(v * (den / den_extra));
    Mat4 h = hnf_mod(gens, abs_det(scaled));
    return normalize(h, den);
}

bool integral_pairing(QuaternionAlgebra const& B, RatLattice const& L)
{
    const i128 d2 = static_cast<i128>(L.den) * L.den;
    for (int r = 0; r < 4; ++r) {
        Vec4 x = L.rows.row(r).transpose();
        if ((2 * static_cast<i128>(x(0))) % L.den != 0)
            return false;
        if (quat_nrd<i128>(B, x.cast<i128>()) % d2 != 0)
            return false;
        for (int s = 0; s < 4; ++s)
            if ((2 * bilinear(B, x, L.rows.row(s).transpose())) % d2 != 0)
                return false;
    }
    return true;
}

/* reduced discriminant of an order: sqrt |det(trd(e_a conj e_b))| */
i64 order_discriminant(QuaternionAlgebra const& B, RatLattice const& L)
{
    IntMatrix g(4, 4);
    const i128 d2 = static_cast<i128>(L.den) * L.den;
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
            g(r, s) = static_cast<i64>(2 * bilinear(B, L.rows.row(r).transpose(), L.rows.row(s).transpose()) / d2);
    i128 det = determinant(g);
    if (det < 0)
        det = -det;
    i64 root = isqrt(static_cast<i64>(det));
    if (static_cast<i128>(root) * root != det)
        throw std::logic_error("order discriminant: Gram determinant not a square");
    return root;
}

/* ring generated by L; nullopt if it stops being integral */
std::optional<RatLattice> ring_closure(QuaternionAlgebra const& B, RatLattice L)
{
    for (int iter = 0; iter < 64; ++iter) {
        if (!integral_pairing(B, L))
            return std::nullopt;
        std::vector<Vec4> prods;
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s)
                prods.push_back(mul_int(B, L.rows.row(r).transpose(), L.rows.row(s).transpose()));
        RatLattice next = span(L, prods, L.den * L.den);
        if (next == L)
            return L;
        L = next;
    }
    return std::nullopt;
}

Eigen::Matrix<mpq_class, 4, 4> inverse4(Eigen::Matrix<mpq_class, 4, 4> m)
{
    Eigen::Matrix<mpq_class, 4, 4> inv = Eigen::Matrix<mpq_class, 4, 4>::Identity();
    for (int c = 0; c < 4; ++c) {
        int piv = -1;
        for (int r = c; r < 4; ++r)
            if (m(r, c) != 0) {
                piv = r;
                break;
            }
        if (piv < 0)
            throw std::domain_error("inverse4: singular");
        m.row(c).swap(m.row(piv));
        inv.row(c).swap(inv.row(piv));
        mpq_class f = 1 / m(c, c);
        m.row(c) *= f;
        inv.row(c) *= f;
        for (int r = 0; r < 4; ++r) {
            if (r == c || m(r, c) == 0)
                continue;
            mpq_class g = m(r, c);
            m.row(r) -= g * m.row(c);
            inv.row(r) -= g * inv.row(c);
        }
    }
    return inv;
}

EichlerOrder make_order(QuaternionAlgebra const& B, RatLattice const& L, i64 n_minus, i64 level)
{
    EichlerOrder R;
    R.algebra = B;
    R.basis = L.rows;
    R.denominator = L.den;
    R.n_minus = n_minus;
    R.level = level;
    Eigen::Matrix<mpq_class, 4, 4> X;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            X(r, c) = mpq_class(static_cast<long>(L.rows(r, c)), static_cast<unsigned long>(L.den));
            X(r, c).canonicalize();
        }
    auto Xinv = inverse4(X);
    auto coords = [&](QVec const& v) {
        Eigen::Matrix<mpq_class, 1, 4> c = v.transpose() * Xinv;
        Vec4 out;
        for (int k = 0; k < 4; ++k) {
            if (c(k).get_den() != 1)
                throw std::logic_error("make_order: lattice is not closed");
            out(k) = c(k).get_num().get_si();
        }
        return out;
    };
    std::vector<QVec> elts(4);
    for (int r = 0; r < 4; ++r)
        elts[static_cast<size_t>(r)] = X.row(r).transpose();
    for (int r = 0; r < 4; ++r) {
        for (int s = 0; s < 4; ++s) {
            Vec4 c = coords(quat_mul<mpq_class>(B, elts[static_cast<size_t>(r)], elts[static_cast<size_t>(s)]));
            R.structure[static_cast<size_t>(r)].row(s) = c.transpose();
        }
        QVec cj = elts[static_cast<size_t>(r)];
        for (int k = 1; k < 4; ++k)
            cj(k) = -cj(k);
        R.conj.col(r) = coords(cj);
        mpq_class tr = 2 * elts[static_cast<size_t>(r)](0);
        R.trace(r) = tr.get_num().get_si();
    }
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
            QVec prod = quat_mul<mpq_class>(B, elts[static_cast<size_t>(r)], [&] {
                QVec c = elts[static_cast<size_t>(s)];
                for (int k = 1; k < 4; ++k)
                    c(k) = -c(k);
                return c;
            }());
            mpq_class t = 2 * prod(0);
            if (t.get_den() != 1)
                throw std::logic_error("make_order: non-integral trace form");
            R.gram(r, s) = t.get_num().get_si();
        }
    QVec one;
    one << 1, 0, 0, 0;
    R.one = coords(one);
    return R;
}

} // namespace

Vec4 EichlerOrder::mul(Vec4 const& x, Vec4 const& y) const
{
    Vec4i128 acc = Vec4i128::Zero();
    for (int r = 0; r < 4; ++r) {
        if (x(r) == 0)
            continue;
        for (int s = 0; s < 4; ++s) {
            if (y(s) == 0)
                continue;
            i128 f = static_cast<i128>(x(r)) * y(s);
            for (int t = 0; t < 4; ++t)
                acc(t) += f * structure[static_cast<size_t>(r)](s, t);
        }
    }
    for (int t = 0; t < 4; ++t)
        if (acc(t) > (i128{1} << 62) || acc(t) < -(i128{1} << 62))
            throw SizeError("order product overflow");
    return acc.cast<i64>();
}

i64 EichlerOrder::nrd(Vec4 const& x) const
{
    i128 s = 0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            s += static_cast<i128>(x(r)) * gram(r, c) * x(c);
    return static_cast<i64>(s / 2);
}

Eigen::Matrix<mpq_class, 4, 1> EichlerOrder::to_algebra(Vec4 const& x) const
{
    Eigen::Matrix<mpq_class, 4, 1> out;
    for (int c = 0; c < 4; ++c) {
        mpz_class s = 0;
        for (int r = 0; r < 4; ++r)
            s += mpz_class(static_cast<long>(x(r))) * static_cast<long>(basis(r, c));
        out(c) = mpq_class(s, static_cast<long>(denominator));
        out(c).canonicalize();
    }
    return out;
}

EichlerOrder maximal_order(QuaternionAlgebra const& B)
{
    const i64 target = B.discriminant();
    RatLattice L{Mat4::Identity(), 1};
    i64 disc = order_discriminant(B, L);
    while (disc != target) {
        if (disc % target != 0)
            throw std::logic_error("maximal_order: discriminant lost a ramified prime");
        bool grown = false;
        for (i64 q : factorize(disc / target).primes()) {
            for (i64 code = 1; code < q * q * q * q && !grown; ++code) {
                Vec4 y;
                i64 t = code;
                for (int k = 3; k >= 0; --k) {
                    y(k) = t % q;
                    t /= q;
                }
                Vec4 x = (y.transpose() * L.rows).transpose();
                // x / (q den) must be integral
                const i128 den = static_cast<i128>(q) * L.den;
                if ((2 * static_cast<i128>(x(0))) % den != 0)
                    continue;
                if (quat_nrd<i128>(B, x.cast<i128>()) % (den * den) != 0)
                    continue;
                auto closed = ring_closure(B, span(L, {x}, q * L.den));
                if (!closed)
                    continue;
                i64 d = order_discriminant(B, *closed);
                if (d < disc) {
                    L = *closed;
                    disc = d;
                    grown = true;
                }
            }
            if (grown)
                break;
        }
        if (!grown)
            throw SearchExhausted("maximal_order: no enlargement found");
    }
    return make_order(B, L, target, 1);
}

namespace {

/* root of t^2 - tr t + n mod q^e lifted from a simple root mod q */
i64 hensel_lift(i64 tr, i64 n, i64 r, i64 q, int e)
{
    i64 m = q;
    for (int k = 1; k < e; ++k) {
        m *= q;
        i64 f = mod(mulmod(r, r, m) - mulmod(tr, r, m) + n, m);
        i64 df = mod(2 * r - tr, m);
        r = mod(r - mulmod(f, invmod(df, m), m), m);
    }
    return r;
}

} // namespace

EichlerOrder eichler_order(QuaternionAlgebra const& B, i64 n_plus)
{
    if (n_plus < 1 || std::gcd(n_plus, B.discriminant()) != 1)
        throw std::invalid_argument("eichler_order: level must be positive and prime to N-");
    EichlerOrder O = maximal_order(B);
    if (n_plus == 1)
        return O;
    // idempotent eps with eps = e11 locally at every q | N+
    std::vector<i64> crt_mod, crt_rem[4];
    for (auto const& f : factorize(n_plus).factors) {
        const i64 q = f.prime;
        i64 qe = 1;
        for (int k = 0; k < f.exponent; ++k)
            qe *= q;
        std::optional<Vec4> eps;
        for (i64 code = 0; code < 625 && !eps; ++code) {
            Vec4 x;
            i64 t = code;
            for (int k = 0; k < 4; ++k) {
                x(k) = t % 5 - 2;
                t /= 5;
            }
            i64 tr = O.trd(x), n = O.nrd(x);
            std::vector<i64> roots;
            for (i64 r = 0; r < q; ++r)
                if (mod(r * r - tr * r + n, q) == 0)
                    roots.push_back(r);
            if (roots.size() != 2)
                continue;
            i64 r1 = hensel_lift(tr, n, roots[0], q, f.exponent);
            i64 r2 = hensel_lift(tr, n, roots[1], q, f.exponent);
            i64 u = invmod(mod(r1 - r2, qe), qe);
            Vec4 v = x - r2 * O.one;
            Vec4 e;
            for (int k = 0; k < 4; ++k)
                e(k) = mulmod(mod(v(k), qe), u, qe);
            eps = e;
        }
        if (!eps)
            throw SearchExhausted("eichler_order: no splitting element found");
        crt_mod.push_back(qe);
        for (int k = 0; k < 4; ++k)
            crt_rem[k].push_back((*eps)(k));
    }
    Vec4 eps;
    for (int k = 0; k < 4; ++k) {
        i64 value = 0, modulus = 1;
        for (size_t s = 0; s < crt_mod.size(); ++s) {
            // x = value mod modulus, x = rem mod m
            i64 m = crt_mod[s], rem = crt_rem[k][s];
            i64 t = mulmod(mod(rem - value, m), invmod(mod(modulus, m), m), m);
            value += modulus * t;
            modulus *= m;
        }
        eps(k) = value;
    }
    std::vector<Vec4> gens{O.one};
    for (int s = 0; s < 4; ++s) {
        Vec4 es = Vec4::Unit(s);
        gens.push_back(O.mul(eps, es));
    }
    Mat4 h = hnf_mod(gens, n_plus);
    // h is in O-coordinates; move to 1,i,j,k
    Mat4 rows = h * O.basis;
    RatLattice L = normalize(rows, O.denominator);
    auto closed = ring_closure(B, L);
    if (!closed || !(*closed == L))
        throw std::logic_error("eichler_order: congruence lattice is not a ring");
    i64 disc = order_discriminant(B, L);
    if (disc != B.discriminant() * n_plus)
        throw std::logic_error("eichler_order: wrong discriminant");
    return make_order(B, L, B.discriminant(), n_plus);
}

// ---------------------------------------------------------------------------
// ideals

RightIdeal unit_ideal()
{
    return RightIdeal{Mat4::Identity(), 1};
}

namespace {

i64 ideal_norm_from_hnf(Mat4 const& h)
{
    i128 det = 1;
    for (int k = 0; k < 4; ++k)
        det *= h(k, k);
    i64 root = isqrt(static_cast<i64>(det));
    if (static_cast<i128>(root) * root != det)
        throw std::logic_error("ideal index is not a square");
    return root;
}

} // namespace

RightIdeal ideal_from_generators(EichlerOrder const&, std::vector<Vec4> const& gens, i64 modulus)
{
    Mat4 h = hnf_mod(gens, modulus);
    return RightIdeal{h, ideal_norm_from_hnf(h)};
}

bool is_right_ideal(EichlerOrder const& R, RightIdeal const& I)
{
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
            if (!hnf_contains(I.basis, R.mul(I.basis.row(r).transpose(), Vec4::Unit(s))))
                return false;
    return true;
}

RightIdeal left_multiply(EichlerOrder const& R, Vec4 const& alpha, RightIdeal const& I)
{
    i64 n = R.nrd(alpha);
    if (n == 0)
        throw std::domain_error("left_multiply: zero element");
    std::vector<Vec4> gens;
    for (int r = 0; r < 4; ++r)
        gens.push_back(R.mul(alpha, I.basis.row(r).transpose()));
    return ideal_from_generators(R, gens, n * I.norm);
}

std::vector<RightIdeal> neighbors(EichlerOrder const& R, RightIdeal const& I, i64 q)
{
    std::vector<RightIdeal> out;
    std::set<std::vector<i64>> seen;
    const i64 target = q * I.norm;
    for (i64 code = 1; code < q * q * q * q; ++code) {
        Vec4 c;
        i64 t = code;
        for (int k = 3; k >= 0; --k) {
            c(k) = t % q;
            t /= q;
        }
        Vec4 x = (c.transpose() * I.basis).transpose();
        if (R.nrd(x) % target != 0)
            continue;
        std::vector<Vec4> gens;
        for (int s = 0; s < 4; ++s)
            gens.push_back(R.mul(x, Vec4::Unit(s)));
        for (int r = 0; r < 4; ++r)
            gens.push_back(q * I.basis.row(r).transpose());
        RightIdeal J = ideal_from_generators(R, gens, target);
        if (J.norm != target)
            continue;
        std::vector<i64> key(J.basis.data(), J.basis.data() + 16);
        if (seen.insert(key).second)
            out.push_back(J);
    }
    return out;
}

Mat4 product_with_conjugate(EichlerOrder const& R, RightIdeal const& I, RightIdeal const& J)
{
    std::vector<Vec4> gens;
    for (int r = 0; r < 4; ++r) {
        Vec4 x = I.basis.row(r).transpose();
        for (int s = 0; s < 4; ++s)
            gens.push_back(R.mul(x, R.conjugate(J.basis.row(s).transpose())));
    }
    return hnf_mod(gens, I.norm * J.norm);
}

IntMatrix lattice_gram(EichlerOrder const& R, Mat4 const& basis)
{
    return IntMatrix(basis * R.gram * basis.transpose());
}

bool same_ideal_class(EichlerOrder const& R, RightIdeal const& I, RightIdeal const& J)
{
    Mat4 L = product_with_conjugate(R, I, J);
    const i64 bound = 2 * I.norm * J.norm;
    bool found = false;
    short_vectors(lattice_gram(R, L), bound, [&](IntVector const&, i64 v) {
        if (v == bound) {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

i64 unit_count(EichlerOrder const& R, RightIdeal const& I)
{
    Mat4 L = product_with_conjugate(R, I, I);
    const i64 bound = 2 * I.norm * I.norm;
    i64 count = 0;
    short_vectors(lattice_gram(R, L), bound, [&](IntVector const&, i64 v) {
        if (v == bound)
            ++count;
        return true;
    });
    return count;
}

mpq_class eichler_mass(i64 n_minus, i64 n_plus)
{
    mpq_class m(static_cast<long>(n_minus) * n_plus, 24);
    m.canonicalize();
    for (i64 q : factorize(n_minus).primes())
        m *= mpq_class(static_cast<long>(q - 1)) / q;
    for (i64 q : factorize(n_plus).primes())
        m *= mpq_class(static_cast<long>(q + 1)) / q;
    return m;
}

mpq_class RightIdealClassSet::mass() const
{
    mpq_class s = 0;
    for (i64 w : weights)
        s += mpq_class(1, static_cast<unsigned long>(w));
    s.canonicalize();
    return s;
}

namespace {

/* #{x in I : nrd x = k N(I)}, k = 1..3 */
std::array<i64, 3> ideal_invariant(EichlerOrder const& R, RightIdeal const& I)
{
    std::array<i64, 3> counts{0, 0, 0};
    const i64 unit = 2 * I.norm;
    short_vectors(lattice_gram(R, I.basis), 3 * unit, [&](IntVector const&, i64 v) {
        if (v > 0 && v % unit == 0)
            counts[static_cast<size_t>(v / unit - 1)] += 1;
        return true;
    });
    return counts;
}

i64 smallest_good_prime(i64 n)
{
    i64 q = 2;
    while (n % q == 0)
        q = next_prime(q);
    return q;
}

} // namespace

RightIdealClassSet ideal_class_set(EichlerOrder const& R, i64 theta_bound)
{
    RightIdealClassSet cls;
    cls.order = R;
    cls.neighbor_prime = smallest_good_prime(R.discriminant());
    const mpq_class target = eichler_mass(R.n_minus, R.level);
    std::vector<std::array<i64, 3>> invariants;
    auto add = [&](RightIdeal const& I) {
        cls.ideals.push_back(I);
        cls.weights.push_back(unit_count(R, I));
        invariants.push_back(ideal_invariant(R, I));
    };
    add(unit_ideal());
    mpq_class total(1, static_cast<unsigned long>(cls.weights[0]));
    size_t cursor = 0;
    while (total < target) {
        if (cursor >= cls.ideals.size())
            throw MassMismatch("ideal_class_set: neighbor graph exhausted below the mass");
        RightIdeal base = cls.ideals[cursor++];
        for (auto const& J : neighbors(R, base, cls.neighbor_prime)) {
            auto inv = ideal_invariant(R, J);
            bool known = false;
            for (size_t i = 0; i < cls.ideals.size() && !known; ++i)
                if (invariants[i] == inv && same_ideal_class(R, cls.ideals[i], J))
                    known = true;
            if (known)
                continue;
            add(J);
            total += mpq_class(1, static_cast<unsigned long>(cls.weights.back()));
            total.canonicalize();
            if (total >= target)
                break;
        }
    }
    if (total != target)
        throw MassMismatch("ideal_class_set: mass " + total.get_str() + " != " + target.get_str());
    compute_theta(cls, theta_bound);
    return cls;
}

namespace {

/* counts[n] = #{b in I conj(J) : nrd b = n N(I) N(J)}, n in [0, bound] */
std::vector<i64> pair_theta(EichlerOrder const& R, RightIdeal const& I, RightIdeal const& J, i64 bound)
{
    Mat4 L = product_with_conjugate(R, I, J);
    const i64 unit = 2 * I.norm * J.norm;
    std::vector<i64> counts(static_cast<size_t>(bound + 1), 0);
    short_vectors(lattice_gram(R, L), bound * unit, [&](IntVector const&, i64 v) {
        if (v % unit != 0)
            throw std::logic_error("pair_theta: norm not divisible by the ideal norms");
        counts[static_cast<size_t>(v / unit)] += 1;
        return true;
    });
    return counts;
}

/* #{b : nrd b = n N(I) N(J)} for a single n */
i64 pair_count(EichlerOrder const& R, RightIdeal const& I, RightIdeal const& J, i64 n)
{
    Mat4 L = product_with_conjugate(R, I, J);
    const i64 target = 2 * n * I.norm * J.norm;
    i64 count = 0;
    short_vectors(lattice_gram(R, L), target, [&](IntVector const&, i64 v) {
        if (v == target)
            ++count;
        return true;
    });
    return count;
}

} // namespace

void compute_theta(RightIdealClassSet& cls, i64 theta_bound)
{
    const size_t h = cls.ideals.size();
    cls.theta_bound = theta_bound;
    cls.theta.assign(h, std::vector<std::vector<i64>>(h));
    for (size_t i = 0; i < h; ++i)
        for (size_t j = i; j < h; ++j) {
            cls.theta[i][j] = pair_theta(cls.order, cls.ideals[i], cls.ideals[j], theta_bound);
            cls.theta[j][i] = cls.theta[i][j];
        }
}

int locate_class(RightIdealClassSet const& cls, RightIdeal const& I)
{
    auto inv = ideal_invariant(cls.order, I);
    for (int i = 0; i < cls.size(); ++i)
        if (ideal_invariant(cls.order, cls.ideals[static_cast<size_t>(i)]) == inv &&
            same_ideal_class(cls.order, cls.ideals[static_cast<size_t>(i)], I))
            return i;
    throw std::logic_error("locate_class: ideal matches no class (class set incomplete?)");
}

IntMatrix brandt_matrix(RightIdealClassSet const& cls, i64 n)
{
    if (n < 1)
        throw std::domain_error("brandt_matrix: n >= 1");
    if (std::gcd(n, cls.order.n_minus) != 1)
        throw Unsupported("brandt_matrix: n shares a factor with N-");
    const int h = cls.size();
    IntMatrix B(h, h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) {
            i64 s;
            if (n <= cls.theta_bound)
                s = cls.theta[static_cast<size_t>(i)][static_cast<size_t>(j)][static_cast<size_t>(n)];
            else
                s = pair_count(cls.order, cls.ideals[static_cast<size_t>(i)], cls.ideals[static_cast<size_t>(j)], n);
            i64 w = cls.weights[static_cast<size_t>(j)];
            if (s % w != 0)
                throw std::logic_error("brandt_matrix: count not divisible by the unit weight");
            B(i, j) = s / w;
        }
    return B;
}

// ---------------------------------------------------------------------------
// eigenform and mod p checks

namespace {

std::vector<i64> good_primes(RightIdealClassSet const& cls, i64 bound)
{
    std::vector<i64> out;
    const i64 N = cls.order.discriminant();
    for (i64 q : primes_up_to(bound))
        if (N % q != 0)
            out.push_back(q);
    return out;
}

} // namespace

QuaternionicEigenform eigenform(RightIdealClassSet const& cls, std::map<i64, i64> const& traces, i64 q_bound)
{
    auto qs = good_primes(cls, q_bound);
    if (qs.size() < 3)
        throw std::invalid_argument("eigenform: need at least three good primes");
    const int h = cls.size();
    RatMatrix stack(static_cast<Eigen::Index>(qs.size()) * h, h);
    QuaternionicEigenform out;
    for (size_t k = 0; k < qs.size(); ++k) {
        auto it = traces.find(qs[k]);
        if (it == traces.end())
            throw std::invalid_argument("eigenform: missing a_q for q = " + std::to_string(qs[k]));
        IntMatrix m = brandt_matrix(cls, qs[k]) - it->second * IntMatrix::Identity(h, h);
        stack.block(static_cast<Eigen::Index>(k) * h, 0, h, h) = to_rational(m);
        out.eigenvalues[qs[k]] = it->second;
    }
    RatMatrix ker = kernel_rational(stack);
    if (ker.cols() == 0)
        throw NoEigenvector("eigenform: no simultaneous eigenvector with the given eigenvalues");
    if (ker.cols() > 1)
        throw Ambiguous("eigenform: eigenspace has dimension " + std::to_string(ker.cols()));
    mpz_class l = 1;
    for (Eigen::Index i = 0; i < h; ++i)
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), ker(i, 0).get_den_mpz_t());
    std::vector<mpz_class> ints(static_cast<size_t>(h));
    mpz_class g = 0;
    for (Eigen::Index i = 0; i < h; ++i) {
        mpq_class v = ker(i, 0) * l;
        ints[static_cast<size_t>(i)] = v.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ints[static_cast<size_t>(i)].get_mpz_t());
    }
    int sign = 0;
    for (auto const& v : ints)
        if (v != 0) {
            sign = v > 0 ? 1 : -1;
            break;
        }
    out.values = IntVector(h);
    for (Eigen::Index i = 0; i < h; ++i) {
        mpz_class v = ints[static_cast<size_t>(i)] / g * sign;
        if (!v.fits_slong_p())
            throw SizeError("eigenform: entries too large");
        out.values(i) = v.get_si();
    }
    for (i64 q : qs)
        if (brandt_matrix(cls, q) * out.values != out.eigenvalues[q] * out.values)
            throw std::logic_error("eigenform: verification failed");
    return out;
}

mpq_class weighted_degree(RightIdealClassSet const& cls, IntVector const& v)
{
    mpq_class s = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        s += mpq_class(static_cast<long>(v(i))) / cls.weights[static_cast<size_t>(i)];
    return s;
}

IntVector eta_q_apply(RightIdealClassSet const& cls, i64 q, IntVector const& v)
{
    if (cls.order.discriminant() % q == 0)
        throw std::domain_error("eta_q_apply: q must not divide N");
    return brandt_matrix(cls, q) * v - (q + 1) * v;
}

namespace {

/*
 * Degree-zero divisors M0 = {x : sum x = 0} mod p, Hecke acting by B^T, in the basis
 * e_k - e_{h-1}. Returns the projection onto M0 / (sum of images of T_q - a_q).
 */
struct DegreeZeroQuotient
{
    int h = 0;
    IntMatrix proj; // m x (h-1)
    i64 p = 0;

    IntMatrix action(IntMatrix const& B) const
    {
        IntMatrix V = IntMatrix::Zero(h, h - 1);
        for (int k = 0; k < h - 1; ++k) {
            V(k, k) = 1;
            V(h - 1, k) = -1;
        }
        IntMatrix img = B.transpose() * V;
        return reduce_mod(img.topRows(h - 1), p);
    }
};

DegreeZeroQuotient degree_zero_quotient(RightIdealClassSet const& cls, std::vector<std::pair<i64, i64>> const& rel,
                                        i64 p)
{
    DegreeZeroQuotient dq;
    dq.h = cls.size();
    dq.p = p;
    const int m0 = dq.h - 1;
    if (m0 == 0) {
        dq.proj = IntMatrix(0, 0);
        return dq;
    }
    IntMatrix W(m0, static_cast<Eigen::Index>(rel.size()) * m0);
    for (size_t k = 0; k < rel.size(); ++k) {
        IntMatrix A = dq.action(brandt_matrix(cls, rel[k].first));
        A -= rel[k].second * IntMatrix::Identity(m0, m0);
        W.block(0, static_cast<Eigen::Index>(k) * m0, m0, m0) = reduce_mod(A, p);
    }
    IntMatrix left = kernel_mod_p(IntMatrix(W.transpose()), p);
    dq.proj = left.transpose();
    return dq;
}

} // namespace

IsolationReport p_isolation(RightIdealClassSet const& cls, QuaternionicEigenform const& phi, i64 p, i64 q_check)
{
    const int h = cls.size();
    IsolationReport r;
    std::vector<std::pair<i64, i64>> rel;
    for (i64 q : good_primes(cls, q_check)) {
        auto it = phi.eigenvalues.find(q);
        if (it == phi.eigenvalues.end())
            throw std::invalid_argument("p_isolation: eigenvalue missing for q = " + std::to_string(q));
        rel.emplace_back(q, it->second);
    }
    IntMatrix gen(static_cast<Eigen::Index>(rel.size()) * h, h);
    IntMatrix plain(static_cast<Eigen::Index>(rel.size()) * h, h);
    for (size_t k = 0; k < rel.size(); ++k) {
        IntMatrix A = brandt_matrix(cls, rel[k].first) - rel[k].second * IntMatrix::Identity(h, h);
        plain.block(static_cast<Eigen::Index>(k) * h, 0, h, h) = reduce_mod(A, p);
        gen.block(static_cast<Eigen::Index>(k) * h, 0, h, h) = matpow_mod_p(A, h, p);
    }
    r.plain_kernel_dim = h - rank_mod_p(plain, p);
    r.generalized_kernel_dim = h - rank_mod_p(gen, p);
    r.degree_zero_quotient_dim = static_cast<int>(degree_zero_quotient(cls, rel, p).proj.rows());
    r.isolated = r.generalized_kernel_dim == 1 && r.degree_zero_quotient_dim <= 1;
    return r;
}

bool p_isolation_check(RightIdealClassSet const& cls, QuaternionicEigenform const& phi, i64 p, i64 q_check)
{
    return p_isolation(cls, phi, p, q_check).isolated;
}

ComponentRankReport component_group_rank(RightIdealClassSet const& cls, QuaternionicEigenform const& phi,
                                         i64 p, i64 ell, i64 a_ell, i64 q_check)
{
    if (mod(ell, p) == 0 || mod(ell * ell - 1, p) == 0)
        throw std::domain_error("component_group_rank: p divides l(l^2-1)");
    if (mod((ell + 1) * (ell + 1) - a_ell * a_ell, p) != 0)
        throw std::domain_error("component_group_rank: p does not divide (l+1)^2 - a_l^2");
    if (cls.order.discriminant() % ell == 0)
        throw std::domain_error("component_group_rank: l divides N");
    ComponentRankReport r;
    r.epsilon = mod(ell + 1 - a_ell, p) == 0 ? 1 : -1;
    std::vector<std::pair<i64, i64>> rel;
    for (i64 q : good_primes(cls, q_check)) {
        auto it = phi.eigenvalues.find(q);
        if (it == phi.eigenvalues.end())
            throw std::invalid_argument("component_group_rank: eigenvalue missing");
        rel.emplace_back(q, it->second);
    }
    if (ell > q_check)
        rel.emplace_back(ell, a_ell);
    auto dq = degree_zero_quotient(cls, rel, p);
    const Eigen::Index m = dq.proj.rows();
    r.quotient_dim = static_cast<int>(m);
    if (m == 0) {
        r.image_identity = true;
        r.plus_invertible = true;
        return r;
    }
    IntMatrix A = dq.action(brandt_matrix(cls, ell));
    IntMatrix Tbar = matmul_mod_p(matmul_mod_p(dq.proj, A, p), right_inverse_mod_p(dq.proj, p), p);
    IntMatrix U = IntMatrix::Zero(2 * m, 2 * m);
    U.topLeftCorner(m, m) = Tbar;
    U.topRightCorner(m, m) = -IntMatrix::Identity(m, m);
    U.bottomLeftCorner(m, m) = ell * IntMatrix::Identity(m, m);
    U = reduce_mod(U, p);
    IntMatrix I2 = IntMatrix::Identity(2 * m, 2 * m);
    IntMatrix U2 = matmul_mod_p(U, U, p);
    r.rank = static_cast<int>(2 * m) - rank_mod_p(U2 - I2, p);
    IntMatrix minus = reduce_mod(U - r.epsilon * I2, p);
    bool on_diagonal = true;
    for (Eigen::Index c = 0; c < 2 * m; ++c)
        for (Eigen::Index k = 0; k < m; ++k)
            if (mod(minus(k, c) - r.epsilon * minus(m + k, c), p) != 0)
                on_diagonal = false;
    r.image_identity = on_diagonal && rank_mod_p(minus, p) == m;
    r.plus_invertible = rank_mod_p(U + r.epsilon * I2, p) == 2 * m;
    return r;
}

} // namespace qcert
