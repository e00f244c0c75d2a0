#include "qcert/gross.hpp"

#include "qcert/lattice.hpp"

#include <numeric>

namespace qcert {

namespace {

i64 omega_trace(QuadOrder const& O)
{
    return O.c * O.D;
}

i64 omega_norm(QuadOrder const& O)
{
    return O.c * O.c * (O.D * O.D - O.D) / 4;
}

RatVector solve(RatMatrix a, RatVector b)
{
    const Eigen::Index n = a.rows();
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index piv = c;
        while (piv < n && a(piv, c) == 0)
            ++piv;
        if (piv == n)
            throw std::domain_error("solve: singular system");
        a.row(c).swap(a.row(piv));
        std::swap(b(c), b(piv));
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == c || a(r, c) == 0)
                continue;
            mpq_class f = a(r, c) / a(c, c);
            a.row(r) -= f * a.row(c);
            b(r) -= f * b(c);
        }
    }
    RatVector x(n);
    for (Eigen::Index r = 0; r < n; ++r)
        x(r) = b(r) / a(r, r);
    return x;
}

/* all y in the lattice (rows of L, R-coordinates) with trd y = t and 2 nrd y = two_n */
void trace_slice(EichlerOrder const& R, Mat4 const& L, i64 t, i64 two_n,
                 std::function<bool(Vec4 const&)> const& visit)
{
    IntVector row = L * R.trace;
    RowKernel rk = integer_row_kernel(row);
    if (rk.gcd == 0 || t % rk.gcd != 0)
        return;
    IntVector z0 = rk.particular * (t / rk.gcd);
    IntMatrix A = L * R.gram * L.transpose();
    RatMatrix K = to_rational(rk.kernel);
    RatMatrix Ar = to_rational(A);
    RatVector z0r = to_rational(z0);
    RatMatrix Q = K.transpose() * Ar * K;
    RatVector center = solve(Q, -(K.transpose() * Ar * z0r));
    mpq_class base = (z0r.transpose() * Ar * z0r)(0, 0);
    mpq_class shift = (center.transpose() * Q * center)(0, 0);
    mpq_class bound = mpq_class(static_cast<long>(two_n)) - base + shift;
    if (bound < 0)
        return;
    enumerate_ellipsoid(Q, center, bound, [&](IntVector const& u, mpq_class const& value) {
        if (value != bound)
            return true;
        IntVector z = z0 + rk.kernel * u;
        Vec4 y = (z.transpose() * L).transpose();
        return visit(y);
    });
}

/* lattice I conj(I) of N(I) O_l(I) */
Mat4 left_order_lattice(RightIdealClassSet const& cls, int i)
{
    auto const& I = cls.ideals[static_cast<size_t>(i)];
    return product_with_conjugate(cls.order, I, I);
}

bool optimal_at(RightIdealClassSet const& cls, Mat4 const& L, int i, Vec4 const& y, i64 m)
{
    const i64 n = cls.ideals[static_cast<size_t>(i)].norm;
    Mat4 scaled = m * L;
    for (i64 r = 0; r < m; ++r)
        if (hnf_contains(scaled, y - r * n * cls.order.one))
            return false;
    return true;
}

} // namespace

void check_heegner_hypothesis(EichlerOrder const& R, QuadOrder const& O)
{
    const i64 N = R.discriminant();
    if (std::gcd(O.c, N) != 1 || std::gcd(O.D, N) != 1)
        throw HeegnerHypothesisViolated("c and D must be prime to the level");
    for (i64 q : factorize(R.n_minus).primes())
        if (kronecker(O.D, q) != -1)
            throw HeegnerHypothesisViolated("prime " + std::to_string(q) + " | N- is not inert in K");
    for (auto const& f : factorize(R.level).factors)
        if (kronecker(O.D, f.prime) != 1)
            throw HeegnerHypothesisViolated("prime " + std::to_string(f.prime) + " | N+ does not split in K");
}

std::vector<OptimalEmbedding> optimal_embeddings(RightIdealClassSet const& cls, QuadOrder const& O,
                                                 int class_index, size_t limit)
{
    std::vector<OptimalEmbedding> out;
    const i64 n = cls.ideals[static_cast<size_t>(class_index)].norm;
    const Mat4 L = left_order_lattice(cls, class_index);
    const auto cprimes = factorize(O.c).primes();
    const i64 t = omega_trace(O), nm = omega_norm(O);
    trace_slice(cls.order, L, n * t, 2 * n * n * nm, [&](Vec4 const& y) {
        for (i64 m : cprimes)
            if (!optimal_at(cls, L, class_index, y, m))
                return true;
        out.push_back(OptimalEmbedding{O, class_index, y, t, nm});
        return out.size() < limit;
    });
    return out;
}

OptimalEmbedding optimal_embedding(RightIdealClassSet const& cls, QuadOrder const& O)
{
    check_heegner_hypothesis(cls.order, O);
    for (int i = 0; i < cls.size(); ++i) {
        auto found = optimal_embeddings(cls, O, i, 1);
        if (!found.empty())
            return found.front();
    }
    throw EmbeddingNotFound("no optimal embedding of the quadratic order into any left order");
}

bool is_optimal(RightIdealClassSet const& cls, OptimalEmbedding const& emb)
{
    auto const& R = cls.order;
    const i64 n = cls.ideals[static_cast<size_t>(emb.class_index)].norm;
    const Mat4 L = left_order_lattice(cls, emb.class_index);
    if (!hnf_contains(L, emb.image))
        return false;
    if (R.trd(emb.image) != n * emb.omega_trace || R.nrd(emb.image) != n * n * emb.omega_norm)
        return false;
    for (i64 m : factorize(emb.quad_order.c).primes())
        if (!optimal_at(cls, L, emb.class_index, emb.image, m))
            return false;
    return true;
}

RightIdeal lift_form(RightIdealClassSet const& cls, OptimalEmbedding const& emb, Form const& f)
{
    auto const& R = cls.order;
    auto const& I = cls.ideals[static_cast<size_t>(emb.class_index)];
    const QuadOrder& O = emb.quad_order;
    if (f.discriminant() != O.disc || f.a <= 0)
        throw std::domain_error("lift_form: form of the wrong discriminant");
    // (-b + c sqrt D)/2 = omega - k
    const i64 k = (f.b + O.c * O.D) / 2;
    const i64 n = I.norm;
    std::vector<Vec4> gens;
    for (int s = 0; s < 4; ++s) {
        Vec4 b = I.basis.row(s).transpose();
        gens.push_back(f.a * b);
        Vec4 yb = R.mul(emb.image, b) - k * n * b;
        for (int t = 0; t < 4; ++t)
            if (yb(t) % n != 0)
                throw std::logic_error("lift_form: embedding does not preserve I");
        gens.push_back(yb / n);
    }
    RightIdeal J = ideal_from_generators(R, gens, f.a * n);
    if (J.norm != f.a * n)
        throw std::logic_error("lift_form: unexpected ideal norm");
    return J;
}

GrossVector psi_hat(RightIdealClassSet const& cls, OptimalEmbedding const& emb, FormClassGroup const& g)
{
    if (g.order().disc != emb.quad_order.disc)
        throw std::domain_error("psi_hat: class group of a different order");
    GrossVector gv{emb, {}};
    for (int s = 0; s < g.size(); ++s)
        gv.map.push_back(locate_class(cls, lift_form(cls, emb, g.form(s))));
    return gv;
}

CyclotomicValue algebraic_special_value(IntVector const& phi, GrossVector const& gv,
                                        RingClassCharacter const& chi)
{
    if (chi.exponents.size() != gv.map.size())
        throw std::domain_error("algebraic_special_value: character of a different class group");
    std::vector<i64> w(static_cast<size_t>(chi.n), 0);
    for (size_t s = 0; s < gv.map.size(); ++s)
        w[static_cast<size_t>(mod(-chi.exponents[s], chi.n))] += phi(gv.map[s]);
    return CyclotomicValue::from_powers(chi.n, w);
}

bool nonvanishing_mod(CyclotomicValue const& L, PrimeAbove const& prime)
{
    return !reduce_cyclotomic(L, prime).is_zero();
}

} // namespace qcert
