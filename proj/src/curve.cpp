#include "qcert/curve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace qcert {

namespace {

i128 checked_mul(i128 a, i128 b)
{
    i128 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw SizeError("curve invariant overflow");
    return r;
}

i128 checked_add(i128 a, i128 b)
{
    i128 r;
    if (__builtin_add_overflow(a, b, &r))
        throw SizeError("curve invariant overflow");
    return r;
}

i128 mul(std::initializer_list<i128> xs)
{
    i128 r = 1;
    for (auto x : xs)
        r = checked_mul(r, x);
    return r;
}

i128 sum(std::initializer_list<i128> xs)
{
    i128 r = 0;
    for (auto x : xs)
        r = checked_add(r, x);
    return r;
}

} // namespace

WeierstrassInvariants weierstrass_invariants(std::array<i64, 5> const& a)
{
    const i128 a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3], a6 = a[4];
    WeierstrassInvariants w{};
    w.b2 = sum({mul({a1, a1}), mul({4, a2})});
    w.b4 = sum({mul({2, a4}), mul({a1, a3})});
    w.b6 = sum({mul({a3, a3}), mul({4, a6})});
    w.b8 = sum({mul({a1, a1, a6}), mul({4, a2, a6}), -mul({a1, a3, a4}), mul({a2, a3, a3}),
                -mul({a4, a4})});
    w.c4 = sum({mul({w.b2, w.b2}), -mul({24, w.b4})});
    w.c6 = sum({-mul({w.b2, w.b2, w.b2}), mul({36, w.b2, w.b4}), -mul({216, w.b6})});
    w.discriminant = sum({-mul({w.b2, w.b2, w.b8}), -mul({8, w.b4, w.b4, w.b4}),
                          -mul({27, w.b6, w.b6}), mul({9, w.b2, w.b4, w.b6})});
    return w;
}

CurveModel CurveModel::make(std::string label, std::array<i64, 5> const& a, i64 conductor,
                            std::optional<i64> modular_degree)
{
    CurveModel e;
    e.label = std::move(label);
    e.a = a;
    auto w = weierstrass_invariants(a);
    if (w.discriminant == 0)
        throw std::invalid_argument(e.label + ": singular model");
    e.discriminant = w.discriminant;
    if (conductor < 1)
        throw std::invalid_argument(e.label + ": conductor must be positive");
    e.conductor = factorize(conductor);
    i128 rest = w.discriminant < 0 ? -w.discriminant : w.discriminant;
    for (auto const& f : e.conductor.factors) {
        if (rest % f.prime != 0)
            throw std::invalid_argument(e.label + ": conductor prime " + std::to_string(f.prime) +
                                        " does not divide the discriminant");
        while (rest % f.prime == 0)
            rest /= f.prime;
        int cap = f.prime == 2 ? 8 : f.prime == 3 ? 5 : 2;
        if (f.exponent > cap)
            throw std::invalid_argument(e.label + ": conductor exponent too large at " +
                                        std::to_string(f.prime));
        bool multiplicative = w.c4 % f.prime != 0;
        if (multiplicative != (f.exponent == 1))
            throw std::invalid_argument(e.label + ": conductor exponent inconsistent with reduction at " +
                                        std::to_string(f.prime));
    }
    if (rest != 1)
        throw std::invalid_argument(e.label + ": discriminant has primes outside the conductor");
    if (modular_degree && *modular_degree < 1)
        throw std::invalid_argument(e.label + ": modular degree must be positive");
    e.modular_degree = modular_degree;
    return e;
}

i64 count_points_naive(std::array<i64, 5> const& a, i64 q)
{
    std::array<i64, 5> r{};
    for (int k = 0; k < 5; ++k)
        r[static_cast<size_t>(k)] = mod(a[static_cast<size_t>(k)], q);
    i64 count = 1; // point at infinity
    for (i64 x = 0; x < q; ++x) {
        i64 rhs = (mulmod(mulmod(x, x, q), x, q) + mulmod(r[1], mulmod(x, x, q), q) +
                   mulmod(r[3], x, q) + r[4]) % q;
        for (i64 y = 0; y < q; ++y) {
            i64 lhs = (mulmod(y, y, q) + mulmod(r[0], mulmod(x, y, q), q) + mulmod(r[2], y, q)) % q;
            if (lhs == rhs)
                ++count;
        }
    }
    return count;
}

namespace {

i64 trace_by_legendre(CurveModel const& e, i64 q)
{
    auto w = weierstrass_invariants(e.a);
    i64 b2 = mod(static_cast<i64>(w.b2 % q), q);
    i64 b4 = mod(static_cast<i64>(w.b4 % q), q);
    i64 b6 = mod(static_cast<i64>(w.b6 % q), q);
    std::vector<signed char> chi(static_cast<size_t>(q), -1);
    chi[0] = 0;
    for (i64 x = 1; x < q; ++x)
        chi[static_cast<size_t>(x * x % q)] = 1;
    i64 s = 0;
    for (i64 x = 0; x < q; ++x) {
        i64 f = (4 * mulmod(mulmod(x, x, q), x, q) + mulmod(b2, mulmod(x, x, q), q) +
                 mulmod(2 * b4, x, q) + b6) % q;
        s += chi[static_cast<size_t>(f)];
    }
    return -s;
}

// y^2 = x^3 + A x + B over F_q, affine points; infinity flagged
struct Point
{
    i64 x = 0, y = 0;
    bool inf = true;
    bool operator==(Point const& o) const
    {
        return inf == o.inf && (inf || (x == o.x && y == o.y));
    }
};

struct ShortCurve
{
    i64 A, B, q;

    Point add(Point const& P, Point const& Q) const
    {
        if (P.inf)
            return Q;
        if (Q.inf)
            return P;
        i64 lambda;
        if (P.x == Q.x) {
            if (mod(P.y + Q.y, q) == 0)
                return Point{};
            lambda = mulmod(mod(3 * mulmod(P.x, P.x, q) + A, q), invmod(2 * P.y, q), q);
        } else {
            lambda = mulmod(mod(Q.y - P.y, q), invmod(mod(Q.x - P.x, q), q), q);
        }
        i64 x3 = mod(mulmod(lambda, lambda, q) - P.x - Q.x, q);
        i64 y3 = mod(mulmod(lambda, mod(P.x - x3, q), q) - P.y, q);
        return Point{x3, y3, false};
    }

    Point neg(Point const& P) const { return P.inf ? P : Point{P.x, mod(-P.y, q), false}; }

    Point mul(Point P, i64 k) const
    {
        if (k < 0)
            return mul(neg(P), -k);
        Point R{};
        while (k) {
            if (k & 1)
                R = add(R, P);
            P = add(P, P);
            k >>= 1;
        }
        return R;
    }

    std::optional<Point> random_point(std::mt19937_64& rng) const
    {
        for (int t = 0; t < 1000; ++t) {
            i64 x = static_cast<i64>(rng() % static_cast<u64>(q));
            i64 rhs = mod(mulmod(mulmod(x, x, q), x, q) + mulmod(A, x, q) + B, q);
            auto y = sqrt_mod(rhs, q);
            if (y)
                return Point{x, *y, false};
        }
        return std::nullopt;
    }

    /* all m in [lo, hi] with m P = O, by baby-step giant-step */
    std::vector<i64> orders_in(Point const& P, i64 lo, i64 hi) const
    {
        i64 width = hi - lo + 1;
        i64 s = static_cast<i64>(std::ceil(std::sqrt(static_cast<double>(width)))) + 1;
        std::unordered_multimap<i64, std::pair<i64, Point>> baby;
        Point jP{};
        for (i64 j = 0; j < s; ++j) {
            baby.emplace(jP.inf ? -1 : jP.x, std::make_pair(j, jP));
            jP = add(jP, P);
        }
        Point sP = mul(P, s);
        Point R = neg(mul(P, lo)); // -(lo + i s) P
        Point negsP = neg(sP);
        std::vector<i64> out;
        for (i64 i = 0; i * s < width; ++i) {
            auto range = baby.equal_range(R.inf ? -1 : R.x);
            for (auto it = range.first; it != range.second; ++it) {
                if (it->second.second == R) {
                    i64 m = lo + i * s + it->second.first;
                    if (m <= hi)
                        out.push_back(m);
                }
            }
            R = add(R, negsP);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

i64 trace_by_bsgs(CurveModel const& e, i64 q)
{
    auto w = weierstrass_invariants(e.a);
    // y^2 = x^3 - 27 c4 x - 54 c6
    i64 c4 = mod(static_cast<i64>(w.c4 % q), q);
    i64 c6 = mod(static_cast<i64>(w.c6 % q), q);
    ShortCurve E{mod(-27 * c4, q), mod(-54 * c6, q), q};
    i64 d = 2;
    while (kronecker(d, q) != -1)
        ++d;
    ShortCurve T{mulmod(E.A, mulmod(d, d, q), q), mulmod(E.B, mulmod(mulmod(d, d, q), d, q), q), q};
    i64 bound = 2 * isqrt(q) + 2;
    std::vector<i64> candidates;
    for (i64 a = -bound; a <= bound; ++a)
        if (static_cast<i128>(a) * a <= 4 * static_cast<i128>(q))
            candidates.push_back(a);
    std::mt19937_64 rng(static_cast<u64>(q) * 7919u);
    for (int round = 0; round < 64 && candidates.size() > 1; ++round) {
        bool twist = round % 2 == 1;
        ShortCurve const& C = twist ? T : E;
        auto P = C.random_point(rng);
        if (!P)
            continue;
        auto orders = C.orders_in(*P, q + 1 - bound, q + 1 + bound);
        std::vector<i64> keep;
        for (i64 a : candidates) {
            i64 order = twist ? q + 1 + a : q + 1 - a;
            if (std::binary_search(orders.begin(), orders.end(), order))
                keep.push_back(a);
        }
        candidates = std::move(keep);
    }
    if (candidates.size() != 1)
        throw std::logic_error("trace_by_bsgs: could not isolate the group order at q=" + std::to_string(q));
    return candidates.front();
}

} // namespace

namespace detail {
i64 trace_legendre(CurveModel const& e, i64 q) { return trace_by_legendre(e, q); }
i64 trace_bsgs(CurveModel const& e, i64 q) { return trace_by_bsgs(e, q); }
} // namespace detail

i64 trace_of_frobenius(CurveModel const& e, i64 q)
{
    if (!is_prime(q))
        throw std::domain_error("trace_of_frobenius: q must be prime");
    if (!e.good_at(q))
        throw BadReduction(e.label + ": bad reduction at " + std::to_string(q));
    if (q > kTraceLimit)
        throw SizeLimit("trace_of_frobenius: q exceeds " + std::to_string(kTraceLimit));
    i64 a;
    if (q == 2)
        a = q + 1 - count_points_naive(e.a, q);
    else if (q <= kNaiveCountLimit)
        a = trace_by_legendre(e, q);
    else
        a = trace_by_bsgs(e, q);
    if (static_cast<i128>(a) * a > 4 * static_cast<i128>(q))
        throw std::logic_error("trace_of_frobenius: Hasse bound violated");
    return a;
}

std::string to_string(ReductionKind k)
{
    switch (k) {
    case ReductionKind::Good: return "good";
    case ReductionKind::SplitMultiplicative: return "split_multiplicative";
    case ReductionKind::NonsplitMultiplicative: return "nonsplit_multiplicative";
    case ReductionKind::Additive: return "additive";
    }
    return "?";
}

ReductionData reduction_data(CurveModel const& e, i64 q)
{
    if (e.good_at(q))
        throw GoodReduction(e.label + ": good reduction at " + std::to_string(q));
    auto w = weierstrass_invariants(e.a);
    ReductionData r{q, ReductionKind::Additive, valuation(w.discriminant, q)};
    if (w.c4 % q != 0) {
        bool split;
        if (q == 2) {
            split = (q + 1 - count_points_naive(e.a, q)) == 1;
        } else {
            i64 c6 = mod(static_cast<i64>((-w.c6) % q), q);
            split = kronecker(c6, q) == 1;
        }
        r.kind = split ? ReductionKind::SplitMultiplicative : ReductionKind::NonsplitMultiplicative;
    }
    return r;
}

SurjectivityResult surjectivity_witness(CurveModel const& e, i64 p, i64 ell_bound)
{
    if (p < 5 || !is_prime(p))
        throw std::domain_error("surjectivity_witness: p must be a prime >= 5");
    SurjectivityResult r;
    for (i64 l : primes_up_to(std::min(ell_bound, kTraceLimit))) {
        if (l == p || !e.good_at(l))
            continue;
        i64 a = mod(trace_of_frobenius(e, l), p);
        i64 lp = mod(l, p);
        if (a != 0) {
            i64 disc = mod(mulmod(a, a, p) - 4 * lp, p);
            if (disc != 0) {
                if (kronecker(disc, p) == 1)
                    r.split_witnesses.push_back(l);
                else
                    r.nonsplit_witnesses.push_back(l);
            }
        }
        i64 u = mulmod(mulmod(a, a, p), invmod(lp, p), p);
        if (u != 0 && u != 1 && u != 2 && u != 4 && mod(mulmod(u, u, p) - 3 * u + 1, p) != 0)
            r.exceptional_witnesses.push_back(l);
    }
    r.surjective = !r.split_witnesses.empty() && !r.nonsplit_witnesses.empty() &&
                   !r.exceptional_witnesses.empty();
    return r;
}

std::string to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::Verified: return "verified";
    case CheckStatus::Failed: return "failed";
    case CheckStatus::Undetermined: return "undetermined";
    }
    return "?";
}

LocalTorsionResult local_torsion_pfree(CurveModel const& e, i64 q, int f, i64 p)
{
    if (p < 5 || p == q || f < 1)
        throw std::domain_error("local_torsion_pfree: needs p >= 5, p != q, f >= 1");
    auto rd = reduction_data(e, q);
    LocalTorsionResult r{CheckStatus::Undetermined, rd.kind, 0, 0};
    i128 qf = 1;
    bool fits = true;
    for (int k = 0; k < f; ++k) {
        qf *= q;
        if (qf > (i128{1} << 62)) {
            fits = false;
            break;
        }
    }
    i64 qf_mod_p = powmod(q, static_cast<u64>(f), p);
    i64 ns_mod_p;
    switch (rd.kind) {
    case ReductionKind::Additive:
        r.component_bound = 4;
        r.nonsingular_order = fits ? static_cast<i64>(qf) : 0;
        ns_mod_p = qf_mod_p;
        break;
    case ReductionKind::SplitMultiplicative:
    case ReductionKind::NonsplitMultiplicative: {
        r.component_bound = rd.v_disc;
        bool split_here = rd.kind == ReductionKind::SplitMultiplicative || f % 2 == 0;
        i64 delta = split_here ? -1 : 1;
        r.nonsingular_order = fits ? static_cast<i64>(qf + delta) : 0;
        ns_mod_p = mod(qf_mod_p + delta, p);
        break;
    }
    default: throw std::logic_error("unreachable");
    }
    bool clean = r.component_bound % p != 0 && ns_mod_p != 0;
    r.status = clean ? CheckStatus::Verified : CheckStatus::Undetermined;
    return r;
}

} // namespace qcert
