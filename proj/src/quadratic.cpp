#include "qcert/quadratic.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace qcert {

QuadOrder QuadOrder::make(i64 D, i64 c)
{
    if (D >= 0 || !is_fundamental_discriminant(D))
        throw std::invalid_argument("QuadOrder: D must be a negative fundamental discriminant");
    if (c < 1)
        throw std::invalid_argument("QuadOrder: conductor must be positive");
    i128 disc = static_cast<i128>(c) * c * D;
    if (disc < -(i128{1} << 40))
        throw SizeError("QuadOrder: discriminant too large");
    return QuadOrder{D, c, static_cast<i64>(disc)};
}

bool is_reduced(Form const& f)
{
    if (!(-f.a < f.b && f.b <= f.a && f.a <= f.c))
        return false;
    if (f.a == f.c && f.b < 0)
        return false;
    return true;
}

Form reduce(Form f)
{
    const i64 disc = f.discriminant();
    if (disc >= 0 || f.a <= 0)
        throw std::domain_error("reduce: positive definite form required");
    while (true) {
        // b into (-a, a]
        i64 k = floor_div(f.a - f.b, 2 * f.a);
        f.b += 2 * k * f.a;
        f.c = static_cast<i64>((static_cast<i128>(f.b) * f.b - disc) / (4 * static_cast<i128>(f.a)));
        if (f.a > f.c) {
            f = Form{f.c, -f.b, f.a};
            continue;
        }
        if (f.a == f.c && f.b < 0)
            f.b = -f.b;
        return f;
    }
}

Form compose(Form const& f, Form const& g)
{
    const i64 disc = f.discriminant();
    if (g.discriminant() != disc)
        throw std::domain_error("compose: discriminants differ");
    i64 s = (f.b + g.b) / 2;
    i64 u, v, x, y;
    i64 g1 = ext_gcd(f.a, g.a, u, v);
    i64 e = ext_gcd(g1, s, x, y);
    i128 mu = static_cast<i128>(x) * u, nu = static_cast<i128>(x) * v, omega = y;
    i128 A = static_cast<i128>(f.a) / e * (g.a / e);
    i128 num = mu * f.a * g.b + nu * g.a * f.b + omega * ((static_cast<i128>(f.b) * g.b + disc) / 2);
    i128 B = num / e;
    i128 two_a = 2 * A;
    B %= two_a;
    if (B < 0)
        B += two_a;
    i128 cnum = B * B - disc;
    if (cnum % (4 * A) != 0)
        throw std::logic_error("compose: inconsistent result");
    return Form{static_cast<i64>(A), static_cast<i64>(B), static_cast<i64>(cnum / (4 * A))};
}

std::vector<Form> reduced_forms(i64 disc)
{
    if (disc >= 0 || mod(disc, 4) > 1)
        throw std::domain_error("reduced_forms: negative discriminant = 0,1 mod 4 required");
    std::vector<Form> out;
    i64 amax = isqrt(-disc / 3);
    for (i64 a = 1; a <= amax; ++a) {
        for (i64 b = -a + 1; b <= a; ++b) {
            if (mod(b - disc, 2) != 0)
                continue;
            i64 num = b * b - disc;
            if (num % (4 * a) != 0)
                continue;
            i64 c = num / (4 * a);
            Form f{a, b, c};
            if (!is_reduced(f))
                continue;
            if (std::gcd(std::gcd(a, std::llabs(b)), c) != 1)
                continue;
            out.push_back(f);
        }
    }
    return out;
}

FormClassGroup::FormClassGroup(QuadOrder order) : order_(order)
{
    classes_ = reduced_forms(order_.disc);
    const size_t h = classes_.size();
    table_.assign(h, std::vector<int>(h, 0));
    inverse_.assign(h, 0);
    for (size_t i = 0; i < h; ++i) {
        for (size_t j = i; j < h; ++j) {
            int k = index_of(compose(classes_[i], classes_[j]));
            table_[i][j] = table_[j][i] = k;
        }
        Form const& f = classes_[i];
        inverse_[i] = index_of(Form{f.a, -f.b, f.c});
    }
}

int FormClassGroup::index_of(Form const& f) const
{
    if (f.discriminant() != order_.disc)
        throw std::domain_error("index_of: wrong discriminant");
    Form r = reduce(f);
    auto it = std::lower_bound(classes_.begin(), classes_.end(), r,
                               [](Form const& x, Form const& y) {
                                   return std::tie(x.a, x.b) < std::tie(y.a, y.b);
                               });
    if (it == classes_.end() || *it != r)
        throw std::domain_error("index_of: form not primitive");
    return static_cast<int>(it - classes_.begin());
}

int FormClassGroup::power(int i, i64 k) const
{
    k = mod(k, element_order(i));
    int r = identity();
    for (i64 t = 0; t < k; ++t)
        r = mul(r, i);
    return r;
}

int FormClassGroup::element_order(int i) const
{
    int r = i, n = 1;
    while (r != identity()) {
        r = mul(r, i);
        ++n;
    }
    return n;
}

int FormClassGroup::exponent() const
{
    i64 e = 1;
    for (int i = 0; i < size(); ++i)
        e = std::lcm(e, static_cast<i64>(element_order(i)));
    return static_cast<int>(e);
}

FormClassGroup class_group(QuadOrder const& order)
{
    return FormClassGroup(order);
}

namespace {

i64 fundamental_class_number(i64 D)
{
    static std::map<i64, i64> cache;
    static std::mutex guard;
    {
        std::lock_guard lock(guard);
        if (auto it = cache.find(D); it != cache.end())
            return it->second;
    }
    i64 n = -D;
    i64 w = D == -3 ? 6 : D == -4 ? 4 : 2;
    i64 s = 0;
    for (i64 a = 1; a < n; ++a)
        s += kronecker(D, a) * a;
    // h = -(w / 2|D|) s
    i64 h = -(w * s) / (2 * n);
    if (h * 2 * n != -(w * s))
        throw std::logic_error("class number sum not integral");
    std::lock_guard lock(guard);
    cache[D] = h;
    return h;
}

} // namespace

i64 class_number_formula(i64 D, i64 c)
{
    if (c < 1)
        throw std::domain_error("class_number_formula: c >= 1");
    i64 h = fundamental_class_number(D);
    if (c == 1)
        return h;
    i64 num = h;
    for (auto const& f : factorize(c).factors) {
        for (int e = 1; e < f.exponent; ++e)
            num *= f.prime;
        num *= f.prime - kronecker(D, f.prime);
    }
    i64 unit_index = D == -3 ? 3 : D == -4 ? 2 : 1;
    if (num % unit_index != 0)
        throw std::logic_error("class_number_formula: non-integral");
    return num / unit_index;
}

RingClassCharacter RingClassCharacter::inverse() const
{
    RingClassCharacter r = *this;
    for (auto& e : r.exponents)
        e = static_cast<int>(mod(-e, n));
    return r;
}

namespace {

RingClassCharacter normalize_character(std::vector<i64> const& vals, i64 modulus)
{
    i64 g = modulus;
    for (i64 v : vals)
        g = std::gcd(g, mod(v, modulus));
    RingClassCharacter r;
    r.n = static_cast<int>(modulus / g);
    for (i64 v : vals)
        r.exponents.push_back(static_cast<int>(mod(v, modulus) / g));
    return r;
}

} // namespace

std::vector<RingClassCharacter> characters(FormClassGroup const& g)
{
    const int h = g.size();
    const i64 e = g.exponent();
    // subgroup H as a membership list and the characters on it (values mod e)
    std::vector<int> members{g.identity()};
    std::vector<bool> in_h(static_cast<size_t>(h), false);
    in_h[static_cast<size_t>(g.identity())] = true;
    std::vector<std::vector<i64>> chars{std::vector<i64>(static_cast<size_t>(h), 0)};
    while (static_cast<int>(members.size()) < h) {
        int gen = 0;
        while (in_h[static_cast<size_t>(gen)])
            ++gen;
        int m = 1;
        int gm = gen;
        while (!in_h[static_cast<size_t>(gm)]) {
            gm = g.mul(gm, gen);
            ++m;
        }
        std::vector<std::vector<i64>> next;
        for (auto const& chi : chars) {
            i64 v = chi[static_cast<size_t>(gm)];
            if (v % m != 0)
                throw std::logic_error("characters: extension obstruction");
            for (int t = 0; t < m; ++t) {
                i64 y = mod(v / m + t * (e / m), e);
                std::vector<i64> ext = chi;
                int gk = g.identity();
                for (int k = 0; k < m; ++k) {
                    for (int hm : members) {
                        int elt = g.mul(hm, gk);
                        ext[static_cast<size_t>(elt)] = mod(chi[static_cast<size_t>(hm)] + k * y, e);
                    }
                    gk = g.mul(gk, gen);
                }
                next.push_back(std::move(ext));
            }
        }
        std::vector<int> grown;
        int gk = g.identity();
        for (int k = 0; k < m; ++k) {
            for (int hm : members)
                grown.push_back(g.mul(hm, gk));
            gk = g.mul(gk, gen);
        }
        members = std::move(grown);
        for (int x : members)
            in_h[static_cast<size_t>(x)] = true;
        chars = std::move(next);
    }
    std::vector<RingClassCharacter> out;
    for (auto const& chi : chars)
        out.push_back(normalize_character(chi, e));
    std::sort(out.begin(), out.end(), [](RingClassCharacter const& a, RingClassCharacter const& b) {
        return std::tie(a.n, a.exponents) < std::tie(b.n, b.exponents);
    });
    return out;
}

RingClassCharacter character_from_exponents(FormClassGroup const& g, std::vector<i64> const& exps,
                                            i64 modulus)
{
    if (static_cast<int>(exps.size()) != g.size() || modulus < 1)
        throw std::invalid_argument("character: one exponent per class required");
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.size(); ++j)
            if (mod(exps[static_cast<size_t>(i)] + exps[static_cast<size_t>(j)] -
                        exps[static_cast<size_t>(g.mul(i, j))],
                    modulus) != 0)
                throw std::invalid_argument("character: exponent map is not a homomorphism");
    return normalize_character(exps, modulus);
}

FrobeniusClass frobenius_class(FormClassGroup const& g, i64 q)
{
    auto const& o = g.order();
    if (o.c % q == 0)
        throw BadPrime("frobenius_class: q divides the conductor");
    int k = kronecker(o.D, q);
    if (k == 0)
        return {FrobeniusClass::Kind::Ramified, -1};
    if (k == -1)
        return {FrobeniusClass::Kind::Inert, -1};
    const i64 disc = o.disc;
    for (i64 b = 0; b <= q; ++b) {
        if (mod(b - disc, 2) != 0)
            continue;
        i128 num = static_cast<i128>(b) * b - disc;
        if (num % (4 * q) == 0)
            return {FrobeniusClass::Kind::Split, g.index_of(Form{q, b, static_cast<i64>(num / (4 * q))})};
    }
    throw std::logic_error("frobenius_class: no square root found for a split prime");
}

int residue_degree_in_Hc(FormClassGroup const& g, i64 q)
{
    auto fc = frobenius_class(g, q);
    switch (fc.kind) {
    case FrobeniusClass::Kind::Inert: return 2;
    case FrobeniusClass::Kind::Split: return g.element_order(fc.class_index);
    case FrobeniusClass::Kind::Ramified: break;
    }
    throw std::domain_error("residue_degree_in_Hc: q ramified in K");
}

// ---------------------------------------------------------------------------

namespace {

std::vector<i64> reduce_by_cyclotomic(std::vector<i64> v, int n)
{
    auto phi = cyclotomic_polynomial(n);
    const int d = static_cast<int>(phi.size()) - 1;
    for (int k = static_cast<int>(v.size()) - 1; k >= d; --k) {
        i64 c = v[static_cast<size_t>(k)];
        if (c == 0)
            continue;
        for (int j = 0; j <= d; ++j)
            v[static_cast<size_t>(k - d + j)] -= c * phi[static_cast<size_t>(j)];
    }
    v.resize(static_cast<size_t>(d), 0);
    return v;
}

void check_order(int n)
{
    if (n < 1 || n > kMaxCyclotomicOrder)
        throw SizeError("cyclotomic order out of range");
}

} // namespace

CyclotomicValue CyclotomicValue::zero(int n)
{
    check_order(n);
    return CyclotomicValue{n, std::vector<i64>(static_cast<size_t>(euler_phi(n)), 0)};
}

CyclotomicValue CyclotomicValue::from_powers(int n, std::vector<i64> const& weights)
{
    check_order(n);
    std::vector<i64> v(static_cast<size_t>(n), 0);
    for (size_t k = 0; k < weights.size(); ++k)
        v[k % static_cast<size_t>(n)] += weights[k];
    return CyclotomicValue{n, reduce_by_cyclotomic(std::move(v), n)};
}

bool CyclotomicValue::is_zero() const
{
    return std::all_of(coeffs.begin(), coeffs.end(), [](i64 c) { return c == 0; });
}

CyclotomicValue CyclotomicValue::conjugate() const
{
    std::vector<i64> w(static_cast<size_t>(n), 0);
    for (size_t k = 0; k < coeffs.size(); ++k)
        w[static_cast<size_t>(mod(-static_cast<i64>(k), n))] += coeffs[k];
    return from_powers(n, w);
}

CyclotomicValue CyclotomicValue::embed(int m) const
{
    if (m % n != 0)
        throw std::domain_error("embed: n must divide m");
    std::vector<i64> w(static_cast<size_t>(m), 0);
    for (size_t k = 0; k < coeffs.size(); ++k)
        w[k * static_cast<size_t>(m / n) % static_cast<size_t>(m)] += coeffs[k];
    return from_powers(m, w);
}

CyclotomicValue operator+(CyclotomicValue const& x, CyclotomicValue const& y)
{
    if (x.n != y.n)
        throw std::domain_error("cyclotomic add: orders differ");
    CyclotomicValue r = x;
    for (size_t k = 0; k < r.coeffs.size(); ++k)
        r.coeffs[k] += y.coeffs[k];
    return r;
}

std::string CyclotomicValue::to_string() const
{
    std::ostringstream os;
    bool first = true;
    for (size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0)
            continue;
        if (!first)
            os << (coeffs[k] > 0 ? " + " : " - ");
        else if (coeffs[k] < 0)
            os << "-";
        first = false;
        i64 a = std::llabs(coeffs[k]);
        if (k == 0 || a != 1)
            os << a;
        if (k >= 1)
            os << (a != 1 ? "*" : "") << "z";
        if (k >= 2)
            os << "^" << k;
    }
    return first ? "0" : os.str();
}

std::vector<PrimeAbove> primes_above(int n, i64 p)
{
    check_order(n);
    if (n % p == 0)
        throw std::domain_error("primes_above: p ramified in Z[zeta_n]");
    PolyModP phi(cyclotomic_polynomial(n), p);
    std::vector<PrimeAbove> out;
    for (auto const& f : poly_factor_mod_p(phi)) {
        if (f.multiplicity != 1)
            throw std::logic_error("primes_above: Phi_n not squarefree mod p");
        out.push_back(PrimeAbove{p, n, f.factor, f.factor.degree()});
    }
    return out;
}

std::optional<PrimeAbove> choose_prime_above(int n, i64 p,
                                             std::function<bool(PrimeAbove const&)> const& reject)
{
    for (auto& pr : primes_above(n, p))
        if (!reject || !reject(pr))
            return pr;
    return std::nullopt;
}

PolyModP reduce_cyclotomic(CyclotomicValue const& x, PrimeAbove const& prime)
{
    if (x.n != prime.n)
        throw std::domain_error("reduce_cyclotomic: mismatched n");
    return PolyModP(x.coeffs, prime.p) % prime.factor;
}

} // namespace qcert
