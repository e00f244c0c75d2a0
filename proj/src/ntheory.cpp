#include "qcert/ntheory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

namespace qcert {

std::vector<i64> FactoredInteger::primes() const
{
    std::vector<i64> out;
    out.reserve(factors.size());
    for (auto const& f : factors)
        out.push_back(f.prime);
    return out;
}

bool FactoredInteger::is_squarefree() const
{
    return std::all_of(factors.begin(), factors.end(),
                       [](PrimePower const& f) { return f.exponent == 1; });
}

int FactoredInteger::valuation(i64 q) const
{
    for (auto const& f : factors)
        if (f.prime == q)
            return f.exponent;
    return 0;
}

i64 FactoredInteger::product() const
{
    i64 r = 1;
    for (auto const& f : factors)
        for (int e = 0; e < f.exponent; ++e)
            r *= f.prime;
    return r;
}

i64 mod(i64 a, i64 m)
{
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 mulmod(i64 a, i64 b, i64 m)
{
    return static_cast<i64>(static_cast<i128>(mod(a, m)) * mod(b, m) % m);
}

i64 powmod(i64 base, u64 exp, i64 m)
{
    if (m == 1)
        return 0;
    i64 result = 1;
    base = mod(base, m);
    while (exp) {
        if (exp & 1)
            result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

i64 ext_gcd(i64 a, i64 b, i64& x, i64& y)
{
    i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        i64 q = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    x = old_s;
    y = old_t;
    return old_r;
}

i64 invmod(i64 a, i64 m)
{
    i64 x, y;
    i64 g = ext_gcd(mod(a, m), m, x, y);
    if (g != 1)
        throw std::domain_error("invmod: not invertible");
    return mod(x, m);
}

i64 isqrt(i64 n)
{
    if (n < 0)
        throw std::domain_error("isqrt of negative");
    i64 r = static_cast<i64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<i128>(r) * r > n)
        --r;
    while (static_cast<i128>(r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

i64 floor_div(i64 a, i64 b)
{
    i64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

int valuation(i128 n, i64 q)
{
    if (n == 0)
        throw std::domain_error("valuation of zero");
    int v = 0;
    while (n % q == 0) {
        n /= q;
        ++v;
    }
    return v;
}

std::string to_string(i128 n)
{
    if (n == 0)
        return "0";
    bool neg = n < 0;
    std::string s;
    while (n != 0) {
        int d = static_cast<int>(n % 10);
        s.push_back(static_cast<char>('0' + (d < 0 ? -d : d)));
        n /= 10;
    }
    if (neg)
        s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

int kronecker(i64 a, i64 n)
{
    if (n == 0)
        throw std::domain_error("kronecker: n must be nonzero");
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0)
            result = -result;
    }
    int twos = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++twos;
    }
    if (twos > 0) {
        if ((a & 1) == 0)
            return 0;
        if (twos & 1) {
            i64 r = mod(a, 8);
            if (r == 3 || r == 5)
                result = -result;
        }
    }
    // Jacobi symbol (a|n), n odd positive
    a = mod(a, n);
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            i64 r = n % 8;
            if (r == 3 || r == 5)
                result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3)
            result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

namespace {

void check_size(i64 n)
{
    u64 mag = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
    if (mag >= (u64{1} << kMaxIntegerBits))
        throw SizeError("integer exceeds " + std::to_string(kMaxIntegerBits) + "-bit bound");
}

bool miller_rabin(i64 n, i64 a)
{
    if (a % n == 0)
        return true;
    i64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    i64 x = powmod(a, static_cast<u64>(d), n);
    if (x == 1 || x == n - 1)
        return true;
    for (int r = 1; r < s; ++r) {
        x = mulmod(x, x, n);
        if (x == n - 1)
            return true;
    }
    return false;
}

i64 pollard_brent(i64 n)
{
    if (n % 2 == 0)
        return 2;
    for (i64 c = 1;; ++c) {
        i64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        i64 r = 1;
        const i64 m = 128;
        auto f = [&](i64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (i64 i = 0; i < r; ++i)
                y = f(y);
            i64 k = 0;
            do {
                ys = y;
                for (i64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, std::llabs(x - y), n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(std::llabs(x - ys), n);
            } while (g == 1);
        }
        if (g != n)
            return g;
    }
}

void factor_into(i64 n, std::map<i64, int>& out)
{
    if (n == 1)
        return;
    if (is_prime(n)) {
        out[n] += 1;
        return;
    }
    i64 d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

} // namespace

bool is_prime(i64 n)
{
    check_size(n);
    if (n < 2)
        return false;
    for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0)
            return n == p;
    }
    for (i64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
        if (!miller_rabin(n, a))
            return false;
    return true;
}

std::optional<i64> sqrt_mod(i64 a, i64 p)
{
    a = mod(a, p);
    if (a == 0)
        return 0;
    if (p == 2)
        return a;
    if (powmod(a, static_cast<u64>((p - 1) / 2), p) != 1)
        return std::nullopt;
    // Tonelli-Shanks
    i64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    i64 z = 2;
    while (powmod(z, static_cast<u64>((p - 1) / 2), p) != p - 1)
        ++z;
    i64 m = s;
    i64 c = powmod(z, static_cast<u64>(q), p);
    i64 t = powmod(a, static_cast<u64>(q), p);
    i64 r = powmod(a, static_cast<u64>((q + 1) / 2), p);
    while (t != 1) {
        i64 i = 0, t2 = t;
        while (t2 != 1) {
            t2 = mulmod(t2, t2, p);
            ++i;
        }
        i64 b = c;
        for (i64 j = 0; j < m - i - 1; ++j)
            b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return std::min(r, p - r);
}

FactoredInteger factorize(i64 n)
{
    if (n == 0)
        throw std::domain_error("factorize: zero");
    check_size(n);
    FactoredInteger out;
    out.value = n;
    i64 m = n < 0 ? -n : n;
    std::map<i64, int> acc;
    for (i64 p = 2; p < 1000 && p * p <= m; ++p) {
        while (m % p == 0) {
            acc[p] += 1;
            m /= p;
        }
    }
    if (m > 1)
        factor_into(m, acc);
    for (auto const& [p, e] : acc)
        out.factors.push_back({p, e});
    // re-verify
    if (out.product() != (n < 0 ? -n : n))
        throw std::logic_error("factorize: verification failed");
    for (auto const& f : out.factors)
        if (!is_prime(f.prime))
            throw std::logic_error("factorize: composite factor");
    return out;
}

i64 next_prime(i64 n)
{
    i64 c = std::max<i64>(2, n + 1);
    while (!is_prime(c))
        ++c;
    return c;
}

std::vector<i64> primes_up_to(i64 bound)
{
    std::vector<i64> out;
    if (bound < 2)
        return out;
    std::vector<bool> sieve(static_cast<size_t>(bound + 1), true);
    for (i64 i = 2; i <= bound; ++i) {
        if (!sieve[static_cast<size_t>(i)])
            continue;
        out.push_back(i);
        for (i64 j = i * i; j <= bound; j += i)
            sieve[static_cast<size_t>(j)] = false;
    }
    return out;
}

bool is_fundamental_discriminant(i64 d)
{
    if (d == 0 || d == 1)
        return false;
    i64 r = mod(d, 4);
    if (r == 1)
        return factorize(d).is_squarefree();
    if (r != 0)
        return false;
    i64 m = d / 4;
    i64 rm = mod(m, 4);
    if (rm != 2 && rm != 3)
        return false;
    return factorize(m).is_squarefree();
}

int euler_phi(i64 n)
{
    i64 r = n;
    for (auto const& f : factorize(n).factors)
        r = r / f.prime * (f.prime - 1);
    return static_cast<int>(r);
}

// ---------------------------------------------------------------------------
// PolyModP

PolyModP::PolyModP(std::vector<i64> coeffs, i64 p) : coeffs_(std::move(coeffs)), p_(p)
{
    for (auto& c : coeffs_)
        c = mod(c, p_);
    trim();
}

PolyModP PolyModP::monomial(i64 coeff, int degree, i64 p)
{
    std::vector<i64> c(static_cast<size_t>(degree + 1), 0);
    c.back() = coeff;
    return PolyModP(std::move(c), p);
}

void PolyModP::trim()
{
    while (!coeffs_.empty() && coeffs_.back() == 0)
        coeffs_.pop_back();
}

i64 PolyModP::coeff(int k) const
{
    return k < static_cast<int>(coeffs_.size()) && k >= 0 ? coeffs_[static_cast<size_t>(k)] : 0;
}

i64 PolyModP::eval(i64 x) const
{
    i64 r = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        r = (mulmod(r, x, p_) + *it) % p_;
    return r;
}

PolyModP PolyModP::monic() const
{
    if (is_zero())
        return *this;
    i64 inv = invmod(leading(), p_);
    std::vector<i64> c = coeffs_;
    for (auto& x : c)
        x = mulmod(x, inv, p_);
    return PolyModP(std::move(c), p_);
}

PolyModP PolyModP::derivative() const
{
    std::vector<i64> c;
    for (size_t k = 1; k < coeffs_.size(); ++k)
        c.push_back(mulmod(coeffs_[k], static_cast<i64>(k), p_));
    return PolyModP(std::move(c), p_);
}

PolyModP operator+(PolyModP const& a, PolyModP const& b)
{
    std::vector<i64> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
    for (size_t k = 0; k < c.size(); ++k)
        c[k] = (a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k))) % a.p_;
    return PolyModP(std::move(c), a.p_);
}

PolyModP operator-(PolyModP const& a, PolyModP const& b)
{
    std::vector<i64> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
    for (size_t k = 0; k < c.size(); ++k)
        c[k] = a.coeff(static_cast<int>(k)) - b.coeff(static_cast<int>(k));
    return PolyModP(std::move(c), a.p_);
}

PolyModP operator*(PolyModP const& a, PolyModP const& b)
{
    if (a.is_zero() || b.is_zero())
        return PolyModP({}, a.p_);
    std::vector<i128> acc(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
    for (size_t i = 0; i < a.coeffs_.size(); ++i)
        for (size_t j = 0; j < b.coeffs_.size(); ++j)
            acc[i + j] = (acc[i + j] + static_cast<i128>(a.coeffs_[i]) * b.coeffs_[j]) % a.p_;
    std::vector<i64> c(acc.size());
    for (size_t k = 0; k < acc.size(); ++k)
        c[k] = static_cast<i64>(acc[k]);
    return PolyModP(std::move(c), a.p_);
}

std::pair<PolyModP, PolyModP> divmod(PolyModP const& a, PolyModP const& b)
{
    if (b.is_zero())
        throw std::domain_error("polynomial division by zero");
    i64 p = a.modulus();
    std::vector<i64> r = a.coeffs();
    int db = b.degree();
    if (a.degree() < db)
        return {PolyModP({}, p), a};
    std::vector<i64> q(static_cast<size_t>(a.degree() - db + 1), 0);
    i64 inv = invmod(b.leading(), p);
    for (int k = a.degree(); k >= db; --k) {
        i64 c = r[static_cast<size_t>(k)];
        if (c == 0)
            continue;
        i64 f = mulmod(c, inv, p);
        q[static_cast<size_t>(k - db)] = f;
        for (int j = 0; j <= db; ++j) {
            auto& slot = r[static_cast<size_t>(k - db + j)];
            slot = mod(slot - mulmod(f, b.coeff(j), p), p);
        }
    }
    return {PolyModP(std::move(q), p), PolyModP(std::move(r), p)};
}

PolyModP operator%(PolyModP const& a, PolyModP const& b)
{
    return divmod(a, b).second;
}

PolyModP operator/(PolyModP const& a, PolyModP const& b)
{
    return divmod(a, b).first;
}

bool PolyModP::operator<(PolyModP const& o) const
{
    if (degree() != o.degree())
        return degree() < o.degree();
    for (int k = degree(); k >= 0; --k)
        if (coeff(k) != o.coeff(k))
            return coeff(k) < o.coeff(k);
    return false;
}

std::string PolyModP::to_string() const
{
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        i64 c = coeff(k);
        if (c == 0)
            continue;
        if (!first)
            os << " + ";
        first = false;
        if (k == 0 || c != 1)
            os << c;
        if (k >= 1)
            os << (c != 1 ? "*" : "") << "x";
        if (k >= 2)
            os << "^" << k;
    }
    return os.str();
}

PolyModP gcd(PolyModP a, PolyModP b)
{
    while (!b.is_zero()) {
        PolyModP r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

PolyModP powmod(PolyModP const& base, u64 exp, PolyModP const& modulus)
{
    i64 p = modulus.modulus();
    PolyModP result({1}, p);
    result = result % modulus;
    PolyModP b = base % modulus;
    while (exp) {
        if (exp & 1)
            result = (result * b) % modulus;
        b = (b * b) % modulus;
        exp >>= 1;
    }
    return result;
}

namespace {

bool is_one(PolyModP const& f)
{
    return f.degree() == 0 && f.coeff(0) == 1;
}

// f = g(x^p) -> g
PolyModP pth_root(PolyModP const& f)
{
    i64 p = f.modulus();
    std::vector<i64> c;
    for (int k = 0; k <= f.degree(); k += static_cast<int>(p))
        c.push_back(f.coeff(k));
    return PolyModP(std::move(c), p);
}

void squarefree_decomposition(PolyModP const& f, int mult, std::vector<PolyFactor>& out)
{
    i64 p = f.modulus();
    PolyModP df = f.derivative();
    if (df.is_zero()) {
        if (f.degree() > 0)
            squarefree_decomposition(pth_root(f), mult * static_cast<int>(p), out);
        return;
    }
    PolyModP c = gcd(f, df);
    PolyModP w = f / c;
    int i = 1;
    while (!is_one(w)) {
        PolyModP y = gcd(w, c);
        PolyModP z = w / y;
        if (z.degree() > 0)
            out.push_back({z.monic(), i * mult});
        ++i;
        w = y;
        c = c / y;
    }
    if (c.degree() > 0)
        squarefree_decomposition(pth_root(c.monic()), mult * static_cast<int>(p), out);
}

// (degree d, product of all irreducible factors of that degree)
std::vector<std::pair<int, PolyModP>> distinct_degree(PolyModP f)
{
    i64 p = f.modulus();
    std::vector<std::pair<int, PolyModP>> out;
    PolyModP x({0, 1}, p);
    PolyModP h = x % f;
    for (int d = 1; 2 * d <= f.degree(); ++d) {
        h = powmod(h, static_cast<u64>(p), f);
        PolyModP g = gcd(h - x, f);
        if (!is_one(g)) {
            out.emplace_back(d, g);
            f = f / g;
            h = h % f;
        }
    }
    if (f.degree() > 0)
        out.emplace_back(f.degree(), f.monic());
    return out;
}

void equal_degree(PolyModP const& g, int d, std::mt19937_64& rng, std::vector<PolyModP>& out)
{
    if (g.degree() == d) {
        out.push_back(g.monic());
        return;
    }
    i64 p = g.modulus();
    std::uniform_int_distribution<i64> coef(0, p - 1);
    while (true) {
        std::vector<i64> c(static_cast<size_t>(g.degree()));
        for (auto& v : c)
            v = coef(rng);
        PolyModP a(std::move(c), p);
        if (a.degree() < 1)
            continue;
        PolyModP b;
        if (p == 2) {
            // trace map a + a^2 + ... + a^(2^(d-1))
            PolyModP t = a % g;
            PolyModP acc = t;
            for (int k = 1; k < d; ++k) {
                t = (t * t) % g;
                acc = acc + t;
            }
            b = acc;
        } else {
            // a^((p^d-1)/2) = (a^(1+p+...+p^(d-1)))^((p-1)/2)
            PolyModP t = a % g;
            PolyModP norm = t;
            for (int k = 1; k < d; ++k) {
                t = powmod(t, static_cast<u64>(p), g);
                norm = (norm * t) % g;
            }
            b = powmod(norm, static_cast<u64>((p - 1) / 2), g) - PolyModP({1}, p);
        }
        PolyModP h = gcd(b, g);
        if (h.degree() > 0 && h.degree() < g.degree()) {
            equal_degree(h, d, rng, out);
            equal_degree(g / h, d, rng, out);
            return;
        }
    }
}

} // namespace

std::vector<PolyFactor> poly_factor_mod_p(PolyModP const& f)
{
    if (f.is_zero())
        throw std::domain_error("poly_factor_mod_p: zero polynomial");
    std::vector<PolyFactor> sqf;
    if (f.degree() > 0)
        squarefree_decomposition(f.monic(), 1, sqf);
    std::mt19937_64 rng(0x5eed1234ULL);
    std::map<std::vector<i64>, PolyFactor> merged;
    for (auto const& part : sqf) {
        for (auto const& [d, g] : distinct_degree(part.factor)) {
            std::vector<PolyModP> irr;
            equal_degree(g, d, rng, irr);
            for (auto const& h : irr) {
                auto [it, inserted] = merged.try_emplace(h.coeffs(), PolyFactor{h, 0});
                it->second.multiplicity += part.multiplicity;
            }
        }
    }
    std::vector<PolyFactor> out;
    for (auto& [k, v] : merged)
        out.push_back(v);
    std::sort(out.begin(), out.end(),
              [](PolyFactor const& a, PolyFactor const& b) { return a.factor < b.factor; });
    return out;
}

namespace {

std::vector<i64> poly_exact_div(std::vector<i64> num, std::vector<i64> const& den)
{
    // den monic
    int dn = static_cast<int>(num.size()) - 1, dd = static_cast<int>(den.size()) - 1;
    std::vector<i64> q(static_cast<size_t>(dn - dd + 1), 0);
    for (int k = dn; k >= dd; --k) {
        i64 c = num[static_cast<size_t>(k)];
        q[static_cast<size_t>(k - dd)] = c;
        for (int j = 0; j <= dd; ++j)
            num[static_cast<size_t>(k - dd + j)] -= c * den[static_cast<size_t>(j)];
    }
    for (int k = 0; k < dd; ++k)
        if (num[static_cast<size_t>(k)] != 0)
            throw std::logic_error("cyclotomic division not exact");
    return q;
}

} // namespace

std::vector<i64> cyclotomic_polynomial(int n)
{
    if (n < 1)
        throw std::domain_error("cyclotomic_polynomial: n >= 1");
    static std::map<int, std::vector<i64>> cache;
    static std::recursive_mutex guard;
    std::lock_guard lock(guard);
    if (auto it = cache.find(n); it != cache.end())
        return it->second;
    std::vector<i64> f(static_cast<size_t>(n + 1), 0);
    f[0] = -1;
    f[static_cast<size_t>(n)] = 1;
    for (int d = 1; d < n; ++d)
        if (n % d == 0)
            f = poly_exact_div(f, cyclotomic_polynomial(d));
    cache[n] = f;
    return f;
}

} // namespace qcert
