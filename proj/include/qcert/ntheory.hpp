#ifndef QCERT_NTHEORY_HPP
#define QCERT_NTHEORY_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcert {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

// Inputs at or above this many bits are rejected by factorize / is_prime.
inline constexpr int kMaxIntegerBits = 62;

class SizeError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct PrimePower
{
    i64 prime;
    int exponent;

    bool operator==(PrimePower const&) const = default;
};

/* |value| = prod prime^exponent, primes strictly increasing. */
struct FactoredInteger
{
    i64 value = 1;
    std::vector<PrimePower> factors;

    std::vector<i64> primes() const;
    bool is_squarefree() const;
    int valuation(i64 q) const;
    i64 product() const;
    bool operator==(FactoredInteger const&) const = default;
};

// arithmetic helpers
i64 mulmod(i64 a, i64 b, i64 m);
i64 powmod(i64 base, u64 exp, i64 m);
i64 invmod(i64 a, i64 m);
i64 mod(i64 a, i64 m);
i64 isqrt(i64 n);
i64 floor_div(i64 a, i64 b);
int valuation(i128 n, i64 q);
std::string to_string(i128 n);

/* extended gcd: returns g = gcd(a,b) >= 0 and x,y with a*x + b*y = g */
i64 ext_gcd(i64 a, i64 b, i64& x, i64& y);

int kronecker(i64 a, i64 n);
bool is_prime(i64 n);
std::optional<i64> sqrt_mod(i64 a, i64 p);
FactoredInteger factorize(i64 n);
i64 next_prime(i64 n);
std::vector<i64> primes_up_to(i64 bound);
bool is_fundamental_discriminant(i64 d);

/* Polynomial over F_p, coefficients low degree first, always trimmed. */
class PolyModP
{
  public:
    PolyModP() = default;
    PolyModP(std::vector<i64> coeffs, i64 p);

    static PolyModP monomial(i64 coeff, int degree, i64 p);

    i64 modulus() const { return p_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    std::vector<i64> const& coeffs() const { return coeffs_; }
    i64 coeff(int k) const;
    i64 leading() const { return coeffs_.empty() ? 0 : coeffs_.back(); }
    i64 eval(i64 x) const;

    PolyModP monic() const;
    PolyModP derivative() const;

    friend PolyModP operator+(PolyModP const& a, PolyModP const& b);
    friend PolyModP operator-(PolyModP const& a, PolyModP const& b);
    friend PolyModP operator*(PolyModP const& a, PolyModP const& b);
    friend PolyModP operator%(PolyModP const& a, PolyModP const& b);
    friend PolyModP operator/(PolyModP const& a, PolyModP const& b);
    bool operator==(PolyModP const& o) const { return p_ == o.p_ && coeffs_ == o.coeffs_; }

    /* canonical order: degree, then coefficients from the top down */
    bool operator<(PolyModP const& o) const;

    std::string to_string() const;

  private:
    void trim();
    std::vector<i64> coeffs_;
    i64 p_ = 2;
};

std::pair<PolyModP, PolyModP> divmod(PolyModP const& a, PolyModP const& b);
PolyModP gcd(PolyModP a, PolyModP b);
PolyModP powmod(PolyModP const& base, u64 exp, PolyModP const& modulus);

struct PolyFactor
{
    PolyModP factor;
    int multiplicity;
};

/* Monic irreducible factors with multiplicity, sorted by degree then coefficients. */
std::vector<PolyFactor> poly_factor_mod_p(PolyModP const& f);

/* n-th cyclotomic polynomial over Z, low degree first. */
std::vector<i64> cyclotomic_polynomial(int n);
int euler_phi(i64 n);

} // namespace qcert

#endif // QCERT_NTHEORY_HPP
