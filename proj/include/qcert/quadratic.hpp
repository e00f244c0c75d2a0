#ifndef QCERT_QUADRATIC_HPP
#define QCERT_QUADRATIC_HPP

#include "qcert/ntheory.hpp"

#include <functional>

namespace qcert {

class BadPrime : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/* O_c = Z + c O_K inside K = Q(sqrt D) */
struct QuadOrder
{
    i64 D = -3;
    i64 c = 1;
    i64 disc = -3; // c^2 D

    static QuadOrder make(i64 D, i64 c);
};

/* a x^2 + b x y + c y^2 */
struct Form
{
    i64 a, b, c;

    i64 discriminant() const { return b * b - 4 * a * c; }
    auto operator<=>(Form const&) const = default;
};

bool is_reduced(Form const& f);
Form reduce(Form f);
/* Dirichlet composition (not reduced) of two primitive forms of the same discriminant */
Form compose(Form const& f, Form const& g);

/* reduced primitive forms of discriminant disc < 0, ordered by (a, b) */
std::vector<Form> reduced_forms(i64 disc);

class FormClassGroup
{
  public:
    explicit FormClassGroup(QuadOrder order);

    QuadOrder const& order() const { return order_; }
    int size() const { return static_cast<int>(classes_.size()); }
    std::vector<Form> const& classes() const { return classes_; }
    Form const& form(int idx) const { return classes_[static_cast<size_t>(idx)]; }
    int identity() const { return 0; }
    int mul(int i, int j) const { return table_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    int inverse(int i) const { return inverse_[static_cast<size_t>(i)]; }
    int power(int i, i64 k) const;
    int element_order(int i) const;
    int exponent() const;

    /* class of an arbitrary primitive form of the right discriminant */
    int index_of(Form const& f) const;

  private:
    QuadOrder order_;
    std::vector<Form> classes_;
    std::vector<std::vector<int>> table_;
    std::vector<int> inverse_;
};

FormClassGroup class_group(QuadOrder const& order);

/* h(c) = h(K) c prod_{q | c} (1 - (D|q)/q) / [O_K^x : O_c^x] */
i64 class_number_formula(i64 D, i64 c);

/* chi(sigma) = zeta_n^exponents[sigma] */
struct RingClassCharacter
{
    int n = 1;
    std::vector<int> exponents;

    bool is_trivial() const { return n == 1; }
    RingClassCharacter inverse() const;
};

/* all characters: trivial first, then by order and exponent vector */
std::vector<RingClassCharacter> characters(FormClassGroup const& g);

/* validates that exps (mod modulus) is a homomorphism and normalizes to the exact order */
RingClassCharacter character_from_exponents(FormClassGroup const& g, std::vector<i64> const& exps,
                                            i64 modulus);

struct FrobeniusClass
{
    enum class Kind { Split, Inert, Ramified } kind;
    int class_index = -1; // for Split
};

FrobeniusClass frobenius_class(FormClassGroup const& g, i64 q);
int residue_degree_in_Hc(FormClassGroup const& g, i64 q);

inline constexpr int kMaxCyclotomicOrder = 360;

/* element of Z[zeta_n] in the power basis 1, zeta, ..., zeta^(phi(n)-1) */
struct CyclotomicValue
{
    int n = 1;
    std::vector<i64> coeffs;

    static CyclotomicValue zero(int n);
    /* sum_k weights[k] zeta_n^k for k in [0, n) */
    static CyclotomicValue from_powers(int n, std::vector<i64> const& weights);

    bool is_zero() const;
    CyclotomicValue conjugate() const;
    CyclotomicValue embed(int m) const;
    friend CyclotomicValue operator+(CyclotomicValue const& x, CyclotomicValue const& y);
    bool operator==(CyclotomicValue const&) const = default;
    std::string to_string() const;
};

struct PrimeAbove
{
    i64 p;
    int n;
    PolyModP factor;
    int residue_degree;
};

/* canonically first factor of Phi_n mod p not rejected */
std::optional<PrimeAbove> choose_prime_above(int n, i64 p,
                                             std::function<bool(PrimeAbove const&)> const& reject = {});
std::vector<PrimeAbove> primes_above(int n, i64 p);

/* image in F_p[x]/(factor) */
PolyModP reduce_cyclotomic(CyclotomicValue const& x, PrimeAbove const& prime);

} // namespace qcert

#endif // QCERT_QUADRATIC_HPP
