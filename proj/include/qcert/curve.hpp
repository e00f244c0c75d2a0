#ifndef QCERT_CURVE_HPP
#define QCERT_CURVE_HPP

#include "qcert/ntheory.hpp"

#include <array>
#include <map>

namespace qcert {

class BadReduction : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class GoodReduction : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class SizeLimit : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct WeierstrassInvariants
{
    i128 b2, b4, b6, b8, c4, c6, discriminant;
};

WeierstrassInvariants weierstrass_invariants(std::array<i64, 5> const& a);

/* a = (a1, a2, a3, a4, a6); the model is taken to be globally minimal */
struct CurveModel
{
    std::string label;
    std::array<i64, 5> a{};
    FactoredInteger conductor;
    i128 discriminant = 0;
    std::optional<i64> modular_degree;

    /* re-derives the discriminant and checks the conductor against it */
    static CurveModel make(std::string label, std::array<i64, 5> const& a, i64 conductor,
                           std::optional<i64> modular_degree = std::nullopt);

    i64 N() const { return conductor.value; }
    bool good_at(i64 q) const { return N() % q != 0; }
};

/* projective points of the reduction mod q, singular point included */
i64 count_points_naive(std::array<i64, 5> const& a, i64 q);

inline constexpr i64 kNaiveCountLimit = 10000;
inline constexpr i64 kTraceLimit = 1000000;

i64 trace_of_frobenius(CurveModel const& e, i64 q);

namespace detail {
// the two counting back ends, exposed for cross-checking; q odd prime of good reduction (> 3 for bsgs)
i64 trace_legendre(CurveModel const& e, i64 q);
i64 trace_bsgs(CurveModel const& e, i64 q);
} // namespace detail

enum class ReductionKind { Good, SplitMultiplicative, NonsplitMultiplicative, Additive };
std::string to_string(ReductionKind k);

struct ReductionData
{
    i64 q;
    ReductionKind kind;
    int v_disc;
};

ReductionData reduction_data(CurveModel const& e, i64 q);

struct SurjectivityResult
{
    bool surjective = false;
    std::vector<i64> split_witnesses;       // a != 0, a^2-4l nonzero square
    std::vector<i64> nonsplit_witnesses;    // a != 0, a^2-4l nonsquare
    std::vector<i64> exceptional_witnesses; // u = a^2/l avoids {0,1,2,4} and u^2-3u+1
};

SurjectivityResult surjectivity_witness(CurveModel const& e, i64 p, i64 ell_bound);

enum class CheckStatus { Verified, Failed, Undetermined };
std::string to_string(CheckStatus s);

struct LocalTorsionResult
{
    CheckStatus status;
    ReductionKind kind;
    i64 component_bound;
    i64 nonsingular_order; // |E_ns(F_{q^f})|
};

LocalTorsionResult local_torsion_pfree(CurveModel const& e, i64 q, int f, i64 p);

} // namespace qcert

#endif // QCERT_CURVE_HPP
