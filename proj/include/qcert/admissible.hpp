#ifndef QCERT_ADMISSIBLE_HPP
#define QCERT_ADMISSIBLE_HPP

#include "qcert/curve.hpp"
#include "qcert/gross.hpp"

#include <json.hpp>

namespace qcert {

using Json = nlohmann::ordered_json;

struct ConditionItem
{
    CheckStatus status = CheckStatus::Undetermined;
    Json evidence = Json::object();
};

/* items[k] is hypothesis k+1: p >= 5 and p prime to cNDh(c); rho_{E,p} surjective;
   L(f,chi) nonzero mod p; p prime to the modular degree; p-free local torsion at q | N */
struct ConditionReport
{
    i64 p = 0;
    std::array<ConditionItem, 5> items;
    std::optional<PrimeAbove> chosen_prime;

    bool all_verified() const;
    /* 1-based index of the first Failed item, 0 if none */
    int first_failure() const;
};

struct AssumptionInputs
{
    CyclotomicValue L;
    std::optional<IsolationReport> isolation; // corroborating only
    i64 witness_bound = 200;
};

ConditionReport check_assumption(CurveModel const& e, FormClassGroup const& g, i64 p, AssumptionInputs const& in);

struct AdmissiblePrime
{
    i64 ell;
    int epsilon;
    i64 a_ell;

    bool operator==(AdmissiblePrime const&) const = default;
};

struct AdmissibilityCheck
{
    bool admissible = false;
    int failed_condition = 0; // 1..4, 0 when admissible
    std::optional<AdmissiblePrime> prime;
};

AdmissibilityCheck is_admissible(i64 ell, CurveModel const& e, i64 D, i64 c, i64 p);

/* all admissible ell <= ell_max, increasing */
std::vector<AdmissiblePrime> find_admissible(CurveModel const& e, i64 D, i64 c, i64 p, i64 ell_max);

} // namespace qcert

#endif // QCERT_ADMISSIBLE_HPP
