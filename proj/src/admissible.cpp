#include "qcert/admissible.hpp"

#include <future>

namespace qcert {

bool ConditionReport::all_verified() const
{
    for (auto const& it : items)
        if (it.status != CheckStatus::Verified)
            return false;
    return true;
}

int ConditionReport::first_failure() const
{
    for (size_t k = 0; k < items.size(); ++k)
        if (items[k].status == CheckStatus::Failed)
            return static_cast<int>(k) + 1;
    return 0;
}

namespace {

ConditionItem item_primality(CurveModel const& e, FormClassGroup const& g, i64 p)
{
    auto const& O = g.order();
    const i64 h = g.size();
    ConditionItem it;
    it.evidence = {{"p", p}, {"c", O.c}, {"N", e.N()}, {"D", O.D}, {"h_c", h}};
    std::vector<std::string> why;
    if (!is_prime(p))
        why.push_back("p is not prime");
    if (p < 5)
        why.push_back("p < 5");
    for (auto [name, v] : {std::pair<const char*, i64>{"c", O.c}, {"N", e.N()}, {"D", O.D}, {"h_c", h}})
        if (p != 0 && v % p == 0)
            why.push_back(std::string("p divides ") + name);
    it.status = why.empty() ? CheckStatus::Verified : CheckStatus::Failed;
    if (!why.empty())
        it.evidence["reasons"] = why;
    return it;
}

ConditionItem item_surjectivity(CurveModel const& e, i64 p, i64 bound)
{
    ConditionItem it;
    if (p < 5 || !is_prime(p) || e.N() % p == 0) {
        it.evidence = {{"skipped", "p < 5, composite, or dividing N"}};
        return it;
    }
    auto s = surjectivity_witness(e, p, bound);
    it.status = s.surjective ? CheckStatus::Verified : CheckStatus::Undetermined;
    auto first = [](std::vector<i64> const& v) { return v.empty() ? Json() : Json(v.front()); };
    it.evidence = {{"ell_bound", bound},
                   {"split_witness", first(s.split_witnesses)},
                   {"nonsplit_witness", first(s.nonsplit_witnesses)},
                   {"exceptional_witness", first(s.exceptional_witnesses)}};
    return it;
}

ConditionItem item_special_value(CyclotomicValue const& L, i64 p, std::optional<PrimeAbove>& chosen)
{
    ConditionItem it;
    it.evidence = {{"L_value", L.coeffs}, {"n", L.n}};
    if (p < 2 || !is_prime(p) || L.n % p == 0) {
        it.evidence["skipped"] = "p not prime or p divides the character order";
        return it;
    }
    bool outside_pZ = false;
    for (i64 c : L.coeffs)
        if (mod(c, p) != 0)
            outside_pZ = true;
    chosen = choose_prime_above(L.n, p, [&](PrimeAbove const& P) { return !nonvanishing_mod(L, P); });
    it.evidence["nonzero_mod_p"] = outside_pZ;
    it.evidence["prime_with_nonzero_image"] = chosen.has_value();
    if (chosen) {
        it.evidence["prime_factor"] = chosen->factor.coeffs();
        it.evidence["residue_image"] = reduce_cyclotomic(L, *chosen).coeffs();
    }
    if (outside_pZ != chosen.has_value())
        throw std::logic_error("special value: mod p and mod prime verdicts disagree");
    it.status = chosen ? CheckStatus::Verified : CheckStatus::Failed;
    return it;
}

ConditionItem item_degree(CurveModel const& e, i64 p, std::optional<IsolationReport> const& iso)
{
    ConditionItem it;
    if (e.modular_degree) {
        it.status = *e.modular_degree % p == 0 ? CheckStatus::Failed : CheckStatus::Verified;
        it.evidence = {{"modular_degree", *e.modular_degree}, {"source", "supplied"}};
    } else {
        it.evidence = {{"modular_degree", nullptr}};
        if (iso)
            it.evidence["corroborating_p_isolation"] = {{"isolated", iso->isolated},
                                                        {"generalized_kernel_dim", iso->generalized_kernel_dim},
                                                        {"substitutes_for_condition", false}};
    }
    return it;
}

ConditionItem item_local_torsion(CurveModel const& e, FormClassGroup const& g, i64 p)
{
    ConditionItem it;
    it.evidence = {{"criterion", "conservative bound"}, {"primes", Json::array()}};
    if (p < 5 || !is_prime(p) || e.N() % p == 0) {
        it.evidence["skipped"] = "p < 5, composite, or dividing N";
        return it;
    }
    it.status = CheckStatus::Verified;
    for (i64 q : e.conductor.primes()) {
        if (g.order().D % q == 0) {
            it.status = CheckStatus::Undetermined;
            it.evidence["primes"].push_back({{"q", q}, {"status", "ramified in K"}});
            continue;
        }
        int f = residue_degree_in_Hc(g, q);
        auto r = local_torsion_pfree(e, q, f, p);
        it.evidence["primes"].push_back({{"q", q},
                                         {"residue_degree", f},
                                         {"reduction", to_string(r.kind)},
                                         {"component_bound", r.component_bound},
                                         {"nonsingular_order", r.nonsingular_order},
                                         {"status", to_string(r.status)}});
        if (r.status != CheckStatus::Verified)
            it.status = r.status;
    }
    return it;
}

} // namespace

ConditionReport check_assumption(CurveModel const& e, FormClassGroup const& g, i64 p, AssumptionInputs const& in)
{
    ConditionReport r;
    r.p = p;
    r.items[0] = item_primality(e, g, p);
    r.items[1] = item_surjectivity(e, p, in.witness_bound);
    r.items[2] = item_special_value(in.L, p, r.chosen_prime);
    r.items[3] = item_degree(e, p, in.isolation);
    r.items[4] = item_local_torsion(e, g, p);
    return r;
}

AdmissibilityCheck is_admissible(i64 ell, CurveModel const& e, i64 D, i64 c, i64 p)
{
    if (!is_prime(ell))
        throw std::domain_error("is_admissible: ell must be prime");
    AdmissibilityCheck r;
    if (e.N() % ell == 0 || p % ell == 0 || c % ell == 0) {
        r.failed_condition = 1;
        return r;
    }
    if (kronecker(D, ell) != -1) {
        r.failed_condition = 2;
        return r;
    }
    if (mod((ell - 1) % p * ((ell + 1) % p), p) == 0) {
        r.failed_condition = 3;
        return r;
    }
    const i64 a = trace_of_frobenius(e, ell);
    const i64 s = mod(ell + 1, p);
    if (mod(mulmod(s, s, p) - mulmod(mod(a, p), mod(a, p), p), p) != 0) {
        r.failed_condition = 4;
        return r;
    }
    const bool plus = mod(s - a, p) == 0, minus = mod(s + a, p) == 0;
    if (plus == minus)
        throw std::logic_error("is_admissible: sign not unique");
    r.admissible = true;
    r.prime = AdmissiblePrime{ell, plus ? 1 : -1, a};
    return r;
}

std::vector<AdmissiblePrime> find_admissible(CurveModel const& e, i64 D, i64 c, i64 p, i64 ell_max)
{
    auto ells = primes_up_to(std::min(ell_max, kTraceLimit));
    auto scan = [&](size_t lo, size_t hi) {
        std::vector<AdmissiblePrime> out;
        for (size_t k = lo; k < hi; ++k) {
            auto r = is_admissible(ells[k], e, D, c, p);
            if (r.admissible)
                out.push_back(*r.prime);
        }
        return out;
    };
    constexpr size_t kChunk = 512;
    if (ells.size() <= kChunk)
        return scan(0, ells.size());
    std::vector<std::future<std::vector<AdmissiblePrime>>> parts;
    for (size_t lo = 0; lo < ells.size(); lo += kChunk)
        parts.push_back(std::async(std::launch::async, scan, lo, std::min(lo + kChunk, ells.size())));
    std::vector<AdmissiblePrime> out;
    for (auto& f : parts) {
        auto v = f.get();
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

} // namespace qcert
