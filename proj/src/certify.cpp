#include "qcert/certify.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <sstream>

namespace qcert {

std::string to_string(CertificateStatus s)
{
    switch (s) {
    case CertificateStatus::Full: return "full";
    case CertificateStatus::Partial: return "partial";
    case CertificateStatus::Refused: return "refused";
    }
    return "?";
}

std::string Certificate::serialize() const
{
    return json.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// character selector

CharacterSelector CharacterSelector::parse(std::string const& text)
{
    CharacterSelector s;
    if (text == "trivial")
        return s;
    if (text.rfind("exp:", 0) == 0) {
        auto body = text.substr(4);
        auto slash = body.find('/');
        if (slash == std::string::npos)
            throw InvalidRequest("character: expected exp:e1,e2,.../m");
        s.kind = Kind::Exponents;
        try {
            s.modulus = std::stoll(body.substr(slash + 1));
            std::stringstream in(body.substr(0, slash));
            std::string tok;
            while (std::getline(in, tok, ','))
                s.exponents.push_back(std::stoll(tok));
        } catch (std::exception const&) {
            throw InvalidRequest("character: malformed exponent list '" + text + "'");
        }
        if (s.modulus < 1 || s.exponents.empty())
            throw InvalidRequest("character: malformed exponent list '" + text + "'");
        return s;
    }
    try {
        size_t used = 0;
        s.index = std::stoi(text, &used);
        if (used != text.size() || s.index < 0)
            throw std::invalid_argument(text);
    } catch (std::exception const&) {
        throw InvalidRequest("character: expected trivial, an index, or exp:...; got '" + text + "'");
    }
    s.kind = Kind::Index;
    return s;
}

std::string CharacterSelector::to_string() const
{
    switch (kind) {
    case Kind::Trivial: return "trivial";
    case Kind::Index: return std::to_string(index);
    case Kind::Exponents: {
        std::string s = "exp:";
        for (size_t k = 0; k < exponents.size(); ++k)
            s += (k ? "," : "") + std::to_string(exponents[k]);
        return s + "/" + std::to_string(modulus);
    }
    }
    return "?";
}

RingClassCharacter CharacterSelector::resolve(FormClassGroup const& g) const
{
    switch (kind) {
    case Kind::Trivial: return characters(g).front();
    case Kind::Index: {
        auto all = characters(g);
        if (static_cast<size_t>(index) >= all.size())
            throw InvalidRequest("character index " + std::to_string(index) + " out of range (" +
                                 std::to_string(all.size()) + " characters)");
        return all[static_cast<size_t>(index)];
    }
    case Kind::Exponents:
        if (exponents.size() != static_cast<size_t>(g.size()))
            throw InvalidRequest("character: need one exponent per class");
        try {
            return character_from_exponents(g, exponents, modulus);
        } catch (std::exception const& ex) {
            throw InvalidRequest(std::string("character: ") + ex.what());
        }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// pipeline

namespace {

const char* const kItemNames[5] = {"p-at-least-5-prime-to-cNDh", "galois-image-surjective", "special-value-nonzero-mod-p",
                                    "p-prime-to-modular-degree", "local-torsion-p-free"};

const char* const kPreamble =
    "Conditional certificate. The hypotheses listed under conditions and the algebraic special value L_value "
    "were computed exactly. The conclusions are instances of the cited theorems and are not checked by this "
    "program. Theorems relied upon: selmer-vanishing (vanishing of the chi-part of the p-Selmer group over the "
    "ring class field when L_K(f,chi,1) is nonzero), selmer-p-power-vanishing (the same for p^n and p^infinity "
    "Selmer and Tate-Shafarevich groups), mordell-weil-chi-vanishing (vanishing of E(H_c)^chi), "
    "trivial-character-selmer-sha (Sel_p(E/K) = Sha(E/K)[p] = 0 for trivial chi), and the special value "
    "formula (L_K(f,chi,1) nonzero if and only if L(f,chi) nonzero).";

struct Refusal
{
    std::string hypothesis;
    Json evidence;
};

/* everything independent of p */
struct Prepared
{
    CertificateRequest req;
    std::optional<Refusal> refusal;
    i64 n_minus = 1, n_plus = 1;
    bool have_classes = false, have_phi = false;
    RightIdealClassSet cls;
    QuaternionicEigenform phi;
    std::optional<FormClassGroup> g;
    RingClassCharacter chi;
    GrossVector gv;
    CyclotomicValue L;
    std::vector<CyclotomicValue> audit_values;
    size_t audit_embeddings = 0;
};

Json curve_json(CurveModel const& e)
{
    Json j;
    j["label"] = e.label;
    j["a"] = e.a;
    j["conductor"] = e.N();
    j["modular_degree"] = e.modular_degree ? Json(*e.modular_degree) : Json();
    return j;
}

Json request_json(CertificateRequest const& r)
{
    Json j;
    j["curve"] = curve_json(r.curve);
    j["D"] = r.D;
    j["c"] = r.c;
    j["character"] = r.character.to_string();
    j["p"] = r.p;
    j["options"] = {{"ell_max", r.options.ell_max},
                    {"q_bound", r.options.q_bound},
                    {"witness_bound", r.options.witness_bound},
                    {"component_samples", r.options.component_samples},
                    {"audit_embeddings", r.options.audit_embeddings}};
    return j;
}

std::optional<Refusal> validate(CertificateRequest const& r, i64& n_minus, i64& n_plus)
{
    const i64 N = r.curve.N();
    if (r.D >= 0 || !is_fundamental_discriminant(r.D))
        return Refusal{"imaginary-quadratic-fundamental-discriminant", {{"D", r.D}}};
    if (std::gcd(r.D, N) != 1)
        return Refusal{"discriminant-prime-to-conductor", {{"D", r.D}, {"N", N}}};
    if (r.c < 1 || std::gcd(r.c, N * r.D) != 1)
        return Refusal{"ring-conductor-prime-to-ND", {{"c", r.c}, {"N", N}, {"D", r.D}}};
    n_minus = 1;
    n_plus = 1;
    Json inert = Json::array();
    bool squarefree = true;
    for (auto const& f : r.curve.conductor.factors) {
        i64 qe = 1;
        for (int k = 0; k < f.exponent; ++k)
            qe *= f.prime;
        if (kronecker(r.D, f.prime) == -1) {
            n_minus *= qe;
            inert.push_back({{"q", f.prime}, {"exponent", f.exponent}});
            squarefree = squarefree && f.exponent == 1;
        } else {
            n_plus *= qe;
        }
    }
    if (!squarefree || inert.size() % 2 == 0)
        return Refusal{"n-minus-squarefree-odd", {{"N_minus", n_minus}, {"inert_primes", inert}}};
    return std::nullopt;
}

Prepared prepare(CertificateRequest const& req)
{
    Prepared pr;
    pr.req = req;
    pr.refusal = validate(req, pr.n_minus, pr.n_plus);
    if (pr.refusal)
        return pr;
    auto const& opt = req.options;
    if (opt.q_bound < 2)
        throw InvalidRequest("q_bound must be at least 2");
    const i64 theta_bound = std::max(kDefaultThetaBound, opt.q_bound);
    pr.cls = load_or_build_class_set(pr.n_minus, pr.n_plus, theta_bound, opt.cache_dir);
    pr.have_classes = true;
    std::map<i64, i64> traces;
    for (i64 q : primes_up_to(opt.q_bound))
        if (req.curve.good_at(q))
            traces[q] = trace_of_frobenius(req.curve, q);
    try {
        pr.phi = eigenform(pr.cls, traces, opt.q_bound);
    } catch (NoEigenvector const& ex) {
        pr.refusal = Refusal{"quaternionic-eigenform", {{"reason", ex.what()}}};
        return pr;
    } catch (Ambiguous const& ex) {
        pr.refusal = Refusal{"quaternionic-eigenform", {{"reason", ex.what()}}};
        return pr;
    } catch (std::invalid_argument const& ex) {
        pr.refusal = Refusal{"quaternionic-eigenform", {{"reason", ex.what()}}};
        return pr;
    }
    pr.have_phi = true;
    pr.g.emplace(QuadOrder::make(req.D, req.c));
    pr.chi = req.character.resolve(*pr.g);
    try {
        auto emb = optimal_embedding(pr.cls, QuadOrder::make(req.D, req.c));
        pr.gv = psi_hat(pr.cls, emb, *pr.g);
    } catch (HeegnerHypothesisViolated const& ex) {
        pr.refusal = Refusal{"heegner-hypothesis", {{"reason", ex.what()}}};
        return pr;
    }
    pr.L = algebraic_special_value(pr.phi.values, pr.gv, pr.chi);
    if (opt.audit_embeddings) {
        constexpr size_t kAuditLimit = 256;
        auto O = QuadOrder::make(req.D, req.c);
        for (int i = 0; i < pr.cls.size() && pr.audit_embeddings < kAuditLimit; ++i)
            for (auto const& e : optimal_embeddings(pr.cls, O, i, kAuditLimit - pr.audit_embeddings)) {
                ++pr.audit_embeddings;
                auto v = algebraic_special_value(pr.phi.values, psi_hat(pr.cls, e, *pr.g), pr.chi);
                if (std::find(pr.audit_values.begin(), pr.audit_values.end(), v) == pr.audit_values.end())
                    pr.audit_values.push_back(v);
            }
    }
    return pr;
}

Json derived_json(Prepared const& pr)
{
    Json d;
    d["N"] = pr.req.curve.N();
    d["N_minus"] = pr.n_minus;
    d["N_plus"] = pr.n_plus;
    if (!pr.have_classes)
        return d;
    auto const& R = pr.cls.order;
    d["algebra"] = {{"a", R.algebra.a}, {"b", R.algebra.b}};
    d["h_B"] = pr.cls.size();
    d["class_weights"] = pr.cls.weights;
    if (!pr.have_phi)
        return d;
    Json phi = Json::array();
    for (Eigen::Index i = 0; i < pr.phi.values.size(); ++i)
        phi.push_back(pr.phi.values(i));
    d["phi"] = phi;
    Json ev = Json::object();
    for (auto const& [q, a] : pr.phi.eigenvalues)
        ev[std::to_string(q)] = a;
    d["eigenvalues"] = ev;
    if (!pr.g)
        return d;
    d["h_c"] = pr.g->size();
    Json forms = Json::array();
    for (auto const& f : pr.g->classes())
        forms.push_back({f.a, f.b, f.c});
    d["forms"] = forms;
    d["chi_order"] = pr.chi.n;
    d["chi_exponents"] = pr.chi.exponents;
    if (pr.refusal)
        return d;
    auto const& e = pr.gv.embedding;
    d["embedding"] = {{"class_index", e.class_index},
                      {"image", std::vector<i64>(e.image.data(), e.image.data() + 4)},
                      {"omega_trace", e.omega_trace},
                      {"omega_norm", e.omega_norm}};
    d["psi_hat"] = pr.gv.map;
    return d;
}

Json conditions_json(ConditionReport const* r)
{
    Json out = Json::array();
    for (int k = 0; k < 5; ++k) {
        Json item;
        item["index"] = k + 1;
        item["hypothesis"] = kItemNames[k];
        if (r) {
            item["status"] = to_string(r->items[static_cast<size_t>(k)].status);
            item["evidence"] = r->items[static_cast<size_t>(k)].evidence;
        } else {
            item["status"] = to_string(CheckStatus::Undetermined);
            item["evidence"] = {{"skipped", "request refused before evaluation"}};
        }
        out.push_back(item);
    }
    return out;
}

Json conclusions_json(Prepared const& pr)
{
    Json out = Json::array();
    auto add = [&](std::string statement, const char* ref) {
        out.push_back({{"statement", std::move(statement)}, {"theorem_ref", ref}});
    };
    const std::string chi = pr.chi.is_trivial() ? "the trivial character" : "chi";
    add("Sel_p(E/H_c) tensored with the chi-isotypic projection vanishes, for chi = " + chi, "selmer-vanishing");
    add("for every n >= 1 the chi-parts of Sel_{p^n}(E/H_c) and of Sha(E/H_c)[p^infinity] vanish",
        "selmer-p-power-vanishing");
    add("E(H_c)^chi = 0", "mordell-weil-chi-vanishing");
    if (pr.chi.is_trivial())
        add("Sel_p(E/K) = 0 and Sha(E/K)[p] = 0", "trivial-character-selmer-sha");
    return out;
}

Certificate finish(Prepared const& pr, i64 p)
{
    Certificate cert;
    Json& j = cert.json;
    j["schema"] = 1;
    j["preamble"] = kPreamble;
    CertificateRequest req = pr.req;
    req.p = p;
    j["request"] = request_json(req);
    j["derived"] = derived_json(pr);

    if (pr.refusal) {
        j["conditions"] = conditions_json(nullptr);
        j["L_value"] = nullptr;
        j["p_ideal"] = nullptr;
        j["admissible"] = Json::array();
        j["aux"] = {{"p_isolated", nullptr}, {"component_ranks", Json::array()}};
        j["status"] = to_string(CertificateStatus::Refused);
        j["refusal"] = {{"hypothesis", pr.refusal->hypothesis}, {"evidence", pr.refusal->evidence}};
        j["conclusions"] = Json::array();
        cert.status = CertificateStatus::Refused;
        return cert;
    }

    auto const& opt = pr.req.options;
    const bool p_prime = p >= 2 && is_prime(p);
    std::optional<IsolationReport> iso;
    if (p_prime)
        iso = p_isolation(pr.cls, pr.phi, p, opt.q_bound);
    AssumptionInputs in{pr.L, iso, opt.witness_bound};
    ConditionReport report = check_assumption(pr.req.curve, *pr.g, p, in);

    j["conditions"] = conditions_json(&report);
    j["L_value"] = {{"n", pr.L.n}, {"coeffs", pr.L.coeffs}};
    if (report.chosen_prime)
        j["p_ideal"] = {{"p", p},
                        {"factor_coeffs", report.chosen_prime->factor.coeffs()},
                        {"residue_degree", report.chosen_prime->residue_degree}};
    else
        j["p_ideal"] = nullptr;

    Json adm = Json::array();
    Json ranks = Json::array();
    if (p_prime && p >= 3) {
        auto found = find_admissible(pr.req.curve, pr.req.D, pr.req.c, p, opt.ell_max);
        for (auto const& a : found)
            adm.push_back({{"ell", a.ell}, {"epsilon", a.epsilon}, {"a_ell", a.a_ell}});
        for (size_t k = 0; k < found.size() && k < static_cast<size_t>(opt.component_samples); ++k) {
            auto r = component_group_rank(pr.cls, pr.phi, p, found[k].ell, found[k].a_ell, opt.q_bound);
            ranks.push_back({{"ell", found[k].ell},
                             {"epsilon", r.epsilon},
                             {"rank", r.rank},
                             {"quotient_dim", r.quotient_dim},
                             {"image_identity", r.image_identity},
                             {"plus_invertible", r.plus_invertible}});
        }
    }
    j["admissible"] = adm;
    Json aux;
    aux["p_isolated"] = iso ? Json(iso->isolated) : Json();
    if (iso)
        aux["p_isolation"] = {{"generalized_kernel_dim", iso->generalized_kernel_dim},
                              {"plain_kernel_dim", iso->plain_kernel_dim},
                              {"degree_zero_quotient_dim", iso->degree_zero_quotient_dim}};
    aux["component_ranks"] = ranks;
    if (opt.audit_embeddings) {
        bool unanimous = true;
        if (p_prime && pr.L.n % p != 0) {
            auto nonzero = [&](CyclotomicValue const& v) {
                for (i64 c : v.coeffs)
                    if (mod(c, p) != 0)
                        return true;
                return false;
            };
            const bool base = nonzero(pr.L);
            for (auto const& v : pr.audit_values)
                unanimous = unanimous && nonzero(v) == base;
        }
        Json values = Json::array();
        for (auto const& v : pr.audit_values)
            values.push_back(v.coeffs);
        aux["embedding_audit"] = {{"embeddings", pr.audit_embeddings},
                                  {"distinct_L_values", values},
                                  {"unanimous_nonvanishing_mod_p", unanimous}};
    }
    j["aux"] = aux;

    if (int k = report.first_failure()) {
        cert.status = CertificateStatus::Refused;
        j["status"] = to_string(cert.status);
        j["refusal"] = {{"hypothesis", kItemNames[k - 1]},
                        {"evidence", report.items[static_cast<size_t>(k - 1)].evidence}};
        j["conclusions"] = Json::array();
    } else if (report.all_verified() && !pr.L.is_zero() && report.chosen_prime) {
        cert.status = CertificateStatus::Full;
        j["status"] = to_string(cert.status);
        j["refusal"] = nullptr;
        j["conclusions"] = conclusions_json(pr);
    } else {
        cert.status = CertificateStatus::Partial;
        j["status"] = to_string(cert.status);
        j["refusal"] = nullptr;
        j["conclusions"] = Json::array();
    }
    return cert;
}

} // namespace

Certificate certify(CertificateRequest const& req)
{
    return finish(prepare(req), req.p);
}

std::vector<Certificate> certify_range(CertificateRequest const& req, i64 p_lo, i64 p_hi)
{
    if (p_lo > p_hi)
        throw InvalidRequest("empty p range");
    const Prepared pr = prepare(req);
    std::vector<std::future<Certificate>> jobs;
    for (i64 p : primes_up_to(p_hi))
        if (p >= p_lo)
            jobs.push_back(std::async(std::launch::async, [&pr, p] { return finish(pr, p); }));
    std::vector<Certificate> out;
    for (auto& f : jobs)
        out.push_back(f.get());
    return out;
}

// ---------------------------------------------------------------------------
// revalidation

namespace {

CertificateRequest request_from_json(Json const& j)
{
    CertificateRequest r;
    auto const& cj = j.at("curve");
    std::optional<i64> deg;
    if (!cj.at("modular_degree").is_null())
        deg = cj.at("modular_degree").get<i64>();
    r.curve = CurveModel::make(cj.at("label").get<std::string>(), cj.at("a").get<std::array<i64, 5>>(),
                               cj.at("conductor").get<i64>(), deg);
    r.D = j.at("D").get<i64>();
    r.c = j.at("c").get<i64>();
    r.character = CharacterSelector::parse(j.at("character").get<std::string>());
    r.p = j.at("p").get<i64>();
    auto const& o = j.at("options");
    r.options.ell_max = o.at("ell_max").get<i64>();
    r.options.q_bound = o.at("q_bound").get<i64>();
    r.options.witness_bound = o.at("witness_bound").get<i64>();
    r.options.component_samples = o.at("component_samples").get<int>();
    r.options.audit_embeddings = o.at("audit_embeddings").get<bool>();
    return r;
}

} // namespace

RevalidationResult revalidate(Json const& cert, std::string const& cache_dir)
{
    RevalidationResult res;
    auto problem = [&](std::string msg) {
        res.ok = false;
        res.problems.push_back(std::move(msg));
    };
    try {
        if (cert.at("schema").get<int>() != 1)
            problem("unknown schema");
        CertificateRequest req = request_from_json(cert.at("request"));
        req.options.cache_dir = cache_dir;
        const std::string status = cert.at("status").get<std::string>();
        auto const& conclusions = cert.at("conclusions");

        // checks read directly off the evidence
        if ((status == "full") != !conclusions.empty())
            problem("conclusions present iff status is full");
        if (status == "full") {
            for (auto const& item : cert.at("conditions"))
                if (item.at("status").get<std::string>() != "verified")
                    problem("full certificate with an unverified condition");
            auto const& L = cert.at("L_value");
            auto const& P = cert.at("p_ideal");
            if (P.is_null()) {
                problem("full certificate without a prime above p");
            } else {
                CyclotomicValue v{L.at("n").get<int>(), L.at("coeffs").get<std::vector<i64>>()};
                const i64 p = P.at("p").get<i64>();
                PolyModP factor(P.at("factor_coeffs").get<std::vector<i64>>(), p);
                PolyModP phi(cyclotomic_polynomial(v.n), p);
                if (factor.degree() < 1 || !(phi % factor).is_zero())
                    problem("p_ideal factor does not divide the cyclotomic polynomial mod p");
                else if ((PolyModP(v.coeffs, p) % factor).is_zero())
                    problem("L_value vanishes modulo the recorded prime");
            }
        }
        for (auto const& a : cert.at("admissible")) {
            auto chk = is_admissible(a.at("ell").get<i64>(), req.curve, req.D, req.c, req.p);
            if (!chk.admissible || chk.prime->epsilon != a.at("epsilon").get<int>() ||
                chk.prime->a_ell != a.at("a_ell").get<i64>())
                problem("admissible prime " + a.at("ell").dump() + " does not re-verify");
        }

        // full recomputation
        Certificate again = certify(req);
        if (again.json != cert)
            problem("recomputed certificate differs from the recorded one");
    } catch (std::exception const& ex) {
        problem(std::string("malformed certificate: ") + ex.what());
    }
    return res;
}

} // namespace qcert
