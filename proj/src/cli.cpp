#include "qcert/certify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace qcert {

namespace {

constexpr int kExitFull = 0;
constexpr int kExitInfrastructure = 1;
constexpr int kExitNotFull = 2;
constexpr int kExitUsage = 64;

struct CurveArgs
{
    std::string table;
    std::string label;
    std::string coeffs;
    i64 conductor = 0;
    i64 degree = 0;

    void add(CLI::App* app)
    {
        app->add_option("--curve-table", table, "CSV: label,a1,a2,a3,a4,a6,conductor[,modular_degree]");
        app->add_option("--label", label, "curve label in the table");
        app->add_option("--curve", coeffs, "a1,a2,a3,a4,a6 (instead of a table)");
        app->add_option("--conductor", conductor, "conductor for --curve");
        app->add_option("--degree", degree, "modular degree for --curve");
    }

    CurveModel resolve() const
    {
        if (!table.empty()) {
            if (label.empty())
                throw InvalidRequest("--curve-table needs --label");
            return ingest_curve_table(table).find(label);
        }
        if (coeffs.empty() || conductor < 1)
            throw InvalidRequest("give --curve-table/--label or --curve/--conductor");
        std::array<i64, 5> a{};
        std::stringstream in(coeffs);
        std::string tok;
        size_t k = 0;
        while (std::getline(in, tok, ',')) {
            if (k == 5)
                throw InvalidRequest("--curve takes five coefficients");
            try {
                a[k++] = std::stoll(tok);
            } catch (std::exception const&) {
                throw InvalidRequest("--curve: bad coefficient '" + tok + "'");
            }
        }
        if (k != 5)
            throw InvalidRequest("--curve takes five coefficients");
        std::optional<i64> deg;
        if (degree > 0)
            deg = degree;
        try {
            return CurveModel::make(label.empty() ? "custom" : label, a, conductor, deg);
        } catch (std::exception const& ex) {
            throw InvalidRequest(std::string("--curve: ") + ex.what());
        }
    }
};

std::pair<i64, i64> parse_range(std::string const& s)
{
    auto colon = s.find(':');
    try {
        if (colon == std::string::npos)
            throw std::invalid_argument(s);
        return {std::stoll(s.substr(0, colon)), std::stoll(s.substr(colon + 1))};
    } catch (std::exception const&) {
        throw InvalidRequest("--p-range expects LO:HI, got '" + s + "'");
    }
}

void emit(std::string const& text, std::string const& path)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush())
        throw InfrastructureError("cannot write " + path);
}

Json matrix_json(IntMatrix const& m)
{
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<i64> row(static_cast<size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row[static_cast<size_t>(c)] = m(r, c);
        out.push_back(row);
    }
    return out;
}

} // namespace

int cli_main(int argc, char** argv)
{
    CLI::App app{"qcert: hypotheses and special values for Selmer vanishing certificates"};
    app.require_subcommand(1);

    CurveArgs curve;
    i64 disc = 0, cond = 1, p = 0;
    std::string chi = "trivial", p_range, json_out, cache, revalidate_path;
    CertifyOptions opt;

    auto* cert = app.add_subcommand("certify", "certify one request, a range of p, or re-check a certificate");
    curve.add(cert);
    cert->add_option("--disc", disc, "fundamental discriminant D < 0");
    cert->add_option("--cond", cond, "ring class conductor c")->capture_default_str();
    cert->add_option("--char", chi, "trivial | index | exp:e1,...,eh/m")->capture_default_str();
    auto* p_opt = cert->add_option("--p", p, "prime p");
    auto* r_opt = cert->add_option("--p-range", p_range, "LO:HI");
    p_opt->excludes(r_opt);
    cert->add_option("--ell-max", opt.ell_max)->capture_default_str();
    cert->add_option("--q-bound", opt.q_bound)->capture_default_str();
    cert->add_option("--witness-bound", opt.witness_bound)->capture_default_str();
    cert->add_option("--component-samples", opt.component_samples)->capture_default_str();
    cert->add_flag("--audit-embeddings", opt.audit_embeddings, "recompute L with every optimal embedding");
    cert->add_option("--cache", cache, "class set cache directory (else QCERT_CACHE_DIR)");
    cert->add_option("--json", json_out, "write the certificate here instead of standard output");
    cert->add_option("--revalidate", revalidate_path, "re-check a certificate file");

    auto* scan = app.add_subcommand("scan-admissible", "list admissible primes");
    curve.add(scan);
    scan->add_option("--disc", disc)->required();
    scan->add_option("--cond", cond)->capture_default_str();
    scan->add_option("--p", p)->required();
    scan->add_option("--ell-max", opt.ell_max)->capture_default_str();

    i64 n_minus = 0, n_plus = 1;
    std::vector<i64> ns;
    auto* brandt = app.add_subcommand("brandt", "dump Brandt matrices");
    brandt->add_option("--n-minus", n_minus)->required();
    brandt->add_option("--n-plus", n_plus)->capture_default_str();
    brandt->add_option("--n", ns, "indices (default: good primes up to 13)");
    brandt->add_option("--cache", cache);

    auto* cg = app.add_subcommand("class-group", "reduced forms and characters of O_c");
    cg->add_option("--disc", disc)->required();
    cg->add_option("--cond", cond)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*cert) {
            opt.cache_dir = cache_dir_from_environment(cache);
            if (!revalidate_path.empty()) {
                std::ifstream in(revalidate_path);
                if (!in)
                    throw InfrastructureError("cannot read " + revalidate_path);
                std::stringstream buf;
                buf << in.rdbuf();
                Json j = Json::parse(buf.str(), nullptr, false);
                if (j.is_discarded())
                    throw InvalidRequest(revalidate_path + " is not JSON");
                // --p-range writes an array of certificates
                Json certs = j.is_array() ? j : Json::array({j});
                bool ok = !certs.empty();
                for (size_t k = 0; k < certs.size(); ++k) {
                    auto r = revalidate(certs[k], opt.cache_dir);
                    for (auto const& msg : r.problems)
                        std::cerr << "revalidate"
                                  << (j.is_array() ? "[" + std::to_string(k) + "]" : std::string()) << ": " << msg
                                  << "\n";
                    ok = ok && r.ok;
                }
                std::cout << (ok ? "revalidation passed" : "revalidation FAILED") << "\n";
                return ok ? kExitFull : kExitNotFull;
            }
            if (disc == 0)
                throw InvalidRequest("--disc is required");
            CertificateRequest req;
            req.curve = curve.resolve();
            req.D = disc;
            req.c = cond;
            req.character = CharacterSelector::parse(chi);
            req.options = opt;
            if (!p_range.empty()) {
                auto [lo, hi] = parse_range(p_range);
                auto certs = certify_range(req, lo, hi);
                Json arr = Json::array();
                bool any_full = false;
                for (auto const& c : certs) {
                    arr.push_back(c.json);
                    any_full = any_full || c.status == CertificateStatus::Full;
                    std::cerr << "p=" << c.json["request"]["p"] << ": " << to_string(c.status) << "\n";
                }
                emit(arr.dump(2) + "\n", json_out);
                return any_full ? kExitFull : kExitNotFull;
            }
            if (p == 0)
                throw InvalidRequest("give --p or --p-range");
            req.p = p;
            auto c = certify(req);
            emit(c.serialize(), json_out);
            if (!json_out.empty())
                std::cout << "status: " << to_string(c.status) << "\n";
            return c.status == CertificateStatus::Full ? kExitFull : kExitNotFull;
        }
        if (*scan) {
            auto e = curve.resolve();
            Json arr = Json::array();
            for (auto const& a : find_admissible(e, disc, cond, p, opt.ell_max))
                arr.push_back({{"ell", a.ell}, {"epsilon", a.epsilon}, {"a_ell", a.a_ell}});
            std::cout << arr.dump(2) << "\n";
            return kExitFull;
        }
        if (*brandt) {
            auto cls = load_or_build_class_set(n_minus, n_plus, kDefaultThetaBound, cache_dir_from_environment(cache));
            if (ns.empty())
                for (i64 q : primes_up_to(13))
                    if (n_minus % q != 0)
                        ns.push_back(q);
            Json j;
            j["n_minus"] = n_minus;
            j["n_plus"] = n_plus;
            j["weights"] = cls.weights;
            Json mats = Json::object();
            for (i64 n : ns)
                mats[std::to_string(n)] = matrix_json(brandt_matrix(cls, n));
            j["brandt"] = mats;
            std::cout << j.dump(2) << "\n";
            return kExitFull;
        }
        if (*cg) {
            auto g = class_group(QuadOrder::make(disc, cond));
            Json j;
            j["disc"] = g.order().disc;
            j["h"] = g.size();
            Json forms = Json::array();
            for (auto const& f : g.classes())
                forms.push_back({f.a, f.b, f.c});
            j["forms"] = forms;
            Json chars = Json::array();
            for (auto const& x : characters(g))
                chars.push_back({{"order", x.n}, {"exponents", x.exponents}});
            j["characters"] = chars;
            std::cout << j.dump(2) << "\n";
            return kExitFull;
        }
    } catch (InvalidRequest const& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (ParseError const& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (InfrastructureError const& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInfrastructure;
    } catch (std::domain_error const& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (std::invalid_argument const& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (std::exception const& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInfrastructure;
    }
    return kExitUsage;
}

} // namespace qcert
