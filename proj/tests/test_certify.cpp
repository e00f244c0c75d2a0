#include "doctest.h"

#include "qcert/certify.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qcert;

namespace {

const char* const kTable = "label,a1,a2,a3,a4,a6,conductor,modular_degree\n"
                           "11a1,0,-1,1,-10,-20,11,1\n"
                           "15a1,1,1,1,-10,-10,15,1\n"
                           "37a1,0,0,1,-1,0,37,2\n"
                           "37b1,0,1,1,-23,-50,37,\n";

CurveTable table()
{
    std::istringstream in(kTable);
    return parse_curve_table(in);
}

CertificateRequest request(std::string const& label, i64 D, i64 c, i64 p)
{
    CertificateRequest r;
    r.curve = table().find(label);
    r.D = D;
    r.c = c;
    r.p = p;
    return r;
}

std::string temp_dir(std::string const& name)
{
    auto d = std::filesystem::temp_directory_path() / ("qcert-test-" + name);
    std::filesystem::remove_all(d);
    return d.string();
}

int run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "qcert");
    std::vector<char*> argv;
    for (auto& a : args)
        argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST_CASE("curve table ingestion")
{
    auto t = table();
    REQUIRE(t.rows.size() == 4);
    auto const& e = t.find("11a1");
    CHECK(e.N() == 11);
    CHECK(e.modular_degree == 1);
    CHECK(e.discriminant == -161051); // -11^5
    CHECK_FALSE(t.find("37b1").modular_degree);
    CHECK_THROWS_AS(t.find("99z9"), InvalidRequest);

    std::istringstream bad("11a1,0,-1,1,-10,-20,11,1\n11a2,0,-1,1,x,-20,11\n");
    try {
        parse_curve_table(bad, "t.csv");
        FAIL("expected a parse error");
    } catch (ParseError const& ex) {
        CHECK(std::string(ex.what()).find("t.csv:2") != std::string::npos);
    }
    std::istringstream dup("11a1,0,-1,1,-10,-20,11,1\n11a1,0,-1,1,-10,-20,11,1\n");
    CHECK_THROWS_AS(parse_curve_table(dup), ParseError);
    std::istringstream wrong("11a1,0,-1,1,-10,-20,13,1\n");
    CHECK_THROWS_AS(parse_curve_table(wrong), ParseError);
    std::istringstream fields("11a1,0,-1,1\n");
    CHECK_THROWS_AS(parse_curve_table(fields), ParseError);
}

TEST_CASE("character selectors")
{
    auto g = class_group(QuadOrder::make(-3, 5));
    CHECK(CharacterSelector::parse("trivial").resolve(g).is_trivial());
    auto s = CharacterSelector::parse("1");
    CHECK(s.resolve(g).n == 2);
    CHECK(CharacterSelector::parse(s.to_string()).index == 1);
    auto e = CharacterSelector::parse("exp:0,1/2");
    CHECK(e.resolve(g).n == 2);
    CHECK(e.to_string() == "exp:0,1/2");
    CHECK_THROWS_AS(CharacterSelector::parse("2").resolve(g), InvalidRequest);
    CHECK_THROWS_AS(CharacterSelector::parse("exp:1,1/2").resolve(g), InvalidRequest);
    CHECK_THROWS_AS(CharacterSelector::parse("odd"), InvalidRequest);
}

TEST_CASE("full certificate for 11a1")
{
    auto c = certify(request("11a1", -3, 1, 7));
    CHECK(c.status == CertificateStatus::Full);
    CHECK(c.json["conclusions"].size() == 4);
    CHECK(c.json["L_value"]["coeffs"] == Json::array({-3}));
    CHECK(c.json["aux"]["p_isolated"] == true);
    CHECK(c.json["aux"]["component_ranks"][0]["rank"] == 1);
    auto again = certify(request("11a1", -3, 1, 7));
    CHECK(again.serialize() == c.serialize());
    auto rv = revalidate(Json::parse(c.serialize()));
    CHECK(rv.ok);

    Json tampered = Json::parse(c.serialize());
    tampered["L_value"]["coeffs"] = Json::array({7});
    CHECK_FALSE(revalidate(tampered).ok);
    Json tampered2 = Json::parse(c.serialize());
    tampered2["admissible"].push_back({{"ell", 13}, {"epsilon", 1}, {"a_ell", 4}});
    CHECK_FALSE(revalidate(tampered2).ok);
}

TEST_CASE("refusals name the failed hypothesis")
{
    struct Case
    {
        std::string label;
        i64 D, c, p;
        const char* hypothesis;
    };
    const Case cases[] = {
        {"11a1", -3, 1, 2, "p-at-least-5-prime-to-cNDh"},
        {"11a1", -3, 1, 3, "p-at-least-5-prime-to-cNDh"},
        {"11a1", -3, 1, 11, "p-at-least-5-prime-to-cNDh"},          // p | N
        {"11a1", -3, 5, 5, "p-at-least-5-prime-to-cNDh"},           // p | c
        {"11a1", -23, 1, 23, "p-at-least-5-prime-to-cNDh"},         // p | D
        {"11a1", -47, 1, 5, "p-at-least-5-prime-to-cNDh"},          // p | h = 5
        {"11a1", -7, 1, 7, "n-minus-squarefree-odd"},               // 11 splits: no inert prime
        {"15a1", -7, 1, 7, "n-minus-squarefree-odd"},               // 3 and 5 both inert
        {"11a1", -3, 11, 7, "ring-conductor-prime-to-ND"},          // c | N
        {"11a1", -3, 3, 7, "ring-conductor-prime-to-ND"},           // c | D
        {"11a1", -11, 1, 7, "discriminant-prime-to-conductor"},
        {"11a1", 5, 1, 7, "imaginary-quadratic-fundamental-discriminant"},
        {"37a1", -8, 1, 7, "special-value-nonzero-mod-p"},          // rank one: L = 0
    };
    for (auto const& k : cases) {
        CAPTURE(k.label);
        CAPTURE(k.D);
        CAPTURE(k.c);
        CAPTURE(k.p);
        auto cert = certify(request(k.label, k.D, k.c, k.p));
        CHECK(cert.status == CertificateStatus::Refused);
        CHECK(cert.json["refusal"]["hypothesis"] == k.hypothesis);
        CHECK(cert.json["conclusions"].empty());
    }
}

TEST_CASE("missing modular degree gives a partial certificate")
{
    auto cert = certify(request("37b1", -8, 1, 7));
    CHECK(cert.json["conditions"][3]["status"] == "undetermined");
    CHECK(cert.json["conditions"][3]["evidence"].contains("corroborating_p_isolation"));
    CHECK(cert.status == CertificateStatus::Partial);
    CHECK(cert.json["conclusions"].empty());
}

TEST_CASE("p ranges")
{
    auto certs = certify_range(request("11a1", -3, 1, 0), 5, 20);
    REQUIRE(certs.size() == 6); // 5 7 11 13 17 19
    CHECK(certs[0].json["request"]["p"] == 5);
    CHECK(certs[0].status == CertificateStatus::Partial); // 11a1 has a rational 5-isogeny
    CHECK(certs[1].status == CertificateStatus::Full);
    CHECK(certs[2].status == CertificateStatus::Refused);
    for (auto const& c : certs)
        CHECK(c.serialize() == certify(request("11a1", -3, 1, c.json["request"]["p"].get<i64>())).serialize());
}

TEST_CASE("class set cache")
{
    const auto dir = temp_dir("cache");
    bool hit = true;
    auto built = load_or_build_class_set(11, 3, 20, dir, &hit);
    CHECK_FALSE(hit);
    auto path = cache_path(dir, 11, 3);
    REQUIRE(std::filesystem::exists(path));
    auto loaded = load_or_build_class_set(11, 3, 20, dir, &hit);
    CHECK(hit);
    CHECK(loaded.ideals == built.ideals);
    CHECK(loaded.weights == built.weights);
    CHECK(loaded.theta == built.theta);
    // asking for more theta data rebuilds
    load_or_build_class_set(11, 3, 30, dir, &hit);
    CHECK_FALSE(hit);
    // corruption is detected and repaired
    {
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        std::string s = buf.str();
        auto pos = s.find("\"weights\":[");
        REQUIRE(pos != std::string::npos);
        s[pos + 11] = s[pos + 11] == '2' ? '4' : '2';
        std::ofstream out(path, std::ios::trunc);
        out << s;
    }
    auto repaired = load_or_build_class_set(11, 3, 30, dir, &hit);
    CHECK_FALSE(hit);
    CHECK(repaired.weights == built.weights);
    load_or_build_class_set(11, 3, 30, dir, &hit);
    CHECK(hit);
    // a forged payload with a consistent hash is still checked
    auto R = eichler_order(build_algebra(factorize(11)), 3);
    Json payload = class_set_to_json(built);
    CHECK(class_set_from_json(payload, R));
    Json forged = payload;
    forged["weights"][0] = forged["weights"][0].get<i64>() * 2;
    CHECK_FALSE(class_set_from_json(forged, R));
    forged = payload;
    forged["theta"][0][0][1] = forged["theta"][0][0][1].get<i64>() + 1;
    CHECK_FALSE(class_set_from_json(forged, R));
    forged = payload;
    for (auto [i, j] : {std::pair<int, int>{0, 1}, {1, 0}})
        forged["theta"][i][j][2] = forged["theta"][i][j][2].get<i64>() + forged["weights"][j].get<i64>();
    CHECK_FALSE(class_set_from_json(forged, R));
    std::filesystem::remove_all(dir);
}

TEST_CASE("cached and uncached certificates agree")
{
    const auto dir = temp_dir("cert-cache");
    auto r = request("11a1", -3, 5, 7);
    r.character = CharacterSelector::parse("1");
    auto plain = certify(r);
    r.options.cache_dir = dir;
    auto first = certify(r);
    auto second = certify(r);
    CHECK(plain.serialize() == first.serialize());
    CHECK(first.serialize() == second.serialize());
    std::filesystem::remove_all(dir);
}

TEST_CASE("embedding audit")
{
    auto r = request("11a1", -4, 1, 7);
    r.options.audit_embeddings = true;
    auto cert = certify(r);
    auto const& audit = cert.json["aux"]["embedding_audit"];
    CHECK(audit["embeddings"].get<int>() >= 1);
    CHECK(audit["distinct_L_values"].size() >= 1);
    CHECK(audit.contains("unanimous_nonvanishing_mod_p"));
}

TEST_CASE("command line exit codes")
{
    const auto dir = temp_dir("cli");
    std::filesystem::create_directories(dir);
    const std::string csv = dir + "/curves.csv";
    {
        std::ofstream out(csv);
        out << kTable;
    }
    const std::string out = dir + "/cert.json";
    CHECK(run_cli({"certify", "--curve-table", csv, "--label", "11a1", "--disc", "-3", "--cond", "1", "--char",
                   "trivial", "--p", "7", "--json", out}) == 0);
    CHECK(std::filesystem::exists(out));
    CHECK(run_cli({"certify", "--revalidate", out}) == 0);
    CHECK(run_cli({"certify", "--curve-table", csv, "--label", "11a1", "--disc", "-3", "--p", "3", "--json",
                   dir + "/r.json"}) == 2);
    CHECK(run_cli({"certify", "--curve-table", csv, "--label", "11a1", "--disc", "-3", "--p-range", "5:8", "--json",
                   dir + "/range.json"}) == 0);
    CHECK(run_cli({"certify", "--unknown-flag"}) == 64);
    CHECK(run_cli({"certify", "--curve-table", csv, "--label", "nope", "--disc", "-3", "--p", "7"}) == 64);
    CHECK(run_cli({"certify", "--curve-table", dir + "/missing.csv", "--label", "11a1", "--disc", "-3", "--p",
                   "7"}) == 1);
    CHECK(run_cli({"frobnicate"}) == 64);
    std::filesystem::remove_all(dir);
}
