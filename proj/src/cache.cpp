#include "qcert/certify.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace qcert {

// ---------------------------------------------------------------------------
// curve table

CurveModel const& CurveTable::find(std::string const& label) const
{
    for (auto const& e : rows)
        if (e.label == label)
            return e;
    throw InvalidRequest("curve label not in table: " + label);
}

namespace {

std::string trim(std::string s)
{
    auto ws = [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n'; };
    while (!s.empty() && ws(s.back()))
        s.pop_back();
    size_t k = 0;
    while (k < s.size() && ws(s[k]))
        ++k;
    return s.substr(k);
}

std::vector<std::string> split(std::string const& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

std::optional<i64> parse_int(std::string const& s)
{
    i64 v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

} // namespace

CurveTable parse_curve_table(std::istream& in, std::string const& source)
{
    CurveTable table;
    std::set<std::string> labels;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        auto where = source + ":" + std::to_string(lineno) + ": ";
        auto f = split(line, ',');
        if (f.size() >= 1 && f[0] == "label")
            continue;
        if (f.size() != 7 && f.size() != 8)
            throw ParseError(where + "expected 7 or 8 fields, got " + std::to_string(f.size()));
        if (f[0].empty())
            throw ParseError(where + "empty label");
        std::array<i64, 5> a{};
        for (size_t k = 0; k < 5; ++k) {
            auto v = parse_int(f[k + 1]);
            if (!v)
                throw ParseError(where + "bad integer '" + f[k + 1] + "'");
            a[k] = *v;
        }
        auto N = parse_int(f[6]);
        if (!N || *N < 1)
            throw ParseError(where + "bad conductor '" + f[6] + "'");
        std::optional<i64> deg;
        if (f.size() == 8 && !f[7].empty()) {
            deg = parse_int(f[7]);
            if (!deg || *deg < 1)
                throw ParseError(where + "bad modular degree '" + f[7] + "'");
        }
        if (!labels.insert(f[0]).second)
            throw ParseError(where + "duplicate label " + f[0]);
        try {
            table.rows.push_back(CurveModel::make(f[0], a, *N, deg));
        } catch (std::exception const& ex) {
            throw ParseError(where + "curve " + f[0] + ": " + ex.what());
        }
    }
    return table;
}

CurveTable ingest_curve_table(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw InfrastructureError("cannot open curve table " + path);
    return parse_curve_table(in, path);
}

// ---------------------------------------------------------------------------
// class set cache

namespace {

constexpr int kCacheFormat = 1;

u64 fnv1a(std::string const& s)
{
    u64 h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(u64 v)
{
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int k = 15; k >= 0; --k) {
        s[static_cast<size_t>(k)] = digits[v & 15];
        v >>= 4;
    }
    return s;
}

Json rows_json(IntMatrix const& m)
{
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

Mat4 mat4_from_json(Json const& j)
{
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("bad 4x4 matrix");
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
        if (!j[static_cast<size_t>(r)].is_array() || j[static_cast<size_t>(r)].size() != 4)
            throw std::invalid_argument("bad 4x4 matrix");
        for (int c = 0; c < 4; ++c)
            m(r, c) = j[static_cast<size_t>(r)][static_cast<size_t>(c)].get<i64>();
    }
    return m;
}

bool is_hnf(Mat4 const& h)
{
    for (int r = 0; r < 4; ++r) {
        if (h(r, r) <= 0)
            return false;
        for (int c = 0; c < r; ++c)
            if (h(r, c) != 0)
                return false;
        for (int k = 0; k < r; ++k)
            if (h(k, r) < 0 || h(k, r) >= h(r, r))
                return false;
    }
    return true;
}

} // namespace

std::string cache_dir_from_environment(std::string const& flag_value)
{
    if (!flag_value.empty())
        return flag_value;
    if (const char* env = std::getenv("QCERT_CACHE_DIR"))
        return env;
    return {};
}

std::string cache_path(std::string const& dir, i64 n_minus, i64 n_plus)
{
    return (std::filesystem::path(dir) / ("classes-" + std::to_string(n_minus) + "-" + std::to_string(n_plus) + ".json"))
        .string();
}

Json class_set_to_json(RightIdealClassSet const& cls)
{
    auto const& R = cls.order;
    Json j;
    j["format"] = kCacheFormat;
    j["n_minus"] = R.n_minus;
    j["n_plus"] = R.level;
    j["algebra"] = {{"a", R.algebra.a}, {"b", R.algebra.b}};
    j["order"] = {{"basis", rows_json(R.basis)}, {"denominator", R.denominator}, {"gram", rows_json(R.gram)}};
    j["neighbor_prime"] = cls.neighbor_prime;
    Json ideals = Json::array();
    for (auto const& I : cls.ideals)
        ideals.push_back({{"basis", rows_json(I.basis)}, {"norm", I.norm}});
    j["ideals"] = ideals;
    j["weights"] = cls.weights;
    j["theta_bound"] = cls.theta_bound;
    j["theta"] = cls.theta;
    Json brandt = Json::object();
    for (i64 q : primes_up_to(cls.theta_bound))
        if (R.n_minus % q != 0)
            brandt[std::to_string(q)] = rows_json(brandt_matrix(cls, q));
    j["brandt"] = brandt;
    return j;
}

std::optional<RightIdealClassSet> class_set_from_json(Json const& j, EichlerOrder const& R)
{
    try {
        if (j.at("format").get<int>() != kCacheFormat || j.at("n_minus").get<i64>() != R.n_minus ||
            j.at("n_plus").get<i64>() != R.level || j.at("algebra").at("a").get<i64>() != R.algebra.a ||
            j.at("algebra").at("b").get<i64>() != R.algebra.b ||
            mat4_from_json(j.at("order").at("basis")) != R.basis ||
            j.at("order").at("denominator").get<i64>() != R.denominator)
            return std::nullopt;
        RightIdealClassSet cls;
        cls.order = R;
        cls.neighbor_prime = j.at("neighbor_prime").get<i64>();
        for (auto const& ij : j.at("ideals")) {
            RightIdeal I{mat4_from_json(ij.at("basis")), ij.at("norm").get<i64>()};
            if (!is_hnf(I.basis) || I.basis.diagonal().prod() != I.norm * I.norm || !is_right_ideal(R, I))
                return std::nullopt;
            cls.ideals.push_back(I);
        }
        cls.weights = j.at("weights").get<std::vector<i64>>();
        cls.theta_bound = j.at("theta_bound").get<i64>();
        cls.theta = j.at("theta").get<std::vector<std::vector<std::vector<i64>>>>();
        const size_t h = cls.ideals.size();
        if (h == 0 || cls.weights.size() != h || cls.theta.size() != h)
            return std::nullopt;
        if (!(cls.ideals[0] == unit_ideal()))
            return std::nullopt;
        for (size_t i = 0; i < h; ++i) {
            if (cls.weights[i] != unit_count(R, cls.ideals[i]))
                return std::nullopt;
            if (cls.theta[i].size() != h)
                return std::nullopt;
            for (size_t k = 0; k < h; ++k)
                if (cls.theta[i][k].size() != static_cast<size_t>(cls.theta_bound + 1) ||
                    cls.theta[i][k] != cls.theta[k][i])
                    return std::nullopt;
        }
        if (cls.mass() != eichler_mass(R.n_minus, R.level))
            return std::nullopt;
        // Brandt sanity on the stored theta data
        for (size_t i = 0; i < h; ++i)
            for (size_t k = 0; k < h; ++k)
                for (size_t n = 0; n < cls.theta[i][k].size(); ++n) {
                    const i64 s = cls.theta[i][k][n];
                    if (n == 0 ? s != 1 : (s < 0 || s % cls.weights[k] != 0))
                        return std::nullopt;
                }
        const Eigen::Index hh = static_cast<Eigen::Index>(h);
        if (cls.theta_bound < 1 || brandt_matrix(cls, 1) != IntMatrix::Identity(hh, hh))
            return std::nullopt;
        std::vector<IntMatrix> hecke;
        for (i64 q : primes_up_to(cls.theta_bound)) {
            if (R.discriminant() % q == 0)
                continue;
            IntMatrix B = brandt_matrix(cls, q);
            for (Eigen::Index r = 0; r < hh; ++r)
                if (B.row(r).sum() != q + 1)
                    return std::nullopt;
            hecke.push_back(B);
        }
        for (size_t a = 0; a < hecke.size(); ++a)
            for (size_t b = a + 1; b < hecke.size(); ++b)
                if (hecke[a] * hecke[b] != hecke[b] * hecke[a])
                    return std::nullopt;
        for (size_t i = 0; i < h; ++i)
            for (size_t k = i + 1; k < h; ++k)
                if (same_ideal_class(R, cls.ideals[i], cls.ideals[k]))
                    return std::nullopt;
        return cls;
    } catch (std::exception const&) {
        return std::nullopt;
    }
}

namespace {

void write_atomically(std::string const& path, std::string const& content)
{
    namespace fs = std::filesystem;
    static std::atomic<u64> counter{0};
    std::error_code ec;
    fs::create_directories(fs::path(path).parent_path(), ec);
    if (ec)
        throw InfrastructureError("cannot create cache directory: " + ec.message());
    std::ostringstream tag;
    tag << std::this_thread::get_id() << "." << counter++;
    const std::string tmp = path + ".tmp." + tag.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InfrastructureError("cannot write cache file " + tmp);
        out << content;
        if (!out.flush())
            throw InfrastructureError("cannot write cache file " + tmp);
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InfrastructureError("cannot move cache file into place: " + path);
    }
}

} // namespace

RightIdealClassSet load_or_build_class_set(i64 n_minus, i64 n_plus, i64 theta_bound, std::string const& cache_dir,
                                           bool* from_cache)
{
    if (from_cache)
        *from_cache = false;
    EichlerOrder R = eichler_order(build_algebra(factorize(n_minus)), n_plus);
    if (cache_dir.empty())
        return ideal_class_set(R, theta_bound);
    const std::string path = cache_path(cache_dir, n_minus, n_plus);
    if (std::filesystem::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        Json file = Json::parse(buf.str(), nullptr, false);
        if (!file.is_discarded() && file.is_object() && file.contains("payload") && file.contains("hash") &&
            file["hash"].is_string() && file["hash"].get<std::string>() == hex64(fnv1a(file["payload"].dump()))) {
            auto cls = class_set_from_json(file["payload"], R);
            if (cls && cls->theta_bound >= theta_bound) {
                if (from_cache)
                    *from_cache = true;
                return *cls;
            }
        }
    }
    RightIdealClassSet cls = ideal_class_set(R, theta_bound);
    Json payload = class_set_to_json(cls);
    Json file;
    file["hash"] = hex64(fnv1a(payload.dump()));
    file["payload"] = payload;
    write_atomically(path, file.dump() + "\n");
    return cls;
}

} // namespace qcert
