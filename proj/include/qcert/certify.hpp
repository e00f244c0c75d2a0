#ifndef QCERT_CERTIFY_HPP
#define QCERT_CERTIFY_HPP

#include "qcert/admissible.hpp"

#include <iosfwd>

namespace qcert {

class ParseError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/* request that cannot even be posed (bad selector, unknown label, ...) */
class InvalidRequest : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/* filesystem and cache failures, as opposed to mathematical refusals */
class InfrastructureError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// curve table: label,a1,a2,a3,a4,a6,conductor[,modular_degree]

struct CurveTable
{
    std::vector<CurveModel> rows;

    CurveModel const& find(std::string const& label) const;
};

CurveTable parse_curve_table(std::istream& in, std::string const& source = "<stream>");
CurveTable ingest_curve_table(std::string const& path);

struct CharacterSelector
{
    enum class Kind { Trivial, Index, Exponents } kind = Kind::Trivial;
    int index = 0;
    std::vector<i64> exponents;
    i64 modulus = 1;

    /* "trivial", "<k>", or "exp:e1,e2,.../m" */
    static CharacterSelector parse(std::string const& text);
    std::string to_string() const;
    RingClassCharacter resolve(FormClassGroup const& g) const;
};

struct CertifyOptions
{
    i64 ell_max = 200;
    i64 q_bound = 50;
    i64 witness_bound = 200;
    int component_samples = 3;
    bool audit_embeddings = false;
    std::string cache_dir; // empty: no cache
};

struct CertificateRequest
{
    CurveModel curve;
    i64 D = -3;
    i64 c = 1;
    CharacterSelector character;
    i64 p = 7;
    CertifyOptions options;
};

enum class CertificateStatus { Full, Partial, Refused };
std::string to_string(CertificateStatus s);

struct Certificate
{
    CertificateStatus status = CertificateStatus::Refused;
    Json json;

    std::string serialize() const;
};

Certificate certify(CertificateRequest const& req);
/* one certificate per prime in [p_lo, p_hi], computed concurrently, increasing p */
std::vector<Certificate> certify_range(CertificateRequest const& req, i64 p_lo, i64 p_hi);

struct RevalidationResult
{
    bool ok = true;
    std::vector<std::string> problems;
};

RevalidationResult revalidate(Json const& certificate, std::string const& cache_dir = {});

// class set cache, one file per (N-, N+)

std::string cache_dir_from_environment(std::string const& flag_value);
std::string cache_path(std::string const& dir, i64 n_minus, i64 n_plus);
Json class_set_to_json(RightIdealClassSet const& cls);
/* nullopt if the payload does not describe a valid class set for R */
std::optional<RightIdealClassSet> class_set_from_json(Json const& payload, EichlerOrder const& R);
RightIdealClassSet load_or_build_class_set(i64 n_minus, i64 n_plus, i64 theta_bound, std::string const& cache_dir,
                                           bool* from_cache = nullptr);

int cli_main(int argc, char** argv);

} // namespace qcert

#endif // QCERT_CERTIFY_HPP
