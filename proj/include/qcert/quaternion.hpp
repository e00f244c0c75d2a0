#ifndef QCERT_QUATERNION_HPP
#define QCERT_QUATERNION_HPP

#include "qcert/lattice.hpp"

#include <array>
#include <map>

namespace qcert {

class SearchExhausted : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class MassMismatch : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class NoEigenvector : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class Ambiguous : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class Unsupported : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/* i^2 = a, j^2 = b, ij = -ji = k */
struct QuaternionAlgebra
{
    i64 a = -1, b = -1;
    std::vector<i64> ramified_primes; // finite part; infinity is always ramified

    i64 discriminant() const;
};

/* q = 0 stands for the infinite place */
int hilbert_symbol(i64 a, i64 b, i64 q);

QuaternionAlgebra build_algebra(FactoredInteger const& n_minus, i64 search_bound = 1000);

/* x*y in the basis 1, i, j, k */
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> quat_mul(QuaternionAlgebra const& B, Eigen::Matrix<Scalar, 4, 1> const& x,
                                     Eigen::Matrix<Scalar, 4, 1> const& y)
{
    const Scalar a = Scalar(B.a), b = Scalar(B.b);
    Eigen::Matrix<Scalar, 4, 1> z;
    z(0) = x(0) * y(0) + a * x(1) * y(1) + b * x(2) * y(2) - a * b * x(3) * y(3);
    z(1) = x(0) * y(1) + x(1) * y(0) - b * x(2) * y(3) + b * x(3) * y(2);
    z(2) = x(0) * y(2) + x(2) * y(0) + a * x(1) * y(3) - a * x(3) * y(1);
    z(3) = x(0) * y(3) + x(3) * y(0) + x(1) * y(2) - x(2) * y(1);
    return z;
}

template <typename Scalar>
Scalar quat_nrd(QuaternionAlgebra const& B, Eigen::Matrix<Scalar, 4, 1> const& x)
{
    const Scalar a = Scalar(B.a), b = Scalar(B.b);
    return x(0) * x(0) - a * x(1) * x(1) - b * x(2) * x(2) + a * b * x(3) * x(3);
}

/*
 * An Eichler order R, with all arithmetic expressed in the coordinates of its Z-basis.
 * basis rows / denominator give the basis in terms of 1, i, j, k.
 */
struct EichlerOrder
{
    QuaternionAlgebra algebra;
    Mat4 basis;
    i64 denominator = 1;
    i64 n_minus = 1;
    i64 level = 1;

    std::array<Mat4, 4> structure; // e_r e_s = sum_t structure[r](s, t) e_t
    Mat4 conj;                     // conj(x) = conj * x
    Mat4 gram;                     // x^T gram x = 2 nrd(x)
    Vec4 trace;                    // trd(x) = trace . x
    Vec4 one;

    i64 discriminant() const { return n_minus * level; }
    Vec4 mul(Vec4 const& x, Vec4 const& y) const;
    Vec4 conjugate(Vec4 const& x) const { return conj * x; }
    i64 nrd(Vec4 const& x) const;
    i64 trd(Vec4 const& x) const { return trace.dot(x); }
    /* coordinates in 1, i, j, k */
    Eigen::Matrix<mpq_class, 4, 1> to_algebra(Vec4 const& x) const;
};

EichlerOrder maximal_order(QuaternionAlgebra const& B);
EichlerOrder eichler_order(QuaternionAlgebra const& B, i64 n_plus);

/* integral right R-ideal: HNF rows in R-coordinates; [R : I] = norm^2 */
struct RightIdeal
{
    Mat4 basis;
    i64 norm = 1;

    bool operator==(RightIdeal const& o) const { return norm == o.norm && basis == o.basis; }
};

RightIdeal unit_ideal();
/* lattice spanned by gens, which must contain modulus*R and be a right ideal */
RightIdeal ideal_from_generators(EichlerOrder const& R, std::vector<Vec4> const& gens, i64 modulus);
/* alpha * I for alpha in R nonzero */
RightIdeal left_multiply(EichlerOrder const& R, Vec4 const& alpha, RightIdeal const& I);
bool is_right_ideal(EichlerOrder const& R, RightIdeal const& I);
std::vector<RightIdeal> neighbors(EichlerOrder const& R, RightIdeal const& I, i64 q);

/* HNF of I * conj(J), which contains N(I) N(J) R */
Mat4 product_with_conjugate(EichlerOrder const& R, RightIdeal const& I, RightIdeal const& J);
IntMatrix lattice_gram(EichlerOrder const& R, Mat4 const& basis);

bool same_ideal_class(EichlerOrder const& R, RightIdeal const& I, RightIdeal const& J);
/* |O_l(I)^x|, the full unit group of the left order */
i64 unit_count(EichlerOrder const& R, RightIdeal const& I);

mpq_class eichler_mass(i64 n_minus, i64 n_plus);

struct RightIdealClassSet
{
    EichlerOrder order;
    std::vector<RightIdeal> ideals;
    std::vector<i64> weights;
    i64 neighbor_prime = 2;
    /* theta[i][j][n] = #{b in I_i conj(I_j) : nrd(b) = n N_i N_j}, n <= theta_bound */
    std::vector<std::vector<std::vector<i64>>> theta;
    i64 theta_bound = 0;

    int size() const { return static_cast<int>(ideals.size()); }
    mpq_class mass() const;
};

inline constexpr i64 kDefaultThetaBound = 50;

RightIdealClassSet ideal_class_set(EichlerOrder const& R, i64 theta_bound = kDefaultThetaBound);

/* theta data for an already enumerated class set */
void compute_theta(RightIdealClassSet& cls, i64 theta_bound);

/* index of the class containing I */
int locate_class(RightIdealClassSet const& cls, RightIdeal const& I);

/* B(n)_ij = #{b in I_i conj(I_j) : nrd(b) = n N_i N_j} / w_j; acts on functions (column vectors) */
IntMatrix brandt_matrix(RightIdealClassSet const& cls, i64 n);

struct QuaternionicEigenform
{
    IntVector values;
    std::map<i64, i64> eigenvalues;
};

/* traces: a_q for the good primes q <= q_bound */
QuaternionicEigenform eigenform(RightIdealClassSet const& cls, std::map<i64, i64> const& traces,
                                i64 q_bound);

/* sum v_i / w_i */
mpq_class weighted_degree(RightIdealClassSet const& cls, IntVector const& v);
IntVector eta_q_apply(RightIdealClassSet const& cls, i64 q, IntVector const& v);

struct IsolationReport
{
    bool isolated = false;
    int generalized_kernel_dim = 0;
    int plain_kernel_dim = 0;
    int degree_zero_quotient_dim = 0;
};

IsolationReport p_isolation(RightIdealClassSet const& cls, QuaternionicEigenform const& phi, i64 p,
                            i64 q_check);
bool p_isolation_check(RightIdealClassSet const& cls, QuaternionicEigenform const& phi, i64 p,
                       i64 q_check);

struct ComponentRankReport
{
    int rank = 0;          // dim V / image(U'^2 - 1)
    int quotient_dim = 0;  // dim M^0 / m_f
    int epsilon = 0;
    bool image_identity = false;   // image(U' - eps) = {(eps z, z)}
    bool plus_invertible = false;  // U' + eps invertible
};

ComponentRankReport component_group_rank(RightIdealClassSet const& cls, QuaternionicEigenform const& phi,
                                         i64 p, i64 ell, i64 a_ell, i64 q_check);

} // namespace qcert

#endif // QCERT_QUATERNION_HPP
