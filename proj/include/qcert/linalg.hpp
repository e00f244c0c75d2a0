#ifndef QCERT_LINALG_HPP
#define QCERT_LINALG_HPP

#include "qcert/ntheory.hpp"

#include <Eigen/Core>
#include <gmpxx.h>

#include <vector>

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class>
{
    typedef mpq_class Real;
    typedef mpq_class NonInteger;
    typedef mpq_class Nested;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 6,
        AddCost = 150,
        MulCost = 100
    };
    static inline Real epsilon() { return 0; }
    static inline Real dummy_precision() { return 0; }
    static inline int digits10() { return 0; }
};

} // namespace Eigen

namespace qcert {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<i64>;
using IntVector = Vector<i64>;
using RatMatrix = Matrix<mpq_class>;
using RatVector = Vector<mpq_class>;
using Mat4 = Eigen::Matrix<i64, 4, 4>;
using Vec4 = Eigen::Matrix<i64, 4, 1>;

template <typename Derived>
RatMatrix to_rational(Eigen::MatrixBase<Derived> const& m)
{
    RatMatrix r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            r(i, j) = mpq_class(static_cast<long>(m(i, j)));
    return r;
}

/* Upper-triangular row Hermite normal form of the lattice spanned by gens,
   which must contain modulus * Z^4. Pivots positive, entries above a pivot in [0, pivot). */
Mat4 hnf_mod(std::vector<Vec4> const& gens, i64 modulus);

bool hnf_contains(Mat4 const& hnf, Vec4 v);

/* coordinates of v in the rows of hnf, if v lies in the lattice */
std::optional<Vec4> hnf_coordinates(Mat4 const& hnf, Vec4 v);

/* exact determinant by Bareiss elimination */
i128 determinant(IntMatrix const& m);

/* LLL on a positive definite Gram matrix; returns unimodular T (rows = new basis in old coordinates) */
IntMatrix lll_reduce_gram(IntMatrix const& gram);

// linear algebra over F_p (p prime); matrices with entries already arbitrary integers
IntMatrix reduce_mod(IntMatrix m, i64 p);
int rank_mod_p(IntMatrix m, i64 p);
/* columns form a basis of {x : m x = 0 mod p} */
IntMatrix kernel_mod_p(IntMatrix const& m, i64 p);
IntMatrix matmul_mod_p(IntMatrix const& a, IntMatrix const& b, i64 p);
IntMatrix matpow_mod_p(IntMatrix const& a, int e, i64 p);
/* a right inverse X of a full-row-rank matrix: m X = I mod p */
IntMatrix right_inverse_mod_p(IntMatrix const& m, i64 p);

/* columns form a basis of {x : m x = 0} over Q */
RatMatrix kernel_rational(RatMatrix m);

/* integer kernel basis (columns) of a single row vector, via unimodular column reduction.
   Also returns a particular solution x0 of row.x0 = g where g = gcd(row). */
struct RowKernel
{
    IntMatrix kernel;
    IntVector particular;
    i64 gcd;
};
RowKernel integer_row_kernel(IntVector const& row);

} // namespace qcert

#endif // QCERT_LINALG_HPP
