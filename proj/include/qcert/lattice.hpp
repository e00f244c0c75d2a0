#ifndef QCERT_LATTICE_HPP
#define QCERT_LATTICE_HPP

#include "qcert/linalg.hpp"

#include <functional>

namespace qcert {

/* return false to stop the enumeration */
using EllipsoidVisitor = std::function<bool(IntVector const& x, mpq_class const& value)>;
using ShortVectorVisitor = std::function<bool(IntVector const& x, i64 value)>;

/*
 * Fincke-Pohst: visits every x in Z^n with (x - center)^T Q (x - center) <= bound,
 * in a fixed order (last coordinate outermost, each coordinate ascending).
 * Q must be symmetric positive definite. All comparisons are exact.
 * Returns false iff the visitor stopped early.
 */
bool enumerate_ellipsoid(RatMatrix const& q, RatVector const& center, mpq_class const& bound,
                         EllipsoidVisitor const& visit);

/* all x with x^T G x <= bound, G integral positive definite; LLL-reduces first.
   x is reported in the original coordinates, value = x^T G x. */
bool short_vectors(IntMatrix const& gram, i64 bound, ShortVectorVisitor const& visit);

/* counts[k] = #{x : x^T G x = k}, k = 0..bound */
std::vector<i64> theta_counts(IntMatrix const& gram, i64 bound);

} // namespace qcert

#endif // QCERT_LATTICE_HPP
