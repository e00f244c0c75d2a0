#ifndef QCERT_GROSS_HPP
#define QCERT_GROSS_HPP

#include "qcert/quadratic.hpp"
#include "qcert/quaternion.hpp"

namespace qcert {

class HeegnerHypothesisViolated : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class EmbeddingNotFound : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/*
 * psi: O_c -> O_l(I_i), i = class_index, given by the image of omega = c(D + sqrt D)/2.
 * O_l(I_i) = I_i conj(I_i) / N(I_i); image holds N(I_i) psi(omega) in R-coordinates.
 */
struct OptimalEmbedding
{
    QuadOrder quad_order;
    int class_index = 0;
    Vec4 image = Vec4::Zero();
    i64 omega_trace = 0;
    i64 omega_norm = 0;
};

/* Eichler's local criterion: q | N- inert, q | N+ split, gcd(c, N) = 1 */
void check_heegner_hypothesis(EichlerOrder const& R, QuadOrder const& O);

/* every optimal embedding into O_l(I_i), enumeration order; stops after limit */
std::vector<OptimalEmbedding> optimal_embeddings(RightIdealClassSet const& cls, QuadOrder const& O,
                                                 int class_index, size_t limit = 1u << 20);

/* first class admitting an embedding, first embedding found there */
OptimalEmbedding optimal_embedding(RightIdealClassSet const& cls, QuadOrder const& O);

bool is_optimal(RightIdealClassSet const& cls, OptimalEmbedding const& emb);

/* psi(a) I_i for the O_c-ideal a = [a, (-b + c sqrt D)/2] attached to a primitive form */
RightIdeal lift_form(RightIdealClassSet const& cls, OptimalEmbedding const& emb, Form const& f);

struct GrossVector
{
    OptimalEmbedding embedding;
    std::vector<int> map; // form class index -> right ideal class index
};

GrossVector psi_hat(RightIdealClassSet const& cls, OptimalEmbedding const& emb, FormClassGroup const& g);

/* sum_sigma chi^{-1}(sigma) phi(psi_hat(sigma)) in Z[zeta_n] */
CyclotomicValue algebraic_special_value(IntVector const& phi, GrossVector const& gv,
                                        RingClassCharacter const& chi);

bool nonvanishing_mod(CyclotomicValue const& L, PrimeAbove const& prime);

} // namespace qcert

#endif // QCERT_GROSS_HPP
