#ifndef NCCONV_OPERATOR_MODEL_HPP
#define NCCONV_OPERATOR_MODEL_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "ncconv/measure.hpp"

namespace ncconv {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class ModelKind {
  MonotoneAdditive,  // X = M_x P2, Y = M_y on l2(mu (x) nu)
  MonotoneShifted,   // X = S_x = M_{x-1} P2 + 1
  BooleanAdditive,   // X = N_x, Y = N_y on C + L2(mu)_0 + L2(nu)_0
  BooleanShifted,    // X = Q_x, Y = Q_y (identity on the foreign block)
};

const char* model_kind_name(ModelKind kind);

// Finite matrix realization of a monotonically or boolean independent pair
// with the given atomic marginals, acting on the weighted-L2 embedding with
// the standard inner product. Immutable after construction.
struct OperatorModel {
  ModelKind kind;
  Matrix X;
  Matrix Y;
  Vector omega;
  AtomicMeasure mu;
  AtomicMeasure nu;

  Eigen::Index dim() const { return X.rows(); }
};

// Monotone model on l2(mu (x) nu), dim n*m: coordinates scaled by
// sqrt(p_i q_j), P2 = I (x) s s* with s = (sqrt q_j), X = (D_x (x) I) P2
// (or the shifted S_x = X + (1 - P2)), Y = I (x) D_y.
OperatorModel build_monotone_pair(const AtomicMeasure& mu,
                                  const AtomicMeasure& nu, bool shifted);

// Boolean model on C + L2(mu)_0 + L2(nu)_0, dim n+m-1: Householder bases
// with first column sqrt(weights); the shifted variant puts the identity on
// the other component's block.
OperatorModel build_boolean_pair(const AtomicMeasure& mu,
                                 const AtomicMeasure& nu, bool shifted);

// The projection P2 of the monotone model (I_n (x) s s*).
Matrix monotone_projection(const AtomicMeasure& mu, const AtomicMeasure& nu);

// Vacuum spectral distribution of a normal matrix: eigenvalues clustered
// within 1e-9, weights <omega, P_k omega>; weights below 1e-14 dropped and
// the rest renormalized (defect must stay below 1e-12).
AtomicMeasure spectral_distribution(const Matrix& a, const Vector& omega,
                                    Domain domain);

// Principal square root of a Hermitian PSD matrix via eigendecomposition;
// eigenvalues in [-1e-10, 0) are clamped to 0, below -1e-8 raises NotPSDError.
Matrix matrix_sqrt_psd(const Matrix& a);

// <omega, (z - A)^{-1} omega> by LU solve.
Complex matrix_resolvent(const Matrix& a, const Vector& omega, Complex z);

enum class ResolventKind {
  MonotoneAdd,      // (z - M_x P2 - M_y)^{-1}
  BooleanAdd,       // (z - N_x - N_y)^{-1}
  MonotoneMult,     // (z - sqrt(S_x) M_y sqrt(S_x))^{-1}
  MonotoneMultAlt,  // (z - sqrt(M_y) S_x sqrt(M_y))^{-1}
  BooleanMultNew,   // (z - sqrt(Q_x) Q_y sqrt(Q_x))^{-1}
};

// Vacuum expectation of the closed-form resolvents, evaluated as finite sums
// over the atoms. Independent of both the matrix route and the transform
// identities.
Complex analytic_resolvent(ResolventKind kind, const AtomicMeasure& mu,
                           const AtomicMeasure& nu, Complex z);

struct IndependenceReport {
  double max_defect = 0.0;
  long words_checked = 0;
  std::string worst_word;
};

// Checks the moment factorization of the model's independence for all
// alternating words of length <= max_word_len, with letters the spectral
// projections onto nonzero eigenvalues of the (shift-corrected) operators.
IndependenceReport verify_independence(const OperatorModel& model,
                                       int max_word_len);

// Same machinery, but asserting the *boolean* factorization regardless of
// the model kind; used to exhibit that the two notions differ.
IndependenceReport boolean_factorization_defect(const OperatorModel& model,
                                                int max_word_len);

// Lenczewski decomposition X + Y = X0 + Z with X0 = X P_X and
// Z = X (1 - P_X) + Y, P_X the projection onto span{poly(X) omega}.
std::pair<Matrix, Matrix> lenczewski_decompose(const Matrix& x, const Matrix& y,
                                               const Vector& omega);

}  // namespace ncconv

#endif
