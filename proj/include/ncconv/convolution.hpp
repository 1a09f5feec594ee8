#ifndef NCCONV_CONVOLUTION_HPP
#define NCCONV_CONVOLUTION_HPP

#include <variant>

#include "ncconv/operator_model.hpp"
#include "ncconv/subordination.hpp"
#include "ncconv/transforms.hpp"

namespace ncconv {

enum class OpKind {
  MonoAdd,            // F_lambda = F_mu . F_nu                 (R)
  BoolAdd,            // F_lambda = F_mu + F_nu - z             (R)
  FreeAdd,            // subordination                          (R)
  MonoMultPos,        // K_lambda = K_mu . K_nu                 (R+)
  MonoMultAlt,        // sqrt(Y) X sqrt(Y) Cauchy formula       (R+)
  BoolMultNew,        // sqrt(X) Y sqrt(X) Cauchy formula       (R+)
  BoolMultBercovici,  // K_lambda = K_mu K_nu / z, partial      (R+)
  MonoMultCircle,     // K_lambda = K_mu . K_nu                 (T)
  BoolMultCircle,     // K_lambda = K_mu K_nu / z               (T)
  FreeMultPos,        // multiplicative subordination           (R+)
  FreeMultCircle,     // multiplicative subordination           (T)
};

const char* op_name(OpKind op);

enum class ConvolutionMethod {
  OperatorModel,     // exact eigendecomposition of the finite model
  TransformFormula,  // closed transform-level formula
  Subordination,     // per-point fixed-point solves
  Shortcut,          // Dirac / delta_0 special case
};

// Bercovici's multiplicative boolean convolution may fall outside class P;
// the outcome carries the violation witness and is a value, not an error.
struct Undefined {
  ClassReport witness;
};

struct ConvolutionResult {
  OpKind op;
  ConvolutionMethod method;
  std::variant<AtomicMeasure, TransformHandle, Undefined> value;
  std::string diagnostics;  // method metadata (model dimension, solver budget)

  bool is_atomic() const { return std::holds_alternative<AtomicMeasure>(value); }
  bool is_undefined() const { return std::holds_alternative<Undefined>(value); }
  const AtomicMeasure& atoms() const { return std::get<AtomicMeasure>(value); }
  const Undefined& undefined() const { return std::get<Undefined>(value); }

  // Transform view of the result (exact for atomic results).
  TransformHandle handle() const;
};

ConvolutionResult mono_add(const TransformHandle& mu, const TransformHandle& nu);
ConvolutionResult bool_add(const TransformHandle& mu, const TransformHandle& nu);
ConvolutionResult free_add(const TransformHandle& mu, const TransformHandle& nu,
                           const SolveOptions& opts = {});
ConvolutionResult mono_mult_pos(const TransformHandle& mu, const TransformHandle& nu);
ConvolutionResult mono_mult_alt(const TransformHandle& mu, const TransformHandle& nu);
ConvolutionResult bool_mult_new(const TransformHandle& mu, const TransformHandle& nu);
ConvolutionResult bool_mult_bercovici_pos(const TransformHandle& mu,
                                          const TransformHandle& nu,
                                          int class_samples = 200,
                                          std::uint64_t seed = default_seed());
ConvolutionResult mono_mult_circle(const TransformHandle& mu, const TransformHandle& nu);
ConvolutionResult bool_mult_circle(const TransformHandle& mu, const TransformHandle& nu);
ConvolutionResult free_mult_pos(const TransformHandle& mu, const TransformHandle& nu,
                                const SolveOptions& opts = {});
ConvolutionResult free_mult_circle(const TransformHandle& mu,
                                   const TransformHandle& nu,
                                   const SolveOptions& opts = {});

// Generic dispatch used by the CLI and the verify suites.
ConvolutionResult convolve(OpKind op, const TransformHandle& mu,
                           const TransformHandle& nu,
                           const SolveOptions& opts = {});

// Measure-level conveniences.
ConvolutionResult convolve(OpKind op, const Measure& mu, const Measure& nu,
                           const SolveOptions& opts = {});

// Maximum residual of the operation's defining transform identity, sampled
// at `points` seeded points of the appropriate domain. Used by the result
// invariant ("atomic results re-verify to 1e-9") and the verify suites.
double convolution_identity_defect(OpKind op, const TransformHandle& mu,
                                   const TransformHandle& nu,
                                   const TransformHandle& lambda,
                                   int points = 20);

// The finite operator model backing an atomic convolution, together with the
// product operator whose vacuum distribution is the result. Throws for
// operations without a finite model (free convolutions, Bercovici).
struct ModelDump {
  OperatorModel model;
  Matrix product;
};
ModelDump model_for(OpKind op, const AtomicMeasure& mu, const AtomicMeasure& nu);

}  // namespace ncconv

#endif
