#ifndef NCCONV_TRANSFORMS_HPP
#define NCCONV_TRANSFORMS_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ncconv/measure.hpp"

namespace ncconv {

// Minimum distance from the support below which transform evaluation refuses
// to proceed.
inline constexpr double kPoleTol = 1e-13;

// Evaluation backend of a TransformHandle. Concrete evaluators override G
// (measures on R, sums/quadrature) or psi (K-defined composites); the other
// transform follows from G(z) = (psi(1/z) + 1) / z.
class TransformEvaluator {
 public:
  virtual ~TransformEvaluator() = default;
  virtual Domain domain() const = 0;
  virtual Complex G(Complex z) const = 0;
  virtual Complex psi(Complex z) const = 0;
  // Default K = psi / (1 + psi); K-defined composites override it directly.
  virtual Complex K(Complex z) const;
  // W(z) = integral of sqrt(y)/(z-y); only for measures on R+ with an
  // evaluable source. Throws PreconditionError otherwise.
  virtual Complex W(Complex z) const;
  virtual const AtomicMeasure* atomic_source() const { return nullptr; }

 protected:
  Complex G_from_psi(Complex z) const;
  Complex psi_from_G(Complex z) const;
};

// Immutable, freely shareable view of the analytic transforms of a measure
// (or of a transform-level convolution result).
class TransformHandle {
 public:
  explicit TransformHandle(std::shared_ptr<const TransformEvaluator> eval)
      : eval_(std::move(eval)) {}

  Domain domain() const { return eval_->domain(); }
  Complex G(Complex z) const { return eval_->G(z); }
  Complex F(Complex z) const;  // 1/G, with an infinity signal when G = 0
  Complex psi(Complex z) const { return eval_->psi(z); }
  Complex K(Complex z) const { return eval_->K(z); }
  Complex W(Complex z) const { return eval_->W(z); }

  // Set when the handle wraps an atomic measure exactly.
  const AtomicMeasure* atomic_source() const { return eval_->atomic_source(); }
  const std::shared_ptr<const TransformEvaluator>& evaluator() const { return eval_; }

 private:
  std::shared_ptr<const TransformEvaluator> eval_;
};

TransformHandle handle_of(const AtomicMeasure& mu);
TransformHandle handle_of(const DensityMeasure& mu);
TransformHandle handle_of(const Measure& mu);

// Semicircle law with the given mean and variance; closed-form Cauchy
// transform G(z) = (z - m - sqrt((z-m)^2 - 4 v)) / (2 v).
TransformHandle semicircle_handle(double mean, double variance);

// Handles wrapping a closed-form rule: a Cauchy transform (real domains) or
// a K-transform (circle or half-line composites).
TransformHandle cauchy_handle(Domain domain, std::function<Complex(Complex)> g);
TransformHandle k_rule_handle(Domain domain, std::function<Complex(Complex)> k);

// Transform-level image under translation/dilation/rotation, for handles
// without an atomic source.
TransformHandle push_handle(const TransformHandle& h, const PushMap& map);

// Per-operation entry points (exact sums for atomic measures, trapezoid
// quadrature for densities).
Complex eval_G(const Measure& mu, Complex z);
Complex eval_F(const Measure& mu, Complex z);
Complex eval_psi(const Measure& mu, Complex z);
Complex eval_K(const Measure& mu, Complex z);
Complex eval_W(const Measure& mu, Complex z);

enum class FunctionClass { F, S, P };

struct ClassWitness {
  Complex point;
  double violation;
  std::string condition;
};

struct ClassReport {
  FunctionClass which;
  bool passed = true;  // passed iff witnesses empty
  std::vector<ClassWitness> witnesses;
};

// Sampled membership check for the Nevanlinna classes. Passing is evidence,
// not proof; a failing witness is conclusive.
ClassReport class_check(const TransformHandle& handle, FunctionClass which,
                        int samples, std::uint64_t seed = default_seed());

struct InversionOptions {
  std::vector<double> eps_ladder{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  // a grid point is an atom candidate if eps*|Im G(x+i eps)| exceeds this at
  // the smallest ladder rung
  double atom_threshold = 1e-3;
  double disagreement_tol = 1e-4;
  double max_bad_fraction = 0.05;
};

struct InversionDiagnostics {
  double raw_mass = 0.0;          // smoothed mass + atoms + tail correction
  double worst_disagreement = 0.0;
  std::size_t flagged_points = 0;
  std::size_t grid_points = 0;
};

// Stieltjes inversion: density from Richardson extrapolation of
// -Im G(x + i eps)/pi down the epsilon ladder, atoms from the residues
// eps * Im G at detected poles. The returned measure is normalized to total
// mass one; the raw recovered mass is reported in the diagnostics.
DensityMeasure stieltjes_invert(const TransformHandle& handle,
                                std::span<const double> grid,
                                const InversionOptions& options = {},
                                InversionDiagnostics* diagnostics = nullptr);

// Moments extracted by contour integration: m_k = (1/2 pi i).oint z^k G(z) dz
// over |z| = radius (real domains, radius enclosing the support) or from the
// Taylor coefficients of psi on |z| = radius < 1 (circle).
std::vector<Complex> transform_moments(const TransformHandle& handle, int n,
                                       double radius, int points = 1024);

}  // namespace ncconv

#endif
