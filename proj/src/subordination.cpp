#include "ncconv/subordination.hpp"

#include <cmath>
#include <functional>

namespace ncconv {

namespace {

void require_real_pair(const TransformHandle& mu, const TransformHandle& nu) {
  if (mu.domain() == Domain::UnitCircle || nu.domain() == Domain::UnitCircle)
    throw DomainError("additive subordination needs real-supported measures");
}

struct FixedPoint {
  Complex w;
  int iterations;
  double step;  // |phi(w) - w| at exit
};

// Damped fixed-point iteration from w0, with safeguarded Newton jumps on the
// residual g(w) = phi(w) - w. The base map is iterated plainly for the first
// 100 steps and 50%-damped afterwards; Newton accelerates the near-parabolic
// regime close to the support, where the plain iteration contracts like
// 1 - O(Im z). Fully deterministic.
template <typename Map, typename InsideDomain>
FixedPoint accelerated_fixed_point(const Map& phi, Complex w0,
                                   const InsideDomain& inside,
                                   const SolveOptions& opts) {
  Complex w = w0;
  Complex gw = phi(w) - w;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    if (std::abs(gw) < opts.tol) break;
    if (iter >= 8 && iter % 4 == 0) {
      const double h = 1e-7 * std::max(1.0, std::abs(w));
      const Complex gp =
          ((phi(w + h) - (w + h)) - (phi(w - h) - (w - h))) / (2.0 * h);
      if (std::abs(gp) > 1e-14) {
        Complex cand = w - gw / gp;
        bool accepted = false;
        for (int halve = 0; halve < 8 && !accepted; ++halve) {
          if (inside(cand)) {
            const Complex gc = phi(cand) - cand;
            if (std::abs(gc) < std::abs(gw)) {
              w = cand;
              gw = gc;
              accepted = true;
            }
          }
          if (!accepted) cand = 0.5 * (cand + w);
        }
        if (accepted) continue;
      }
    }
    Complex next = phi(w);
    if (iter >= 100) next = 0.5 * (w + next);
    w = next;
    gw = phi(w) - w;
  }
  return {w, iter, std::abs(gw)};
}

}  // namespace

SubordinationPair solve_additive_subordination(const TransformHandle& mu,
                                               const TransformHandle& nu,
                                               Complex z,
                                               const SolveOptions& opts) {
  require_real_pair(mu, nu);
  if (!(z.imag() > 0))
    throw PreconditionError("additive subordination solves at z in C+");
  auto h = [](const TransformHandle& rho, Complex w) { return rho.F(w) - w; };
  auto phi = [&](Complex w) { return z + h(nu, z + h(mu, w)); };
  auto inside = [](Complex w) { return w.imag() > 0; };

  const FixedPoint fp = accelerated_fixed_point(phi, z, inside, opts);
  SubordinationPair out;
  out.z = z;
  out.Z1 = fp.w;
  out.Z2 = z + h(mu, fp.w);
  const Complex f1 = mu.F(out.Z1);
  const Complex f2 = nu.F(out.Z2);
  out.residual = std::max(std::abs(f1 - f2), std::abs(f1 - (out.Z1 + out.Z2 - z)));
  out.iterations = fp.iterations;
  if (fp.iterations >= opts.max_iter && out.residual > 10 * opts.tol)
    throw ConvergenceError("additive subordination stalled, residual " +
                           std::to_string(out.residual));
  return out;
}

SubordinationPair solve_multiplicative_subordination(const TransformHandle& mu,
                                                     const TransformHandle& nu,
                                                     Complex z,
                                                     const SolveOptions& opts) {
  const bool circle = mu.domain() == Domain::UnitCircle;
  if (circle != (nu.domain() == Domain::UnitCircle))
    throw DomainError("multiplicative subordination needs matching domains");
  if (circle) {
    const double r = std::abs(z);
    if (r == 0.0 || r >= 1.0)
      throw PreconditionError("circle subordination solves on D \\ {0}");
    if (r > 0.95 && opts.max_iter == SolveOptions{}.max_iter)
      throw PreconditionError(
          "|z| > 0.95 needs a caller-supplied iteration budget");
  } else {
    if (z.imag() == 0 && z.real() >= 0)
      throw PreconditionError("half-line subordination solves on C \\ R+");
  }
  // precondition checks where the source is inspectable
  for (const TransformHandle* h : {&mu, &nu}) {
    const AtomicMeasure* a = h->atomic_source();
    if (!a) continue;
    if (circle) {
      Complex m1(0, 0);
      for (std::size_t i = 0; i < a->size(); ++i)
        m1 += a->atoms()[i].weight * a->point(i);
      if (std::abs(m1) < 1e-12)
        throw PreconditionError(
            "circle subordination needs nonvanishing first moments");
    } else if (a->is_dirac() && std::abs(a->atoms()[0].position) <= kAtomMergeTol) {
      throw PreconditionError("half-line subordination is undefined for delta_0");
    }
  }

  auto h = [](const TransformHandle& rho, Complex w) { return rho.K(w) / w; };
  auto phi = [&](Complex w) { return z * h(nu, z * h(mu, w)); };
  auto inside = circle ? std::function<bool(Complex)>([](Complex w) {
    return std::abs(w) < 1.0 && w != Complex(0, 0);
  })
                       : std::function<bool(Complex)>([](Complex w) {
                           return w.imag() != 0 || w.real() < 0;
                         });

  const FixedPoint fp = accelerated_fixed_point(phi, z, inside, opts);
  SubordinationPair out;
  out.z = z;
  out.Z1 = fp.w;
  out.Z2 = z * h(mu, fp.w);
  const Complex k1 = mu.K(out.Z1);
  const Complex k2 = nu.K(out.Z2);
  out.residual =
      std::max(std::abs(k1 - k2), std::abs(k1 - out.Z1 * out.Z2 / z));
  out.iterations = fp.iterations;
  if (fp.iterations >= opts.max_iter && out.residual > 10 * opts.tol)
    throw ConvergenceError("multiplicative subordination stalled, residual " +
                           std::to_string(out.residual));
  return out;
}

namespace {

// F-defined handle for the subordination functions Z1 (which = 0) or Z2
// (which = 1): F_zeta(z) = Z_i(z), extended to C- by reflection.
class SubordinationFunctionEvaluator final : public TransformEvaluator {
 public:
  SubordinationFunctionEvaluator(TransformHandle mu, TransformHandle nu,
                                 int which, SolveOptions opts,
                                 std::shared_ptr<SubordinationCache> cache)
      : mu_(std::move(mu)),
        nu_(std::move(nu)),
        which_(which),
        opts_(opts),
        cache_(std::move(cache)) {}

  Domain domain() const override { return Domain::RealLine; }

  Complex G(Complex z) const override {
    if (z.imag() < 0) return std::conj(G(std::conj(z)));
    if (auto hit = cache_->find(z))
      return 1.0 / (which_ == 0 ? hit->Z1 : hit->Z2);
    const auto pair = solve_additive_subordination(mu_, nu_, z, opts_);
    cache_->insert(z, pair);
    return 1.0 / (which_ == 0 ? pair.Z1 : pair.Z2);
  }

  Complex psi(Complex) const override {
    throw DomainError("psi is defined for circle and half-line measures");
  }

 private:
  TransformHandle mu_;
  TransformHandle nu_;
  int which_;
  SolveOptions opts_;
  std::shared_ptr<SubordinationCache> cache_;
};

}  // namespace

std::pair<TransformHandle, TransformHandle> decompose_free(
    const TransformHandle& mu, const TransformHandle& nu,
    const SolveOptions& opts) {
  require_real_pair(mu, nu);
  auto cache = std::make_shared<SubordinationCache>();
  return {TransformHandle(std::make_shared<SubordinationFunctionEvaluator>(
              mu, nu, 0, opts, cache)),
          TransformHandle(std::make_shared<SubordinationFunctionEvaluator>(
              mu, nu, 1, opts, cache))};
}

Complex mono_deconvolve_left(const TransformHandle& prefix,
                             const TransformHandle& total, Complex z,
                             const SolveOptions& opts) {
  if (!(z.imag() > 0)) throw PreconditionError("deconvolution solves at z in C+");
  const Complex target = total.F(z);
  Complex w = z;
  double res = std::abs(prefix.F(w) - target);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (res < opts.tol) return w;
    // analytic derivative via central difference
    const double hstep = 1e-7 * std::max(1.0, std::abs(w));
    const Complex fp =
        (prefix.F(w + hstep) - prefix.F(w - hstep)) / (2.0 * hstep);
    if (!(std::abs(fp) > 0))
      throw NoSolutionError("deconvolution: vanishing derivative");
    Complex step = (prefix.F(w) - target) / fp;
    // half-step bisection keeps the iterate in C+
    Complex next = w - step;
    int halvings = 0;
    while (next.imag() <= 0 && halvings++ < 60) {
      step *= 0.5;
      next = w - step;
    }
    if (next.imag() <= 0)
      throw NoSolutionError("deconvolution left the upper half-plane at z = (" +
                            std::to_string(z.real()) + "," +
                            std::to_string(z.imag()) + ")");
    const double next_res = std::abs(prefix.F(next) - target);
    // damp on non-decrease; bail out if fully stalled
    halvings = 0;
    while (next_res >= res && halvings++ < 60) {
      step *= 0.5;
      next = w - step;
      if (next.imag() <= 0 || std::abs(step) < 1e-300) break;
      const double r = std::abs(prefix.F(next) - target);
      if (r < res) break;
    }
    if (std::abs(next - w) < 1e-16 * std::max(1.0, std::abs(w)) &&
        res > 1e3 * opts.tol)
      throw NoSolutionError("deconvolution stalled, residual " +
                            std::to_string(res));
    w = next;
    res = std::abs(prefix.F(w) - target);
  }
  if (res > 10 * opts.tol)
    throw NoSolutionError("deconvolution did not converge, residual " +
                          std::to_string(res));
  return w;
}

namespace {

class DeconvolutionEvaluator final : public TransformEvaluator {
 public:
  DeconvolutionEvaluator(TransformHandle prefix, TransformHandle total,
                         std::string label)
      : prefix_(std::move(prefix)), total_(std::move(total)),
        label_(std::move(label)) {}

  Domain domain() const override { return Domain::RealLine; }

  Complex G(Complex z) const override {
    if (z.imag() < 0) return std::conj(G(std::conj(z)));
    try {
      return 1.0 / mono_deconvolve_left(prefix_, total_, z);
    } catch (const NoSolutionError& e) {
      if (label_.empty()) throw;
      throw NoSolutionError(label_ + ": " + e.what());
    }
  }

  Complex psi(Complex) const override {
    throw DomainError("psi is defined for circle and half-line measures");
  }

 private:
  TransformHandle prefix_;
  TransformHandle total_;
  std::string label_;
};

class DiracZeroEvaluator final : public TransformEvaluator {
 public:
  Domain domain() const override { return Domain::RealLine; }
  Complex G(Complex z) const override { return 1.0 / z; }
  Complex psi(Complex) const override {
    throw DomainError("psi is defined for circle and half-line measures");
  }
};

}  // namespace

TransformHandle mono_deconvolve_handle(const TransformHandle& prefix,
                                       const TransformHandle& total) {
  return TransformHandle(
      std::make_shared<DeconvolutionEvaluator>(prefix, total, ""));
}

std::vector<std::vector<TransformHandle>> hemigroup_transfer(
    std::span<const TransformHandle> marginals) {
  if (marginals.size() < 2)
    throw PreconditionError("hemigroup transfer needs >= 2 marginals");
  std::vector<std::vector<TransformHandle>> zeta;
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    std::vector<TransformHandle> row;
    row.push_back(TransformHandle(std::make_shared<DiracZeroEvaluator>()));
    for (std::size_t j = i + 1; j < marginals.size(); ++j) {
      const std::string label = "zeta(" + std::to_string(i) + "," +
                                std::to_string(j) + ")";
      row.push_back(TransformHandle(std::make_shared<DeconvolutionEvaluator>(
          marginals[i], marginals[j], label)));
    }
    zeta.push_back(std::move(row));
  }
  return zeta;
}

}  // namespace ncconv
