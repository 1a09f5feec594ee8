#include "ncconv/convolution.hpp"

#include <cmath>

namespace ncconv {

namespace {

void require_domains(OpKind op, Domain mu, Domain nu) {
  Domain want;
  switch (op) {
    case OpKind::MonoAdd:
    case OpKind::BoolAdd:
    case OpKind::FreeAdd: want = Domain::RealLine; break;
    case OpKind::MonoMultPos:
    case OpKind::MonoMultAlt:
    case OpKind::BoolMultNew:
    case OpKind::BoolMultBercovici:
    case OpKind::FreeMultPos: want = Domain::PositiveHalfLine; break;
    default: want = Domain::UnitCircle; break;
  }
  if (mu != want || nu != want)
    throw DomainError(std::string(op_name(op)) + " needs both operands on " +
                      domain_name(want));
}

bool is_dirac_at(const AtomicMeasure* mu, double x) {
  return mu && mu->is_dirac() && std::abs(mu->atoms()[0].position - x) <= kAtomMergeTol;
}

// ---- transform-level evaluators -------------------------------------------

class MonoAddEvaluator final : public TransformEvaluator {
 public:
  MonoAddEvaluator(TransformHandle mu, TransformHandle nu)
      : mu_(std::move(mu)), nu_(std::move(nu)) {}
  Domain domain() const override { return Domain::RealLine; }
  Complex G(Complex z) const override { return mu_.G(nu_.F(z)); }
  Complex psi(Complex) const override {
    throw DomainError("psi is defined for circle and half-line measures");
  }

 private:
  TransformHandle mu_, nu_;
};

class BoolAddEvaluator final : public TransformEvaluator {
 public:
  BoolAddEvaluator(TransformHandle mu, TransformHandle nu)
      : mu_(std::move(mu)), nu_(std::move(nu)) {}
  Domain domain() const override { return Domain::RealLine; }
  Complex G(Complex z) const override {
    return 1.0 / (mu_.F(z) + nu_.F(z) - z);
  }
  Complex psi(Complex) const override {
    throw DomainError("psi is defined for circle and half-line measures");
  }

 private:
  TransformHandle mu_, nu_;
};

class FreeAddEvaluator final : public TransformEvaluator {
 public:
  FreeAddEvaluator(TransformHandle mu, TransformHandle nu, SolveOptions opts)
      : mu_(std::move(mu)), nu_(std::move(nu)), opts_(opts),
        cache_(std::make_shared<SubordinationCache>()) {}
  Domain domain() const override { return Domain::RealLine; }
  Complex G(Complex z) const override {
    if (z.imag() == 0)
      throw PreconditionError("free additive convolution: evaluate off R");
    if (z.imag() < 0) return std::conj(G(std::conj(z)));
    if (auto hit = cache_->find(z)) return 1.0 / mu_.F(hit->Z1);
    const auto pair = solve_additive_subordination(mu_, nu_, z, opts_);
    cache_->insert(z, pair);
    return 1.0 / mu_.F(pair.Z1);
  }
  Complex psi(Complex) const override {
    throw DomainError("psi is defined for circle and half-line measures");
  }

 private:
  TransformHandle mu_, nu_;
  SolveOptions opts_;
  std::shared_ptr<SubordinationCache> cache_;
};

// G-level formula of the sqrt(X) Y sqrt(X) theorem:
//   G(z) = G_nu(z)/(z G_nu(z) - 1) * G_mu(z G_nu(z)/(z G_nu(z) - 1)).
class MonoMultPosEvaluator final : public TransformEvaluator {
 public:
  MonoMultPosEvaluator(TransformHandle mu, TransformHandle nu)
      : mu_(std::move(mu)), nu_(std::move(nu)) {}
  Domain domain() const override { return Domain::PositiveHalfLine; }
  Complex G(Complex z) const override {
    const Complex gn = nu_.G(z);
    const Complex d = z * gn - 1.0;
    return gn / d * mu_.G(z * gn / d);
  }
  Complex psi(Complex z) const override { return psi_from_G(z); }

 private:
  TransformHandle mu_, nu_;
};

// Cauchy transform of sqrt(Y) X sqrt(Y):
//   G_nu - W_nu^2/(z G_nu - 1) + W_nu^2/(z G_nu - 1)^2 G_mu(z G_nu/(z G_nu - 1)).
class MonoMultAltEvaluator final : public TransformEvaluator {
 public:
  MonoMultAltEvaluator(TransformHandle mu, TransformHandle nu)
      : mu_(std::move(mu)), nu_(std::move(nu)) {}
  Domain domain() const override { return Domain::PositiveHalfLine; }
  Complex G(Complex z) const override {
    const Complex gn = nu_.G(z);
    const Complex w = nu_.W(z);
    const Complex d = z * gn - 1.0;
    return gn - w * w / d + w * w / (d * d) * mu_.G(z * gn / d);
  }
  Complex psi(Complex z) const override { return psi_from_G(z); }

 private:
  TransformHandle mu_, nu_;
};

// Cauchy transform of sqrt(X) Y sqrt(X) for boolean independent X-1, Y-1:
//   G_mu + W_mu^2 ((z-1) G_nu - 1) / (z G_mu G_nu - (z G_mu - 1)(z G_nu - 1)).
class BoolMultNewEvaluator final : public TransformEvaluator {
 public:
  BoolMultNewEvaluator(TransformHandle mu, TransformHandle nu)
      : mu_(std::move(mu)), nu_(std::move(nu)) {}
  Domain domain() const override { return Domain::PositiveHalfLine; }
  Complex G(Complex z) const override {
    const Complex gm = mu_.G(z);
    const Complex gn = nu_.G(z);
    const Complex w = mu_.W(z);
    const Complex denom = z * gm * gn - (z * gm - 1.0) * (z * gn - 1.0);
    return gm + w * w * ((z - 1.0) * gn - 1.0) / denom;
  }
  Complex psi(Complex z) const override { return psi_from_G(z); }

 private:
  TransformHandle mu_, nu_;
};

// K-defined composites (circle monotone/boolean, Bercovici).
class KComposeEvaluator final : public TransformEvaluator {
 public:
  KComposeEvaluator(TransformHandle mu, TransformHandle nu, Domain domain)
      : mu_(std::move(mu)), nu_(std::move(nu)), domain_(domain) {}
  Domain domain() const override { return domain_; }
  Complex K(Complex z) const override { return mu_.K(nu_.K(z)); }
  Complex psi(Complex z) const override {
    const Complex k = K(z);
    return k / (1.0 - k);
  }
  Complex G(Complex z) const override { return G_from_psi(z); }

 private:
  TransformHandle mu_, nu_;
  Domain domain_;
};

class KProductEvaluator final : public TransformEvaluator {
 public:
  KProductEvaluator(TransformHandle mu, TransformHandle nu, Domain domain)
      : mu_(std::move(mu)), nu_(std::move(nu)), domain_(domain) {}
  Domain domain() const override { return domain_; }
  Complex K(Complex z) const override {
    if (z == Complex(0, 0)) return Complex(0, 0);  // K(0) = 0 in class S
    return mu_.K(z) * nu_.K(z) / z;
  }
  Complex psi(Complex z) const override {
    const Complex k = K(z);
    return k / (1.0 - k);
  }
  Complex G(Complex z) const override { return G_from_psi(z); }

 private:
  TransformHandle mu_, nu_;
  Domain domain_;
};

class FreeMultEvaluator final : public TransformEvaluator {
 public:
  FreeMultEvaluator(TransformHandle mu, TransformHandle nu, Domain domain,
                    SolveOptions opts)
      : mu_(std::move(mu)), nu_(std::move(nu)), domain_(domain), opts_(opts),
        cache_(std::make_shared<SubordinationCache>()) {}
  Domain domain() const override { return domain_; }
  Complex K(Complex z) const override {
    if (auto hit = cache_->find(z)) return mu_.K(hit->Z1);
    const auto pair = solve_multiplicative_subordination(mu_, nu_, z, opts_);
    cache_->insert(z, pair);
    return mu_.K(pair.Z1);
  }
  Complex psi(Complex z) const override {
    const Complex k = K(z);
    return k / (1.0 - k);
  }
  Complex G(Complex z) const override { return G_from_psi(z); }

 private:
  TransformHandle mu_, nu_;
  Domain domain_;
  SolveOptions opts_;
  std::shared_ptr<SubordinationCache> cache_;
};

ConvolutionResult formula_result(OpKind op, std::shared_ptr<const TransformEvaluator> ev) {
  return ConvolutionResult{op, ConvolutionMethod::TransformFormula,
                           TransformHandle(std::move(ev)),
                           "closed transform formula"};
}

// product operator of the atomic model for each model-backed operation
Matrix product_operator(OpKind op, const OperatorModel& model) {
  switch (op) {
    case OpKind::MonoAdd:
    case OpKind::BoolAdd:
      return model.X + model.Y;
    case OpKind::MonoMultPos: {
      // sqrt(S_x) = M_{sqrt x} P2 + (1 - P2), the displayed closed form
      const Matrix p2 = monotone_projection(model.mu, model.nu);
      const Eigen::Index m = static_cast<Eigen::Index>(model.nu.size());
      const Eigen::Index dim = model.dim();
      Matrix sqrt_s = Matrix::Identity(dim, dim) - p2;
      for (std::size_t i = 0; i < model.mu.size(); ++i) {
        const double sx = std::sqrt(model.mu.atoms()[i].position);
        sqrt_s.block(static_cast<Eigen::Index>(i) * m,
                     static_cast<Eigen::Index>(i) * m, m, m) +=
            sx * p2.block(static_cast<Eigen::Index>(i) * m,
                          static_cast<Eigen::Index>(i) * m, m, m);
      }
      return sqrt_s * model.Y * sqrt_s;
    }
    case OpKind::MonoMultAlt: {
      Matrix sqrt_y = Matrix::Zero(model.dim(), model.dim());
      const Eigen::Index m = static_cast<Eigen::Index>(model.nu.size());
      for (std::size_t i = 0; i < model.mu.size(); ++i)
        for (std::size_t j = 0; j < model.nu.size(); ++j) {
          const Eigen::Index idx = static_cast<Eigen::Index>(i) * m +
                                   static_cast<Eigen::Index>(j);
          sqrt_y(idx, idx) = std::sqrt(model.nu.atoms()[j].position);
        }
      return sqrt_y * model.X * sqrt_y;
    }
    case OpKind::BoolMultNew: {
      const Matrix sqrt_q = matrix_sqrt_psd(model.X);
      return sqrt_q * model.Y * sqrt_q;
    }
    case OpKind::MonoMultCircle:
    case OpKind::BoolMultCircle:
      return model.X * model.Y;
    default:
      throw PreconditionError(std::string(op_name(op)) +
                              " has no finite operator model");
  }
}

OperatorModel build_model(OpKind op, const AtomicMeasure& mu,
                          const AtomicMeasure& nu) {
  switch (op) {
    case OpKind::MonoAdd: return build_monotone_pair(mu, nu, false);
    case OpKind::MonoMultPos:
    case OpKind::MonoMultAlt:
    case OpKind::MonoMultCircle: return build_monotone_pair(mu, nu, true);
    case OpKind::BoolAdd: return build_boolean_pair(mu, nu, false);
    case OpKind::BoolMultNew:
    case OpKind::BoolMultCircle: return build_boolean_pair(mu, nu, true);
    default:
      throw PreconditionError(std::string(op_name(op)) +
                              " has no finite operator model");
  }
}

ConvolutionResult model_result(OpKind op, const AtomicMeasure& mu,
                               const AtomicMeasure& nu, Domain domain) {
  const OperatorModel model = build_model(op, mu, nu);
  const Matrix a = product_operator(op, model);
  return ConvolutionResult{op, ConvolutionMethod::OperatorModel,
                           spectral_distribution(a, model.omega, domain),
                           "operator model dim " + std::to_string(model.dim())};
}

Complex first_moment(const TransformHandle& h) {
  if (const AtomicMeasure* a = h.atomic_source()) {
    Complex m(0, 0);
    for (std::size_t i = 0; i < a->size(); ++i)
      m += a->atoms()[i].weight * a->point(i);
    return m;
  }
  return transform_moments(h, 1, 0.5)[0];
}

}  // namespace

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::MonoAdd: return "mono_add";
    case OpKind::BoolAdd: return "bool_add";
    case OpKind::FreeAdd: return "free_add";
    case OpKind::MonoMultPos: return "mono_mult";
    case OpKind::MonoMultAlt: return "mono_mult_alt";
    case OpKind::BoolMultNew: return "bool_mult_new";
    case OpKind::BoolMultBercovici: return "bool_mult";
    case OpKind::MonoMultCircle: return "mono_mult";
    case OpKind::BoolMultCircle: return "bool_mult";
    case OpKind::FreeMultPos: return "free_mult";
    case OpKind::FreeMultCircle: return "free_mult";
  }
  return "?";
}

TransformHandle ConvolutionResult::handle() const {
  if (is_undefined())
    throw PreconditionError("undefined convolution outcome has no transforms");
  if (is_atomic()) return handle_of(atoms());
  return std::get<TransformHandle>(value);
}

ConvolutionResult mono_add(const TransformHandle& mu, const TransformHandle& nu) {
  require_domains(OpKind::MonoAdd, mu.domain(), nu.domain());
  if (mu.atomic_source() && nu.atomic_source())
    return model_result(OpKind::MonoAdd, *mu.atomic_source(),
                        *nu.atomic_source(), Domain::RealLine);
  return formula_result(OpKind::MonoAdd,
                        std::make_shared<MonoAddEvaluator>(mu, nu));
}

ConvolutionResult bool_add(const TransformHandle& mu, const TransformHandle& nu) {
  require_domains(OpKind::BoolAdd, mu.domain(), nu.domain());
  if (mu.atomic_source() && nu.atomic_source())
    return model_result(OpKind::BoolAdd, *mu.atomic_source(),
                        *nu.atomic_source(), Domain::RealLine);
  return formula_result(OpKind::BoolAdd,
                        std::make_shared<BoolAddEvaluator>(mu, nu));
}

ConvolutionResult free_add(const TransformHandle& mu, const TransformHandle& nu,
                           const SolveOptions& opts) {
  require_domains(OpKind::FreeAdd, mu.domain(), nu.domain());
  const AtomicMeasure* am = mu.atomic_source();
  const AtomicMeasure* an = nu.atomic_source();
  // convolving with a Dirac is translation
  if (am && an && (am->is_dirac() || an->is_dirac())) {
    const bool left = am->is_dirac();
    const AtomicMeasure& other = left ? *an : *am;
    const double shift = (left ? am : an)->atoms()[0].position;
    return ConvolutionResult{OpKind::FreeAdd, ConvolutionMethod::Shortcut,
                             push_map(other, Translate{shift}),
                             "Dirac factor acts as translation"};
  }
  return ConvolutionResult{
      OpKind::FreeAdd, ConvolutionMethod::Subordination,
      TransformHandle(std::make_shared<FreeAddEvaluator>(mu, nu, opts)),
      "per-point subordination, tol " + std::to_string(opts.tol)};
}

ConvolutionResult mono_mult_pos(const TransformHandle& mu,
                                const TransformHandle& nu) {
  require_domains(OpKind::MonoMultPos, mu.domain(), nu.domain());
  // nu = delta_0 makes M_y = 0 in the model, so the product is delta_0
  if (is_dirac_at(nu.atomic_source(), 0.0))
    return ConvolutionResult{OpKind::MonoMultPos, ConvolutionMethod::Shortcut,
                             make_atomic(Domain::PositiveHalfLine,
                                         std::vector<Atom>{{0.0, 1.0}}),
                             "nu = delta_0 collapses the product"};
  if (mu.atomic_source() && nu.atomic_source())
    return model_result(OpKind::MonoMultPos, *mu.atomic_source(),
                        *nu.atomic_source(), Domain::PositiveHalfLine);
  return formula_result(OpKind::MonoMultPos,
                        std::make_shared<MonoMultPosEvaluator>(mu, nu));
}

ConvolutionResult mono_mult_alt(const TransformHandle& mu,
                                const TransformHandle& nu) {
  require_domains(OpKind::MonoMultAlt, mu.domain(), nu.domain());
  if (is_dirac_at(nu.atomic_source(), 0.0))
    return ConvolutionResult{OpKind::MonoMultAlt, ConvolutionMethod::Shortcut,
                             make_atomic(Domain::PositiveHalfLine,
                                         std::vector<Atom>{{0.0, 1.0}}),
                             "nu = delta_0 collapses the product"};
  if (mu.atomic_source() && nu.atomic_source())
    return model_result(OpKind::MonoMultAlt, *mu.atomic_source(),
                        *nu.atomic_source(), Domain::PositiveHalfLine);
  return formula_result(OpKind::MonoMultAlt,
                        std::make_shared<MonoMultAltEvaluator>(mu, nu));
}

ConvolutionResult bool_mult_new(const TransformHandle& mu,
                                const TransformHandle& nu) {
  require_domains(OpKind::BoolMultNew, mu.domain(), nu.domain());
  if (mu.atomic_source() && nu.atomic_source())
    return model_result(OpKind::BoolMultNew, *mu.atomic_source(),
                        *nu.atomic_source(), Domain::PositiveHalfLine);
  return formula_result(OpKind::BoolMultNew,
                        std::make_shared<BoolMultNewEvaluator>(mu, nu));
}

ConvolutionResult bool_mult_bercovici_pos(const TransformHandle& mu,
                                          const TransformHandle& nu,
                                          int class_samples,
                                          std::uint64_t seed) {
  require_domains(OpKind::BoolMultBercovici, mu.domain(), nu.domain());
  TransformHandle k_handle(std::make_shared<KProductEvaluator>(
      mu, nu, Domain::PositiveHalfLine));
  const ClassReport report =
      class_check(k_handle, FunctionClass::P, class_samples, seed);
  if (!report.passed)
    return ConvolutionResult{OpKind::BoolMultBercovici,
                             ConvolutionMethod::TransformFormula,
                             Undefined{report},
                             "K product left class P"};
  const AtomicMeasure* am = mu.atomic_source();
  const AtomicMeasure* an = nu.atomic_source();
  if (am && an && am->is_dirac() && an->is_dirac()) {
    // K_{delta_a}(z) = a z, so the product collapses to delta_{ab}
    const double ab = am->atoms()[0].position * an->atoms()[0].position;
    return ConvolutionResult{OpKind::BoolMultBercovici,
                             ConvolutionMethod::Shortcut,
                             make_atomic(Domain::PositiveHalfLine,
                                         std::vector<Atom>{{ab, 1.0}}),
                             "Dirac K-transforms collapse"};
  }
  return ConvolutionResult{OpKind::BoolMultBercovici,
                           ConvolutionMethod::TransformFormula,
                           std::move(k_handle), "class P membership sampled"};
}

ConvolutionResult mono_mult_circle(const TransformHandle& mu,
                                   const TransformHandle& nu) {
  require_domains(OpKind::MonoMultCircle, mu.domain(), nu.domain());
  if (mu.atomic_source() && nu.atomic_source())
    return model_result(OpKind::MonoMultCircle, *mu.atomic_source(),
                        *nu.atomic_source(), Domain::UnitCircle);
  return formula_result(
      OpKind::MonoMultCircle,
      std::make_shared<KComposeEvaluator>(mu, nu, Domain::UnitCircle));
}

ConvolutionResult bool_mult_circle(const TransformHandle& mu,
                                   const TransformHandle& nu) {
  require_domains(OpKind::BoolMultCircle, mu.domain(), nu.domain());
  if (mu.atomic_source() && nu.atomic_source())
    return model_result(OpKind::BoolMultCircle, *mu.atomic_source(),
                        *nu.atomic_source(), Domain::UnitCircle);
  return formula_result(
      OpKind::BoolMultCircle,
      std::make_shared<KProductEvaluator>(mu, nu, Domain::UnitCircle));
}

namespace {

ConvolutionResult free_mult(OpKind op, const TransformHandle& mu,
                            const TransformHandle& nu, Domain domain,
                            const SolveOptions& opts) {
  require_domains(op, mu.domain(), nu.domain());
  if (domain == Domain::UnitCircle) {
    if (std::abs(first_moment(mu)) < 1e-12 || std::abs(first_moment(nu)) < 1e-12)
      throw PreconditionError(
          "free multiplicative convolution on the circle needs nonvanishing "
          "first moments");
  } else {
    if (is_dirac_at(mu.atomic_source(), 0.0) || is_dirac_at(nu.atomic_source(), 0.0))
      throw PreconditionError(
          "free multiplicative convolution on R+ is undefined for delta_0");
  }
  const AtomicMeasure* am = mu.atomic_source();
  const AtomicMeasure* an = nu.atomic_source();
  // a Dirac factor acts as rotation / dilation
  if (am && an && (am->is_dirac() || an->is_dirac())) {
    const bool left = am->is_dirac();
    const AtomicMeasure& other = left ? *an : *am;
    const double pos = (left ? am : an)->atoms()[0].position;
    PushMap map = domain == Domain::UnitCircle ? PushMap(Rotate{pos})
                                               : PushMap(Dilate{pos});
    return ConvolutionResult{op, ConvolutionMethod::Shortcut,
                             push_map(other, map),
                             "Dirac factor acts as rotation/dilation"};
  }
  return ConvolutionResult{
      op, ConvolutionMethod::Subordination,
      TransformHandle(std::make_shared<FreeMultEvaluator>(mu, nu, domain, opts)),
      "per-point subordination, tol " + std::to_string(opts.tol)};
}

}  // namespace

ConvolutionResult free_mult_pos(const TransformHandle& mu,
                                const TransformHandle& nu,
                                const SolveOptions& opts) {
  return free_mult(OpKind::FreeMultPos, mu, nu, Domain::PositiveHalfLine, opts);
}

ConvolutionResult free_mult_circle(const TransformHandle& mu,
                                   const TransformHandle& nu,
                                   const SolveOptions& opts) {
  return free_mult(OpKind::FreeMultCircle, mu, nu, Domain::UnitCircle, opts);
}

ConvolutionResult convolve(OpKind op, const TransformHandle& mu,
                           const TransformHandle& nu, const SolveOptions& opts) {
  switch (op) {
    case OpKind::MonoAdd: return mono_add(mu, nu);
    case OpKind::BoolAdd: return bool_add(mu, nu);
    case OpKind::FreeAdd: return free_add(mu, nu, opts);
    case OpKind::MonoMultPos: return mono_mult_pos(mu, nu);
    case OpKind::MonoMultAlt: return mono_mult_alt(mu, nu);
    case OpKind::BoolMultNew: return bool_mult_new(mu, nu);
    case OpKind::BoolMultBercovici: return bool_mult_bercovici_pos(mu, nu);
    case OpKind::MonoMultCircle: return mono_mult_circle(mu, nu);
    case OpKind::BoolMultCircle: return bool_mult_circle(mu, nu);
    case OpKind::FreeMultPos: return free_mult_pos(mu, nu, opts);
    case OpKind::FreeMultCircle: return free_mult_circle(mu, nu, opts);
  }
  throw PreconditionError("unknown convolution");
}

ConvolutionResult convolve(OpKind op, const Measure& mu, const Measure& nu,
                           const SolveOptions& opts) {
  return convolve(op, handle_of(mu), handle_of(nu), opts);
}

double convolution_identity_defect(OpKind op, const TransformHandle& mu,
                                   const TransformHandle& nu,
                                   const TransformHandle& lambda, int points) {
  double worst = 0.0;
  auto track = [&worst](Complex a, Complex b) {
    worst = std::max(worst, std::abs(a - b));
  };
  switch (op) {
    case OpKind::MonoAdd:
      for (Complex z : seeded_upper_grid(points))
        track(lambda.F(z), mu.F(nu.F(z)));
      return worst;
    case OpKind::BoolAdd:
      for (Complex z : seeded_upper_grid(points))
        track(lambda.F(z), mu.F(z) + nu.F(z) - z);
      return worst;
    case OpKind::FreeAdd:
      for (Complex z : seeded_upper_grid(points)) {
        const auto pair = solve_additive_subordination(mu, nu, z);
        track(lambda.F(z), mu.F(pair.Z1));
        track(mu.F(pair.Z1), pair.Z1 + pair.Z2 - z);
      }
      return worst;
    case OpKind::MonoMultPos:
      for (Complex z : seeded_upper_grid(points))
        track(lambda.K(z), mu.K(nu.K(z)));
      return worst;
    case OpKind::MonoMultAlt:
      for (Complex z : seeded_upper_grid(points)) {
        const Complex gn = nu.G(z);
        const Complex w = nu.W(z);
        const Complex d = z * gn - 1.0;
        track(lambda.G(z), gn - w * w / d + w * w / (d * d) * mu.G(z * gn / d));
      }
      return worst;
    case OpKind::BoolMultNew:
      for (Complex z : seeded_upper_grid(points)) {
        const Complex gm = mu.G(z);
        const Complex gn = nu.G(z);
        const Complex w = mu.W(z);
        const Complex denom = z * gm * gn - (z * gm - 1.0) * (z * gn - 1.0);
        track(lambda.G(z), gm + w * w * ((z - 1.0) * gn - 1.0) / denom);
      }
      return worst;
    case OpKind::BoolMultBercovici:
      for (Complex z : seeded_upper_grid(points))
        track(lambda.K(z), mu.K(z) * nu.K(z) / z);
      return worst;
    case OpKind::MonoMultCircle:
      for (Complex z : seeded_disk_grid(points))
        track(lambda.K(z), mu.K(nu.K(z)));
      return worst;
    case OpKind::BoolMultCircle:
      for (Complex z : seeded_disk_grid(points))
        track(lambda.K(z), mu.K(z) * nu.K(z) / z);
      return worst;
    case OpKind::FreeMultPos:
      for (Complex z : seeded_upper_grid(points)) {
        const auto pair = solve_multiplicative_subordination(mu, nu, z);
        track(lambda.K(z), mu.K(pair.Z1));
        track(mu.K(pair.Z1), pair.Z1 * pair.Z2 / z);
      }
      return worst;
    case OpKind::FreeMultCircle:
      for (Complex z : seeded_disk_grid(points)) {
        const auto pair = solve_multiplicative_subordination(mu, nu, z);
        track(lambda.K(z), mu.K(pair.Z1));
        track(mu.K(pair.Z1), pair.Z1 * pair.Z2 / z);
      }
      return worst;
  }
  throw PreconditionError("unknown convolution");
}

ModelDump model_for(OpKind op, const AtomicMeasure& mu, const AtomicMeasure& nu) {
  OperatorModel model = build_model(op, mu, nu);
  Matrix product = product_operator(op, model);
  return ModelDump{std::move(model), std::move(product)};
}

}  // namespace ncconv
