#include "ncconv/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncconv {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Polynomial extrapolation of (t_i, y_i) to t = 0 (Neville), returning the
// value and the magnitude of the last correction as an error estimate.
std::pair<double, double> neville_at_zero(std::span<const double> t,
                                          std::span<const double> y) {
  const std::size_t n = t.size();
  std::vector<double> p(y.begin(), y.end());
  double value = p[0];
  double err = 0;
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (t[i] * p[i + 1] - t[i + m] * p[i]) / (t[i] - t[i + m]);
    err = std::abs(p[0] - value);
    value = p[0];
  }
  return {value, err};
}

}  // namespace

Complex TransformEvaluator::K(Complex z) const {
  const Complex p = psi(z);
  const Complex d = 1.0 + p;
  if (d == Complex(0, 0)) throw PoleError("K undefined: 1 + psi(z) = 0");
  return p / d;
}

Complex TransformEvaluator::W(Complex) const {
  throw PreconditionError(
      "W is only available for half-line measures with an evaluable source");
}

Complex TransformEvaluator::G_from_psi(Complex z) const {
  if (z == Complex(0, 0)) throw PoleError("cannot evaluate G at 0 via psi");
  return (psi(1.0 / z) + 1.0) / z;
}

Complex TransformEvaluator::psi_from_G(Complex z) const {
  if (z == Complex(0, 0)) return Complex(0, 0);  // psi(0) = 0 always
  return G(1.0 / z) / z - 1.0;
}

Complex TransformHandle::F(Complex z) const {
  const Complex g = eval_->G(z);
  if (g == Complex(0, 0)) {
    const double inf = std::numeric_limits<double>::infinity();
    return Complex(inf, inf);
  }
  return 1.0 / g;
}

namespace {

class AtomicEvaluator final : public TransformEvaluator {
 public:
  explicit AtomicEvaluator(AtomicMeasure mu) : mu_(std::move(mu)) {
    points_.reserve(mu_.size());
    for (std::size_t i = 0; i < mu_.size(); ++i) points_.push_back(mu_.point(i));
  }

  Domain domain() const override { return mu_.domain(); }

  Complex G(Complex z) const override {
    Complex acc(0, 0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const Complex d = z - points_[i];
      if (std::abs(d) < kPoleTol)
        throw PoleError("G evaluated within 1e-13 of an atom");
      acc += mu_.atoms()[i].weight / d;
    }
    return acc;
  }

  Complex psi(Complex z) const override {
    if (mu_.domain() == Domain::RealLine)
      throw DomainError("psi is defined for circle and half-line measures");
    Complex acc(0, 0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const Complex x = points_[i];
      if (x == Complex(0, 0)) continue;  // atom at 0 contributes nothing
      const Complex d = 1.0 - x * z;
      if (std::abs(d) < kPoleTol * std::abs(x))
        throw PoleError("psi evaluated within 1e-13 of a pole");
      acc += mu_.atoms()[i].weight * x * z / d;
    }
    return acc;
  }

  Complex W(Complex z) const override {
    if (mu_.domain() != Domain::PositiveHalfLine)
      throw DomainError("W is defined for half-line measures only");
    Complex acc(0, 0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double x = mu_.atoms()[i].position;
      const Complex d = z - points_[i];
      if (std::abs(d) < kPoleTol)
        throw PoleError("W evaluated within 1e-13 of an atom");
      acc += mu_.atoms()[i].weight * std::sqrt(x) / d;
    }
    return acc;
  }

  const AtomicMeasure* atomic_source() const override { return &mu_; }

 private:
  AtomicMeasure mu_;
  std::vector<Complex> points_;
};

class DensityEvaluator final : public TransformEvaluator {
 public:
  explicit DensityEvaluator(DensityMeasure mu) : mu_(std::move(mu)) {}

  Domain domain() const override { return mu_.domain(); }

  Complex G(Complex z) const override {
    if (mu_.domain() == Domain::UnitCircle) return G_from_psi(z);
    return quadrature([&](double x, double rho) {
      const Complex d = z - x;
      if (std::abs(d) < kPoleTol) throw PoleError("G evaluated on the grid");
      return rho / d;
    }) + atom_sum([&](Complex x, double w) { return w / (z - x); });
  }

  Complex psi(Complex z) const override {
    if (mu_.domain() == Domain::RealLine)
      throw DomainError("psi is defined for circle and half-line measures");
    if (mu_.domain() == Domain::PositiveHalfLine) return psi_from_G(z);
    // circle: grid holds angles on [0, 2*pi], integrand against e^{i theta}
    return quadrature([&](double theta, double rho) {
      const Complex x = std::polar(1.0, theta);
      const Complex d = 1.0 - x * z;
      if (std::abs(d) < kPoleTol) throw PoleError("psi evaluated at a pole");
      return rho * x * z / d;
    }) + atom_sum([&](Complex x, double w) { return w * x * z / (1.0 - x * z); });
  }

  Complex W(Complex z) const override {
    if (mu_.domain() != Domain::PositiveHalfLine)
      throw DomainError("W is defined for half-line measures only");
    return quadrature([&](double x, double rho) {
      return rho * std::sqrt(x) / (z - x);
    }) + atom_sum([&](Complex x, double w) {
      return w * std::sqrt(x.real()) / (z - x);
    });
  }

 private:
  template <typename F>
  Complex quadrature(F&& f) const {
    const auto& grid = mu_.grid();
    const auto& rho = mu_.density();
    Complex acc(0, 0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      acc += 0.5 * (f(grid[i], rho[i]) + f(grid[i + 1], rho[i + 1])) *
             (grid[i + 1] - grid[i]);
    }
    return acc;
  }

  template <typename F>
  Complex atom_sum(F&& f) const {
    Complex acc(0, 0);
    for (const auto& a : mu_.atom_part()) {
      const Complex x = mu_.domain() == Domain::UnitCircle
                            ? std::polar(1.0, a.position)
                            : Complex(a.position, 0);
      acc += f(x, a.weight);
    }
    return acc;
  }

  DensityMeasure mu_;
};

class SemicircleEvaluator final : public TransformEvaluator {
 public:
  SemicircleEvaluator(double mean, double variance)
      : mean_(mean), var_(variance) {
    if (!(variance > 0)) throw PreconditionError("semicircle variance must be > 0");
  }

  Domain domain() const override { return Domain::RealLine; }

  Complex G(Complex z) const override {
    const double r = 2.0 * std::sqrt(var_);
    const Complex zc = z - mean_;
    // branch with G ~ 1/z at infinity and Im G < 0 on C+
    const Complex s = std::sqrt(zc - r) * std::sqrt(zc + r);
    return (zc - s) / (2.0 * var_);
  }

  Complex psi(Complex) const override {
    throw DomainError("psi is defined for circle and half-line measures");
  }

 private:
  double mean_;
  double var_;
};

class CauchyRuleEvaluator final : public TransformEvaluator {
 public:
  CauchyRuleEvaluator(Domain domain, std::function<Complex(Complex)> g)
      : domain_(domain), g_(std::move(g)) {
    if (domain_ == Domain::UnitCircle)
      throw DomainError("Cauchy-rule handles are for real-supported measures");
  }
  Domain domain() const override { return domain_; }
  Complex G(Complex z) const override { return g_(z); }
  Complex psi(Complex z) const override {
    if (domain_ == Domain::RealLine)
      throw DomainError("psi is defined for circle and half-line measures");
    return psi_from_G(z);
  }

 private:
  Domain domain_;
  std::function<Complex(Complex)> g_;
};

class KRuleEvaluator final : public TransformEvaluator {
 public:
  KRuleEvaluator(Domain domain, std::function<Complex(Complex)> k)
      : domain_(domain), k_(std::move(k)) {
    if (domain_ == Domain::RealLine)
      throw DomainError("K-rule handles are for circle or half-line measures");
  }
  Domain domain() const override { return domain_; }
  Complex K(Complex z) const override { return k_(z); }
  Complex psi(Complex z) const override {
    const Complex k = k_(z);
    return k / (1.0 - k);
  }
  Complex G(Complex z) const override { return G_from_psi(z); }

 private:
  Domain domain_;
  std::function<Complex(Complex)> k_;
};

}  // namespace

TransformHandle cauchy_handle(Domain domain, std::function<Complex(Complex)> g) {
  return TransformHandle(std::make_shared<CauchyRuleEvaluator>(domain, std::move(g)));
}

TransformHandle k_rule_handle(Domain domain, std::function<Complex(Complex)> k) {
  return TransformHandle(std::make_shared<KRuleEvaluator>(domain, std::move(k)));
}

TransformHandle push_handle(const TransformHandle& h, const PushMap& map) {
  if (const AtomicMeasure* a = h.atomic_source())
    return handle_of(push_map(*a, map));
  if (std::holds_alternative<Translate>(map)) {
    if (h.domain() != Domain::RealLine)
      throw DomainError("translation is only defined on the real line");
    const double x = std::get<Translate>(map).offset;
    return cauchy_handle(Domain::RealLine,
                         [h, x](Complex z) { return h.G(z - x); });
  }
  if (std::holds_alternative<Dilate>(map)) {
    if (h.domain() != Domain::PositiveHalfLine)
      throw DomainError("dilation is only defined on the positive half-line");
    const double alpha = std::get<Dilate>(map).factor;
    if (alpha < 0) throw DomainError("dilation factor must be >= 0");
    if (alpha == 0)
      return handle_of(make_atomic(Domain::PositiveHalfLine,
                                   std::vector<Atom>{{0.0, 1.0}}));
    return cauchy_handle(Domain::PositiveHalfLine,
                         [h, alpha](Complex z) { return h.G(z / alpha) / alpha; });
  }
  if (h.domain() != Domain::UnitCircle)
    throw DomainError("rotation is only defined on the unit circle");
  const double theta = std::get<Rotate>(map).angle;
  const Complex omega = std::polar(1.0, theta);
  // psi_{R mu}(z) = psi_mu(e^{i theta} z); go through K so G derives cleanly
  return k_rule_handle(Domain::UnitCircle,
                       [h, omega](Complex z) { return h.K(omega * z); });
}

TransformHandle handle_of(const AtomicMeasure& mu) {
  return TransformHandle(std::make_shared<AtomicEvaluator>(mu));
}

TransformHandle handle_of(const DensityMeasure& mu) {
  return TransformHandle(std::make_shared<DensityEvaluator>(mu));
}

TransformHandle handle_of(const Measure& mu) {
  return std::visit([](const auto& m) { return handle_of(m); }, mu);
}

TransformHandle semicircle_handle(double mean, double variance) {
  return TransformHandle(std::make_shared<SemicircleEvaluator>(mean, variance));
}

Complex eval_G(const Measure& mu, Complex z) { return handle_of(mu).G(z); }

Complex eval_F(const Measure& mu, Complex z) { return handle_of(mu).F(z); }

Complex eval_psi(const Measure& mu, Complex z) {
  if (domain_of(mu) == Domain::RealLine)
    throw DomainError("psi is defined for circle and half-line measures");
  return handle_of(mu).psi(z);
}

Complex eval_K(const Measure& mu, Complex z) {
  if (domain_of(mu) == Domain::RealLine)
    throw DomainError("K is defined for circle and half-line measures");
  return handle_of(mu).K(z);
}

Complex eval_W(const Measure& mu, Complex z) {
  if (domain_of(mu) != Domain::PositiveHalfLine)
    throw DomainError("W is defined for half-line measures only");
  return handle_of(mu).W(z);
}

namespace {

void add_witness(ClassReport& report, Complex z, double violation,
                 const char* condition) {
  report.passed = false;
  report.witnesses.push_back({z, violation, condition});
}

void check_class_f(const TransformHandle& h, int samples, SeededRng& rng,
                   ClassReport& report) {
  for (int i = 0; i < samples; ++i) {
    const Complex z(rng.uniform(-5.0, 5.0), rng.uniform(1e-3, 3.0));
    const Complex f = h.F(z);
    const double defect = z.imag() - f.imag();
    if (defect > 1e-9) add_witness(report, z, defect, "Im F(z) >= Im z");
  }
  // normalization at infinity: F(iy)/iy -> 1
  const Complex big(0.0, 1e8);
  const Complex ratio = h.F(big) / big;
  if (std::abs(ratio - 1.0) > 1e-5)
    add_witness(report, big, std::abs(ratio - 1.0), "F(iy)/iy -> 1");
}

void check_class_s(const TransformHandle& h, int samples, SeededRng& rng,
                   ClassReport& report) {
  const Complex k0 = h.K(Complex(0, 0));
  if (std::abs(k0) > 1e-12) add_witness(report, Complex(0, 0), std::abs(k0), "K(0) = 0");
  for (int i = 0; i < samples; ++i) {
    const Complex z = std::polar(rng.uniform(1e-3, 0.999), rng.uniform(0.0, kTwoPi));
    const Complex k = h.K(z);
    if (std::abs(k) > 1.0 + 1e-12)
      add_witness(report, z, std::abs(k) - 1.0, "|K(z)| <= 1 on D");
  }
}

// Continuous argument on C \ R+: (0, 2*pi), with the negative axis at pi.
double arg_slit(Complex w) {
  double a = std::arg(w);
  if (a < 0) a += kTwoPi;
  return a;
}

void check_class_p(const TransformHandle& h, int samples, SeededRng& rng,
                   ClassReport& report) {
  // upper half-plane: pi >= arg K(z) >= arg z, plus reflection symmetry
  for (int i = 0; i < samples; ++i) {
    Complex z;
    if (i % 4 == 3) {
      // points hugging the positive axis, where the argument condition is
      // most fragile
      z = Complex(rng.uniform(1e-2, 5.0), rng.uniform(1e-3, 5e-2));
    } else {
      z = Complex(rng.uniform(-4.0, 6.0), rng.uniform(1e-2, 3.0));
    }
    const Complex k = h.K(z);
    const double az = arg_slit(z);
    const double ak = arg_slit(k);
    if (ak > M_PI + 1e-9)
      add_witness(report, z, ak - M_PI, "arg K(z) <= pi");
    else if (ak < az - 1e-9)
      add_witness(report, z, az - ak, "arg K(z) >= arg z");
    const Complex kbar = h.K(std::conj(z));
    const double sym = std::abs(kbar - std::conj(k));
    if (sym > 1e-10 * std::max(1.0, std::abs(k)))
      add_witness(report, z, sym, "K(conj z) = conj K(z)");
  }
  // negative reals: K real, <= 0, and K(t) -> 0 as t -> 0-
  for (int e = 0; e <= 8; ++e) {
    const Complex t(-std::pow(10.0, 1.0 - e), 0.0);
    const Complex k = h.K(t);
    if (std::abs(k.imag()) > 1e-10)
      add_witness(report, t, std::abs(k.imag()), "K real on (-inf, 0)");
    if (k.real() > 1e-12)
      add_witness(report, t, k.real(), "K <= 0 on (-inf, 0)");
  }
  const Complex tiny(-1e-8, 0.0);
  const double lim = std::abs(h.K(tiny));
  if (lim > 1e-4) add_witness(report, tiny, lim, "lim_{t->0-} K(t) = 0");
}

}  // namespace

ClassReport class_check(const TransformHandle& handle, FunctionClass which,
                        int samples, std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("class_check needs samples >= 1");
  ClassReport report;
  report.which = which;
  SeededRng rng(seed);
  switch (which) {
    case FunctionClass::F: check_class_f(handle, samples, rng, report); break;
    case FunctionClass::S: check_class_s(handle, samples, rng, report); break;
    case FunctionClass::P: check_class_p(handle, samples, rng, report); break;
  }
  return report;
}

namespace {

// golden-section maximization of f on [a, b]
template <typename F>
double golden_max(F&& f, double a, double b, double tol) {
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

DensityMeasure stieltjes_invert(const TransformHandle& handle,
                                std::span<const double> grid,
                                const InversionOptions& options,
                                InversionDiagnostics* diagnostics) {
  if (handle.domain() == Domain::UnitCircle)
    throw DomainError("Stieltjes inversion applies to real-supported measures");
  if (grid.size() < 2) throw PreconditionError("inversion grid needs >= 2 points");
  std::vector<double> ladder = options.eps_ladder;
  if (ladder.empty()) throw PreconditionError("empty epsilon ladder");
  std::sort(ladder.begin(), ladder.end(), std::greater<>());
  const double eps_scan = ladder.front();
  const double eps_min = ladder.back();
  const std::size_t n = grid.size();

  auto im_g = [&](double x, double eps) { return handle.G(Complex(x, eps)).imag(); };

  // --- atom detection: local maxima of -Im G at the coarsest rung ---
  std::vector<double> scan(n);
  for (std::size_t i = 0; i < n; ++i) scan[i] = -im_g(grid[i], eps_scan);
  std::vector<Atom> atoms;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(scan[i] > scan[i - 1] && scan[i] >= scan[i + 1])) continue;
    if (eps_scan * scan[i] < 0.1 * options.atom_threshold) continue;
    // refine down the ladder: the peak of -eps*Im G sharpens around the pole
    double xhat = grid[i];
    double radius = std::max(grid[i + 1] - grid[i], grid[i] - grid[i - 1]);
    for (double eps : ladder) {
      auto peak = [&](double x) { return -eps * im_g(x, eps); };
      xhat = golden_max(peak, xhat - radius, xhat + radius,
                        1e-13 * std::max(1.0, std::abs(xhat)));
      radius = std::max(eps, 1e-9);
    }
    // classification at the smallest rung
    if (eps_min * std::abs(im_g(xhat, eps_min)) <= options.atom_threshold) continue;
    if (handle.domain() == Domain::PositiveHalfLine && xhat < 0 && xhat > -1e-9)
      xhat = 0.0;
    // residue by extrapolation of -eps*Im G in eps^2
    std::vector<double> t(ladder.size()), y(ladder.size());
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      t[k] = ladder[k] * ladder[k];
      y[k] = -ladder[k] * im_g(xhat, ladder[k]);
    }
    const auto [w, werr] = neville_at_zero(t, y);
    (void)werr;
    if (w <= options.atom_threshold) continue;
    if (!atoms.empty() && std::abs(atoms.back().position - xhat) < 1e-8) continue;
    atoms.push_back({xhat, w});
  }

  // --- density by Richardson extrapolation of the pole-subtracted G ---
  auto im_g_cont = [&](double x, double eps) {
    Complex g = handle.G(Complex(x, eps));
    for (const auto& a : atoms) g -= a.weight / Complex(x - a.position, eps);
    return g.imag();
  };
  std::vector<double> density(n, 0.0);
  double worst = 0.0;
  std::size_t flagged = 0;
  std::vector<double> t(ladder.size()), y(ladder.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      t[k] = ladder[k];
      y[k] = -im_g_cont(grid[i], ladder[k]) / M_PI;
    }
    const auto [rho, err] = neville_at_zero(t, y);
    density[i] = std::max(rho, 0.0);
    worst = std::max(worst, err);
    if (err > options.disagreement_tol) ++flagged;
  }
  if (static_cast<double>(flagged) >
      options.max_bad_fraction * static_cast<double>(n)) {
    throw ConvergenceError("inversion extrapolation disagreement > " +
                           std::to_string(options.disagreement_tol) + " at " +
                           std::to_string(flagged) + " of " + std::to_string(n) +
                           " grid points");
  }

  // --- raw mass from the Poisson-smoothed boundary values plus the tail ---
  double h_max = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) h_max = std::max(h_max, grid[i + 1] - grid[i]);
  const double eps_mass = std::max(2.0 * h_max, eps_min);
  double smoothed_mass = 0.0;
  double prev = -im_g_cont(grid[0], eps_mass) / M_PI;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double next = -im_g_cont(grid[i + 1], eps_mass) / M_PI;
    smoothed_mass += 0.5 * (prev + next) * (grid[i + 1] - grid[i]);
    prev = next;
  }
  auto g_cont_edge = [&](double x) {
    Complex g = handle.G(Complex(x, eps_min));
    for (const auto& a : atoms) g -= a.weight / Complex(x - a.position, eps_min);
    return g;
  };
  const double tail = eps_mass / M_PI *
                      (g_cont_edge(grid[n - 1]).real() - g_cont_edge(grid[0]).real());
  double atom_mass = 0.0;
  for (const auto& a : atoms) atom_mass += a.weight;
  const double raw_mass = smoothed_mass + tail + atom_mass;

  if (diagnostics) {
    diagnostics->raw_mass = raw_mass;
    diagnostics->worst_disagreement = worst;
    diagnostics->flagged_points = flagged;
    diagnostics->grid_points = n;
  }
  if (std::abs(raw_mass - 1.0) > 0.05)
    throw ConvergenceError("inversion recovered mass " + std::to_string(raw_mass));

  // normalize the recovered measure to total mass one
  double dens_mass = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    dens_mass += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
  const double scale = 1.0 / (dens_mass + atom_mass);
  for (auto& v : density) v *= scale;
  for (auto& a : atoms) a.weight *= scale;
  return DensityMeasure(handle.domain(), {grid.begin(), grid.end()},
                        std::move(density), std::move(atoms));
}

std::vector<Complex> transform_moments(const TransformHandle& handle, int n,
                                       double radius, int points) {
  if (n < 1) throw PreconditionError("moment order must be >= 1");
  std::vector<Complex> out(static_cast<std::size_t>(n), Complex(0, 0));
  if (handle.domain() == Domain::UnitCircle) {
    if (!(radius > 0 && radius < 1))
      throw PreconditionError("circle moment extraction needs radius in (0,1)");
    // psi(z) = sum_{k>=1} m_k z^k; read coefficients off |z| = radius
    for (int j = 0; j < points; ++j) {
      const double theta = kTwoPi * (j + 0.5) / points;
      const Complex p = handle.psi(std::polar(radius, theta));
      for (int k = 1; k <= n; ++k)
        out[k - 1] += p * std::polar(1.0, -k * theta);
    }
    for (int k = 1; k <= n; ++k)
      out[k - 1] /= static_cast<double>(points) * std::pow(radius, k);
    return out;
  }
  // real domains: m_k = (1/2 pi i) contour integral of z^k G(z);
  // evaluate G in the upper half-plane only, reflecting G(conj z) = conj G(z)
  for (int j = 0; j < points; ++j) {
    const double theta = kTwoPi * (j + 0.5) / points;
    const Complex z = std::polar(radius, theta);
    const Complex g = z.imag() >= 0 ? handle.G(z) : std::conj(handle.G(std::conj(z)));
    for (int k = 1; k <= n; ++k)
      out[k - 1] += std::pow(z, k + 1) * g;
  }
  for (auto& m : out) m /= static_cast<double>(points);
  return out;
}

}  // namespace ncconv
