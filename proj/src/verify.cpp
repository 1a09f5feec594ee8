#include "ncconv/verify.hpp"

#include <cmath>
#include <sstream>

namespace ncconv {

namespace {

std::string fmt(double v) {
  std::ostringstream oss;
  oss.precision(3);
  oss << std::scientific << v;
  return oss.str();
}

AtomicMeasure dirac(Domain d, double x) {
  return make_atomic(d, std::vector<Atom>{{x, 1.0}});
}

double handle_gap(const TransformHandle& a, const TransformHandle& b, int points) {
  double worst = 0;
  if (a.domain() == Domain::UnitCircle) {
    for (Complex z : seeded_disk_grid(points))
      worst = std::max(worst, std::abs(a.K(z) - b.K(z)));
  } else {
    for (Complex z : seeded_upper_grid(points))
      worst = std::max(worst, std::abs(a.G(z) - b.G(z)));
  }
  return worst;
}

}  // namespace

SuiteResult run_suite_diracs(std::uint64_t seed) {
  SuiteResult suite;
  suite.name = "diracs";
  SeededRng rng(seed ^ 0xD17AC);

  // R: delta_x |> mu = delta_x (u) mu
  {
    const auto mu = random_atomic(rng, Domain::RealLine, 4);
    double worst = 0;
    for (double x : {0.9, -1.7, 0.0}) {
      const auto dx = handle_of(dirac(Domain::RealLine, x));
      worst = std::max(worst, handle_gap(mono_add(dx, handle_of(mu)).handle(),
                                         bool_add(dx, handle_of(mu)).handle(), 20));
    }
    suite.check(worst < 1e-12, "bridge R: dirac |> mu = dirac (u) mu", fmt(worst));
  }
  // T: delta_omega |>x mu = delta_omega xu mu
  {
    const auto mu = random_atomic(rng, Domain::UnitCircle, 4);
    double worst = 0;
    for (double theta : {0.7, 2.4}) {
      const auto dx = handle_of(dirac(Domain::UnitCircle, theta));
      worst = std::max(worst,
                       handle_gap(mono_mult_circle(dx, handle_of(mu)).handle(),
                                  bool_mult_circle(dx, handle_of(mu)).handle(), 20));
    }
    suite.check(worst < 1e-12, "bridge T: dirac mono = dirac bool", fmt(worst));
  }
  // R+: delta_x |>x mu = delta_x x~u mu
  {
    const auto mu = random_atomic(rng, Domain::PositiveHalfLine, 4);
    double worst = 0;
    for (double x : {0.6, 2.2}) {
      const auto dx = handle_of(dirac(Domain::PositiveHalfLine, x));
      worst = std::max(worst,
                       handle_gap(mono_mult_pos(dx, handle_of(mu)).handle(),
                                  bool_mult_new(dx, handle_of(mu)).handle(), 20));
    }
    suite.check(worst < 1e-12, "bridge R+: dirac mono-mult = dirac bool-mult-new",
                fmt(worst));
  }
  // R+: delta_x ~|> mu = mu x~u delta_x
  {
    const auto mu = random_atomic(rng, Domain::PositiveHalfLine, 4);
    double worst = 0;
    for (double x : {0.6, 2.2}) {
      const auto dx = handle_of(dirac(Domain::PositiveHalfLine, x));
      worst = std::max(worst,
                       handle_gap(mono_mult_alt(dx, handle_of(mu)).handle(),
                                  bool_mult_new(handle_of(mu), dx).handle(), 20));
    }
    suite.check(worst < 1e-12, "bridge R+: alt-mono = right bool-mult-new",
                fmt(worst));
  }
  // affinity of mono_add in the first argument
  {
    double worst = 0;
    for (int trial = 0; trial < 5; ++trial) {
      const Measure m1{random_atomic(rng, Domain::RealLine, 3)};
      const Measure m2{random_atomic(rng, Domain::RealLine, 3)};
      const auto nu = handle_of(random_atomic(rng, Domain::RealLine, 3));
      const double t = rng.uniform(0.1, 0.9);
      const double w[] = {t, 1 - t};
      const auto mixed =
          std::get<AtomicMeasure>(mixture(w, std::vector<Measure>{m1, m2}));
      const auto lhs = mono_add(handle_of(mixed), nu);
      const Measure r1{mono_add(handle_of(std::get<AtomicMeasure>(m1)), nu).atoms()};
      const Measure r2{mono_add(handle_of(std::get<AtomicMeasure>(m2)), nu).atoms()};
      const auto rhs =
          std::get<AtomicMeasure>(mixture(w, std::vector<Measure>{r1, r2}));
      worst = std::max(worst, handle_gap(lhs.handle(), handle_of(rhs), 20));
    }
    suite.check(worst < 1e-12, "mono_add affine in the first argument", fmt(worst));
  }
  // unit laws
  {
    const auto mu = random_atomic(rng, Domain::RealLine, 4);
    const auto d0 = handle_of(dirac(Domain::RealLine, 0.0));
    double worst = handle_gap(mono_add(d0, handle_of(mu)).handle(), handle_of(mu), 20);
    worst = std::max(worst, handle_gap(bool_add(d0, handle_of(mu)).handle(),
                                       handle_of(mu), 20));
    const auto pos = random_atomic(rng, Domain::PositiveHalfLine, 4);
    const auto d1 = handle_of(dirac(Domain::PositiveHalfLine, 1.0));
    worst = std::max(worst, handle_gap(mono_mult_pos(d1, handle_of(pos)).handle(),
                                       handle_of(pos), 20));
    worst = std::max(worst, handle_gap(bool_mult_new(d1, handle_of(pos)).handle(),
                                       handle_of(pos), 20));
    suite.check(worst < 1e-12, "unit laws (delta_0 additive, delta_1 multiplicative)",
                fmt(worst));
  }
  return suite;
}

SuiteResult run_suite_oracles(std::uint64_t seed) {
  SuiteResult suite;
  suite.name = "oracles";
  struct Case {
    OpKind op;
    ResolventKind kind;
    Domain domain;
    const char* label;
  };
  const std::vector<Case> cases{
      {OpKind::MonoAdd, ResolventKind::MonotoneAdd, Domain::RealLine, "monotone add"},
      {OpKind::BoolAdd, ResolventKind::BooleanAdd, Domain::RealLine, "boolean add"},
      {OpKind::MonoMultPos, ResolventKind::MonotoneMult, Domain::PositiveHalfLine,
       "monotone mult"},
      {OpKind::MonoMultAlt, ResolventKind::MonotoneMultAlt, Domain::PositiveHalfLine,
       "alt monotone mult"},
      {OpKind::BoolMultNew, ResolventKind::BooleanMultNew, Domain::PositiveHalfLine,
       "new boolean mult"},
  };
  const auto zs = seeded_upper_grid(50);
  for (const auto& c : cases) {
    SeededRng rng(seed ^ 0x07ACE);
    double worst = 0;
    for (int trial = 0; trial < 25; ++trial) {
      const auto mu = random_atomic(rng, c.domain, 5);
      const auto nu = random_atomic(rng, c.domain, 5);
      const auto dump = model_for(c.op, mu, nu);
      const auto lambda = convolve(c.op, Measure{mu}, Measure{nu});
      const auto h = lambda.handle();
      for (Complex z : zs) {
        const Complex via_matrix =
            matrix_resolvent(dump.product, dump.model.omega, z);
        const Complex via_formula = analytic_resolvent(c.kind, mu, nu, z);
        const Complex via_transform = h.G(z);
        worst = std::max(worst, std::abs(via_matrix - via_formula));
        worst = std::max(worst, std::abs(via_formula - via_transform));
        worst = std::max(worst, std::abs(via_matrix - via_transform));
      }
    }
    suite.check(worst < 1e-10,
                std::string("oracle triangle: ") + c.label + " (25 pairs, 50 z)",
                fmt(worst));
  }
  return suite;
}

SuiteResult run_suite_associativity(std::uint64_t seed) {
  SuiteResult suite;
  suite.name = "associativity";
  SeededRng rng(seed ^ 0xA550C);

  struct Case {
    OpKind op;
    Domain domain;
    const char* label;
  };
  for (const auto& c : std::vector<Case>{
           {OpKind::MonoAdd, Domain::RealLine, "mono_add"},
           {OpKind::BoolAdd, Domain::RealLine, "bool_add"},
           {OpKind::MonoMultPos, Domain::PositiveHalfLine, "mono_mult (R+)"},
           {OpKind::MonoMultCircle, Domain::UnitCircle, "mono_mult (T)"},
           {OpKind::BoolMultCircle, Domain::UnitCircle, "bool_mult (T)"}}) {
    double worst = 0;
    for (int trial = 0; trial < 4; ++trial) {
      const auto a = handle_of(random_atomic(rng, c.domain, 3));
      const auto b = handle_of(random_atomic(rng, c.domain, 3));
      const auto d = handle_of(random_atomic(rng, c.domain, 3));
      const auto left = convolve(c.op, convolve(c.op, a, b).handle(), d);
      const auto right = convolve(c.op, a, convolve(c.op, b, d).handle());
      worst = std::max(worst, handle_gap(left.handle(), right.handle(), 20));
    }
    suite.check(worst < 1e-8, std::string("associativity: ") + c.label, fmt(worst));
  }
  // free_add associativity via nested subordination
  {
    double worst = 0;
    for (int trial = 0; trial < 2; ++trial) {
      const auto a = handle_of(random_atomic(rng, Domain::RealLine, 2));
      const auto b = handle_of(random_atomic(rng, Domain::RealLine, 2));
      const auto d = handle_of(random_atomic(rng, Domain::RealLine, 2));
      const auto left = free_add(free_add(a, b).handle(), d);
      const auto right = free_add(a, free_add(b, d).handle());
      for (Complex z : seeded_upper_grid(10))
        worst = std::max(worst, std::abs(left.handle().G(z) - right.handle().G(z)));
    }
    suite.check(worst < 1e-8, "associativity: free_add", fmt(worst));
  }
  // commutativity where it holds
  {
    double worst = 0;
    for (int trial = 0; trial < 4; ++trial) {
      const auto a = handle_of(random_atomic(rng, Domain::RealLine, 3));
      const auto b = handle_of(random_atomic(rng, Domain::RealLine, 3));
      worst = std::max(worst, handle_gap(bool_add(a, b).handle(),
                                         bool_add(b, a).handle(), 20));
      const auto ca = handle_of(random_atomic(rng, Domain::UnitCircle, 3));
      const auto cb = handle_of(random_atomic(rng, Domain::UnitCircle, 3));
      worst = std::max(worst, handle_gap(bool_mult_circle(ca, cb).handle(),
                                         bool_mult_circle(cb, ca).handle(), 20));
    }
    suite.check(worst < 1e-10, "commutativity: bool_add, bool_mult (T)", fmt(worst));
  }
  // mono_add commutativity failure witness
  {
    const auto b = make_atomic(Domain::RealLine,
                               std::vector<Atom>{{1.0, 0.5}, {-1.0, 0.5}});
    const auto d1 = dirac(Domain::RealLine, 1.0);
    const auto lhs = mono_add(handle_of(d1), handle_of(b)).atoms();
    const auto rhs = mono_add(handle_of(b), handle_of(d1)).atoms();
    double gap = 0;
    for (std::size_t i = 0; i < 2; ++i)
      gap = std::max(gap,
                     std::abs(lhs.atoms()[i].position - rhs.atoms()[i].position));
    suite.check(gap > 1e-3, "witness: mono_add is not commutative", fmt(gap));
  }
  // alt monotone associativity failure witness
  {
    const auto m = make_atomic(Domain::PositiveHalfLine,
                               std::vector<Atom>{{0.0, 0.5}, {1.0, 0.5}});
    const auto d2 = handle_of(dirac(Domain::PositiveHalfLine, 2.0));
    const auto d3 = handle_of(dirac(Domain::PositiveHalfLine, 3.0));
    const auto left =
        mono_mult_alt(mono_mult_alt(d2, d3).handle(), handle_of(m)).atoms();
    const auto right =
        mono_mult_alt(d2, mono_mult_alt(d3, handle_of(m)).handle()).atoms();
    const double gap =
        std::abs(left.atoms()[1].position - right.atoms()[1].position);
    suite.check(gap > 1e-3, "witness: mono_mult_alt is not associative", fmt(gap));
  }
  // new boolean mult: associativity and commutativity failure witnesses
  {
    const auto m = make_atomic(Domain::PositiveHalfLine,
                               std::vector<Atom>{{0.0, 0.5}, {1.0, 0.5}});
    const auto d2 = handle_of(dirac(Domain::PositiveHalfLine, 2.0));
    const auto d3 = handle_of(dirac(Domain::PositiveHalfLine, 3.0));
    const auto left =
        bool_mult_new(bool_mult_new(handle_of(m), d3).handle(), d2).atoms();
    const auto right =
        bool_mult_new(handle_of(m), bool_mult_new(d3, d2).handle()).atoms();
    const double gap =
        std::abs(left.atoms()[1].position - right.atoms()[1].position);
    suite.check(gap > 1e-3, "witness: bool_mult_new is not associative", fmt(gap));

    const auto a = make_atomic(Domain::PositiveHalfLine,
                               std::vector<Atom>{{0.0, 0.5}, {2.0, 0.5}});
    const auto b = dirac(Domain::PositiveHalfLine, 3.0);
    const auto ab = bool_mult_new(handle_of(a), handle_of(b)).atoms();
    const auto ba = bool_mult_new(handle_of(b), handle_of(a)).atoms();
    double wgap = 0;
    for (std::size_t i = 0; i < ab.size(); ++i)
      wgap = std::max(wgap, std::abs(ab.atoms()[i].weight - ba.atoms()[i].weight));
    suite.check(wgap > 1e-3, "witness: bool_mult_new is not commutative", fmt(wgap));
  }
  return suite;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
  return {run_suite_diracs(seed), run_suite_oracles(seed),
          run_suite_associativity(seed)};
}

}  // namespace ncconv
