#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ncconv/transforms.hpp"
#include "oracles.hpp"

using namespace ncconv;
using doctest::Approx;

namespace {

const Complex I(0.0, 1.0);

Measure bernoulli() {
  return make_atomic(Domain::RealLine, std::vector<Atom>{{1.0, 0.5}, {-1.0, 0.5}});
}

double cabs(Complex a, Complex b) { return std::abs(a - b); }

}  // namespace

TEST_CASE("Cauchy transform closed forms") {
  const Measure d0{make_atomic(Domain::RealLine, std::vector<Atom>{{0.0, 1.0}})};
  CHECK(cabs(eval_G(d0, I), -I) < 1e-15);

  CHECK(cabs(eval_G(bernoulli(), 2.0 * I), Complex(0, -0.4)) < 1e-15);

  const Measure dx{make_atomic(Domain::RealLine, std::vector<Atom>{{1.7, 1.0}})};
  const Complex z(0.3, 0.9);
  CHECK(cabs(eval_G(dx, z), 1.0 / (z - 1.7)) < 1e-15);

  CHECK_THROWS_AS(eval_G(dx, Complex(1.7, 0.0)), PoleError);
}

TEST_CASE("F, psi, K, W closed forms") {
  // F of the Bernoulli law is z - 1/z
  CHECK(cabs(eval_F(bernoulli(), 2.0 * I), Complex(0, 2.5)) < 1e-14);

  // K of delta_1 on R+ is the identity, the monotone unit
  const Measure d1{make_atomic(Domain::PositiveHalfLine, std::vector<Atom>{{1.0, 1.0}})};
  for (Complex z : seeded_upper_grid(10))
    CHECK(cabs(eval_K(d1, z), z) < 1e-12);

  const Measure d4{make_atomic(Domain::PositiveHalfLine, std::vector<Atom>{{4.0, 1.0}})};
  const Complex z(0.5, 1.5);
  CHECK(cabs(eval_W(d4, z), 2.0 / (z - 4.0)) < 1e-15);

  CHECK_THROWS_AS(eval_W(bernoulli(), z), DomainError);
  CHECK_THROWS_AS(eval_psi(bernoulli(), z), DomainError);
}

TEST_CASE("transform identities at seeded points") {
  SeededRng rng(default_seed());
  const auto mu = random_atomic(rng, Domain::RealLine, 6);
  const auto h = handle_of(mu);
  for (int i = 0; i < 1000; ++i) {
    const Complex z(rng.uniform(-5, 5), rng.uniform(1e-2, 3.0));
    const Complex g = h.G(z);
    const Complex f = h.F(z);
    CHECK(std::abs(f * g - 1.0) < 1e-12);
    CHECK(f.imag() >= z.imag() - 1e-12);
    CHECK(cabs(h.G(std::conj(z)), std::conj(g)) < 1e-14);
  }
}

TEST_CASE("K maps the disk into the disk for circle measures") {
  SeededRng rng(default_seed());
  for (int trial = 0; trial < 10; ++trial) {
    const auto mu = random_atomic(rng, Domain::UnitCircle, 4);
    const auto h = handle_of(mu);
    CHECK(std::abs(h.K(Complex(0, 0))) < 1e-12);
    for (Complex z : seeded_disk_grid(100)) {
      CHECK(std::abs(h.K(z)) < 1.0 + 1e-12);
    }
  }
}

TEST_CASE("class F check passes for atomic real measures") {
  SeededRng rng(default_seed());
  for (int trial = 0; trial < 5; ++trial) {
    const auto mu = random_atomic(rng, Domain::RealLine, 5);
    const auto report = class_check(handle_of(mu), FunctionClass::F, 200);
    CHECK(report.passed);
    CHECK(report.witnesses.empty());
  }
}

TEST_CASE("class S: identity map passes") {
  const auto h = k_rule_handle(Domain::UnitCircle, [](Complex z) { return z; });
  const auto report = class_check(h, FunctionClass::S, 100);
  CHECK(report.passed);
}

TEST_CASE("class P: atomic half-line measures pass") {
  SeededRng rng(default_seed());
  for (int trial = 0; trial < 5; ++trial) {
    const auto mu = random_atomic(rng, Domain::PositiveHalfLine, 4);
    const auto report = class_check(handle_of(mu), FunctionClass::P, 200);
    CHECK(report.passed);
  }
}

TEST_CASE("class P: iterated Bercovici K-product fails for some n <= 32") {
  // K(z) = K_mu(z)^n / z^{n-1} for mu = (delta_1 + delta_2)/2
  const Measure mu{make_atomic(Domain::PositiveHalfLine,
                               std::vector<Atom>{{1.0, 0.5}, {2.0, 0.5}})};
  const auto base = handle_of(mu);
  bool failed = false;
  int n_fail = 0;
  for (int n = 2; n <= 32 && !failed; ++n) {
    auto k = k_rule_handle(Domain::PositiveHalfLine, [&base, n](Complex z) {
      return std::pow(base.K(z) / z, n) * z;
    });
    const auto report = class_check(k, FunctionClass::P, 400);
    if (!report.passed) {
      failed = true;
      n_fail = n;
      CHECK(!report.witnesses.empty());
    }
  }
  CHECK(failed);
  CHECK(n_fail <= 32);
  MESSAGE("first class-P failure at n = ", n_fail);
}

TEST_CASE("Stieltjes inversion: single pole") {
  const auto h = cauchy_handle(Domain::RealLine, [](Complex z) { return 1.0 / z; });
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-2.0 + i * 0.01);
  InversionDiagnostics diag;
  const auto out = stieltjes_invert(h, grid, {}, &diag);
  REQUIRE(out.atom_part().size() == 1);
  CHECK(std::abs(out.atom_part()[0].position) < 1e-6);
  CHECK(out.atom_part()[0].weight == Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(diag.raw_mass - 1.0) < 1e-4);
}

TEST_CASE("Stieltjes inversion: two poles of z/(z^2-2)") {
  const auto h = cauchy_handle(Domain::RealLine,
                               [](Complex z) { return z / (z * z - 2.0); });
  std::vector<double> grid;
  for (int i = 0; i <= 600; ++i) grid.push_back(-3.0 + i * 0.01);
  const auto out = stieltjes_invert(h, grid);
  REQUIRE(out.atom_part().size() == 2);
  const double r = std::sqrt(2.0);
  CHECK(out.atom_part()[0].position == Approx(-r).epsilon(1e-9));
  CHECK(out.atom_part()[1].position == Approx(r).epsilon(1e-9));
  CHECK(out.atom_part()[0].weight == Approx(0.5).epsilon(1e-6));
  CHECK(out.atom_part()[1].weight == Approx(0.5).epsilon(1e-6));
}

TEST_CASE("Stieltjes inversion: semicircle density") {
  const auto h = semicircle_handle(0.0, 1.0);
  std::vector<double> grid;
  for (int i = 0; i <= 500; ++i) grid.push_back(-2.5 + i * 0.01);
  const auto out = stieltjes_invert(h, grid);
  CHECK(out.atom_part().empty());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    if (std::abs(std::abs(x) - 2.0) < 0.05) continue;  // branch points
    const double expected =
        std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * M_PI) : 0.0;
    CHECK(out.density()[i] == Approx(expected).epsilon(0).scale(1).epsilon(1e-4));
  }
}

TEST_CASE("inversion roundtrip recovers random atomic measures") {
  SeededRng rng(default_seed());
  for (int trial = 0; trial < 5; ++trial) {
    const auto mu = random_atomic(rng, Domain::RealLine, 6, 0.05, 0.2, 5.0);
    const auto h = handle_of(mu);
    std::vector<double> grid;
    for (int i = 0; i <= 2200; ++i) grid.push_back(-5.5 + i * 0.005);
    const auto out = stieltjes_invert(h, grid);
    REQUIRE(out.atom_part().size() == mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) {
      CHECK(std::abs(out.atom_part()[k].position - mu.atoms()[k].position) < 1e-6);
      CHECK(std::abs(out.atom_part()[k].weight - mu.atoms()[k].weight) < 1e-6);
    }
  }
}

TEST_CASE("inversion flags undecidable handles") {
  // G with a slowly-varying lie near the axis: eps-dependence that does not
  // extrapolate, exercising the ConvergenceError path
  const auto h = cauchy_handle(Domain::RealLine, [](Complex z) {
    return 1.0 / std::sqrt(std::abs(z.imag())) * Complex(0, -1);
  });
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(-1.0 + i * 0.02);
  CHECK_THROWS_AS(stieltjes_invert(h, grid), ConvergenceError);
}

TEST_CASE("contour moments match closed forms") {
  // semicircle(0,1) even moments are the Catalan numbers 1, 2, 5
  const auto h = semicircle_handle(0.0, 1.0);
  const auto m = transform_moments(h, 6, 4.0);
  CHECK(m[0].real() == Approx(0.0).scale(1).epsilon(1e-10));
  CHECK(m[1].real() == Approx(1.0).epsilon(1e-10));
  CHECK(m[3].real() == Approx(2.0).epsilon(1e-10));
  CHECK(m[5].real() == Approx(5.0).epsilon(1e-10));

  // circle: moments of a rotation Dirac
  const Measure rot{make_atomic(Domain::UnitCircle,
                                std::vector<Atom>{{M_PI / 3, 1.0}})};
  const auto mc = transform_moments(handle_of(rot), 3, 0.5);
  CHECK(cabs(mc[2], Complex(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("free cumulant oracle sanity") {
  // Bernoulli: kappa = (0, 1, 0, -1, 0, 2)
  const std::vector<double> m{0, 1, 0, 1, 0, 1};
  const auto kappa = ncconv::oracle::free_cumulants_from_moments(m);
  CHECK(kappa[1] == Approx(1.0));
  CHECK(kappa[3] == Approx(-1.0));
  const auto back = ncconv::oracle::moments_from_free_cumulants(kappa);
  for (int i = 0; i < 6; ++i) CHECK(back[i] == Approx(m[i]).scale(1));
}
