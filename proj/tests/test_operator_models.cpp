#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ncconv/convolution.hpp"
#include "ncconv/operator_model.hpp"
#include "ncconv/transforms.hpp"

using namespace ncconv;
using doctest::Approx;

namespace {

const Complex I(0.0, 1.0);

AtomicMeasure bernoulli() {
  return make_atomic(Domain::RealLine, std::vector<Atom>{{1.0, 0.5}, {-1.0, 0.5}});
}

AtomicMeasure dirac(Domain d, double x) {
  return make_atomic(d, std::vector<Atom>{{x, 1.0}});
}

void check_same_measure(const AtomicMeasure& a, const AtomicMeasure& b,
                        double tol = 1e-10) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a.atoms()[i].position - b.atoms()[i].position) < tol);
    CHECK(std::abs(a.atoms()[i].weight - b.atoms()[i].weight) < tol);
  }
}

}  // namespace

TEST_CASE("spectral_distribution basics") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  Vector e1 = Vector::Zero(2);
  e1[0] = 1.0;
  check_same_measure(spectral_distribution(a, e1, Domain::RealLine),
                     dirac(Domain::RealLine, 1.0));

  Vector mix(2);
  mix[0] = mix[1] = 1.0 / std::sqrt(2.0);
  const auto half = spectral_distribution(a, mix, Domain::RealLine);
  REQUIRE(half.size() == 2);
  CHECK(half.atoms()[0].weight == Approx(0.5).epsilon(1e-13));

  Matrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(spectral_distribution(bad, e1, Domain::RealLine), NonNormalError);
}

TEST_CASE("monotone model marginals and Dirac |> Bernoulli closed form") {
  SeededRng rng(default_seed());
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = random_atomic(rng, Domain::RealLine, 5);
    const auto nu = random_atomic(rng, Domain::RealLine, 5);
    const auto model = build_monotone_pair(mu, nu, false);
    check_same_measure(spectral_distribution(model.X, model.omega, Domain::RealLine), mu);
    check_same_measure(spectral_distribution(model.Y, model.omega, Domain::RealLine), nu);
  }

  // closed form for delta_x |> (p delta_1 + (1-p) delta_{-1})
  for (auto [x, p] : std::vector<std::pair<double, double>>{
           {1.0, 0.5}, {-2.0, 0.3}, {0.7, 0.9}}) {
    const auto mu = dirac(Domain::RealLine, x);
    const auto nu = make_atomic(Domain::RealLine,
                                std::vector<Atom>{{1.0, p}, {-1.0, 1 - p}});
    const auto model = build_monotone_pair(mu, nu, false);
    const auto dist =
        spectral_distribution(model.X + model.Y, model.omega, Domain::RealLine);
    const double disc = std::sqrt(x * x + 4 * (2 * p - 1) * x + 4);
    const double z1 = 0.5 * (x + disc);
    const double z2 = 0.5 * (x - disc);
    const double q = (x + 4 * p - 2 + disc) / (2 * disc);
    REQUIRE(dist.size() == 2);
    CHECK(dist.atoms()[0].position == Approx(z2).epsilon(1e-12));
    CHECK(dist.atoms()[1].position == Approx(z1).epsilon(1e-12));
    CHECK(dist.atoms()[1].weight == Approx(q).epsilon(1e-12));
  }

  // 1x1 models add point masses
  const auto one = build_monotone_pair(dirac(Domain::RealLine, 2.0),
                                       dirac(Domain::RealLine, 3.0), false);
  check_same_measure(spectral_distribution(one.X + one.Y, one.omega, Domain::RealLine),
                     dirac(Domain::RealLine, 5.0));

  // Bernoulli |> Bernoulli: golden-ratio spectrum, weights from the residues
  // of (z^3 - z)/(z^4 - 3 z^2 + 1)
  const auto model = build_monotone_pair(bernoulli(), bernoulli(), false);
  const auto dist =
      spectral_distribution(model.X + model.Y, model.omega, Domain::RealLine);
  REQUIRE(dist.size() == 4);
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<double> expected_pos{-phi, -1 / phi, 1 / phi, phi};
  for (std::size_t i = 0; i < 4; ++i) {
    const double r = expected_pos[i];
    CHECK(dist.atoms()[i].position == Approx(r).epsilon(1e-12));
    const double residue = (r * r * r - r) / (4 * r * r * r - 6 * r);
    CHECK(dist.atoms()[i].weight == Approx(residue).epsilon(1e-10));
  }
}

TEST_CASE("boolean model marginals and Bernoulli sum") {
  SeededRng rng(default_seed() ^ 0xB001);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = random_atomic(rng, Domain::RealLine, 5);
    const auto nu = random_atomic(rng, Domain::RealLine, 5);
    const auto model = build_boolean_pair(mu, nu, false);
    CHECK(model.dim() == static_cast<Eigen::Index>(mu.size() + nu.size() - 1));
    check_same_measure(spectral_distribution(model.X, model.omega, Domain::RealLine), mu);
    check_same_measure(spectral_distribution(model.Y, model.omega, Domain::RealLine), nu);
  }

  const auto model = build_boolean_pair(bernoulli(), bernoulli(), false);
  REQUIRE(model.dim() == 3);
  const auto dist =
      spectral_distribution(model.X + model.Y, model.omega, Domain::RealLine);
  const double r = std::sqrt(2.0);
  check_same_measure(dist, make_atomic(Domain::RealLine,
                                       std::vector<Atom>{{r, 0.5}, {-r, 0.5}}),
                     1e-12);
}

TEST_CASE("rank-one 2x2 fixtures for sqrt(Y) X sqrt(Y) and sqrt(X) Y sqrt(X)") {
  SeededRng rng(default_seed() ^ 0x22);
  for (int trial = 0; trial < 10; ++trial) {
    const double x = rng.uniform(0.2, 4.0);
    const double y = rng.uniform(0.2, 4.0);
    const double p = rng.uniform(0.05, 0.95);
    Matrix bx = Matrix::Zero(2, 2);
    bx(0, 0) = x;
    bx(1, 1) = 1.0;
    Matrix by(2, 2);
    by(0, 0) = y * p;
    by(0, 1) = by(1, 0) = y * std::sqrt(p * (1 - p));
    by(1, 1) = y * (1 - p);
    Vector omega = Vector::Zero(2);
    omega[0] = 1.0;

    const Matrix sy = matrix_sqrt_psd(by);
    const Matrix sx = matrix_sqrt_psd(bx);
    const double top = y * (x * p + 1 - p);

    // sqrt(Y) X sqrt(Y): weight p on the moved atom, 1-p at 0
    const auto yxy = spectral_distribution(sy * bx * sy, omega,
                                           Domain::PositiveHalfLine);
    REQUIRE(yxy.size() == 2);
    CHECK(yxy.atoms()[0].position == Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(yxy.atoms()[0].weight == Approx(1 - p).epsilon(1e-12));
    CHECK(yxy.atoms()[1].position == Approx(top).epsilon(1e-12));
    CHECK(yxy.atoms()[1].weight == Approx(p).epsilon(1e-12));

    // sqrt(X) Y sqrt(X): weights (1-p)/(xp+1-p) at 0, xp/(xp+1-p) at the top
    const auto xyx = spectral_distribution(sx * by * sx, omega,
                                           Domain::PositiveHalfLine);
    const double sigma = x * p + 1 - p;
    REQUIRE(xyx.size() == 2);
    CHECK(xyx.atoms()[0].weight == Approx((1 - p) / sigma).epsilon(1e-12));
    CHECK(xyx.atoms()[1].position == Approx(top).epsilon(1e-12));
    CHECK(xyx.atoms()[1].weight == Approx(x * p / sigma).epsilon(1e-12));
  }
}

TEST_CASE("matrix_sqrt_psd") {
  const Matrix id = Matrix::Identity(3, 3);
  CHECK((matrix_sqrt_psd(id) - id).norm() < 1e-14);

  Matrix d(2, 2);
  d << 4, 0, 0, 9;
  Matrix expected(2, 2);
  expected << 2, 0, 0, 3;
  CHECK((matrix_sqrt_psd(d) - expected).norm() < 1e-13);

  Matrix neg(2, 2);
  neg << -1, 0, 0, 1;
  CHECK_THROWS_AS(matrix_sqrt_psd(neg), NotPSDError);

  // sqrt(S_x) closed form M_{sqrt x} P2 + P2_perp
  SeededRng rng(default_seed() ^ 0x51);
  const auto mu = random_atomic(rng, Domain::PositiveHalfLine, 4);
  const auto nu = random_atomic(rng, Domain::PositiveHalfLine, 4);
  const auto model = build_monotone_pair(mu, nu, true);
  const Matrix p2 = monotone_projection(mu, nu);
  const Eigen::Index m = static_cast<Eigen::Index>(nu.size());
  Matrix closed = Matrix::Identity(model.dim(), model.dim()) - p2;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Eigen::Index off = static_cast<Eigen::Index>(i) * m;
    closed.block(off, off, m, m) +=
        std::sqrt(mu.atoms()[i].position) * p2.block(off, off, m, m);
  }
  CHECK((matrix_sqrt_psd(model.X) - closed).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("analytic resolvent fixtures") {
  // monotone add at z = 2i for Bernoulli pair: G_mu(F_nu(2i)) = G_mu(2.5i)
  const Complex z = 2.0 * I;
  const Complex got =
      analytic_resolvent(ResolventKind::MonotoneAdd, bernoulli(), bernoulli(), z);
  const Complex f_nu(0, 2.5);
  const Complex expected = f_nu / (f_nu * f_nu - 1.0);
  CHECK(std::abs(got - expected) < 1e-14);
  CHECK(std::abs(got - Complex(0, -10.0 / 29.0)) < 1e-14);

  // boolean add of two delta_0 is delta_0: resolvent 1/z
  const auto d0 = dirac(Domain::RealLine, 0.0);
  for (Complex w : seeded_upper_grid(10))
    CHECK(std::abs(analytic_resolvent(ResolventKind::BooleanAdd, d0, d0, w) -
                   1.0 / w) < 1e-14);

  // boolean mult with X = 1 collapses to G_nu
  const auto one = dirac(Domain::PositiveHalfLine, 1.0);
  SeededRng rng(default_seed());
  const auto nu = random_atomic(rng, Domain::PositiveHalfLine, 4);
  const auto h_nu = handle_of(nu);
  for (Complex w : seeded_upper_grid(20))
    CHECK(std::abs(analytic_resolvent(ResolventKind::BooleanMultNew, one, nu, w) -
                   h_nu.G(w)) < 1e-12);
}

TEST_CASE("resolvent triangle: matrix vs analytic vs transform-identity") {
  SeededRng rng(default_seed() ^ 0x7A1);
  const auto zs = seeded_upper_grid(50);
  struct Case {
    OpKind op;
    ResolventKind kind;
    Domain domain;
  };
  const std::vector<Case> cases{
      {OpKind::MonoAdd, ResolventKind::MonotoneAdd, Domain::RealLine},
      {OpKind::BoolAdd, ResolventKind::BooleanAdd, Domain::RealLine},
      {OpKind::MonoMultPos, ResolventKind::MonotoneMult, Domain::PositiveHalfLine},
      {OpKind::MonoMultAlt, ResolventKind::MonotoneMultAlt, Domain::PositiveHalfLine},
      {OpKind::BoolMultNew, ResolventKind::BooleanMultNew, Domain::PositiveHalfLine},
  };
  for (const auto& c : cases) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto mu = random_atomic(rng, c.domain, 5);
      const auto nu = random_atomic(rng, c.domain, 5);
      const auto dump = model_for(c.op, mu, nu);
      const auto lambda = convolve(c.op, Measure{mu}, Measure{nu});
      const auto h = lambda.handle();
      double worst = 0;
      for (Complex z : zs) {
        const Complex via_matrix = matrix_resolvent(dump.product, dump.model.omega, z);
        const Complex via_formula = analytic_resolvent(c.kind, mu, nu, z);
        const Complex via_transform = h.G(z);
        worst = std::max(worst, std::abs(via_matrix - via_formula));
        worst = std::max(worst, std::abs(via_formula - via_transform));
        worst = std::max(worst, std::abs(via_matrix - via_transform));
      }
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("verify_independence") {
  SeededRng rng(default_seed() ^ 0x1D);
  for (int trial = 0; trial < 5; ++trial) {
    const auto mu = random_atomic(rng, Domain::RealLine, 3);
    const auto nu = random_atomic(rng, Domain::RealLine, 3);
    const auto mono = build_monotone_pair(mu, nu, false);
    const auto rep_m = verify_independence(mono, 5);
    CHECK(rep_m.max_defect < 1e-10);
    const auto boolean = build_boolean_pair(mu, nu, false);
    const auto rep_b = verify_independence(boolean, 5);
    CHECK(rep_b.max_defect < 1e-10);
  }

  // a monotone pair is not boolean independent: a mixed word witnesses it
  bool found = false;
  SeededRng rng2(default_seed() ^ 0x2E);
  for (int trial = 0; trial < 20 && !found; ++trial) {
    const auto mu = random_atomic(rng2, Domain::RealLine, 2);
    const auto nu = random_atomic(rng2, Domain::RealLine, 2);
    if (mu.size() < 2 || nu.size() < 2) continue;
    const auto mono = build_monotone_pair(mu, nu, false);
    found = boolean_factorization_defect(mono, 5).max_defect > 1e-8;
  }
  CHECK(found);
}

TEST_CASE("circle shifted models are unitary") {
  SeededRng rng(default_seed() ^ 0xC1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mu = random_atomic(rng, Domain::UnitCircle, 4);
    const auto nu = random_atomic(rng, Domain::UnitCircle, 4);
    const auto mono = build_monotone_pair(mu, nu, true);
    const Eigen::Index d = mono.dim();
    CHECK((mono.X.adjoint() * mono.X - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <
          1e-12);
    const auto boolean = build_boolean_pair(mu, nu, true);
    const Eigen::Index db = boolean.dim();
    CHECK((boolean.X.adjoint() * boolean.X - Matrix::Identity(db, db))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((boolean.Y.adjoint() * boolean.Y - Matrix::Identity(db, db))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("Lenczewski decomposition") {
  SeededRng rng(default_seed() ^ 0x1E);
  // X0 + Z = X + Y exactly, and the vacuum distribution is unchanged
  for (int trial = 0; trial < 5; ++trial) {
    const auto mu = random_atomic(rng, Domain::RealLine, 2);
    const auto nu = random_atomic(rng, Domain::RealLine, 2);
    const auto model = build_monotone_pair(mu, nu, false);
    const auto [x0, z] = lenczewski_decompose(model.X, model.Y, model.omega);
    CHECK((x0 + z - (model.X + model.Y)).cwiseAbs().maxCoeff() < 1e-14);
    check_same_measure(
        spectral_distribution(model.X + model.Y, model.omega, Domain::RealLine),
        spectral_distribution(x0 + z, model.omega, Domain::RealLine), 1e-12);
  }

  // Y = 0: Z = X (1 - P_X)
  Matrix x(2, 2);
  x << 1, 0, 0, -1;
  Vector omega(2);
  omega[0] = 1.0;
  omega[1] = 0.0;
  const auto [x0, z] = lenczewski_decompose(x, Matrix::Zero(2, 2), omega);
  CHECK((x0 + z - x).cwiseAbs().maxCoeff() < 1e-14);
  // omega is an eigenvector here, so P_X = e1 e1^T and Z kills the vacuum
  CHECK(std::abs(z(0, 0)) == 0.0);

  // vacuum cyclic for X: P_X = I and Z = Y
  Vector cyc(2);
  cyc[0] = cyc[1] = 1.0 / std::sqrt(2.0);
  Matrix y(2, 2);
  y << 0.3, 0.1, 0.1, 0.2;
  const auto [x0c, zc] = lenczewski_decompose(x, y, cyc);
  CHECK((x0c - x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((zc - y).cwiseAbs().maxCoeff() < 1e-12);
}
