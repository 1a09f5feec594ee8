#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ncconv/measure.hpp"

using namespace ncconv;

namespace {

AtomicMeasure bernoulli() {
  return make_atomic(Domain::RealLine,
                     std::vector<Atom>{{1.0, 0.5}, {-1.0, 0.5}});
}

}  // namespace

TEST_CASE("make_atomic basics") {
  const auto d0 = make_atomic(Domain::RealLine, std::vector<Atom>{{0.0, 1.0}});
  CHECK(d0.is_dirac());
  CHECK(d0.atoms()[0].position == 0.0);

  const auto b = bernoulli();
  CHECK(b.size() == 2);
  CHECK(b.atoms()[0].position == -1.0);  // sorted ascending
  CHECK(b.atoms()[1].position == 1.0);

  CHECK_THROWS_AS(
      make_atomic(Domain::PositiveHalfLine, std::vector<Atom>{{-1.0, 1.0}}),
      DomainError);
  CHECK_THROWS_AS(
      make_atomic(Domain::RealLine, std::vector<Atom>{{0.0, 0.5}, {1.0, 0.4}}),
      WeightSumError);
  CHECK_THROWS_AS(make_atomic(Domain::RealLine, std::vector<Atom>{{0.0, -0.2},
                                                                  {1.0, 1.2}}),
                  WeightSumError);
}

TEST_CASE("atoms within merge tolerance coalesce") {
  const auto mu = make_atomic(
      Domain::RealLine,
      std::vector<Atom>{{1.0, 0.25}, {1.0 + 1e-13, 0.25}, {2.0, 0.5}});
  CHECK(mu.size() == 2);
  CHECK(mu.atoms()[0].weight == doctest::Approx(0.5).epsilon(1e-14));
  double total = 0;
  for (const auto& a : mu.atoms()) total += a.weight;
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("circle angles wrap and merge across the seam") {
  const auto mu = make_atomic(
      Domain::UnitCircle,
      std::vector<Atom>{{2 * M_PI - 1e-13, 0.5}, {0.0, 0.5}});
  CHECK(mu.size() == 1);
  const auto nu =
      make_atomic(Domain::UnitCircle, std::vector<Atom>{{-M_PI / 2, 1.0}});
  CHECK(nu.atoms()[0].position == doctest::Approx(1.5 * M_PI));
}

TEST_CASE("push_map moves atoms, weights unchanged") {
  const auto d0 = make_atomic(Domain::RealLine, std::vector<Atom>{{0.0, 1.0}});
  const auto d3 = push_map(d0, Translate{3.0});
  CHECK(d3.atoms()[0].position == 3.0);

  const auto mu = make_atomic(Domain::PositiveHalfLine,
                              std::vector<Atom>{{1.0, 0.5}, {2.0, 0.5}});
  const auto scaled = push_map(mu, Dilate{2.0});
  CHECK(scaled.atoms()[0].position == 2.0);
  CHECK(scaled.atoms()[1].position == 4.0);

  const auto omega = make_atomic(Domain::UnitCircle, std::vector<Atom>{{0.0, 1.0}});
  const auto rotated = push_map(omega, Rotate{M_PI});
  CHECK(rotated.atoms()[0].position == doctest::Approx(M_PI));

  CHECK_THROWS_AS(push_map(mu, Translate{1.0}), DomainError);
  CHECK_THROWS_AS(push_map(d0, Dilate{1.0}), DomainError);

  // bijection on atoms: translate there and back is exact
  const auto b = bernoulli();
  const auto back = push_map(push_map(b, Translate{0.7}), Translate{-0.7});
  REQUIRE(back.size() == b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(back.atoms()[i].position == b.atoms()[i].position);
    CHECK(back.atoms()[i].weight == b.atoms()[i].weight);
  }
}

TEST_CASE("mixture arithmetic") {
  const Measure d1{make_atomic(Domain::RealLine, std::vector<Atom>{{1.0, 1.0}})};
  const Measure dm1{make_atomic(Domain::RealLine, std::vector<Atom>{{-1.0, 1.0}})};
  const double w[] = {0.5, 0.5};
  const Measure mixed = mixture(w, std::vector<Measure>{d1, dm1});
  const auto& atoms = std::get<AtomicMeasure>(mixed).atoms();
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0].weight == 0.5);

  // identity
  const double one[] = {1.0};
  const Measure same = mixture(one, std::vector<Measure>{d1});
  CHECK(std::get<AtomicMeasure>(same).atoms()[0].position == 1.0);

  // 0.3 delta_0 + 0.7 (1/2 delta_1 + 1/2 delta_2)
  const Measure d0{make_atomic(Domain::RealLine, std::vector<Atom>{{0.0, 1.0}})};
  const Measure half{make_atomic(Domain::RealLine,
                                 std::vector<Atom>{{1.0, 0.5}, {2.0, 0.5}})};
  const double w2[] = {0.3, 0.7};
  const Measure blended = mixture(w2, std::vector<Measure>{d0, half});
  const auto& out = std::get<AtomicMeasure>(blended).atoms();
  REQUIRE(out.size() == 3);
  CHECK(out[0].weight == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(out[1].weight == doctest::Approx(0.35).epsilon(1e-13));
  CHECK(out[2].weight == doctest::Approx(0.35).epsilon(1e-13));

  const Measure circ{make_atomic(Domain::UnitCircle, std::vector<Atom>{{0.0, 1.0}})};
  CHECK_THROWS_AS(mixture(w, std::vector<Measure>{d1, circ}), DomainError);
}

TEST_CASE("mixture is commutative and associative on atoms") {
  SeededRng rng(default_seed());
  for (int trial = 0; trial < 20; ++trial) {
    const Measure a{random_atomic(rng, Domain::RealLine, 3)};
    const Measure b{random_atomic(rng, Domain::RealLine, 3)};
    const Measure c{random_atomic(rng, Domain::RealLine, 3)};
    const double w1 = 0.2 + 0.6 * rng.uniform();
    const double wab[] = {w1, 1.0 - w1};
    const double wba[] = {1.0 - w1, w1};
    const auto ab = std::get<AtomicMeasure>(mixture(wab, std::vector<Measure>{a, b}));
    const auto ba = std::get<AtomicMeasure>(mixture(wba, std::vector<Measure>{b, a}));
    REQUIRE(ab.size() == ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
      CHECK(ab.atoms()[i].position == doctest::Approx(ba.atoms()[i].position).epsilon(1e-14));
      CHECK(ab.atoms()[i].weight == doctest::Approx(ba.atoms()[i].weight).epsilon(1e-12));
    }
    // ((a,b),c) with reweighting equals (a,(b,c))
    const double wq[] = {0.5, 0.3, 0.2};
    const auto flat = std::get<AtomicMeasure>(
        mixture(wq, std::vector<Measure>{a, b, c}));
    const double w_ab[] = {0.5 / 0.8, 0.3 / 0.8};
    const auto inner = mixture(w_ab, std::vector<Measure>{a, b});
    const double w_outer[] = {0.8, 0.2};
    const auto nested = std::get<AtomicMeasure>(
        mixture(w_outer, std::vector<Measure>{inner, c}));
    REQUIRE(flat.size() == nested.size());
    for (std::size_t i = 0; i < flat.size(); ++i)
      CHECK(flat.atoms()[i].weight ==
            doctest::Approx(nested.atoms()[i].weight).epsilon(1e-12));
  }
}

TEST_CASE("moments") {
  const Measure b{bernoulli()};
  const auto mb = moments(b, 4);
  CHECK(mb[0].real() == doctest::Approx(0.0));
  CHECK(mb[1].real() == doctest::Approx(1.0));
  CHECK(mb[2].real() == doctest::Approx(0.0));
  CHECK(mb[3].real() == doctest::Approx(1.0));

  const Measure d2{make_atomic(Domain::RealLine, std::vector<Atom>{{2.0, 1.0}})};
  const auto md = moments(d2, 3);
  CHECK(md[0].real() == 2.0);
  CHECK(md[1].real() == 4.0);
  CHECK(md[2].real() == 8.0);

  const double r = std::sqrt(2.0);
  const Measure s{make_atomic(Domain::RealLine,
                              std::vector<Atom>{{r, 0.5}, {-r, 0.5}})};
  const auto ms = moments(s, 2);
  CHECK(ms[0].real() == doctest::Approx(0.0));
  CHECK(ms[1].real() == doctest::Approx(2.0));

  // circle moments are integrals of e^{ik theta}
  const Measure rot{make_atomic(Domain::UnitCircle,
                                std::vector<Atom>{{M_PI / 3, 1.0}})};
  const auto mc = moments(rot, 3);
  CHECK(mc[2].real() == doctest::Approx(-1.0));  // e^{i pi} = -1
  CHECK_THROWS_AS(moments(b, 0), PreconditionError);
}

TEST_CASE("density measure invariants") {
  std::vector<double> grid{0.0, 0.5, 1.0};
  std::vector<double> rho{1.0, 1.0, 1.0};
  const DensityMeasure d(Domain::RealLine, grid, rho);
  CHECK(d.density_mass() == doctest::Approx(1.0));

  CHECK_THROWS_AS(DensityMeasure(Domain::RealLine, grid, {1.0, -0.5, 1.0}),
                  PreconditionError);
  CHECK_THROWS_AS(DensityMeasure(Domain::RealLine, grid, {2.0, 2.0, 2.0}),
                  WeightSumError);
  CHECK_THROWS_AS(DensityMeasure(Domain::RealLine, {0.0, 0.0, 1.0}, rho),
                  PreconditionError);

  // half density, half atom
  const DensityMeasure mixed(Domain::RealLine, grid, {0.5, 0.5, 0.5},
                             {{2.0, 0.5}});
  CHECK(mixed.atom_mass() == doctest::Approx(0.5));
  const auto m = moments(Measure{mixed}, 1);
  CHECK(m[0].real() == doctest::Approx(0.5 * 0.5 + 0.5 * 2.0));
}

TEST_CASE("random_atomic respects constraints") {
  SeededRng rng(1234);
  for (int i = 0; i < 50; ++i) {
    const auto mu = random_atomic(rng, Domain::PositiveHalfLine, 5, 0.05, 0.2, 4.0);
    CHECK(mu.size() >= 1);
    CHECK(mu.size() <= 5);
    double total = 0;
    for (const auto& a : mu.atoms()) {
      CHECK(a.position >= 0.0);
      CHECK(a.weight >= 0.049);
      total += a.weight;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    for (std::size_t k = 1; k < mu.size(); ++k)
      CHECK(mu.atoms()[k].position - mu.atoms()[k - 1].position >= 0.19);
  }
}
