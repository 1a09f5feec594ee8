#include "ncconv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ncconv {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  // fmod can return exactly 2*pi after the correction when theta is a tiny
  // negative number
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

void check_position(Domain domain, double x) {
  if (!std::isfinite(x)) throw DomainError("atom position is not finite");
  if (domain == Domain::PositiveHalfLine && x < 0)
    throw DomainError("atom position " + std::to_string(x) +
                      " is negative on the positive half-line");
}

// Sorts, merges positions within kAtomMergeTol (weights added, positions
// weight-averaged) and handles the 0/2pi seam on the circle.
std::vector<Atom> merge_atoms(Domain domain, std::vector<Atom> atoms) {
  for (auto& a : atoms) {
    if (domain == Domain::UnitCircle) a.position = wrap_angle(a.position);
    check_position(domain, a.position);
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && a.position - merged.back().position <= kAtomMergeTol) {
      Atom& m = merged.back();
      const double w = m.weight + a.weight;
      m.position = (m.position * m.weight + a.position * a.weight) / w;
      m.weight = w;
    } else {
      merged.push_back(a);
    }
  }
  if (domain == Domain::UnitCircle && merged.size() > 1) {
    const Atom& first = merged.front();
    const Atom& last = merged.back();
    if (first.position + kTwoPi - last.position <= kAtomMergeTol) {
      const double w = first.weight + last.weight;
      merged.front().position =
          wrap_angle((first.position * first.weight +
                      (last.position - kTwoPi) * last.weight) / w);
      merged.front().weight = w;
      merged.pop_back();
    }
  }
  return merged;
}

}  // namespace

const char* domain_name(Domain d) {
  switch (d) {
    case Domain::RealLine: return "real";
    case Domain::PositiveHalfLine: return "positive";
    case Domain::UnitCircle: return "circle";
  }
  return "?";
}

Complex AtomicMeasure::point(std::size_t i) const {
  const double p = atoms_[i].position;
  if (domain_ == Domain::UnitCircle) return std::polar(1.0, p);
  return Complex(p, 0.0);
}

AtomicMeasure make_atomic(Domain domain, std::span<const Atom> atoms) {
  if (atoms.empty()) throw PreconditionError("measure needs at least one atom");
  for (const auto& a : atoms)
    if (!(a.weight > 0)) throw WeightSumError("atom weights must be positive");
  double sum = 0;
  for (const auto& a : atoms) sum += a.weight;
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw WeightSumError("atom weights sum to " + std::to_string(sum) +
                         ", not 1 within 1e-9");
  return make_atomic_rescaled(domain, {atoms.begin(), atoms.end()});
}

AtomicMeasure make_atomic_rescaled(Domain domain, std::vector<Atom> atoms) {
  if (atoms.empty()) throw PreconditionError("measure needs at least one atom");
  std::vector<Atom> merged = merge_atoms(domain, std::move(atoms));
  double sum = 0;
  for (const auto& a : merged) sum += a.weight;
  if (!(sum > 0)) throw WeightSumError("total weight must be positive");
  for (auto& a : merged) a.weight /= sum;
  AtomicMeasure mu;
  mu.domain_ = domain;
  mu.atoms_ = std::move(merged);
  return mu;
}

DensityMeasure::DensityMeasure(Domain domain, std::vector<double> grid,
                               std::vector<double> density,
                               std::vector<Atom> atom_part)
    : domain_(domain),
      grid_(std::move(grid)),
      density_(std::move(density)),
      atom_part_(std::move(atom_part)) {
  if (grid_.size() != density_.size() || grid_.size() < 2)
    throw PreconditionError("density grid and values must match, length >= 2");
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
    if (!(grid_[i] < grid_[i + 1]))
      throw PreconditionError("density grid must be strictly increasing");
  for (double& v : density_) {
    if (v < -1e-12) throw PreconditionError("density must be nonnegative");
    if (v < 0) v = 0;
  }
  for (const auto& a : atom_part_) {
    check_position(domain_, a.position);
    if (!(a.weight > 0)) throw WeightSumError("atom weights must be positive");
  }
  const double mass = density_mass() + atom_mass();
  if (std::abs(mass - 1.0) > 1e-6)
    throw WeightSumError("total mass " + std::to_string(mass) +
                         " differs from 1 by more than 1e-6");
}

double DensityMeasure::density_mass() const {
  double m = 0;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
    m += 0.5 * (density_[i] + density_[i + 1]) * (grid_[i + 1] - grid_[i]);
  return m;
}

double DensityMeasure::atom_mass() const {
  double m = 0;
  for (const auto& a : atom_part_) m += a.weight;
  return m;
}

Domain domain_of(const Measure& mu) {
  return std::visit([](const auto& m) { return m.domain(); }, mu);
}

AtomicMeasure push_map(const AtomicMeasure& mu, const PushMap& map) {
  std::vector<Atom> atoms = mu.atoms();
  if (std::holds_alternative<Translate>(map)) {
    if (mu.domain() != Domain::RealLine)
      throw DomainError("translation is only defined on the real line");
    const double x = std::get<Translate>(map).offset;
    for (auto& a : atoms) a.position += x;
  } else if (std::holds_alternative<Dilate>(map)) {
    if (mu.domain() != Domain::PositiveHalfLine)
      throw DomainError("dilation is only defined on the positive half-line");
    const double alpha = std::get<Dilate>(map).factor;
    if (alpha < 0) throw DomainError("dilation factor must be >= 0");
    for (auto& a : atoms) a.position *= alpha;
  } else {
    if (mu.domain() != Domain::UnitCircle)
      throw DomainError("rotation is only defined on the unit circle");
    const double theta = std::get<Rotate>(map).angle;
    for (auto& a : atoms) a.position += theta;
  }
  return make_atomic_rescaled(mu.domain(), std::move(atoms));
}

Measure mixture(std::span<const double> weights, std::span<const Measure> measures) {
  if (weights.size() != measures.size() || measures.empty())
    throw PreconditionError("mixture needs matching weights and measures");
  double sum = 0;
  for (double w : weights) {
    if (w < 0) throw PreconditionError("mixture weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw WeightSumError("mixture weights sum to " + std::to_string(sum));
  const Domain dom = domain_of(measures[0]);
  for (const auto& m : measures)
    if (domain_of(m) != dom) throw DomainError("mixture components on different domains");

  const bool all_atomic = std::all_of(
      measures.begin(), measures.end(),
      [](const Measure& m) { return std::holds_alternative<AtomicMeasure>(m); });
  if (all_atomic) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < measures.size(); ++i) {
      if (weights[i] == 0) continue;
      for (const auto& a : std::get<AtomicMeasure>(measures[i]).atoms())
        atoms.push_back({a.position, a.weight * weights[i]});
    }
    return make_atomic_rescaled(dom, std::move(atoms));
  }

  // Density components must share one grid; atomic components fold into the
  // atom part.
  const std::vector<double>* grid = nullptr;
  for (const auto& m : measures)
    if (const auto* d = std::get_if<DensityMeasure>(&m)) {
      if (grid && *grid != d->grid())
        throw DomainError("mixture of densities on different grids");
      grid = &d->grid();
    }
  std::vector<double> density(grid->size(), 0.0);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    if (weights[i] == 0) continue;
    if (const auto* a = std::get_if<AtomicMeasure>(&measures[i])) {
      for (const auto& atom : a->atoms())
        atoms.push_back({atom.position, atom.weight * weights[i]});
    } else {
      const auto& d = std::get<DensityMeasure>(measures[i]);
      for (std::size_t k = 0; k < density.size(); ++k)
        density[k] += weights[i] * d.density()[k];
      for (const auto& atom : d.atom_part())
        atoms.push_back({atom.position, atom.weight * weights[i]});
    }
  }
  return DensityMeasure(dom, *grid, std::move(density), std::move(atoms));
}

namespace {

Complex atom_moment(Domain dom, double position, int k) {
  if (dom == Domain::UnitCircle)
    return std::polar(1.0, k * position);
  return Complex(std::pow(position, k), 0.0);
}

}  // namespace

std::vector<Complex> moments(const Measure& mu, int n) {
  if (n < 1) throw PreconditionError("moment order must be >= 1");
  std::vector<Complex> out(static_cast<std::size_t>(n), Complex(0, 0));
  const Domain dom = domain_of(mu);
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    for (int k = 1; k <= n; ++k)
      for (const auto& atom : a->atoms())
        out[k - 1] += atom.weight * atom_moment(dom, atom.position, k);
    return out;
  }
  const auto& d = std::get<DensityMeasure>(mu);
  const auto& grid = d.grid();
  const auto& rho = d.density();
  for (int k = 1; k <= n; ++k) {
    Complex acc(0, 0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const Complex fa = atom_moment(dom, grid[i], k) * rho[i];
      const Complex fb = atom_moment(dom, grid[i + 1], k) * rho[i + 1];
      acc += 0.5 * (fa + fb) * (grid[i + 1] - grid[i]);
    }
    for (const auto& atom : d.atom_part())
      acc += atom.weight * atom_moment(dom, atom.position, k);
    out[k - 1] = acc;
  }
  return out;
}

DensityMeasure haar_circle(int points) {
  if (points < 3) throw PreconditionError("haar grid needs >= 3 points");
  std::vector<double> grid(points), density(points, 1.0 / kTwoPi);
  for (int i = 0; i < points; ++i)
    grid[i] = kTwoPi * static_cast<double>(i) / (points - 1);
  return DensityMeasure(Domain::UnitCircle, std::move(grid), std::move(density));
}

AtomicMeasure random_atomic(SeededRng& rng, Domain domain, int max_atoms,
                            double min_weight, double min_separation,
                            double span) {
  const int n = rng.uniform_int(1, max_atoms);
  std::vector<Atom> atoms;
  int guard = 0;
  while (static_cast<int>(atoms.size()) < n && guard++ < 10000) {
    double pos;
    switch (domain) {
      case Domain::RealLine: pos = rng.uniform(-span, span); break;
      case Domain::PositiveHalfLine: pos = rng.uniform(0.0, span); break;
      default: pos = rng.uniform(0.0, kTwoPi); break;
    }
    bool ok = true;
    for (const auto& a : atoms) {
      double gap = std::abs(a.position - pos);
      if (domain == Domain::UnitCircle) gap = std::min(gap, kTwoPi - gap);
      if (gap < min_separation) { ok = false; break; }
    }
    if (ok) atoms.push_back({pos, 0.0});
  }
  const double nw = static_cast<double>(atoms.size()) * min_weight;
  if (nw >= 1.0)
    throw PreconditionError("min_weight infeasible for the atom count");
  double sum = 0;
  std::vector<double> u(atoms.size());
  for (auto& v : u) {
    v = 0.01 + rng.uniform();
    sum += v;
  }
  for (std::size_t i = 0; i < atoms.size(); ++i)
    atoms[i].weight = min_weight + u[i] / sum * (1.0 - nw);
  return make_atomic_rescaled(domain, std::move(atoms));
}

}  // namespace ncconv
