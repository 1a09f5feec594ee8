#ifndef NCCONV_MEASURE_HPP
#define NCCONV_MEASURE_HPP

#include <complex>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ncconv/errors.hpp"
#include "ncconv/rng.hpp"

namespace ncconv {

using Complex = std::complex<double>;

enum class Domain { RealLine, PositiveHalfLine, UnitCircle };

const char* domain_name(Domain d);

// Atoms of a UnitCircle measure store the angle theta in [0, 2*pi),
// representing the point e^{i theta}; on the real domains the position is the
// point itself.
struct Atom {
  double position;
  double weight;
};

// Positions closer than this are considered the same atom.
inline constexpr double kAtomMergeTol = 1e-12;
// Input weights must sum to 1 within this tolerance before exact rescaling.
inline constexpr double kWeightSumTol = 1e-9;

class AtomicMeasure {
 public:
  Domain domain() const { return domain_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // Position as a point of the ambient complex plane (e^{i theta} on the
  // circle).
  Complex point(std::size_t i) const;

  bool is_dirac() const { return atoms_.size() == 1; }

 private:
  friend AtomicMeasure make_atomic_rescaled(Domain, std::vector<Atom>);
  AtomicMeasure() = default;

  Domain domain_ = Domain::RealLine;
  std::vector<Atom> atoms_;  // sorted ascending by position
};

// Grid density with an optional atomic part; produced by Stieltjes inversion.
// Atom weights here are sub-probability shares: trapezoid integral of the
// density plus the atom weights must be 1 within 1e-6.
class DensityMeasure {
 public:
  DensityMeasure(Domain domain, std::vector<double> grid,
                 std::vector<double> density, std::vector<Atom> atom_part = {});

  Domain domain() const { return domain_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& density() const { return density_; }
  const std::vector<Atom>& atom_part() const { return atom_part_; }

  double density_mass() const;  // trapezoid integral of the density part
  double atom_mass() const;

 private:
  Domain domain_;
  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<Atom> atom_part_;
};

using Measure = std::variant<AtomicMeasure, DensityMeasure>;

Domain domain_of(const Measure& mu);

struct Translate {
  double offset;
};
struct Dilate {
  double factor;  // >= 0
};
struct Rotate {
  double angle;
};
using PushMap = std::variant<Translate, Dilate, Rotate>;

// Validates positions against the domain, coalesces atoms within
// kAtomMergeTol and rescales weights to sum to exactly 1 (inputs must
// already sum to 1 within kWeightSumTol).
AtomicMeasure make_atomic(Domain domain, std::span<const Atom> atoms);

// Same, but accepts any positive total weight and rescales. Used internally
// where exact weight arithmetic produces sums that are deliberately != 1.
AtomicMeasure make_atomic_rescaled(Domain domain, std::vector<Atom> atoms);

// Image measure under translation (RealLine), dilation (PositiveHalfLine)
// or rotation (UnitCircle). Weights are unchanged.
AtomicMeasure push_map(const AtomicMeasure& mu, const PushMap& map);

// Convex combination. Atomic if all inputs are atomic; density inputs must
// share one grid.
Measure mixture(std::span<const double> weights, std::span<const Measure> measures);

// First n moments: integral of x^k (real domains) or e^{i k theta} (circle),
// k = 1..n. Exact sums for atomic measures, trapezoid quadrature otherwise.
std::vector<Complex> moments(const Measure& mu, int n);

// Haar (uniform) measure on the unit circle as a periodic grid density;
// the angle grid covers [0, 2*pi] with both endpoints so plain trapezoid
// quadrature is the periodic rule.
DensityMeasure haar_circle(int points = 257);

// Seeded random atomic measure for sampled checks: `max_atoms` atoms at
// pairwise separation >= min_separation, weights >= min_weight.
// RealLine positions lie in [-span, span], PositiveHalfLine in [0, span],
// UnitCircle angles in [0, 2*pi).
AtomicMeasure random_atomic(SeededRng& rng, Domain domain, int max_atoms,
                            double min_weight = 0.05,
                            double min_separation = 0.2, double span = 3.0);

}  // namespace ncconv

#endif
