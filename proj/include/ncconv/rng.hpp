#ifndef NCCONV_RNG_HPP
#define NCCONV_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace ncconv {

// Deterministic RNG used by sampled checks and the verify suites.
// mt19937_64 has a fully specified sequence, and doubles are derived from
// raw 64-bit draws so results do not depend on the standard library's
// distribution implementations.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

// Default sampling seed; the NCCONV_SEED environment variable overrides it.
std::uint64_t default_seed();

// Fixed evaluation grid in the upper half-plane,
//   z_k = (-3 + 6k/(n-1)) + i(0.5 + (k mod 3)),
// used wherever the contracts call for "seeded points" in C+.
std::vector<std::complex<double>> seeded_upper_grid(std::size_t count);

// Fixed evaluation grid in the unit disk, radii in [0.1, 0.85] and
// golden-angle arguments; avoids 0 and the boundary.
std::vector<std::complex<double>> seeded_disk_grid(std::size_t count);

// Fixed grid in C \ R+ for half-line transforms: upper half-plane points
// together with their conjugates and a few negative reals.
std::vector<std::complex<double>> seeded_slit_grid(std::size_t count);

}  // namespace ncconv

#endif
