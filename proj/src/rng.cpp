#include "ncconv/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace ncconv {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("NCCONV_SEED")) {
    return std::stoull(std::string(env), nullptr, 0);
  }
  return 0xC0FFEEULL;
}

std::vector<std::complex<double>> seeded_upper_grid(std::size_t count) {
  std::vector<std::complex<double>> pts;
  pts.reserve(count);
  const double n = count > 1 ? static_cast<double>(count - 1) : 1.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double re = -3.0 + 6.0 * static_cast<double>(k) / n;
    const double im = 0.5 + static_cast<double>(k % 3);
    pts.emplace_back(re, im);
  }
  return pts;
}

std::vector<std::complex<double>> seeded_disk_grid(std::size_t count) {
  std::vector<std::complex<double>> pts;
  pts.reserve(count);
  const double golden = 0.6180339887498949;
  const double n = count > 1 ? static_cast<double>(count - 1) : 1.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double r = 0.1 + 0.75 * static_cast<double>(k) / n;
    const double frac = std::fmod(static_cast<double>(k + 1) * golden, 1.0);
    const double theta = 2.0 * M_PI * frac;
    pts.push_back(std::polar(r, theta));
  }
  return pts;
}

std::vector<std::complex<double>> seeded_slit_grid(std::size_t count) {
  std::vector<std::complex<double>> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    switch (k % 3) {
      case 0: {  // upper half-plane
        const double re = -2.0 + 6.0 * static_cast<double>(k) / std::max<std::size_t>(count, 1);
        pts.emplace_back(re, 0.4 + static_cast<double>(k % 5) * 0.5);
        break;
      }
      case 1: {  // conjugates, exercising the reflection K(conj z) = conj K(z)
        const double re = -1.5 + 5.0 * static_cast<double>(k) / std::max<std::size_t>(count, 1);
        pts.emplace_back(re, -(0.3 + static_cast<double>(k % 4) * 0.6));
        break;
      }
      default: {  // negative reals approaching 0
        const double t = -std::pow(10.0, -3.0 + 0.25 * static_cast<double>(k % 16));
        pts.emplace_back(t, 0.0);
        break;
      }
    }
  }
  return pts;
}

}  // namespace ncconv
