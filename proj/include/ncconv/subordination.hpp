#ifndef NCCONV_SUBORDINATION_HPP
#define NCCONV_SUBORDINATION_HPP

#include <cstdint>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ncconv/transforms.hpp"

namespace ncconv {

// Per-point result of a subordination solve. For the additive problem the
// residual is max(|F_mu(Z1) - F_nu(Z2)|, |F_mu(Z1) - (Z1 + Z2 - z)|); the
// multiplicative analogue replaces F by K and the sum by Z1*Z2/z.
struct SubordinationPair {
  Complex z;
  Complex Z1;
  Complex Z2;
  int iterations = 0;
  double residual = 0.0;
};

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 500;
};

// Concurrent memo of solved points, keyed by z quantized to 1e-15.
// Insert-or-read with last-write-wins; solver determinism makes racing
// writes identical.
class SubordinationCache {
 public:
  std::optional<SubordinationPair> find(Complex z) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = map_.find(key(z));
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void insert(Complex z, const SubordinationPair& pair) {
    std::lock_guard<std::mutex> lock(mutex_);
    map_[key(z)] = pair;
  }

 private:
  static std::uint64_t quantize(double v) {
    const double scaled = v * 1e15;
    if (std::abs(scaled) < 9.0e18)
      return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(scaled)));
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    __builtin_memcpy(&bits, &v, sizeof(bits));
    return bits;
  }
  static std::uint64_t key(Complex z) {
    const std::uint64_t a = quantize(z.real());
    const std::uint64_t b = quantize(z.imag());
    return a * 0x9E3779B97F4A7C15ULL ^ (b + 0x7F4A7C15ULL + (a << 6));
  }

  mutable std::mutex mutex_;
  mutable std::unordered_map<std::uint64_t, SubordinationPair> map_;
};

// Fixed point of w -> z + H_nu(z + H_mu(w)), H_rho(w) = F_rho(w) - w, started
// at w0 = z; 50% damping engages after 100 undamped iterations. Z1 is the
// fixed point and Z2 = z + H_mu(Z1).
SubordinationPair solve_additive_subordination(const TransformHandle& mu,
                                               const TransformHandle& nu,
                                               Complex z,
                                               const SolveOptions& opts = {});

// Fixed point of w -> z * h_nu(z * h_mu(w)) with h_rho(w) = K_rho(w) / w;
// Z1 is the fixed point and Z2 = z * h_mu(Z1). Circle handles solve on
// D \ {0} (|z| <= 0.95 unless max_iter is caller-supplied), half-line handles
// on C \ R+.
SubordinationPair solve_multiplicative_subordination(const TransformHandle& mu,
                                                     const TransformHandle& nu,
                                                     Complex z,
                                                     const SolveOptions& opts = {});

// The measures zeta1, zeta2 with reciprocal Cauchy transforms Z1, Z2, so that
// muds nu = mu |> zeta1 = nu |> zeta2 = zeta1 (u) zeta2.
std::pair<TransformHandle, TransformHandle> decompose_free(
    const TransformHandle& mu, const TransformHandle& nu,
    const SolveOptions& opts = {});

// Solves F_prefix(w) = F_total(z) for w in C+ by damped Newton from w0 = z.
Complex mono_deconvolve_left(const TransformHandle& prefix,
                             const TransformHandle& total, Complex z,
                             const SolveOptions& opts = {});

// Handle whose F is z -> mono_deconvolve_left(prefix, total, z).
TransformHandle mono_deconvolve_handle(const TransformHandle& prefix,
                                       const TransformHandle& total);

// Given marginals mu_{0 t_0}, ..., mu_{0 t_k} of a free convolution
// hemi-group, returns the monotone transfer handles zeta_{t_i t_j} for
// i <= j (zeta_{ii} = delta_0). Entry [i][j-i] of the result is zeta_{ij}.
std::vector<std::vector<TransformHandle>> hemigroup_transfer(
    std::span<const TransformHandle> marginals);

}  // namespace ncconv

#endif
