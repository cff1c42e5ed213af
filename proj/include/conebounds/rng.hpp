#pragma once

#include <cmath>
#include <cstdint>

#include "conebounds/common.hpp"

namespace conebounds {

// Counter-style keyed random stream (SplitMix64 core, Box-Muller normals).
//
// Every random draw in the library comes from a stream keyed by up to four
// 64-bit values, typically (base_seed, m, trial, stream_tag). Streams are
// independent of execution order, so parallel sweeps reproduce the exact
// bytes of a serial run. We do not use <random> distributions because their
// output is implementation-defined; this generator is pinned.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                     std::uint64_t k3 = 0) {
    std::uint64_t h = 0x243f6a8885a308d3ull;  // pi fraction, arbitrary nonzero
    h = combine(h, seed);
    h = combine(h, k1);
    h = combine(h, k2);
    h = combine(h, k3);
    state_ = h;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform on (0, 1].
  double next_unit() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the sine partner is cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Vector gaussian_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = next_gaussian();
    return v;
  }

  // Row-major fill; the traversal order is part of the reproducibility contract.
  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = scale * next_gaussian();
    return a;
  }

  // Uniform integer in [0, bound) by rejection-free scaling (bound << 2^64).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(next_unit() * static_cast<double>(bound)) % bound;
  }

  static std::uint64_t mix(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  static std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
    return mix(h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream tags keep draws for different purposes decorrelated under one seed.
namespace stream_tag {
inline constexpr std::uint64_t signal = 1;
inline constexpr std::uint64_t sensing = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t width = 4;
inline constexpr std::uint64_t restart = 5;
inline constexpr std::uint64_t trial_matrix = 6;
inline constexpr std::uint64_t tau = 7;
inline constexpr std::uint64_t power_iter = 8;
}  // namespace stream_tag

}  // namespace conebounds
