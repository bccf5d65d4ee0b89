#pragma once

// Counter-based generator: draw k of stream `seed` is a pure function of
// (seed, k), computed with 64-bit integer mixing only.

#include <cstdint>

#include "krein/numerics.hpp"

namespace krein {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Circular complex Gaussian with E|z|^2 = 1.
  cplx complex_normal();

  CMatrix ginibre(Eigen::Index rows, Eigen::Index cols);
  /// Haar-distributed unitary via QR of a Ginibre matrix with phase fix.
  CMatrix haar_unitary(Eigen::Index n);
  CVector unit_vector(Eigen::Index n);

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace krein
