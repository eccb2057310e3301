#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace maxstab {

/// Counter-based random stream (Philox4x32-10).
///
/// The 64-bit master seed is the key; the stream index occupies the upper half
/// of the 128-bit counter, so streams with distinct indices walk disjoint
/// counter ranges. Same (seed, index) reproduces the sequence bit for bit.
/// Satisfies UniformRandomBitGenerator.
///
/// Variates are generated by the member functions below rather than the
/// <random> distributions, whose algorithms are implementation-defined.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return stream_; }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double standard_normal();
  double exponential();
  /// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the U^(1/shape) boost.
  double gamma(double shape);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;  // 32-bit words consumed from block_
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace maxstab
