#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "maxstab/error.hpp"

namespace maxstab {

/// Nonempty subset of {0..k-1} encoded as a bit mask (bit i <=> index i).
using SubsetIndicator = std::uint32_t;

inline int subset_size(SubsetIndicator s) noexcept { return std::popcount(s); }
inline SubsetIndicator full_set(int k) noexcept { return (SubsetIndicator{1} << k) - 1; }
inline bool contains(SubsetIndicator s, int i) noexcept { return (s >> i) & 1U; }

inline constexpr int kMaxPartitionDim = 20;
inline constexpr int kMaxEnumerationDim = 12;

std::uint64_t bell_number(int k);

/// A set partition stored as a restricted-growth string.
class Partition {
 public:
  explicit Partition(std::vector<int> rgs);

  const std::vector<int>& rgs() const noexcept { return rgs_; }
  /// Blocks ordered by their minimal element.
  const std::vector<SubsetIndicator>& blocks() const noexcept { return blocks_; }
  int size() const noexcept { return static_cast<int>(rgs_.size()); }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> rgs_;
  std::vector<SubsetIndicator> blocks_;
};

/// Lexicographic walk over restricted-growth strings of length k.
class PartitionEnumerator {
 public:
  explicit PartitionEnumerator(int k);

  /// Writes the next partition and returns true, or returns false when exhausted.
  bool next(Partition& out);

 private:
  int k_;
  bool started_ = false;
  bool done_ = false;
  std::vector<int> rgs_;
  std::vector<int> prefix_max_;
};

std::vector<Partition> enumerate_partitions(int k);

namespace detail {
void check_block_values(std::span<const double> block_value, int k);
}

/// Sum over all set partitions tau of {0..k-1} of prod_j block_value[tau_j].
///
/// `block_value` is indexed by SubsetIndicator and has length 2^k (entry 0 is
/// ignored). Evaluated by the subset recurrence
///   A(T) = sum_{S : min(T) in S, S subset T} block_value(S) A(T \ S),  A(0) = 1,
/// over T in increasing popcount order, O(3^k) work.
///
/// The template form lets callers propagate dual numbers through the recurrence.
template <class Scalar, class Values>
Scalar sum_partition_products_generic(const Values& block_value, int k) {
  const SubsetIndicator full = full_set(k);
  std::vector<Scalar> table(static_cast<std::size_t>(full) + 1, Scalar(0.0));
  table[0] = Scalar(1.0);
  for (int pop = 1; pop <= k; ++pop) {
    for (SubsetIndicator t = 1; t <= full; ++t) {
      if (std::popcount(t) != pop) continue;
      const SubsetIndicator low = t & (~t + 1);
      const SubsetIndicator rest = t ^ low;
      Scalar acc(0.0);
      // descending walk over the submasks of `rest`, including the empty one
      SubsetIndicator sub = rest;
      while (true) {
        const SubsetIndicator s = sub | low;
        acc += block_value[s] * table[t ^ s];
        if (sub == 0) break;
        sub = (sub - 1) & rest;
      }
      table[t] = acc;
    }
  }
  return table[full];
}

double sum_partition_products(std::span<const double> block_value, int k);

/// Same sum evaluated from log block values (entries may be -inf for zeros).
double log_sum_partition_products(std::span<const double> log_block_value, int k);

/// Reference evaluation by walking every partition; used as a test oracle.
double sum_partition_products_naive(std::span<const double> block_value, int k);

}  // namespace maxstab
