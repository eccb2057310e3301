#include "maxstab/partitions.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace maxstab {

std::uint64_t bell_number(int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "bell_number needs k >= 1");
  require(k <= kMaxPartitionDim, ErrorCode::DimensionTooLarge, "bell_number supports k <= 20");
  // Bell triangle: each row starts with the last entry of the previous row.
  std::vector<std::uint64_t> row{1};
  for (int n = 1; n < k; ++n) {
    std::vector<std::uint64_t> next{row.back()};
    next.reserve(row.size() + 1);
    for (std::uint64_t x : row) {
      const std::uint64_t prev = next.back();
      if (prev > std::numeric_limits<std::uint64_t>::max() - x)
        fail(ErrorCode::Overflow, "Bell number overflows 64 bits");
      next.push_back(prev + x);
    }
    row = std::move(next);
  }
  return row.back();
}

Partition::Partition(std::vector<int> rgs) : rgs_(std::move(rgs)) {
  require(!rgs_.empty(), ErrorCode::InvalidArgument, "partition of an empty set");
  require(static_cast<int>(rgs_.size()) <= kMaxPartitionDim, ErrorCode::DimensionTooLarge,
          "partitions support k <= 20");
  int max_label = -1;
  for (int label : rgs_) {
    require(label >= 0 && label <= max_label + 1, ErrorCode::InvalidArgument,
            "not a restricted-growth string");
    max_label = std::max(max_label, label);
  }
  blocks_.assign(static_cast<std::size_t>(max_label) + 1, 0);
  for (std::size_t i = 0; i < rgs_.size(); ++i)
    blocks_[static_cast<std::size_t>(rgs_[i])] |= SubsetIndicator{1} << i;
}

PartitionEnumerator::PartitionEnumerator(int k) : k_(k) {
  require(k >= 1, ErrorCode::InvalidArgument, "enumerate_partitions needs k >= 1");
  require(k <= kMaxEnumerationDim, ErrorCode::DimensionTooLarge,
          "naive partition enumeration supports k <= 12");
  rgs_.assign(static_cast<std::size_t>(k), 0);
  prefix_max_.assign(static_cast<std::size_t>(k), 0);
}

bool PartitionEnumerator::next(Partition& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    out = Partition(rgs_);
    return true;
  }
  // rightmost position that can still grow; prefix_max_[i] = max(rgs[0..i-1])
  int i = k_ - 1;
  while (i > 0 && rgs_[i] > prefix_max_[i]) --i;
  if (i == 0) {
    done_ = true;
    return false;
  }
  ++rgs_[i];
  for (int j = i + 1; j < k_; ++j) {
    rgs_[j] = 0;
    prefix_max_[j] = std::max(prefix_max_[j - 1], rgs_[j - 1]);
  }
  out = Partition(rgs_);
  return true;
}

std::vector<Partition> enumerate_partitions(int k) {
  PartitionEnumerator walker(k);
  std::vector<Partition> out;
  Partition p(std::vector<int>(static_cast<std::size_t>(k), 0));
  while (walker.next(p)) out.push_back(p);
  return out;
}

namespace detail {

void check_block_values(std::span<const double> block_value, int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "partition sum needs k >= 1");
  require(k <= kMaxPartitionDim, ErrorCode::DimensionTooLarge, "partition sum supports k <= 20");
  require(block_value.size() == (std::size_t{1} << k), ErrorCode::MissingBlockValue,
          "block values must cover all 2^k - 1 nonempty subsets");
}

}  // namespace detail

double sum_partition_products(std::span<const double> block_value, int k) {
  detail::check_block_values(block_value, k);
  for (std::size_t s = 1; s < block_value.size(); ++s)
    require(std::isfinite(block_value[s]), ErrorCode::NonFiniteBlockValue,
            "block value for subset " + std::to_string(s) + " is not finite");
  return sum_partition_products_generic<double>(block_value, k);
}

double log_sum_partition_products(std::span<const double> log_block_value, int k) {
  detail::check_block_values(log_block_value, k);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s < log_block_value.size(); ++s)
    require(!std::isnan(log_block_value[s]) && log_block_value[s] != std::numeric_limits<double>::infinity(),
            ErrorCode::NonFiniteBlockValue, "log block value is NaN or +inf");

  const SubsetIndicator full = full_set(k);
  std::vector<double> table(static_cast<std::size_t>(full) + 1, kNegInf);
  table[0] = 0.0;
  std::vector<double> terms;
  for (int pop = 1; pop <= k; ++pop) {
    for (SubsetIndicator t = 1; t <= full; ++t) {
      if (std::popcount(t) != pop) continue;
      const SubsetIndicator low = t & (~t + 1);
      const SubsetIndicator rest = t ^ low;
      terms.clear();
      double peak = kNegInf;
      SubsetIndicator sub = rest;
      while (true) {
        const SubsetIndicator s = sub | low;
        const double term = log_block_value[s] + table[t ^ s];
        terms.push_back(term);
        peak = std::max(peak, term);
        if (sub == 0) break;
        sub = (sub - 1) & rest;
      }
      if (peak == kNegInf) {
        table[t] = kNegInf;
        continue;
      }
      double acc = 0.0;
      for (double term : terms) acc += std::exp(term - peak);
      table[t] = peak + std::log(acc);
    }
  }
  return table[full];
}

double sum_partition_products_naive(std::span<const double> block_value, int k) {
  detail::check_block_values(block_value, k);
  PartitionEnumerator walker(k);
  Partition p(std::vector<int>(static_cast<std::size_t>(k), 0));
  double total = 0.0;
  while (walker.next(p)) {
    double prod = 1.0;
    for (SubsetIndicator b : p.blocks()) prod *= block_value[b];
    total += prod;
  }
  return total;
}

}  // namespace maxstab
