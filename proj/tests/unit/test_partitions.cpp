#include <doctest.h>

#include <random>
#include <set>

#include "maxstab/partitions.hpp"

using namespace maxstab;

TEST_CASE("bell numbers match the Bell triangle") {
  // independent oracle: B(n+1) = sum_j C(n, j) B(j)
  std::vector<std::uint64_t> b{1};
  for (int n = 0; n < 20; ++n) {
    std::uint64_t next = 0, binom = 1;
    for (int j = 0; j <= n; ++j) {
      next += binom * b[static_cast<std::size_t>(j)];
      binom = binom * static_cast<std::uint64_t>(n - j) / static_cast<std::uint64_t>(j + 1);
    }
    b.push_back(next);
  }
  for (int k = 1; k <= 20; ++k) CHECK(bell_number(k) == b[static_cast<std::size_t>(k)]);
  CHECK(bell_number(3) == 5);
  CHECK(bell_number(10) == 115975);
  CHECK_THROWS_AS(bell_number(21), Error);
}

TEST_CASE("enumeration") {
  const auto two = enumerate_partitions(2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].blocks() == std::vector<SubsetIndicator>{0b11});
  CHECK(two[1].blocks() == std::vector<SubsetIndicator>{0b01, 0b10});
  CHECK(enumerate_partitions(3).size() == 5);
  for (int k = 1; k <= 7; ++k) {
    const auto all = enumerate_partitions(k);
    CHECK(all.size() == bell_number(k));
    std::set<std::vector<int>> seen;
    for (const auto& p : all) {
      seen.insert(p.rgs());
      SubsetIndicator cover = 0;
      for (auto blk : p.blocks()) {
        CHECK((cover & blk) == 0);
        cover |= blk;
      }
      CHECK(cover == full_set(k));
    }
    CHECK(seen.size() == all.size());
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].rgs() < all[i].rgs());
  }
  CHECK_THROWS_AS(enumerate_partitions(13), Error);
  CHECK_THROWS_AS(Partition({0, 2}), Error);
}

TEST_CASE("partition sums") {
  std::vector<double> v(4, 0.0);
  v[0b11] = 2.0;
  v[0b01] = 3.0;
  v[0b10] = 5.0;
  CHECK(sum_partition_products(v, 2) == doctest::Approx(2.0 + 15.0));
  std::vector<double> ones(32, 1.0);
  CHECK(sum_partition_products(ones, 5) == 52.0);

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int k = 1 + rep % 6;
    std::vector<double> vals(std::size_t{1} << k);
    for (auto& x : vals) x = unif(gen);
    const double dp = sum_partition_products(vals, k);
    const double naive = sum_partition_products_naive(vals, k);
    CHECK(std::abs(dp - naive) <= 1e-12 * std::abs(naive));
    std::vector<double> logs(vals.size());
    for (std::size_t i = 1; i < vals.size(); ++i) logs[i] = std::log(vals[i]);
    CHECK(std::exp(log_sum_partition_products(logs, k)) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("partition sum properties") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  for (int k = 1; k <= 6; ++k) {
    std::vector<double> vals(std::size_t{1} << k);
    for (auto& x : vals) x = unif(gen);
    std::vector<double> singles = vals;
    double prod = 1.0;
    for (SubsetIndicator s = 1; s < singles.size(); ++s) {
      if (subset_size(s) > 1) singles[s] = 0.0;
      else prod *= singles[s];
    }
    CHECK(sum_partition_products(singles, k) == doctest::Approx(prod).epsilon(1e-14));
    const double base = sum_partition_products(vals, k);
    for (SubsetIndicator s = 1; s < vals.size(); ++s) {
      auto bumped = vals;
      bumped[s] += 0.5;
      CHECK(sum_partition_products(bumped, k) >= base);
    }
  }
  std::vector<double> bad(4, 1.0);
  bad[3] = NAN;
  CHECK_THROWS_AS(sum_partition_products(bad, 2), Error);
  CHECK_THROWS_AS(sum_partition_products(std::vector<double>(3, 1.0), 2), Error);
}
