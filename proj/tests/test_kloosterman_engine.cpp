#include "lmw/kloosterman_engine.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "lmw/arith.hpp"

using namespace lmw::arith;

TEST_CASE("unit row equals direct S(1,t;c)") {
  for (u64 c : {1ull, 2ull, 3ull, 4ull, 5ull, 6ull, 8ull, 9ull, 12ull, 49ull,
                97ull, 121ull, 720ull}) {
    auto row = kloosterman_unit_row(c);
    REQUIRE(row.size() == c);
    for (u64 t = 0; t < c; t++)
      CHECK(std::fabs(row[t] - kloosterman(1, static_cast<i64>(t), c)) <= 1e-9);
  }
}

TEST_CASE("unit row on a larger modulus, sampled entries") {
  const u64 c = 30030;  // 2*3*5*7*11*13
  auto row = kloosterman_unit_row(c);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 12; i++) {
    u64 t = rng() % c;
    CHECK(std::fabs(row[t] - kloosterman(1, static_cast<i64>(t), c)) <= 1e-7);
  }
}

TEST_CASE("weighted sweep equals serial reference") {
  std::vector<std::pair<i64, i64>> pairs = {
      {1, 1}, {1, 2}, {2, 4}, {-3, 5}, {0, 7}, {6, 6},
      {4, 9}, {12, 18}, {8, 8}, {5, -20}, {0, 0}, {16, 27}};
  auto w = [](std::size_t i, u64 c) {
    return 1.0 / static_cast<double>(c) + 1e-3 * static_cast<double>(i);
  };
  for (u64 q : {1ull, 11ull, 12ull}) {
    auto fast = kloosterman_weighted_sweep(q, 2500, pairs, w);
    auto slow = kloosterman_weighted_sweep_serial(q, 2500, pairs, w);
    REQUIRE(fast.size() == pairs.size());
    for (std::size_t i = 0; i < pairs.size(); i++)
      CHECK(std::fabs(fast[i] - slow[i]) <= 1e-8);
  }
}

TEST_CASE("weighted sweep is deterministic") {
  std::vector<std::pair<i64, i64>> pairs = {{1, 1}, {2, 3}, {5, 7}};
  auto w = [](std::size_t, u64 c) { return std::cos(0.1 * c) / c; };
  auto a = kloosterman_weighted_sweep(7, 50000, pairs, w);
  auto b = kloosterman_weighted_sweep(7, 50000, pairs, w);
  for (std::size_t i = 0; i < pairs.size(); i++) CHECK(a[i] == b[i]);
}

TEST_CASE("prime-power component closed forms") {
  // S(p,p;p^2) = p * S(1,1;p)
  for (u64 p : {3ull, 5ull, 7ull}) {
    double lhs = kloosterman(static_cast<i64>(p), static_cast<i64>(p), p * p);
    double rhs = static_cast<double>(p) * kloosterman(1, 1, p);
    CHECK(std::fabs(lhs - rhs) <= 1e-9);
  }
  // S(0,n;c) is a Ramanujan sum; engine path must agree with direct sum
  std::vector<std::pair<i64, i64>> pairs = {{0, 1}, {0, 4}, {0, 36}};
  auto w = [](std::size_t, u64) { return 1.0; };
  auto fast = kloosterman_weighted_sweep(6, 600, pairs, w);
  auto slow = kloosterman_weighted_sweep_serial(6, 600, pairs, w);
  for (std::size_t i = 0; i < pairs.size(); i++)
    CHECK(std::fabs(fast[i] - slow[i]) <= 1e-9);
}

TEST_CASE("sweep input validation") {
  std::vector<std::pair<i64, i64>> pairs = {{1, 1}};
  auto w = [](std::size_t, u64) { return 1.0; };
  CHECK_THROWS(kloosterman_weighted_sweep(0, 100, pairs, w));
  CHECK(kloosterman_weighted_sweep(200, 100, pairs, w)[0] == 0.0);  // empty range
  CHECK_THROWS(kloosterman_unit_row(0));
}
