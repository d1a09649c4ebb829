// Timing comparison: OpenMP kernels against their serial references.
//   bench_kernels [c_max]
// Prints one row per kernel: name, serial seconds, parallel seconds, speedup,
// and the max abs difference between the two results.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lmw/arith.hpp"
#include "lmw/kloosterman_engine.hpp"

using namespace lmw::arith;

namespace {

double now() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void report(const char* name, double ts, double tp, double diff) {
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   maxdiff %.3e\n",
              name, ts, tp, ts / tp, diff);
}

}  // namespace

int main(int argc, char** argv) {
  u64 c_max = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 60000;
  std::printf("threads: %d, c_max: %llu\n", omp_get_max_threads(),
              static_cast<unsigned long long>(c_max));

  {
    // single large Kloosterman sum, direct summation
    u64 c = c_max | 1;
    double t0 = now();
    double vs = kloosterman_serial(3, 7, c);
    double t1 = now();
    double vp = kloosterman(3, 7, c);
    double t2 = now();
    report("kloosterman(3,7;c)", t1 - t0, t2 - t1, std::fabs(vs - vp));
  }

  {
    // full sweep c = 11j <= c_max over a pair grid, engine vs direct loops
    std::vector<std::pair<i64, i64>> pairs;
    for (i64 m = 1; m <= 6; m++)
      for (i64 n = m; n <= 6; n++) pairs.push_back({m, n});
    auto w = [](std::size_t, u64 c) { return 1.0 / static_cast<double>(c); };
    double t0 = now();
    auto vs = kloosterman_weighted_sweep_serial(11, c_max, pairs, w);
    double t1 = now();
    auto vp = kloosterman_weighted_sweep(11, c_max, pairs, w);
    double t2 = now();
    double diff = 0;
    for (std::size_t i = 0; i < pairs.size(); i++)
      diff = std::max(diff, std::fabs(vs[i] - vp[i]));
    report("weighted_sweep 21 pairs", t1 - t0, t2 - t1, diff);
  }

  return 0;
}
