#pragma once
#include <cstdint>
#include <vector>

// Deterministic parallel reduction helpers.
//
// Contract: every parallel sum in this library is computed as fixed-size
// chunk partials (chunk boundaries depend only on the problem, never on the
// thread count) followed by an ordered compensated combine.  Results are
// therefore bit-identical for any OMP_NUM_THREADS.

namespace lmw {

struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// Sums f(i) for i in [0, n) deterministically.  f must be pure.
template <class F>
double chunked_sum(std::int64_t n, F&& f, std::int64_t chunk = 4096) {
  if (n <= 0) return 0.0;
  std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < nchunks; b++) {
    Kahan acc;
    std::int64_t lo = b * chunk, hi = lo + chunk < n ? lo + chunk : n;
    for (std::int64_t i = lo; i < hi; i++) acc.add(f(i));
    partial[b] = acc.value();
  }
  Kahan total;
  for (std::int64_t b = 0; b < nchunks; b++) total.add(partial[b]);
  return total.value();
}

}  // namespace lmw
