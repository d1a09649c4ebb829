#pragma once
#include <cstdint>
#include <functional>
#include <mutex>
#include <utility>
#include <vector>

// Batched Kloosterman evaluation across a sweep of moduli.
//
// For a fixed list of pairs (m_i, n_i) and every c = q*j <= c_max, computes
//   result[i] = sum_c S(m_i, n_i; c) * w(i, c)
// without touching individual units of c.  S factors by twisted
// multiplicativity into prime-power components
//   S(m,n;c) = prod_{r = p^a || c} S(m*b, n*b; r),  b = inv(c/r) mod r,
// and each component is either a closed form (Ramanujan sums, p-scaling,
// vanishing for non-unit arguments) or S(1, t; r) with t a unit, which is
// one entry of the length-r DFT of y -> e(inv(y)/r) supported on units.
// One DFT per needed modulus serves the whole sweep.
//
// The weight w must be pure.  Accumulation is deterministic: fixed j-chunks,
// compensated partials, ordered combine (thread-count independent).

namespace lmw::arith {

using u64 = std::uint64_t;
using i64 = std::int64_t;

std::vector<double> kloosterman_weighted_sweep(
    u64 q, u64 c_max, const std::vector<std::pair<i64, i64>>& pairs,
    const std::function<double(std::size_t, u64)>& w);

// Sequential reference: direct unit-loop summation per modulus.  O(sum c);
// only usable at small c_max.  Kept for cross-testing the engine.
std::vector<double> kloosterman_weighted_sweep_serial(
    u64 q, u64 c_max, const std::vector<std::pair<i64, i64>>& pairs,
    const std::function<double(std::size_t, u64)>& w);

// S(1, t; c) for every residue t mod c, one length-c DFT.  c < 2^31.
std::vector<double> kloosterman_unit_row(u64 c);

// FFTW's planner is process-global and not thread safe; hold this lock
// around every plan creation or destruction, in any translation unit.
std::mutex& fftw_planner_mutex();

}  // namespace lmw::arith
