#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "lmw/special.hpp"

// Trilinear Kloosterman forms
//
//   sum_{(c,r)=1} sum_m sum_n a_m b_n g(m,n,c) S(d m rbar, +-n; sc),
//
// evaluated exactly against their power-law majorant, plus an empirical
// ratio harness over random instances.  The evaluation opens every
// Kloosterman sum: at a fixed modulus L = sc the (m,n) double sum factors
// through two zero-padded DFTs, leaving one pass over the units x of L
// with A(d rbar x) B(+-xbar).  Cost per modulus is O(L log L) instead of
// O(#m #n phi(L)).

namespace lmw::sieve {

using u64 = std::uint64_t;
using cplx = std::complex<double>;

// Number of integers in the dyadic block (X, 2X].
u64 block_length(double X);

// One evaluation instance: pairwise coprime r, s, d with r and s
// squarefree, sequences living on the dyadic blocks (M,2M] and (N,2N]
// (index 0 is the first integer above the block edge), and the compactly
// supported C2 weight g on scales (M, N, C).
struct SieveInstance {
  u64 r = 1, s = 1, d = 1;
  double M = 1.0, N = 1.0, C = 1.0;
  std::vector<cplx> a, b;
  special::SieveTestFunction g;
  int sign = +1;
};

// Instance with g filled in and zeroed sequences of the right lengths.
SieveInstance make_instance(u64 r, u64 s, u64 d, double M, double N, double C,
                            int sign = +1);

// X_d = sqrt(d M N) / (s C sqrt(r)).
double dyadic_ratio(const SieveInstance& inst);

// Exact evaluation over the support of g.  Rejects instances whose
// (r, s, d) are not pairwise coprime with r, s squarefree, or whose
// sequences do not fill their blocks.
cplx trilinear_sum(const SieveInstance& inst);

// The majorant
//   d^theta s C sqrt(r) (1 + 1/X)^{2 theta} / (1 + X)
//     * (1 + X + sqrt(M/rs)) (1 + X + sqrt(N/rs)) ||a||_2 ||b||_2
// at X = dyadic_ratio, with the epsilon factor and the implied constant
// set to one; the harness measures the constant instead of assuming it.
double ls_bound_rhs(const SieveInstance& inst, double theta);

struct TrialRow {
  u64 r = 1, s = 1, d = 1;
  int sign = +1;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
};

struct RatioStats {
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  std::vector<TrialRow> trials;
};

struct ExperimentOptions {
  bool complex_phases = false;  // unit-circle entries instead of +-1
  u64 r_range = 6, s_range = 6, d_range = 9;  // rejection-sampling windows
};

// trials independent instances at M = N = C = size, Rademacher (or
// unit-phase) sequences, rejection-sampled admissible (r, s, d), ratio
// |trilinear| / majorant at theta = 7/64.  Every random draw comes from
// one mt19937_64 stream consumed up front in a fixed order, so the full
// statistics depend on nothing but the seed.  The weight g is probed by
// finite differences against its derivative bounds before any trial runs.
RatioStats ratio_experiment(u64 trials, double size, u64 seed,
                            const ExperimentOptions& opt = {});

std::string ratio_csv(const RatioStats& st);

}  // namespace lmw::sieve
