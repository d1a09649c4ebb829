#pragma once
#include <cstddef>
#include <utility>
#include <vector>

#include "lmw/arith.hpp"
#include "lmw/modsym.hpp"
#include "lmw/special.hpp"

// The trace-formula side: the Petersson delta
//
//   Delta_q(m,n) = delta_{m=n} - 2 pi sum_{c = 0 mod q} S(m,n;c)/c
//                                          * J1(4 pi sqrt(mn) / c),
//
// recovery of the harmonic weights omega_f from it, and the cutoff
// Kloosterman double sums with their large-c tail diagnostics.
//
// Truncation policy: every c-sum carries an explicit Weil-bound tail
// majorant.  For
//   tail(X) = sum_{c > X, q | c} tau(c) sqrt(gcd c) / c * 4 pi sqrt(mn)/c,
// the per-modulus bound |S(m,n;c)| <= tau(c) sqrt(gcd(m,n,c) c) and
// |J1(x)| <= x/2 give, with J = X/q,
//   tail(X) <= 4 pi^2 sqrt(mn gcd(m,n)) * 2 q^{-3/2} (3 ln J + 9) / sqrt(J).
// The majorant is honest but slack: at desk levels (q ~ 10..100) driving it
// below 1e-6 needs c_max ~ 1e16, so tolerance-driven truncation throws
// under any affordable cap.  Empirical runs instead fix c_max explicitly
// and report the majorant as tail_estimate; observed convergence is far
// faster than the majorant because the Kloosterman signs cancel.

namespace lmw::tracesums {

using arith::u64;

struct PeterssonDelta {
  u64 level = 0;
  u64 m = 0, n = 0;
  double value = 0.0;
  u64 c_max = 0;          // largest modulus included
  double tail_estimate = 0.0;  // Weil majorant for the discarded c > c_max
};

struct DeltaOptions {
  u64 hard_cap = 4'000'000;  // tolerance-driven c_max beyond this throws
  u64 c_max_override = 0;    // nonzero: use exactly this cap, skip the cert
};

// Tolerance-driven: picks the smallest c_max whose tail majorant is <= tol,
// throwing std::runtime_error when that exceeds the hard cap.  With
// c_max_override set, sums to the override and reports the majorant there.
PeterssonDelta petersson_delta(u64 q, u64 m, u64 n, double tol,
                               const DeltaOptions& opt = {});

// One engine sweep serving many (m,n) pairs at a shared explicit cap.
std::vector<PeterssonDelta> petersson_delta_batch(
    u64 q, const std::vector<std::pair<u64, u64>>& mn, u64 c_max);

struct WeightOptions {
  u64 c_max = 2'000'000;       // Petersson truncation for the fit column
  double residual_limit = 1e-6;
};

// Fits omega_f from the overdetermined system
//   sum_f omega_f lambda_f(n) = Delta_q(1, n)
// over the first n_eq integers coprime to q, in least squares.  Fills
// forms[f].weight on a copy of es and records the max-abs equation
// residual.  Throws when the residual exceeds the limit or any weight is
// nonpositive.
modsym::EigenSystem harmonic_weights(const modsym::EigenSystem& es,
                                     std::size_t n_eq,
                                     const WeightOptions& opt = {},
                                     double* residual_out = nullptr);

// Cutoff Kloosterman double sum at a single modulus,
//   t_sum = sum_{m,n} tau(m) tau(n) (1/c) S(m, a e n; c)
//                     J1(4 pi sqrt(a e m n) / c) F_{M,N}(m, n),
// over the integer support lattice of the profile.  Rejects c not
// divisible by q.
double t_sum(u64 q, u64 c, u64 a, u64 e, const special::CutoffProfile& prof);

struct TailRatio {
  double lhs = 0.0;   // divisor-weighted large-c sum of t_sum
  double rhs = 0.0;   // sqrt(l) (sqrt(MN)/C)^{1-2 theta} at theta = 7/64
  double ratio = 0.0; // |lhs| / rhs
  u64 c_hi = 0;          // last modulus included
  double tail_majorant = 0.0;  // Weil bound on the discarded c > c_hi
};

struct RatioOptions {
  u64 c_terms = 2048;     // multiples of q to include per divisor pair
  double tail_tol = 1e-8; // stop earlier if the majorant drops below this
};

// Large-c tail of the off-diagonal Kloosterman sums against its power-law
// bound: lhs = sum_{de=l} d^{-1/2} sum_{ab=d} mu(a) a^{-1/2} tau(b)
// sum_{c >= C, q|c} t_sum(q,c,a,e).  Requires C > sqrt(l M N).
TailRatio tail_bound_ratio(u64 q, u64 l, double M, double N, double C,
                           const RatioOptions& opt = {});

struct OdTailOptions {
  u64 c_terms = 2048;  // multiples of q above C to include
};

// Off-diagonal tail term
//   -2 pi sum_n tau(aen) tau(n) integral_0^inf Y0(4 pi sqrt(aent))
//        J1(4 pi sqrt(aent)) sum_{q|c, c > C} phi(c) F_{M,N}(c^2 t, n) dt,
// evaluated per modulus after the substitution v = c^2 t (the t-order
// quadrature meets the Y0 log singularity with an unbounded c-window; the
// sum converges absolutely, so the exchanged order is the same value and
// every inner integrand is smooth on [M/2, 3M]).  n_max is the Simpson
// panel count; throws std::runtime_error when halving it moves the result
// by more than 1e-6.  Requires C >= q.
double t_od_tail(u64 q, double C, u64 a, u64 e,
                 const special::CutoffProfile& prof, int n_max,
                 const OdTailOptions& opt = {});

}  // namespace lmw::tracesums
