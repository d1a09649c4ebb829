#pragma once
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <utility>
#include <vector>

// Elementary multiplicative functions and Kloosterman sums.
//
// S(m,n;c) = sum over x mod c, gcd(x,c)=1 of cos(2*pi*(m*x + n*inv(x))/c).
// The sum is real because x -> -x pairs terms; the cosine form is exact.

namespace lmw::arith {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// Factorization of n as (prime, exponent) pairs, primes ascending.
std::vector<std::pair<u64, int>> factor(u64 n);

// Number of divisors.  Multiplicative, tau(1) = 1.  Throws on n = 0.
u64 divisor_tau(u64 n);

// Moebius function in {-1, 0, 1}.  Throws on n = 0.
int mobius(u64 n);

// Euler totient.  Throws on n = 0.
u64 euler_phi(u64 n);

u64 gcd(u64 a, u64 b);

// Inverse of a mod c (c >= 1).  Throws if gcd(a, c) != 1.
u64 modinv(u64 a, u64 c);

// Primes <= n, ascending.
std::vector<u64> primes_up_to(u64 n);
bool is_prime(u64 n);

// v reduced into [0, c).
inline u64 reduce_mod(i64 v, u64 c) {
  i64 r = v % static_cast<i64>(c);
  if (r < 0) r += static_cast<i64>(c);
  return static_cast<u64>(r);
}

// Units mod c (ascending) with their inverses, by batch inversion: one
// extended Euclid plus three modular multiplications per unit.  c = 1
// yields the single residue 0 (its own inverse by convention).
void units_and_inverses(u64 c, std::vector<u64>& units, std::vector<u64>& inv);

// Kloosterman sum by direct summation over units, compensated accumulation,
// deterministic chunked parallel reduction.  O(c) work.  Throws on c = 0.
double kloosterman(i64 m, i64 n, u64 c);

// Strictly sequential reference implementation (kept for testing the
// parallel kernel; identical summation order as a single chunk).
double kloosterman_serial(i64 m, i64 n, u64 c);

// Memoizing cache for repeated S(m,n;c) lookups.  Keys are canonicalized by
// reducing m, n mod c and sorting (S is symmetric in m, n).  Entries are
// only stored for c <= max_c; larger moduli are computed pass-through.
// Thread safe: concurrent readers, exclusive writer.
class KloostermanTable {
 public:
  explicit KloostermanTable(u64 max_c = 100000) : max_c_(max_c) {}
  double value(i64 m, i64 n, u64 c);
  std::size_t entries() const;
  u64 max_c() const { return max_c_; }

 private:
  u64 max_c_;
  mutable std::shared_mutex mu_;
  std::map<std::tuple<u64, u64, u64>, double> cache_;
};

}  // namespace lmw::arith
