#include "lmw/arith.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "lmw/parallel.hpp"

namespace lmw::arith {

namespace {

// Shared smallest-prime-factor sieve; backs factorization below the bound,
// trial division by sieved primes above it.
constexpr u64 kSieveLimit = 1 << 20;

struct Spf {
  std::vector<std::uint32_t> spf;
  std::vector<u64> primes;
  Spf() {
    spf.assign(kSieveLimit + 1, 0);
    for (u64 i = 2; i <= kSieveLimit; i++) {
      if (spf[i] == 0) {
        primes.push_back(i);
        for (u64 j = i; j <= kSieveLimit; j += i)
          if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
      }
    }
  }
};

const Spf& spf() {
  static const Spf s;
  return s;
}

}  // namespace

std::vector<std::pair<u64, int>> factor(u64 n) {
  if (n == 0) throw std::invalid_argument("factor: n must be positive");
  std::vector<std::pair<u64, int>> out;
  const Spf& s = spf();
  if (n <= kSieveLimit) {
    while (n > 1) {
      u64 p = s.spf[n];
      int e = 0;
      while (n % p == 0) { n /= p; e++; }
      out.emplace_back(p, e);
    }
    return out;
  }
  for (u64 p : s.primes) {
    if (p * p > n) break;
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) { n /= p; e++; }
      out.emplace_back(p, e);
    }
  }
  if (n > kSieveLimit * kSieveLimit && n > 1) {
    // beyond trial-division reach of the sieved primes
    for (u64 p = kSieveLimit + 1; p * p <= n; p += 2) {
      if (n % p == 0) {
        int e = 0;
        while (n % p == 0) { n /= p; e++; }
        out.emplace_back(p, e);
      }
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

u64 divisor_tau(u64 n) {
  u64 t = 1;
  for (auto [p, e] : factor(n)) t *= static_cast<u64>(e) + 1;
  return t;
}

int mobius(u64 n) {
  int m = 1;
  for (auto [p, e] : factor(n)) {
    if (e > 1) return 0;
    m = -m;
  }
  return m;
}

u64 euler_phi(u64 n) {
  u64 r = n;
  for (auto [p, e] : factor(n)) r -= r / p;
  return r;
}

u64 gcd(u64 a, u64 b) { return std::gcd(a, b); }

u64 modinv(u64 a, u64 c) {
  if (c == 0) throw std::invalid_argument("modinv: zero modulus");
  if (c == 1) return 0;
  i64 g = static_cast<i64>(c), x = 0, x1 = 1, a1 = static_cast<i64>(a % c);
  while (a1) {
    i64 q = g / a1;
    g -= q * a1; std::swap(g, a1);
    x -= q * x1; std::swap(x, x1);
  }
  if (g != 1) throw std::invalid_argument("modinv: arguments not coprime");
  return static_cast<u64>(((x % static_cast<i64>(c)) + static_cast<i64>(c)) %
                          static_cast<i64>(c));
}

std::vector<u64> primes_up_to(u64 n) {
  std::vector<u64> out;
  if (n < 2) return out;
  std::vector<char> comp(n + 1, 0);
  for (u64 i = 2; i <= n; i++) {
    if (!comp[i]) {
      out.push_back(i);
      for (u64 j = i * i; j <= n; j += i) comp[j] = 1;
    }
  }
  return out;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  auto f = factor(n);
  return f.size() == 1 && f[0].second == 1;
}

void units_and_inverses(u64 c, std::vector<u64>& units, std::vector<u64>& inv) {
  units.clear();
  if (c == 1) { units.push_back(0); inv.assign(1, 0); return; }
  std::vector<char> unit(c, 1);
  unit[0] = 0;
  for (auto [p, e] : factor(c))
    for (u64 x = 0; x < c; x += p) unit[x] = 0;
  for (u64 x = 1; x < c; x++)
    if (unit[x]) units.push_back(x);
  std::size_t nu = units.size();
  std::vector<u64> pref(nu);
  u64 run = 1;
  for (std::size_t i = 0; i < nu; i++) {
    run = static_cast<u64>(static_cast<unsigned __int128>(run) * units[i] % c);
    pref[i] = run;
  }
  u64 rinv = modinv(run, c);
  inv.assign(nu, 0);
  for (std::size_t i = nu; i-- > 0;) {
    u64 before = i == 0 ? 1 : pref[i - 1];
    inv[i] = static_cast<u64>(static_cast<unsigned __int128>(before) * rinv % c);
    rinv = static_cast<u64>(static_cast<unsigned __int128>(rinv) * units[i] % c);
  }
}

namespace {

double kloosterman_impl(i64 m, i64 n, u64 c, bool parallel) {
  if (c == 0) throw std::invalid_argument("kloosterman: c must be positive");
  if (c == 1) return 1.0;  // single residue x = 0, angle 0
  u64 mr = reduce_mod(m, c), nr = reduce_mod(n, c);
  std::vector<u64> units, inv;
  units_and_inverses(c, units, inv);
  const double w = 2.0 * M_PI / static_cast<double>(c);
  auto term = [&](i64 i) {
    u64 x = units[i], y = inv[i];
    u64 r = (mr * x + nr * y) % c;
    return std::cos(w * static_cast<double>(r));
  };
  if (!parallel) {
    Kahan acc;
    for (std::size_t i = 0; i < units.size(); i++) acc.add(term(i));
    return acc.value();
  }
  return chunked_sum(static_cast<i64>(units.size()), term);
}

}  // namespace

double kloosterman(i64 m, i64 n, u64 c) { return kloosterman_impl(m, n, c, true); }

double kloosterman_serial(i64 m, i64 n, u64 c) {
  return kloosterman_impl(m, n, c, false);
}

double KloostermanTable::value(i64 m, i64 n, u64 c) {
  if (c == 0) throw std::invalid_argument("KloostermanTable: c must be positive");
  u64 mr = reduce_mod(m, c), nr = reduce_mod(n, c);
  if (mr > nr) std::swap(mr, nr);
  if (c > max_c_) return kloosterman(m, n, c);
  std::tuple<u64, u64, u64> key{mr, nr, c};
  {
    std::shared_lock lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  double v = kloosterman(static_cast<i64>(mr), static_cast<i64>(nr), c);
  std::unique_lock lk(mu_);
  cache_.emplace(key, v);
  return v;
}

std::size_t KloostermanTable::entries() const {
  std::shared_lock lk(mu_);
  return cache_.size();
}

}  // namespace lmw::arith
