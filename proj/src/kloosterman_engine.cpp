#include "lmw/kloosterman_engine.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "lmw/arith.hpp"
#include "lmw/parallel.hpp"

namespace lmw::arith {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

constexpr u64 kSmallRowLimit = 8192;  // moduli up to this keep a full value row
constexpr double kTwoPi = 6.283185307179586476925286766559;

u64 umod(i64 v, u64 r) {
  i64 m = v % static_cast<i64>(r);
  return m < 0 ? static_cast<u64>(m + static_cast<i64>(r)) : static_cast<u64>(m);
}

u64 pow_u64(u64 p, int e) {
  u64 v = 1;
  while (e-- > 0) v *= p;
  return v;
}

// min(v_p(|m|), cap); m = 0 counts as divisible to the cap.
int pval_capped(i64 m, u64 p, int cap) {
  if (m == 0) return cap;
  u64 v = static_cast<u64>(m < 0 ? -m : m);
  int e = 0;
  while (e < cap && v % p == 0) {
    v /= p;
    e++;
  }
  return e;
}

struct Component {
  bool closed;
  double value;  // closed value, or the p^alpha scale for lookups
  int alpha;     // lookup case: common valuation stripped from both entries
};

// The prime-power factor S(m*b, n*b; r), r = p^a, b any unit mod r.
// Closed cases: both entries 0 mod r -> phi(r); one entry 0 mod r ->
// Ramanujan sum of the other; unequal valuations below a -> 0 (after
// scaling out the common power the remaining modulus has a >= 2, and a
// sum with exactly one unit entry vanishes there).  Otherwise the factor
// is p^alpha * S(1, (m*n/p^{2 alpha}) * b^2; p^{a-alpha}) with unit second
// argument, served by a DFT row lookup.
Component resolve_component(i64 m, i64 n, u64 p, int a, u64 r) {
  int am = pval_capped(m, p, a), an = pval_capped(n, p, a);
  if (am > an) std::swap(am, an);
  if (am == a) return {true, static_cast<double>(r - r / p), 0};
  if (an == a) return {true, am == a - 1 ? -static_cast<double>(r / p) : 0.0, 0};
  if (am != an) return {true, 0.0, 0};
  return {false, static_cast<double>(pow_u64(p, am)), am};
}

struct PrimePower {
  u64 p, r;
  int a;
};

int factor_from_spf(u64 c, const std::vector<std::uint32_t>& spf,
                    PrimePower* out) {
  int k = 0;
  while (c > 1) {
    u64 p = spf[c];
    u64 r = 1;
    int a = 0;
    while (c % p == 0) {
      c /= p;
      r *= p;
      a++;
    }
    out[k++] = {p, r, a};
  }
  return k;
}

std::vector<std::uint32_t> build_spf(u64 n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  for (u64 i = 2; i <= n; i++)
    if (spf[i] == 0)
      for (u64 j = i; j <= n; j += i)
        if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
  return spf;
}

// Products m*n of all pairs, closed under dividing out squares of primes
// (the moduli reductions above need k / p^{2 alpha}).
std::vector<i64> product_closure(const std::vector<std::pair<i64, i64>>& pairs) {
  std::set<i64> seen;
  std::vector<i64> stack;
  for (const auto& [m, n] : pairs) {
    i64 k = m * n;
    if (seen.insert(k).second) stack.push_back(k);
  }
  while (!stack.empty()) {
    i64 k = stack.back();
    stack.pop_back();
    if (k == 0) continue;
    u64 a = static_cast<u64>(k < 0 ? -k : k);
    for (auto [p, e] : factor(a)) {
      if (e < 2) continue;
      i64 kr = k / static_cast<i64>(p * p);
      if (seen.insert(kr).second) stack.push_back(kr);
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

std::vector<double> kloosterman_unit_row(u64 c) {
  if (c == 0) throw std::invalid_argument("kloosterman_unit_row: c = 0");
  if (c >= (1ull << 31))
    throw std::invalid_argument("kloosterman_unit_row: c too large");
  if (c == 1) return {1.0};

  std::vector<u64> units, inv;
  units_and_inverses(c, units, inv);

  fftw_complex* in = fftw_alloc_complex(c);
  fftw_complex* out = fftw_alloc_complex(c);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(c), in, out, FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }

  // h[ybar] = e(y/c) for units y, so the backward transform gives
  // out[t] = sum_y h[y] e(t y / c) = S(1, t; c).  The angle walks by a
  // unit rotation with a fresh anchor every 512 steps to stop drift.
  std::memset(in, 0, sizeof(fftw_complex) * c);
  const double step = kTwoPi / static_cast<double>(c);
  const double c1 = std::cos(step), s1 = std::sin(step);
  double cs = 1.0, sn = 0.0;
  std::size_t ui = 0;
  for (u64 y = 1; y < c && ui < units.size(); y++) {
    if ((y & 511u) == 1u) {
      cs = std::cos(step * static_cast<double>(y));
      sn = std::sin(step * static_cast<double>(y));
    } else {
      double t = cs * c1 - sn * s1;
      sn = cs * s1 + sn * c1;
      cs = t;
    }
    if (units[ui] == y) {
      in[inv[ui]][0] = cs;
      in[inv[ui]][1] = sn;
      ui++;
    }
  }

  fftw_execute(plan);
  std::vector<double> row(c);
  for (u64 t = 0; t < c; t++) row[t] = out[t][0];  // imaginary part is 0

  {
    std::lock_guard<std::mutex> lk(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return row;
}

std::vector<double> kloosterman_weighted_sweep(
    u64 q, u64 c_max, const std::vector<std::pair<i64, i64>>& pairs,
    const std::function<double(std::size_t, u64)>& w) {
  if (q == 0) throw std::invalid_argument("kloosterman_weighted_sweep: q = 0");
  if (c_max >= (1ull << 31))
    throw std::invalid_argument("kloosterman_weighted_sweep: c_max too large");
  const std::size_t np = pairs.size();
  std::vector<double> result(np, 0.0);
  const u64 J = c_max / q;
  if (J == 0 || np == 0) return result;

  std::vector<i64> kprod(np);
  for (std::size_t i = 0; i < np; i++) kprod[i] = pairs[i].first * pairs[i].second;
  const std::vector<i64> K = product_closure(pairs);
  std::unordered_map<i64, int> kpos;
  kpos.reserve(K.size() * 2);
  for (std::size_t i = 0; i < K.size(); i++) kpos[K[i]] = static_cast<int>(i);

  const std::vector<std::uint32_t> spf = build_spf(c_max);

  // Pass 1: every (modulus, beta) combination the sweep will look up.
  // beta = inv(c/r) mod r carries the twist from the other prime powers;
  // unequal-valuation reductions demand the shrunken modulus r / p^alpha.
  std::vector<char> small_needed(kSmallRowLimit + 1, 0);
  std::vector<u64> big_demands;
  {
    PrimePower pp[16];
    for (u64 j = 1; j <= J; j++) {
      u64 c = q * j;
      int npp = factor_from_spf(c, spf, pp);
      for (int t = 0; t < npp; t++) {
        auto [p, r, a] = pp[t];
        u64 beta = modinv((c / r) % r, r);
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < np; i++) {
          Component comp =
              resolve_component(pairs[i].first, pairs[i].second, p, a, r);
          if (!comp.closed) mask |= 1u << comp.alpha;
        }
        for (int al = 0; mask != 0; al++, mask >>= 1) {
          if (!(mask & 1u)) continue;
          u64 rr = r / pow_u64(p, al);
          if (rr <= kSmallRowLimit)
            small_needed[rr] = 1;
          else
            big_demands.push_back((rr << 32) | (beta % rr));
        }
      }
    }
  }
  std::sort(big_demands.begin(), big_demands.end());
  big_demands.erase(std::unique(big_demands.begin(), big_demands.end()),
                    big_demands.end());

  // Pass 2: one DFT per modulus.  Small moduli keep the whole row; large
  // ones keep, per beta, just the entries at k * beta^2 for k in K.
  std::vector<std::vector<double>> small_rows(kSmallRowLimit + 1);
  std::vector<u64> small_list;
  for (u64 rr = 1; rr <= kSmallRowLimit; rr++)
    if (small_needed[rr]) small_list.push_back(rr);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < small_list.size(); i++)
    small_rows[small_list[i]] = kloosterman_unit_row(small_list[i]);

  struct Group {
    u64 rr;
    std::size_t first, last, store0;
  };
  std::vector<Group> groups;
  std::size_t total = 0;
  for (std::size_t i = 0; i < big_demands.size();) {
    u64 rr = big_demands[i] >> 32;
    std::size_t e = i;
    while (e < big_demands.size() && (big_demands[e] >> 32) == rr) e++;
    groups.push_back({rr, i, e, total});
    total += (e - i) * K.size();
    i = e;
  }
  std::vector<double> block_store(total);
  std::unordered_map<u64, std::size_t> block_off;
  block_off.reserve(big_demands.size() * 2);
  for (const auto& g : groups)
    for (std::size_t i = g.first; i < g.last; i++)
      block_off[big_demands[i]] = g.store0 + (i - g.first) * K.size();
#pragma omp parallel for schedule(dynamic)
  for (std::size_t gi = 0; gi < groups.size(); gi++) {
    const Group& g = groups[gi];
    std::vector<double> row = kloosterman_unit_row(g.rr);
    for (std::size_t i = g.first; i < g.last; i++) {
      u64 beta = big_demands[i] & 0xffffffffu;
      u64 b2 = beta * beta % g.rr;
      double* blk = &block_store[g.store0 + (i - g.first) * K.size()];
      for (std::size_t ki = 0; ki < K.size(); ki++)
        blk[ki] = row[umod(K[ki], g.rr) * b2 % g.rr];
    }
  }

  // Pass 3: assemble S(m,n;c) per pair as the product of components and
  // accumulate w-weighted sums.  Fixed j-chunks with compensated partials
  // combined in order keep the result thread-count independent.
  const u64 B = 256;
  const u64 nblocks = (J + B - 1) / B;
  std::vector<double> partial(nblocks * np);
#pragma omp parallel for schedule(dynamic)
  for (u64 b = 0; b < nblocks; b++) {
    std::vector<Kahan> acc(np);
    PrimePower pp[16];
    u64 betas[16];
    const u64 jhi = std::min(J, (b + 1) * B);
    for (u64 j = b * B + 1; j <= jhi; j++) {
      const u64 c = q * j;
      const int npp = factor_from_spf(c, spf, pp);
      for (int t = 0; t < npp; t++)
        betas[t] = modinv((c / pp[t].r) % pp[t].r, pp[t].r);
      for (std::size_t i = 0; i < np; i++) {
        double s = 1.0;
        for (int t = 0; t < npp && s != 0.0; t++) {
          auto [p, r, a] = pp[t];
          Component comp =
              resolve_component(pairs[i].first, pairs[i].second, p, a, r);
          if (comp.closed) {
            s *= comp.value;
            continue;
          }
          const u64 rr = r / pow_u64(p, comp.alpha);
          const i64 kr = kprod[i] / static_cast<i64>(pow_u64(p, 2 * comp.alpha));
          const u64 br = betas[t] % rr;
          double unit_value;
          if (rr <= kSmallRowLimit) {
            unit_value = small_rows[rr][umod(kr, rr) * (br * br % rr) % rr];
          } else {
            auto it = block_off.find((rr << 32) | br);
            unit_value = block_store[it->second + kpos.find(kr)->second];
          }
          s *= comp.value * unit_value;
        }
        if (s != 0.0) acc[i].add(s * w(i, c));
      }
    }
    for (std::size_t i = 0; i < np; i++) partial[b * np + i] = acc[i].value();
  }
  for (std::size_t i = 0; i < np; i++) {
    Kahan k;
    for (u64 b = 0; b < nblocks; b++) k.add(partial[b * np + i]);
    result[i] = k.value();
  }
  return result;
}

std::vector<double> kloosterman_weighted_sweep_serial(
    u64 q, u64 c_max, const std::vector<std::pair<i64, i64>>& pairs,
    const std::function<double(std::size_t, u64)>& w) {
  if (q == 0) throw std::invalid_argument("kloosterman_weighted_sweep: q = 0");
  const std::size_t np = pairs.size();
  std::vector<Kahan> acc(np);
  std::vector<u64> units, inv;
  for (u64 c = q; c <= c_max; c += q) {
    units_and_inverses(c, units, inv);
    const double ang = kTwoPi / static_cast<double>(c);
    for (std::size_t i = 0; i < np; i++) {
      const u64 mr = reduce_mod(pairs[i].first, c);
      const u64 nr = reduce_mod(pairs[i].second, c);
      Kahan s;
      for (std::size_t u = 0; u < units.size(); u++) {
        u64 rem = (mr * units[u] + nr * inv[u]) % c;
        s.add(std::cos(ang * static_cast<double>(rem)));
      }
      acc[i].add(s.value() * w(i, c));
    }
  }
  std::vector<double> result(np);
  for (std::size_t i = 0; i < np; i++) result[i] = acc[i].value();
  return result;
}

}  // namespace lmw::arith
