#include "lmw/tracesums.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "lmw/kloosterman_engine.hpp"
#include "lmw/parallel.hpp"

namespace lmw::tracesums {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Weil majorant for the discarded c > qJ part of a Petersson c-sum:
// 4 pi^2 sqrt(mn g) * 2 q^{-3/2} (3 ln J + 9) / sqrt(J), g = gcd(m,n).
double weil_tail(u64 q, u64 m, u64 n, u64 J) {
  if (J < 1) J = 1;
  double root = std::sqrt(double(m) * double(n) * double(arith::gcd(m, n)));
  return 4.0 * kPi * kPi * root * 2.0 * std::pow(double(q), -1.5) *
         (3.0 * std::log(double(J)) + 9.0) / std::sqrt(double(J));
}

// Tail factor sum_{c > qJ, q|c} tau(c) c^{-3/2} <= 2 q^{-3/2}(3 ln J + 9)/sqrt(J).
double tau_tail_factor(u64 q, u64 J) {
  if (J < 1) J = 1;
  return 2.0 * std::pow(double(q), -1.5) *
         (3.0 * std::log(double(J)) + 9.0) / std::sqrt(double(J));
}

void check_level(u64 q) {
  if (!arith::is_prime(q)) throw std::invalid_argument("level must be prime");
}

// Integer window (lo, hi) of the plateau bump support (S/2, 3S).
std::pair<u64, u64> support_window(double S) {
  u64 lo = static_cast<u64>(std::floor(S / 2.0)) + 1;
  double top = 3.0 * S;
  u64 hi = top <= 1.0 ? 0 : static_cast<u64>(std::ceil(top)) - 1;
  if (lo < 1) lo = 1;
  return {lo, hi};
}

std::vector<double> tau_range(u64 lo, u64 hi) {
  std::vector<double> t;
  for (u64 v = lo; v <= hi; v++) t.push_back(double(arith::divisor_tau(v)));
  return t;
}

PeterssonDelta delta_at_cap(u64 q, u64 m, u64 n, u64 c_max) {
  const double kappa = 4.0 * kPi * std::sqrt(double(m) * double(n));
  auto res = arith::kloosterman_weighted_sweep(
      q, c_max, {{static_cast<arith::i64>(m), static_cast<arith::i64>(n)}},
      [kappa](std::size_t, u64 c) {
        return special::bessel_j1(kappa / double(c)) / double(c);
      });
  PeterssonDelta out;
  out.level = q;
  out.m = m;
  out.n = n;
  out.c_max = c_max;
  out.value = (m == n ? 1.0 : 0.0) - 2.0 * kPi * res[0];
  out.tail_estimate = weil_tail(q, m, n, c_max / q);
  return out;
}

}  // namespace

PeterssonDelta petersson_delta(u64 q, u64 m, u64 n, double tol,
                               const DeltaOptions& opt) {
  check_level(q);
  if (m < 1 || n < 1) throw std::invalid_argument("m, n must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (opt.c_max_override > 0) return delta_at_cap(q, m, n, opt.c_max_override);

  u64 j_cap = opt.hard_cap / q;
  if (j_cap < 1 || weil_tail(q, m, n, j_cap) > tol)
    throw std::runtime_error(
        "petersson_delta: certified truncation for tol exceeds the hard cap");
  u64 lo = 1, hi = j_cap;  // weil_tail decreases in J
  while (lo < hi) {
    u64 mid = lo + (hi - lo) / 2;
    if (weil_tail(q, m, n, mid) <= tol)
      hi = mid;
    else
      lo = mid + 1;
  }
  return delta_at_cap(q, m, n, q * lo);
}

std::vector<PeterssonDelta> petersson_delta_batch(
    u64 q, const std::vector<std::pair<u64, u64>>& mn, u64 c_max) {
  check_level(q);
  if (mn.empty()) throw std::invalid_argument("empty pair list");
  std::vector<std::pair<arith::i64, arith::i64>> pairs;
  std::vector<double> kappas;
  for (auto [m, n] : mn) {
    if (m < 1 || n < 1) throw std::invalid_argument("m, n must be positive");
    pairs.emplace_back(static_cast<arith::i64>(m), static_cast<arith::i64>(n));
    kappas.push_back(4.0 * kPi * std::sqrt(double(m) * double(n)));
  }
  auto res = arith::kloosterman_weighted_sweep(
      q, c_max, pairs, [&kappas](std::size_t i, u64 c) {
        return special::bessel_j1(kappas[i] / double(c)) / double(c);
      });
  std::vector<PeterssonDelta> out(mn.size());
  for (std::size_t i = 0; i < mn.size(); i++) {
    out[i].level = q;
    out[i].m = mn[i].first;
    out[i].n = mn[i].second;
    out[i].c_max = c_max;
    out[i].value = (mn[i].first == mn[i].second ? 1.0 : 0.0) - 2.0 * kPi * res[i];
    out[i].tail_estimate = weil_tail(q, mn[i].first, mn[i].second, c_max / q);
  }
  return out;
}

modsym::EigenSystem harmonic_weights(const modsym::EigenSystem& es,
                                     std::size_t n_eq, const WeightOptions& opt,
                                     double* residual_out) {
  const std::size_t g = es.forms.size();
  if (g == 0) throw std::invalid_argument("eigensystem has no forms");
  if (n_eq < g) throw std::invalid_argument("need at least as many equations as forms");

  std::vector<u64> ns;
  for (u64 n = 1; ns.size() < n_eq; n++)
    if (n % es.level != 0) ns.push_back(n);
  if (ns.back() > es.n_max)
    throw std::invalid_argument("eigensystem n_max too small for n_eq equations");

  std::vector<std::pair<u64, u64>> pairs;
  for (u64 n : ns) pairs.emplace_back(1, n);
  auto deltas = petersson_delta_batch(es.level, pairs, opt.c_max);

  Eigen::MatrixXd A(n_eq, g);
  Eigen::VectorXd b(n_eq);
  for (std::size_t k = 0; k < n_eq; k++) {
    b(k) = deltas[k].value;
    for (std::size_t f = 0; f < g; f++) A(k, f) = es.forms[f].lambda[ns[k]];
  }
  Eigen::VectorXd w = A.colPivHouseholderQr().solve(b);
  double resid = (A * w - b).cwiseAbs().maxCoeff();
  if (residual_out) *residual_out = resid;
  if (resid > opt.residual_limit)
    throw std::runtime_error("harmonic_weights: fit residual " +
                             std::to_string(resid) + " exceeds limit");
  for (std::size_t f = 0; f < g; f++)
    if (!(w(f) > 0.0))
      throw std::runtime_error("harmonic_weights: nonpositive weight");

  modsym::EigenSystem out = es;
  for (std::size_t f = 0; f < g; f++) out.forms[f].weight = w(f);
  return out;
}

double t_sum(u64 q, u64 c, u64 a, u64 e, const special::CutoffProfile& prof) {
  check_level(q);
  if (c == 0 || c % q != 0) throw std::invalid_argument("c must be a positive multiple of q");
  if (a < 1 || e < 1) throw std::invalid_argument("a, e must be positive");

  auto [m_lo, m_hi] = support_window(prof.scale_m);
  auto [n_lo, n_hi] = support_window(prof.scale_n);
  if (m_lo > m_hi || n_lo > n_hi) return 0.0;

  const std::size_t count = (m_hi - m_lo + 1) * (n_hi - n_lo + 1);
  std::vector<double> row;
  if (count >= 64) row = arith::kloosterman_unit_row(c);

  auto tau_m = tau_range(m_lo, m_hi);
  auto tau_n = tau_range(n_lo, n_hi);

  Kahan acc;
  const double pref = 4.0 * kPi * std::sqrt(double(a) * double(e));
  for (u64 m = m_lo; m <= m_hi; m++) {
    for (u64 n = n_lo; n <= n_hi; n++) {
      double f = special::cutoff_eval(prof, double(m), double(n));
      if (f == 0.0) continue;
      u64 aen = a * e * n;
      double s;
      if (!row.empty() &&
          (arith::gcd(m, c) == 1 || arith::gcd(aen, c) == 1)) {
        s = row[(m % c) * (aen % c) % c];  // S(m,t;c) = S(1,mt;c), unit m or t
      } else {
        s = arith::kloosterman_serial(static_cast<arith::i64>(m),
                                      static_cast<arith::i64>(aen), c);
      }
      double x = pref * std::sqrt(double(m) * double(n)) / double(c);
      acc.add(tau_m[m - m_lo] * tau_n[n - n_lo] * s * special::bessel_j1(x) * f /
              double(c));
    }
  }
  return acc.value();
}

TailRatio tail_bound_ratio(u64 q, u64 l, double M, double N, double C,
                           const RatioOptions& opt) {
  check_level(q);
  if (l < 1) throw std::invalid_argument("l must be positive");
  if (!(M > 0.0) || !(N > 0.0)) throw std::invalid_argument("M, N must be positive");
  if (!(C > std::sqrt(double(l) * M * N)))
    throw std::invalid_argument("tail_bound_ratio requires C > sqrt(l M N)");

  // divisor skeleton (d, e, a, b) with de = l, ab = d, mu(a) != 0
  struct Term {
    u64 a, e;
    double coef;
  };
  std::vector<Term> terms;
  for (u64 d = 1; d <= l; d++) {
    if (l % d != 0) continue;
    u64 ee = l / d;
    for (u64 aa = 1; aa <= d; aa++) {
      if (d % aa != 0) continue;
      int mu = arith::mobius(aa);
      if (mu == 0) continue;
      u64 bb = d / aa;
      terms.push_back({aa, ee,
                       double(mu) / std::sqrt(double(aa)) *
                           double(arith::divisor_tau(bb)) / std::sqrt(double(d))});
    }
  }

  const special::CutoffProfile prof{M, N};
  auto [m_lo, m_hi] = support_window(M);
  auto [n_lo, n_hi] = support_window(N);

  // per-(a,e) lattice constant of the per-modulus Weil bound
  // |t_sum(c)| <= K_ae tau(c) c^{-3/2}
  auto lattice_k = [&](u64 aa, u64 ee) {
    if (m_lo > m_hi || n_lo > n_hi) return 0.0;
    double k = 0.0;
    for (u64 m = m_lo; m <= m_hi; m++)
      for (u64 n = n_lo; n <= n_hi; n++) {
        double f = special::cutoff_eval(prof, double(m), double(n));
        if (f == 0.0) continue;
        double g = double(std::min(m, aa * ee * n));
        k += double(arith::divisor_tau(m)) * double(arith::divisor_tau(n)) *
             2.0 * kPi * std::sqrt(double(aa) * double(ee) * double(m) * double(n) * g) *
             f;
      }
    return k;
  };
  double k_total = 0.0;
  std::vector<double> k_ae(terms.size());
  for (std::size_t i = 0; i < terms.size(); i++) {
    k_ae[i] = lattice_k(terms[i].a, terms[i].e);
    k_total += std::fabs(terms[i].coef) * k_ae[i];
  }

  u64 j0 = static_cast<u64>(std::ceil(C / double(q)));
  if (j0 < 1) j0 = 1;
  u64 kterms = opt.c_terms;
  for (u64 k = 1; k <= opt.c_terms; k++) {  // stop early if certifiable
    if (k_total * tau_tail_factor(q, j0 + k - 1) <= opt.tail_tol) {
      kterms = k;
      break;
    }
  }

  Kahan lhs;
  for (const Term& t : terms) {
    std::vector<double> vals(kterms);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < kterms; k++)
      vals[k] = t_sum(q, q * (j0 + k), t.a, t.e, prof);
    Kahan inner;
    for (std::size_t k = 0; k < kterms; k++) inner.add(vals[k]);
    lhs.add(t.coef * inner.value());
  }

  TailRatio out;
  out.lhs = lhs.value();
  out.rhs = std::sqrt(double(l)) * std::pow(std::sqrt(M * N) / C, 25.0 / 32.0);
  out.ratio = std::fabs(out.lhs) / out.rhs;
  out.c_hi = q * (j0 + kterms - 1);
  out.tail_majorant = k_total * tau_tail_factor(q, j0 + kterms - 1);
  return out;
}

namespace {

// Composite Simpson over [lo, hi] with an even panel count.
template <class F>
double simpson(const F& f, double lo, double hi, int panels) {
  double h = (hi - lo) / panels;
  Kahan acc;
  acc.add(f(lo));
  acc.add(f(hi));
  for (int i = 1; i < panels; i++)
    acc.add((i & 1 ? 4.0 : 2.0) * f(lo + h * double(i)));
  return acc.value() * h / 3.0;
}

}  // namespace

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

// sum_{j > j_start} phi(qj) { 1, ln(qj) } / (qj)^{pow} for pow = 3 and 5,
// by a totient sieve plus an integral estimate of the remainder (the local
// mean of phi(c)/c stands in for the density past the sieve).
struct TotientTails {
  double p3_one, p3_log, p5_one, p5_log;
};

TotientTails totient_tails(u64 q, u64 j_start) {
  const u64 jl = std::max<u64>(4 * j_start, 4'000'000);
  std::vector<u64> ph(jl + 1);
  for (u64 i = 0; i <= jl; i++) ph[i] = i;
  for (u64 p = 2; p <= jl; p++)
    if (ph[p] == p)
      for (u64 m = p; m <= jl; m += p) ph[m] -= ph[m] / p;
  // phi(q j) = (q-1) phi(j) when q does not divide j, q phi(j) otherwise
  Kahan s3o, s3l, s5o, s5l;
  double dsum = 0.0;
  const u64 dcount = 100000;
  for (u64 j = j_start + 1; j <= jl; j++) {
    double c = double(q) * double(j);
    double phi = double(ph[j]) * (j % q == 0 ? double(q) : double(q - 1));
    double r = phi / (c * c * c);
    double lg = std::log(c);
    s3o.add(r);
    s3l.add(r * lg);
    s5o.add(r / (c * c));
    s5l.add(r * lg / (c * c));
    if (j > jl - dcount) dsum += phi / c;
  }
  double dbar = dsum / double(std::min(dcount, jl - j_start));
  double cl = double(q) * double(jl);
  TotientTails t;
  t.p3_one = s3o.value() + dbar / (double(q) * cl);
  t.p3_log = s3l.value() + dbar * (std::log(cl) + 1.0) / (double(q) * cl);
  t.p5_one = s5o.value() + dbar / (3.0 * double(q) * cl * cl * cl);
  t.p5_log = s5l.value() + dbar * std::log(cl) / (3.0 * double(q) * cl * cl * cl);
  return t;
}

}  // namespace

double t_od_tail(u64 q, double C, u64 a, u64 e,
                 const special::CutoffProfile& prof, int n_max,
                 const OdTailOptions& opt) {
  check_level(q);
  if (!(C >= double(q))) throw std::invalid_argument("t_od_tail requires C >= q");
  if (a < 1 || e < 1) throw std::invalid_argument("a, e must be positive");
  if (n_max < 4) throw std::invalid_argument("n_max too small");

  const double M = prof.scale_m, N = prof.scale_n;
  auto [n_lo, n_hi] = support_window(N);
  if (n_lo > n_hi || M <= 0.0) return 0.0;
  const double v_lo = M / 2.0, v_hi = 3.0 * M;

  // Per-modulus integrals are summed directly while the Bessel argument can
  // exceed kSmallX; past that, Y0(x) J1(x) = (x/pi) L - (3x^3/8pi) L
  // + x^3/(4pi) + O(x^5 ln x) with L = ln(x/2) + gamma closes the infinite
  // c-sum into totient tails, so the returned value is the full sum, not a
  // truncation.
  constexpr double kSmallX = 0.15;
  const double kap_hi =
      4.0 * kPi * std::sqrt(double(a) * double(e) * double(n_hi) * v_hi);
  u64 j0 = static_cast<u64>(std::floor(C / double(q))) + 1;  // c > C strictly
  u64 j_end = j0 >= 1 ? j0 - 1 : 0;                          // last brute j
  u64 j_need = static_cast<u64>(std::ceil(kap_hi / (kSmallX * double(q))));
  if (j_need > j_end) j_end = j_need;
  if (j_end > j0 - 1 + opt.c_terms) j_end = j0 - 1 + opt.c_terms;
  const std::size_t nc = j_end >= j0 ? static_cast<std::size_t>(j_end - j0 + 1) : 0;

  std::vector<double> phi_over_c2(nc);
  for (std::size_t k = 0; k < nc; k++) {
    u64 c = q * (j0 + k);
    phi_over_c2[k] = double(arith::euler_phi(c)) / (double(c) * double(c));
  }
  const TotientTails tails = totient_tails(q, j_end >= j0 ? j_end : j0 - 1);

  auto eval = [&](int panels) {
    const std::size_t nn = n_hi - n_lo + 1;
    std::vector<double> inner(nn * nc);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t idx = 0; idx < nn * nc; idx++) {
      std::size_t ni = idx / nc, k = idx % nc;
      u64 n = n_lo + ni;
      double kap = 4.0 * kPi * std::sqrt(double(a) * double(e) * double(n));
      double c = double(q) * double(j0 + k);
      inner[idx] = phi_over_c2[k] *
                   simpson(
                       [&](double v) {
                         double x = kap * std::sqrt(v) / c;
                         return special::bessel_y0(x) * special::bessel_j1(x) *
                                special::cutoff_eval(prof, v, double(n));
                       },
                       v_lo, v_hi, panels);
    }
    Kahan total;
    for (std::size_t ni = 0; ni < nn; ni++) {
      u64 n = n_lo + ni;
      double kap = 4.0 * kPi * std::sqrt(double(a) * double(e) * double(n));
      Kahan csum;
      for (std::size_t k = 0; k < nc; k++) csum.add(inner[ni * nc + k]);
      // cutoff moments for the analytic completion
      auto momf = [&](double power, bool with_log) {
        return simpson(
            [&](double v) {
              double base = std::pow(v, power) *
                            special::cutoff_eval(prof, v, double(n));
              if (with_log)
                base *= std::log(kap * std::sqrt(v) / 2.0) + kEulerGamma;
              return base;
            },
            v_lo, v_hi, panels);
      };
      double b1 = momf(0.5, false), a1 = momf(0.5, true);
      double b3 = momf(1.5, false), a3 = momf(1.5, true);
      double k3 = kap * kap * kap;
      double tail = kap / kPi * (a1 * tails.p3_one - b1 * tails.p3_log) -
                    3.0 * k3 / (8.0 * kPi) *
                        (a3 * tails.p5_one - b3 * tails.p5_log) +
                    k3 / (4.0 * kPi) * b3 * tails.p5_one;
      double tt = double(arith::divisor_tau(a * e * n)) *
                  double(arith::divisor_tau(n));
      total.add(tt * (csum.value() + tail));
    }
    return -2.0 * kPi * total.value();
  };

  int p_full = n_max + (n_max & 1);
  int p_half = std::max(2, p_full / 2 + (p_full / 2 & 1));
  double v_full = eval(p_full);
  double v_half = eval(p_half);
  if (std::fabs(v_full - v_half) > 1e-6 * std::max(1.0, std::fabs(v_full)))
    throw std::runtime_error("t_od_tail: quadrature did not converge");
  return v_full;
}

}  // namespace lmw::tracesums
