#include "lmw/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lmw::special {

namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;
constexpr long double kGamma = 0.57721566490153286060651209008240243L;

void check_finite(double x, const char* who) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

// Ascending series sum_k (-1)^k (x^2/4)^k / (k! (k+nu)!) scaled by (x/2)^nu,
// nu in {0,1}.  Long double keeps the alternating cancellation below 1e-13
// absolute for x <= 20.
long double j_series(long double x, int nu) {
  const long double z = x * x / 4.0L;
  long double term = nu == 1 ? x / 2.0L : 1.0L;
  long double sum = term;
  for (int k = 1; k < 200; k++) {
    term *= -z / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::fabs(term) < 1e-24L) break;
  }
  return sum;
}

// Hankel expansion tail coefficients: with mu = 4 nu^2,
//   t_0 = 1,  t_k = t_{k-1} (mu - (2k-1)^2) / (8 k x),
// P collects t_0, -t_2, t_4, ... and Q collects t_1, -t_3, ...  The series
// diverges; summation stops at the smallest term (floor ~ e^{-2x}).
void hankel_pq(long double mu, long double x, long double& P, long double& Q) {
  P = 1.0L;
  Q = 0.0L;
  long double t = 1.0L;
  long double prev = 1e30L;
  for (int k = 1; k < 80; k++) {
    long double odd = 2.0L * k - 1.0L;
    t *= (mu - odd * odd) / (8.0L * k * x);
    if (std::fabs(t) >= prev) break;
    prev = std::fabs(t);
    long double signed_t = ((k >> 1) & 1) ? -t : t;
    if (k & 1)
      Q += signed_t;
    else
      P += signed_t;
    if (prev < 1e-24L) break;
  }
}

long double hankel_eval(long double mu, long double omega_shift, double x,
                        bool first_kind) {
  long double P, Q;
  hankel_pq(mu, x, P, Q);
  const long double w = static_cast<long double>(x) - omega_shift;
  const long double f = std::sqrt(2.0L / (kPi * x));
  if (first_kind) return f * (std::cos(w) * P - std::sin(w) * Q);
  return f * (std::sin(w) * P + std::cos(w) * Q);
}

}  // namespace

namespace detail {

double j1_series(double x) { return static_cast<double>(j_series(x, 1)); }
double j0_series(double x) { return static_cast<double>(j_series(x, 0)); }

double j1_asymptotic(double x) {
  return static_cast<double>(hankel_eval(4.0L, 3.0L * kPi / 4.0L, x, true));
}

double j0_asymptotic(double x) {
  return static_cast<double>(hankel_eval(0.0L, kPi / 4.0L, x, true));
}

double y0_asymptotic(double x) {
  return static_cast<double>(hankel_eval(0.0L, kPi / 4.0L, x, false));
}

// Y0(x) = (2/pi) [ (ln(x/2) + gamma) J0(x) + sum_{k>=1} (-1)^{k+1} H_k z^k / (k!)^2 ],
// z = x^2/4, H_k the harmonic numbers.
double y0_series(double x) {
  const long double lx = x;
  const long double z = lx * lx / 4.0L;
  long double term = 1.0L;  // z^k / (k!)^2 at k = 0
  long double hk = 0.0L;
  long double sum = 0.0L;
  for (int k = 1; k < 200; k++) {
    term *= z / (static_cast<long double>(k) * k);
    hk += 1.0L / k;
    long double t = (k & 1 ? term : -term) * hk;
    sum += t;
    if (term * hk < 1e-24L) break;
  }
  long double j0 = j_series(lx, 0);
  return static_cast<double>(
      (2.0L / kPi) * ((std::log(lx / 2.0L) + kGamma) * j0 + sum));
}

}  // namespace detail

double bessel_j1(double x) {
  check_finite(x, "bessel_j1");
  if (x < 0) throw std::invalid_argument("bessel_j1: negative input");
  return x < detail::kCrossover ? detail::j1_series(x) : detail::j1_asymptotic(x);
}

double bessel_j0(double x) {
  check_finite(x, "bessel_j0");
  if (x < 0) throw std::invalid_argument("bessel_j0: negative input");
  return x < detail::kCrossover ? detail::j0_series(x) : detail::j0_asymptotic(x);
}

double bessel_y0(double x) {
  check_finite(x, "bessel_y0");
  if (x <= 0) throw std::invalid_argument("bessel_y0: input must be positive");
  return x < detail::kCrossover ? detail::y0_series(x) : detail::y0_asymptotic(x);
}

namespace {

// quintic smoothstep on [0,1] and derivatives
double sstep(double t, int deriv) {
  switch (deriv) {
    case 0: return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    case 1: { double u = t * (1.0 - t); return 30.0 * u * u; }
    default: return 60.0 * t * (1.0 + t * (-3.0 + 2.0 * t));
  }
}

}  // namespace

double plateau_bump(double u, int deriv) {
  if (deriv < 0 || deriv > 2) throw std::invalid_argument("plateau_bump: deriv");
  if (u <= 0.5 || u >= 3.0) return 0.0;
  if (u < 1.0) {
    const double scale = deriv == 0 ? 1.0 : (deriv == 1 ? 2.0 : 4.0);
    return scale * sstep(2.0 * u - 1.0, deriv);
  }
  if (u <= 2.0) return deriv == 0 ? 1.0 : 0.0;
  const double scale = deriv == 1 ? -1.0 : 1.0;
  return scale * sstep(3.0 - u, deriv);
}

double unit_bump(double u, int deriv) {
  if (deriv < 0 || deriv > 2) throw std::invalid_argument("unit_bump: deriv");
  // 30*sqrt(3) = 9 * sup|s''|, the exact sup of the raw second derivative
  static const double norm = 30.0 * std::sqrt(3.0);
  if (u <= 1.0 || u >= 2.0) return 0.0;
  double raw;
  if (u < 4.0 / 3.0) {
    const double scale = deriv == 0 ? 1.0 : (deriv == 1 ? 3.0 : 9.0);
    raw = scale * sstep(3.0 * (u - 1.0), deriv);
  } else if (u <= 5.0 / 3.0) {
    raw = deriv == 0 ? 1.0 : 0.0;
  } else {
    const double scale = deriv == 0 ? 1.0 : (deriv == 1 ? -3.0 : 9.0);
    raw = scale * sstep(3.0 * (2.0 - u), deriv);
  }
  return raw / norm;
}

double cutoff_eval(const CutoffProfile& p, double x, double y) {
  const double bx = plateau_bump(x / p.scale_m);
  if (bx == 0.0) return 0.0;
  const double by = plateau_bump(y / p.scale_n);
  if (by == 0.0) return 0.0;
  return bx * by / std::sqrt(p.scale_m * p.scale_n);
}

double SieveTestFunction::value(double m, double n, double c) const {
  return derivative(0, 0, 0, m, n, c);
}

double SieveTestFunction::derivative(int j, int k, int l, double m, double n,
                                     double c) const {
  const double fm = unit_bump(m / scale_m, j) / std::pow(scale_m, j);
  const double fn = unit_bump(n / scale_n, k) / std::pow(scale_n, k);
  const double fc = unit_bump(c / scale_c, l) / std::pow(scale_c, l);
  return fm * fn * fc;
}

SieveTestFunction sieve_test_function(double M, double N, double C) {
  if (M <= 0 || N <= 0 || C <= 0)
    throw std::invalid_argument("sieve_test_function: scales must be positive");
  return {M, N, C};
}

}  // namespace lmw::special
