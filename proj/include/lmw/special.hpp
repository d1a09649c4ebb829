#pragma once

// Bessel kernels J0, J1, Y0 and the smooth compactly supported weights the
// trace-formula and sieve sums are cut off by.  Power series below a fixed
// crossover, Hankel asymptotics above; all pure functions.

namespace lmw::special {

// Order-1 Bessel J.  x >= 0 and finite; absolute error <= 1e-12.
double bessel_j1(double x);

// Order-0 Bessel J.  x >= 0 and finite; absolute error <= 1e-12.
double bessel_j0(double x);

// Order-0 Bessel Y.  x > 0 and finite; absolute error <= 1e-10.
double bessel_y0(double x);

namespace detail {
// Raw evaluators, exposed so the overlap window can be tested directly.
// The series are accurate (in long double) far past the crossover; the
// asymptotics carry a truncation floor ~ e^{-2x}, so agreement tightens
// as x grows: ~1e-8 near x = 8, below 1e-12 past x = 14.
double j1_series(double x);
double j1_asymptotic(double x);
double j0_series(double x);
double j0_asymptotic(double x);
double y0_series(double x);
double y0_asymptotic(double x);
// series/asymptotic switch point shared by all three functions
inline constexpr double kCrossover = 14.0;
}  // namespace detail

// C2 plateau bump: 0 outside (1/2, 3), rises on [1/2,1] by quintic
// smoothstep, 1 on [1,2], falls on [2,3].  deriv in {0,1,2}.
double plateau_bump(double u, int deriv = 0);

// C2 bump supported on [1,2]: rise [1,4/3], plateau, fall [5/3,2], scaled
// by 1/(30*sqrt(3)) (the exact sup of the raw second derivative) so that
// sup |B2^(j)| <= 1 for j = 0,1,2.  deriv in {0,1,2}.
double unit_bump(double u, int deriv = 0);

// Separable weight F_{M,N}(x,y) = (MN)^{-1/2} B(x/M) B(y/N) with B the
// plateau bump; supported on [M/2,3M]x[N/2,3N], |F| <= (MN)^{-1/2}.
struct CutoffProfile {
  double scale_m, scale_n;
};

double cutoff_eval(const CutoffProfile& p, double x, double y);

// g(m,n,c) = B2(m/M) B2(n/N) B2(c/C); mixed partials of order (j,k,l),
// each <= 2, are bounded by M^{-j} N^{-k} C^{-l}.
struct SieveTestFunction {
  double scale_m, scale_n, scale_c;
  double value(double m, double n, double c) const;
  double derivative(int j, int k, int l, double m, double n, double c) const;
};

SieveTestFunction sieve_test_function(double M, double N, double C);

}  // namespace lmw::special
