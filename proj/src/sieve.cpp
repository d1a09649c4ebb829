#include "lmw/sieve.hpp"

#include <fftw3.h>
#include <omp.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lmw/arith.hpp"
#include "lmw/kloosterman_engine.hpp"
#include "lmw/parallel.hpp"

namespace lmw::sieve {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kTheta = 7.0 / 64.0;

// In-place DFT with the positive-exponent convention
// out[t] = sum_j in[j] e^{+2 pi i j t / L}.
void dft_pos(std::vector<cplx>& v) {
  // std::complex<double> is layout-compatible with fftw_complex; transform
  // in place.  FFTW_ESTIMATE planning leaves the buffer untouched.
  auto* buf = reinterpret_cast<fftw_complex*>(v.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(arith::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(v.size()), buf, buf,
                            FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lk(arith::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
}

void validate(const SieveInstance& inst) {
  if (inst.r < 1 || inst.s < 1 || inst.d < 1)
    throw std::invalid_argument("r, s, d must be positive");
  if (arith::mobius(inst.r) == 0 || arith::mobius(inst.s) == 0)
    throw std::invalid_argument("r and s must be squarefree");
  if (arith::gcd(inst.r, inst.s) != 1 || arith::gcd(inst.r, inst.d) != 1 ||
      arith::gcd(inst.s, inst.d) != 1)
    throw std::invalid_argument("r, s, d must be pairwise coprime");
  if (!(inst.M > 0.0) || !(inst.N > 0.0) || !(inst.C > 0.0))
    throw std::invalid_argument("M, N, C must be positive");
  if (inst.sign != 1 && inst.sign != -1)
    throw std::invalid_argument("sign must be +-1");
  if (inst.a.size() != block_length(inst.M) ||
      inst.b.size() != block_length(inst.N))
    throw std::invalid_argument("sequence does not fill its dyadic block");
  if (inst.g.scale_m != inst.M || inst.g.scale_n != inst.N ||
      inst.g.scale_c != inst.C)
    throw std::invalid_argument("test-function scales disagree with the blocks");
}

// Finite-difference probe of the derivative bounds |d_m g| <= 1/M,
// |d_n g| <= 1/N, |d_c g| <= 1/C on a coarse interior grid.
void check_test_function(const special::SieveTestFunction& g) {
  const double pts[3] = {1.2, 1.5, 1.8};
  auto probe = [&](double m, double n, double c) {
    const double hm = 1e-6 * g.scale_m, hn = 1e-6 * g.scale_n,
                 hc = 1e-6 * g.scale_c;
    double dm = (g.value(m + hm, n, c) - g.value(m - hm, n, c)) / (2.0 * hm);
    double dn = (g.value(m, n + hn, c) - g.value(m, n - hn, c)) / (2.0 * hn);
    double dc = (g.value(m, n, c + hc) - g.value(m, n, c - hc)) / (2.0 * hc);
    if (std::fabs(dm) > 1.0001 / g.scale_m ||
        std::fabs(dn) > 1.0001 / g.scale_n ||
        std::fabs(dc) > 1.0001 / g.scale_c)
      throw std::logic_error("test function violates its derivative bounds");
  };
  for (double um : pts)
    for (double un : pts)
      for (double uc : pts)
        probe(um * g.scale_m, un * g.scale_n, uc * g.scale_c);
}

}  // namespace

u64 block_length(double X) {
  return static_cast<u64>(std::floor(2.0 * X)) -
         static_cast<u64>(std::floor(X));
}

SieveInstance make_instance(u64 r, u64 s, u64 d, double M, double N, double C,
                            int sign) {
  SieveInstance inst;
  inst.r = r;
  inst.s = s;
  inst.d = d;
  inst.M = M;
  inst.N = N;
  inst.C = C;
  inst.sign = sign;
  inst.g = special::sieve_test_function(M, N, C);
  inst.a.assign(block_length(M), cplx(0.0, 0.0));
  inst.b.assign(block_length(N), cplx(0.0, 0.0));
  validate(inst);
  return inst;
}

double dyadic_ratio(const SieveInstance& inst) {
  return std::sqrt(double(inst.d) * inst.M * inst.N) /
         (double(inst.s) * inst.C * std::sqrt(double(inst.r)));
}

cplx trilinear_sum(const SieveInstance& inst) {
  validate(inst);
  const u64 m0 = static_cast<u64>(std::floor(inst.M)) + 1;
  const u64 n0 = static_cast<u64>(std::floor(inst.N)) + 1;
  const u64 c0 = static_cast<u64>(std::floor(inst.C)) + 1;
  const u64 c1 = static_cast<u64>(std::floor(2.0 * inst.C));

  // Bump-weighted sequences; the weight factors as
  // g(m,n,c) = B(m/M) B(n/N) B(c/C).
  std::vector<cplx> wa(inst.a.size()), wb(inst.b.size());
  for (std::size_t k = 0; k < inst.a.size(); k++)
    wa[k] = inst.a[k] * special::unit_bump(double(m0 + k) / inst.M);
  for (std::size_t k = 0; k < inst.b.size(); k++)
    wb[k] = inst.b[k] * special::unit_bump(double(n0 + k) / inst.N);

  if (double(inst.s) * double(c1) >= 2147483648.0)
    throw std::invalid_argument("modulus s*c exceeds the DFT range");

  std::vector<u64> cs;
  for (u64 c = c0; c <= c1; c++)
    if (arith::gcd(c, inst.r) == 1) cs.push_back(c);

  std::vector<cplx> vals(cs.size(), cplx(0.0, 0.0));
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < cs.size(); i++) {
    const u64 c = cs[i];
    const u64 L = inst.s * c;
    std::vector<cplx> fa(L, cplx(0.0, 0.0)), fb(L, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < wa.size(); k++) fa[(m0 + k) % L] += wa[k];
    for (std::size_t k = 0; k < wb.size(); k++) fb[(n0 + k) % L] += wb[k];
    dft_pos(fa);
    dft_pos(fb);

    // S(d m rbar, +-n; L) opened over the units of L: the m-sum is
    // fa at d rbar x, the n-sum is fb at +-xbar.
    const u64 dr =
        L == 1 ? 0 : (inst.d % L) * arith::modinv(inst.r % L, L) % L;
    std::vector<u64> units, invs;
    arith::units_and_inverses(L, units, invs);
    Kahan re, im;
    for (std::size_t u = 0; u < units.size(); u++) {
      u64 ia = dr * units[u] % L;
      u64 ib = inst.sign > 0 ? invs[u] : (L - invs[u]) % L;
      cplx t = fa[ia] * fb[ib];
      re.add(t.real());
      im.add(t.imag());
    }
    vals[i] = special::unit_bump(double(c) / inst.C) * cplx(re.value(), im.value());
  }

  Kahan re, im;
  for (const cplx& v : vals) {
    re.add(v.real());
    im.add(v.imag());
  }
  return {re.value(), im.value()};
}

double ls_bound_rhs(const SieveInstance& inst, double theta) {
  validate(inst);
  if (!(theta >= 0.0 && theta <= 0.25))
    throw std::invalid_argument("theta must lie in [0, 1/4]");
  double x = dyadic_ratio(inst);
  double na = 0.0, nb = 0.0;
  for (const cplx& v : inst.a) na += std::norm(v);
  for (const cplx& v : inst.b) nb += std::norm(v);
  double rs = double(inst.r) * double(inst.s);
  return std::pow(double(inst.d), theta) * double(inst.s) * inst.C *
         std::sqrt(double(inst.r)) * std::pow(1.0 + 1.0 / x, 2.0 * theta) /
         (1.0 + x) * (1.0 + x + std::sqrt(inst.M / rs)) *
         (1.0 + x + std::sqrt(inst.N / rs)) * std::sqrt(na) * std::sqrt(nb);
}

RatioStats ratio_experiment(u64 trials, double size, u64 seed,
                            const ExperimentOptions& opt) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (!(size >= 1.0)) throw std::invalid_argument("size must be >= 1");

  check_test_function(special::sieve_test_function(size, size, size));

  // All draws happen here, in a fixed order, before any parallel work.
  std::mt19937_64 rng(seed);
  auto draw_entry = [&]() -> cplx {
    if (opt.complex_phases) {
      double u = double(rng()) * 0x1p-64;
      return {std::cos(kTwoPi * u), std::sin(kTwoPi * u)};
    }
    return {(rng() & 1) ? 1.0 : -1.0, 0.0};
  };
  std::vector<SieveInstance> insts;
  insts.reserve(trials);
  for (u64 t = 0; t < trials; t++) {
    u64 r, s, d;
    do r = 1 + rng() % opt.r_range;
    while (arith::mobius(r) == 0);
    do s = 1 + rng() % opt.s_range;
    while (arith::mobius(s) == 0 || arith::gcd(s, r) != 1);
    do d = 1 + rng() % opt.d_range;
    while (arith::gcd(d, r * s) != 1);
    int sign = (rng() & 1) ? 1 : -1;
    auto inst = make_instance(r, s, d, size, size, size, sign);
    for (auto& v : inst.a) v = draw_entry();
    for (auto& v : inst.b) v = draw_entry();
    insts.push_back(std::move(inst));
  }

  RatioStats st;
  st.trials.resize(trials);
#pragma omp parallel for schedule(dynamic)
  for (u64 t = 0; t < trials; t++) {
    auto& row = st.trials[t];
    const auto& inst = insts[t];
    row.r = inst.r;
    row.s = inst.s;
    row.d = inst.d;
    row.sign = inst.sign;
    row.lhs = std::abs(trilinear_sum(inst));
    row.rhs = ls_bound_rhs(inst, kTheta);
    row.ratio = row.lhs / row.rhs;
  }

  Kahan mean;
  for (const auto& row : st.trials) {
    st.max_ratio = std::max(st.max_ratio, row.ratio);
    mean.add(row.ratio);
  }
  st.mean_ratio = mean.value() / double(trials);
  return st;
}

std::string ratio_csv(const RatioStats& st) {
  std::ostringstream out;
  out.precision(12);
  out << "trial,r,s,d,sign,lhs,rhs,ratio\n";
  for (std::size_t t = 0; t < st.trials.size(); t++) {
    const auto& row = st.trials[t];
    out << t << ',' << row.r << ',' << row.s << ',' << row.d << ','
        << row.sign << ',' << row.lhs << ',' << row.rhs << ',' << row.ratio
        << '\n';
  }
  return out.str();
}

}  // namespace lmw::sieve
