#include "lmw/modsym.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace lmw::modsym {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr u64 kHeckeIndexCap = 1000000;

// ---- symbol indexing -----------------------------------------------------

struct SymCtx {
  u64 q;
  std::vector<u64> inv; // inverses mod q for 1..q-1

  explicit SymCtx(u64 q_) : q(q_), inv(q_, 0) {
    for (u64 c = 1; c < q; c++) inv[c] = arith::modinv(c, q);
  }

  // index of the projective point (c:d): (1:j) at j, (0:1) at q
  std::size_t index(i64 c, i64 d) const {
    u64 cr = arith::reduce_mod(c, q);
    if (cr == 0) return static_cast<std::size_t>(q);
    u64 dr = arith::reduce_mod(d, q);
    return static_cast<std::size_t>((dr * inv[cr]) % q);
  }
};

// ---- exact dense linear algebra -------------------------------------------

using QMat = std::vector<std::vector<mpq_class>>;
using ZMat = std::vector<std::vector<mpz_class>>;

// In-place reduced row echelon form over mpq; returns the pivot column of
// each pivot row.  Rows at and beyond the returned count are zero.
std::vector<std::size_t> rref(QMat& a) {
  std::vector<std::size_t> pivots;
  if (a.empty() || a[0].empty()) return pivots;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; c++) {
    std::size_t p = kNone;
    for (std::size_t i = r; i < rows; i++)
      if (a[i][c] != 0) {
        p = i;
        break;
      }
    if (p == kNone) continue;
    std::swap(a[r], a[p]);
    mpq_class lead = a[r][c];
    for (std::size_t j = c; j < cols; j++) a[r][j] /= lead;
    for (std::size_t i = 0; i < rows; i++) {
      if (i == r || a[i][c] == 0) continue;
      mpq_class f = a[i][c];
      for (std::size_t j = c; j < cols; j++) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    r++;
  }
  return pivots;
}

void row_submul(std::vector<mpz_class>& x, const std::vector<mpz_class>& y,
                const mpz_class& f) {
  for (std::size_t j = 0; j < x.size(); j++) x[j] -= f * y[j];
}

// Row-style Hermite normal form in place; returns the rank.  Pivots positive,
// entries above a pivot reduced into [0, pivot), zero rows sunk to the
// bottom.  When u is non-null it receives the same unimodular row operations
// starting from the identity, so that u * input = output.
std::size_t hnf_rows(ZMat& a, ZMat* u = nullptr) {
  const std::size_t rows = a.size();
  if (u) {
    u->assign(rows, std::vector<mpz_class>(rows, 0));
    for (std::size_t i = 0; i < rows; i++) (*u)[i][i] = 1;
  }
  if (rows == 0 || a[0].empty()) return 0;
  const std::size_t cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; c++) {
    while (true) {
      std::size_t best = kNone;
      for (std::size_t i = r; i < rows; i++) {
        if (a[i][c] == 0) continue;
        if (best == kNone ||
            mpz_cmpabs(a[i][c].get_mpz_t(), a[best][c].get_mpz_t()) < 0)
          best = i;
      }
      if (best == kNone) break;
      std::swap(a[r], a[best]);
      if (u) std::swap((*u)[r], (*u)[best]);
      bool done = true;
      for (std::size_t i = r + 1; i < rows; i++) {
        if (a[i][c] == 0) continue;
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), a[i][c].get_mpz_t(), a[r][c].get_mpz_t());
        if (f != 0) {
          row_submul(a[i], a[r], f);
          if (u) row_submul((*u)[i], (*u)[r], f);
        }
        if (a[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (a[r][c] == 0) continue;
    if (a[r][c] < 0) {
      for (auto& x : a[r]) x = -x;
      if (u)
        for (auto& x : (*u)[r]) x = -x;
    }
    for (std::size_t i = 0; i < r; i++) {
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), a[i][c].get_mpz_t(), a[r][c].get_mpz_t());
      if (f != 0) {
        row_submul(a[i], a[r], f);
        if (u) row_submul((*u)[i], (*u)[r], f);
      }
    }
    r++;
  }
  return r;
}

// ---- Hecke action on symbol classes ----------------------------------------

// Accumulates w times the continued-fraction pieces of {oo, x/y} into
// per-symbol weights.  Piece k is the symbol (q_k : (-1)^{k-1} q_{k-1}) built
// from the denominators of the convergents; x/y = oo contributes nothing.
void psi_accumulate(const SymCtx& ctx, long long x, long long y, long w,
                    std::vector<long>& wt) {
  if (y == 0) return;
  if (y < 0) {
    x = -x;
    y = -y;
  }
  long long q2 = 1, q1 = 0; // q_{k-2}, q_{k-1}
  int k = 0;
  while (y != 0) {
    long long a = x / y;
    if (x % y < 0) a -= 1;
    long long qk = a * q1 + q2;
    wt[ctx.index(qk, (k % 2 == 0) ? -q1 : q1)] += w;
    long long r = x - a * y;
    x = y;
    y = r;
    q2 = q1;
    q1 = qk;
    k++;
  }
}

std::vector<u64> divisors(u64 n) {
  std::vector<u64> ds{1};
  for (auto [p, e] : arith::factor(n)) {
    std::size_t sz = ds.size();
    u64 pe = 1;
    for (int i = 0; i < e; i++) {
      pe *= p;
      for (std::size_t j = 0; j < sz; j++) ds.push_back(ds[j] * pe);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

// Weights over all symbols of T_n applied to the class of one symbol: the
// degree-n coset representatives [a, b; 0, d] (ad = n, 0 <= b < d, a prime to
// the level) act on the lift, and each image modular symbol is re-expanded
// into unimodular pieces through the convergents of its endpoints.
std::vector<long> hecke_weights(const SymCtx& ctx, std::pair<u64, u64> sym,
                                u64 n) {
  long long g00, g01, g10, g11; // SL2 lift with (c:d) as bottom row
  if (sym.first == 1) {
    g00 = 0;
    g01 = -1;
    g10 = 1;
    g11 = static_cast<long long>(sym.second);
  } else {
    g00 = 1;
    g01 = 0;
    g10 = 0;
    g11 = 1;
  }
  std::vector<long> wt(ctx.q + 1, 0);
  for (u64 a : divisors(n)) {
    if (arith::gcd(a, ctx.q) != 1) continue;
    u64 d = n / a;
    for (u64 b = 0; b < d; b++) {
      long long ma = static_cast<long long>(a), mb = static_cast<long long>(b),
                md = static_cast<long long>(d);
      long long top0 = ma * g00 + mb * g10, top1 = ma * g01 + mb * g11;
      long long bot0 = md * g10, bot1 = md * g11;
      psi_accumulate(ctx, top0, bot0, +1, wt); // image of the oo endpoint
      psi_accumulate(ctx, top1, bot1, -1, wt); // image of the 0 endpoint
    }
  }
  return wt;
}

} // namespace

ManinSymbolSpace build_space(u64 q) {
  if (q < 2 || !arith::is_prime(q))
    throw std::invalid_argument("level must be prime");
  if (q > 99991)
    throw std::invalid_argument("dense symbol space capped at level 99991");
  ManinSymbolSpace s;
  s.level = q;
  SymCtx ctx(q);
  const std::size_t n = static_cast<std::size_t>(q) + 1;
  s.symbols.reserve(n);
  for (u64 j = 0; j < q; j++) s.symbols.emplace_back(1, j);
  s.symbols.emplace_back(0, 1);

  std::vector<std::size_t> actS(n), actT(n), actT2(n);
  s.star.resize(n);
  for (std::size_t i = 0; i < n; i++) {
    i64 c = static_cast<i64>(s.symbols[i].first);
    i64 d = static_cast<i64>(s.symbols[i].second);
    actS[i] = ctx.index(d, -c);
    actT[i] = ctx.index(d, -c - d);
    actT2[i] = ctx.index(-c - d, c);
    s.star[i] = ctx.index(-c, d);
  }

  for (std::size_t i = 0; i < n; i++) {
    if (i <= actS[i]) {
      std::vector<long> row(n, 0);
      row[i] += 1;
      row[actS[i]] += 1;
      s.relation_matrix.push_back(std::move(row));
    }
    if (i <= actT[i] && i <= actT2[i]) {
      std::vector<long> row(n, 0);
      row[i] += 1;
      row[actT[i]] += 1;
      row[actT2[i]] += 1;
      s.relation_matrix.push_back(std::move(row));
    }
  }

  // two-term pairing: x_{iS} = -x_i, and x_i = 0 when S fixes the symbol
  std::vector<std::size_t> rep(n, kNone), varpos(n, kNone);
  std::vector<int> sgn(n, 0);
  std::vector<std::size_t> vars;
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; i++) {
    if (seen[i]) continue;
    std::size_t j = actS[i];
    seen[i] = true;
    if (j == i) continue; // 2x = 0
    seen[j] = true;
    rep[i] = i;
    sgn[i] = 1;
    rep[j] = i;
    sgn[j] = -1;
    varpos[i] = vars.size();
    vars.push_back(i);
  }

  // three-term relations in the paired coordinates, one per T-orbit
  QMat rows;
  for (std::size_t i = 0; i < n; i++) {
    if (i > actT[i] || i > actT2[i]) continue;
    std::vector<mpq_class> row(vars.size(), 0);
    for (std::size_t t : {i, actT[i], actT2[i]}) {
      if (rep[t] == kNone) continue;
      row[varpos[rep[t]]] += sgn[t];
    }
    bool any = false;
    for (const auto& x : row)
      if (x != 0) {
        any = true;
        break;
      }
    if (any) rows.push_back(std::move(row));
  }

  auto pivots = rref(rows);
  std::vector<std::size_t> pivrow(vars.size(), kNone);
  for (std::size_t r = 0; r < pivots.size(); r++) pivrow[pivots[r]] = r;
  std::vector<std::size_t> freepos(vars.size(), kNone);
  for (std::size_t v = 0; v < vars.size(); v++) {
    if (pivrow[v] != kNone) continue;
    freepos[v] = s.basis_symbols.size();
    s.basis_symbols.push_back(vars[v]);
  }
  const std::size_t h = s.basis_symbols.size();

  // coordinates of every symbol class over the free classes
  QMat var_coords(vars.size(), std::vector<mpq_class>(h, 0));
  for (std::size_t v = 0; v < vars.size(); v++) {
    if (pivrow[v] == kNone) {
      var_coords[v][freepos[v]] = 1;
      continue;
    }
    const auto& row = rows[pivrow[v]];
    for (std::size_t w = 0; w < vars.size(); w++) {
      if (freepos[w] == kNone || row[w] == 0) continue;
      var_coords[v][freepos[w]] = -row[w];
    }
  }
  s.symbol_coords.assign(n, std::vector<mpq_class>(h, 0));
  for (std::size_t i = 0; i < n; i++) {
    if (rep[i] == kNone) continue;
    const auto& vc = var_coords[varpos[rep[i]]];
    for (std::size_t k = 0; k < h; k++) s.symbol_coords[i][k] = sgn[i] * vc[k];
  }

  // constraint columns on the quotient: the two cusp components of the
  // boundary, then star minus identity; kernel = cuspidal plus-subspace
  auto cuspcls = [&](u64 x) { return x % q == 0 ? std::size_t{1} : std::size_t{0}; };
  QMat cons(h, std::vector<mpq_class>(2 + h, 0));
  for (std::size_t k = 0; k < h; k++) {
    auto [c, d] = s.symbols[s.basis_symbols[k]];
    cons[k][cuspcls(c)] += 1;
    cons[k][cuspcls(d)] -= 1;
    const auto& st = s.symbol_coords[s.star[s.basis_symbols[k]]];
    for (std::size_t m = 0; m < h; m++) cons[k][2 + m] += st[m];
    cons[k][2 + k] -= 1;
  }
  ZMat consz(h, std::vector<mpz_class>(2 + h));
  for (std::size_t j = 0; j < 2 + h; j++) {
    mpz_class l = 1;
    for (std::size_t k = 0; k < h; k++)
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), cons[k][j].get_den_mpz_t());
    for (std::size_t k = 0; k < h; k++) {
      mpq_class v = cons[k][j] * l;
      consz[k][j] = v.get_num();
    }
  }

  // image lattice of the integral symbols in quotient coordinates, scaled by
  // the common denominator (a uniform scale does not change Hecke matrices)
  mpz_class den = 1;
  for (std::size_t i = 0; i < n; i++)
    for (std::size_t k = 0; k < h; k++)
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(),
              s.symbol_coords[i][k].get_den_mpz_t());
  ZMat latt(n, std::vector<mpz_class>(h));
  for (std::size_t i = 0; i < n; i++)
    for (std::size_t k = 0; k < h; k++) {
      mpq_class v = s.symbol_coords[i][k] * den;
      latt[i][k] = v.get_num();
    }
  if (hnf_rows(latt) != h)
    throw std::logic_error("symbol image lattice has unexpected rank");
  latt.resize(h);

  // saturated solutions of t * latt * consz = 0: the transform rows sent to
  // zero form an integral basis of the kernel within the image lattice
  ZMat omega(h, std::vector<mpz_class>(2 + h, 0));
  for (std::size_t i = 0; i < h; i++)
    for (std::size_t k = 0; k < h; k++) {
      if (latt[i][k] == 0) continue;
      for (std::size_t j = 0; j < 2 + h; j++)
        omega[i][j] += latt[i][k] * consz[k][j];
    }
  ZMat trans;
  std::size_t orank = hnf_rows(omega, &trans);
  ZMat plus;
  for (std::size_t i = orank; i < h; i++) {
    std::vector<mpz_class> v(h, 0);
    for (std::size_t k = 0; k < h; k++) {
      if (trans[i][k] == 0) continue;
      for (std::size_t m = 0; m < h; m++) v[m] += trans[i][k] * latt[k][m];
    }
    plus.push_back(std::move(v));
  }
  std::size_t prank = hnf_rows(plus);
  if (prank != plus.size())
    throw std::logic_error("plus-subspace basis is not independent");
  s.plus_basis = std::move(plus);
  return s;
}

std::size_t cuspidal_plus_dimension(const ManinSymbolSpace& space) {
  return space.plus_basis.size();
}

std::vector<std::vector<long long>> hecke_matrix(const ManinSymbolSpace& s,
                                                 u64 n) {
  if (n == 0) throw std::invalid_argument("hecke index must be positive");
  const u64 q = s.level;
  if (n != q && arith::gcd(n, q) != 1)
    throw std::invalid_argument(
        "hecke index must be prime to the level or equal to it");
  if (n > kHeckeIndexCap)
    throw std::invalid_argument("hecke index exceeds the supported bound");
  const std::size_t g = s.plus_basis.size();
  if (g == 0) return {};
  const std::size_t h = s.basis_symbols.size();
  SymCtx ctx(q);

  // images of the basis classes under T_n, in quotient coordinates
  QMat act(h, std::vector<mpq_class>(h, 0));
  for (std::size_t k = 0; k < h; k++) {
    auto wt = hecke_weights(ctx, s.symbols[s.basis_symbols[k]], n);
    for (std::size_t i = 0; i <= q; i++) {
      if (wt[i] == 0) continue;
      for (std::size_t m = 0; m < h; m++)
        act[k][m] += wt[i] * s.symbol_coords[i][m];
    }
  }

  // restrict to the plus lattice: solve X * plus_basis = plus_basis * act by
  // reducing the transposed augmented system
  QMat sys(h, std::vector<mpq_class>(2 * g, 0));
  for (std::size_t i = 0; i < g; i++) {
    for (std::size_t k = 0; k < h; k++) sys[k][i] = mpq_class(s.plus_basis[i][k]);
    std::vector<mpq_class> img(h, 0);
    for (std::size_t k = 0; k < h; k++) {
      if (s.plus_basis[i][k] == 0) continue;
      mpq_class f(s.plus_basis[i][k]);
      for (std::size_t m = 0; m < h; m++) img[m] += f * act[k][m];
    }
    for (std::size_t m = 0; m < h; m++) sys[m][g + i] = img[m];
  }
  auto piv = rref(sys);
  if (piv.size() != g)
    throw std::logic_error("plus-subspace basis lost rank");
  for (std::size_t r = 0; r < g; r++)
    if (piv[r] != r) throw std::logic_error("hecke image left the plus subspace");
  for (std::size_t k = g; k < h; k++)
    for (std::size_t j = 0; j < 2 * g; j++)
      if (sys[k][j] != 0)
        throw std::logic_error("hecke image left the plus subspace");

  std::vector<std::vector<long long>> out(g, std::vector<long long>(g, 0));
  for (std::size_t i = 0; i < g; i++)
    for (std::size_t j = 0; j < g; j++) {
      const mpq_class& v = sys[j][g + i];
      if (v.get_den() != 1)
        throw std::logic_error("hecke matrix not integral on the plus lattice");
      if (!v.get_num().fits_slong_p())
        throw std::overflow_error("hecke matrix entry exceeds long");
      out[i][j] = v.get_num().get_si();
    }
  return out;
}

EigenSystem eigensystem(u64 q, u64 n_max) {
  return eigensystem(build_space(q), n_max);
}

EigenSystem eigensystem(const ManinSymbolSpace& s, u64 n_max) {
  const u64 q = s.level;
  if (q < 11) throw std::invalid_argument("no cusp forms below level 11");
  if (n_max < 2) throw std::invalid_argument("n_max must be at least 2");
  const std::size_t g = s.plus_basis.size();
  const std::size_t h = s.basis_symbols.size();
  const std::size_t n = static_cast<std::size_t>(q) + 1;
  if (g == 0) throw std::logic_error("empty plus subspace at prime level >= 11");

  SymCtx ctx(q);
  Eigen::MatrixXd pd(n, h), bd(g, h);
  for (std::size_t i = 0; i < n; i++)
    for (std::size_t k = 0; k < h; k++) pd(i, k) = s.symbol_coords[i][k].get_d();
  for (std::size_t i = 0; i < g; i++)
    for (std::size_t k = 0; k < h; k++) bd(i, k) = s.plus_basis[i][k].get_d();
  Eigen::MatrixXd bpinv =
      bd.transpose() * (bd * bd.transpose()).inverse(); // bd * bpinv = id

  // exact anchors at three small primes away from q, unitary normalization
  std::vector<Eigen::MatrixXd> anchors;
  for (u64 p : {2, 3, 5, 7}) {
    if (p == q || anchors.size() == 3) continue;
    auto m = hecke_matrix(s, p);
    Eigen::MatrixXd md(g, g);
    for (std::size_t i = 0; i < g; i++)
      for (std::size_t j = 0; j < g; j++)
        md(i, j) = static_cast<double>(m[i][j]);
    anchors.push_back(md / std::sqrt(static_cast<double>(p)));
  }

  // split the commuting family with a random combination; retry on failure
  Eigen::MatrixXd evec(g, g), dual(g, g);
  std::mt19937_64 rng(0x6d73796d);
  std::string fail = "no attempt";
  bool ok = false;
  for (int attempt = 0; attempt < 3 && !ok; attempt++) {
    Eigen::MatrixXd comb = Eigen::MatrixXd::Zero(g, g);
    for (const auto& md : anchors)
      comb += (1.0 + std::ldexp(static_cast<double>(rng() >> 11), -53)) * md;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comb);
    if (es.info() != Eigen::Success) {
      fail = "eigensolver did not converge";
      continue;
    }
    double scale = comb.norm() + 1.0;
    if (es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-10 * scale ||
        es.eigenvectors().imag().cwiseAbs().maxCoeff() > 1e-10) {
      fail = "complex eigenpairs";
      continue;
    }
    double mingap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g; i++)
      for (std::size_t j = i + 1; j < g; j++)
        mingap = std::min(mingap, std::fabs(es.eigenvalues().real()[i] -
                                            es.eigenvalues().real()[j]));
    if (g > 1 && mingap < 1e-7 * scale) {
      fail = "eigenvalues too close";
      continue;
    }
    evec = es.eigenvectors().real();
    dual = evec.inverse();
    double offdiag = 0.0;
    for (const auto& md : anchors) {
      Eigen::MatrixXd dm = dual * md * evec;
      for (std::size_t i = 0; i < g; i++)
        for (std::size_t j = 0; j < g; j++)
          if (i != j) offdiag = std::max(offdiag, std::fabs(dm(i, j)));
    }
    if (offdiag > 1e-8) {
      fail = "family not simultaneously diagonal";
      continue;
    }
    ok = true;
  }
  if (!ok) throw std::runtime_error("eigenvalue separation failed: " + fail);

  // unitary eigenvalues at every prime up to n_max by numeric Hecke action
  std::vector<u64> primes = arith::primes_up_to(n_max);
  std::vector<std::size_t> pidx(n_max + 1, kNone);
  for (std::size_t i = 0; i < primes.size(); i++) pidx[primes[i]] = i;
  std::vector<std::vector<double>> ap(g, std::vector<double>(primes.size(), 0.0));
#pragma omp parallel for schedule(dynamic)
  for (std::size_t pi = 0; pi < primes.size(); pi++) {
    u64 p = primes[pi];
    if (p == q) continue; // exact treatment below
    Eigen::MatrixXd act = Eigen::MatrixXd::Zero(h, h);
    for (std::size_t k = 0; k < h; k++) {
      auto wt = hecke_weights(ctx, s.symbols[s.basis_symbols[k]], p);
      for (std::size_t i = 0; i < n; i++)
        if (wt[i] != 0) act.row(k) += static_cast<double>(wt[i]) * pd.row(i);
    }
    Eigen::MatrixXd dm = dual * (bd * act * bpinv) * evec;
    double r = 1.0 / std::sqrt(static_cast<double>(p));
    for (std::size_t j = 0; j < g; j++) ap[j][pi] = dm(j, j) * r;
  }

  // the level-index operator acts by +-1; snap and keep the drift
  auto mq = hecke_matrix(s, q);
  Eigen::MatrixXd mqd(g, g);
  for (std::size_t i = 0; i < g; i++)
    for (std::size_t j = 0; j < g; j++)
      mqd(i, j) = static_cast<double>(mq[i][j]);
  Eigen::MatrixXd dq = dual * mqd * evec;

  EigenSystem sys;
  sys.level = q;
  sys.n_max = n_max;
  sys.forms.resize(g);

  std::vector<u64> spf(n_max + 1, 0);
  for (u64 m = 2; m <= n_max; m++)
    if (spf[m] == 0)
      for (u64 k = m; k <= n_max; k += m)
        if (spf[k] == 0) spf[k] = m;

  double maxdev = 0.0;
  for (std::size_t j = 0; j < g; j++) {
    auto& f = sys.forms[j];
    double tq = dq(j, j);
    int sign = tq >= 0 ? 1 : -1;
    f.lambda_q = sign / std::sqrt(static_cast<double>(q));
    f.lambda_q_deviation = std::fabs(tq - sign);
    maxdev = std::max(maxdev, f.lambda_q_deviation);
    f.lambda.assign(n_max + 1, 0.0);
    f.lambda[1] = 1.0;
    for (u64 m = 2; m <= n_max; m++) {
      u64 p = spf[m];
      u64 pe = p, rest = m / p;
      while (rest % p == 0) {
        pe *= p;
        rest /= p;
      }
      double val;
      if (rest > 1) {
        val = f.lambda[pe] * f.lambda[rest];
      } else if (m == p) {
        val = (p == q) ? f.lambda_q : ap[j][pidx[p]];
      } else if (p == q) {
        val = f.lambda[m / q] * f.lambda_q;
      } else {
        val = f.lambda[m / p] * f.lambda[p] - f.lambda[m / (p * p)];
      }
      f.lambda[m] = val;
    }
  }

  // deterministic order: lexicographic in the rounded prime eigenvalues
  std::vector<std::size_t> order(g);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    for (u64 p : primes) {
      double a = std::round(sys.forms[x].lambda[p] * 1e6);
      double b = std::round(sys.forms[y].lambda[p] * 1e6);
      if (a != b) return a < b;
    }
    return false;
  });
  std::vector<FormEigenvalues> sorted;
  sorted.reserve(g);
  for (std::size_t j : order) sorted.push_back(std::move(sys.forms[j]));
  sys.forms = std::move(sorted);

  // validation: Hecke relations and the Ramanujan bound
  double maxres = 0.0;
  const u64 lim = std::min<u64>(n_max, 1000);
  for (const auto& f : sys.forms) {
    for (u64 m = 1; m <= lim; m++)
      for (u64 nn = 1; nn * m <= lim; nn++) {
        u64 gg = arith::gcd(m, nn);
        double rhs = 0.0;
        for (u64 d = 1; d <= gg; d++) {
          if (gg % d != 0 || d % q == 0) continue;
          rhs += f.lambda[(m * nn) / (d * d)];
        }
        maxres = std::max(maxres, std::fabs(f.lambda[m] * f.lambda[nn] - rhs));
      }
    for (u64 nn = 1; nn <= n_max; nn++) {
      if (nn % q == 0) continue;
      if (std::fabs(f.lambda[nn]) >
          static_cast<double>(arith::divisor_tau(nn)) + 1e-6)
        throw std::runtime_error("eigenvalues violate the Ramanujan bound");
    }
  }
  if (maxres > 1e-8)
    throw std::runtime_error("hecke relation residual above 1e-8");
  sys.precision = std::max(maxres, maxdev);
  return sys;
}

} // namespace lmw::modsym
