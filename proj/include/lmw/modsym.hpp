#pragma once
#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "lmw/arith.hpp"

// Weight-2 modular symbols for the Hecke congruence group of prime level q,
// in Manin-symbol form.  The q+1 symbols are the points (c:d) of the
// projective line over F_q; the symbol relations x + xS = 0 and
// x + xT + xT^2 = 0 (S = [0,-1;1,0], T = [0,-1;1,-1]) cut the space down to
// the relative homology of the level-q modular curve, of rank 2g+1.  The
// kernel of the boundary map intersected with the +1 eigenspace of the star
// involution carries one line per newform; all reductions are exact (mpq/mpz)
// so the restricted Hecke operators come out as genuine integer matrices on a
// saturated lattice.

namespace lmw::modsym {

using u64 = lmw::arith::u64;
using i64 = lmw::arith::i64;

struct ManinSymbolSpace {
  u64 level = 0;                                  // prime q
  std::vector<std::pair<u64, u64>> symbols;       // (1:j) for j < q, then (0:1)
  std::vector<std::vector<long>> relation_matrix; // deduplicated 2- and 3-term rows
  std::vector<std::size_t> star;                  // involution (c:d) -> (-c:d)

  // Quotient by the relations: classes of the symbols listed in
  // basis_symbols form a basis, and symbol_coords[i] gives the class of
  // symbol i in that basis.
  std::vector<std::size_t> basis_symbols;
  std::vector<std::vector<mpq_class>> symbol_coords;

  // Rows: an integral basis of (cuspidal plus-subspace) intersected with the
  // image lattice of the symbols, in basis_symbols coordinates.  Hecke
  // operators restricted here have integer matrices.
  std::vector<std::vector<mpz_class>> plus_basis;
};

// Builds the full presentation.  Throws on composite q.  For q in
// {2, 3, 5, 7} the space is built but its cuspidal plus-subspace is empty.
ManinSymbolSpace build_space(u64 q);

// Dimension of the cuspidal plus-subspace; equals the genus of the level-q
// modular curve, and the number of newforms.
std::size_t cuspidal_plus_dimension(const ManinSymbolSpace& space);

// Matrix of the n-th Hecke operator on the cuspidal plus-subspace, in the
// plus_basis lattice basis.  Requires gcd(n, q) = 1 or n = q; rejects n = 0.
// Eigenvalues are the classical a_f(n) (so a_f(n) = lambda_f(n) sqrt(n)).
std::vector<std::vector<long long>> hecke_matrix(const ManinSymbolSpace& space,
                                                 u64 n);

struct FormEigenvalues {
  // lambda[n] for 1 <= n <= n_max in the unitary normalization
  // lambda(n) = a(n)/sqrt(n); lambda[0] = 0 is a placeholder.
  std::vector<double> lambda;
  double lambda_q = 0.0;           // +-q^{-1/2}, sign from the U_q action
  double lambda_q_deviation = 0.0; // |U_q pairing| drift from 1 before snapping
  int epsilon = 0;                 // functional-equation sign; 0 until computed
  double weight = 0.0;             // harmonic weight; 0 until computed
};

struct EigenSystem {
  u64 level = 0;
  std::vector<FormEigenvalues> forms;
  u64 n_max = 0;
  double precision = 0.0; // largest validated Hecke-relation residual
};

// Simultaneously diagonalizes the Hecke action on the cuspidal plus-subspace
// and returns every eigenvalue system at level q, eigenvalues extended to all
// n <= n_max by the Hecke recursions.  Forms are ordered lexicographically by
// (lambda(2), lambda(3), lambda(5), ...) rounded to 1e-6.  Throws if q is not
// a prime >= 11, if n_max < 2, or if eigenvalue separation / Hecke-relation
// validation fails at 1e-8.
EigenSystem eigensystem(u64 q, u64 n_max);
EigenSystem eigensystem(const ManinSymbolSpace& space, u64 n_max);

} // namespace lmw::modsym
