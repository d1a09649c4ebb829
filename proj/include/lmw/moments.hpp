#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "lmw/modsym.hpp"

// Twisted fourth moment of central L-values across one level,
//
//   M(l) = sum_f omega_f lambda_f(l) L(f, 1/2)^4,
//
// in the harmonic normalization (omega_f the fitted trace-formula weights)
// and in the plain mean over the g forms.  The degree-6 main-term
// polynomial of the leading asymptotic is deliberately a caller-supplied
// plug-in: only its leading coefficient 1/(60 pi^2) is known here, and the
// sweep is a diagnostic table, not a convergence claim, at reachable q.

namespace lmw::moments {

using arith::u64;

struct PerForm {
  double lambda_l = 0.0;  // twist eigenvalue lambda_f(l)
  double central = 0.0;   // L(f, 1/2)
  double weight = 0.0;    // harmonic weight omega_f
};

struct MomentReport {
  u64 level = 0;
  u64 twist = 1;
  double harmonic_value = 0.0;  // sum_f omega_f lambda_f(l) L^4
  double natural_value = 0.0;   // (1/g) sum_f lambda_f(l) L^4
  std::vector<PerForm> per_form;
  std::size_t truncation_length = 0;  // longest central-value series used
  double lvalue_est_error = 0.0;      // largest per-form series error bound
};

// One pass over the forms feeds both averages.  es must carry fitted
// weights (every form weight positive); rejects l = 0 and l >= level, and
// l beyond the eigenvalue table.
MomentReport fourth_moment(const modsym::EigenSystem& es, u64 l);

struct SweepRow {
  u64 level = 0;
  u64 twist = 0;
  u64 genus = 0;
  bool ok = false;
  std::string error;       // failure note when !ok
  MomentReport report;     // valid when ok
  double main_term = 0.0;  // P(log q) when a polynomial was supplied
  double residual = 0.0;   // harmonic_value - P(log q)
};

struct SweepOptions {
  u64 n_max = 600;               // eigenvalue table depth per level
  std::size_t n_eq = 8;          // trace-formula equations for the weights
  u64 c_max = 400000;            // Kloosterman cap for the weight fit
  double residual_limit = 1e-3;  // fit floor at that cap is ~1e-4
};

// Per-level pipeline (eigensystem, weight fit, moment) over q_range;
// poly[k] multiplies (log q)^k, empty means no main-term column.  A level
// that fails records its error in the row without stopping the sweep.
std::vector<SweepRow> moment_sweep(const std::vector<u64>& q_range, u64 l,
                                   const std::vector<double>& poly = {},
                                   const SweepOptions& opt = {});

// Degree-6 polynomial carrying only the known leading coefficient.
std::vector<double> leading_main_term();

// CSV lines q,l,g,harmonic,natural[,main_term,residual]; failed levels
// become comment lines.
std::string sweep_csv(const std::vector<SweepRow>& rows, bool with_main_term);

}  // namespace lmw::moments
