#pragma once
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "lmw/modsym.hpp"

// Second-moment amplifier: per-form coefficients supported on the primes
// p <= sqrt(L) coprime to the level (value lambda_f(p)) and on their
// squares (value -1).  The Hecke relation lambda(p)^2 - lambda(p^2) = 1
// collapses the amplified sum to the number of admissible primes, which is
// the returned value; the defining coefficient sum stays available as a
// regression probe of the eigenvalue data.

namespace lmw::amplifier {

using arith::u64;

struct AmplifierCoefficients {
  u64 level = 0;
  double length = 0.0;            // L
  std::map<u64, double> entries;  // l -> c_l, nonzero entries only
};

// Coefficients for one form.  Requires L >= 4 and an eigenvalue table
// reaching the largest admissible prime <= sqrt(L).
AmplifierCoefficients build_amplifier(const modsym::EigenSystem& es,
                                      std::size_t form, double L);

double l1_norm(const AmplifierCoefficients& c);
double l2_norm_sq(const AmplifierCoefficients& c);

// Lambda_f(c) through the Hecke collapse: the number of primes p <= sqrt(L)
// not dividing the level.  Exact and form-independent.
double amplified_value(const modsym::EigenSystem& es, std::size_t form,
                       const AmplifierCoefficients& c);

// The defining sum sum_l c_l lambda_f(l); needs the eigenvalue table
// through the largest p^2 <= L.  Agrees with amplified_value up to
// eigenvalue precision.
double amplified_value_direct(const modsym::EigenSystem& es, std::size_t form,
                              const AmplifierCoefficients& c);

struct AmplifiedForm {
  double amplifier = 0.0;        // Lambda_f(c)
  double central = 0.0;          // L(f, 1/2)
  double weight = 0.0;           // omega_f
  double term = 0.0;             // omega Lambda^2 L(f,1/2)^4
  double extracted_bound = 0.0;  // (total / (omega Lambda^2))^{1/4}
  double subconv_ratio = 0.0;    // extracted_bound / q^{1/4 - 25/3136}
  double weight_ratio = 0.0;     // omega q / log q
};

struct AmplifiedMoment {
  u64 level = 0;
  double length = 0.0;
  double total = 0.0;  // sum of the per-form terms
  std::vector<AmplifiedForm> forms;
};

// Per-form amplified fourth-moment table at amplifier length L; es must
// carry fitted weights.  Dropping all but one nonnegative term bounds each
// central value by (total / (omega Lambda^2))^{1/4}; the ratio against
// q^{1/4 - 25/3136} is a desk diagnostic, not an asserted bound, and is
// reported as +inf when L admits no primes at all.
AmplifiedMoment amplified_moment(const modsym::EigenSystem& es, double L);

// CSV lines form,amplifier,central,weight,term,extracted_bound,
// subconv_ratio,weight_ratio.
std::string amplified_csv(const AmplifiedMoment& rep);

}  // namespace lmw::amplifier
