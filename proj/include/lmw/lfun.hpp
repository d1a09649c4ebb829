#pragma once
#include <cstddef>

#include "lmw/modsym.hpp"

// Central L-values from an eigensystem via the approximate functional
// equation.  With
//
//   S(A) = sum_{n>=1} lambda(n) n^{-1/2} exp(-2 pi n A / sqrt(q)),
//
// the completed L-function's contour shift gives, for every A > 0,
//
//   L(f, 1/2) = S(A) + eps_f S(1/A),
//
// where eps_f is the functional-equation sign.  The sign is determined
// empirically as the choice making the right-hand side independent of A;
// it is not read off any symbol of the eigensystem, so the known relation
// to the sign of lambda(q) stays available as a cross-check.

namespace lmw::lfun {

using modsym::EigenSystem;

struct CentralValue {
  std::size_t form_index = 0;
  int epsilon = 0;                    // +1 or -1
  double value = 0.0;                 // L(f, 1/2); exactly 0 when epsilon = -1
  std::size_t truncation_length = 0;  // terms kept in each smoothed sum
  double est_error = 0.0;             // tail majorant bound on |value| error
};

// Smoothed Dirichlet sum S(A), truncated once the Deligne-bound tail
// majorant drops below 1e-10.  Throws std::invalid_argument when the
// eigensystem's n_max cannot reach that tolerance at this A.
double afe_sum(const EigenSystem& es, std::size_t form, double A);

// Functional-equation sign by A-consistency: screen on {0.8, 1.25}, then
// validate (or re-decide) on {0.5, 0.8, 1.25, 2.0}.  Throws
// std::runtime_error when no unique sign is consistent, e.g. when S is
// degenerate in A.
int root_number(const EigenSystem& es, std::size_t form);

// L(f, 1/2) = S(A) + eps S(1/A), evaluated at A = 1.  Odd forms return
// exactly zero.
CentralValue central_value(const EigenSystem& es, std::size_t form);

}  // namespace lmw::lfun
