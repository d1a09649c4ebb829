#include "lmw/amplifier.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lmw/arith.hpp"
#include "lmw/lfun.hpp"
#include "lmw/parallel.hpp"

namespace lmw::amplifier {

namespace {

// Subconvexity saving at theta = 7/64; the exact rational lives in the
// exponent calculus, this is its floating image for the diagnostic ratio.
constexpr double kDelta = 25.0 / 3136.0;

// Largest integer whose square is <= L.
u64 prime_window(double L) {
  u64 r = static_cast<u64>(std::floor(std::sqrt(L)));
  while (double(r + 1) * double(r + 1) <= L) r++;
  while (r > 0 && double(r) * double(r) > L) r--;
  return r;
}

std::vector<u64> admissible_primes(u64 level, double L) {
  std::vector<u64> out;
  for (u64 p : arith::primes_up_to(prime_window(L)))
    if (level % p != 0) out.push_back(p);
  return out;
}

void check_form(const modsym::EigenSystem& es, std::size_t form) {
  if (form >= es.forms.size()) throw std::invalid_argument("form index out of range");
}

}  // namespace

AmplifierCoefficients build_amplifier(const modsym::EigenSystem& es,
                                      std::size_t form, double L) {
  check_form(es, form);
  if (!(L >= 4.0)) throw std::invalid_argument("amplifier length must be >= 4");

  AmplifierCoefficients c;
  c.level = es.level;
  c.length = L;
  for (u64 p : admissible_primes(es.level, L)) {
    if (p > es.n_max)
      throw std::invalid_argument("eigenvalue table too short for this length");
    c.entries[p] = es.forms[form].lambda[p];
    c.entries[p * p] = -1.0;
  }
  return c;
}

double l1_norm(const AmplifierCoefficients& c) {
  Kahan s;
  for (const auto& [l, v] : c.entries) s.add(std::fabs(v));
  return s.value();
}

double l2_norm_sq(const AmplifierCoefficients& c) {
  Kahan s;
  for (const auto& [l, v] : c.entries) s.add(v * v);
  return s.value();
}

double amplified_value(const modsym::EigenSystem& es, std::size_t form,
                       const AmplifierCoefficients& c) {
  check_form(es, form);
  if (c.level != es.level) throw std::invalid_argument("coefficient level mismatch");
  return double(admissible_primes(c.level, c.length).size());
}

double amplified_value_direct(const modsym::EigenSystem& es, std::size_t form,
                              const AmplifierCoefficients& c) {
  check_form(es, form);
  if (c.level != es.level) throw std::invalid_argument("coefficient level mismatch");
  Kahan s;
  for (const auto& [l, v] : c.entries) {
    if (l > es.n_max)
      throw std::invalid_argument("eigenvalue table too short for the squares");
    s.add(v * es.forms[form].lambda[l]);
  }
  return s.value();
}

AmplifiedMoment amplified_moment(const modsym::EigenSystem& es, double L) {
  if (es.forms.empty()) throw std::invalid_argument("eigensystem has no forms");
  if (!(L > 0.0)) throw std::invalid_argument("amplifier length must be positive");
  for (const auto& f : es.forms)
    if (!(f.weight > 0.0))
      throw std::invalid_argument("harmonic weights not fitted");

  AmplifiedMoment rep;
  rep.level = es.level;
  rep.length = L;
  rep.forms.resize(es.forms.size());

  const double lambda = double(admissible_primes(es.level, L).size());
  Kahan total;
  for (std::size_t f = 0; f < es.forms.size(); f++) {
    auto& row = rep.forms[f];
    row.amplifier = lambda;
    row.central = lfun::central_value(es, f).value;
    row.weight = es.forms[f].weight;
    double fourth = (row.central * row.central) * (row.central * row.central);
    row.term = row.weight * lambda * lambda * fourth;
    total.add(row.term);
  }
  rep.total = total.value();

  const double target = std::pow(double(es.level), 0.25 - kDelta);
  for (auto& row : rep.forms) {
    row.extracted_bound =
        lambda > 0.0
            ? std::pow(rep.total / (row.weight * lambda * lambda), 0.25)
            : std::numeric_limits<double>::infinity();
    row.subconv_ratio = row.extracted_bound / target;
    row.weight_ratio = row.weight * double(es.level) / std::log(double(es.level));
  }
  return rep;
}

std::string amplified_csv(const AmplifiedMoment& rep) {
  std::ostringstream out;
  out.precision(12);
  out << "form,amplifier,central,weight,term,extracted_bound,subconv_ratio,"
         "weight_ratio\n";
  for (std::size_t f = 0; f < rep.forms.size(); f++) {
    const auto& row = rep.forms[f];
    out << f << ',' << row.amplifier << ',' << row.central << ',' << row.weight
        << ',' << row.term << ',' << row.extracted_bound << ','
        << row.subconv_ratio << ',' << row.weight_ratio << '\n';
  }
  return out.str();
}

}  // namespace lmw::amplifier
