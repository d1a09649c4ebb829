#include "lmw/moments.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lmw/lfun.hpp"
#include "lmw/parallel.hpp"
#include "lmw/tracesums.hpp"

namespace lmw::moments {

MomentReport fourth_moment(const modsym::EigenSystem& es, u64 l) {
  if (es.forms.empty()) throw std::invalid_argument("eigensystem has no forms");
  if (l < 1) throw std::invalid_argument("twist must be positive");
  if (l >= es.level) throw std::invalid_argument("twist must be below the level");
  if (l > es.n_max)
    throw std::invalid_argument("twist outside the eigenvalue table");
  for (const auto& f : es.forms)
    if (!(f.weight > 0.0))
      throw std::invalid_argument("harmonic weights not fitted");

  MomentReport rep;
  rep.level = es.level;
  rep.twist = l;
  rep.per_form.resize(es.forms.size());

  Kahan harmonic, natural;
  for (std::size_t f = 0; f < es.forms.size(); f++) {
    auto cv = lfun::central_value(es, f);
    auto& pf = rep.per_form[f];
    pf.lambda_l = es.forms[f].lambda[l];
    pf.central = cv.value;
    pf.weight = es.forms[f].weight;
    double fourth = (cv.value * cv.value) * (cv.value * cv.value);
    harmonic.add(pf.weight * pf.lambda_l * fourth);
    natural.add(pf.lambda_l * fourth);
    if (cv.truncation_length > rep.truncation_length)
      rep.truncation_length = cv.truncation_length;
    if (cv.est_error > rep.lvalue_est_error) rep.lvalue_est_error = cv.est_error;
  }
  rep.harmonic_value = harmonic.value();
  rep.natural_value = natural.value() / double(es.forms.size());
  return rep;
}

std::vector<SweepRow> moment_sweep(const std::vector<u64>& q_range, u64 l,
                                   const std::vector<double>& poly,
                                   const SweepOptions& opt) {
  if (poly.size() > 7)
    throw std::invalid_argument("main-term polynomial degree exceeds 6");

  // Levels are independent; the Kloosterman sweeps inside each weight fit
  // are the parallel layer, so the level loop stays sequential rather than
  // nesting a second one above them.
  std::vector<SweepRow> rows(q_range.size());
  for (std::size_t i = 0; i < q_range.size(); i++) {
    auto& row = rows[i];
    row.level = q_range[i];
    row.twist = l;
    try {
      auto es = modsym::eigensystem(q_range[i], opt.n_max);
      tracesums::WeightOptions wo;
      wo.c_max = opt.c_max;
      wo.residual_limit = opt.residual_limit;
      auto fitted = tracesums::harmonic_weights(es, opt.n_eq, wo);
      row.report = fourth_moment(fitted, l);
      row.genus = fitted.forms.size();
      row.ok = true;
    } catch (const std::exception& ex) {
      row.error = ex.what();
      continue;
    }
    if (!poly.empty()) {
      double x = std::log(double(q_range[i]));
      double p = 0.0;
      for (std::size_t k = poly.size(); k-- > 0;) p = p * x + poly[k];
      row.main_term = p;
      row.residual = row.report.harmonic_value - p;
    }
  }
  return rows;
}

std::vector<double> leading_main_term() {
  constexpr double kPi = 3.14159265358979323846;
  std::vector<double> poly(7, 0.0);
  poly[6] = 1.0 / (60.0 * kPi * kPi);
  return poly;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool with_main_term) {
  std::ostringstream out;
  out.precision(12);
  out << "q,l,g,harmonic,natural";
  if (with_main_term) out << ",main_term,residual";
  out << '\n';
  for (const auto& row : rows) {
    if (!row.ok) {
      out << "# q=" << row.level << " failed: " << row.error << '\n';
      continue;
    }
    out << row.level << ',' << row.twist << ',' << row.genus << ','
        << row.report.harmonic_value << ',' << row.report.natural_value;
    if (with_main_term) out << ',' << row.main_term << ',' << row.residual;
    out << '\n';
  }
  return out.str();
}

}  // namespace lmw::moments
