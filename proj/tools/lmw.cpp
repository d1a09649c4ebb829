#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lmw/amplifier.hpp"
#include "lmw/eigencache.hpp"
#include "lmw/exponents.hpp"
#include "lmw/lfun.hpp"
#include "lmw/modsym.hpp"
#include "lmw/moments.hpp"
#include "lmw/sieve.hpp"
#include "lmw/tracesums.hpp"

// Command-line front end.  Every subcommand emits CSV with a leading
// comment block recording the tool version, the exact invocation, and the
// theta in force, so a report file identifies the run that produced it.
// Exit codes: 0 success, 1 usage error, 2 computation failure.

namespace {

namespace fs = std::filesystem;
using lmw::arith::u64;

constexpr const char* kToolVersion = "1.0.0";

std::string num15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Output sink: standard output unless --out names a file.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary | std::ios::trunc);
      if (!file) throw std::runtime_error("cannot open output file " + path);
      os = &file;
    }
  }
  std::ostream& out() { return *os; }
};

std::string comment_block(const std::string& invocation,
                          const std::string& theta) {
  std::ostringstream os;
  os << "# lmw " << kToolVersion << "\n";
  os << "# invocation:" << invocation << "\n";
  os << "# theta: " << theta << "\n";
  return os.str();
}

// Shared per-subcommand state; one instance per subcommand keeps CLI11
// bindings alive through parsing.
struct CommonOpts {
  u64 level = 0;
  u64 twist = 1;
  u64 n_max = 600;
  std::string cache_dir = ".";
  std::string out;
  u64 fit_cmax = 400000;
  std::size_t fit_neq = 8;
  double fit_residual = 1e-3;
};

void add_cache_dir(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--cache-dir", o.cache_dir,
                  "eigensystem cache directory (env LMW_CACHE_DIR)")
      ->envname("LMW_CACHE_DIR")
      ->capture_default_str();
}

void add_out(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out, "write the report to this file instead of stdout");
}

void add_fit_opts(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--fit-cmax", o.fit_cmax,
                  "Kloosterman modulus cap for the weight fit")
      ->capture_default_str();
  cmd->add_option("--fit-neq", o.fit_neq,
                  "number of trace-formula equations in the weight fit")
      ->capture_default_str();
  cmd->add_option("--fit-residual", o.fit_residual,
                  "largest acceptable weight-fit residual")
      ->capture_default_str();
}

// Loads the cached eigensystem for (level, n_max) or computes it; fits
// harmonic weights when the caller needs them and the cache lacks them.
struct SystemSource {
  lmw::modsym::EigenSystem es;
  fs::path path;
  bool cache_hit = false;  // the file satisfied the request as stored
};

SystemSource obtain_system(const CommonOpts& o, bool need_weights) {
  SystemSource src;
  src.path = lmw::eigencache::cache_path(o.cache_dir, o.level, o.n_max);
  bool have_forms = false;
  if (fs::exists(src.path)) {
    src.es = lmw::eigencache::load(src.path);
    if (src.es.level != o.level || src.es.n_max != o.n_max)
      throw std::runtime_error("cache file " + src.path.string() +
                               " does not match its key");
    bool weights_ok = !src.es.forms.empty();
    for (const auto& f : src.es.forms) weights_ok = weights_ok && f.weight > 0.0;
    if (!need_weights || weights_ok) {
      src.cache_hit = true;
      return src;
    }
    have_forms = true;  // eigenvalues are reusable, only the fit is missing
  }
  if (!have_forms) {
    try {
      src.es = lmw::modsym::eigensystem(o.level, o.n_max);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(
          std::string(e.what()) +
          " (eigenvalue separation; retry with a larger --nmax table)");
    }
  }
  if (need_weights) {
    lmw::tracesums::WeightOptions wopt;
    wopt.c_max = o.fit_cmax;
    wopt.residual_limit = o.fit_residual;
    src.es = lmw::tracesums::harmonic_weights(src.es, o.fit_neq, wopt);
  }
  return src;
}

int run_eigen(const CommonOpts& o, const std::string& invocation) {
  SystemSource src = obtain_system(o, /*need_weights=*/true);
  if (!src.cache_hit) lmw::eigencache::save(src.es, src.path);
  Sink sink(o.out);
  sink.out() << comment_block(invocation, "n/a");
  sink.out() << "# cache: " << src.path.string()
             << (src.cache_hit ? " (hit)" : " (written)") << "\n";
  sink.out() << "form,epsilon,lambda_q,weight,lambda2\n";
  for (std::size_t f = 0; f < src.es.forms.size(); ++f) {
    const auto& form = src.es.forms[f];
    sink.out() << f << ',' << form.epsilon << ',' << num15(form.lambda_q)
               << ',' << num15(form.weight) << ',' << num15(form.lambda[2])
               << "\n";
  }
  return 0;
}

int run_lvalue(const CommonOpts& o, const std::string& invocation) {
  SystemSource src = obtain_system(o, /*need_weights=*/false);
  Sink sink(o.out);
  sink.out() << comment_block(invocation, "n/a");
  sink.out() << "form,epsilon,value,truncation,est_error\n";
  for (std::size_t f = 0; f < src.es.forms.size(); ++f) {
    auto cv = lmw::lfun::central_value(src.es, f);
    sink.out() << f << ',' << cv.epsilon << ',' << num15(cv.value) << ','
               << cv.truncation_length << ',' << num15(cv.est_error) << "\n";
  }
  return 0;
}

int run_moment(const CommonOpts& o, const std::vector<u64>& levels,
               const std::string& main_term, const std::string& invocation) {
  std::vector<double> poly;
  if (main_term == "leading")
    poly = lmw::moments::leading_main_term();
  else if (!main_term.empty())
    throw std::invalid_argument("unknown main-term preset '" + main_term +
                                "' (supported: leading)");
  lmw::moments::SweepOptions opt;
  opt.n_max = o.n_max;
  opt.n_eq = o.fit_neq;
  opt.c_max = o.fit_cmax;
  opt.residual_limit = o.fit_residual;
  auto rows = lmw::moments::moment_sweep(levels, o.twist, poly, opt);
  Sink sink(o.out);
  sink.out() << comment_block(invocation, "n/a");
  sink.out() << lmw::moments::sweep_csv(rows, !poly.empty());
  bool any_ok = false;
  for (const auto& r : rows) any_ok = any_ok || r.ok;
  return any_ok ? 0 : 2;
}

int run_amplify(const CommonOpts& o, double length,
                const std::string& invocation) {
  SystemSource src = obtain_system(o, /*need_weights=*/true);
  auto rep = lmw::amplifier::amplified_moment(src.es, length);
  Sink sink(o.out);
  sink.out() << comment_block(invocation, "n/a");
  sink.out() << "# level " << rep.level << " length " << num15(rep.length)
             << " total " << num15(rep.total) << "\n";
  sink.out() << lmw::amplifier::amplified_csv(rep);
  return 0;
}

void print_rational_row(std::ostream& os, const char* name,
                        const lmw::exponents::Rational& v) {
  os << name << ',' << v.get_str() << ',' << num15(v.get_d()) << "\n";
}

int run_exponents(const std::string& theta_spec, const std::string& out,
                  const std::string& invocation) {
  namespace ex = lmw::exponents;
  ex::ThetaValue tv;
  try {
    if (theta_spec == "kim-sarnak")
      tv = ex::theta_from_lambda(ex::Rational(975, 4096));
    else if (theta_spec == "selberg-conj")
      tv = ex::theta_from_lambda(ex::Rational(1, 4));
    else
      tv = ex::theta_from_lambda(ex::Rational(theta_spec));
  } catch (const std::domain_error& e) {
    throw std::invalid_argument(e.what());
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(
        "theta spec must be kim-sarnak, selberg-conj, or a rational "
        "eigenvalue bound like 975/4096");
  }
  auto sub = ex::subconvexity_delta(tv);
  // The cutoff balance, and everything built on the error monomials it
  // yields, exists only below theta = 1/4; at the boundary the table
  // degrades to the rows that stay defined.
  bool have_cutoff = true;
  ex::CutoffBranches cut;
  std::vector<ex::Monomial> err;
  ex::MollifierReport moll;
  ex::ThresholdReport thr;
  std::string cutoff_note;
  try {
    cut = ex::balance_cutoff(tv);
    err = ex::moment_error_terms(tv);  // throws if a re-derivation differs
    moll = ex::mollifier_lengths(tv);
    thr = ex::twist_length_thresholds(tv);
  } catch (const std::domain_error& e) {
    have_cutoff = false;
    cutoff_note = e.what();
  }

  Sink sink(out);
  std::ostream& os = sink.out();
  os << comment_block(invocation, tv.value.get_str() + " (" + theta_spec + ")");
  os << "# provenance: " << tv.provenance << "\n";
  os << "quantity,exact,decimal\n";
  print_rational_row(os, "theta", tv.value);
  print_rational_row(os, "subconvexity_delta", sub.delta);
  print_rational_row(os, "amplifier_length_exponent",
                     sub.amplifier_length_exponent);
  if (have_cutoff) {
    for (std::size_t i = 0; i < err.size(); ++i) {
      std::string base = "moment_error_" + std::to_string(i + 1);
      print_rational_row(os, (base + "_l").c_str(), err[i].l);
      print_rational_row(os, (base + "_q").c_str(), err[i].q);
    }
    print_rational_row(os, "cutoff_l", cut.branch1.l);
    print_rational_row(os, "cutoff_q", cut.branch1.q);
    print_rational_row(os, "cutoff_M", cut.branch1.M);
    print_rational_row(os, "cutoff_N", cut.branch1.N);
    print_rational_row(os, "cutoff_at_q_l", cut.branch2.l);
    print_rational_row(os, "cutoff_at_q_q", cut.branch2.q);
    print_rational_row(os, "mollifier_delta1_formula", moll.delta1_formula);
    for (std::size_t i = 0; i < moll.delta1_constraints.size(); ++i)
      print_rational_row(
          os, ("mollifier_delta1_constraint_" + std::to_string(i + 1)).c_str(),
          moll.delta1_constraints[i]);
    print_rational_row(os, "mollifier_delta1_min", moll.delta1_min);
    print_rational_row(os, "mollifier_delta2", moll.delta2);
    print_rational_row(os, "twist_threshold_diagonal", thr.stated_diagonal);
    print_rational_row(os, "twist_threshold_amplified", thr.stated_amplified);
    for (std::size_t i = 0; i < thr.per_term.size(); ++i)
      print_rational_row(
          os, ("twist_threshold_term_" + std::to_string(i + 1)).c_str(),
          thr.per_term[i]);
    print_rational_row(os, "twist_threshold_term_min", thr.per_term_min);
    for (const auto& f : moll.flags) os << "# discrepancy: " << f << "\n";
    for (const auto& f : thr.flags) os << "# discrepancy: " << f << "\n";
  } else {
    os << "# cutoff balance not defined at this theta: " << cutoff_note
       << "\n";
  }
  return 0;
}

int run_sieve_bench(u64 trials, double size, u64 seed, bool phases,
                    const std::string& out, const std::string& invocation) {
  lmw::sieve::ExperimentOptions opt;
  opt.complex_phases = phases;
  auto st = lmw::sieve::ratio_experiment(trials, size, seed, opt);
  Sink sink(out);
  sink.out() << comment_block(invocation, "7/64");
  sink.out() << "# max_ratio " << num15(st.max_ratio) << " mean_ratio "
             << num15(st.mean_ratio) << "\n";
  sink.out() << lmw::sieve::ratio_csv(st);
  return 0;
}

int run_tail_ratio(const CommonOpts& o, double M, double N, double C,
                   u64 c_terms, const std::string& invocation) {
  if (M <= 0.0) M = double(o.level);
  if (N <= 0.0) N = double(o.level);
  if (C <= 0.0) C = 2.0 * std::sqrt(double(o.twist) * M * N);
  lmw::tracesums::RatioOptions opt;
  opt.c_terms = c_terms;
  auto tr = lmw::tracesums::tail_bound_ratio(o.level, o.twist, M, N, C, opt);
  Sink sink(o.out);
  sink.out() << comment_block(invocation, "7/64");
  sink.out() << "q,l,M,N,C,lhs,rhs,ratio,c_hi,tail_majorant\n";
  sink.out() << o.level << ',' << o.twist << ',' << num15(M) << ','
             << num15(N) << ',' << num15(C) << ',' << num15(tr.lhs) << ','
             << num15(tr.rhs) << ',' << num15(tr.ratio) << ',' << tr.c_hi
             << ',' << num15(tr.tail_majorant) << "\n";
  return 0;
}

int run_petersson_check(const CommonOpts& o, u64 m, u64 n, double tol,
                        u64 c_max, const std::string& invocation) {
  lmw::tracesums::DeltaOptions opt;
  lmw::tracesums::PeterssonDelta d;
  if (tol > 0.0) {
    d = lmw::tracesums::petersson_delta(o.level, m, n, tol, opt);
  } else {
    opt.c_max_override = c_max;
    d = lmw::tracesums::petersson_delta(o.level, m, n, 1.0, opt);
  }
  Sink sink(o.out);
  sink.out() << comment_block(invocation, "n/a");
  sink.out() << "q,m,n,value,c_max,tail_estimate\n";
  sink.out() << d.level << ',' << d.m << ',' << d.n << ',' << num15(d.value)
             << ',' << d.c_max << ',' << num15(d.tail_estimate) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string invocation;
  for (int i = 0; i < argc; ++i) invocation += std::string(" ") + argv[i];

  CLI::App app{
      "Workbench for weight-2 newform moments: eigensystems, central "
      "values, moment averages, amplified bounds, exact exponent tables, "
      "and Kloosterman-sum harnesses."};
  app.require_subcommand(1);

  CommonOpts eig, lv, mo, am, tr, pc;
  std::vector<u64> moment_levels;
  std::string main_term;
  double amp_length = 25.0;
  std::string theta_spec = "kim-sarnak";
  std::string exp_out;
  u64 sb_trials = 20, sb_seed = 1;
  double sb_size = 16.0;
  bool sb_phases = false;
  std::string sb_out;
  double tr_M = 0.0, tr_N = 0.0, tr_C = 0.0;
  u64 tr_cterms = 2048;
  u64 pc_m = 1, pc_n = 1, pc_cmax = 400000;
  double pc_tol = 0.0;

  CLI::App* c_eigen = app.add_subcommand(
      "eigen", "compute an eigensystem with harmonic weights and cache it");
  c_eigen->add_option("-q,--level", eig.level, "prime level")->required();
  c_eigen->add_option("--nmax", eig.n_max, "eigenvalue table depth")
      ->capture_default_str();
  add_cache_dir(c_eigen, eig);
  add_fit_opts(c_eigen, eig);
  add_out(c_eigen, eig);

  CLI::App* c_lvalue = app.add_subcommand(
      "lvalue", "central L-values of every newform at a level");
  c_lvalue->add_option("-q,--level", lv.level, "prime level")->required();
  c_lvalue->add_option("--nmax", lv.n_max, "eigenvalue table depth")
      ->capture_default_str();
  add_cache_dir(c_lvalue, lv);
  add_out(c_lvalue, lv);

  CLI::App* c_moment = app.add_subcommand(
      "moment", "twisted fourth moment across a list of levels");
  c_moment->add_option("-q,--level", moment_levels, "prime levels (repeatable)")
      ->required();
  c_moment->add_option("-l,--twist", mo.twist, "twist index")
      ->capture_default_str();
  c_moment->add_option("--main-term", main_term,
                       "main-term preset (leading: degree-6 polynomial with "
                       "only the known leading coefficient)");
  c_moment->add_option("--nmax", mo.n_max, "eigenvalue table depth")
      ->capture_default_str();
  add_fit_opts(c_moment, mo);
  add_out(c_moment, mo);

  CLI::App* c_amplify = app.add_subcommand(
      "amplify", "amplified fourth moment and extracted per-form bounds");
  c_amplify->add_option("-q,--level", am.level, "prime level")->required();
  c_amplify->add_option("-L,--length", amp_length, "amplifier length")
      ->capture_default_str();
  c_amplify->add_option("--nmax", am.n_max, "eigenvalue table depth")
      ->capture_default_str();
  add_cache_dir(c_amplify, am);
  add_fit_opts(c_amplify, am);
  add_out(c_amplify, am);

  CLI::App* c_exponents = app.add_subcommand(
      "exponents", "exact exponent table with discrepancy report");
  c_exponents
      ->add_option("--theta", theta_spec,
                   "kim-sarnak, selberg-conj, or a rational eigenvalue "
                   "bound like 975/4096")
      ->capture_default_str();
  c_exponents->add_option("--out", exp_out,
                          "write the report to this file instead of stdout");

  CLI::App* c_sieve = app.add_subcommand(
      "sieve-bench", "trilinear Kloosterman form against its majorant");
  c_sieve->add_option("--trials", sb_trials, "number of random instances")
      ->capture_default_str();
  c_sieve->add_option("--size", sb_size, "common block size M = N = C")
      ->capture_default_str();
  c_sieve->add_option("--seed", sb_seed, "random seed")->capture_default_str();
  c_sieve->add_flag("--phases", sb_phases,
                    "unit-phase coefficients instead of signs");
  c_sieve->add_option("--out", sb_out,
                      "write the report to this file instead of stdout");

  CLI::App* c_tail = app.add_subcommand(
      "tail-ratio", "large-modulus Kloosterman tail against its power-law "
                    "bound (requires C > sqrt(l M N))");
  c_tail->add_option("-q,--level", tr.level, "prime level")->required();
  c_tail->add_option("-l,--twist", tr.twist, "twist index")
      ->capture_default_str();
  c_tail->add_option("--block-m", tr_M, "m-window scale (default: level)");
  c_tail->add_option("--block-n", tr_N, "n-window scale (default: level)");
  c_tail->add_option("--cutoff", tr_C,
                     "modulus cutoff C (default: 2 sqrt(l M N))");
  c_tail->add_option("--cterms", tr_cterms, "moduli per divisor pair")
      ->capture_default_str();
  add_out(c_tail, tr);

  CLI::App* c_pet = app.add_subcommand(
      "petersson-check", "diagonal trace-formula delta at one (m, n) pair");
  c_pet->add_option("-q,--level", pc.level, "prime level")->required();
  c_pet->add_option("-m", pc_m, "first index")->capture_default_str();
  c_pet->add_option("-n", pc_n, "second index")->capture_default_str();
  c_pet->add_option("--tol", pc_tol,
                    "certified tail tolerance (0: fixed cap mode)")
      ->capture_default_str();
  c_pet->add_option("--cmax", pc_cmax, "modulus cap in fixed cap mode")
      ->capture_default_str();
  add_out(c_pet, pc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (c_eigen->parsed()) return run_eigen(eig, invocation);
    if (c_lvalue->parsed()) return run_lvalue(lv, invocation);
    if (c_moment->parsed())
      return run_moment(mo, moment_levels, main_term, invocation);
    if (c_amplify->parsed()) return run_amplify(am, amp_length, invocation);
    if (c_exponents->parsed())
      return run_exponents(theta_spec, exp_out, invocation);
    if (c_sieve->parsed())
      return run_sieve_bench(sb_trials, sb_size, sb_seed, sb_phases, sb_out,
                             invocation);
    if (c_tail->parsed())
      return run_tail_ratio(tr, tr_M, tr_N, tr_C, tr_cterms, invocation);
    if (c_pet->parsed())
      return run_petersson_check(pc, pc_m, pc_n, pc_tol, pc_cmax, invocation);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
