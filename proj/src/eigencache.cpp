#include "lmw/eigencache.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lmw::eigencache {

namespace {

constexpr const char* kMagic = "EIGSYS";
constexpr int kVersion = 1;

std::string num15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

[[noreturn]] void bad(const std::string& why) {
  throw std::runtime_error("eigensystem cache: " + why);
}

// Reads one whitespace-separated token, failing loudly at end of input.
std::string token(std::istream& in, const char* what) {
  std::string t;
  if (!(in >> t)) bad(std::string("unexpected end of file, expected ") + what);
  return t;
}

void expect(std::istream& in, const char* keyword) {
  std::string t = token(in, keyword);
  if (t != keyword)
    bad("expected keyword '" + std::string(keyword) + "', found '" + t + "'");
}

u64 read_u64(std::istream& in, const char* what) {
  std::string t = token(in, what);
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (errno != 0 || end == t.c_str() || *end != '\0')
    bad("malformed integer '" + t + "' for " + what);
  return v;
}

double read_double(std::istream& in, const char* what) {
  std::string t = token(in, what);
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end == t.c_str() || *end != '\0')
    bad("malformed number '" + t + "' for " + what);
  return v;
}

}  // namespace

std::string serialize(const modsym::EigenSystem& es) {
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << '\n';
  out << "level " << es.level << '\n';
  out << "forms " << es.forms.size() << '\n';
  out << "nmax " << es.n_max << '\n';
  out << "precision " << num15(es.precision) << '\n';
  for (std::size_t f = 0; f < es.forms.size(); ++f) {
    const auto& form = es.forms[f];
    if (form.lambda.size() != es.n_max + 1)
      throw std::invalid_argument("eigensystem cache: form " +
                                  std::to_string(f) +
                                  " has a lambda table of the wrong depth");
    out << "form " << f << '\n';
    out << "epsilon " << form.epsilon << '\n';
    if (form.weight != 0.0) out << "weight " << num15(form.weight) << '\n';
    out << "lambda_q " << num15(form.lambda_q) << ' '
        << num15(form.lambda_q_deviation) << '\n';
    for (u64 n = 1; n <= es.n_max; ++n)
      out << "l " << n << ' ' << num15(form.lambda[n]) << '\n';
  }
  return out.str();
}

modsym::EigenSystem parse(const std::string& text) {
  std::istringstream in(text);
  std::string magic = token(in, "file magic");
  if (magic != kMagic) bad("not an eigensystem cache (magic '" + magic + "')");
  u64 version = read_u64(in, "format version");
  if (version != kVersion)
    bad("unsupported format version " + std::to_string(version) +
        " (this build reads version " + std::to_string(kVersion) + " only)");

  modsym::EigenSystem es;
  expect(in, "level");
  es.level = read_u64(in, "level");
  expect(in, "forms");
  u64 g = read_u64(in, "form count");
  expect(in, "nmax");
  es.n_max = read_u64(in, "table depth");
  expect(in, "precision");
  es.precision = read_double(in, "precision");

  es.forms.resize(g);
  for (u64 f = 0; f < g; ++f) {
    expect(in, "form");
    u64 idx = read_u64(in, "form index");
    if (idx != f)
      bad("form blocks out of order: expected " + std::to_string(f) +
          ", found " + std::to_string(idx));
    auto& form = es.forms[f];
    expect(in, "epsilon");
    std::string eps = token(in, "epsilon");
    if (eps == "1")
      form.epsilon = 1;
    else if (eps == "-1")
      form.epsilon = -1;
    else if (eps == "0")
      form.epsilon = 0;
    else
      bad("epsilon must be -1, 0, or 1, found '" + eps + "'");

    std::string key = token(in, "'weight' or 'lambda_q'");
    if (key == "weight") {
      form.weight = read_double(in, "weight");
      if (!(form.weight > 0.0)) bad("stored weight must be positive");
      key = token(in, "'lambda_q'");
    }
    if (key != "lambda_q") bad("expected keyword 'lambda_q', found '" + key + "'");
    form.lambda_q = read_double(in, "lambda_q");
    form.lambda_q_deviation = read_double(in, "lambda_q deviation");

    form.lambda.assign(es.n_max + 1, 0.0);
    for (u64 n = 1; n <= es.n_max; ++n) {
      expect(in, "l");
      u64 m = read_u64(in, "eigenvalue index");
      if (m != n)
        bad("eigenvalue rows out of order: expected " + std::to_string(n) +
            ", found " + std::to_string(m));
      form.lambda[n] = read_double(in, "eigenvalue");
    }
  }
  std::string trailing;
  if (in >> trailing) bad("trailing content '" + trailing + "' after last form");
  return es;
}

std::filesystem::path cache_path(const std::filesystem::path& dir, u64 level,
                                 u64 n_max) {
  return dir / ("eigsys-q" + std::to_string(level) + "-n" +
                std::to_string(n_max) + ".txt");
}

void save(const modsym::EigenSystem& es, const std::filesystem::path& file) {
  std::string body = serialize(es);
  std::filesystem::path dir = file.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      bad("cannot write temporary file " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, file);
}

modsym::EigenSystem load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) bad("cannot open " + file.string());
  std::ostringstream body;
  body << in.rdbuf();
  if (in.bad()) bad("read error on " + file.string());
  return parse(body.str());
}

}  // namespace lmw::eigencache
