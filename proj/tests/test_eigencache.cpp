#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "lmw/eigencache.hpp"
#include "lmw/modsym.hpp"

// Persistence format checks.  The serializer's contract is that parse and
// serialize are mutually inverse: reparsing a written file and rewriting it
// reproduces the bytes, and every numeric field survives at 15 significant
// digits.  Structural damage, foreign headers, and future format versions
// must all be rejected loudly rather than repaired.

namespace fs = std::filesystem;
using lmw::eigencache::cache_path;
using lmw::eigencache::load;
using lmw::eigencache::parse;
using lmw::eigencache::save;
using lmw::eigencache::serialize;

namespace {

// Synthetic system with awkward values: irrationals, subnormal-ish
// magnitudes, negatives, and one form with no fitted weight.
lmw::modsym::EigenSystem sample_system() {
  lmw::modsym::EigenSystem es;
  es.level = 37;
  es.n_max = 5;
  es.precision = 8.881784197001252e-16;
  es.forms.resize(2);
  es.forms[0].lambda = {0.0, 1.0, -std::sqrt(2.0), 1.0 / 3.0, 1.0,
                        -0.7453559924999299};
  es.forms[0].lambda_q = -0.164398987305357;
  es.forms[0].lambda_q_deviation = 3.3306690738754696e-16;
  es.forms[0].epsilon = -1;
  es.forms[0].weight = 0.2291325544108058;
  es.forms[1].lambda = {0.0, 1.0, 0.0, 1.154700538379252, -1.0, 2.0e-17};
  es.forms[1].lambda_q = 0.164398987305357;
  es.forms[1].lambda_q_deviation = 0.0;
  es.forms[1].epsilon = 0;
  es.forms[1].weight = 0.0;  // unfitted, stored as an absent field
  return es;
}

// Fresh scratch directory per test run.
struct ScratchDir {
  fs::path dir;
  ScratchDir() {
    dir = fs::temp_directory_path() /
          "lmw-cache-test-scratch";
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~ScratchDir() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("cache text round-trips bit-exactly") {
  auto es = sample_system();
  std::string s1 = serialize(es);
  auto es2 = parse(s1);
  std::string s2 = serialize(es2);
  CHECK(s1 == s2);

  CHECK(es2.level == es.level);
  CHECK(es2.n_max == es.n_max);
  CHECK(es2.forms.size() == es.forms.size());
  CHECK(es2.precision == doctest::Approx(es.precision).epsilon(1e-14));
  for (std::size_t f = 0; f < es.forms.size(); ++f) {
    CHECK(es2.forms[f].epsilon == es.forms[f].epsilon);
    CHECK(es2.forms[f].weight ==
          doctest::Approx(es.forms[f].weight).epsilon(1e-14));
    CHECK(es2.forms[f].lambda_q ==
          doctest::Approx(es.forms[f].lambda_q).epsilon(1e-14));
    CHECK(es2.forms[f].lambda.size() == es.n_max + 1);
    CHECK(es2.forms[f].lambda[0] == 0.0);
    for (std::size_t n = 1; n <= es.n_max; ++n)
      CHECK(es2.forms[f].lambda[n] ==
            doctest::Approx(es.forms[f].lambda[n]).epsilon(1e-14));
  }

  // The absent weight field on form 1 stays absent and reparses as unset.
  CHECK(s1.find("weight") != std::string::npos);
  CHECK(es2.forms[1].weight == 0.0);

  // A computed eigensystem goes through the same path unchanged.
  auto real = lmw::modsym::eigensystem(11, 20);
  real.forms[0].epsilon = 1;
  real.forms[0].weight = 1.6967346080181498;
  std::string r1 = serialize(real);
  CHECK(serialize(parse(r1)) == r1);
  CHECK(parse(r1).forms[0].lambda[2] ==
        doctest::Approx(real.forms[0].lambda[2]).epsilon(1e-14));
}

TEST_CASE("cache parser rejects foreign and damaged input") {
  auto es = sample_system();
  std::string good = serialize(es);

  CHECK_THROWS_AS(parse(""), std::runtime_error);
  CHECK_THROWS_AS(parse("MAGIC 1\nlevel 37\n"), std::runtime_error);
  CHECK_THROWS_AS(parse("EIGSYS"), std::runtime_error);

  // Truncation anywhere in the body is structural damage.
  CHECK_THROWS_AS(parse(good.substr(0, good.size() / 2)), std::runtime_error);
  CHECK_THROWS_AS(parse(good + "\nextra 1"), std::runtime_error);

  // Field-level damage: misnumbered eigenvalue rows, bad epsilon, bad
  // weight, malformed numbers.
  std::string bad = good;
  auto pos = bad.find("l 3 ");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 4, "l 4 ");
  CHECK_THROWS_AS(parse(bad), std::runtime_error);

  bad = good;
  pos = bad.find("epsilon -1");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 10, "epsilon -2");
  CHECK_THROWS_AS(parse(bad), std::runtime_error);

  bad = good;
  pos = bad.find("weight ");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 8, "weight -");
  CHECK_THROWS_AS(parse(bad), std::runtime_error);

  bad = good;
  pos = bad.find("precision ");
  REQUIRE(pos != std::string::npos);
  bad.insert(pos + 10, "x");
  CHECK_THROWS_AS(parse(bad), std::runtime_error);
}

TEST_CASE("future format versions are rejected, never migrated") {
  std::string good = serialize(sample_system());
  REQUIRE(good.rfind("EIGSYS 1\n", 0) == 0);
  std::string v2 = "EIGSYS 2" + good.substr(8);
  try {
    parse(v2);
    FAIL("version 2 parsed without error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("EIGSYS 0" + good.substr(8)), std::runtime_error);
}

TEST_CASE("cache files are written atomically under keyed names") {
  ScratchDir scratch;
  auto es = sample_system();

  // Keyed naming: distinct (level, depth) pairs get distinct files.
  fs::path p1 = cache_path(scratch.dir, 37, 5);
  CHECK(p1 != cache_path(scratch.dir, 37, 6));
  CHECK(p1 != cache_path(scratch.dir, 11, 5));
  CHECK(p1.string().find("37") != std::string::npos);

  save(es, p1);
  CHECK(fs::exists(p1));
  CHECK_FALSE(fs::exists(fs::path(p1.string() + ".tmp")));
  CHECK(serialize(load(p1)) == serialize(es));

  // A stale partial temporary (a writer that died mid-write) is invisible
  // to readers of the final name and harmless to the next writer.
  fs::path p2 = cache_path(scratch.dir, 11, 5);
  {
    std::ofstream stale(fs::path(p2.string() + ".tmp"));
    stale << serialize(es).substr(0, 40);
  }
  CHECK_THROWS_AS(load(p2), std::runtime_error);
  lmw::modsym::EigenSystem es11 = es;
  es11.level = 11;
  save(es11, p2);
  CHECK(load(p2).level == 11);
  CHECK_FALSE(fs::exists(fs::path(p2.string() + ".tmp")));

  // Overwriting replaces the payload in one step.
  es11.precision = 1.0e-9;
  save(es11, p2);
  CHECK(load(p2).precision == doctest::Approx(1.0e-9).epsilon(1e-14));

  // Missing directories are created; unreadable paths throw.
  fs::path nested = scratch.dir / "a" / "b" / "c.txt";
  save(es, nested);
  CHECK(load(nested).level == 37);
  CHECK_THROWS_AS(load(scratch.dir / "absent.txt"), std::runtime_error);
}
