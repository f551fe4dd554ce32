#include <catch2/catch_amalgamated.hpp>

#include "cachedof/params.hpp"

using namespace cachedof;

namespace {

SystemParams make(int kt, int nt, int kr, int n, int f, double mt, double mr, double r) {
  SystemParams p;
  p.kt = kt;
  p.nt = nt;
  p.kr = kr;
  p.n_files = n;
  p.f_packets = f;
  p.mu_t = mt;
  p.mu_r = mr;
  p.r = r;
  return p;
}

}  // namespace

TEST_CASE("validate accepts the integer-regime reference instance") {
  auto rep = validate(make(3, 1, 3, 3, 9, 1.0 / 3, 1.0 / 3, 4.5));
  CHECK(rep.ok);
  CHECK(rep.integer_regime);
  CHECK(rep.violations.empty());
}

TEST_CASE("validate flags a library smaller than the user count") {
  auto rep = validate(make(3, 1, 3, 2, 9, 1.0 / 3, 1.0 / 3, 4.5));
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0] == "n_files >= kr");
}

TEST_CASE("validate reports a non-integer regime without failing") {
  auto rep = validate(make(12, 1, 12, 12, 1, 0.3, 0.0, 1.0));  // mu_t*kt = 3.6
  CHECK(rep.ok);
  CHECK_FALSE(rep.integer_regime);
}

TEST_CASE("validate rejects out-of-range fractions and counts") {
  CHECK_FALSE(validate(make(0, 1, 1, 1, 1, 0, 0, 1)).ok);
  CHECK_FALSE(validate(make(1, 1, 1, 1, 1, 1.5, 0, 1)).ok);
  CHECK_FALSE(validate(make(1, 1, 1, 1, 1, 0, -0.1, 1)).ok);
  CHECK_FALSE(validate(make(1, 1, 1, 1, 1, 0, 0, -1)).ok);
}

TEST_CASE("validate is pure and idempotent") {
  auto p = make(4, 2, 4, 5, 8, 0.25, 0.5, 2.0);
  auto a = validate(p);
  auto b = validate(p);
  CHECK(a.ok == b.ok);
  CHECK(a.integer_regime == b.integer_regime);
  CHECK(a.violations == b.violations);
}

TEST_CASE("worst_case_demand enumerates distinct files") {
  auto d = worst_case_demand(make(3, 1, 3, 3, 9, 0, 0, 1));
  CHECK(d.d == std::vector<int>{1, 2, 3});
  CHECK(worst_case_demand(make(1, 1, 1, 5, 1, 0, 0, 1)).d == std::vector<int>{1});
  auto big = worst_case_demand(make(2, 1, 24, 24, 1, 0, 0, 1));
  REQUIRE(big.d.size() == 24);
  for (int k = 0; k < 24; ++k) CHECK(big.d[k] == k + 1);
}

TEST_CASE("worst_case_demand requires enough files") {
  CHECK_THROWS_AS(worst_case_demand(make(3, 1, 4, 3, 1, 0, 0, 1)), InvalidParams);
}

TEST_CASE("cache budget snapping") {
  auto p = make(3, 1, 3, 3, 9, 0.3333, 0.3333, 4.5);
  CHECK_FALSE(p.integer_regime());
  auto q = p.snapped(1e-2);
  CHECK(q.integer_regime());
  CHECK(q.t_units() == 1);
  CHECK(q.r_units() == 1);
  CHECK_THROWS_AS(p.snapped(1e-9), NonIntegerRegime);
}
