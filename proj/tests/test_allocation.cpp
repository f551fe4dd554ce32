#include <catch2/catch_amalgamated.hpp>

#include "cachedof/allocation.hpp"

using namespace cachedof;

namespace {

SystemParams make(int n, int kt, int kr, int nt, int f, double mt, double mr, double r) {
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

const SystemParams kFullEn = make(2, 2, 2, 1, 2, 1.0, 0.0, 1.0);
const SystemParams kHalfHalf = make(2, 2, 2, 1, 4, 0.5, 0.5, 2.0);

}  // namespace

TEST_CASE("demand enumeration is the falling factorial") {
  CHECK(enumerate_demands(3, 3).size() == 6);
  CHECK(enumerate_demands(3, 2).size() == 6);
  CHECK(enumerate_demands(2, 2).size() == 2);
  auto ds = enumerate_demands(2, 2);
  CHECK(ds[0].d == std::vector<int>{1, 2});
  CHECK(ds[1].d == std::vector<int>{2, 1});
}

TEST_CASE("full EN caching base point") {
  auto al = base_allocation(kFullEn);
  Mask both = 0b11;
  for (int n = 0; n < 2; ++n) CHECK(al.cache[n][both][0] == Rational(2));
  for (std::size_t di = 0; di < al.demands.size(); ++di)
    CHECK(al.delta_f_star(static_cast<int>(di)) == Rational(0));
  CHECK(check_feasible(al).empty());
}

TEST_CASE("fully cached users make the user constraint tight") {
  auto al = base_allocation(make(2, 2, 2, 1, 2, 0.5, 1.0, 1.0));
  Mask all_users = 0b11;
  Rational per_user = 0;
  for (int n = 0; n < 2; ++n)
    for (Mask tt = 1; tt < 4u; ++tt)
      for (Mask tr = 0; tr < 4u; ++tr) {
        if (al.cache[n][tt][tr] != 0) CHECK(tr == all_users);
        if ((tr >> 0) & 1u) per_user += al.cache[n][tt][tr];
      }
  CHECK(per_user == al.user_cap());
  CHECK(check_feasible(al).empty());
}

TEST_CASE("no caches and no fronthaul is infeasible") {
  CHECK_THROWS_AS(base_allocation(make(2, 2, 2, 1, 2, 0.0, 0.0, 0.0)), Infeasible);
}

TEST_CASE("empty EN caches are served by balanced fronthaul pushes") {
  auto al = base_allocation(make(3, 3, 2, 1, 6, 0.0, 0.5, 2.0));
  CHECK(check_feasible(al).empty());
  for (std::size_t di = 0; di < al.demands.size(); ++di)
    CHECK(al.delta_f_star(static_cast<int>(di)) <= al.delta_f_max());
}

TEST_CASE("sampled allocations stay feasible") {
  for (const SystemParams& p :
       {kFullEn, kHalfHalf, make(3, 3, 3, 1, 9, 1.0 / 3, 1.0 / 3, 4.5),
        make(3, 2, 2, 2, 4, 0.5, 0.0, 0.5), make(3, 3, 2, 1, 6, 0.0, 0.5, 2.0)}) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      auto al = sample_feasible_allocation(p, seed, 48);
      INFO("seed " << seed);
      CHECK(check_feasible(al).empty());
    }
  }
}

TEST_CASE("trivial full-cache point meets the bound with equality") {
  auto al = base_allocation(kFullEn);
  auto ch = averaged_objective_bound(al);
  CHECK(ch.x == Rational(2));
  CHECK(ch.total == ch.f_of_x);  // K_R (1 - mu_R) / (n_T * 2), zero slack
  CHECK(ch.final_ok);
  CHECK(verify_converse_chain(al));
}

TEST_CASE("chain identities are exact on sampled points") {
  for (const SystemParams& p : {kHalfHalf, make(3, 3, 3, 1, 9, 1.0 / 3, 1.0 / 3, 4.5)}) {
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
      auto al = sample_feasible_allocation(p, seed, 48);
      auto ch = averaged_objective_bound(al);
      INFO("seed " << seed);
      CHECK(ch.counting_identity_ok);   // sum b_ij == N F, exact
      CHECK(ch.regroup_identity_ok);    // sum exchange is an identity
      CHECK(ch.cs_ok);                  // Cauchy-Schwarz slack >= 0
      CHECK(ch.cs_slack >= 0);
      CHECK(ch.user_cap_ok);
      CHECK(ch.en_cap_ok);
      CHECK(ch.fronthaul_chain_ok);
      CHECK(ch.total >= ch.f_of_x);
      CHECK(ch.final_ok);
    }
  }
}

TEST_CASE("the checker refuses infeasible allocations instead of passing them") {
  auto al = base_allocation(kHalfHalf);
  al.cache[0][1][0] += Rational(1);  // break completeness for file 1
  CHECK_FALSE(check_feasible(al).empty());
  CHECK_THROWS_AS(verify_converse_chain(al), InvalidParams);
}

TEST_CASE("sampler is deterministic per seed") {
  auto a = sample_feasible_allocation(kHalfHalf, 7, 48);
  auto b = sample_feasible_allocation(kHalfHalf, 7, 48);
  CHECK(a.cache == b.cache);
  CHECK(a.push == b.push);
  auto c = sample_feasible_allocation(kHalfHalf, 8, 48);
  CHECK((a.cache != c.cache || a.push != c.push));
}

TEST_CASE("sampler rejects oversized instances") {
  CHECK_THROWS_AS(base_allocation(make(4, 2, 2, 1, 4, 0.5, 0.0, 1.0)), InvalidParams);
  CHECK_THROWS_AS(base_allocation(make(2, 2, 2, 1, 16, 0.5, 0.0, 1.0)), InvalidParams);
}
