#include <catch2/catch_amalgamated.hpp>

#include "cachedof/verify.hpp"

using namespace cachedof;

TEST_CASE("fast criteria pass on the real implementation") {
  VerifyOptions opt;
  opt.sim_seeds = 3;
  opt.chain_samples = 5;
  opt.negative_seeds = 3;
  CHECK(check_point_values(opt).pass);
  CHECK(check_fig3_shape(opt).pass);
  CHECK(check_sim_agreement(opt).pass);
  CHECK(check_converse_chain(opt).pass);
  CHECK(check_serving_negative(opt).pass);
}

TEST_CASE("an injected fault in the achievable NDT trips the harness") {
  VerifyOptions opt;
  opt.mutant = Mutant::kDropLocalGain;
  auto gap = check_gap_certificate(opt);
  CHECK_FALSE(gap.pass);
  auto points = check_point_values(opt);
  CHECK_FALSE(points.pass);
}
