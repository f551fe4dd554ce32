// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run via ctest or directly.

#include <cstdio>
#include <string>
#include <vector>

#include "cachedof/verify.hpp"

int main(int argc, char** argv) {
  cachedof::VerifyOptions opt;
  opt.sim_seeds = 100;
  opt.chain_samples = 1000;
  opt.negative_seeds = 20;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--quick") {
      opt.sim_seeds = 10;
      opt.chain_samples = 50;
    }
  }
  struct Entry {
    const char* label;
    cachedof::CheckResult result;
  };
  std::vector<Entry> entries;
  entries.push_back({"criterion 1 (gap certificate)", cachedof::check_gap_certificate(opt)});
  entries.push_back({"criterion 2 (point values)", cachedof::check_point_values(opt)});
  entries.push_back({"criterion 3 (fig3 shape)", cachedof::check_fig3_shape(opt)});
  entries.push_back({"criterion 4 (simulation agreement)", cachedof::check_sim_agreement(opt)});
  entries.push_back({"criterion 5 (converse chain)", cachedof::check_converse_chain(opt)});
  entries.push_back({"criterion 6 (serving-bound negative)",
                     cachedof::check_serving_negative(opt)});
  entries.push_back({"criterion 7 (property suite)", cachedof::check_properties(opt)});
  bool all = true;
  for (const auto& e : entries) {
    std::printf("[%s] %-36s %s\n", e.result.pass ? "PASS" : "FAIL", e.label,
                e.result.details.c_str());
    all = all && e.result.pass;
  }
  std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: FAILURES present");
  return all ? 0 : 1;
}
