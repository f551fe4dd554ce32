// Command-line surface for the cache-aided cloud-RAN NDT toolkit:
// analyze | sweep | simulate | verify.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cachedof/bounds.hpp"
#include "cachedof/delivery.hpp"
#include "cachedof/json_io.hpp"
#include "cachedof/ndt.hpp"
#include "cachedof/params.hpp"
#include "cachedof/sweep.hpp"
#include "cachedof/verify.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitDecodeFailure = 4;
constexpr int kExitVerifyFailed = 5;

struct CommonFlags {
  int kt = 3, nt = 1, kr = 3;
  int n_files = 0;   // default: kr
  int f_packets = 0; // default: minimal valid split
  double mu_t = 0.0, mu_r = 0.0, r = 1.0;
  int mt_units = -1, mr_units = -1;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--kt", f.kt, "edge nodes K_T")->take_last();
  cmd->add_option("--kr", f.kr, "users K_R")->take_last();
  cmd->add_option("--nt", f.nt, "antennas per EN n_T")->take_last();
  cmd->add_option("--n-files", f.n_files, "library size N (default K_R)")->take_last();
  cmd->add_option("--f-packets", f.f_packets, "packets per file F")->take_last();
  cmd->add_option("--mu-t", f.mu_t, "EN cache fraction")->take_last();
  cmd->add_option("--mu-r", f.mu_r, "user cache fraction")->take_last();
  cmd->add_option("--mt-units", f.mt_units, "EN cache budget mu_T*K_T (wins over --mu-t)")->take_last();
  cmd->add_option("--mr-units", f.mr_units, "user cache budget mu_R*K_R (wins over --mu-r)")->take_last();
  cmd->add_option("--r", f.r, "fronthaul rate exponent")->take_last();
  cmd->add_option("--out", f.out, "write output to file instead of stdout")->take_last();
  cmd->add_option("--format", f.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))->take_last();
}

cachedof::SystemParams to_params(const CommonFlags& f, const CLI::App* cmd) {
  cachedof::SystemParams p;
  p.kt = f.kt;
  p.nt = f.nt;
  p.kr = f.kr;
  p.n_files = f.n_files > 0 ? f.n_files : f.kr;
  p.f_packets = f.f_packets > 0 ? f.f_packets : 1;
  p.mu_t = f.mu_t;
  p.mu_r = f.mu_r;
  p.r = f.r;
  if (f.mt_units >= 0) {
    if (cmd->count("--mu-t") > 0)
      std::cerr << "warning: --mt-units overrides --mu-t\n";
    p.mu_t = static_cast<double>(f.mt_units) / p.kt;
  }
  if (f.mr_units >= 0) {
    if (cmd->count("--mu-r") > 0)
      std::cerr << "warning: --mr-units overrides --mu-r\n";
    p.mu_r = static_cast<double>(f.mr_units) / p.kr;
  }
  return p;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream os(out_path, std::ios::binary);
    os << text << "\n";
  }
}

// Config file: JSON object with the same keys as the long flags
// (kt, kr, nt, n-files, f-packets, mu-t, mu-r, mt-units, mr-units, r, seed,
// preset, format, out). Command-line flags override the file.
std::vector<std::string> splice_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream is(path);
  if (!is) throw cachedof::InvalidParams("cannot open config file: " + path);
  nlohmann::json cfg = nlohmann::json::parse(is);
  std::vector<std::string> synth;
  if (!args.empty()) synth.push_back(args.front());  // subcommand first
  for (auto& [key, value] : cfg.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) synth.push_back("--" + key);
      continue;
    }
    synth.push_back("--" + key);
    if (value.is_string())
      synth.push_back(value.get<std::string>());
    else
      synth.push_back(nlohmann::json(value).dump());
  }
  // original flags come after the config-derived ones, so they win
  synth.insert(synth.end(), args.begin() + (args.empty() ? 0 : 1), args.end());
  return synth;
}

int cmd_analyze(const CommonFlags& flags, const CLI::App* cmd) {
  cachedof::SystemParams p = to_params(flags, cmd);
  auto rep = cachedof::validate(p);
  if (!rep.ok) {
    std::cerr << "invalid parameters:";
    for (const auto& v : rep.violations) std::cerr << " [" << v << "]";
    std::cerr << "\n";
    return kExitInvalid;
  }
  cachedof::OrderedJson out;
  out["params"] = cachedof::to_json(p);
  bool integer = p.integer_regime();
  out["memory_sharing"] = !integer;
  cachedof::NdtBreakdown up;
  if (integer) {
    cachedof::SystemParams q = p.snapped(cachedof::kIntegerRegimeTol);
    up = cachedof::delta_up(q);
    cachedof::BoundsReport bounds = cachedof::bounds_report(q);
    out["m"] = up.m_used;
    out["m_branch"] = cachedof::to_string(cachedof::m_opt(q).branch);
    out["ndt"] = cachedof::to_json(up);
    out["bounds"] = cachedof::to_json(bounds);
  } else {
    up = cachedof::delta_up_memshare_breakdown(p);
    out["m"] = up.m_used;
    out["m_branch"] = "memory_sharing";
    out["ndt"] = cachedof::to_json(up);
    double fm = cachedof::f_min(p);
    double lb = cachedof::delta_lb_prime(p);
    out["bounds"] = cachedof::OrderedJson{{"delta_up", up.delta_total},
                                          {"f_min", fm},
                                          {"delta_lb_prime", lb},
                                          {"gap", lb > 0 ? up.delta_total / lb : 1.0},
                                          {"branch_tags", {{"m", "memory_sharing"}}}};
  }
  emit(out.dump(2), flags.out);
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const CLI::App* cmd, const std::string& preset,
              const std::string& axis_name, const std::vector<double>& values, double from,
              double to, double step) {
  cachedof::SweepSpec spec;
  if (preset == "fig2") {
    spec = cachedof::preset_fig2();
  } else if (preset == "fig3") {
    spec = cachedof::preset_fig3();
  } else if (!preset.empty()) {
    std::cerr << "unknown preset: " << preset << "\n";
    return kExitInvalid;
  } else {
    spec.axis = cachedof::axis_from_string(axis_name);
    spec.values = !values.empty() ? values : cachedof::range_values(from, to, step);
    spec.series = {to_params(flags, cmd)};
  }
  std::vector<cachedof::SweepRow> rows = cachedof::run_sweep(spec);
  if (flags.format == "csv") {
    std::string text = cachedof::csv_header();
    for (const auto& row : rows) text += "\n" + cachedof::to_csv_line(row);
    emit(text, flags.out);
  } else {
    cachedof::OrderedJson arr = cachedof::OrderedJson::array();
    for (const auto& row : rows) arr.push_back(cachedof::to_json(row));
    emit(arr.dump(2), flags.out);
  }
  return 0;
}

int cmd_simulate(const CommonFlags& flags, const CLI::App* cmd, std::uint64_t seed,
                 int m_override, bool dump_placement, bool dump_slots, double awgn_snr_db) {
  cachedof::SystemParams p = to_params(flags, cmd);
  auto rep = cachedof::validate(p);
  if (!rep.ok) {
    std::cerr << "invalid parameters\n";
    return kExitInvalid;
  }
  if (!cachedof::SystemParams::near_integer(p.mu_t_kt()) ||
      !cachedof::SystemParams::near_integer(p.mu_r_kr())) {
    std::cerr << "note: snapping cache budgets to (" << std::llround(p.mu_t_kt()) << ", "
              << std::llround(p.mu_r_kr()) << ") integer units\n";
  }
  double noise_std = awgn_snr_db > 0.0 ? std::pow(10.0, -awgn_snr_db / 20.0) : 0.0;
  cachedof::SimulationArtifacts art = cachedof::run_simulation_full(p, seed, m_override, noise_std);
  cachedof::OrderedJson out = cachedof::to_json(art.report);
  if (dump_placement) {
    out["placement"] = cachedof::to_json(art.placement);
    out["fronthaul_plan"] = cachedof::to_json(art.plan);
  }
  emit(out.dump(2), flags.out);
  if (dump_slots) {
    for (std::size_t bi = 0; bi < art.schedule.batches.size(); ++bi) {
      const auto& b = art.schedule.batches[bi];
      std::ostringstream os;
      os << "batch " << bi << " rep " << b.rep << " S={";
      for (int u : cachedof::mask_to_list(b.active_users)) os << u + 1 << ",";
      os << "} tau_t={";
      for (int e : cachedof::mask_to_list(b.tau_t)) os << e + 1 << ",";
      os << "} x" << art.schedule.reps << " slots";
      for (const auto& msg : b.messages) {
        os << "\n  T={";
        for (int u : cachedof::mask_to_list(msg.t_set)) os << u + 1 << ",";
        os << "} group={";
        for (int e : cachedof::mask_to_list(msg.group)) os << e + 1 << ",";
        os << "}";
        for (std::size_t c = 0; c < msg.constituents.size(); ++c) {
          const auto& sf = msg.constituents[c];
          os << " (n=" << sf.file << ",tr={";
          for (int u : cachedof::mask_to_list(sf.tau_r)) os << u + 1 << ",";
          os << "},#" << msg.sub_idx[c] << ")";
        }
      }
      std::cerr << os.str() << "\n";
    }
  }
  if (!art.report.decode_ok) {
    std::cerr << "decode failure at seed " << seed << "\n";
    return kExitDecodeFailure;
  }
  return 0;
}

int cmd_verify(int sim_seeds, int chain_samples, int negative_seeds, const std::string& mutate) {
  cachedof::VerifyOptions opt;
  opt.sim_seeds = sim_seeds;
  opt.chain_samples = chain_samples;
  opt.negative_seeds = negative_seeds;
  if (mutate == "drop-local-gain") {
    opt.mutant = cachedof::Mutant::kDropLocalGain;
  } else if (!mutate.empty()) {
    std::cerr << "unknown mutant: " << mutate << "\n";
    return kExitInvalid;
  }
  auto results = cachedof::run_all_checks(opt);
  bool all = true;
  for (const auto& res : results) {
    std::printf("[%s] %-28s %s\n", res.pass ? "PASS" : "FAIL", res.name.c_str(),
                res.details.c_str());
    all = all && res.pass;
  }
  return all ? 0 : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cache-aided cloud-RAN NDT analysis, bounds, and delivery simulation"};
  app.require_subcommand(1);

  CommonFlags fa, fs, fsim;
  auto* analyze = app.add_subcommand("analyze", "closed-form NDT and converse bounds at a point");
  add_common(analyze, fa);

  auto* sweep = app.add_subcommand("sweep", "parameter sweeps (CSV/JSON)");
  add_common(sweep, fs);
  std::string preset, axis_name = "mu_r_kr";
  std::vector<double> values;
  double from = 0.0, to = 0.0, step = 1.0;
  sweep->add_option("--preset", preset, "fig2 | fig3")->take_last();
  sweep->add_option("--axis", axis_name, "mu_r_kr | mu_t_kt | r | n_t")->take_last();
  sweep->add_option("--values", values, "explicit axis values")->delimiter(',')->take_last();
  sweep->add_option("--from", from, "axis range start")->take_last();
  sweep->add_option("--to", to, "axis range end")->take_last();
  sweep->add_option("--step", step, "axis range step")->take_last();

  auto* simulate = app.add_subcommand("simulate", "symbol-level delivery simulation");
  add_common(simulate, fsim);
  std::uint64_t seed = 1;
  int m_override = -1;
  bool dump_placement = false, dump_slots = false;
  double awgn_snr_db = 0.0;
  simulate->add_option("--seed", seed, "channel/coefficient seed")->take_last();
  simulate->add_option("--m-override", m_override, "force transmit-side multiplicity")->take_last();
  simulate->add_flag("--dump-placement", dump_placement, "include placement and plan in output");
  simulate->add_flag("--dump-slots", dump_slots, "print slot trace to stderr");
  simulate->add_option("--awgn-snr-db", awgn_snr_db, "add AWGN at this SNR (smoke test only)")->take_last();

  auto* verify = app.add_subcommand("verify", "run the full verification suite");
  int sim_seeds = 100, chain_samples = 1000, negative_seeds = 20;
  std::string mutate;
  verify->add_option("--sim-seeds", sim_seeds, "seeds per simulation instance")->take_last();
  verify->add_option("--chain-samples", chain_samples, "sampled allocations per config")->take_last();
  verify->add_option("--negative-seeds", negative_seeds, "seeds for the overload probe")->take_last();
  verify->add_option("--mutate", mutate, "inject a fault (drop-local-gain) to test the harness")->take_last();

  std::vector<std::string> args;
  try {
    args = splice_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  }
  try {
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitInvalid : 0;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(fa, analyze);
    if (sweep->parsed()) return cmd_sweep(fs, sweep, preset, axis_name, values, from, to, step);
    if (simulate->parsed())
      return cmd_simulate(fsim, simulate, seed, m_override, dump_placement, dump_slots,
                          awgn_snr_db);
    if (verify->parsed()) return cmd_verify(sim_seeds, chain_samples, negative_seeds, mutate);
  } catch (const cachedof::InvalidParams& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  } catch (const cachedof::NonIntegerRegime& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  } catch (const cachedof::InvalidMultiplicity& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  } catch (const cachedof::Infeasible& e) {
    std::cerr << e.what() << "\n";
    return kExitInfeasible;
  } catch (const cachedof::InfeasibleDelivery& e) {
    std::cerr << e.what() << "\n";
    return kExitInfeasible;
  } catch (const cachedof::InfeasibleFronthaul& e) {
    std::cerr << e.what() << "\n";
    return kExitInfeasible;
  } catch (const cachedof::DegenerateAllCached& e) {
    std::cerr << e.what() << "\n";
    return kExitInfeasible;
  } catch (const cachedof::SingularDecodeSystem& e) {
    std::cerr << e.what() << "\n";
    return kExitDecodeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
