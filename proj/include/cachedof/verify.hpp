#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "cachedof/allocation.hpp"
#include "cachedof/bounds.hpp"
#include "cachedof/delivery.hpp"
#include "cachedof/ndt.hpp"
#include "cachedof/parallel.hpp"

namespace cachedof {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string details;
};

// Deliberate fault injection for testing the harness itself.
enum class Mutant {
  kNone,
  kDropLocalGain,  // delta_E loses its (1 - mu_R) local caching factor
};

struct VerifyOptions {
  int sim_seeds = 100;
  int chain_samples = 1000;
  int chain_moves = 48;
  int negative_seeds = 20;
  int threads = 0;
  Mutant mutant = Mutant::kNone;
};

namespace detail {

inline double delta_up_checked(const SystemParams& p, Mutant mutant) {
  if (p.mu_r >= 1.0) return 0.0;
  NdtBreakdown b = delta_up(p);
  if (mutant == Mutant::kDropLocalGain) {
    int u = users_served(b.m_used, p.r_units(), p);
    return b.delta_f + static_cast<double>(p.kr) / u;
  }
  return b.delta_total;
}

struct GridSpec {
  int kt_max = 8;
  int nt_max = 4;
  int kr_max = 12;
  std::vector<double> r_values{0.25, 0.5, 1, 2, 4, 8, 16, 32};
};

template <typename Fn>
void for_each_grid_point(const GridSpec& g, Fn&& fn) {
  for (int kt = 1; kt <= g.kt_max; ++kt)
    for (int nt = 1; nt <= g.nt_max; ++nt)
      for (int kr = 1; kr <= g.kr_max; ++kr)
        for (int t = 0; t <= kt; ++t)
          for (int j = 0; j <= kr; ++j)
            for (double r : g.r_values)
              fn(SystemParams::from_units(kt, nt, kr, kr, 1, t, j, r));
}

inline std::string describe(const SystemParams& p) {
  std::ostringstream os;
  os << "kt=" << p.kt << " nt=" << p.nt << " kr=" << p.kr << " mu_t*kt=" << p.mu_t_kt()
     << " mu_r*kr=" << p.mu_r_kr() << " r=" << p.r;
  return os.str();
}

}  // namespace detail

// Criterion: gap certificate 1 <= delta_up/delta'_lb <= 3/2 and sandwich
// delta'_lb <= f_min <= delta_up over the full integer-regime grid.
inline CheckResult check_gap_certificate(const VerifyOptions& opt) {
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  detail::GridSpec grid;
  // flatten the two outer axes for parallel chunks
  std::vector<std::pair<int, int>> outer;
  for (int kt = 1; kt <= grid.kt_max; ++kt)
    for (int nt = 1; nt <= grid.nt_max; ++nt) outer.emplace_back(kt, nt);
  std::atomic<long long> points{0};
  std::atomic<long long> violations{0};
  std::mutex mu;
  double max_gap = 0.0, min_gap = 10.0;
  std::vector<std::string> first_by_chunk(outer.size());
  parallel_for(outer.size(), thread_count(opt.threads), [&](std::size_t oi) {
    auto [kt, nt] = outer[oi];
    long long local_points = 0, local_viol = 0;
    double local_max = 0.0, local_min = 10.0;
    std::string local_first;
    for (int kr = 1; kr <= grid.kr_max; ++kr)
      for (int t = 0; t <= kt; ++t)
        for (int j = 0; j <= kr; ++j)
          for (double r : grid.r_values) {
            SystemParams p = SystemParams::from_units(kt, nt, kr, kr, 1, t, j, r);
            ++local_points;
            double up, fm, lb, gap;
            if (j == kr) {
              up = fm = lb = 0.0;
              gap = 1.0;
            } else {
              up = detail::delta_up_checked(p, opt.mutant);
              fm = f_min(p);
              lb = delta_lb_prime(p);
              gap = lb > 0.0 ? up / lb : 1.0;
            }
            bool ok = gap >= 1.0 - 1e-9 && gap <= 1.5 + 1e-9 && lb <= fm + 1e-12 &&
                      fm <= up + 1e-9;
            if (!ok) {
              ++local_viol;
              if (local_first.empty()) {
                std::ostringstream os;
                os << detail::describe(p) << " up=" << up << " f_min=" << fm << " lb=" << lb
                   << " gap=" << gap;
                local_first = os.str();
              }
            }
            local_max = std::max(local_max, gap);
            local_min = std::min(local_min, gap);
          }
    points += local_points;
    violations += local_viol;
    first_by_chunk[oi] = local_first;
    std::lock_guard<std::mutex> lock(mu);
    max_gap = std::max(max_gap, local_max);
    min_gap = std::min(min_gap, local_min);
  });
  double secs = std::chrono::duration<double>(clock::now() - start).count();
  CheckResult res;
  res.name = "gap certificate (grid)";
  res.pass = violations == 0 && secs < 60.0;
  std::ostringstream os;
  os << points.load() << " points, " << violations.load() << " violations, max gap "
     << max_gap << ", min gap " << min_gap << ", " << secs << " s";
  for (const auto& first : first_by_chunk) {
    if (!first.empty()) {
      os << "; first: " << first;
      break;
    }
  }
  res.details = os.str();
  return res;
}

// Criterion: hand-derived point values of the achievable NDT, exact to 1e-12.
inline CheckResult check_point_values(const VerifyOptions& opt) {
  CheckResult res;
  res.name = "point values";
  std::ostringstream os;
  bool ok = true;
  auto expect = [&](double got, double want, const std::string& what) {
    if (std::abs(got - want) > 1e-12) {
      ok = false;
      os << what << ": got " << got << " want " << want << "; ";
    }
  };
  auto up = [&](int t_units, int j_units) {
    return detail::delta_up_checked(
        SystemParams::from_units(12, 4, 24, 24, 1, t_units, j_units, 4.0), opt.mutant);
  };
  expect(up(6, 0), 1.0, "delta_up at (12,24,4,r4,t6,mu_r0)");
  for (int j = 0; j <= 24; ++j) expect(up(6, j), 1.0 - j / 24.0, "linear series j=" + std::to_string(j));
  // memory sharing on the half-integer steps of the same series
  for (int h = 1; h < 48; h += 2) {
    SystemParams p = SystemParams::from_units(12, 4, 24, 24, 1, 6, 0, 4.0);
    p.mu_r = h / 48.0;
    if (opt.mutant == Mutant::kNone)
      expect(delta_up_memshare(p), 1.0 - h / 48.0, "memshare series h=" + std::to_string(h));
  }
  expect(up(0, 0), 3.5, "delta_up at (12,24,4,r4,mu_t0,mu_r0)");
  expect(detail::delta_up_checked(
             SystemParams::from_units(3, 1, 3, 3, 9, 1, 1, 4.5), opt.mutant),
         8.0 / 9.0, "delta_up at (3,3,1,r4.5,1/3,1/3)");
  res.pass = ok;
  res.details = ok ? "all point values exact to 1e-12" : os.str();
  return res;
}

// Criterion: transmit-side multiplicity shape on the fig3 preset.
inline CheckResult check_fig3_shape(const VerifyOptions&) {
  CheckResult res;
  res.name = "fig3 multiplicity shape";
  std::ostringstream os;
  bool ok = true;
  for (double r : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    int prev = 1 << 20;
    for (int j = 0; j <= 24; ++j) {
      SystemParams p = SystemParams::from_units(12, 4, 24, 24, 1, 4, j, r);
      int m = (j == 24) ? 0 : m_opt(p).m_final;
      if (m > prev) {
        ok = false;
        os << "m increases at r=" << r << " j=" << j << "; ";
      }
      prev = m;
      if (j == 0 && r == 4.0 && m != 4) { ok = false; os << "m(r=4, j=0) = " << m << " != 4; "; }
      if (j == 0 && r == 16.0 && m != 6) { ok = false; os << "m(r=16, j=0) = " << m << " != 6; "; }
      if (j == 12 && m != 3) { ok = false; os << "m(r=" << r << ", j=12) = " << m << " != 3; "; }
    }
  }
  res.pass = ok;
  res.details = ok ? "non-increasing in mu_r*kr; pinned values match" : os.str();
  return res;
}

// Criterion: symbol-level simulation reproduces the analytical NDTs exactly
// and decodes noiselessly on every seed.
inline CheckResult check_sim_agreement(const VerifyOptions& opt) {
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  CheckResult res;
  res.name = "simulation agreement";
  std::vector<SystemParams> instances;
  {
    SystemParams a;
    a.kt = 3; a.nt = 1; a.kr = 3; a.n_files = 3; a.f_packets = 9;
    a.mu_t = 1.0 / 3; a.mu_r = 1.0 / 3; a.r = 4.5;
    SystemParams b;
    b.kt = 2; b.nt = 2; b.kr = 4; b.n_files = 4; b.f_packets = 12;
    b.mu_t = 0.5; b.mu_r = 0.5; b.r = 2.0;
    SystemParams c;
    c.kt = 4; c.nt = 1; c.kr = 4; c.n_files = 4; c.f_packets = 16;
    c.mu_t = 0.25; c.mu_r = 0.25; c.r = 4.0;
    instances = {a, b, c};
  }
  std::atomic<int> failures{0};
  std::mutex mu;
  std::string first;
  double worst_zf = 0.0, worst_err = 0.0;
  for (const SystemParams& p : instances) {
    parallel_for(opt.sim_seeds, thread_count(opt.threads), [&](std::size_t si) {
      SimReport rep = run_simulation(p, si + 1);
      bool ok = rep.exact_edge_match && rep.exact_fronthaul_match && rep.decode_ok &&
                rep.serving_bound_ok && rep.max_zf_residual <= kInterferenceTol;
      std::lock_guard<std::mutex> lock(mu);
      worst_zf = std::max(worst_zf, rep.max_zf_residual);
      worst_err = std::max(worst_err, rep.max_decode_rel_err);
      if (!ok) {
        ++failures;
        if (first.empty()) {
          std::ostringstream os;
          os << detail::describe(p) << " seed=" << si + 1 << " edge=" << rep.exact_edge_match
             << " fh=" << rep.exact_fronthaul_match << " decode=" << rep.decode_ok
             << " zf=" << rep.max_zf_residual;
          first = os.str();
        }
      }
    });
  }
  double secs = std::chrono::duration<double>(clock::now() - start).count();
  res.pass = failures == 0 && secs < 120.0;
  std::ostringstream os;
  os << instances.size() << " instances x " << opt.sim_seeds << " seeds, " << failures.load()
     << " failures, max ZF residual " << worst_zf << ", max decode err " << worst_err << ", "
     << secs << " s";
  if (!first.empty()) os << "; first: " << first;
  res.details = os.str();
  return res;
}

// Criterion: averaged converse chain on sampled feasible allocations of
// tiny instances.
inline CheckResult check_converse_chain(const VerifyOptions& opt) {
  CheckResult res;
  res.name = "converse chain";
  std::vector<SystemParams> configs;
  {
    auto mk = [](int n, int kt, int kr, int nt, int f, double mt, double mr, double r) {
      SystemParams p;
      p.kt = kt; p.nt = nt; p.kr = kr; p.n_files = n; p.f_packets = f;
      p.mu_t = mt; p.mu_r = mr; p.r = r;
      return p;
    };
    // N = K_R throughout: the averaged chain's user-cache step needs the
    // demand family to use every file equally often per position
    configs = {
        mk(2, 2, 2, 1, 2, 1.0, 0.0, 1.0),
        mk(2, 2, 2, 1, 4, 0.5, 0.5, 2.0),
        mk(3, 3, 3, 1, 9, 1.0 / 3, 1.0 / 3, 4.5),
        mk(2, 2, 2, 2, 4, 0.5, 0.0, 0.5),
        mk(2, 3, 2, 1, 6, 0.0, 0.5, 2.0),
    };
  }
  std::atomic<int> failures{0};
  std::mutex mu;
  std::string first;
  for (const SystemParams& p : configs) {
    parallel_for(opt.chain_samples, thread_count(opt.threads), [&](std::size_t si) {
      bool ok;
      std::string why;
      try {
        ConverseAllocation al = sample_feasible_allocation(p, si + 1, opt.chain_moves);
        ChainReport ch = averaged_objective_bound(al);
        ok = ch.final_ok && check_feasible(al).empty();
        if (!ok) why = "chain step failed";
      } catch (const std::exception& e) {
        ok = false;
        why = e.what();
      }
      if (!ok) {
        ++failures;
        std::lock_guard<std::mutex> lock(mu);
        if (first.empty()) first = detail::describe(p) + " seed=" + std::to_string(si + 1) + " " + why;
      }
    });
  }
  res.pass = failures == 0;
  std::ostringstream os;
  os << configs.size() << " configs x " << opt.chain_samples << " samples, " << failures.load()
     << " failures";
  if (!first.empty()) os << "; first: " << first;
  res.details = os.str();
  return res;
}

// Criterion: overloaded slots (one user beyond the serving bound) must fail.
inline CheckResult check_serving_negative(const VerifyOptions& opt) {
  CheckResult res;
  res.name = "serving-bound negative";
  bool ok = true;
  std::ostringstream os;
  int cases = 0;
  for (auto [nt, m, mr] : {std::tuple<int, int, int>{1, 2, 1}, {2, 1, 0}, {1, 1, 2}, {2, 2, 1}}) {
    for (int s = 1; s <= opt.negative_seeds; ++s) {
      OverloadProbe probe = overloaded_slot_probe(nt, m, mr, static_cast<std::uint64_t>(s));
      ++cases;
      if (probe.bound_check || !probe.strict_threw || probe.best_effort_residual < 1e-3) {
        ok = false;
        os << "nt=" << nt << " m=" << m << " mr=" << mr << " seed=" << s
           << " bound=" << probe.bound_check << " threw=" << probe.strict_threw
           << " resid=" << probe.best_effort_residual << "; ";
      }
    }
  }
  res.pass = ok;
  res.details = ok ? std::to_string(cases) + " overloaded slots all rejected" : os.str();
  return res;
}

// Criterion: monotonicity, memory-sharing continuity, bound continuity,
// convexity of the per-multiplicity NDT.
inline CheckResult check_properties(const VerifyOptions& opt) {
  CheckResult res;
  res.name = "property suite";
  std::ostringstream os;
  bool ok = true;
  detail::GridSpec grid;
  // monotone non-increasing along each axis, full grid
  for (int kt = 1; kt <= grid.kt_max && ok; ++kt)
    for (int nt = 1; nt <= grid.nt_max && ok; ++nt)
      for (int kr = 1; kr <= grid.kr_max && ok; ++kr) {
        auto up = [&](int t, int j, double r) {
          return detail::delta_up_checked(SystemParams::from_units(kt, nt, kr, kr, 1, t, j, r),
                                          Mutant::kNone);
        };
        for (int j = 0; j <= kr && ok; ++j)
          for (double r : grid.r_values) {
            double prev = 1e300;
            for (int t = 0; t <= kt; ++t) {
              double v = up(t, j, r);
              if (v > prev + 1e-9) { ok = false; os << "not monotone in mu_t at kt=" << kt << " nt=" << nt << " kr=" << kr << " j=" << j << " r=" << r << " t=" << t << "; "; break; }
              prev = v;
            }
          }
        for (int t = 0; t <= kt && ok; ++t) {
          for (double r : grid.r_values) {
            double prev = 1e300;
            for (int j = 0; j <= kr; ++j) {
              double v = up(t, j, r);
              if (v > prev + 1e-9) { ok = false; os << "not monotone in mu_r at kt=" << kt << " nt=" << nt << " kr=" << kr << " t=" << t << " r=" << r << " j=" << j << "; "; break; }
              prev = v;
            }
          }
          for (int j = 0; j <= kr && ok; ++j) {
            double prev = 1e300;
            for (double r : grid.r_values) {
              double v = up(t, j, r);
              if (v > prev + 1e-9) { ok = false; os << "not monotone in r at kt=" << kt << " nt=" << nt << " kr=" << kr << " t=" << t << " j=" << j << " r=" << r << "; "; break; }
              prev = v;
            }
          }
        }
      }
  // continuity of the memory-shared NDT across integer budgets
  // (piecewise-linear pieces: linear extrapolation onto the knot must agree)
  auto memshare_at = [](const SystemParams& base, double tkt, double akr) {
    SystemParams p = base;
    p.mu_t = tkt / base.kt;
    p.mu_r = akr / base.kr;
    return delta_up_memshare(p);
  };
  for (auto [kt, nt, kr, r] : {std::tuple<int, int, int, double>{12, 4, 24, 4.0},
                               {8, 2, 10, 2.0},
                               {5, 1, 7, 0.5},
                               {6, 3, 9, 16.0}}) {
    SystemParams base = SystemParams::from_units(kt, nt, kr, kr, 1, 0, 0, r);
    const double eps = 1e-6;
    for (int tu = 0; tu <= kt && ok; ++tu)
      for (int j = 0; j <= kr && ok; ++j) {
        double at = memshare_at(base, tu, j);
        if (j >= 1) {
          double lim = 2 * memshare_at(base, tu, j - eps) - memshare_at(base, tu, j - 2 * eps);
          if (std::abs(lim - at) > 1e-9) { ok = false; os << "memshare jump in mu_r at kt=" << kt << " j=" << j << "; "; }
        }
        if (tu >= 1) {
          double lim = 2 * memshare_at(base, tu - eps, j) - memshare_at(base, tu - 2 * eps, j);
          if (std::abs(lim - at) > 1e-9) { ok = false; os << "memshare jump in mu_t at kt=" << kt << " tu=" << tu << "; "; }
        }
      }
  }
  // continuity of delta'_lb in mu_t*kt at interval endpoints
  auto lb_at = [](const SystemParams& base, double tkt) {
    SystemParams p = base;
    p.mu_t = tkt / base.kt;
    return delta_lb_prime(p);
  };
  for (auto [kt, nt, kr, j, r] : {std::tuple<int, int, int, int, double>{12, 4, 24, 0, 4.0},
                                  {3, 1, 3, 1, 4.5},
                                  {8, 2, 10, 3, 2.0},
                                  {6, 3, 9, 4, 0.5},
                                  {8, 4, 12, 6, 16.0},
                                  {5, 1, 7, 2, 1.0}}) {
    SystemParams base = SystemParams::from_units(kt, nt, kr, kr, 1, 0, j, r);
    const double eps = 1e-6;
    for (int ti = 1; ti <= kt && ok; ++ti) {
      double at = lb_at(base, ti);
      double lim_l = 2 * lb_at(base, ti - eps) - lb_at(base, ti - 2 * eps);
      double lim_r = 2 * lb_at(base, ti + eps) - lb_at(base, ti + 2 * eps);
      if (std::abs(lim_l - at) > 1e-9 || (ti < kt && std::abs(lim_r - at) > 1e-9)) {
        ok = false;
        os << "delta'_lb jump at kt=" << kt << " j=" << j << " r=" << r << " t=" << ti << "; ";
      }
    }
  }
  // convexity of m -> delta_F(m) + delta_E(m) by second differences
  for (int kt = 1; kt <= grid.kt_max && ok; ++kt)
    for (int nt = 1; nt <= grid.nt_max && ok; ++nt)
      for (int kr = 1; kr <= grid.kr_max && ok; ++kr)
        for (int t = 0; t <= kt && ok; ++t)
          for (int j = 0; j < kr && ok; ++j)
            for (double r : {0.5, 2.0, 8.0}) {
              SystemParams p = SystemParams::from_units(kt, nt, kr, kr, 1, t, j, r);
              int mm = m_max(p);
              std::vector<double> vals;
              for (int m = 1; m <= mm; ++m)
                vals.push_back(delta_fronthaul(m, p) + delta_edge(m, p));
              for (std::size_t i = 1; i + 1 < vals.size(); ++i)
                if (vals[i + 1] - 2 * vals[i] + vals[i - 1] < -1e-9) {
                  ok = false;
                  os << "non-convex at kt=" << kt << " nt=" << nt << " kr=" << kr << " t=" << t
                     << " j=" << j << " r=" << r << "; ";
                  break;
                }
            }
  (void)opt;
  res.pass = ok;
  res.details = ok ? "monotonicity, continuity, convexity all hold" : os.str();
  return res;
}

inline std::vector<CheckResult> run_all_checks(const VerifyOptions& opt) {
  return {
      check_gap_certificate(opt), check_point_values(opt),   check_fig3_shape(opt),
      check_sim_agreement(opt),   check_converse_chain(opt), check_serving_negative(opt),
      check_properties(opt),
  };
}

}  // namespace cachedof
