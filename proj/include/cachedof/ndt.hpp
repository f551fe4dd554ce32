#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "cachedof/errors.hpp"
#include "cachedof/params.hpp"

namespace cachedof {

// Selection branch that produced the transmit-side multiplicity.
enum class MultiplicityBranch {
  kFronthaulAugmented,  // mu_t*kt below m(r,mu_r): fronthaul raises multiplicity
  kCacheSufficient,     // m = mu_t*kt, no fronthaul needed
  kMaxUseful,           // EN caches exceed the useful maximum
  kRoundingGuard,       // one step below the closed-form pick costs less
  kNoFronthaulGuard,    // fronthaul augmentation rejected as not worth its delay
  kAllCached,           // mu_r = 1, nothing to deliver
  kNoFronthaul,         // r = 0, multiplicity limited to cached content
};

inline const char* to_string(MultiplicityBranch b) {
  switch (b) {
    case MultiplicityBranch::kFronthaulAugmented: return "fronthaul_augmented";
    case MultiplicityBranch::kCacheSufficient: return "cache_sufficient";
    case MultiplicityBranch::kMaxUseful: return "max_useful";
    case MultiplicityBranch::kRoundingGuard: return "rounding_guard";
    case MultiplicityBranch::kNoFronthaulGuard: return "no_fronthaul_guard";
    case MultiplicityBranch::kAllCached: return "all_cached";
    case MultiplicityBranch::kNoFronthaul: return "no_fronthaul";
  }
  return "?";
}

struct MultiplicityDecision {
  int m_max = 0;
  double r_th = 0.0;
  double m_0 = 0.0;        // continuous stationary point (may be negative)
  int m_zero_cache = 0;    // integer m(r, mu_R)
  int m_final = 0;         // integer m(r, mu_T, mu_R)
  MultiplicityBranch branch = MultiplicityBranch::kCacheSufficient;
};

struct NdtBreakdown {
  double delta_f = 0.0;
  double delta_e = 0.0;
  double delta_total = 0.0;
  int m_used = 0;
};

// Largest useful multiplicity: m <= K_T and n_T m + K_R mu_R bounded by the
// serving cap (ceiling taken so the last group may overshoot K_R).
inline int m_max(const SystemParams& p) {
  if (p.mu_r >= 1.0) return 0;
  double need = p.kr * (1.0 - p.mu_r) / p.nt;
  int ceil_need = static_cast<int>(std::ceil(need - 1e-12));
  return std::min(p.kt, std::max(ceil_need, 1));
}

inline double r_threshold(const SystemParams& p) {
  if (p.mu_r >= 1.0) throw DegenerateAllCached("r_threshold undefined at mu_r = 1");
  double mm = m_max(p);
  double s = mm + p.kr * p.mu_r / p.nt;
  return p.nt / (p.kt * (1.0 - p.mu_r)) * s * s;
}

// Stationary point of the continuous total-NDT relaxation; 0 when r = 0.
inline double m_stationary(const SystemParams& p) {
  if (p.mu_r >= 1.0) throw DegenerateAllCached("m_stationary undefined at mu_r = 1");
  if (p.r <= 0.0) return 0.0;
  return std::sqrt(p.kt * (1.0 - p.mu_r) * p.r / p.nt) - p.kr * p.mu_r / p.nt;
}

inline int round_half_up(double x) {
  return static_cast<int>(std::floor(x + 0.5));
}

// Integer multiplicity for the mu_T = 0 problem: round the stationary point,
// clamp into [1, m_max]; m_max outright once r passes the threshold.
inline int m_zero_en_cache(const SystemParams& p) {
  if (p.mu_r >= 1.0) return 0;
  int mm = m_max(p);
  if (p.r >= r_threshold(p)) return mm;
  return std::clamp(round_half_up(m_stationary(p)), 1, mm);
}

inline int users_served(int m_t, int m_r, const SystemParams& p) {
  return std::min(static_cast<long long>(p.kr),
                  static_cast<long long>(p.nt) * m_t + m_r);
}

inline double delta_fronthaul(int m, const SystemParams& p) {
  double t = p.mu_t_kt();
  if (m <= t + kIntegerRegimeTol) return 0.0;
  if (p.r <= 0.0) throw InfeasibleFronthaul("m > mu_t*kt with r = 0");
  return p.kr * (m - t) / (p.kt * p.r);
}

inline double delta_edge(int m, const SystemParams& p) {
  if (p.mu_r >= 1.0) return 0.0;
  int u = users_served(m, p.r_units(), p);
  if (u < 1) throw InfeasibleDelivery("no user can be served (m = 0, empty user caches)");
  return p.kr * (1.0 - p.mu_r) / u;
}

namespace detail {

// delta_F + delta_E for a fixed multiplicity, nullopt when undeliverable.
inline std::optional<double> delta_for_m(int m, const SystemParams& p) {
  int a = p.r_units();
  int u = users_served(m, a, p);
  if (u < 1) return std::nullopt;
  int t = p.t_units();
  double df = 0.0;
  if (m > t) {
    if (p.r <= 0.0) return std::nullopt;
    df = p.kr * static_cast<double>(m - t) / (p.kt * p.r);
  }
  return df + p.kr * (1.0 - p.mu_r) / u;
}

}  // namespace detail

// Transmit-side multiplicity. The three-branch closed form has two O(1)
// fallback candidates: one step below the pick (the serving cap can make the
// rounded stationary point or the threshold branch overshoot), and the
// no-fronthaul multiplicity min(mu_t*kt, m_max).
inline MultiplicityDecision m_opt(const SystemParams& p) {
  MultiplicityDecision d;
  if (p.mu_r >= 1.0) {
    d.branch = MultiplicityBranch::kAllCached;
    return d;
  }
  int t = p.t_units();
  d.m_max = m_max(p);
  d.r_th = r_threshold(p);
  d.m_0 = m_stationary(p);
  d.m_zero_cache = m_zero_en_cache(p);
  if (p.r <= 0.0) {
    d.m_final = std::min(t, d.m_max);
    d.branch = MultiplicityBranch::kNoFronthaul;
    if (d.m_final < 1) throw InfeasibleDelivery("r = 0 with empty EN caches");
    return d;
  }
  int m_paper;
  if (t < d.m_zero_cache) {
    m_paper = d.m_zero_cache;
    d.branch = MultiplicityBranch::kFronthaulAugmented;
  } else if (t <= d.m_max) {
    m_paper = t;
    d.branch = MultiplicityBranch::kCacheSufficient;
  } else {
    m_paper = d.m_max;
    d.branch = MultiplicityBranch::kMaxUseful;
  }
  d.m_final = m_paper;
  auto best = detail::delta_for_m(m_paper, p);
  const std::pair<int, MultiplicityBranch> fallbacks[] = {
      {m_paper - 1, MultiplicityBranch::kRoundingGuard},
      {std::min(t, d.m_max), MultiplicityBranch::kNoFronthaulGuard},
  };
  for (auto [cand, branch] : fallbacks) {
    if (cand < 1 || cand == d.m_final) continue;
    auto cost = detail::delta_for_m(cand, p);
    if (cost && (!best || *cost < *best - 1e-15)) {
      best = cost;
      d.m_final = cand;
      d.branch = branch;
    }
  }
  return d;
}

inline NdtBreakdown delta_up(const SystemParams& p) {
  NdtBreakdown b;
  if (p.mu_r >= 1.0) return b;
  MultiplicityDecision d = m_opt(p);
  b.m_used = d.m_final;
  b.delta_f = delta_fronthaul(d.m_final, p);
  b.delta_e = delta_edge(d.m_final, p);
  b.delta_total = b.delta_f + b.delta_e;
  return b;
}

// Achievable NDT for fractional cache budgets: time sharing between the two
// adjacent integer placements, independently on each of mu_R K_R, mu_T K_T.
// Components interpolate linearly along with the total.
inline NdtBreakdown delta_up_memshare_breakdown(const SystemParams& p) {
  require_valid(p);
  auto at_units = [&p](int tu, int au) {
    SystemParams q = p;
    q.mu_t = static_cast<double>(tu) / p.kt;
    q.mu_r = static_cast<double>(au) / p.kr;
    return delta_up(q);
  };
  double tkt = p.mu_t_kt();
  double akr = p.mu_r_kr();
  int t0 = static_cast<int>(std::floor(tkt + kIntegerRegimeTol));
  int a0 = static_cast<int>(std::floor(akr + kIntegerRegimeTol));
  t0 = std::clamp(t0, 0, p.kt);
  a0 = std::clamp(a0, 0, p.kr);
  int t1 = std::min(t0 + 1, p.kt);
  int a1 = std::min(a0 + 1, p.kr);
  double wt = (t1 == t0) ? 0.0 : (tkt - t0) / (t1 - t0);
  double wa = (a1 == a0) ? 0.0 : (akr - a0) / (a1 - a0);
  wt = std::clamp(wt, 0.0, 1.0);
  wa = std::clamp(wa, 0.0, 1.0);
  NdtBreakdown v00 = at_units(t0, a0);
  NdtBreakdown v01 = (wa > 0.0) ? at_units(t0, a1) : v00;
  NdtBreakdown v10 = (wt > 0.0) ? at_units(t1, a0) : v00;
  NdtBreakdown v11 = (wt > 0.0 && wa > 0.0) ? at_units(t1, a1) : ((wt > 0.0) ? v10 : v01);
  auto blend = [&](double f00, double f01, double f10, double f11) {
    return (1 - wt) * ((1 - wa) * f00 + wa * f01) + wt * ((1 - wa) * f10 + wa * f11);
  };
  NdtBreakdown out;
  out.delta_f = blend(v00.delta_f, v01.delta_f, v10.delta_f, v11.delta_f);
  out.delta_e = blend(v00.delta_e, v01.delta_e, v10.delta_e, v11.delta_e);
  out.delta_total = out.delta_f + out.delta_e;
  out.m_used = v00.m_used;  // the floor-corner multiplicity
  return out;
}

inline double delta_up_memshare(const SystemParams& p) {
  return delta_up_memshare_breakdown(p).delta_total;
}

}  // namespace cachedof
