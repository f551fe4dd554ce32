#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cachedof/ndt.hpp"
#include "cachedof/params.hpp"

namespace cachedof {

// Converse machinery for the multiplicative-gap certificate. The serving
// count per slot cannot exceed K_R, so the edge part of the averaged bound
// carries the local-caching floor (1 - mu_R); without it the certificate
// degrades exactly when n_T does not divide K_R (1 - mu_R).

// Edge-only term of the averaged bound at EN-multiplicity x.
inline double edge_bound_term(const SystemParams& p, double x) {
  double a = p.mu_r_kr();
  double raw = p.kr * (1.0 - p.mu_r) / (p.nt * x + a);
  return std::max(raw, 1.0 - p.mu_r);
}

// Averaged-objective lower bound as a function of the mean EN-multiplicity x.
// r = 0 keeps only the edge term for x <= mu_t*kt, +inf beyond.
inline double f_lower(double x, const SystemParams& p) {
  double t = p.mu_t_kt();
  if (p.r <= 0.0) {
    if (x > t + kIntegerRegimeTol) return std::numeric_limits<double>::infinity();
    return edge_bound_term(p, x);
  }
  return p.kr / (p.kt * p.r) * (x - t) + edge_bound_term(p, x);
}

struct XDomain {
  double x_min = 0.0;
  double x_max = 0.0;
};

inline XDomain x_domain(const SystemParams& p) {
  double t = p.mu_t_kt();
  return {std::max(t, 1.0), std::max(static_cast<double>(m_max(p)), t)};
}

// Real-valued minimizer candidate of the uncapped bound.
inline double m_star(const SystemParams& p) {
  if (p.mu_r >= 1.0) return 0.0;
  if (p.r >= r_threshold(p)) return static_cast<double>(m_max(p));
  return std::max(m_stationary(p), 1.0);
}

// Minimum of f_lower over the x domain. The capped edge term adds a kink at
// x_cap = K_R (1 - mu_R) / n_T beyond which f_lower increases, so the
// unconstrained minimizer is min(m_0, x_cap), clamped into the domain.
inline double f_min(const SystemParams& p) {
  if (p.mu_r >= 1.0) return 0.0;
  XDomain dom = x_domain(p);
  if (p.r <= 0.0) return f_lower(dom.x_min, p);
  double x_cap = p.kr * (1.0 - p.mu_r) / p.nt;
  double x_hat = std::clamp(std::min(m_stationary(p), x_cap), dom.x_min, dom.x_max);
  return f_lower(x_hat, p);
}

enum class LbBranch {
  kAllCached,
  kLineBelow,      // t below m(r,mu_R): parallel line through the chord endpoint
  kChordInterval,  // t in [m_r, m_r+1): backward chord extrapolation
  kEdgeOnly,       // t >= m_r+1: pure edge bound
};

inline const char* to_string(LbBranch b) {
  switch (b) {
    case LbBranch::kAllCached: return "all_cached";
    case LbBranch::kLineBelow: return "line_below_m_r";
    case LbBranch::kChordInterval: return "chord_interval";
    case LbBranch::kEdgeOnly: return "edge_only";
  }
  return "?";
}

struct LbValue {
  double value = 0.0;
  LbBranch branch = LbBranch::kEdgeOnly;
  bool floor_active = false;    // (1 - mu_R) floor engaged
  bool fmin_clipped = false;    // clipped at f_min
};

namespace detail {

inline double edge_raw(const SystemParams& p, double s) {
  return p.kr * (1.0 - p.mu_r) / (p.nt * s + p.mu_r_kr());
}

}  // namespace detail

// Piecewise converse bound delta'_lb, continuous in mu_t*kt and everywhere
// <= f_min:
//   t >= m_r+1      : edge bound at t
//   t in [m_r,m_r+1): chord through the next two integer edge values,
//                     extended backward (below the convex edge curve)
//   t <  m_r        : fronthaul line K_R (m_r - t)/(K_T r) anchored at the
//                     chord endpoint
// floored at (1 - mu_R) and clipped at f_min.
inline LbValue delta_lb_prime_detail(const SystemParams& p) {
  LbValue out;
  const double t = p.mu_t_kt();
  if (p.mu_r >= 1.0) {
    out.branch = LbBranch::kAllCached;
    return out;
  }
  int mm = m_max(p);
  int mr = m_zero_en_cache(p);
  double floor = 1.0 - p.mu_r;
  auto g = [&p](double s) { return detail::edge_raw(p, s); };
  double end_val = (mr <= mm - 1) ? 2.0 * g(mr + 1) - g(mr + 2) : g(mr);
  double base;
  if (t >= mr) {
    if (mr <= mm - 1 && t < mr + 1) {
      base = (mr + 2 - t) * g(mr + 1) + (t - mr - 1) * g(mr + 2);
      out.branch = LbBranch::kChordInterval;
    } else {
      base = g(t);
      out.branch = LbBranch::kEdgeOnly;
    }
  } else {
    if (p.r <= 0.0) {
      base = g(std::max(t, 1.0));  // no fronthaul: only the edge bound binds
    } else {
      base = p.kr * (mr - t) / (p.kt * p.r) + std::max(end_val, floor);
    }
    out.branch = LbBranch::kLineBelow;
  }
  double floored = std::max(base, floor);
  out.floor_active = floored > base;
  double fm = f_min(p);
  out.value = std::min(floored, fm);
  out.fmin_clipped = out.value < floored;
  return out;
}

inline double delta_lb_prime(const SystemParams& p) {
  return delta_lb_prime_detail(p).value;
}

struct BoundsReport {
  double delta_up = 0.0;
  double f_min = 0.0;
  double delta_lb_prime = 0.0;
  double gap = 1.0;
  int m_used = 0;
  MultiplicityBranch m_branch = MultiplicityBranch::kAllCached;
  LbBranch lb_branch = LbBranch::kAllCached;
  bool lb_floor_active = false;
  bool lb_fmin_clipped = false;
};

// Certified ratio delta_up / delta'_lb; 1 by convention when both vanish.
inline double gap_ratio(const SystemParams& p) {
  if (p.mu_r >= 1.0) return 1.0;
  double up = delta_up(p).delta_total;
  double lb = delta_lb_prime(p);
  if (lb <= 0.0) return up <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return up / lb;
}

inline BoundsReport bounds_report(const SystemParams& p) {
  BoundsReport rep;
  if (p.mu_r >= 1.0) {
    rep.m_branch = MultiplicityBranch::kAllCached;
    return rep;
  }
  NdtBreakdown up = delta_up(p);
  MultiplicityDecision dec = m_opt(p);
  LbValue lb = delta_lb_prime_detail(p);
  rep.delta_up = up.delta_total;
  rep.f_min = f_min(p);
  rep.delta_lb_prime = lb.value;
  rep.gap = lb.value > 0.0 ? up.delta_total / lb.value : 1.0;
  rep.m_used = up.m_used;
  rep.m_branch = dec.branch;
  rep.lb_branch = lb.branch;
  rep.lb_floor_active = lb.floor_active;
  rep.lb_fmin_clipped = lb.fmin_clipped;
  return rep;
}

}  // namespace cachedof
