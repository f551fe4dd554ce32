#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "cachedof/bounds.hpp"
#include "cachedof/errors.hpp"
#include "cachedof/ndt.hpp"
#include "cachedof/params.hpp"

namespace cachedof {

enum class SweepAxis { kMuRKr, kMuTKt, kR, kNt };

inline SweepAxis axis_from_string(const std::string& s) {
  if (s == "mu_r_kr") return SweepAxis::kMuRKr;
  if (s == "mu_t_kt") return SweepAxis::kMuTKt;
  if (s == "r") return SweepAxis::kR;
  if (s == "n_t") return SweepAxis::kNt;
  throw InvalidParams("unknown sweep axis: " + s);
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::kMuRKr;
  std::vector<double> values;
  std::vector<SystemParams> series;  // baselines, one block of rows each
};

struct SweepRow {
  double mu_t_kt = 0.0;
  double mu_r_kr = 0.0;
  int n_t = 1;
  double r = 0.0;
  int m = 0;
  double delta_f = 0.0;
  double delta_e = 0.0;
  double delta_up = 0.0;
  double f_min = 0.0;
  double delta_lb_prime = 0.0;
  double gap = 1.0;
};

inline SystemParams apply_axis(SystemParams p, SweepAxis axis, double v) {
  switch (axis) {
    case SweepAxis::kMuRKr: p.mu_r = v / p.kr; break;
    case SweepAxis::kMuTKt: p.mu_t = v / p.kt; break;
    case SweepAxis::kR: p.r = v; break;
    case SweepAxis::kNt: p.nt = static_cast<int>(std::llround(v)); break;
  }
  return p;
}

// One sweep point. Fractional cache budgets take the memory-sharing value;
// the converse-side columns are evaluated directly (their formulas are
// continuous in the cache fractions).
inline SweepRow evaluate_point(const SystemParams& p) {
  require_valid(p);
  SweepRow row;
  row.mu_t_kt = p.mu_t_kt();
  row.mu_r_kr = p.mu_r_kr();
  row.n_t = p.nt;
  row.r = p.r;
  NdtBreakdown up = p.integer_regime() ? delta_up(p.snapped(kIntegerRegimeTol))
                                       : delta_up_memshare_breakdown(p);
  row.m = up.m_used;
  row.delta_f = up.delta_f;
  row.delta_e = up.delta_e;
  row.delta_up = up.delta_total;
  row.f_min = f_min(p);
  row.delta_lb_prime = delta_lb_prime(p);
  row.gap = row.delta_lb_prime > 0.0 ? row.delta_up / row.delta_lb_prime : 1.0;
  return row;
}

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  rows.reserve(spec.series.size() * spec.values.size());
  for (const SystemParams& base : spec.series)
    for (double v : spec.values) rows.push_back(evaluate_point(apply_axis(base, spec.axis, v)));
  return rows;
}

inline std::vector<double> range_values(double from, double to, double step) {
  std::vector<double> v;
  if (step <= 0.0) throw InvalidParams("sweep step must be positive");
  for (double x = from; x <= to + 1e-12; x += step) v.push_back(x);
  return v;
}

// Fig. 2: NDT vs user cache budget for several (n_T, mu_T K_T) series,
// K_T = 12, K_R = 24, r = 4, memory sharing on the half steps.
inline SweepSpec preset_fig2() {
  SweepSpec spec;
  spec.axis = SweepAxis::kMuRKr;
  spec.values = range_values(0.0, 24.0, 0.5);
  for (auto [nt, tu] : {std::pair<int, int>{1, 2}, {1, 6}, {2, 2}, {2, 6}, {4, 2}, {4, 6}})
    spec.series.push_back(SystemParams::from_units(12, nt, 24, 24, 1, tu, 0, 4.0));
  return spec;
}

// Fig. 3: transmit-side multiplicity vs user cache budget for several r,
// K_T = 12, K_R = 24, n_T = mu_T K_T = 4.
inline SweepSpec preset_fig3() {
  SweepSpec spec;
  spec.axis = SweepAxis::kMuRKr;
  spec.values = range_values(0.0, 24.0, 1.0);
  for (double r : {1.0, 2.0, 4.0, 8.0, 16.0})
    spec.series.push_back(SystemParams::from_units(12, 4, 24, 24, 1, 4, 0, r));
  return spec;
}

inline const char* csv_header() {
  return "mu_t_kt,mu_r_kr,n_t,r,m,delta_f,delta_e,delta_up,f_min,delta_lb_prime,gap";
}

inline std::string to_csv_line(const SweepRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%d,%.10g,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g",
                row.mu_t_kt, row.mu_r_kr, row.n_t, row.r, row.m, row.delta_f, row.delta_e,
                row.delta_up, row.f_min, row.delta_lb_prime, row.gap);
  return buf;
}

}  // namespace cachedof
