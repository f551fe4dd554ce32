#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cachedof/errors.hpp"

namespace cachedof {

// Snap tolerance for recognizing an integer cache budget from a mu fraction.
inline constexpr double kIntegerRegimeTol = 1e-9;

struct SystemParams {
  int kt = 1;          // edge nodes K_T
  int nt = 1;          // antennas per EN n_T
  int kr = 1;          // single-antenna users K_R
  int n_files = 1;     // library size N
  int f_packets = 1;   // packets per file F (adjusted upward by placement)
  double mu_t = 0.0;   // EN cache fraction
  double mu_r = 0.0;   // user cache fraction
  double r = 0.0;      // fronthaul rate exponent, C_F = r log SNR

  double mu_t_kt() const { return mu_t * kt; }
  double mu_r_kr() const { return mu_r * kr; }

  static bool near_integer(double x, double tol = kIntegerRegimeTol) {
    return std::abs(x - std::round(x)) <= tol;
  }

  bool integer_regime(double tol = kIntegerRegimeTol) const {
    return near_integer(mu_t_kt(), tol) && near_integer(mu_r_kr(), tol);
  }

  // Integer cache budgets; only meaningful in the integer regime.
  int t_units(double tol = kIntegerRegimeTol) const {
    if (!near_integer(mu_t_kt(), tol)) throw NonIntegerRegime("mu_t*kt = " + std::to_string(mu_t_kt()));
    return static_cast<int>(std::llround(mu_t_kt()));
  }
  int r_units(double tol = kIntegerRegimeTol) const {
    if (!near_integer(mu_r_kr(), tol)) throw NonIntegerRegime("mu_r*kr = " + std::to_string(mu_r_kr()));
    return static_cast<int>(std::llround(mu_r_kr()));
  }

  // Same params with cache fractions snapped to exact integer budgets.
  SystemParams snapped(double tol) const {
    SystemParams p = *this;
    double tkt = std::round(mu_t_kt());
    double akr = std::round(mu_r_kr());
    if (std::abs(mu_t_kt() - tkt) > tol || std::abs(mu_r_kr() - akr) > tol)
      throw NonIntegerRegime("cache budgets not within snap tolerance");
    p.mu_t = tkt / kt;
    p.mu_r = akr / kr;
    return p;
  }

  static SystemParams from_units(int kt, int nt, int kr, int n_files, int f_packets,
                                 int t_units, int r_units, double r) {
    SystemParams p;
    p.kt = kt;
    p.nt = nt;
    p.kr = kr;
    p.n_files = n_files;
    p.f_packets = f_packets;
    p.mu_t = kt > 0 ? static_cast<double>(t_units) / kt : 0.0;
    p.mu_r = kr > 0 ? static_cast<double>(r_units) / kr : 0.0;
    p.r = r;
    return p;
  }
};

struct ValidationReport {
  bool ok = true;
  bool integer_regime = false;
  std::vector<std::string> violations;
};

inline ValidationReport validate(const SystemParams& p) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& s) {
    rep.ok = false;
    rep.violations.push_back(s);
  };
  if (p.kt < 1) fail("kt >= 1");
  if (p.nt < 1) fail("nt >= 1");
  if (p.kr < 1) fail("kr >= 1");
  if (p.n_files < 1) fail("n_files >= 1");
  if (p.f_packets < 1) fail("f_packets >= 1");
  if (p.n_files < p.kr) fail("n_files >= kr");
  if (p.mu_t < 0.0 || p.mu_t > 1.0) fail("0 <= mu_t <= 1");
  if (p.mu_r < 0.0 || p.mu_r > 1.0) fail("0 <= mu_r <= 1");
  if (p.r < 0.0) fail("r >= 0");
  rep.integer_regime = p.kt >= 1 && p.kr >= 1 && p.integer_regime();
  return rep;
}

inline void require_valid(const SystemParams& p) {
  ValidationReport rep = validate(p);
  if (!rep.ok) {
    std::string msg = "invalid params:";
    for (const auto& v : rep.violations) msg += " [" + v + "]";
    throw InvalidParams(msg);
  }
}

struct DemandVector {
  std::vector<int> d;  // 1-based file index per user
};

// Distinct demands d = (1, 2, ..., K_R): the stress case the bounds cover.
inline DemandVector worst_case_demand(const SystemParams& p) {
  if (p.n_files < p.kr) throw InvalidParams("worst_case_demand needs n_files >= kr");
  DemandVector d;
  d.d.resize(p.kr);
  for (int k = 0; k < p.kr; ++k) d.d[k] = k + 1;
  return d;
}

}  // namespace cachedof
