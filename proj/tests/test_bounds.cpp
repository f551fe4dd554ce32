#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cachedof/bounds.hpp"
#include "cachedof/rng.hpp"

using namespace cachedof;
using Catch::Approx;

namespace {

SystemParams units(int kt, int nt, int kr, int tu, int ju, double r) {
  return SystemParams::from_units(kt, nt, kr, kr, 1, tu, ju, r);
}

double f_min_scan(const SystemParams& p, int n = 200000) {
  XDomain dom = x_domain(p);
  double best = 1e300;
  for (int i = 0; i <= n; ++i) {
    double x = dom.x_min + (dom.x_max - dom.x_min) * i / n;
    best = std::min(best, f_lower(x, p));
  }
  return best;
}

}  // namespace

TEST_CASE("f_lower reference values") {
  SystemParams p = units(12, 4, 24, 0, 0, 4);
  CHECK(f_lower(3.0, p) == Approx(3.5).margin(1e-12));
  double m0 = m_stationary(p);
  CHECK(f_lower(m0, p) == Approx(m0).margin(1e-3));  // fixed point at the stationary x
  SystemParams q = units(12, 4, 24, 4, 0, 4);
  CHECK(f_lower(4.0, q) == Approx(24.0 / 16.0).margin(1e-12));  // pure edge term at x = t
}

TEST_CASE("f_lower carries the local caching floor") {
  // serving cap binds: n_T x + mu_R K_R > K_R makes the raw edge term dip
  // below the per-user floor
  SystemParams p = units(5, 4, 1, 0, 0, 0.25);
  CHECK(f_lower(1.0, p) == Approx(1.0 / (5 * 0.25) + 1.0).margin(1e-12));
}

TEST_CASE("x_domain") {
  auto a = x_domain(units(12, 4, 24, 0, 0, 1));
  CHECK(a.x_min == 1.0);
  CHECK(a.x_max == 6.0);
  auto b = x_domain(units(12, 4, 24, 4, 12, 1));
  CHECK(b.x_min == 4.0);
  CHECK(b.x_max == 4.0);
  auto c = x_domain(units(12, 4, 24, 6, 0, 1));
  CHECK(c.x_min == 6.0);
  CHECK(c.x_max == 6.0);
}

TEST_CASE("m_star") {
  CHECK(m_star(units(12, 4, 24, 0, 0, 4)) == Approx(std::sqrt(12.0)).margin(1e-12));
  CHECK(m_star(units(12, 4, 24, 0, 0, 16)) == 6.0);  // r above threshold
  SystemParams p = units(12, 4, 24, 0, 12, 4);  // m_0 < 1
  CHECK(m_star(p) == 1.0);
}

TEST_CASE("f_min reference values") {
  CHECK(f_min(units(12, 4, 24, 0, 0, 4)) == Approx(std::sqrt(12.0)).margin(1e-3));
  CHECK(f_min(units(3, 1, 3, 1, 1, 4.5)) == Approx(8.0 / 9).margin(1e-12));
  // cached multiplicity beyond the stationary point: pure edge value
  SystemParams p = units(12, 4, 24, 5, 0, 4);
  CHECK(f_min(p) == Approx(24.0 / (5 * 4)).margin(1e-12));
}

TEST_CASE("f_min closed form equals a dense scan of f_lower") {
  Rng rng(5);
  for (int it = 0; it < 60; ++it) {
    int kt = 1 + static_cast<int>(rng.below(8));
    int nt = 1 + static_cast<int>(rng.below(4));
    int kr = 1 + static_cast<int>(rng.below(12));
    int tu = static_cast<int>(rng.below(kt + 1));
    int ju = static_cast<int>(rng.below(kr));
    double r = 0.25 * (1 << rng.below(8));
    SystemParams p = units(kt, nt, kr, tu, ju, r);
    CHECK(f_min(p) == Approx(f_min_scan(p)).margin(1e-7));
  }
}

TEST_CASE("delta_lb_prime reference values") {
  CHECK(delta_lb_prime(units(12, 4, 24, 0, 0, 4)) == Approx(3.3).margin(1e-12));
  CHECK(delta_lb_prime(units(3, 1, 3, 1, 1, 4.5)) == Approx(8.0 / 9).margin(1e-12));
  // interval endpoint collapses to the edge-only value
  CHECK(delta_lb_prime(units(12, 4, 24, 4, 0, 4)) == Approx(24.0 / 16).margin(1e-12));
}

TEST_CASE("gap_ratio reference values") {
  // worst point of the [3,4) interval for (12,24,4,r=4): 2 / 1.8
  CHECK(gap_ratio(units(12, 4, 24, 3, 0, 4)) == Approx(10.0 / 9).margin(1e-12));
  CHECK(gap_ratio(units(3, 1, 3, 1, 1, 4.5)) == Approx(1.0).margin(1e-12));
  CHECK(gap_ratio(units(12, 4, 24, 0, 0, 4)) == Approx(3.5 / 3.3).margin(1e-12));
}

TEST_CASE("gap_ratio convention when both bounds vanish") {
  CHECK(gap_ratio(units(4, 2, 6, 2, 6, 1)) == 1.0);  // mu_r = 1
}

TEST_CASE("sandwich and certificate on a sampled grid") {
  Rng rng(9);
  double max_gap = 0.0;
  for (int it = 0; it < 3000; ++it) {
    int kt = 1 + static_cast<int>(rng.below(8));
    int nt = 1 + static_cast<int>(rng.below(4));
    int kr = 1 + static_cast<int>(rng.below(12));
    int tu = static_cast<int>(rng.below(kt + 1));
    int ju = static_cast<int>(rng.below(kr + 1));
    double r = 0.25 * (1 << rng.below(8));
    SystemParams p = units(kt, nt, kr, tu, ju, r);
    if (ju == kr) {
      CHECK(gap_ratio(p) == 1.0);
      continue;
    }
    double up = delta_up(p).delta_total;
    double fm = f_min(p);
    double lb = delta_lb_prime(p);
    REQUIRE(lb > 0.0);
    CHECK(lb <= fm + 1e-12);
    CHECK(fm <= up + 1e-9);
    double gap = up / lb;
    CHECK(gap >= 1.0 - 1e-9);
    CHECK(gap <= 1.5 + 1e-9);
    max_gap = std::max(max_gap, gap);
  }
  CHECK(max_gap <= 1.5 + 1e-9);
}

TEST_CASE("delta_lb_prime is continuous in the EN cache budget") {
  const double eps = 1e-6;
  for (auto [kt, nt, kr, ju, r] : {std::tuple<int, int, int, int, double>{12, 4, 24, 0, 4},
                                   {3, 1, 3, 1, 4.5},
                                   {8, 2, 10, 3, 2},
                                   {5, 4, 7, 2, 0.25}}) {
    auto lb_at = [&, kt = kt, nt = nt, kr = kr, ju = ju, r = r](double tkt) {
      SystemParams p = units(kt, nt, kr, 0, ju, r);
      p.mu_t = tkt / kt;
      return delta_lb_prime(p);
    };
    for (int ti = 1; ti <= kt; ++ti) {
      double at = lb_at(ti);
      double lim_left = 2 * lb_at(ti - eps) - lb_at(ti - 2 * eps);
      CHECK(std::abs(lim_left - at) < 1e-9);
      if (ti < kt) {
        double lim_right = 2 * lb_at(ti + eps) - lb_at(ti + 2 * eps);
        CHECK(std::abs(lim_right - at) < 1e-9);
      }
    }
  }
}

TEST_CASE("delta_lb_prime is linear below the fronthaul multiplicity") {
  SystemParams base = units(12, 4, 24, 0, 0, 4);  // m(r, mu_R) = 3
  auto lb_at = [&](double tkt) {
    SystemParams p = base;
    p.mu_t = tkt / base.kt;
    return delta_lb_prime(p);
  };
  double v0 = lb_at(0.0), v1 = lb_at(1.0), v2 = lb_at(2.0);
  CHECK(v2 - 2 * v1 + v0 == Approx(0.0).margin(1e-12));
  CHECK(v1 - v0 == Approx(-24.0 / 48).margin(1e-12));  // slope -K_R/(K_T r)
}

TEST_CASE("bounds report serializes branch tags consistently") {
  BoundsReport rep = bounds_report(units(12, 4, 24, 0, 0, 4));
  CHECK(rep.delta_up == Approx(3.5).margin(1e-12));
  CHECK(rep.delta_lb_prime == Approx(3.3).margin(1e-12));
  CHECK(rep.gap == Approx(3.5 / 3.3).margin(1e-12));
  CHECK(rep.m_used == 3);
  CHECK(rep.lb_branch == LbBranch::kLineBelow);
}
