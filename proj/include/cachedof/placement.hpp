#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "cachedof/combinatorics.hpp"
#include "cachedof/errors.hpp"
#include "cachedof/ndt.hpp"
#include "cachedof/params.hpp"

namespace cachedof {

// One packet group of file `file`: cached at the ENs in tau_t and the users
// in tau_r; rep indexes packets within the cell when F exceeds the cell count.
struct SubfileIndex {
  int file = 1;  // 1-based
  Mask tau_t = 0;
  Mask tau_r = 0;
  int rep = 0;

  friend bool operator==(const SubfileIndex&, const SubfileIndex&) = default;
  friend auto operator<=>(const SubfileIndex&, const SubfileIndex&) = default;
};

struct LibrarySplit {
  int f_requested = 0;
  int f_effective = 0;  // least multiple of the cell count >= f_requested
  int f_cell = 0;       // packets per (tau_t, tau_r) cell
  bool f_adjusted = false;
  std::vector<Mask> tau_t_cells;  // |tau_t| = mu_t*kt, ascending masks
  std::vector<Mask> tau_r_cells;  // |tau_r| = mu_r*kr
};

inline LibrarySplit split_library(const SystemParams& p) {
  require_valid(p);
  if (!p.integer_regime()) throw NonIntegerRegime("split_library needs integer cache budgets");
  int t = p.t_units();
  int a = p.r_units();
  LibrarySplit s;
  s.f_requested = p.f_packets;
  s.tau_t_cells = subsets_of_size(p.kt, t);
  s.tau_r_cells = subsets_of_size(p.kr, a);
  std::int64_t cells = static_cast<std::int64_t>(s.tau_t_cells.size()) *
                       static_cast<std::int64_t>(s.tau_r_cells.size());
  s.f_cell = static_cast<int>((p.f_packets + cells - 1) / cells);
  s.f_effective = static_cast<int>(s.f_cell * cells);
  s.f_adjusted = s.f_effective != p.f_packets;
  return s;
}

inline std::vector<SubfileIndex> subfiles_of_file(const LibrarySplit& s, int file) {
  std::vector<SubfileIndex> v;
  v.reserve(static_cast<std::size_t>(s.f_effective));
  for (Mask tt : s.tau_t_cells)
    for (Mask tr : s.tau_r_cells)
      for (int rep = 0; rep < s.f_cell; ++rep) v.push_back({file, tt, tr, rep});
  return v;
}

struct CachePlacement {
  SystemParams params;
  LibrarySplit split;

  bool en_holds(int en, const SubfileIndex& sf) const {
    return (sf.tau_t >> en) & 1u;
  }
  bool user_holds(int user, const SubfileIndex& sf) const {
    return (sf.tau_r >> user) & 1u;
  }
  std::vector<SubfileIndex> en_cache(int en) const {
    std::vector<SubfileIndex> v;
    for (int n = 1; n <= params.n_files; ++n)
      for (const auto& sf : subfiles_of_file(split, n))
        if (en_holds(en, sf)) v.push_back(sf);
    return v;
  }
  std::vector<SubfileIndex> user_cache(int user) const {
    std::vector<SubfileIndex> v;
    for (int n = 1; n <= params.n_files; ++n)
      for (const auto& sf : subfiles_of_file(split, n))
        if (user_holds(user, sf)) v.push_back(sf);
    return v;
  }
};

inline CachePlacement build_placement(const SystemParams& p) {
  return CachePlacement{p, split_library(p)};
}

// Fronthaul augmentation: per tau_t cell one extended EN set A with |A| = m.
// Availability must be uniform per cell so that coded messages built from one
// cell share a cooperation group.
struct FronthaulPlan {
  int m = 0;
  int f_effective = 0;
  std::map<Mask, Mask> availability;            // tau_t -> A
  std::vector<std::int64_t> pushed_packets;     // per EN
  std::vector<std::vector<SubfileIndex>> pushes; // per EN, requested-file packets

  std::int64_t max_pushed() const {
    std::int64_t mx = 0;
    for (auto v : pushed_packets) mx = std::max(mx, v);
    return mx;
  }
};

namespace detail {

// Deterministic near-balanced choice of (m - t) extra ENs per cell: rotating
// cursor, then pairwise swaps until extension counts differ by at most 1.
inline std::map<Mask, Mask> assign_availability(const std::vector<Mask>& cells, int kt,
                                                int extra) {
  std::map<Mask, Mask> avail;
  std::vector<int> load(kt, 0);
  int cursor = 0;
  for (Mask cell : cells) {
    Mask a = cell;
    int picked = 0;
    int scan = cursor;
    while (picked < extra) {
      int e = scan % kt;
      ++scan;
      if ((a >> e) & 1u) continue;
      a |= (1u << e);
      ++load[e];
      ++picked;
      cursor = scan % kt;
    }
    avail[cell] = a;
  }
  auto span = [&load]() {
    auto [lo, hi] = std::minmax_element(load.begin(), load.end());
    return std::pair<int, int>(*lo, *hi);
  };
  for (int guard = 0; guard < kt * static_cast<int>(cells.size()) + 8; ++guard) {
    auto [lo, hi] = span();
    if (hi - lo <= 1) break;
    bool moved = false;
    for (Mask cell : cells) {
      Mask a = avail[cell];
      Mask ext = a & ~cell;
      for (int e_hi = 0; e_hi < kt && !moved; ++e_hi) {
        if (load[e_hi] != hi || !((ext >> e_hi) & 1u)) continue;
        for (int e_lo = 0; e_lo < kt && !moved; ++e_lo) {
          if (load[e_lo] != lo || ((a >> e_lo) & 1u)) continue;
          avail[cell] = (a & ~(1u << e_hi)) | (1u << e_lo);
          --load[e_hi];
          ++load[e_lo];
          moved = true;
        }
      }
      if (moved) break;
    }
    if (!moved) break;
  }
  return avail;
}

}  // namespace detail

inline FronthaulPlan plan_fronthaul(const CachePlacement& placement, const DemandVector& demand,
                                    int m) {
  const SystemParams& p = placement.params;
  int t = p.t_units();
  if (m > p.kt) throw InvalidMultiplicity("m > kt");
  if (m < t) throw InvalidMultiplicity("m below cached multiplicity");
  FronthaulPlan plan;
  plan.m = m;
  plan.f_effective = placement.split.f_effective;
  plan.pushed_packets.assign(p.kt, 0);
  plan.pushes.assign(p.kt, {});
  plan.availability = detail::assign_availability(placement.split.tau_t_cells, p.kt, m - t);
  // every packet of every requested file in a cell goes to the cell's
  // extension ENs (uncoded copies)
  for (int k = 0; k < p.kr; ++k) {
    int n = demand.d[k];
    for (Mask tt : placement.split.tau_t_cells) {
      Mask ext = plan.availability[tt] & ~tt;
      for (int e : mask_to_list(ext)) {
        for (Mask tr : placement.split.tau_r_cells) {
          for (int rep = 0; rep < placement.split.f_cell; ++rep) {
            plan.pushes[e].push_back({n, tt, tr, rep});
          }
        }
        plan.pushed_packets[e] += static_cast<std::int64_t>(placement.split.tau_r_cells.size()) *
                                  placement.split.f_cell;
      }
    }
  }
  return plan;
}

inline double empirical_fronthaul_ndt(const FronthaulPlan& plan, const SystemParams& p) {
  std::int64_t mx = plan.max_pushed();
  if (mx == 0) return 0.0;
  if (p.r <= 0.0) throw InfeasibleFronthaul("nonempty fronthaul plan with r = 0");
  return static_cast<double>(mx) / (static_cast<double>(plan.f_effective) * p.r);
}

}  // namespace cachedof
