#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "cachedof/combinatorics.hpp"
#include "cachedof/errors.hpp"
#include "cachedof/ndt.hpp"
#include "cachedof/params.hpp"
#include "cachedof/rational.hpp"
#include "cachedof/rng.hpp"

namespace cachedof {

// All distinct-file demand vectors (pi(N, K_R) of them), lexicographic.
inline std::vector<DemandVector> enumerate_demands(int n_files, int kr) {
  std::vector<DemandVector> out;
  DemandVector cur;
  cur.d.assign(kr, 0);
  std::vector<bool> used(n_files + 1, false);
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == kr) {
      out.push_back(cur);
      return;
    }
    for (int n = 1; n <= n_files; ++n) {
      if (used[n]) continue;
      used[n] = true;
      cur.d[pos] = n;
      self(self, pos + 1);
      used[n] = false;
    }
  };
  rec(rec, 0);
  return out;
}

// Uncoded cache/fronthaul mass split by exact EN subset (nonempty tau_t) and
// exact user subset. Rational packet counts; constraints checked exactly.
struct ConverseAllocation {
  SystemParams params;
  int f = 0;  // packets per file
  std::vector<DemandVector> demands;
  // cache[file-1][tau_t][tau_r], tau_t in [1, 2^kt), tau_r in [0, 2^kr)
  std::vector<std::vector<std::vector<Rational>>> cache;
  // push[d][file-1][tau_t][tau_r]
  std::vector<std::vector<std::vector<std::vector<Rational>>>> push;

  Rational en_cap() const { return Rational(params.t_units()) * f * params.n_files / params.kt; }
  Rational user_cap() const {
    return Rational(params.r_units()) * f * params.n_files / params.kr;
  }
  Rational r_exact() const { return rational_from_double(params.r); }

  Rational delta_f_max() const {
    int t = params.t_units();
    int mm = m_max(params);
    if (mm <= t || params.r <= 0.0) return Rational(0);
    return Rational(params.kr) * (mm - t) / (Rational(params.kt) * r_exact());
  }

  Rational fronthaul_load(int d_idx, int en) const {
    Rational load = 0;
    for (int n : demands[d_idx].d)
      for (Mask tt = 1; tt < (1u << params.kt); ++tt) {
        if (!((tt >> en) & 1u)) continue;
        for (Mask tr = 0; tr < (1u << params.kr); ++tr) load += push[d_idx][n - 1][tt][tr];
      }
    return load;
  }

  // tight (18e) value: max over ENs of the per-EN fronthaul packets / (F r)
  Rational delta_f_star(int d_idx) const {
    Rational best = 0;
    for (int en = 0; en < params.kt; ++en) best = std::max(best, fronthaul_load(d_idx, en));
    if (best == 0) return Rational(0);
    return best / (Rational(f) * r_exact());
  }
};

inline std::vector<std::string> check_feasible(const ConverseAllocation& a) {
  std::vector<std::string> bad;
  const SystemParams& p = a.params;
  const Mask nt_masks = 1u << p.kt;
  const Mask nr_masks = 1u << p.kr;
  for (int n = 0; n < p.n_files; ++n)
    for (Mask tt = 1; tt < nt_masks; ++tt)
      for (Mask tr = 0; tr < nr_masks; ++tr)
        if (a.cache[n][tt][tr] < 0) {
          bad.push_back("negative cache mass");
          break;
        }
  for (std::size_t di = 0; di < a.demands.size(); ++di)
    for (int n = 0; n < p.n_files; ++n)
      for (Mask tt = 1; tt < nt_masks; ++tt)
        for (Mask tr = 0; tr < nr_masks; ++tr)
          if (a.push[di][n][tt][tr] < 0) {
            bad.push_back("negative fronthaul mass");
            break;
          }
  // completeness (availability of every requested file)
  for (std::size_t di = 0; di < a.demands.size(); ++di) {
    for (int n : a.demands[di].d) {
      Rational s = 0;
      for (Mask tt = 1; tt < nt_masks; ++tt)
        for (Mask tr = 0; tr < nr_masks; ++tr)
          s += a.cache[n - 1][tt][tr] + a.push[di][n - 1][tt][tr];
      if (s != a.f) {
        bad.push_back("requested file mass != F");
        break;
      }
    }
  }
  // EN cache capacity
  for (int en = 0; en < p.kt; ++en) {
    Rational s = 0;
    for (int n = 0; n < p.n_files; ++n)
      for (Mask tt = 1; tt < nt_masks; ++tt) {
        if (!((tt >> en) & 1u)) continue;
        for (Mask tr = 0; tr < nr_masks; ++tr) s += a.cache[n][tt][tr];
      }
    if (s > a.en_cap()) bad.push_back("EN cache capacity exceeded");
  }
  // user cache capacity, per demand
  for (std::size_t di = 0; di < a.demands.size(); ++di) {
    for (int j = 0; j < p.kr; ++j) {
      Rational s = 0;
      for (int n = 0; n < p.n_files; ++n)
        for (Mask tt = 1; tt < nt_masks; ++tt)
          for (Mask tr = 0; tr < nr_masks; ++tr) {
            if (!((tr >> j) & 1u)) continue;
            s += a.cache[n][tt][tr] + a.push[di][n][tt][tr];
          }
      if (s > a.user_cap()) {
        bad.push_back("user cache capacity exceeded");
        break;
      }
    }
  }
  // fronthaul budget on the tight per-demand value
  for (std::size_t di = 0; di < a.demands.size(); ++di) {
    if (p.r <= 0.0) {
      for (int n = 0; n < p.n_files && bad.empty(); ++n)
        for (Mask tt = 1; tt < nt_masks; ++tt)
          for (Mask tr = 0; tr < nr_masks; ++tr)
            if (a.push[di][n][tt][tr] != 0) {
              bad.push_back("fronthaul mass with r = 0");
              tt = nt_masks;
              break;
            }
    } else if (a.delta_f_star(static_cast<int>(di)) > a.delta_f_max()) {
      bad.push_back("delta_F^* exceeds delta_F_max");
    }
  }
  return bad;
}

// Achievable starting point: the subset-uniform placement when t >= 1, or
// balanced singleton fronthaul pushes of every requested file when t = 0.
inline ConverseAllocation base_allocation(const SystemParams& p) {
  require_valid(p);
  if (!p.integer_regime()) throw NonIntegerRegime("integer cache budgets required");
  if (p.kt > 3 || p.kr > 3 || p.n_files > 3 || p.f_packets > 12)
    throw InvalidParams("allocation sampler is restricted to tiny instances");
  int t = p.t_units();
  int a = p.r_units();
  ConverseAllocation al;
  al.params = p;
  al.f = p.f_packets;
  al.demands = enumerate_demands(p.n_files, p.kr);
  const Mask nt_masks = 1u << p.kt;
  const Mask nr_masks = 1u << p.kr;
  al.cache.assign(p.n_files,
                  std::vector<std::vector<Rational>>(nt_masks, std::vector<Rational>(nr_masks, 0)));
  al.push.assign(al.demands.size(), al.cache);
  auto tt_cells = subsets_of_size(p.kt, std::max(t, 1));
  auto tr_cells = subsets_of_size(p.kr, a);
  if (t >= 1) {
    Rational per = Rational(p.f_packets) /
                   (Rational(static_cast<long long>(tt_cells.size())) *
                    static_cast<long long>(tr_cells.size()));
    for (int n = 0; n < p.n_files; ++n)
      for (Mask tt : tt_cells)
        for (Mask tr : tr_cells) al.cache[n][tt][tr] = per;
  } else {
    if (p.r <= 0.0) throw Infeasible("empty EN caches and no fronthaul");
    // spread every requested file's mass evenly over singleton pushes so
    // each EN carries exactly K_R F / K_T fronthaul packets per demand
    Rational per = Rational(p.f_packets) /
                   (Rational(static_cast<long long>(tr_cells.size())) * p.kt);
    for (std::size_t di = 0; di < al.demands.size(); ++di) {
      const auto& d = al.demands[di].d;
      for (int k = 0; k < p.kr; ++k)
        for (int en = 0; en < p.kt; ++en)
          for (Mask tr : tr_cells) al.push[di][d[k] - 1][1u << en][tr] = per;
    }
  }
  auto bad = check_feasible(al);
  if (!bad.empty()) throw Infeasible("no feasible base allocation: " + bad.front());
  return al;
}

// Randomized feasible point: mass-preserving perturbations of the base
// allocation. Constraint sums are maintained incrementally so each proposal
// is an O(K_T + K_R * pi) accept/reject, with moves undone on rejection.
inline ConverseAllocation sample_feasible_allocation(const SystemParams& p, std::uint64_t seed,
                                                     int moves = 24) {
  ConverseAllocation al = base_allocation(p);
  Rng rng(mix_seed(seed, 0x616c6c6full));
  const Mask nt_masks = 1u << p.kt;
  const Mask nr_masks = 1u << p.kr;
  const std::size_t nd = al.demands.size();

  // running constraint sums
  std::vector<Rational> en_load(p.kt, 0);                      // cache mass per EN
  std::vector<Rational> user_c(p.kr, 0);                       // cache mass per user
  std::vector<std::vector<Rational>> user_f(nd, std::vector<Rational>(p.kr, 0));
  std::vector<std::vector<Rational>> fh(nd, std::vector<Rational>(p.kt, 0));
  for (int n = 0; n < p.n_files; ++n)
    for (Mask tt = 1; tt < nt_masks; ++tt)
      for (Mask tr = 0; tr < nr_masks; ++tr) {
        const Rational& m = al.cache[n][tt][tr];
        if (m == 0) continue;
        for (int e : mask_to_list(tt)) en_load[e] += m;
        for (int j : mask_to_list(tr)) user_c[j] += m;
      }
  for (std::size_t di = 0; di < nd; ++di)
    for (int n = 0; n < p.n_files; ++n)
      for (Mask tt = 1; tt < nt_masks; ++tt)
        for (Mask tr = 0; tr < nr_masks; ++tr) {
          const Rational& m = al.push[di][n][tt][tr];
          if (m == 0) continue;
          for (int e : mask_to_list(tt)) fh[di][e] += m;
          for (int j : mask_to_list(tr)) user_f[di][j] += m;
        }

  const Rational en_cap = al.en_cap();
  const Rational user_cap = al.user_cap();
  // (18f) in packet units: per-EN fronthaul load <= K_R (m_max - t)^+ F / K_T
  int mm = m_max(p);
  int t = p.t_units();
  const Rational fh_cap = (p.r > 0.0 && mm > t)
                              ? Rational(p.kr) * (mm - t) * al.f / p.kt
                              : Rational(0);

  auto rand_tt = [&]() { return static_cast<Mask>(1 + rng.below(nt_masks - 1)); };
  auto rand_tr = [&]() { return static_cast<Mask>(rng.below(nr_masks)); };

  for (int mv = 0; mv < moves; ++mv) {
    int kind = static_cast<int>(rng.below(3));
    int n = static_cast<int>(rng.below(p.n_files));
    Mask src_tt = rand_tt(), src_tr = rand_tr();
    Mask dst_tt = rand_tt(), dst_tr = rand_tr();
    if (src_tt == dst_tt && src_tr == dst_tr) continue;
    Rational amt_frac(1 + static_cast<long long>(rng.below(8)), 8);

    if (kind == 0) {
      Rational amt = al.cache[n][src_tt][src_tr] * amt_frac;
      if (amt == 0) continue;
      al.cache[n][src_tt][src_tr] -= amt;
      al.cache[n][dst_tt][dst_tr] += amt;
      for (int e : mask_to_list(src_tt)) en_load[e] -= amt;
      for (int e : mask_to_list(dst_tt)) en_load[e] += amt;
      for (int j : mask_to_list(src_tr)) user_c[j] -= amt;
      for (int j : mask_to_list(dst_tr)) user_c[j] += amt;
      bool ok = true;
      for (int e : mask_to_list(dst_tt & ~src_tt)) ok = ok && en_load[e] <= en_cap;
      for (int j : mask_to_list(dst_tr & ~src_tr))
        for (std::size_t di = 0; di < nd && ok; ++di)
          ok = user_c[j] + user_f[di][j] <= user_cap;
      if (!ok) {
        al.cache[n][dst_tt][dst_tr] -= amt;
        al.cache[n][src_tt][src_tr] += amt;
        for (int e : mask_to_list(src_tt)) en_load[e] += amt;
        for (int e : mask_to_list(dst_tt)) en_load[e] -= amt;
        for (int j : mask_to_list(src_tr)) user_c[j] += amt;
        for (int j : mask_to_list(dst_tr)) user_c[j] -= amt;
      }
    } else if (kind == 1) {
      if (p.r <= 0.0) continue;
      Rational amt = al.cache[n][src_tt][src_tr] * amt_frac;
      if (amt == 0) continue;
      std::vector<std::size_t> hit;
      for (std::size_t di = 0; di < nd; ++di) {
        const auto& d = al.demands[di].d;
        if (std::find(d.begin(), d.end(), n + 1) != d.end()) hit.push_back(di);
      }
      al.cache[n][src_tt][src_tr] -= amt;
      for (int e : mask_to_list(src_tt)) en_load[e] -= amt;
      for (int j : mask_to_list(src_tr)) user_c[j] -= amt;
      for (std::size_t di : hit) {
        al.push[di][n][dst_tt][dst_tr] += amt;
        for (int e : mask_to_list(dst_tt)) fh[di][e] += amt;
        for (int j : mask_to_list(dst_tr)) user_f[di][j] += amt;
      }
      bool ok = true;
      for (std::size_t di : hit) {
        for (int e : mask_to_list(dst_tt)) ok = ok && fh[di][e] <= fh_cap;
        for (int j : mask_to_list(dst_tr)) ok = ok && user_c[j] + user_f[di][j] <= user_cap;
      }
      if (!ok) {
        al.cache[n][src_tt][src_tr] += amt;
        for (int e : mask_to_list(src_tt)) en_load[e] += amt;
        for (int j : mask_to_list(src_tr)) user_c[j] += amt;
        for (std::size_t di : hit) {
          al.push[di][n][dst_tt][dst_tr] -= amt;
          for (int e : mask_to_list(dst_tt)) fh[di][e] -= amt;
          for (int j : mask_to_list(dst_tr)) user_f[di][j] -= amt;
        }
      }
    } else {
      std::size_t di = rng.below(nd);
      Rational amt = al.push[di][n][src_tt][src_tr] * amt_frac;
      if (amt == 0) continue;
      al.push[di][n][src_tt][src_tr] -= amt;
      al.push[di][n][dst_tt][dst_tr] += amt;
      for (int e : mask_to_list(src_tt)) fh[di][e] -= amt;
      for (int e : mask_to_list(dst_tt)) fh[di][e] += amt;
      for (int j : mask_to_list(src_tr)) user_f[di][j] -= amt;
      for (int j : mask_to_list(dst_tr)) user_f[di][j] += amt;
      bool ok = true;
      for (int e : mask_to_list(dst_tt & ~src_tt)) ok = ok && fh[di][e] <= fh_cap;
      for (int j : mask_to_list(dst_tr & ~src_tr))
        ok = ok && user_c[j] + user_f[di][j] <= user_cap;
      if (!ok) {
        al.push[di][n][dst_tt][dst_tr] -= amt;
        al.push[di][n][src_tt][src_tr] += amt;
        for (int e : mask_to_list(src_tt)) fh[di][e] += amt;
        for (int e : mask_to_list(dst_tt)) fh[di][e] -= amt;
        for (int j : mask_to_list(src_tr)) user_f[di][j] += amt;
        for (int j : mask_to_list(dst_tr)) user_f[di][j] -= amt;
      }
    }
  }
  return al;
}

// Every intermediate quantity of the averaged-bound chain, exact. Inequality
// steps carry their slack so tests can assert signs.
struct ChainReport {
  Rational edge_avg;        // averaged serving-weight edge bound
  Rational edge_regrouped;  // after exchanging sums (must equal edge_avg)
  Rational cs_rhs;          // after Cauchy-Schwarz
  Rational cs_slack;        // edge_regrouped - cs_rhs >= 0
  Rational sum_b;           // must equal N*F
  Rational x;
  Rational y;               // user-side mean multiplicity, <= mu_R K_R
  Rational x_cache;         // cache part of x, <= mu_T K_T
  Rational fronthaul_avg;   // averaged tight delta_F^*
  Rational fronthaul_mean;  // averaged per-EN mean (<= fronthaul_avg)
  Rational f_of_x;          // averaged lower bound at x
  Rational total;           // edge_avg + fronthaul_avg
  bool counting_identity_ok = false;
  bool regroup_identity_ok = false;
  bool cs_ok = false;
  bool user_cap_ok = false;
  bool en_cap_ok = false;
  bool fronthaul_chain_ok = false;
  bool final_ok = false;
};

inline ChainReport averaged_objective_bound(const ConverseAllocation& a) {
  const SystemParams& p = a.params;
  const Mask nt_masks = 1u << p.kt;
  const Mask nr_masks = 1u << p.kr;
  const long long pi_n_kr = [&] {
    long long v = 1;
    for (int i = 0; i < p.kr; ++i) v *= (p.n_files - i);
    return v;
  }();
  const long long pi_n1_kr1 = [&] {
    long long v = 1;
    for (int i = 0; i < p.kr - 1; ++i) v *= (p.n_files - 1 - i);
    return v;
  }();
  ChainReport rep;
  const Rational one_minus_mur = Rational(p.kr - p.r_units(), p.kr);

  // averaged per-demand edge bound (serving weights 1/(i n_T + j))
  Rational edge_sum = 0;
  for (std::size_t di = 0; di < a.demands.size(); ++di) {
    Rational s = 0;
    for (int k = 0; k < p.kr; ++k) {
      int n = a.demands[di].d[k] - 1;
      for (Mask tt = 1; tt < nt_masks; ++tt) {
        int i = popcount(tt);
        for (Mask tr = 0; tr < nr_masks; ++tr) {
          const Rational& mass_c = a.cache[n][tt][tr];
          const Rational& mass_f = a.push[di][n][tt][tr];
          if (mass_c == 0 && mass_f == 0) continue;
          s += (mass_c + mass_f) / (i * p.nt + popcount(tr));
        }
      }
    }
    edge_sum += s;
  }
  rep.edge_avg = one_minus_mur * edge_sum / (Rational(a.f) * pi_n_kr);

  // f-tilde and b_ij aggregates
  std::vector<std::vector<Rational>> b(p.kt + 1, std::vector<Rational>(p.kr + 1, 0));
  Rational x_cache_sum = 0;
  for (Mask tt = 1; tt < nt_masks; ++tt) {
    int i = popcount(tt);
    for (Mask tr = 0; tr < nr_masks; ++tr) {
      int j = popcount(tr);
      for (int n = 0; n < p.n_files; ++n) {
        Rational ftilde = 0;
        for (std::size_t di = 0; di < a.demands.size(); ++di) {
          const auto& d = a.demands[di].d;
          if (std::find(d.begin(), d.end(), n + 1) == d.end()) continue;
          ftilde += a.push[di][n][tt][tr];
        }
        ftilde /= Rational(p.kr) * pi_n1_kr1;
        b[i][j] += a.cache[n][tt][tr] + ftilde;
        x_cache_sum += Rational(i) * a.cache[n][tt][tr];
      }
    }
  }
  Rational nf = Rational(p.n_files) * a.f;
  rep.sum_b = 0;
  rep.x = 0;
  rep.y = 0;
  Rational weighted = 0;   // sum b_ij / (i n_T + j)
  Rational antennas = 0;   // sum (i n_T + j) b_ij
  for (int i = 1; i <= p.kt; ++i)
    for (int j = 0; j <= p.kr; ++j) {
      if (b[i][j] == 0) continue;
      rep.sum_b += b[i][j];
      rep.x += Rational(i) * b[i][j];
      rep.y += Rational(j) * b[i][j];
      weighted += b[i][j] / (i * p.nt + j);
      antennas += Rational(i * p.nt + j) * b[i][j];
    }
  rep.x /= nf;
  rep.y /= nf;
  rep.x_cache = x_cache_sum / nf;
  rep.counting_identity_ok = rep.sum_b == nf;
  rep.edge_regrouped = Rational(p.kr) * one_minus_mur * weighted / nf;
  rep.regroup_identity_ok = rep.edge_regrouped == rep.edge_avg;
  rep.cs_rhs = antennas == 0 ? Rational(0)
                             : Rational(p.kr) * one_minus_mur * rep.sum_b * rep.sum_b /
                                   (nf * antennas);
  rep.cs_slack = rep.edge_regrouped - rep.cs_rhs;
  rep.cs_ok = rep.cs_slack >= 0;
  rep.user_cap_ok = rep.y <= Rational(p.r_units());
  rep.en_cap_ok = rep.x_cache <= Rational(p.t_units());

  // fronthaul side
  Rational fh_avg = 0, fh_mean = 0;
  for (std::size_t di = 0; di < a.demands.size(); ++di) {
    fh_avg += a.delta_f_star(static_cast<int>(di));
    Rational mean = 0;
    for (int en = 0; en < p.kt; ++en) mean += a.fronthaul_load(static_cast<int>(di), en);
    if (p.r > 0.0)
      mean /= Rational(p.kt) * a.f * a.r_exact();
    fh_mean += mean;
  }
  rep.fronthaul_avg = fh_avg / pi_n_kr;
  rep.fronthaul_mean = fh_mean / pi_n_kr;
  Rational fh_bound = 0;
  bool mean_identity_ok = true;
  if (p.r > 0.0) {
    fh_bound = Rational(p.kr) * (rep.x - p.t_units()) / (Rational(p.kt) * a.r_exact());
    // counting rearrangement: averaged per-EN mean == K_R (x - x_cache)/(K_T r)
    mean_identity_ok = rep.fronthaul_mean == Rational(p.kr) * (rep.x - rep.x_cache) /
                                                 (Rational(p.kt) * a.r_exact());
  }
  rep.fronthaul_chain_ok = mean_identity_ok && rep.fronthaul_avg >= rep.fronthaul_mean &&
                           rep.fronthaul_mean >= fh_bound;

  // lower-bound value at the allocation's own x
  Rational edge_f = Rational(p.kr) * one_minus_mur / (Rational(p.nt) * rep.x + p.r_units());
  rep.f_of_x = fh_bound + edge_f;
  rep.total = rep.edge_avg + rep.fronthaul_avg;
  rep.final_ok = rep.counting_identity_ok && rep.regroup_identity_ok && rep.cs_ok &&
                 rep.user_cap_ok && rep.en_cap_ok && rep.fronthaul_chain_ok &&
                 rep.total >= rep.f_of_x;
  return rep;
}

inline bool verify_converse_chain(const ConverseAllocation& a) {
  auto bad = check_feasible(a);
  if (!bad.empty()) throw InvalidParams("infeasible allocation: " + bad.front());
  return averaged_objective_bound(a).final_ok;
}

}  // namespace cachedof
