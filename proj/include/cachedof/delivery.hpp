#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "cachedof/channel.hpp"
#include "cachedof/combinatorics.hpp"
#include "cachedof/errors.hpp"
#include "cachedof/ndt.hpp"
#include "cachedof/placement.hpp"
#include "cachedof/rng.hpp"

namespace cachedof {

inline constexpr double kNullSpaceTol = 1e-10;   // relative rank cut
inline constexpr double kInterferenceTol = 1e-8;  // ZF residual assert
inline constexpr double kDecodeTol = 1e-6;        // decode assert

// Coded multicast message: one desired subfile per user of t_set, all
// available at every EN of `group`; beam spans the group's antennas.
struct CodedMessage {
  Mask t_set = 0;
  Mask group = 0;
  std::vector<SubfileIndex> constituents;  // per user of t_set, ascending
  std::vector<int> sub_idx;                // sub-packet index per constituent
  Eigen::VectorXcd beam;
};

// One (S, tau_t cell, replica) group of repeated slots sharing a channel
// realization and beamformers.
struct Batch {
  Mask active_users = 0;  // S
  Mask tau_t = 0;
  int rep = 0;
  std::vector<CodedMessage> messages;
};

// One transmission of duration 1/q packet times: fresh generic coefficients
// per message constituent.
struct Slot {
  int batch = 0;
  int repetition = 0;
  std::vector<std::vector<std::complex<double>>> coeffs;  // [message][constituent]
};

struct DeliverySchedule {
  SystemParams params;
  DemandVector demand;
  LibrarySplit split;
  std::map<Mask, Mask> availability;
  int m = 0;
  int u = 0;
  int reps = 0;  // slots per batch = C(u-1, m_R)
  int q = 1;     // sub-packetization = C(K_R-m_R-1, u-m_R-1)
  std::vector<Batch> batches;

  std::int64_t mini_slots() const {
    return static_cast<std::int64_t>(batches.size()) * reps;
  }
};

// Needed deliveries and who covers them: (user, subfile, sub_idx) -> count.
using CoverageLedger = std::map<std::tuple<int, SubfileIndex, int>, int>;

inline int sub_index_for(Mask s, Mask t_set, int kr, int q) {
  if (q == 1) return 0;
  // rank of S among supersets of T: compress S\T into the complement of T
  Mask rest = s & ~t_set;
  Mask compressed = 0;
  int bit = 0;
  for (int e = 0; e < kr; ++e) {
    if ((t_set >> e) & 1u) continue;
    if ((rest >> e) & 1u) compressed |= (1u << bit);
    ++bit;
  }
  return static_cast<int>(subset_rank(compressed));
}

inline DeliverySchedule build_schedule(const CachePlacement& placement,
                                       const FronthaulPlan& plan, const DemandVector& demand,
                                       const SystemParams& p) {
  DeliverySchedule sched;
  sched.params = p;
  sched.demand = demand;
  sched.split = placement.split;
  sched.availability = plan.availability;
  if (p.mu_r >= 1.0) return sched;  // local caches cover everything
  if (!p.integer_regime()) throw NonIntegerRegime("build_schedule needs integer cache budgets");
  int a = p.r_units();
  sched.m = plan.m;
  sched.u = users_served(plan.m, a, p);
  if (sched.u < 1) throw InfeasibleDelivery("u = 0");
  sched.reps = static_cast<int>(binomial(sched.u - 1, a));
  sched.q = static_cast<int>(binomial(p.kr - a - 1, sched.u - a - 1));
  std::int64_t projected = binomial(p.kr, sched.u) *
                           static_cast<std::int64_t>(placement.split.tau_t_cells.size()) *
                           placement.split.f_cell * sched.reps;
  if (projected > 2'000'000)
    throw InvalidParams("schedule would need " + std::to_string(projected) +
                        " slots; the simulator is meant for small instances");
  auto actives = subsets_of_size(p.kr, sched.u);
  for (Mask s : actives) {
    auto s_users = mask_to_list(s);
    auto t_local = subsets_of_size(sched.u, a + 1);  // subsets of S by position
    for (Mask tt : placement.split.tau_t_cells) {
      Mask group = plan.availability.at(tt);
      for (int rep = 0; rep < placement.split.f_cell; ++rep) {
        Batch batch;
        batch.active_users = s;
        batch.tau_t = tt;
        batch.rep = rep;
        for (Mask tl : t_local) {
          CodedMessage msg;
          msg.group = group;
          for (int pos : mask_to_list(tl)) msg.t_set |= (1u << s_users[pos]);
          for (int k : mask_to_list(msg.t_set)) {
            Mask tau_r = msg.t_set & ~(1u << k);
            msg.constituents.push_back({demand.d[k], tt, tau_r, rep});
            msg.sub_idx.push_back(sub_index_for(s, msg.t_set, p.kr, sched.q));
          }
          batch.messages.push_back(std::move(msg));
        }
        sched.batches.push_back(std::move(batch));
      }
    }
  }
  return sched;
}

// Every (user, uncached requested subfile, sub-packet) pair must be delivered
// exactly once across the schedule.
inline CoverageLedger coverage_ledger(const DeliverySchedule& sched) {
  CoverageLedger led;
  for (const auto& batch : sched.batches) {
    for (const auto& msg : batch.messages) {
      auto users = mask_to_list(msg.t_set);
      for (std::size_t i = 0; i < users.size(); ++i) {
        led[{users[i], msg.constituents[i], msg.sub_idx[i]}] += 1;
      }
    }
  }
  return led;
}

// Serving bound: slot user count cannot exceed the weakest
// delivered packet's n_T * |availability| + |tau_r|.
inline bool serving_bound_check(const DeliverySchedule& sched) {
  for (const auto& batch : sched.batches) {
    int served = popcount(batch.active_users);
    for (const auto& msg : batch.messages) {
      for (const auto& sf : msg.constituents) {
        int cap = sched.params.nt * popcount(msg.group) + popcount(sf.tau_r);
        if (served > cap) return false;
      }
    }
  }
  return true;
}

enum class ZfMode { kStrict, kBestEffort };

// Beam per message: unit vector in the null space of the stacked channels of
// the slot's other active users, restricted to the message's group antennas.
inline void zf_beamformers(Batch& batch, const ChannelRealization& ch, const SystemParams& p,
                           ZfMode mode = ZfMode::kStrict) {
  for (auto& msg : batch.messages) {
    int dim = popcount(msg.group) * p.nt;
    auto targets = mask_to_list(batch.active_users & ~msg.t_set);
    if (mode == ZfMode::kBestEffort && static_cast<int>(targets.size()) > dim - 1)
      targets.resize(dim - 1);
    if (targets.empty()) {
      msg.beam = Eigen::VectorXcd::Zero(dim);
      msg.beam(0) = 1.0;
      continue;
    }
    Eigen::MatrixXcd constraints(targets.size(), dim);
    for (std::size_t z = 0; z < targets.size(); ++z)
      constraints.row(z) = ch.stacked(targets[z], msg.group, p.nt).adjoint();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(constraints, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > kNullSpaceTol * sv(0)) ++rank;
    if (rank >= dim)
      throw RankDeficientChannel("no null space: " + std::to_string(targets.size()) +
                                 " targets in dimension " + std::to_string(dim));
    msg.beam = svd.matrixV().col(dim - 1).normalized();  // smallest singular direction
  }
}

// Unit-magnitude ground-truth symbol for one (sub-)packet, reproducible from
// the run seed alone.
inline std::complex<double> ground_truth_symbol(std::uint64_t seed, const SubfileIndex& sf,
                                                int sub_idx) {
  std::uint64_t w1 = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(sf.file)) << 32) |
                     sf.tau_t;
  std::uint64_t w2 = (static_cast<std::uint64_t>(sf.tau_r) << 24) |
                     static_cast<std::uint64_t>(static_cast<std::uint32_t>(sf.rep) & 0xffffffu);
  std::uint64_t x = mix_seed(seed, w1, w2, static_cast<std::uint64_t>(sub_idx) + 1);
  double theta = 2.0 * std::numbers::pi * (static_cast<double>(x >> 11) * 0x1.0p-53);
  return {std::cos(theta), std::sin(theta)};
}

// One-shot superposition: per-EN transmit vectors for one slot, then the
// received scalar per user (noiseless unless noise_std > 0).
inline Eigen::VectorXcd transmit_and_receive(const Batch& batch, const Slot& slot,
                                             const ChannelRealization& ch,
                                             const SystemParams& p, std::uint64_t symbol_seed,
                                             double noise_std = 0.0,
                                             Rng* noise_rng = nullptr) {
  std::vector<Eigen::VectorXcd> x(p.kt, Eigen::VectorXcd::Zero(p.nt));
  for (std::size_t mi = 0; mi < batch.messages.size(); ++mi) {
    const auto& msg = batch.messages[mi];
    std::complex<double> m_symbol = 0.0;
    for (std::size_t c = 0; c < msg.constituents.size(); ++c) {
      m_symbol += slot.coeffs[mi][c] *
                  ground_truth_symbol(symbol_seed, msg.constituents[c], msg.sub_idx[c]);
    }
    int at = 0;
    for (int en : mask_to_list(msg.group)) {
      x[en] += msg.beam.segment(at, p.nt) * m_symbol;
      at += p.nt;
    }
  }
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(p.kr);
  for (int k = 0; k < p.kr; ++k) {
    std::complex<double> acc = 0.0;
    for (int en = 0; en < p.kt; ++en)
      acc += ch.h.row(k).segment(en * p.nt, p.nt).dot(x[en]);  // h^H x
    y(k) = acc;
    if (noise_std > 0.0 && noise_rng) y(k) += noise_std * noise_rng->cnormal();
  }
  return y;
}

struct SimReport {
  SystemParams params;
  std::uint64_t seed = 0;
  int m = 0;
  int u = 0;
  int reps = 0;
  int q = 1;
  int f_effective = 0;
  std::int64_t mini_slots = 0;
  std::int64_t pushed_packets_max = 0;
  // exact rationals (reduced): empirical NDTs
  std::int64_t delta_e_num = 0, delta_e_den = 1;
  double delta_e_emp = 0.0;
  double delta_f_emp = 0.0;
  double delta_e_analytic = 0.0;
  double delta_f_analytic = 0.0;
  bool exact_edge_match = true;
  bool exact_fronthaul_match = true;
  bool decode_ok = true;
  std::vector<int> decode_failures;  // user ids with any failed decode
  double max_zf_residual = 0.0;      // relative leakage at protected users
  double min_desired_gain = 1.0;     // relative |h^H w| at served users
  double max_decode_rel_err = 0.0;
  double max_condition = 0.0;
  bool serving_bound_ok = true;
};

namespace detail {

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  while (b) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

}  // namespace detail

// Full pipeline on one seed: channels per batch, beams, repeated slots with
// fresh coefficients, cache cancellation, per-batch linear decode.
inline SimReport run_delivery(const DeliverySchedule& sched, const FronthaulPlan& plan,
                              std::uint64_t seed, double noise_std = 0.0) {
  const SystemParams& p = sched.params;
  SimReport rep;
  rep.params = p;
  rep.seed = seed;
  rep.m = sched.m;
  rep.u = sched.u;
  rep.reps = sched.reps;
  rep.q = sched.q;
  rep.f_effective = sched.split.f_effective;
  rep.mini_slots = sched.mini_slots();
  rep.pushed_packets_max = plan.max_pushed();
  rep.serving_bound_ok = serving_bound_check(sched);

  const int f_eff = sched.split.f_effective;
  if (p.mu_r >= 1.0 || sched.batches.empty()) {
    rep.delta_e_num = 0;
    rep.delta_e_den = 1;
    return rep;
  }

  // empirical NDTs as exact fractions of packet time
  std::int64_t num = rep.mini_slots;
  std::int64_t den = static_cast<std::int64_t>(sched.q) * f_eff;
  std::int64_t g = detail::gcd64(num, den);
  rep.delta_e_num = num / (g ? g : 1);
  rep.delta_e_den = den / (g ? g : 1);
  rep.delta_e_emp = static_cast<double>(num) / static_cast<double>(den);
  rep.delta_f_emp = rep.pushed_packets_max == 0
                        ? 0.0
                        : static_cast<double>(rep.pushed_packets_max) / (f_eff * p.r);
  rep.delta_e_analytic = delta_edge(sched.m, p);
  rep.delta_f_analytic = delta_fronthaul(sched.m, p);
  // edge: mini_slots * u == q * F * K_R (1 - mu_R), exact integers
  rep.exact_edge_match =
      rep.mini_slots * sched.u ==
      static_cast<std::int64_t>(sched.q) * f_eff * (p.kr - p.r_units());
  // fronthaul: max per-EN packets * K_T == K_R F (m - t) when loads divide evenly
  std::int64_t total_push = std::accumulate(plan.pushed_packets.begin(),
                                            plan.pushed_packets.end(), std::int64_t{0});
  rep.exact_fronthaul_match =
      rep.pushed_packets_max * p.kt == total_push &&
      total_push == static_cast<std::int64_t>(p.kr) * f_eff * (sched.m - p.t_units());

  std::vector<bool> user_failed(p.kr, false);
  Rng coeff_rng(mix_seed(seed, 0x636f6566ull));
  const std::uint64_t symbol_seed = mix_seed(seed, 0x73796d62ull);
  Rng noise_rng(mix_seed(seed, 0x6e6f6973ull));

  for (std::size_t bi = 0; bi < sched.batches.size(); ++bi) {
    Batch batch = sched.batches[bi];
    ChannelRealization ch = draw_channels(p, mix_seed(seed, 0x62617463ull, bi));
    zf_beamformers(batch, ch, p);

    // slot coefficients and received signals
    std::vector<Slot> slots(sched.reps);
    std::vector<Eigen::VectorXcd> received(sched.reps);
    for (int rr = 0; rr < sched.reps; ++rr) {
      slots[rr].batch = static_cast<int>(bi);
      slots[rr].repetition = rr;
      slots[rr].coeffs.resize(batch.messages.size());
      for (std::size_t mi = 0; mi < batch.messages.size(); ++mi) {
        auto& cs = slots[rr].coeffs[mi];
        cs.resize(batch.messages[mi].constituents.size());
        for (auto& c : cs) {
          do {
            c = coeff_rng.cnormal();
          } while (std::abs(c) < 1e-8);
        }
      }
      received[rr] = transmit_and_receive(batch, slots[rr], ch, p, symbol_seed, noise_std,
                                          &noise_rng);
    }

    // ZF residual / desired gain bookkeeping
    for (const auto& msg : batch.messages) {
      double bn = msg.beam.norm();
      for (int k : mask_to_list(batch.active_users)) {
        Eigen::VectorXcd hk = ch.stacked(k, msg.group, p.nt);
        double gain = std::abs((hk.adjoint() * msg.beam)(0));
        double scale = hk.norm() * bn;
        if ((msg.t_set >> k) & 1u) {
          rep.min_desired_gain = std::min(rep.min_desired_gain, gain / scale);
        } else {
          rep.max_zf_residual = std::max(rep.max_zf_residual, gain / scale);
        }
      }
    }

    // per-user decode: reps x reps system over the repeated slots
    for (int k : mask_to_list(batch.active_users)) {
      std::vector<std::size_t> mine;  // messages containing k
      for (std::size_t mi = 0; mi < batch.messages.size(); ++mi)
        if ((batch.messages[mi].t_set >> k) & 1u) mine.push_back(mi);
      const int nk = static_cast<int>(mine.size());
      Eigen::MatrixXcd sys(sched.reps, nk);
      Eigen::VectorXcd rhs(sched.reps);
      Eigen::VectorXcd truth(nk);
      for (int col = 0; col < nk; ++col) {
        const auto& msg = batch.messages[mine[col]];
        auto users = mask_to_list(msg.t_set);
        std::size_t pos = std::find(users.begin(), users.end(), k) - users.begin();
        truth(col) = ground_truth_symbol(symbol_seed, msg.constituents[pos], msg.sub_idx[pos]);
      }
      for (int rr = 0; rr < sched.reps; ++rr) {
        std::complex<double> cached = 0.0;
        for (int col = 0; col < nk; ++col) {
          const auto& msg = batch.messages[mine[col]];
          Eigen::VectorXcd hk = ch.stacked(k, msg.group, p.nt);
          std::complex<double> gain = (hk.adjoint() * msg.beam)(0);
          auto users = mask_to_list(msg.t_set);
          for (std::size_t c = 0; c < users.size(); ++c) {
            if (users[c] == k) {
              sys(rr, col) = gain * slots[rr].coeffs[mine[col]][c];
            } else {
              // constituent desired by users[c] is cached at k (k in its tau_r)
              cached += gain * slots[rr].coeffs[mine[col]][c] *
                        ground_truth_symbol(symbol_seed, msg.constituents[c],
                                            msg.sub_idx[c]);
            }
          }
        }
        rhs(rr) = received[rr](k) - cached;
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys, Eigen::ComputeThinU | Eigen::ComputeThinV);
      double cond = svd.singularValues()(0) /
                    svd.singularValues()(svd.singularValues().size() - 1);
      rep.max_condition = std::max(rep.max_condition, cond);
      if (!(cond < 1e12))
        throw SingularDecodeSystem("decode system singular at seed " + std::to_string(seed) +
                                   " batch " + std::to_string(bi));
      Eigen::VectorXcd sol = svd.solve(rhs);
      double err = (sol - truth).norm() / truth.norm();
      rep.max_decode_rel_err = std::max(rep.max_decode_rel_err, err);
      if (!(err <= kDecodeTol) && noise_std == 0.0) user_failed[k] = true;
    }
  }
  for (int k = 0; k < p.kr; ++k)
    if (user_failed[k]) rep.decode_failures.push_back(k);
  rep.decode_ok = rep.decode_failures.empty();
  return rep;
}

struct SimulationArtifacts {
  CachePlacement placement;
  DemandVector demand;
  FronthaulPlan plan;
  DeliverySchedule schedule;
  SimReport report;
};

// placement -> fronthaul plan -> schedule -> decode, on one seed.
inline SimulationArtifacts run_simulation_full(const SystemParams& params, std::uint64_t seed,
                                               int m_override = -1, double noise_std = 0.0) {
  require_valid(params);
  SystemParams p = params.snapped(1e-2);
  SimulationArtifacts art;
  art.placement = build_placement(p);
  art.demand = worst_case_demand(p);
  art.plan.f_effective = art.placement.split.f_effective;
  art.plan.pushed_packets.assign(p.kt, 0);
  art.schedule.params = p;
  art.schedule.split = art.placement.split;
  if (p.mu_r >= 1.0) {
    art.report = run_delivery(art.schedule, art.plan, seed, noise_std);
    return art;
  }
  int m = m_override >= 0 ? m_override : m_opt(p).m_final;
  art.plan = plan_fronthaul(art.placement, art.demand, m);
  art.schedule = build_schedule(art.placement, art.plan, art.demand, p);
  art.report = run_delivery(art.schedule, art.plan, seed, noise_std);
  return art;
}

inline SimReport run_simulation(const SystemParams& params, std::uint64_t seed,
                                int m_override = -1, double noise_std = 0.0) {
  return run_simulation_full(params, seed, m_override, noise_std).report;
}

// Overload probe: a slot serving n_T m + m_R + 1 users. Strict
// construction must fail; best-effort leaves measurable interference at the
// dropped target.
struct OverloadProbe {
  bool bound_check = true;        // serving_bound_check on the overloaded slot
  bool strict_threw = false;      // RankDeficientChannel raised
  double best_effort_residual = 0.0;  // relative leakage at the unprotected user
};

inline OverloadProbe overloaded_slot_probe(int nt, int m, int m_r, std::uint64_t seed) {
  SystemParams p;
  p.kt = m;
  p.nt = nt;
  p.kr = nt * m + m_r + 1;
  p.n_files = p.kr;
  p.f_packets = 1;
  p.mu_t = 1.0;
  p.mu_r = static_cast<double>(m_r) / p.kr;
  OverloadProbe probe;
  Mask group = (1u << m) - 1u;
  Mask s_all = (1u << p.kr) - 1u;
  Batch batch;
  batch.active_users = s_all;
  batch.tau_t = group;
  CodedMessage msg;
  msg.group = group;
  msg.t_set = (1u << (m_r + 1)) - 1u;  // first m_r+1 users
  for (int k : mask_to_list(msg.t_set)) {
    msg.constituents.push_back({k + 1, group, msg.t_set & ~(1u << k), 0});
    msg.sub_idx.push_back(0);
  }
  batch.messages.push_back(msg);

  DeliverySchedule sched;
  sched.params = p;
  sched.m = m;
  sched.u = p.kr;
  sched.batches.push_back(batch);
  probe.bound_check = serving_bound_check(sched);

  ChannelRealization ch = draw_channels(p, seed);
  try {
    Batch strict = batch;
    zf_beamformers(strict, ch, p, ZfMode::kStrict);
  } catch (const RankDeficientChannel&) {
    probe.strict_threw = true;
  }
  Batch soft = batch;
  zf_beamformers(soft, ch, p, ZfMode::kBestEffort);
  auto targets = mask_to_list(batch.active_users & ~msg.t_set);
  int dim = nt * m;
  // targets beyond dim-1 were dropped by best effort
  for (std::size_t z = dim - 1; z < targets.size(); ++z) {
    Eigen::VectorXcd hk = ch.stacked(targets[z], group, p.nt);
    double rel = std::abs((hk.adjoint() * soft.messages[0].beam)(0)) /
                 (hk.norm() * soft.messages[0].beam.norm());
    probe.best_effort_residual = std::max(probe.best_effort_residual, rel);
  }
  return probe;
}

}  // namespace cachedof
