#pragma once

#include <json.hpp>

#include <string>

#include "cachedof/bounds.hpp"
#include "cachedof/delivery.hpp"
#include "cachedof/ndt.hpp"
#include "cachedof/params.hpp"
#include "cachedof/placement.hpp"
#include "cachedof/sweep.hpp"

namespace cachedof {

using OrderedJson = nlohmann::ordered_json;

inline OrderedJson to_json(const SystemParams& p) {
  return OrderedJson{{"kt", p.kt},
                     {"nt", p.nt},
                     {"kr", p.kr},
                     {"n_files", p.n_files},
                     {"f_packets", p.f_packets},
                     {"mu_t", p.mu_t},
                     {"mu_r", p.mu_r},
                     {"r", p.r},
                     {"mu_t_kt", p.mu_t_kt()},
                     {"mu_r_kr", p.mu_r_kr()},
                     {"integer_regime", p.integer_regime()}};
}

inline OrderedJson to_json(const ValidationReport& rep) {
  return OrderedJson{
      {"ok", rep.ok}, {"integer_regime", rep.integer_regime}, {"violations", rep.violations}};
}

inline OrderedJson to_json(const NdtBreakdown& b) {
  return OrderedJson{{"delta_f", b.delta_f},
                     {"delta_e", b.delta_e},
                     {"delta_total", b.delta_total},
                     {"m_used", b.m_used}};
}

inline OrderedJson to_json(const BoundsReport& rep) {
  return OrderedJson{{"delta_up", rep.delta_up},
                     {"f_min", rep.f_min},
                     {"delta_lb_prime", rep.delta_lb_prime},
                     {"gap", rep.gap},
                     {"branch_tags",
                      OrderedJson{{"m", to_string(rep.m_branch)},
                                  {"m_used", rep.m_used},
                                  {"lower_bound", to_string(rep.lb_branch)},
                                  {"local_gain_floor", rep.lb_floor_active},
                                  {"f_min_clip", rep.lb_fmin_clipped}}}};
}

inline OrderedJson to_json(const SubfileIndex& sf) {
  OrderedJson tt = OrderedJson::array();
  for (int e : mask_to_list(sf.tau_t)) tt.push_back(e + 1);
  OrderedJson tr = OrderedJson::array();
  for (int u : mask_to_list(sf.tau_r)) tr.push_back(u + 1);
  return OrderedJson{{"file", sf.file}, {"tau_t", tt}, {"tau_r", tr}, {"rep", sf.rep}};
}

inline OrderedJson to_json(const CachePlacement& pl) {
  OrderedJson en = OrderedJson::array();
  for (int e = 0; e < pl.params.kt; ++e) {
    OrderedJson list = OrderedJson::array();
    for (const auto& sf : pl.en_cache(e)) list.push_back(to_json(sf));
    en.push_back(list);
  }
  OrderedJson user = OrderedJson::array();
  for (int u = 0; u < pl.params.kr; ++u) {
    OrderedJson list = OrderedJson::array();
    for (const auto& sf : pl.user_cache(u)) list.push_back(to_json(sf));
    user.push_back(list);
  }
  return OrderedJson{{"f_effective", pl.split.f_effective},
                     {"f_adjusted", pl.split.f_adjusted},
                     {"packets_per_cell", pl.split.f_cell},
                     {"en_cache", en},
                     {"user_cache", user}};
}

inline OrderedJson to_json(const FronthaulPlan& plan) {
  OrderedJson avail = OrderedJson::array();
  for (const auto& [tt, a] : plan.availability) {
    OrderedJson from = OrderedJson::array(), to = OrderedJson::array();
    for (int e : mask_to_list(tt)) from.push_back(e + 1);
    for (int e : mask_to_list(a)) to.push_back(e + 1);
    avail.push_back(OrderedJson{{"tau_t", from}, {"availability", to}});
  }
  OrderedJson pushes = OrderedJson::array();
  for (int e = 0; e < static_cast<int>(plan.pushes.size()); ++e) {
    OrderedJson list = OrderedJson::array();
    for (const auto& sf : plan.pushes[e]) list.push_back(to_json(sf));
    pushes.push_back(OrderedJson{{"en", e + 1}, {"packets", plan.pushed_packets[e]}, {"subfiles", list}});
  }
  return OrderedJson{{"m", plan.m}, {"availability", avail}, {"pushes", pushes}};
}

inline OrderedJson to_json(const SimReport& rep) {
  return OrderedJson{
      {"params", to_json(rep.params)},
      {"seed", rep.seed},
      {"m", rep.m},
      {"u", rep.u},
      {"repetitions", rep.reps},
      {"subpacketization", rep.q},
      {"f_effective", rep.f_effective},
      {"slots_used", rep.mini_slots},
      {"pushed_packets_max", rep.pushed_packets_max},
      {"delta_e_emp", rep.delta_e_emp},
      {"delta_e_emp_exact",
       std::to_string(rep.delta_e_num) + "/" + std::to_string(rep.delta_e_den)},
      {"delta_f_emp", rep.delta_f_emp},
      {"delta_e_analytic", rep.delta_e_analytic},
      {"delta_f_analytic", rep.delta_f_analytic},
      {"exact_edge_match", rep.exact_edge_match},
      {"exact_fronthaul_match", rep.exact_fronthaul_match},
      {"decode_ok", rep.decode_ok},
      {"decode_failures", rep.decode_failures},
      {"max_zf_residual", rep.max_zf_residual},
      {"min_desired_gain", rep.min_desired_gain},
      {"max_decode_rel_err", rep.max_decode_rel_err},
      {"max_condition", rep.max_condition},
      {"serving_bound_ok", rep.serving_bound_ok}};
}

inline OrderedJson to_json(const SweepRow& row) {
  return OrderedJson{{"mu_t_kt", row.mu_t_kt},
                     {"mu_r_kr", row.mu_r_kr},
                     {"n_t", row.n_t},
                     {"r", row.r},
                     {"m", row.m},
                     {"delta_f", row.delta_f},
                     {"delta_e", row.delta_e},
                     {"delta_up", row.delta_up},
                     {"f_min", row.f_min},
                     {"delta_lb_prime", row.delta_lb_prime},
                     {"gap", row.gap}};
}

}  // namespace cachedof
