#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "cachedof/combinatorics.hpp"
#include "cachedof/params.hpp"
#include "cachedof/rng.hpp"

namespace cachedof {

// One fading realization: h(k, i*n_T + a) is the coefficient from antenna a
// of EN i to user k, i.i.d. CN(0,1). Constant within a transmission batch.
struct ChannelRealization {
  Eigen::MatrixXcd h;  // kr x (kt*nt)
  std::uint64_t seed = 0;

  // channels from the ENs in `group` to user k, stacked in ascending EN order
  Eigen::VectorXcd stacked(int user, Mask group, int nt) const {
    Eigen::VectorXcd v(popcount(group) * nt);
    int at = 0;
    for (int en : mask_to_list(group)) {
      v.segment(at, nt) = h.row(user).segment(en * nt, nt).transpose();
      at += nt;
    }
    return v;
  }
};

inline ChannelRealization draw_channels(const SystemParams& p, std::uint64_t seed) {
  ChannelRealization c;
  c.seed = seed;
  c.h.resize(p.kr, p.kt * p.nt);
  Rng rng(mix_seed(seed, 0x6368616eull));  // domain-separated from other draws
  for (int k = 0; k < p.kr; ++k)
    for (int col = 0; col < p.kt * p.nt; ++col) c.h(k, col) = rng.cnormal();
  return c;
}

}  // namespace cachedof
