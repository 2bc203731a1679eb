#pragma once

#include <cstdint>

#include "relaybf/model.hpp"
#include "relaybf/rng.hpp"
#include "relaybf/types.hpp"

namespace relaybf::testing {

/// Benchmark-style parameters: 0 dBm transceivers, -1 dBm interferers,
/// 1 dBm relay caps, unit noise.
inline NetworkConfig default_config(int n_relays, int n_interferers,
                                    double mu = 3.0, double noise_var = 1.0) {
    NetworkConfig cfg;
    cfg.n_relays = n_relays;
    cfg.n_interferers = n_interferers;
    cfg.p_primary = {1.0, 1.0};
    cfg.p_secondary = {1.0, 1.0};
    cfg.p_interferer.assign(n_interferers, 0.7943282347242815);  // -1 dBm
    cfg.noise_var = noise_var;
    cfg.mu = mu;
    cfg.p_relay_max.assign(n_relays, 1.2589254117941673);  // 1 dBm
    cfg.eps_interferer.assign(n_interferers, 0.0);
    return cfg;
}

/// Random beamformer rescaled to satisfy every relay cap with margin.
inline CVec random_feasible_w(const NetworkConfig& cfg, const DerivedQuantities& dq,
                              Rng& rng, double margin = 1.0) {
    CVec w = rng.cgaussian_vector(cfg.n_relays);
    double scale = 1e300;
    for (int j = 0; j < cfg.n_relays; ++j) {
        const double cap = margin * cfg.p_relay_max[j] / (dq.xi_r(j) * std::norm(w(j)));
        scale = std::min(scale, std::sqrt(cap));
    }
    return w * (scale * rng.uniform_pos());
}

}  // namespace relaybf::testing
