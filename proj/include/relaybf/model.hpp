#pragma once

#include <cstdint>

#include "relaybf/types.hpp"

namespace relaybf {

/// Draws one i.i.d. CN(0,1) realization of every channel vector.
/// Pure function of (config, seed); identical seeds give bit-identical sets.
ChannelSet generate_channels(const NetworkConfig& config, std::uint64_t seed);

struct UncertaintySpec {
    enum class Kind { absolute, fractional };
    Kind kind = Kind::absolute;
    double rho = 0.0;  // fractional radius, 0 <= rho < 1

    static UncertaintySpec absolute() { return {Kind::absolute, 0.0}; }
    static UncertaintySpec fractional(double rho) { return {Kind::fractional, rho}; }
};

/// Builds estimated interferer-side channels from the true ones by drawing a
/// perturbation uniformly in the error ball. In fractional mode the radius is
/// rho times the norm of the resulting estimate, so the draw is redrawn until
/// it is consistent with its own radius. Transceiver-relay channels are
/// copied exactly and the truth is retained for validation.
UncertaintyModel make_uncertainty(const ChannelSet& truth, const NetworkConfig& config,
                                  const UncertaintySpec& mode, std::uint64_t seed);

/// Precomputes every constraint ingredient from one channel realization.
DerivedQuantities derive(const NetworkConfig& config, const ChannelSet& channels);

}  // namespace relaybf
