#pragma once

#include <array>
#include <cstdint>

#include "relaybf/types.hpp"

namespace relaybf {

enum class User { P1 = 0, P2 = 1, S1 = 2, S2 = 3 };

/// Per-relay transmit power xi_j * |w_j|^2.
Vec relay_powers(const CVec& w, const DerivedQuantities& dq);

/// Exact SINR of one user for a given beamforming vector.
double sinr(const CVec& w, const DerivedQuantities& dq, User user,
            const NetworkConfig& config);

/// min { SINR_P1, SINR_P2, mu*SINR_S1, mu*SINR_S2 }.
double objective(const CVec& w, const DerivedQuantities& dq, const NetworkConfig& config);

/// log2(1 + sinr). Throws on negative input.
double rate(double sinr);

struct EmpiricalSinr {
    std::array<double, 4> estimate{};   // indexed by User
    std::array<double, 4> std_error{};
};

/// Symbol-level Monte Carlo estimate of all four SINRs: simulates both
/// relaying phases with unit-power uniform-phase symbols, subtracts
/// self-interference at each receiver, and measures desired over residual
/// power. Deterministic for a given seed regardless of shard count.
EmpiricalSinr empirical_sinr(const CVec& w, const ChannelSet& channels,
                             const NetworkConfig& config, std::int64_t n_symbols,
                             std::uint64_t seed);

}  // namespace relaybf
