#include "relaybf/types.hpp"

#include <stdexcept>
#include <string>

namespace relaybf {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("NetworkConfig: " + what);
}

}  // namespace

void NetworkConfig::validate() const {
    require(n_relays >= 1, "n_relays must be positive");
    require(n_interferers >= 0, "n_interferers must be nonnegative");
    for (double p : p_primary) require(p > 0.0, "primary powers must be positive");
    for (double p : p_secondary) require(p > 0.0, "secondary powers must be positive");
    require(static_cast<int>(p_interferer.size()) == n_interferers,
            "p_interferer length must equal n_interferers");
    for (double p : p_interferer) require(p >= 0.0, "interferer powers must be nonnegative");
    require(noise_var > 0.0, "noise_var must be positive");
    require(mu >= 1.0, "mu must be at least 1");
    require(static_cast<int>(p_relay_max.size()) == n_relays,
            "p_relay_max length must equal n_relays");
    for (double p : p_relay_max) require(p > 0.0, "relay power caps must be positive");
    for (double e : eps_primary) require(e >= 0.0, "eps_primary must be nonnegative");
    for (double e : eps_secondary) require(e >= 0.0, "eps_secondary must be nonnegative");
    require(static_cast<int>(eps_interferer.size()) == n_interferers,
            "eps_interferer length must equal n_interferers");
    for (double e : eps_interferer) require(e >= 0.0, "eps_interferer must be nonnegative");
}

void ChannelSet::validate(const NetworkConfig& config) const {
    auto check = [](bool ok) {
        if (!ok) throw std::invalid_argument("ChannelSet: dimension mismatch");
    };
    for (int i = 0; i < 2; ++i) {
        check(f_p[i].size() == config.n_relays);
        check(f_s[i].size() == config.n_relays);
        check(h_p[i].size() == config.n_interferers);
        check(h_s[i].size() == config.n_interferers);
    }
    check(static_cast<int>(h_i.size()) == config.n_interferers);
    for (const auto& h : h_i) check(h.size() == config.n_relays);
}

}  // namespace relaybf
