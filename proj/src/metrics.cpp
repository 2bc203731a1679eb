#include "relaybf/metrics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "relaybf/rng.hpp"

namespace relaybf {

Vec relay_powers(const CVec& w, const DerivedQuantities& dq) {
    if (w.size() != dq.xi_r.size())
        throw std::invalid_argument("relay_powers: dimension mismatch");
    return dq.xi_r.cwiseProduct(w.cwiseAbs2());
}

namespace {

double quad_form(const CVec& w, const CMat& m) {
    return (w.adjoint() * m * w).value().real();
}

}  // namespace

double sinr(const CVec& w, const DerivedQuantities& dq, User user,
            const NetworkConfig& config) {
    const int i = static_cast<int>(user) % 2;
    const int other = 1 - i;
    const bool primary = user == User::P1 || user == User::P2;
    const CVec& k = primary ? dq.k_p1p2 : dq.k_s1s2;
    const double p_other = primary ? config.p_primary[other] : config.p_secondary[other];
    const double num = p_other * std::norm(k.dot(w));
    const CMat& q = primary ? dq.q_p[i] : dq.q_s[i];
    const double zeta = primary ? dq.zeta_p[i] : dq.zeta_s[i];
    const double den = quad_form(w, q) + zeta + config.noise_var;
    return num / den;
}

double objective(const CVec& w, const DerivedQuantities& dq, const NetworkConfig& config) {
    double value = sinr(w, dq, User::P1, config);
    value = std::min(value, sinr(w, dq, User::P2, config));
    value = std::min(value, config.mu * sinr(w, dq, User::S1, config));
    value = std::min(value, config.mu * sinr(w, dq, User::S2, config));
    return value;
}

double rate(double sinr) {
    if (sinr < 0.0) throw std::invalid_argument("rate: sinr must be nonnegative");
    return std::log1p(sinr) / std::numbers::ln2;
}

namespace {

struct ShardStats {
    std::array<double, 4> den_sum{};
    std::array<double, 4> den_sumsq{};
};

// One receiver's view of the two-phase exchange: source gains through the
// relays, direct interferer gains, and the relayed-noise weights.
struct ReceiverView {
    std::array<Complex, 4> gain;  // relayed gain from each source symbol
    CVec relayed_noise;           // conj(w) .* f_receiver
    const CVec* h_direct;         // interferer -> receiver
    int self;                     // own symbol index
    int desired;                  // partner symbol index
    double p_desired;
};

ShardStats run_shard(const std::array<ReceiverView, 4>& views,
                     const std::array<double, 4>& src_power,
                     const std::vector<Complex>& relayed_interferer_gain,
                     const NetworkConfig& config, std::int64_t n_symbols,
                     std::uint64_t seed) {
    const int ni = config.n_interferers;
    const int nr = config.n_relays;
    const double sigma = std::sqrt(config.noise_var);
    Rng rng(seed);
    ShardStats stats;
    std::array<Complex, 4> x;
    std::vector<Complex> x1(ni), x2(ni);
    CVec noise(nr);
    for (std::int64_t t = 0; t < n_symbols; ++t) {
        for (auto& s : x) s = rng.unit_symbol();
        for (auto& s : x1) s = rng.unit_symbol();
        for (auto& s : x2) s = rng.unit_symbol();
        for (int k = 0; k < nr; ++k) noise(k) = sigma * rng.cgaussian();
        for (int u = 0; u < 4; ++u) {
            const ReceiverView& view = views[u];
            Complex y = 0.0;
            for (int src = 0; src < 4; ++src) {
                if (src == view.self) continue;  // self-interference removed
                y += std::sqrt(src_power[src]) * view.gain[src] * x[src];
            }
            for (int l = 0; l < ni; ++l) {
                const double a = std::sqrt(config.p_interferer[l]);
                y += a * relayed_interferer_gain[u * ni + l] * x1[l];
                y += a * (*view.h_direct)(l) * x2[l];
            }
            for (int k = 0; k < nr; ++k) y += view.relayed_noise(k) * noise(k);
            y += sigma * rng.cgaussian();
            const Complex desired =
                std::sqrt(view.p_desired) * view.gain[view.desired] * x[view.desired];
            const double residual = std::norm(y - desired);
            stats.den_sum[u] += residual;
            stats.den_sumsq[u] += residual * residual;
        }
    }
    return stats;
}

}  // namespace

EmpiricalSinr empirical_sinr(const CVec& w, const ChannelSet& channels,
                             const NetworkConfig& config, std::int64_t n_symbols,
                             std::uint64_t seed) {
    config.validate();
    channels.validate(config);
    if (w.size() != config.n_relays)
        throw std::invalid_argument("empirical_sinr: dimension mismatch");
    if (n_symbols < 1000)
        throw std::invalid_argument("empirical_sinr: need at least 1000 symbols");

    const int ni = config.n_interferers;
    const std::array<const CVec*, 4> f = {&channels.f_p[0], &channels.f_p[1],
                                          &channels.f_s[0], &channels.f_s[1]};
    const std::array<double, 4> src_power = {config.p_primary[0], config.p_primary[1],
                                             config.p_secondary[0], config.p_secondary[1]};

    std::array<ReceiverView, 4> views;
    std::vector<Complex> relayed_interferer_gain(4 * std::max(ni, 1));
    for (int u = 0; u < 4; ++u) {
        ReceiverView& view = views[u];
        view.relayed_noise = w.conjugate().cwiseProduct(*f[u]);
        for (int src = 0; src < 4; ++src)
            view.gain[src] = view.relayed_noise.transpose() * (*f[src]);
        for (int l = 0; l < ni; ++l)
            relayed_interferer_gain[u * ni + l] =
                view.relayed_noise.transpose() * channels.h_i[l];
        view.self = u;
        view.desired = (u % 2 == 0) ? u + 1 : u - 1;
        view.p_desired = src_power[view.desired];
        view.h_direct = (u < 2) ? &channels.h_p[u] : &channels.h_s[u - 2];
    }

    const int n_shards = 64;
    ShardStats total;
    std::int64_t done = 0;
    for (int shard = 0; shard < n_shards; ++shard) {
        const std::int64_t count =
            n_symbols / n_shards + (shard < n_symbols % n_shards ? 1 : 0);
        if (count == 0) continue;
        ShardStats s = run_shard(views, src_power, relayed_interferer_gain, config, count,
                                 derive_seed(seed, 0x73796d62ULL, shard));
        for (int u = 0; u < 4; ++u) {
            total.den_sum[u] += s.den_sum[u];
            total.den_sumsq[u] += s.den_sumsq[u];
        }
        done += count;
    }

    EmpiricalSinr out;
    for (int u = 0; u < 4; ++u) {
        // Unit-modulus symbols make the desired-term power exact.
        const double num = views[u].p_desired * std::norm(views[u].gain[views[u].desired]);
        const double n = static_cast<double>(done);
        const double mean = total.den_sum[u] / n;
        const double var =
            std::max(0.0, (total.den_sumsq[u] - n * mean * mean) / (n - 1.0));
        const double se_mean = std::sqrt(var / n);
        out.estimate[u] = num / mean;
        out.std_error[u] = out.estimate[u] * se_mean / mean;
    }
    return out;
}

}  // namespace relaybf
