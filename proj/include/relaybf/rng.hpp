#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace relaybf {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mixes a base seed with up to three stream indices. Used everywhere a
/// sub-stream is derived (per trial, per sweep point, per shard) so that
/// results do not depend on how work is partitioned.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t state = base;
    std::uint64_t out = splitmix64_next(state);
    state ^= a + 0x9e3779b97f4a7c15ULL;
    out ^= splitmix64_next(state);
    state ^= b + 0xbf58476d1ce4e5b9ULL;
    out ^= splitmix64_next(state);
    state ^= c + 0x94d049bb133111ebULL;
    out ^= splitmix64_next(state);
    return out;
}

/// xoshiro256++ with hand-rolled distributions. std:: distributions are
/// implementation-defined, so everything here is explicit to keep identical
/// seeds bit-identical across platforms and compilers.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller.
    double gaussian() {
        const double u = uniform_pos();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }

    /// Circularly-symmetric complex normal, E|z|^2 = 1.
    std::complex<double> cgaussian() {
        const double u = uniform_pos();
        const double v = uniform();
        const double r = std::sqrt(-std::log(u));
        return std::polar(r, 2.0 * std::numbers::pi * v);
    }

    /// Unit-modulus symbol with uniform phase.
    std::complex<double> unit_symbol() {
        return std::polar(1.0, 2.0 * std::numbers::pi * uniform());
    }

    Eigen::VectorXcd cgaussian_vector(int n) {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = cgaussian();
        return v;
    }

    /// Uniform draw from the complex n-ball of the given radius.
    Eigen::VectorXcd ball_point(int n, double radius) {
        if (n == 0 || radius <= 0.0) return Eigen::VectorXcd::Zero(n);
        Eigen::VectorXcd dir = cgaussian_vector(n);
        const double nrm = dir.norm();
        if (nrm == 0.0) return Eigen::VectorXcd::Zero(n);
        const double r = radius * std::pow(uniform(), 1.0 / (2.0 * n));
        return dir * (r / nrm);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace relaybf
