#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relaybf/types.hpp"

namespace relaybf {

/// 10^(x/10), milliwatt-referenced; the reference cancels across quantities.
double dbm_to_linear(double x_dbm);

/// One Monte Carlo sweep description, dBm-denominated. Mirrors the config
/// file schema (dBm fields end in _dbm, percentages in _pct).
struct ExperimentSpec {
    int n_relays = 10;
    int n_interferers = 2;
    std::array<double, 2> p_primary_dbm{0.0, 0.0};
    std::array<double, 2> p_secondary_dbm{0.0, 0.0};
    std::vector<double> p_interferer_dbm{-1.0, -1.0};
    double noise_dbm = 0.0;
    double mu = 3.0;
    std::vector<double> relay_cap_dbm{1.0};  // one value broadcasts to all relays
    double imperfection_pct = 0.0;           // robust-mode base value

    enum class Sweep { noise_dbm, interferer_power_dbm, relay_cap_dbm, imperfection_pct };
    Sweep sweep = Sweep::noise_dbm;
    std::vector<double> sweep_values;

    int trials = 500;
    std::uint64_t seed = 0;
    enum class Mode { perfect, robust };
    Mode mode = Mode::perfect;

    std::string out_path;
    enum class Format { csv, json };
    Format format = Format::csv;
    int threads = 0;  // 0 = hardware concurrency

    static ExperimentSpec from_json_text(const std::string& text);
    static ExperimentSpec from_json_file(const std::string& path);
    void validate() const;

    /// Linear-scale network parameters at one sweep point.
    NetworkConfig config_at(double sweep_value) const;
    double imperfection_at(double sweep_value) const;
};

struct TrialRow {
    double sweep_value = 0.0;
    int trial = 0;
    double gamma = 0.0;
    std::array<double, 4> sinr{};  // p1, p2, s1, s2
    double rate_p_min = 0.0;
    double rate_s1 = 0.0;
    double rate_s2 = 0.0;
    bool rank_one_ok = false;
    int iterations = 0;
    std::string status;
};

struct ResultTable {
    std::vector<double> sweep_values;
    std::vector<TrialRow> rows;  // sorted by (point index, trial)

    std::vector<TrialRow> point_rows(int point_index) const;
};

/// Runs every (sweep point, trial) pair; deterministic for a given spec,
/// regardless of thread count. Infeasible or failed trials are recorded,
/// never fatal.
ResultTable run(const ExperimentSpec& spec);

void write_csv(const ResultTable& table, std::ostream& os);
void write_json(const ResultTable& table, std::ostream& os);

/// Writes to spec.out_path in spec.format. Throws std::runtime_error on I/O
/// failure.
void write_output(const ExperimentSpec& spec, const ResultTable& table);

}  // namespace relaybf
