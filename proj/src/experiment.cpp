#include "relaybf/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "relaybf/metrics.hpp"
#include "relaybf/model.hpp"
#include "relaybf/optimizer.hpp"
#include "relaybf/rng.hpp"

namespace relaybf {

double dbm_to_linear(double x_dbm) { return std::pow(10.0, x_dbm / 10.0); }

namespace {

using nlohmann::ordered_json;

ExperimentSpec::Sweep sweep_from_key(const std::string& key) {
    if (key == "noise_dbm") return ExperimentSpec::Sweep::noise_dbm;
    if (key == "interferer_power_dbm") return ExperimentSpec::Sweep::interferer_power_dbm;
    if (key == "relay_cap_dbm") return ExperimentSpec::Sweep::relay_cap_dbm;
    if (key == "imperfection_pct") return ExperimentSpec::Sweep::imperfection_pct;
    throw std::invalid_argument("unknown sweep key: " + key);
}

const char* sweep_key(ExperimentSpec::Sweep sweep) {
    switch (sweep) {
        case ExperimentSpec::Sweep::noise_dbm: return "noise_dbm";
        case ExperimentSpec::Sweep::interferer_power_dbm: return "interferer_power_dbm";
        case ExperimentSpec::Sweep::relay_cap_dbm: return "relay_cap_dbm";
        case ExperimentSpec::Sweep::imperfection_pct: return "imperfection_pct";
    }
    return "?";
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

ExperimentSpec ExperimentSpec::from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    ExperimentSpec spec;
    try {
        spec.n_relays = j.value("n_relays", spec.n_relays);
        spec.n_interferers = j.value("n_interferers", spec.n_interferers);
        if (j.contains("p_primary_dbm")) {
            auto v = j.at("p_primary_dbm").get<std::vector<double>>();
            if (v.size() != 2) throw std::invalid_argument("p_primary_dbm needs 2 entries");
            spec.p_primary_dbm = {v[0], v[1]};
        }
        if (j.contains("p_secondary_dbm")) {
            auto v = j.at("p_secondary_dbm").get<std::vector<double>>();
            if (v.size() != 2) throw std::invalid_argument("p_secondary_dbm needs 2 entries");
            spec.p_secondary_dbm = {v[0], v[1]};
        }
        if (j.contains("p_interferer_dbm"))
            spec.p_interferer_dbm = j.at("p_interferer_dbm").get<std::vector<double>>();
        spec.noise_dbm = j.value("noise_dbm", spec.noise_dbm);
        spec.mu = j.value("mu", spec.mu);
        if (j.contains("relay_cap_dbm")) {
            const auto& rc = j.at("relay_cap_dbm");
            if (rc.is_array())
                spec.relay_cap_dbm = rc.get<std::vector<double>>();
            else
                spec.relay_cap_dbm = {rc.get<double>()};
        }
        spec.imperfection_pct = j.value("imperfection_pct", spec.imperfection_pct);
        if (j.contains("sweep")) {
            const auto& sw = j.at("sweep");
            if (!sw.is_object() || sw.size() != 1)
                throw std::invalid_argument("sweep must hold exactly one key");
            const auto it = sw.begin();
            spec.sweep = sweep_from_key(it.key());
            spec.sweep_values = it.value().get<std::vector<double>>();
        }
        spec.trials = j.value("trials", spec.trials);
        spec.seed = j.value("seed", spec.seed);
        if (j.contains("mode")) {
            const std::string mode = j.at("mode").get<std::string>();
            if (mode == "perfect")
                spec.mode = Mode::perfect;
            else if (mode == "robust")
                spec.mode = Mode::robust;
            else
                throw std::invalid_argument("mode must be perfect or robust");
        }
        if (j.contains("output")) {
            const auto& out = j.at("output");
            spec.out_path = out.value("path", spec.out_path);
            const std::string format = out.value("format", "csv");
            if (format == "csv")
                spec.format = Format::csv;
            else if (format == "json")
                spec.format = Format::json;
            else
                throw std::invalid_argument("format must be csv or json");
        }
        spec.threads = j.value("threads", spec.threads);
    } catch (const ordered_json::exception& e) {
        throw std::invalid_argument(std::string("config field error: ") + e.what());
    }
    spec.validate();
    return spec;
}

ExperimentSpec ExperimentSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void ExperimentSpec::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (sweep_values.empty()) throw std::invalid_argument("sweep must be nonempty");
    if (sweep == Sweep::imperfection_pct && mode != Mode::robust)
        throw std::invalid_argument("imperfection sweep requires robust mode");
    if (relay_cap_dbm.empty() ||
        (relay_cap_dbm.size() != 1 &&
         relay_cap_dbm.size() != static_cast<std::size_t>(n_relays)))
        throw std::invalid_argument("relay_cap_dbm must have 1 or n_relays entries");
    config_at(sweep_values.front()).validate();
}

NetworkConfig ExperimentSpec::config_at(double sweep_value) const {
    NetworkConfig cfg;
    cfg.n_relays = n_relays;
    cfg.n_interferers = n_interferers;
    for (int i = 0; i < 2; ++i) {
        cfg.p_primary[i] = dbm_to_linear(p_primary_dbm[i]);
        cfg.p_secondary[i] = dbm_to_linear(p_secondary_dbm[i]);
    }
    cfg.p_interferer.resize(n_interferers);
    for (int l = 0; l < n_interferers; ++l) {
        const double dbm = (sweep == Sweep::interferer_power_dbm) ? sweep_value
                                                                  : p_interferer_dbm[l];
        cfg.p_interferer[l] = dbm_to_linear(dbm);
    }
    cfg.noise_var =
        dbm_to_linear(sweep == Sweep::noise_dbm ? sweep_value : noise_dbm);
    cfg.mu = mu;
    cfg.p_relay_max.resize(n_relays);
    for (int j = 0; j < n_relays; ++j) {
        const double dbm = (sweep == Sweep::relay_cap_dbm)
                               ? sweep_value
                               : relay_cap_dbm[relay_cap_dbm.size() == 1 ? 0 : j];
        cfg.p_relay_max[j] = dbm_to_linear(dbm);
    }
    cfg.eps_interferer.assign(n_interferers, 0.0);
    return cfg;
}

double ExperimentSpec::imperfection_at(double sweep_value) const {
    return sweep == Sweep::imperfection_pct ? sweep_value : imperfection_pct;
}

std::vector<TrialRow> ResultTable::point_rows(int point_index) const {
    std::vector<TrialRow> out;
    const int trials = static_cast<int>(rows.size()) / static_cast<int>(sweep_values.size());
    out.assign(rows.begin() + static_cast<std::ptrdiff_t>(point_index) * trials,
               rows.begin() + static_cast<std::ptrdiff_t>(point_index + 1) * trials);
    return out;
}

namespace {

TrialRow run_trial(const ExperimentSpec& spec, int point_index, int trial) {
    const double value = spec.sweep_values[point_index];
    TrialRow row;
    row.sweep_value = value;
    row.trial = trial;
    try {
        const NetworkConfig cfg = spec.config_at(value);
        const std::uint64_t trial_seed = derive_seed(spec.seed, point_index, trial);
        const ChannelSet channels = generate_channels(cfg, trial_seed);
        BisectionConfig bc;
        BeamformingSolution sol;
        if (spec.mode == ExperimentSpec::Mode::perfect) {
            const DerivedQuantities dq = derive(cfg, channels);
            sol = optimize_perfect(dq, cfg, bc);
        } else {
            const double rho = spec.imperfection_at(value) / 100.0;
            const UncertaintyModel um = make_uncertainty(
                channels, cfg, UncertaintySpec::fractional(rho),
                derive_seed(trial_seed, 0x756e6365ULL));
            const DerivedQuantities dq_hat = derive(cfg, um.estimates);
            const RobustConstants rc = robust_constants(um, cfg, dq_hat);
            sol = optimize_robust(dq_hat, cfg, rc, um, bc);
        }
        row.gamma = sol.gamma;
        row.sinr = {sol.sinr_p[0], sol.sinr_p[1], sol.sinr_s[0], sol.sinr_s[1]};
        row.rate_p_min = rate(std::min(sol.sinr_p[0], sol.sinr_p[1]));
        row.rate_s1 = rate(sol.sinr_s[0]);
        row.rate_s2 = rate(sol.sinr_s[1]);
        row.rank_one_ok = sol.rank_one_ok;
        row.iterations = sol.iterations;
        row.status = sol.diagnostic.empty() ? "ok" : "infeasible";
    } catch (const std::exception&) {
        row.status = "error";
    }
    return row;
}

struct Aggregate {
    double mean = 0.0;
    double se = 0.0;
};

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate out;
    const double n = static_cast<double>(values.size());
    for (double v : values) out.mean += v;
    out.mean /= n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

using RowValues = std::array<double, 9>;  // gamma, 4 sinrs, 3 rates, rank fraction

RowValues row_values(const TrialRow& row) {
    return {row.gamma,  row.sinr[0], row.sinr[1],          row.sinr[2], row.sinr[3],
            row.rate_p_min, row.rate_s1, row.rate_s2, row.rank_one_ok ? 1.0 : 0.0};
}

void write_row(std::ostream& os, const TrialRow& row) {
    os << fmt(row.sweep_value) << ',' << row.trial << ',' << fmt(row.gamma) << ','
       << fmt(row.sinr[0]) << ',' << fmt(row.sinr[1]) << ',' << fmt(row.sinr[2]) << ','
       << fmt(row.sinr[3]) << ',' << fmt(row.rate_p_min) << ',' << fmt(row.rate_s1)
       << ',' << fmt(row.rate_s2) << ',' << (row.rank_one_ok ? 1 : 0) << ','
       << row.iterations << ',' << row.status << "\r\n";
}

void write_aggregate_rows(std::ostream& os, const ResultTable& table, int point) {
    const auto rows = table.point_rows(point);
    std::array<std::vector<double>, 9> columns;
    std::vector<double> iters;
    for (const auto& row : rows) {
        const RowValues v = row_values(row);
        for (int c = 0; c < 9; ++c) columns[c].push_back(v[c]);
        iters.push_back(row.iterations);
    }
    std::array<Aggregate, 9> agg;
    for (int c = 0; c < 9; ++c) agg[c] = aggregate(columns[c]);
    const Aggregate iter_agg = aggregate(iters);
    const double value = table.sweep_values[point];
    os << fmt(value) << ",mean";
    for (int c = 0; c < 8; ++c) os << ',' << fmt(agg[c].mean);
    os << ',' << fmt(agg[8].mean) << ',' << fmt(iter_agg.mean) << ",aggregate\r\n";
    os << fmt(value) << ",stderr";
    for (int c = 0; c < 8; ++c) os << ',' << fmt(agg[c].se);
    os << ',' << fmt(agg[8].se) << ',' << fmt(iter_agg.se) << ",aggregate\r\n";
}

}  // namespace

ResultTable run(const ExperimentSpec& spec) {
    spec.validate();
    ResultTable table;
    table.sweep_values = spec.sweep_values;
    const int points = static_cast<int>(spec.sweep_values.size());
    const int total = points * spec.trials;
    table.rows.resize(total);

    int n_threads = spec.threads > 0 ? spec.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, total));

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int task = next.fetch_add(1); task < total; task = next.fetch_add(1)) {
            const int point = task / spec.trials;
            const int trial = task % spec.trials;
            table.rows[task] = run_trial(spec, point, trial);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return table;
}

void write_csv(const ResultTable& table, std::ostream& os) {
    os << "sweep_value,trial,gamma,sinr_p1,sinr_p2,sinr_s1,sinr_s2,"
          "rate_p_min,rate_s1,rate_s2,rank_one_ok,iterations,status\r\n";
    const int points = static_cast<int>(table.sweep_values.size());
    for (int point = 0; point < points; ++point) {
        for (const auto& row : table.point_rows(point)) write_row(os, row);
        write_aggregate_rows(os, table, point);
    }
}

void write_json(const ResultTable& table, std::ostream& os) {
    ordered_json root;
    root["rows"] = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json r;
        r["sweep_value"] = row.sweep_value;
        r["trial"] = row.trial;
        r["gamma"] = row.gamma;
        r["sinr_p1"] = row.sinr[0];
        r["sinr_p2"] = row.sinr[1];
        r["sinr_s1"] = row.sinr[2];
        r["sinr_s2"] = row.sinr[3];
        r["rate_p_min"] = row.rate_p_min;
        r["rate_s1"] = row.rate_s1;
        r["rate_s2"] = row.rate_s2;
        r["rank_one_ok"] = row.rank_one_ok;
        r["iterations"] = row.iterations;
        r["status"] = row.status;
        root["rows"].push_back(std::move(r));
    }
    root["aggregates"] = ordered_json::array();
    const int points = static_cast<int>(table.sweep_values.size());
    for (int point = 0; point < points; ++point) {
        const auto rows = table.point_rows(point);
        std::vector<double> gammas, rates;
        double rank_fraction = 0.0;
        for (const auto& row : rows) {
            gammas.push_back(row.gamma);
            rates.push_back(row.rate_p_min);
            rank_fraction += row.rank_one_ok ? 1.0 : 0.0;
        }
        const Aggregate g = aggregate(gammas);
        const Aggregate r = aggregate(rates);
        ordered_json a;
        a["sweep_value"] = table.sweep_values[point];
        a["mean_gamma"] = g.mean;
        a["se_gamma"] = g.se;
        a["mean_rate_p_min"] = r.mean;
        a["se_rate_p_min"] = r.se;
        a["rank_one_fraction"] = rank_fraction / static_cast<double>(rows.size());
        root["aggregates"].push_back(std::move(a));
    }
    os << root.dump(2) << "\n";
}

void write_output(const ExperimentSpec& spec, const ResultTable& table) {
    std::ofstream out(spec.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + spec.out_path);
    if (spec.format == ExperimentSpec::Format::csv)
        write_csv(table, out);
    else
        write_json(table, out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + spec.out_path);
}

}  // namespace relaybf
