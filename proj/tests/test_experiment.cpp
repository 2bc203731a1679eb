#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "relaybf/experiment.hpp"

using namespace relaybf;

namespace {

ExperimentSpec tiny_spec() {
    ExperimentSpec spec;
    spec.n_relays = 3;
    spec.n_interferers = 1;
    spec.p_interferer_dbm = {-1.0};
    spec.noise_dbm = 0.0;
    spec.mu = 3.0;
    spec.relay_cap_dbm = {1.0};
    spec.sweep = ExperimentSpec::Sweep::noise_dbm;
    spec.sweep_values = {-5.0, 5.0};
    spec.trials = 2;
    spec.seed = 9;
    spec.mode = ExperimentSpec::Mode::perfect;
    return spec;
}

std::string csv_text(const ResultTable& table) {
    std::ostringstream os;
    write_csv(table, os);
    return os.str();
}

}  // namespace

TEST_CASE("dbm conversions") {
    CHECK(dbm_to_linear(0.0) == doctest::Approx(1.0));
    CHECK(dbm_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(dbm_to_linear(-20.0) == doctest::Approx(0.01));
}

TEST_CASE("spec parses from json and validates") {
    const std::string text = R"({
        "n_relays": 4,
        "n_interferers": 2,
        "p_primary_dbm": [0, 0],
        "p_secondary_dbm": [0, 0],
        "p_interferer_dbm": [-1, -1],
        "noise_dbm": -3,
        "mu": 3,
        "relay_cap_dbm": 1,
        "sweep": {"noise_dbm": [-10, 0, 10]},
        "trials": 5,
        "seed": 42,
        "mode": "perfect",
        "output": {"path": "out.csv", "format": "csv"}
    })";
    ExperimentSpec spec = ExperimentSpec::from_json_text(text);
    CHECK(spec.n_relays == 4);
    CHECK(spec.sweep_values.size() == 3);
    CHECK(spec.trials == 5);
    CHECK(spec.seed == 42);
    CHECK(spec.out_path == "out.csv");
    NetworkConfig cfg = spec.config_at(-10.0);
    CHECK(cfg.noise_var == doctest::Approx(0.1));
    CHECK(cfg.p_relay_max[3] == doctest::Approx(dbm_to_linear(1.0)));
}

TEST_CASE("spec rejects malformed configs") {
    CHECK_THROWS(ExperimentSpec::from_json_text("not json"));
    CHECK_THROWS(ExperimentSpec::from_json_text(R"({"sweep": {}})"));
    CHECK_THROWS(ExperimentSpec::from_json_text(
        R"({"sweep": {"noise_dbm": [0]}, "trials": 0})"));
    CHECK_THROWS(ExperimentSpec::from_json_text(
        R"({"sweep": {"imperfection_pct": [2]}, "mode": "perfect"})"));
    CHECK_THROWS(ExperimentSpec::from_json_text(
        R"({"sweep": {"noise_dbm": [0]}, "mode": "sideways"})"));
}

TEST_CASE("runs are deterministic and seed-isolated") {
    ExperimentSpec spec = tiny_spec();
    ResultTable first = run(spec);
    ResultTable second = run(spec);
    CHECK(csv_text(first) == csv_text(second));

    ExperimentSpec more = spec;
    more.trials = 3;
    ResultTable extended = run(more);
    for (std::size_t point = 0; point < spec.sweep_values.size(); ++point) {
        for (int t = 0; t < spec.trials; ++t) {
            const TrialRow& a = first.rows[point * spec.trials + t];
            const TrialRow& b = extended.rows[point * more.trials + t];
            CHECK(a.gamma == b.gamma);
            CHECK(a.sinr[0] == b.sinr[0]);
        }
    }

    ExperimentSpec reseeded = spec;
    reseeded.seed = 10;
    ResultTable other = run(reseeded);
    CHECK(csv_text(other) != csv_text(first));
}

TEST_CASE("csv schema is stable and aggregates recompute") {
    ExperimentSpec spec = tiny_spec();
    ResultTable table = run(spec);
    const std::string text = csv_text(table);
    std::istringstream is(text);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line.find("sweep_value,trial,gamma,") == 0);
    const auto columns = [](const std::string& s) {
        return 1 + std::count(s.begin(), s.end(), ',');
    };
    const auto expected = columns(line);
    int mean_rows = 0;
    std::vector<std::string> lines;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        CHECK(columns(line) == expected);
        lines.push_back(line);
        if (line.find(",mean,") != std::string::npos) ++mean_rows;
    }
    CHECK(mean_rows == static_cast<int>(spec.sweep_values.size()));
    CHECK(lines.size() ==
          spec.sweep_values.size() * (static_cast<std::size_t>(spec.trials) + 2));

    // the mean row reproduces the column average of the trial rows
    const auto rows0 = table.point_rows(0);
    double mean_gamma = 0.0;
    for (const auto& row : rows0) mean_gamma += row.gamma;
    mean_gamma /= static_cast<double>(rows0.size());
    const std::string& mean_line = lines[spec.trials];
    std::istringstream ms(mean_line);
    std::string field;
    std::getline(ms, field, ',');  // sweep value
    std::getline(ms, field, ',');  // "mean"
    CHECK(field == "mean");
    std::getline(ms, field, ',');
    CHECK(std::abs(std::stod(field) - mean_gamma) <= 1e-12 * std::max(1.0, mean_gamma));
}

TEST_CASE("json output parses and matches row count") {
    ExperimentSpec spec = tiny_spec();
    ResultTable table = run(spec);
    std::ostringstream os;
    write_json(table, os);
    auto parsed = nlohmann::json::parse(os.str());
    CHECK(parsed.at("rows").size() == spec.sweep_values.size() * spec.trials);
    CHECK(parsed.at("aggregates").size() == spec.sweep_values.size());
    CHECK(parsed.at("rows").at(0).contains("gamma"));
}

TEST_CASE("robust sweeps run end to end") {
    ExperimentSpec spec = tiny_spec();
    spec.mode = ExperimentSpec::Mode::robust;
    spec.sweep = ExperimentSpec::Sweep::imperfection_pct;
    spec.sweep_values = {2.0, 10.0};
    spec.trials = 1;
    ResultTable table = run(spec);
    for (const auto& row : table.rows) CHECK(row.status == "ok");
}
