#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relaybf/experiment.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_path,
                const std::string& format, int threads, long long seed, bool has_seed) {
    relaybf::ExperimentSpec spec;
    try {
        spec = relaybf::ExperimentSpec::from_json_file(config_path);
        if (!out_path.empty()) spec.out_path = out_path;
        if (format == "csv") spec.format = relaybf::ExperimentSpec::Format::csv;
        else if (format == "json") spec.format = relaybf::ExperimentSpec::Format::json;
        else if (!format.empty()) throw std::invalid_argument("format must be csv or json");
        if (has_seed) spec.seed = static_cast<std::uint64_t>(seed);
        if (threads > 0) {
            spec.threads = threads;
        } else if (const char* env = std::getenv("RELAYBF_THREADS")) {
            spec.threads = std::atoi(env);
        }
        if (spec.out_path.empty())
            throw std::invalid_argument("no output path (use --out or output.path)");
        spec.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    relaybf::ResultTable table = relaybf::run(spec);
    try {
        relaybf::write_output(spec, table);
    } catch (const std::exception& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    }

    for (std::size_t point = 0; point < table.sweep_values.size(); ++point) {
        const auto rows = table.point_rows(static_cast<int>(point));
        double mean_gamma = 0.0;
        int infeasible = 0;
        for (const auto& row : rows) {
            mean_gamma += row.gamma;
            if (row.status != "ok") ++infeasible;
        }
        mean_gamma /= static_cast<double>(rows.size());
        std::cout << "sweep=" << table.sweep_values[point] << " mean_gamma=" << mean_gamma
                  << " trials=" << rows.size() << " not_ok=" << infeasible << "\n";
    }
    std::cout << "wrote " << spec.out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"max-min SINR relay beamforming experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a seeded Monte Carlo sweep");
    std::string config_path, out_path, format;
    int threads = 0;
    long long seed = 0;
    bool has_seed = false;
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_path, "output file path")->required();
    run->add_option("--format", format, "csv or json");
    run->add_option("--threads", threads, "worker thread count");
    auto* seed_opt = run->add_option("--seed", seed, "override the config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }
    has_seed = seed_opt->count() > 0;
    return run_command(config_path, out_path, format, threads, seed, has_seed);
}
