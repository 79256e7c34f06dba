#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "fracwave/fracwave.hpp"

namespace {

unsigned default_jobs() {
    if (const char* env = std::getenv("FRACWAVE_JOBS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring FRACWAVE_JOBS='" << env << "'\n";
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
    using namespace fracwave;
    using namespace fracwave::harness;

    CLI::App app{"Verification harness for the fractional wave equation"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string config_path, out_path, format;
    unsigned jobs = 0;
    app.add_option("--jobs,-j", jobs, "worker threads (default: FRACWAVE_JOBS or hardware)");
    for (auto kind : {ExperimentKind::lemmas, ExperimentKind::ode_regularity, ExperimentKind::pde_regularity,
                      ExperimentKind::convergence, ExperimentKind::manufactured}) {
        auto* sub = app.add_subcommand(to_string(kind), std::string("run the ") + to_string(kind) + " experiment");
        sub->add_option("--config,-c", config_path, "experiment config (.ini)")->required();
        sub->add_option("--out,-o", out_path, "output file (default: config value or stdout)");
        sub->add_option("--format,-f", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const auto requested = parse_kind(app.get_subcommands().front()->get_name());

    try {
        auto cfg = load_config(config_path);
        if (cfg.kind_set && cfg.kind != requested) {
            fail(Errc::usage_error, std::string("config declares kind '") + to_string(cfg.kind) +
                                        "' but the '" + to_string(requested) + "' subcommand was used");
        }
        cfg.kind = requested;
        if (!format.empty()) cfg.format = format;
        if (!out_path.empty()) cfg.output = out_path;

        const auto report = run_experiment(cfg, RunOptions{jobs ? jobs : default_jobs()});
        if (cfg.output.empty() || cfg.output == "-") {
            write_report(std::cout, report, cfg.format);
        } else {
            std::ofstream f(cfg.output);
            if (!f) fail(Errc::io_error, "cannot write '" + cfg.output + "'");
            write_report(f, report, cfg.format);
            if (!f) fail(Errc::io_error, "write to '" + cfg.output + "' failed");
        }
        std::size_t failed = 0;
        for (const auto& c : report) {
            if (!c.pass) {
                ++failed;
                std::cerr << "FAIL " << c.id << ": " << c.note << "\n";
            }
        }
        std::cerr << report.size() - failed << "/" << report.size() << " checks passed\n";
        return failed ? 1 : 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const bool usage = e.code() == Errc::usage_error || e.code() == Errc::io_error;
        return usage ? 2 : 1;
    }
}
