// masim — role-based multi-agent network security kernel and simulator.
//
// Verbs:
//   run <scenario> --mode <permissive|enforced> [--seed N] [--trace-out P]
//       [--report-out P] [--format text|json]
//   list
//   replay <trace.ndjson>
//   validate <scenario.json>
//
// Exit codes: 0 = outcomes matched expectations (or verified), 1 = usage or
// parse/validation error, 2 = outcome mismatch or tamper detected.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "masim/builtins.hpp"
#include "masim/engine.hpp"
#include "masim/errors.hpp"
#include "masim/replay.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMismatch = 2;

std::string default_out_dir() {
    if (const char* dir = std::getenv("MASIM_OUT_DIR")) {
        return dir;
    }
    return ".";
}

masim::Scenario load_scenario(const std::string& ref) {
    if (auto bundled = masim::find_bundled(ref)) {
        return *bundled;
    }
    return masim::Scenario::from_file(ref);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        masim::fail(masim::Errc::scenario_invalid,
                    "cannot write file: " + path);
    }
    out << content;
}

int cmd_run(const std::string& scenario_ref, const std::string& mode_text,
            std::uint64_t seed, std::string trace_out, std::string report_out,
            const std::string& format) {
    auto mode = masim::parse_enforcement_mode(mode_text);
    if (!mode) {
        std::cerr << "error: --mode must be 'permissive' or 'enforced'\n";
        return kExitUsage;
    }
    masim::Scenario scenario = load_scenario(scenario_ref);
    masim::Engine engine;
    masim::RunResult result = engine.run(scenario, *mode, seed);

    const std::string stem = scenario.name + "-" + mode_text + "-seed" +
                             std::to_string(seed);
    if (trace_out.empty()) {
        trace_out = (std::filesystem::path(default_out_dir()) /
                     (stem + ".trace.ndjson"))
                        .string();
    }
    if (report_out.empty()) {
        report_out = (std::filesystem::path(default_out_dir()) /
                      (stem + ".report.json"))
                         .string();
    }
    write_file(trace_out, result.ndjson);
    write_file(report_out, result.report.to_json().dump(2) + "\n");

    if (format == "json") {
        std::cout << result.report.to_json().dump(2) << "\n";
    } else {
        std::cout << result.report.to_text();
        std::cout << "trace: " << trace_out << "\n";
        std::cout << "report: " << report_out << "\n";
    }
    if (result.report.expected_match.value_or(true)) {
        return kExitOk;
    }
    std::cerr << "outcome mismatch: observed violations/defenses differ from "
                 "the scenario's expected block for mode "
              << mode_text << "\n";
    return kExitMismatch;
}

int cmd_list() {
    for (const auto& sc : masim::bundled_scenarios()) {
        std::cout << sc.name << " — " << sc.description << "\n";
    }
    return kExitOk;
}

int cmd_replay(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open trace: " << path << "\n";
        return kExitUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    masim::ReplayResult result = masim::replay_verify(buf.str());
    std::cout << "hash: " << (result.hash_ok ? "ok" : "MISMATCH") << "\n";
    std::cout << "verdicts: " << (result.verdicts_ok ? "ok" : "MISMATCH")
              << "\n";
    return result.ok() ? kExitOk : kExitMismatch;
}

int cmd_validate(const std::string& path) {
    masim::Scenario scenario = masim::Scenario::from_file(path);
    scenario.validate();
    std::cout << "ok: " << scenario.name << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"role-based multi-agent network security kernel & simulator"};
    app.require_subcommand(1);

    std::string scenario_ref;
    std::string mode;
    std::uint64_t seed = 0;
    std::string trace_out;
    std::string report_out;
    std::string format = "text";

    CLI::App* run = app.add_subcommand("run", "run a scenario");
    run->add_option("scenario", scenario_ref,
                    "bundled scenario name or path to a scenario file")
        ->required();
    run->add_option("--mode", mode, "permissive or enforced")->required();
    run->add_option("--seed", seed, "scheduler seed (default 0)");
    run->add_option("--trace-out", trace_out, "trace output path");
    run->add_option("--report-out", report_out, "report output path");
    run->add_option("--format", format, "text or json");

    CLI::App* list = app.add_subcommand("list", "list bundled scenarios");

    std::string trace_path;
    CLI::App* replay = app.add_subcommand("replay", "re-verify a trace file");
    replay->add_option("trace", trace_path, "path to a trace file")->required();

    std::string validate_path;
    CLI::App* validate =
        app.add_subcommand("validate", "validate a scenario file");
    validate->add_option("scenario", validate_path, "path to a scenario file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(scenario_ref, mode, seed, trace_out, report_out,
                           format);
        }
        if (list->parsed()) {
            return cmd_list();
        }
        if (replay->parsed()) {
            return cmd_replay(trace_path);
        }
        if (validate->parsed()) {
            return cmd_validate(validate_path);
        }
    } catch (const masim::KernelError& e) {
        std::cerr << "error [" << masim::errc_name(e.code()) << "]: "
                  << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
