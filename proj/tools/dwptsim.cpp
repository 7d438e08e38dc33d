// Scenario runner for the charging-lane authentication simulator: executes
// deterministic protocol runs and scripted attacks, and emits transcripts,
// attack outcomes and cost reports.

#include "dwpt/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitExpectation = 3;
constexpr int kExitIo = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            const std::optional<std::uint64_t>& seed, const std::string& protocol,
            const std::string& policy, const std::optional<std::uint64_t>& pads,
            bool print_table) {
    dwpt::ScenarioConfig config;
    try {
        if (!scenario_path.empty()) {
            config = dwpt::ScenarioConfig::from_json_text(read_file(scenario_path));
        }
        // Command-line flags override file values.
        if (seed) config.seed = *seed;
        if (pads) config.pads = *pads;
        if (!protocol.empty()) {
            dwpt::ScenarioConfig tmp = dwpt::ScenarioConfig::from_json_text(
                "{\"protocol\":\"" + protocol + "\"}");
            config.protocol = tmp.protocol;
        }
        if (!policy.empty()) {
            dwpt::ScenarioConfig tmp = dwpt::ScenarioConfig::from_json_text(
                "{\"update_policy\":\"" + policy + "\"}");
            config.policy = tmp.policy;
        }
        config.validate();
    } catch (const dwpt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    dwpt::RunReport report;
    try {
        report = dwpt::run_scenario(config, out_dir);
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    std::cout << "protocol: " << dwpt::protocol_name(config.protocol) << ", seed " << config.seed
              << ", pads " << config.pads << "\n";
    for (const auto& s : report.sessions) {
        std::cout << "  session vehicle " << s.vehicle << ": "
                  << (s.verdict.accepted ? "accepted" : "rejected (" + s.verdict.failure + ")");
        if (s.verdict.keys_defined)
            std::cout << (s.verdict.keys_match ? ", keys match" : ", KEY MISMATCH");
        std::cout << "\n";
    }
    for (const auto& a : report.attacks) {
        std::cout << "  attack " << a.name << ": "
                  << (a.succeeded ? "succeeded" : "did not succeed") << " [" << a.detector
                  << "]\n";
    }
    std::cout << "  wire bytes (accounted): " << report.bytes.total << "\n";
    std::cout << "  report: " << (std::filesystem::path(out_dir) / "report.json").string()
              << "\n";

    if (print_table) {
        const auto reports =
            dwpt::compare_schemes(dwpt::TimingTable::reference(), std::max<std::uint64_t>(config.pads, 1));
        std::cout << "\n" << dwpt::render_comparison(reports);
    }

    if (!report.expectations_met) {
        std::cerr << "expectation mismatch: see report\n";
        return kExitExpectation;
    }
    return kExitOk;
}

int cmd_replay(const std::string& transcript_path) {
    try {
        const dwpt::ReplayVerdict verdict = dwpt::replay_transcript(transcript_path);
        if (verdict.clean) {
            std::cout << "transcript verifies: clean\n";
            return kExitOk;
        }
        std::cout << "divergence at step " << verdict.divergence_step << ": " << verdict.detail
                  << "\n";
        return kExitExpectation;
    } catch (const dwpt::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dwpt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_table(std::uint64_t pads) {
    const auto reports = dwpt::compare_schemes(dwpt::TimingTable::reference(), pads);
    std::cout << dwpt::render_comparison(reports);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic simulator for in-motion EV charging authentication"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> pads;
    std::string protocol;
    std::string policy;
    bool print_table = false;

    auto* run = app.add_subcommand("run", "Run a scenario");
    run->add_option("--scenario", scenario_path, "Scenario JSON file (defaults apply if omitted)");
    run->add_option("--out", out_dir, "Output directory for transcript and report");
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--pads", pads, "Override the pad count");
    run->add_option("--protocol", protocol, "Override the protocol: dma|pha|revised");
    run->add_option("--policy", policy, "Override the update policy: buggy|fixed");
    run->add_flag("--table", print_table, "Print the scheme comparison tables");

    std::string transcript_path;
    auto* replay = app.add_subcommand("replay", "Re-verify a recorded transcript");
    replay->add_option("transcript", transcript_path, "Path to transcript.jsonl")->required();

    std::uint64_t table_pads = 8;
    auto* table = app.add_subcommand("table", "Print the scheme comparison tables");
    table->add_option("--pads", table_pads, "Pad count for the totals");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(scenario_path, out_dir, seed, protocol, policy, pads, print_table);
    if (replay->parsed()) return cmd_replay(transcript_path);
    return cmd_table(table_pads);
}
