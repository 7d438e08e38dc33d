#pragma once

#include "dwpt/adversary.hpp"
#include "dwpt/costs.hpp"
#include "dwpt/session.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwpt {

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_path, const std::string& what)
        : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}
};

struct FormatError : std::runtime_error {
    std::size_t line;
    FormatError(std::size_t line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct AttackDescriptor {
    std::string type;  // replay | dos | linkability | mitm | impersonation
    std::optional<bool> expect_success;
    std::size_t sessions_per_vehicle = 5;            // linkability
    std::string variant = "random-handle";           // impersonation
    std::string mutation_type = "rev_m3";            // mitm
    std::string mutation_kind = "xor-byte";          // pass-through | xor-byte | swap | drop
    std::size_t mutation_offset = 0;
    std::uint8_t mutation_mask = 0x01;
};

/// Scenario file contents plus command-line overrides. The seed fully
/// determines every draw of a run.
struct ScenarioConfig {
    Protocol protocol = Protocol::Revised;
    UpdatePolicy policy = UpdatePolicy::Buggy;
    std::uint64_t pads = 4;
    std::uint64_t vehicles = 1;
    std::uint64_t pseudonyms_per_vehicle = 16;
    std::optional<std::uint64_t> chain_length;  // defaults to pads
    std::uint64_t seed = 1;
    std::vector<AttackDescriptor> attacks;
    bool verify_c2 = false;
    std::string group = "full512";  // or "toy"
    std::optional<bool> expect_sessions_accepted;

    std::uint64_t effective_chain_length() const {
        return chain_length ? *chain_length : std::max<std::uint64_t>(pads, 1);
    }
    EngineConfig engine_config() const;

    /// Parses and validates; throws ConfigError naming the offending
    /// field.
    static ScenarioConfig from_json_text(const std::string& text);
    std::string to_json() const;
    void validate() const;
};

struct SessionReport {
    std::uint64_t vehicle = 0;
    SessionVerdict verdict;
};

struct RunReport {
    ScenarioConfig config;
    std::vector<SessionReport> sessions;
    std::vector<AttackOutcome> attacks;
    RoleCounts auth_counts;
    std::map<std::string, std::uint64_t> auth_us;
    ByteAccounting bytes;
    std::string transcript_file;  // relative to the output directory
    bool expectations_met = true;

    std::string to_json() const;
};

/// Executes registration, sessions, charge phases and scheduled attacks;
/// writes transcript.jsonl and report.json under out_dir.
/// Throws std::runtime_error on I/O failure.
RunReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// In-memory variant used by tests; no files are written.
RunReport run_scenario_in_memory(const ScenarioConfig& config, Transcript* transcript_out = nullptr);

struct ReplayVerdict {
    bool clean = true;
    std::uint64_t divergence_step = 0;
    std::string detail;
};

/// Re-runs the recorded scenario from its header and compares every
/// recorded event against the fresh run. Throws FormatError with the
/// failing line number on parse problems, std::runtime_error on I/O.
ReplayVerdict replay_transcript(const std::filesystem::path& transcript_path);

}  // namespace dwpt
