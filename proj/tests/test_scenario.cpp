#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwpt/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dwpt;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};
}  // namespace

TEST_CASE("scenario json parsing and validation") {
    SUBCASE("defaults apply") {
        const ScenarioConfig c = ScenarioConfig::from_json_text("{}");
        CHECK(c.protocol == Protocol::Revised);
        CHECK(c.pads == 4);
        CHECK(c.effective_chain_length() == 4);
        CHECK(c.pseudonyms_per_vehicle == 16);
    }
    SUBCASE("bad protocol names the field") {
        try {
            (void)ScenarioConfig::from_json_text(R"({"protocol": "bogus"})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field == "protocol");
        }
    }
    SUBCASE("chain shorter than the pad count is rejected for the chain scheme") {
        try {
            (void)ScenarioConfig::from_json_text(
                R"({"protocol": "pha", "pads": 8, "chain_length": 4})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field == "chain_length");
        }
    }
    SUBCASE("direct scheme needs one pseudonym per pad") {
        CHECK_THROWS_AS((void)ScenarioConfig::from_json_text(
                            R"({"protocol": "dma", "pads": 20, "pseudonyms_per_vehicle": 4})"),
                        ConfigError);
    }
    SUBCASE("unknown attack type is rejected") {
        CHECK_THROWS_AS(
            (void)ScenarioConfig::from_json_text(R"({"attacks": [{"type": "teleport"}]})"),
            ConfigError);
    }
    SUBCASE("invalid json is a config error") {
        CHECK_THROWS_AS((void)ScenarioConfig::from_json_text("{"), ConfigError);
    }
    SUBCASE("round trip") {
        const std::string text =
            R"({"protocol": "pha", "update_policy": "buggy", "pads": 2, "seed": 9,)"
            R"( "attacks": [{"type": "dos", "expect_success": true}]})";
        const ScenarioConfig c = ScenarioConfig::from_json_text(text);
        const ScenarioConfig back = ScenarioConfig::from_json_text(c.to_json());
        CHECK(back.to_json() == c.to_json());
    }
}

TEST_CASE("runs are deterministic: equal seeds give byte-identical files") {
    ScenarioConfig config;
    config.protocol = Protocol::Revised;
    config.pads = 3;
    config.seed = 7;
    config.attacks.push_back(AttackDescriptor{"replay", true, 5, "", "rev_m3", "xor-byte", 0, 1});

    TempDir a("dwpt_det_a");
    TempDir b("dwpt_det_b");
    (void)run_scenario(config, a.path);
    (void)run_scenario(config, b.path);

    CHECK(slurp(a.path / "transcript.jsonl") == slurp(b.path / "transcript.jsonl"));
    CHECK(slurp(a.path / "report.json") == slurp(b.path / "report.json"));

    SUBCASE("a different seed yields different wire bytes") {
        ScenarioConfig other = config;
        other.seed = 8;
        TempDir c("dwpt_det_c");
        (void)run_scenario(other, c.path);
        CHECK(slurp(a.path / "transcript.jsonl") != slurp(c.path / "transcript.jsonl"));
    }
}

TEST_CASE("run report carries verdicts, attacks, costs and bytes") {
    ScenarioConfig config;
    config.protocol = Protocol::Pha;
    config.policy = UpdatePolicy::Buggy;
    config.pads = 2;
    config.chain_length = 4;
    config.expect_sessions_accepted = false;
    config.attacks.push_back(AttackDescriptor{"dos", true, 5, "", "", "xor-byte", 0, 1});

    const RunReport report = run_scenario_in_memory(config);
    REQUIRE(report.sessions.size() == 1);
    CHECK_FALSE(report.sessions[0].verdict.accepted);
    CHECK(report.sessions[0].verdict.failed_pad == 1);
    REQUIRE(report.attacks.size() == 1);
    CHECK(report.attacks[0].succeeded);
    CHECK(report.expectations_met);

    SUBCASE("expectation mismatch is reported") {
        ScenarioConfig wrong = config;
        wrong.attacks[0].expect_success = false;
        const RunReport r2 = run_scenario_in_memory(wrong);
        CHECK_FALSE(r2.expectations_met);
    }
}

TEST_CASE("revised run expectations from the published accounting") {
    ScenarioConfig config;
    config.protocol = Protocol::Revised;
    config.pads = 8;
    config.seed = 1;

    const RunReport report = run_scenario_in_memory(config);
    CHECK(report.sessions[0].verdict.accepted);
    CHECK(report.bytes.total == 352 + 32 * 8);
    CHECK(report.auth_us.at("obu") == 1460);
    CHECK(report.auth_us.at("cspa") == 2000);
    CHECK(report.expectations_met);
}

TEST_CASE("transcript replay verification") {
    ScenarioConfig config;
    config.protocol = Protocol::Revised;
    config.pads = 2;
    config.seed = 3;

    TempDir dir("dwpt_replay");
    (void)run_scenario(config, dir.path);
    const fs::path transcript = dir.path / "transcript.jsonl";

    SUBCASE("untouched transcript verifies clean") {
        const ReplayVerdict v = replay_transcript(transcript);
        CHECK(v.clean);
    }
    SUBCASE("a single edited hex digit is flagged with its step") {
        std::string text = slurp(transcript);
        // Flip one hex digit inside some recorded field value.
        const auto pos = text.find("\"c1\":\"");
        REQUIRE(pos != std::string::npos);
        char& digit = text[pos + 6];
        digit = digit == 'a' ? 'b' : 'a';
        std::ofstream(transcript, std::ios::binary) << text;

        const ReplayVerdict v = replay_transcript(transcript);
        CHECK_FALSE(v.clean);
        CHECK(v.detail.find("diverges") != std::string::npos);
    }
    SUBCASE("empty file is a format error") {
        std::ofstream(transcript, std::ios::binary) << "";
        CHECK_THROWS_AS((void)replay_transcript(transcript), FormatError);
    }
    SUBCASE("missing file is an i/o error") {
        CHECK_THROWS_AS((void)replay_transcript(dir.path / "nope.jsonl"), std::runtime_error);
    }
    SUBCASE("garbage line is a format error with its line number") {
        std::string text = slurp(transcript);
        text += "not json\n";
        std::ofstream(transcript, std::ios::binary) << text;
        try {
            (void)replay_transcript(transcript);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.line > 1);
        }
    }
}

TEST_CASE("attack scheduling through scenario descriptors") {
    ScenarioConfig config;
    config.protocol = Protocol::Revised;
    config.pads = 1;
    config.chain_length = 2;
    config.seed = 2;
    config.pseudonyms_per_vehicle = 8;

    AttackDescriptor replay{"replay", false, 5, "", "", "xor-byte", 0, 1};
    AttackDescriptor linkability{"linkability", false, 5, "", "", "xor-byte", 0, 1};
    AttackDescriptor mitm{"mitm", false, 5, "", "rev_m3", "xor-byte", 10, 1};
    AttackDescriptor imp{"impersonation", false, 5, "reuse-spent-handle", "", "xor-byte", 0, 1};
    config.attacks = {replay, linkability, mitm, imp};

    const RunReport report = run_scenario_in_memory(config);
    REQUIRE(report.attacks.size() == 4);
    for (const auto& outcome : report.attacks) CHECK_FALSE(outcome.succeeded);
    CHECK(report.expectations_met);
}
