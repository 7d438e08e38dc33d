#include "dwpt/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dwpt {

using nlohmann::json;

namespace {

Protocol protocol_from_string(const std::string& s) {
    if (s == "dma") return Protocol::Dma;
    if (s == "pha") return Protocol::Pha;
    if (s == "revised") return Protocol::Revised;
    throw ConfigError("protocol", "expected one of dma|pha|revised, got '" + s + "'");
}

UpdatePolicy policy_from_string(const std::string& s) {
    if (s == "buggy") return UpdatePolicy::Buggy;
    if (s == "fixed") return UpdatePolicy::Fixed;
    throw ConfigError("update_policy", "expected buggy|fixed, got '" + s + "'");
}

MutationRule rule_from_descriptor(const AttackDescriptor& d) {
    MutationRule rule;
    rule.message_type = d.mutation_type;
    rule.offset = d.mutation_offset;
    rule.mask = d.mutation_mask;
    if (d.mutation_kind == "pass-through") rule.kind = MutationRule::Kind::PassThrough;
    else if (d.mutation_kind == "xor-byte") rule.kind = MutationRule::Kind::XorByte;
    else if (d.mutation_kind == "swap") {
        rule.kind = MutationRule::Kind::SwapRanges;
        rule.a_off = 0;
        rule.a_len = 32;
        rule.b_off = 32;
        rule.b_len = 64;
    } else if (d.mutation_kind == "drop") rule.kind = MutationRule::Kind::Drop;
    else throw ConfigError("attacks.mutation_kind", "unknown kind '" + d.mutation_kind + "'");
    return rule;
}

}  // namespace

EngineConfig ScenarioConfig::engine_config() const {
    EngineConfig e;
    e.protocol = protocol;
    e.policy = policy;
    e.pads = pads;
    e.vehicles = vehicles;
    e.pseudonyms_per_vehicle = pseudonyms_per_vehicle;
    e.chain_length = effective_chain_length();
    e.seed = seed;
    e.verify_c2 = verify_c2;
    e.group = group == "toy" ? &GroupParams::toy() : &GroupParams::full512();
    return e;
}

void ScenarioConfig::validate() const {
    if (vehicles == 0) throw ConfigError("vehicles", "must be >= 1");
    if (group != "toy" && group != "full512")
        throw ConfigError("group", "expected toy|full512, got '" + group + "'");
    if (protocol == Protocol::Pha && pads > 0 && effective_chain_length() < pads)
        throw ConfigError("chain_length", "must cover the requested pads");
    if (protocol == Protocol::Dma && pads > pseudonyms_per_vehicle)
        throw ConfigError("pseudonyms_per_vehicle",
                          "direct scheme consumes one pseudonym per pad");
    for (const auto& a : attacks) {
        if (a.type != "replay" && a.type != "dos" && a.type != "linkability" &&
            a.type != "mitm" && a.type != "impersonation")
            throw ConfigError("attacks.type", "unknown attack '" + a.type + "'");
        if (a.type == "linkability" && a.sessions_per_vehicle < 2)
            throw ConfigError("attacks.sessions_per_vehicle", "linkability needs >= 2");
        if (a.type == "replay" && protocol == Protocol::Dma)
            throw ConfigError("attacks.type", "replay is defined for the chain-based schemes");
    }
}

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }

    ScenarioConfig c;
    try {
        if (j.contains("protocol")) c.protocol = protocol_from_string(j["protocol"]);
        if (j.contains("update_policy")) c.policy = policy_from_string(j["update_policy"]);
        if (j.contains("pads")) c.pads = j["pads"].get<std::uint64_t>();
        if (j.contains("vehicles")) c.vehicles = j["vehicles"].get<std::uint64_t>();
        if (j.contains("pseudonyms_per_vehicle"))
            c.pseudonyms_per_vehicle = j["pseudonyms_per_vehicle"].get<std::uint64_t>();
        if (j.contains("chain_length")) c.chain_length = j["chain_length"].get<std::uint64_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("verify_c2")) c.verify_c2 = j["verify_c2"].get<bool>();
        if (j.contains("group")) c.group = j["group"].get<std::string>();
        if (j.contains("expect_sessions_accepted"))
            c.expect_sessions_accepted = j["expect_sessions_accepted"].get<bool>();
        if (j.contains("attacks")) {
            for (const auto& aj : j["attacks"]) {
                AttackDescriptor d;
                d.type = aj.at("type").get<std::string>();
                if (aj.contains("expect_success"))
                    d.expect_success = aj["expect_success"].get<bool>();
                if (aj.contains("sessions_per_vehicle"))
                    d.sessions_per_vehicle = aj["sessions_per_vehicle"].get<std::size_t>();
                if (aj.contains("variant")) d.variant = aj["variant"].get<std::string>();
                if (aj.contains("mutation_type"))
                    d.mutation_type = aj["mutation_type"].get<std::string>();
                if (aj.contains("mutation_kind"))
                    d.mutation_kind = aj["mutation_kind"].get<std::string>();
                if (aj.contains("mutation_offset"))
                    d.mutation_offset = aj["mutation_offset"].get<std::size_t>();
                if (aj.contains("mutation_mask"))
                    d.mutation_mask = static_cast<std::uint8_t>(aj["mutation_mask"].get<unsigned>());
                c.attacks.push_back(std::move(d));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("<field>", std::string("type error: ") + e.what());
    }
    c.validate();
    return c;
}

std::string ScenarioConfig::to_json() const {
    json j;
    j["protocol"] = protocol_name(protocol);
    j["update_policy"] = policy == UpdatePolicy::Buggy ? "buggy" : "fixed";
    j["pads"] = pads;
    j["vehicles"] = vehicles;
    j["pseudonyms_per_vehicle"] = pseudonyms_per_vehicle;
    j["chain_length"] = effective_chain_length();
    j["seed"] = seed;
    j["verify_c2"] = verify_c2;
    j["group"] = group;
    if (expect_sessions_accepted) j["expect_sessions_accepted"] = *expect_sessions_accepted;
    j["attacks"] = json::array();
    for (const auto& a : attacks) {
        json aj;
        aj["type"] = a.type;
        if (a.expect_success) aj["expect_success"] = *a.expect_success;
        if (a.type == "linkability") aj["sessions_per_vehicle"] = a.sessions_per_vehicle;
        if (a.type == "impersonation") aj["variant"] = a.variant;
        if (a.type == "mitm") {
            aj["mutation_type"] = a.mutation_type;
            aj["mutation_kind"] = a.mutation_kind;
            aj["mutation_offset"] = a.mutation_offset;
            aj["mutation_mask"] = a.mutation_mask;
        }
        j["attacks"].push_back(aj);
    }
    return j.dump();
}

namespace {

AttackOutcome run_attack(const ScenarioConfig& config, const AttackDescriptor& d) {
    const EngineConfig ecfg = config.engine_config();
    if (d.type == "replay") return replay_attack(ecfg);
    if (d.type == "dos") return dos_via_buggy_update(ecfg);
    if (d.type == "linkability") return linkability_attack(ecfg, d.sessions_per_vehicle);
    if (d.type == "mitm") return mitm_forge(ecfg, rule_from_descriptor(d));
    ImpersonationVariant v = ImpersonationVariant::RandomHandle;
    if (d.variant == "reuse-spent-handle") v = ImpersonationVariant::ReuseSpentHandle;
    else if (d.variant == "replay-chain-head") v = ImpersonationVariant::ReplayChainHead;
    return impersonation_attack(ecfg, v);
}

}  // namespace

std::string RunReport::to_json() const {
    json j;
    j["config"] = json::parse(config.to_json());

    j["sessions"] = json::array();
    for (const auto& s : sessions) {
        json sj;
        sj["vehicle"] = s.vehicle;
        sj["accepted"] = s.verdict.accepted;
        if (!s.verdict.accepted) {
            sj["failure"] = s.verdict.failure;
            sj["detail"] = s.verdict.detail;
            sj["failed_pad"] = s.verdict.failed_pad;
        }
        sj["keys_defined"] = s.verdict.keys_defined;
        if (s.verdict.keys_defined) sj["keys_match"] = s.verdict.keys_match;
        j["sessions"].push_back(sj);
    }

    j["attacks"] = json::array();
    for (const auto& a : attacks) j["attacks"].push_back(json::parse(a.to_json()));

    json counts = json::object();
    for (const auto& [role, c] : auth_counts) {
        json cj = json::object();
        for (std::size_t i = 0; i < kPrimitiveCount; ++i) {
            const auto p = static_cast<Primitive>(i);
            if (c[p] != 0) cj[primitive_name(p)] = c[p];
        }
        counts[role] = cj;
    }
    j["auth_counts"] = counts;

    json us = json::object();
    for (const auto& [role, v] : auth_us) {
        us[role] = json{{"us", v}, {"ms", format_ms(v)}};
    }
    j["auth_cost"] = us;

    json bytes_j;
    bytes_j["total"] = bytes.total;
    for (const auto& [phase, b] : bytes.per_phase) bytes_j[phase] = b;
    j["bytes"] = bytes_j;

    j["transcript"] = transcript_file;
    j["expectations_met"] = expectations_met;
    return j.dump(2) + "\n";
}

RunReport run_scenario_in_memory(const ScenarioConfig& config, Transcript* transcript_out) {
    config.validate();

    RunReport report;
    report.config = config;

    Meter meter;
    Transcript local;
    Transcript* transcript = transcript_out != nullptr ? transcript_out : &local;
    SessionEngine engine(config.engine_config(), &meter, transcript, nullptr);

    for (std::uint64_t v = 0; v < config.vehicles; ++v) {
        SessionReport sr;
        sr.vehicle = v;
        sr.verdict = engine.run_session(v);
        report.sessions.push_back(std::move(sr));
    }

    for (const auto& d : config.attacks) report.attacks.push_back(run_attack(config, d));

    if (transcript->instrumented()) {
        report.auth_counts = count_from_transcript(*transcript);
        report.auth_us = apply_timing(report.auth_counts, TimingTable::reference());
    }
    report.bytes = byte_accounting(*transcript);
    report.transcript_file = "transcript.jsonl";

    bool ok = true;
    if (config.expect_sessions_accepted) {
        for (const auto& s : report.sessions)
            if (s.verdict.accepted != *config.expect_sessions_accepted) ok = false;
    } else {
        // Without an explicit expectation, honest sessions are expected to
        // succeed.
        for (const auto& s : report.sessions)
            if (!s.verdict.accepted) ok = false;
    }
    for (std::size_t i = 0; i < config.attacks.size(); ++i) {
        const auto& expect = config.attacks[i].expect_success;
        if (expect && report.attacks[i].succeeded != *expect) ok = false;
    }
    report.expectations_met = ok;
    return report;
}

RunReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + out_dir.string());

    Transcript transcript;
    RunReport report = run_scenario_in_memory(config, &transcript);

    const auto transcript_path = out_dir / "transcript.jsonl";
    {
        std::ofstream out(transcript_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + transcript_path.string());
        json header;
        header["type"] = "header";
        header["config"] = json::parse(config.to_json());
        out << header.dump() << '\n' << transcript.to_jsonl();
    }

    const auto report_path = out_dir / "report.json";
    {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + report_path.string());
        out << report.to_json();
    }
    return report;
}

ReplayVerdict replay_transcript(const std::filesystem::path& transcript_path) {
    std::ifstream in(transcript_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + transcript_path.string());

    std::string header_line;
    if (!std::getline(in, header_line) || header_line.empty())
        throw FormatError(1, "missing header line");

    ScenarioConfig config;
    try {
        const json header = json::parse(header_line);
        if (header.at("type").get<std::string>() != "header")
            throw FormatError(1, "first line is not a header");
        config = ScenarioConfig::from_json_text(header.at("config").dump());
    } catch (const json::exception& e) {
        throw FormatError(1, std::string("bad header: ") + e.what());
    }

    // Fresh verifier state: the same seed regenerates every secret, so
    // every recorded message can be checked against an honest recompute.
    Transcript fresh;
    run_scenario_in_memory(config, &fresh);

    ReplayVerdict verdict;
    std::size_t line_no = 1;
    std::size_t index = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        TranscriptEvent recorded;
        try {
            recorded = TranscriptEvent::from_json_line(line);
        } catch (const std::exception& e) {
            throw FormatError(line_no, std::string("unparseable event: ") + e.what());
        }
        if (index >= fresh.events().size()) {
            return {false, recorded.step, "recorded run is longer than the fresh run"};
        }
        const std::string expect = fresh.events()[index].to_json_line();
        if (expect != recorded.to_json_line()) {
            return {false, recorded.step,
                    "step " + std::to_string(recorded.step) + " diverges from honest recompute"};
        }
        ++index;
    }
    if (index != fresh.events().size())
        return {false, index, "recorded run is shorter than the fresh run"};
    return verdict;
}

}  // namespace dwpt
