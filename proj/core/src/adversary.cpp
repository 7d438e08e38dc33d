#include "dwpt/adversary.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace dwpt {

using nlohmann::json;

void ChannelTap::arm(const MutationRule& rule) {
    rule_ = rule;
    matches_seen_ = 0;
    log_.push_back("arm-mutation");
}

std::optional<Bytes> ChannelTap::process(std::uint64_t step, const std::string& from,
                                         const std::string& to, const Bytes& wire) {
    std::string type = "malformed";
    if (auto decoded = decode_message(ByteView{wire})) type = message_type_name(*decoded);
    recorded_.push_back(Record{step, from, to, type, wire});
    log_.push_back("record");

    if (!rule_ || rule_->kind == MutationRule::Kind::PassThrough) return wire;
    if (!rule_->message_type.empty() && rule_->message_type != type) return wire;
    if (matches_seen_++ != rule_->occurrence) return wire;

    Bytes out = wire;
    switch (rule_->kind) {
        case MutationRule::Kind::XorByte: {
            const std::size_t pos = 1 + rule_->offset;  // skip framing tag
            if (pos < out.size()) out[pos] ^= rule_->mask;
            log_.push_back("mutate");
            break;
        }
        case MutationRule::Kind::SwapRanges: {
            const std::size_t a = 1 + rule_->a_off;
            const std::size_t b = 1 + rule_->b_off;
            if (a + rule_->a_len <= out.size() && b + rule_->b_len <= out.size()) {
                Bytes first(out.begin() + a, out.begin() + a + rule_->a_len);
                Bytes second(out.begin() + b, out.begin() + b + rule_->b_len);
                Bytes rebuilt(out.begin(), out.begin() + a);
                rebuilt.insert(rebuilt.end(), second.begin(), second.end());
                rebuilt.insert(rebuilt.end(), first.begin(), first.end());
                rebuilt.insert(rebuilt.end(), out.begin() + b + rule_->b_len, out.end());
                out = std::move(rebuilt);
            }
            log_.push_back("mutate");
            break;
        }
        case MutationRule::Kind::Drop:
            log_.push_back("drop");
            return std::nullopt;
        case MutationRule::Kind::PassThrough: break;
    }
    return out;
}

std::vector<ChannelTap::Record> ChannelTap::recorded_of_type(const std::string& type) const {
    std::vector<Record> out;
    for (const auto& r : recorded_)
        if (r.type == type) out.push_back(r);
    return out;
}

std::string AttackOutcome::to_json() const {
    json j;
    j["name"] = name;
    j["succeeded"] = succeeded;
    j["detector"] = detector;
    j["evidence"] = evidence;
    j["tap_log"] = tap_log;
    return j.dump();
}

namespace {

/// Extracts the named digest field from a recorded frame.
std::optional<Bytes> frame_field(const ChannelTap::Record& rec, const std::string& field) {
    const auto decoded = decode_message(ByteView{rec.wire});
    if (!decoded) return std::nullopt;
    for (const auto& [name, value] : message_fields(*decoded)) {
        if (name == field) return value;
    }
    return std::nullopt;
}

Digest32 digest_from_bytes(const Bytes& b) {
    Digest32 d;
    std::copy(b.begin(), b.end(), d.bytes.begin());
    return d;
}

}  // namespace

AttackOutcome replay_attack(const EngineConfig& config) {
    AttackOutcome outcome;
    outcome.name = "replay";

    // One observed pad is enough to capture a replayable credential; under
    // the broken policy a longer honest session would be denied on its own.
    EngineConfig observe = config;
    observe.pads = 1;

    ChannelTap tap;
    Transcript transcript;
    SessionEngine engine(observe, nullptr, &transcript, &tap);

    if (config.protocol == Protocol::Pha) {
        const SessionVerdict honest = engine.run_session(0);
        const auto values = tap.recorded_of_type("chain_value");
        // First pad reveal on the wireless hop (obu -> cp); the head
        // registration travels obu -> cspa and is not an authentication.
        const auto it = std::find_if(values.begin(), values.end(), [](const auto& r) {
            return r.from == "obu" && r.to == "cp";
        });
        if (!honest.accepted || it == values.end()) {
            outcome.detector = "honest-session";
            outcome.evidence = "honest run did not produce a replayable value";
            outcome.tap_log = tap.log();
            return outcome;
        }
        tap.note_verb("replay");
        const auto result = engine.adversary_submit_chain(ByteView{it->wire});
        outcome.succeeded = result.accepted;
        outcome.detector = result.accepted ? "chain-expectation accepted replay" : result.detail;
        outcome.evidence = "replayed first chain value: " + result.detail;
    } else if (config.protocol == Protocol::Revised) {
        const SessionVerdict honest = engine.run_session(0);
        const auto frames = tap.recorded_of_type("rev_m3");
        if (!honest.accepted || frames.empty()) {
            outcome.detector = "honest-session";
            outcome.evidence = "honest run did not produce a replayable request";
            outcome.tap_log = tap.log();
            return outcome;
        }
        tap.note_verb("replay");
        const auto result = engine.adversary_submit_rev_m3(ByteView{frames.front().wire});
        outcome.succeeded = result.accepted;
        outcome.detector = result.accepted ? "backend accepted replay" : result.detail;
        outcome.evidence = "replayed authentication request: " + result.detail;
    } else {
        throw std::invalid_argument("replay attack is defined for the chain-based schemes");
    }
    outcome.tap_log = tap.log();
    return outcome;
}

AttackOutcome dos_via_buggy_update(const EngineConfig& config) {
    AttackOutcome outcome;
    outcome.name = "dos";

    EngineConfig cfg = config;
    cfg.protocol = Protocol::Pha;
    if (cfg.pads < 2) {
        outcome.succeeded = false;
        outcome.detector = "not-applicable";
        outcome.evidence = "fewer than two pads: no second authentication to deny";
        return outcome;
    }

    SessionEngine engine(cfg, nullptr, nullptr, nullptr);
    const SessionVerdict verdict = engine.run_session(0);
    outcome.succeeded = !verdict.accepted && verdict.failed_pad == 1;
    if (outcome.succeeded) {
        outcome.detector = "second pad rejected honest vehicle (" + verdict.failure + ")";
        outcome.evidence = "honest chain value refused at pad index 1: " + verdict.detail;
    } else {
        outcome.detector = verdict.accepted ? "all pads accepted" : verdict.failure;
        outcome.evidence = verdict.accepted
                               ? "expectation advanced correctly at every pad"
                               : "failure outside the denial pattern: " + verdict.detail;
    }
    return outcome;
}

AttackOutcome linkability_attack(const EngineConfig& config, std::size_t sessions_per_vehicle) {
    if (sessions_per_vehicle < 2)
        throw std::invalid_argument("linkability needs at least two sessions per vehicle");
    const std::size_t k = sessions_per_vehicle;

    AttackOutcome outcome;
    outcome.name = "linkability";

    EngineConfig cfg = config;
    cfg.vehicles = 1 + k;  // vehicle 0 is the target, the rest are decoys
    cfg.pads = 1;
    cfg.pseudonyms_per_vehicle = std::max<std::uint64_t>(cfg.pseudonyms_per_vehicle, k + 1);
    cfg.chain_length = std::max<std::uint64_t>(cfg.chain_length, 2);

    ChannelTap tap;
    SessionEngine engine(cfg, nullptr, nullptr, &tap);

    // Observed sessions, segmented by capture time.
    struct Observed {
        bool target;
        std::set<std::string> values;  // hex of every 32/64-byte field
    };
    std::vector<Observed> sessions;

    static const std::set<std::string> kAuthTypes = {"m3", "m4", "rev_m3", "rev_m4",
                                                     "chain_value"};
    auto observe_session = [&](std::size_t vehicle, bool target) {
        const std::size_t before = tap.recorded().size();
        engine.run_session(vehicle);
        Observed obs;
        obs.target = target;
        for (std::size_t i = before; i < tap.recorded().size(); ++i) {
            const auto& rec = tap.recorded()[i];
            if (kAuthTypes.count(rec.type) == 0) continue;
            const auto decoded = decode_message(ByteView{rec.wire});
            if (!decoded) continue;
            for (const auto& [name, value] : message_fields(*decoded))
                obs.values.insert(to_hex(ByteView{value}));
        }
        sessions.push_back(std::move(obs));
    };

    for (std::size_t s = 0; s < k; ++s) observe_session(0, true);
    for (std::size_t d = 1; d <= k; ++d) observe_session(d, false);

    // Cluster sessions sharing any exact wire value.
    const std::size_t n = sessions.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };

    std::map<std::string, std::size_t> first_seen;
    std::size_t cross_matches = 0;
    std::string witness;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& v : sessions[i].values) {
            const auto [it, fresh] = first_seen.emplace(v, i);
            if (!fresh && find(it->second) != find(i)) {
                parent[find(i)] = find(it->second);
                ++cross_matches;
                if (witness.empty()) witness = v;
            }
        }
    }

    const std::size_t target_root = find(0);
    bool target_clustered = true;
    for (std::size_t i = 0; i < k; ++i) target_clustered = target_clustered && find(i) == target_root;
    bool decoys_separate = true;
    for (std::size_t i = k; i < n; ++i) {
        if (find(i) == target_root) decoys_separate = false;
        for (std::size_t j = i + 1; j < n; ++j)
            if (find(i) == find(j)) decoys_separate = false;
    }

    outcome.succeeded = target_clustered && decoys_separate;
    outcome.detector = "exact-match linker";
    if (outcome.succeeded) {
        outcome.evidence = "target sessions share constant wire value " + witness.substr(0, 16) +
                           "... across " + std::to_string(k) + " sessions";
    } else {
        outcome.evidence = cross_matches == 0
                               ? "zero cross-session wire-value collisions"
                               : "collisions present but clustering below the success bar";
    }
    outcome.tap_log = tap.log();
    return outcome;
}

AttackOutcome mitm_forge(const EngineConfig& config, const MutationRule& rule) {
    AttackOutcome outcome;
    outcome.name = "mitm";

    ChannelTap tap;
    tap.arm(rule);
    SessionEngine engine(config, nullptr, nullptr, &tap);
    const SessionVerdict verdict = engine.run_session(0);

    // Key knowledge is exact-match over the recorded wireless bytes: the
    // tap composes and replays but cannot invert the masking hashes.
    bool key_leaked = false;
    if (verdict.accepted && config.pads > 0) {
        const auto& pads = engine.pads();
        if (!pads.empty() && !pads[0]->stored_keys().empty()) {
            const Digest32 key = pads[0]->stored_keys().back().first;
            const std::string key_hex = to_hex(key);
            for (const auto& rec : tap.recorded()) {
                if (to_hex(ByteView{rec.wire}).find(key_hex) != std::string::npos)
                    key_leaked = true;
            }
        }
    }

    outcome.succeeded = verdict.accepted && key_leaked;
    if (verdict.accepted) {
        outcome.detector = key_leaked ? "session key observed on wireless" : "key-knowledge check";
        outcome.evidence = key_leaked
                               ? "session key bytes appeared in recorded traffic"
                               : "endpoints accepted; forwarder learned no session key";
    } else {
        outcome.detector = verdict.failure;
        outcome.evidence = "endpoint rejected mutated handshake: " + verdict.detail;
    }
    outcome.tap_log = tap.log();
    return outcome;
}

std::string impersonation_variant_name(ImpersonationVariant v) {
    switch (v) {
        case ImpersonationVariant::RandomHandle: return "random-handle";
        case ImpersonationVariant::ReuseSpentHandle: return "reuse-spent-handle";
        case ImpersonationVariant::ReplayChainHead: return "replay-chain-head";
    }
    return "?";
}

AttackOutcome impersonation_attack(const EngineConfig& config, ImpersonationVariant variant) {
    AttackOutcome outcome;
    outcome.name = "impersonation-" + impersonation_variant_name(variant);

    EngineConfig cfg = config;
    cfg.protocol = Protocol::Revised;

    ChannelTap tap;
    SessionEngine engine(cfg, nullptr, nullptr, &tap);
    const SessionVerdict honest = engine.run_session(0);
    if (!honest.accepted) {
        outcome.detector = "honest-session";
        outcome.evidence = "observation run failed: " + honest.detail;
        outcome.tap_log = tap.log();
        return outcome;
    }

    const auto m2s = tap.recorded_of_type("m2");
    const auto m3s = tap.recorded_of_type("rev_m3");
    if (m2s.empty() || m3s.empty()) {
        outcome.detector = "observation";
        outcome.evidence = "required frames not captured";
        outcome.tap_log = tap.log();
        return outcome;
    }

    const Digest32 h2_obs = digest_from_bytes(*frame_field(m2s.front(), "h2"));
    const Digest32 h3_obs = digest_from_bytes(*frame_field(m2s.front(), "h3"));
    const Digest32 c1_obs = digest_from_bytes(*frame_field(m3s.front(), "c1"));
    const Digest32 c5p_obs = digest_from_bytes(*frame_field(m3s.front(), "c5p"));

    DeterministicRng arng = DeterministicRng(cfg.seed).fork("adversary");
    tap.note_verb("compose");

    RevM3 forged;
    forged.h3 = h3_obs;
    switch (variant) {
        case ImpersonationVariant::RandomHandle: {
            const Digest32 guess = arng.next_digest();
            const Digest32 r = arng.next_digest();
            const Digest32 n = arng.next_digest();
            forged.c1 = xor32(hash(HashDomain::H, h2_obs), guess);
            const Digest32 h_ps = hash(HashDomain::H, guess);
            forged.c3p = hash(HashDomain::H, ByteView{cat(h_ps.view(), h3_obs.view())});
            forged.c4p = xor32(r, guess);
            forged.c5p = build_chain_anchor(PseudonymHandle{guess}, n, 4);
            break;
        }
        case ImpersonationVariant::ReuseSpentHandle: {
            // Unmask the real (already spent) handle from observed values.
            const Digest32 ps = xor32(c1_obs, hash(HashDomain::H, h2_obs));
            const Digest32 r = arng.next_digest();
            const Digest32 n = arng.next_digest();
            forged.c1 = c1_obs;
            const Digest32 h_ps = hash(HashDomain::H, ps);
            forged.c3p = hash(HashDomain::H, ByteView{cat(h_ps.view(), h3_obs.view())});
            forged.c4p = xor32(r, ps);
            forged.c5p = build_chain_anchor(PseudonymHandle{ps}, n, 4);
            break;
        }
        case ImpersonationVariant::ReplayChainHead: {
            forged.c1 = arng.next_digest();
            forged.c3p = arng.next_digest();
            forged.c4p = arng.next_digest();
            forged.c5p = c5p_obs;
            break;
        }
    }

    tap.note_verb("inject");
    const auto result = engine.adversary_submit_rev_m3(ByteView{encode_message(ProtocolMessage{forged})});
    outcome.succeeded = result.accepted;
    outcome.detector = result.accepted ? "backend accepted forgery" : result.detail;
    outcome.evidence = "forged authentication request: " + result.detail;
    outcome.tap_log = tap.log();
    return outcome;
}

}  // namespace dwpt
