#pragma once

#include "dwpt/session.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dwpt {

/// Byte-level rewrite applied to matching wireless messages in flight.
struct MutationRule {
    enum class Kind { PassThrough, XorByte, SwapRanges, Drop };

    Kind kind = Kind::PassThrough;
    std::string message_type;    // message type name to match, empty = any
    std::size_t occurrence = 0;  // which matching message, 0 = first
    std::size_t offset = 0;      // body offset for XorByte
    std::uint8_t mask = 0x01;
    std::size_t a_off = 0, a_len = 0, b_off = 0, b_len = 0;  // SwapRanges
};

/// Dolev-Yao channel instrumentation: stores, replays, mutates, and drops
/// wireless frames. It never opens a message beyond its framing byte; the
/// verb log is the attack's capability trace.
class ChannelTap {
public:
    struct Record {
        std::uint64_t step;
        std::string from;
        std::string to;
        std::string type;
        Bytes wire;
    };

    void arm(const MutationRule& rule);
    void disarm() { rule_.reset(); }

    /// Engine hook for each wireless frame; returns the bytes to deliver,
    /// or nullopt when the frame is dropped.
    std::optional<Bytes> process(std::uint64_t step, const std::string& from,
                                 const std::string& to, const Bytes& wire);

    const std::vector<Record>& recorded() const { return recorded_; }
    const std::vector<std::string>& log() const { return log_; }
    void note_verb(const std::string& verb) { log_.push_back(verb); }

    /// Recorded frames of one message type, in capture order.
    std::vector<Record> recorded_of_type(const std::string& type) const;

private:
    std::optional<MutationRule> rule_;
    std::size_t matches_seen_ = 0;
    std::vector<Record> recorded_;
    std::vector<std::string> log_;
};

/// Attack verdict derived from the victim entities' accept/reject
/// decisions alone.
struct AttackOutcome {
    std::string name;
    bool succeeded = false;
    std::string detector;  // which check decided the outcome
    std::string evidence;
    std::vector<std::string> tap_log;

    std::string to_json() const;
};

/// Replays a captured credential as a second principal: the first chain
/// value for the hash-chain scheme, the full authentication request for
/// the revised one. Throws std::invalid_argument for the direct scheme.
AttackOutcome replay_attack(const EngineConfig& config);

/// Honest vehicle, broken update policy: succeeds when the second pad
/// rejects a correctly behaving vehicle.
AttackOutcome dos_via_buggy_update(const EngineConfig& config);

/// Exact-match linker over the authentication and chain wire values of
/// k sessions of one target vehicle mixed with k single-session decoys.
/// Succeeds when the target's sessions form one cluster while decoys stay
/// separate. Throws std::invalid_argument for k < 2.
AttackOutcome linkability_attack(const EngineConfig& config, std::size_t sessions_per_vehicle);

/// Applies a mutation mid-handshake. Succeeds only if both endpoints
/// accept and the session key leaks to the tap (exact-match knowledge
/// over recorded wireless bytes).
AttackOutcome mitm_forge(const EngineConfig& config, const MutationRule& rule);

enum class ImpersonationVariant { RandomHandle, ReuseSpentHandle, ReplayChainHead };
std::string impersonation_variant_name(ImpersonationVariant v);

/// Fresh authentication attempt without vehicle secrets, from public
/// parameters and recorded traffic only.
AttackOutcome impersonation_attack(const EngineConfig& config, ImpersonationVariant variant);

}  // namespace dwpt
