#pragma once

#include "dwpt/identity.hpp"
#include "dwpt/protocol.hpp"
#include "dwpt/transcript.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dwpt {

class ChannelTap;

enum class Protocol { Dma, Pha, Revised };
std::string protocol_name(Protocol p);

struct EngineConfig {
    Protocol protocol = Protocol::Revised;
    UpdatePolicy policy = UpdatePolicy::Buggy;
    std::uint64_t pads = 4;
    std::uint64_t vehicles = 1;
    std::uint64_t pseudonyms_per_vehicle = 16;
    std::uint64_t chain_length = 4;
    std::uint64_t seed = 1;
    bool verify_c2 = false;
    const GroupParams* group = &GroupParams::full512();
};

struct SessionVerdict {
    bool accepted = false;
    std::string failure;  // reject name when not accepted
    std::string detail;
    int failed_pad = -1;  // pad index of the failure, -1 outside the charge phase
    bool keys_defined = false;
    bool keys_match = false;
};

/// Deterministic single-threaded driver: owns the entities, routes every
/// message through the optional channel tap, and records wire events with
/// per-event primitive deltas.
class SessionEngine {
public:
    SessionEngine(const EngineConfig& config, Meter* meter = nullptr,
                  Transcript* transcript = nullptr, ChannelTap* tap = nullptr);

    /// One full charging session (registration/pre-auth, handshake, pads)
    /// for the given vehicle.
    SessionVerdict run_session(std::size_t vehicle);

    const EngineConfig& config() const { return config_; }
    Cspa& cspa() { return *cspa_; }
    Obu& obu(std::size_t vehicle) { return *obus_[vehicle]; }
    const std::vector<std::unique_ptr<Cp>>& pads() const { return cps_; }

    /// Adversary-side injections: raw wire bytes handed to the verifier
    /// as if received from the wireless channel. The outcome string names
    /// the verdict or the failed check.
    struct InjectionOutcome {
        bool accepted;
        std::string detail;
    };
    InjectionOutcome adversary_submit_chain(ByteView wire);
    InjectionOutcome adversary_submit_rev_m3(ByteView wire);

private:
    struct Delivered {
        std::optional<ProtocolMessage> msg;  // nullopt: dropped or malformed
        bool dropped = false;
    };
    Delivered deliver(const std::string& from, const std::string& to, const ProtocolMessage& msg,
                      Phase phase, Channel channel, bool accounted, std::uint64_t session);
    void record_note(const std::string& note, std::uint64_t session);
    void setup();
    std::optional<SessionVerdict> ensure_dma_registration(std::size_t vehicle,
                                                          std::uint64_t session);
    SessionVerdict run_dma(std::size_t vehicle, std::uint64_t session);
    SessionVerdict run_pha(std::size_t vehicle, std::uint64_t session);
    SessionVerdict run_revised(std::size_t vehicle, std::uint64_t session);
    /// Per-pad chain loop shared by the hash-chain and revised schemes.
    std::optional<SessionVerdict> run_chain_phase(Obu& obu, std::uint64_t session);

    EngineConfig config_;
    Meter* meter_;
    Transcript* transcript_;
    ChannelTap* tap_;
    Meter snapshot_;

    DeterministicRng root_rng_;
    std::unique_ptr<Dmv> dmv_;
    std::unique_ptr<Cspa> cspa_;
    std::vector<std::unique_ptr<Obu>> obus_;
    std::vector<std::unique_ptr<Cp>> cps_;

    std::vector<bool> dma_registered_;
    std::uint64_t step_ = 0;
    std::uint64_t next_session_ = 0;
};

}  // namespace dwpt
