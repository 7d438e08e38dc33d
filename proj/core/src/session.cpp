#include "dwpt/session.hpp"

#include "dwpt/adversary.hpp"

#include <stdexcept>

namespace dwpt {

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::Dma: return "dma";
        case Protocol::Pha: return "pha";
        case Protocol::Revised: return "revised";
    }
    return "?";
}

SessionEngine::SessionEngine(const EngineConfig& config, Meter* meter, Transcript* transcript,
                             ChannelTap* tap)
    : config_(config),
      meter_(meter),
      transcript_(transcript),
      tap_(tap),
      root_rng_(config.seed) {
    if (config_.vehicles == 0) throw std::invalid_argument("at least one vehicle required");
    setup();
}

namespace {
SessionVerdict reject_verdict(const RejectReason& r, int pad = -1) {
    SessionVerdict v;
    v.accepted = false;
    v.failure = reject_name(r.code);
    v.detail = r.detail;
    v.failed_pad = pad;
    return v;
}

SessionVerdict protocol_error_verdict(const std::string& detail, int pad = -1) {
    SessionVerdict v;
    v.accepted = false;
    v.failure = reject_name(Reject::ProtocolError);
    v.detail = detail;
    v.failed_pad = pad;
    return v;
}
}  // namespace

void SessionEngine::setup() {
    // The revised scheme always runs the corrected chain update; the
    // configured policy applies to the pure hash-chain scheme.
    const UpdatePolicy policy =
        config_.protocol == Protocol::Revised ? UpdatePolicy::Fixed : config_.policy;

    {
        std::optional<MeterScope> reg_scope;
        if (meter_ != nullptr) reg_scope.emplace(*meter_, Role::Dmv, Phase::Registration);
        dmv_ = std::make_unique<Dmv>(root_rng_.fork("dmv"));
    }

    cspa_ = std::make_unique<Cspa>(root_rng_.fork("cspa"), policy, meter_);
    cspa_->set_group(*config_.group);

    std::vector<Credentials> all_creds;
    std::vector<Digest32> x_registry;
    for (std::uint64_t v = 0; v < config_.vehicles; ++v) {
        const std::string label = "vehicle-" + std::to_string(v);
        DeterministicRng vrng = root_rng_.fork(label);
        VehicleSecrets secrets = VehicleSecrets::random(vrng);

        Credentials creds;
        {
            std::optional<MeterScope> reg_scope;
            if (meter_ != nullptr) reg_scope.emplace(*meter_, Role::Dmv, Phase::Registration);
            creds = dmv_->register_vehicle(secrets, config_.pseudonyms_per_vehicle);
            if (config_.protocol == Protocol::Pha) provision_chains(creds, config_.chain_length);
        }
        x_registry.push_back(creds.x_obu_static);
        cspa_->learn_vehicle(creds.x_obu_static, creds.pwd_obu);
        all_creds.push_back(creds);

        auto obu = std::make_unique<Obu>(std::move(creds), vrng.fork("obu"), meter_);
        obu->set_group(*config_.group);
        obus_.push_back(std::move(obu));
    }

    if (config_.protocol == Protocol::Revised) {
        DeterministicRng db_rng = root_rng_.fork("cspa-db");
        cspa_->adopt_pseudonym_db(sync_cspa_db(all_creds, db_rng));
    }

    DeterministicRng pad_rng = root_rng_.fork("pads");
    const std::uint64_t pad_count = std::max<std::uint64_t>(config_.pads, 1);
    for (std::uint64_t j = 0; j < pad_count; ++j) {
        auto cp = std::make_unique<Cp>(pad_rng.next_digest(),
                                       pad_rng.fork("cp-" + std::to_string(j)), meter_);
        if (config_.protocol == Protocol::Dma)
            cp->provision_dma(cspa_->msk(), x_registry, config_.verify_c2);
        cps_.push_back(std::move(cp));
    }

    dma_registered_.assign(config_.vehicles, false);
}

// Static-scheme registration happens once per vehicle, on first use; a
// tampered registration surfaces as a session verdict.
std::optional<SessionVerdict> SessionEngine::ensure_dma_registration(std::size_t vehicle,
                                                                     std::uint64_t session) {
    if (dma_registered_[vehicle]) return std::nullopt;
    Obu& obu = *obus_[vehicle];

    const M1 m1 = obu.make_registration();
    auto d1 = deliver("obu", "cspa", ProtocolMessage{m1}, Phase::Registration, Channel::Wireless,
                      false, session);
    if (!d1.msg) return protocol_error_verdict("registration request lost");
    const M1* m1d = std::get_if<M1>(&*d1.msg);
    if (m1d == nullptr) return protocol_error_verdict("registration request malformed");

    const auto m2r = cspa_->register_obu(*m1d);
    if (!m2r.ok()) return reject_verdict(m2r.error());
    auto d2 = deliver("cspa", "obu", ProtocolMessage{m2r.value()}, Phase::Registration,
                      Channel::Wireless, false, session);
    if (!d2.msg) return protocol_error_verdict("registration response lost");
    const M2* m2d = std::get_if<M2>(&*d2.msg);
    if (m2d == nullptr) return protocol_error_verdict("registration response malformed");

    auto accepted = obu.accept_registration(*m2d);
    if (!accepted.ok()) return reject_verdict(accepted.error());
    dma_registered_[vehicle] = true;
    return std::nullopt;
}

SessionEngine::Delivered SessionEngine::deliver(const std::string& from, const std::string& to,
                                                const ProtocolMessage& msg, Phase phase,
                                                Channel channel, bool accounted,
                                                std::uint64_t session) {
    Bytes wire = encode_message(msg);
    bool dropped = false;
    if (tap_ != nullptr && channel == Channel::Wireless) {
        auto processed = tap_->process(step_, from, to, wire);
        if (!processed) dropped = true;
        else wire = std::move(*processed);
    }

    const std::uint64_t step = step_++;
    std::optional<ProtocolMessage> delivered;
    if (!dropped) delivered = decode_message(ByteView{wire});

    if (transcript_ != nullptr) {
        TranscriptEvent ev;
        ev.step = step;
        ev.kind = "message";
        ev.from = from;
        ev.to = to;
        ev.phase = phase;
        ev.channel = channel;
        ev.accounted = accounted && !dropped;
        ev.session = session;
        if (dropped) {
            ev.type = message_type_name(msg) + "_dropped";
            ev.bytes = 0;
        } else {
            ev.type = delivered ? message_type_name(*delivered) : "malformed";
            ev.bytes = wire.size() - 1;  // framing tag excluded
            if (delivered) ev.fields = message_fields(*delivered);
        }
        if (meter_ != nullptr) {
            ev.ops = diff_meters(snapshot_, *meter_);
            snapshot_ = *meter_;
        }
        transcript_->add(ev);
    }
    return Delivered{std::move(delivered), dropped};
}

void SessionEngine::record_note(const std::string& note, std::uint64_t session) {
    const std::uint64_t step = step_++;
    if (transcript_ == nullptr) return;
    TranscriptEvent ev;
    ev.step = step;
    ev.kind = "note";
    ev.note = note;
    ev.type = note;
    ev.session = session;
    if (meter_ != nullptr) {
        ev.ops = diff_meters(snapshot_, *meter_);
        snapshot_ = *meter_;
    }
    transcript_->add(ev);
}

SessionVerdict SessionEngine::run_session(std::size_t vehicle) {
    if (vehicle >= obus_.size()) throw std::invalid_argument("vehicle index out of range");
    const std::uint64_t session = next_session_++;
    SessionVerdict verdict;
    switch (config_.protocol) {
        case Protocol::Dma: verdict = run_dma(vehicle, session); break;
        case Protocol::Pha: verdict = run_pha(vehicle, session); break;
        case Protocol::Revised: verdict = run_revised(vehicle, session); break;
    }
    record_note(verdict.accepted ? "session_accepted" : "session_rejected", session);
    return verdict;
}

SessionVerdict SessionEngine::run_dma(std::size_t vehicle, std::uint64_t session) {
    if (auto failed = ensure_dma_registration(vehicle, session)) return *failed;
    Obu& obu = *obus_[vehicle];
    SessionVerdict verdict;
    verdict.keys_defined = true;
    verdict.keys_match = true;

    for (std::uint64_t pad = 0; pad < config_.pads; ++pad) {
        Cp& cp = *cps_[pad % cps_.size()];

        auto m3r = obu.dma_request();
        if (!m3r.ok()) return reject_verdict(m3r.error(), static_cast<int>(pad));
        auto d3 = deliver("obu", "cp", ProtocolMessage{m3r.value()}, Phase::Auth,
                          Channel::Wireless, true, session);
        if (!d3.msg) return protocol_error_verdict("m3 lost", static_cast<int>(pad));
        const M3* m3 = std::get_if<M3>(&*d3.msg);
        if (m3 == nullptr) return protocol_error_verdict("m3 malformed", static_cast<int>(pad));

        auto m4r = cp.dma_respond(*m3, step_);
        if (!m4r.ok()) return reject_verdict(m4r.error(), static_cast<int>(pad));
        auto d4 = deliver("cp", "obu", ProtocolMessage{m4r.value()}, Phase::Auth,
                          Channel::Wireless, true, session);
        if (!d4.msg) return protocol_error_verdict("m4 lost", static_cast<int>(pad));
        const M4* m4 = std::get_if<M4>(&*d4.msg);
        if (m4 == nullptr) return protocol_error_verdict("m4 malformed", static_cast<int>(pad));

        auto skr = obu.dma_finish(*m4, cp.id());
        if (!skr.ok()) return reject_verdict(skr.error(), static_cast<int>(pad));

        const Digest32& cp_key = cp.stored_keys().back().first;
        if (!(skr.value() == cp_key)) verdict.keys_match = false;
    }
    verdict.accepted = true;
    return verdict;
}

SessionVerdict SessionEngine::run_pha(std::size_t vehicle, std::uint64_t session) {
    Obu& obu = *obus_[vehicle];

    auto headr = obu.pha_start();
    if (!headr.ok()) return reject_verdict(headr.error());
    auto dh = deliver("obu", "cspa", ProtocolMessage{headr.value()}, Phase::Auth,
                      Channel::Wireless, true, session);
    if (!dh.msg) return protocol_error_verdict("chain head lost");
    const ChainValue* head = std::get_if<ChainValue>(&*dh.msg);
    if (head == nullptr) return protocol_error_verdict("chain head malformed");

    cspa_->register_chain_head(head->v, config_.chain_length, cps_[0]->id());

    auto chain_verdict = run_chain_phase(obu, session);
    if (chain_verdict) return *chain_verdict;

    SessionVerdict verdict;
    verdict.accepted = true;
    verdict.keys_defined = false;
    return verdict;
}

SessionVerdict SessionEngine::run_revised(std::size_t vehicle, std::uint64_t session) {
    Obu& obu = *obus_[vehicle];

    // Per-pseudonym pre-authentication. The request is a one-time
    // registration-class cost; only the response's three digests enter the
    // per-session byte accounting.
    auto par = obu.make_pre_auth();
    if (!par.ok()) return reject_verdict(par.error());
    auto dpa = deliver("obu", "cspa", ProtocolMessage{par.value()}, Phase::PreAuth,
                       Channel::Wireless, false, session);
    if (!dpa.msg) return protocol_error_verdict("pre-auth request lost");
    const PreAuth* pa = std::get_if<PreAuth>(&*dpa.msg);
    if (pa == nullptr) return protocol_error_verdict("pre-auth request malformed");

    auto m2r = cspa_->pre_authenticate(*pa);
    if (!m2r.ok()) return reject_verdict(m2r.error());
    auto dm2 = deliver("cspa", "obu", ProtocolMessage{m2r.value()}, Phase::PreAuth,
                       Channel::Wireless, true, session);
    if (!dm2.msg) return protocol_error_verdict("pre-auth response lost");
    const M2* m2 = std::get_if<M2>(&*dm2.msg);
    if (m2 == nullptr) return protocol_error_verdict("pre-auth response malformed");
    auto ar = obu.accept_pre_auth(*m2);
    if (!ar.ok()) return reject_verdict(ar.error());

    // Handshake with the backend; the chain anchor covers one reveal per
    // pad after its head is consumed by registration.
    auto m3r = obu.rev_request(config_.pads + 1);
    if (!m3r.ok()) return reject_verdict(m3r.error());
    auto dm3 = deliver("obu", "cspa", ProtocolMessage{m3r.value()}, Phase::Auth,
                       Channel::Wireless, true, session);
    if (!dm3.msg) return protocol_error_verdict("handshake request lost");
    const RevM3* m3 = std::get_if<RevM3>(&*dm3.msg);
    if (m3 == nullptr) return protocol_error_verdict("handshake request malformed");

    auto m4r = cspa_->rev_respond(*m3, cps_[0]->id());
    if (!m4r.ok()) return reject_verdict(m4r.error());
    auto dm4 = deliver("cspa", "obu", ProtocolMessage{m4r.value()}, Phase::Auth,
                       Channel::Wireless, true, session);
    if (!dm4.msg) return protocol_error_verdict("handshake response lost");
    const RevM4* m4 = std::get_if<RevM4>(&*dm4.msg);
    if (m4 == nullptr) return protocol_error_verdict("handshake response malformed");

    auto vr = obu.rev_verify(*m4);
    if (!vr.ok()) return reject_verdict(vr.error());

    const Digest32 obu_key = obu.finalize_session_key(cps_[0]->id());

    auto chain_verdict = run_chain_phase(obu, session);
    if (chain_verdict) return *chain_verdict;

    SessionVerdict verdict;
    verdict.accepted = true;
    verdict.keys_defined = true;
    verdict.keys_match = true;
    if (config_.pads == 0) {
        // No pad delivery happened; compare against the backend's record.
        verdict.keys_match = obu_key == cspa_->last_session_key();
    } else {
        for (std::uint64_t pad = 0; pad < config_.pads; ++pad) {
            const Cp& cp = *cps_[pad % cps_.size()];
            if (cp.stored_keys().empty() || !(cp.stored_keys().back().first == obu_key))
                verdict.keys_match = false;
        }
    }
    return verdict;
}

std::optional<SessionVerdict> SessionEngine::run_chain_phase(Obu& obu, std::uint64_t session) {
    for (std::uint64_t pad = 0; pad < config_.pads; ++pad) {
        Cp& cp = *cps_[pad % cps_.size()];

        auto cvr = obu.next_chain_value();
        if (!cvr.ok()) return reject_verdict(cvr.error(), static_cast<int>(pad));
        auto dcv = deliver("obu", "cp", ProtocolMessage{cvr.value()}, Phase::Chain,
                           Channel::Wireless, true, session);
        if (!dcv.msg) return protocol_error_verdict("chain value lost", static_cast<int>(pad));
        const ChainValue* cv = std::get_if<ChainValue>(&*dcv.msg);
        if (cv == nullptr)
            return protocol_error_verdict("chain value malformed", static_cast<int>(pad));

        // The pad forwards whatever it received to the backend over the
        // wired link.
        auto dfw = deliver("cp", "cspa", ProtocolMessage{*cv}, Phase::Chain,
                           Channel::Wired, false, session);
        if (!dfw.msg) return protocol_error_verdict("chain forward lost", static_cast<int>(pad));

        auto acc = cspa_->verify_chain(std::get<ChainValue>(*dfw.msg));
        if (!acc.ok()) return reject_verdict(acc.error(), static_cast<int>(pad));

        auto dkey = deliver("cspa", "cp",
                            ProtocolMessage{KeyDelivery{acc.value().session_key}}, Phase::Chain,
                            Channel::Wired, false, session);
        if (!dkey.msg) return protocol_error_verdict("key delivery lost", static_cast<int>(pad));
        cp.store_session_key(std::get<KeyDelivery>(*dkey.msg).session_key, step_);
    }
    return std::nullopt;
}

SessionEngine::InjectionOutcome SessionEngine::adversary_submit_chain(ByteView wire) {
    const std::uint64_t session = next_session_++;
    auto decoded = decode_message(wire);
    if (transcript_ != nullptr) {
        TranscriptEvent ev;
        ev.step = step_++;
        ev.kind = "message";
        ev.from = "adversary";
        ev.to = "cspa";
        ev.type = decoded ? message_type_name(*decoded) : "malformed";
        ev.phase = Phase::Chain;
        ev.channel = Channel::Wireless;
        ev.accounted = false;
        ev.session = session;
        ev.bytes = wire.empty() ? 0 : wire.size() - 1;
        if (decoded) ev.fields = message_fields(*decoded);
        if (meter_ != nullptr) {
            ev.ops = diff_meters(snapshot_, *meter_);
            snapshot_ = *meter_;
        }
        transcript_->add(ev);
    } else {
        ++step_;
    }
    if (!decoded) return {false, "malformed injection"};
    const ChainValue* cv = std::get_if<ChainValue>(&*decoded);
    if (cv == nullptr) return {false, "injection is not a chain value"};
    auto r = cspa_->verify_chain(*cv);
    if (r.ok()) return {true, "accepted"};
    return {false, reject_name(r.error().code) + ": " + r.error().detail};
}

SessionEngine::InjectionOutcome SessionEngine::adversary_submit_rev_m3(ByteView wire) {
    const std::uint64_t session = next_session_++;
    auto decoded = decode_message(wire);
    if (transcript_ != nullptr) {
        TranscriptEvent ev;
        ev.step = step_++;
        ev.kind = "message";
        ev.from = "adversary";
        ev.to = "cspa";
        ev.type = decoded ? message_type_name(*decoded) : "malformed";
        ev.phase = Phase::Auth;
        ev.channel = Channel::Wireless;
        ev.accounted = false;
        ev.session = session;
        ev.bytes = wire.empty() ? 0 : wire.size() - 1;
        if (decoded) ev.fields = message_fields(*decoded);
        if (meter_ != nullptr) {
            ev.ops = diff_meters(snapshot_, *meter_);
            snapshot_ = *meter_;
        }
        transcript_->add(ev);
    } else {
        ++step_;
    }
    if (!decoded) return {false, "malformed injection"};
    const RevM3* m3 = std::get_if<RevM3>(&*decoded);
    if (m3 == nullptr) return {false, "injection is not an authentication request"};
    auto r = cspa_->rev_respond(*m3, cps_[0]->id());
    if (r.ok()) return {true, "accepted"};
    return {false, reject_name(r.error().code) + ": " + r.error().detail};
}

}  // namespace dwpt
