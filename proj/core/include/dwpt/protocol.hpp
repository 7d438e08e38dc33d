#pragma once

#include "dwpt/group.hpp"
#include "dwpt/hash.hpp"
#include "dwpt/identity.hpp"
#include "dwpt/message.hpp"
#include "dwpt/meter.hpp"
#include "dwpt/result.hpp"
#include "dwpt/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace dwpt {

/// How the chain verifier stores the next expected value after an accept.
/// Buggy re-stores the hash of the received value (the value already in
/// memory), so the expectation never advances; Fixed stores the received
/// value itself.
enum class UpdatePolicy { Buggy, Fixed };

// ---------------------------------------------------------------------------
// OBU

class Obu {
public:
    Obu(Credentials credentials, DeterministicRng rng, Meter* meter = nullptr);

    // -- registration / pre-authentication --------------------------------
    /// Static-scheme registration request {PWD, X_OBU}.
    M1 make_registration() const;
    /// Stores the security parameters from the registration response after
    /// checking the identifier echo.
    Result<Accepted> accept_registration(const M2& m2);

    /// Revised scheme: consumes the next pseudonym and requests security
    /// parameters for its dynamic identifier.
    Result<PreAuth> make_pre_auth();
    Result<Accepted> accept_pre_auth(const M2& m2);

    // -- direct mutual authentication --------------------------------------
    /// Consumes the next pseudonym and builds {c1, c2, c3, H3, delta4}.
    Result<M3> dma_request();
    /// Checks c5 and c6, extracts the peer nonce and H1, validates the
    /// extracted H1 against the stored H2 before keeping it, and derives
    /// the session key. The validation and key derivation are finalize-
    /// phase work.
    Result<Digest32> dma_finish(const M4& m4, const Digest32& id_cp);

    // -- revised authentication ---------------------------------------------
    /// Builds {c1, c'3, c'4, c'5, H3} for the pre-authenticated pseudonym.
    /// chain_len is the number of hash applications in the chain anchor;
    /// the head is consumed by registration, leaving chain_len - 1
    /// revealable pad values.
    Result<RevM3> rev_request(std::uint64_t chain_len);
    /// Extracts r_CSPA and checks the exponentiation against c'7.
    Result<Accepted> rev_verify(const RevM4& m4);
    /// Initiator copy of the session key, derived after acceptance.
    Digest32 finalize_session_key(const Digest32& id_cp);

    // -- hash-chain authentication ------------------------------------------
    /// Consumes the next pseudonym and builds its provisioned chain; the
    /// returned head registers the session with the verifier.
    Result<ChainValue> pha_start();
    /// Next chain value expected by the verifier.
    Result<ChainValue> next_chain_value();

    bool pseudonyms_exhausted() const { return next_pseudonym_ >= credentials_.handles.size(); }
    const Credentials& credentials() const { return credentials_; }
    const Digest32& current_handle() const;
    /// Chain head of the current session (set by rev_request / pha_start).
    const Digest32& chain_head() const { return chain_->head(); }
    const Digest32& extracted_h1() const { return extracted_h1_; }
    void set_group(const GroupParams& g) { group_ = &g; }

private:
    std::optional<std::size_t> consume_pseudonym();

    Credentials credentials_;
    DeterministicRng rng_;
    Meter* meter_;

    Digest32 h2_val_{};
    Digest32 h3_val_{};
    bool registered_ = false;

    std::size_t next_pseudonym_ = 0;
    std::optional<std::size_t> current_index_;

    Digest32 r_obu_{};
    Digest32 n_obu_{};
    Digest32 r_cspa_{};
    Digest32 pending_x_dyn_{};
    Digest32 extracted_h1_{};
    std::optional<HashChain> chain_;
    const GroupParams* group_ = &GroupParams::full512();
};

// ---------------------------------------------------------------------------
// CSPA

class Cspa {
public:
    Cspa(DeterministicRng rng, UpdatePolicy policy, Meter* meter = nullptr);

    void set_group(const GroupParams& g) { group_ = &g; }
    void set_policy(UpdatePolicy p) { policy_ = p; }
    UpdatePolicy policy() const { return policy_; }

    /// Authority-provided registration expectations (static scheme) and
    /// passwords.
    void learn_vehicle(const Digest32& x_obu, const Digest32& pwd);
    void learn_pwd(const Digest32& pwd);
    /// Adopts the issued-pseudonym copy and indexes the dynamic
    /// identifiers it implies, so pre-authentication can refuse
    /// identifiers that match no issued pseudonym.
    void adopt_pseudonym_db(CspaPseudonymDb db);
    const CspaPseudonymDb& pseudonym_db() const { return pseudonym_db_; }

    /// Static-scheme registration: requires the identifier among the
    /// authority-provided expectations.
    Result<M2> register_obu(const M1& m1);
    /// Revised pre-authentication for a dynamic identifier.
    Result<M2> pre_authenticate(const PreAuth& request);

    /// Revised handshake response. On success the pseudonym is spent, the
    /// chain head registered, and the session key for id_cp derived.
    Result<RevM4> rev_respond(const RevM3& m, const Digest32& id_cp);

    /// Registers a chain head (pure hash-chain scheme) and derives the
    /// session key for the serving pad.
    Digest32 register_chain_head(const Digest32& head, std::uint64_t remaining,
                                 const Digest32& id_cp);

    struct ChainAccept {
        Digest32 session_key;
    };
    /// Accepts a value whose hash equals some session's expected value,
    /// then updates that expectation per the configured policy.
    Result<ChainAccept> verify_chain(const ChainValue& cv);

    /// Expected value of the chain session registered under `head` at
    /// registration time (test/diagnostic accessor).
    std::optional<Digest32> expected_for_session(std::size_t session_index) const;
    std::size_t chain_session_count() const { return chain_sessions_.size(); }
    /// Key of the most recently registered chain session.
    const Digest32& last_session_key() const { return chain_sessions_.back().session_key; }

    const Digest32& secret_s() const { return secret_s_; }
    const Digest32& msk() const { return msk_; }

private:
    struct ChainSession {
        Digest32 expected;
        std::uint64_t remaining;
        Digest32 session_key;
    };

    M2 derive_params(const Digest32& x_obu);

    DeterministicRng rng_;
    UpdatePolicy policy_;
    Meter* meter_;
    const GroupParams* group_ = &GroupParams::full512();

    Digest32 secret_s_;
    Digest32 msk_;
    std::uint32_t msk_index_ = 0;  // single master secret; index kept for shape

    std::map<Digest32, Digest32> security_params_;  // X_OBU -> H1
    std::map<Digest32, Digest32> h3_index_;         // H3 -> X_OBU
    std::map<Digest32, Digest32> known_vehicles_;   // X_OBU -> PWD (static scheme)
    std::set<Digest32> known_pwds_;                 // revised scheme
    std::set<Digest32> x_dyn_index_;                // h2(handle) of issued pseudonyms
    CspaPseudonymDb pseudonym_db_;

    std::vector<ChainSession> chain_sessions_;
    std::map<Digest32, std::size_t> expected_index_;
};

// ---------------------------------------------------------------------------
// CP

class Cp {
public:
    Cp(Digest32 id, DeterministicRng rng, Meter* meter = nullptr);

    const Digest32& id() const { return id_; }

    /// Direct-scheme trust shortcut: the pad holds the master secret and
    /// the identifier registry so it can authenticate without the backend.
    void provision_dma(const Digest32& msk, std::vector<Digest32> x_registry, bool verify_c2);

    /// Full direct-scheme responder: checks c3 (and optionally c2 via
    /// registry brute force), then builds {c4, c5, c6, c7} and stores the
    /// session key.
    Result<M4> dma_respond(const M3& m3, std::uint64_t timestamp);

    void store_session_key(const Digest32& key, std::uint64_t timestamp);
    std::size_t stored_key_count() const { return session_keys_.size(); }
    const std::vector<std::pair<Digest32, std::uint64_t>>& stored_keys() const {
        return session_keys_;
    }

private:
    Digest32 id_;
    DeterministicRng rng_;
    Meter* meter_;

    Digest32 msk_{};
    std::vector<Digest32> x_registry_;
    bool verify_c2_ = false;
    bool dma_ready_ = false;

    std::vector<std::pair<Digest32, std::uint64_t>> session_keys_;
};

}  // namespace dwpt
