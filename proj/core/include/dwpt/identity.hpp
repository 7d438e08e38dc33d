#pragma once

#include "dwpt/bytes.hpp"
#include "dwpt/hash.hpp"
#include "dwpt/rng.hpp"
#include "dwpt/signing.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace dwpt {

/// Long-term secrets provisioned into the vehicle's tamper-proof store at
/// registration; known only to the issuing authority and the OBU.
struct VehicleSecrets {
    Digest32 real_id;
    Digest32 k_v;
    Digest32 k_sym;
    std::uint64_t c_v = 0;    // secret counter, > 0
    std::uint64_t inc_v = 0;  // incrementing factor, > 0

    static VehicleSecrets random(DeterministicRng& rng);
};

/// Full authority-side pseudonym: sealed counter material plus the
/// authority signature over it.
struct PseudonymRecord {
    std::uint64_t n_i = 0;
    std::uint64_t alpha = 0;  // c_v + n_i * inc_v
    Bytes enc_alpha;          // (alpha)_{K_sym}, 32 bytes
    Bytes enc_alpha_xor_id;   // (alpha xor ID)_{K_V}, 32 bytes
    Bytes dmv_signature;

    /// The sealed payload the signature covers.
    Bytes signed_payload() const;
    /// Canonical encoding (payload plus signature) hashed into the wire
    /// handle.
    Bytes canonical_encoding() const;
};

/// 32-byte wire form of a pseudonym: the hash of the full record. The
/// structured record never travels; every protocol field that masks or
/// prices "the pseudonym" uses this handle.
struct PseudonymHandle {
    Digest32 handle;
    auto operator<=>(const PseudonymHandle&) const = default;
};

PseudonymHandle handle_of(const PseudonymRecord& record);

/// Everything the OBU's protected store receives at registration.
struct Credentials {
    std::vector<PseudonymRecord> records;
    std::vector<PseudonymHandle> handles;  // parallel to records
    Digest32 x_obu_static;                 // h(PS1 || PS2 || ... || PSn)
    Digest32 pwd_obu;
    /// Chain heads h^len(handle) per pseudonym, filled by provision_chains.
    std::vector<Digest32> chain_anchors;
    std::uint64_t chain_length = 0;

    std::string to_json() const;
    static Credentials from_json(const std::string& text);
};

/// CSPA-side copy of the authority's pseudonym database: valid and spent
/// handles only, with no vehicle association.
class CspaPseudonymDb {
public:
    void insert(const PseudonymHandle& h) { valid_.push_back(h.handle); }
    bool contains(const Digest32& h) const;
    bool spent(const Digest32& h) const { return spent_.count(h) != 0; }
    void mark_spent(const Digest32& h) { spent_.insert(h); }
    std::size_t size() const { return valid_.size(); }
    const std::vector<Digest32>& entries() const { return valid_; }

    std::string to_json() const;
    static CspaPseudonymDb from_json(const std::string& text);

private:
    friend CspaPseudonymDb sync_cspa_db(const std::vector<Credentials>&, DeterministicRng&);
    std::vector<Digest32> valid_;  // shuffled issue order
    std::set<Digest32> spent_;
};

/// Registration authority: keeps the sealing keypair and issues
/// credentials.
class Dmv {
public:
    explicit Dmv(DeterministicRng rng);

    /// Issues `count` pseudonyms with n_i = 1..count, the static vehicle
    /// identifier over all handles, and a fresh password.
    /// Throws std::invalid_argument for count = 0.
    Credentials register_vehicle(const VehicleSecrets& secrets, std::uint64_t count);

    const Bytes& public_key() const { return keypair_.public_key; }

private:
    DeterministicRng rng_;
    SigningKeypair keypair_;
};

bool verify_record(const Bytes& dmv_public_key, const PseudonymRecord& record);

/// Dynamic vehicle identifier of the revised scheme: h2 of the current
/// pseudonym handle.
Digest32 x_obu_dynamic(const PseudonymHandle& ps);

/// h^length over the 64-byte concatenation N_OBU || handle.
/// Throws std::invalid_argument for length = 0.
Digest32 build_chain_anchor(const PseudonymHandle& ps, const Digest32& n_obu,
                            std::uint64_t length);

/// Fills per-pseudonym chain heads h^length(handle) for the pure
/// hash-chain scheme.
void provision_chains(Credentials& credentials, std::uint64_t length);

/// Union of all issued handles, shuffled under the run's seeded generator
/// so the copy carries no vehicle association.
CspaPseudonymDb sync_cspa_db(const std::vector<Credentials>& all_credentials,
                             DeterministicRng& rng);

}  // namespace dwpt
