#pragma once

#include "dwpt/bytes.hpp"
#include "dwpt/rng.hpp"

namespace dwpt {

/// Abstract issuing-authority signature. Schnorr-style over the fixed
/// 512-bit group: deterministic, complete, and sound against message or
/// key substitution. Stands in for the authority's sealing key; it is
/// never part of the per-session cost accounting.
struct SigningKeypair {
    Bytes secret;      // 32-byte exponent
    Bytes public_key;  // 64-byte group element
};

SigningKeypair signing_keygen(DeterministicRng& rng);

/// 96-byte signature (s || e). Counts as one signing operation.
Bytes sign_message(const Bytes& secret, ByteView msg);

/// Counts as one verification. Malformed signatures return false rather
/// than throwing.
bool verify_message(const Bytes& public_key, ByteView msg, ByteView signature);

/// Deterministic length-preserving symmetric placeholder used for the
/// sealed pseudonym fields. Never opened during authentication.
Bytes sym_encrypt(const Digest32& key, ByteView plaintext);

}  // namespace dwpt
