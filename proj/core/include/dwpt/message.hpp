#pragma once

#include "dwpt/bytes.hpp"
#include "dwpt/group.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dwpt {

// Wire messages. Every digest field is exactly 32 bytes; the group
// element is 64. A one-byte type tag frames the body on the wire and is
// excluded from the byte accounting, like the hash-function identifier the
// registration response nominally carries.

/// Registration request to the CSPA (static scheme).
struct M1 {
    Digest32 pwd;
    Digest32 x_obu;
};

/// Registration / pre-authentication response: the vehicle identifier
/// echo and the derived security parameters.
struct M2 {
    Digest32 x_obu;
    Digest32 h2_val;
    Digest32 h3_val;
};

/// Direct-scheme authentication request.
struct M3 {
    Digest32 c1;
    Digest32 c2;
    Digest32 c3;
    Digest32 h3;
    Digest32 delta4;
};

/// Direct-scheme authentication response.
struct M4 {
    Digest32 c4;
    Digest32 c5;
    Digest32 c6;
    Digest32 c7;
};

/// One hash-chain link, revealed per pad.
struct ChainValue {
    Digest32 v;
};

/// Revised-scheme authentication request.
struct RevM3 {
    Digest32 c1;
    Digest32 c3p;
    Digest32 c4p;
    Digest32 c5p;
    Digest32 h3;
};

/// Revised-scheme authentication response.
struct RevM4 {
    Digest32 c6p;
    GroupElement c7p;
};

/// Per-pseudonym pre-authentication request of the revised scheme.
struct PreAuth {
    Digest32 x_obu_dyn;
    Digest32 pwd;
    Digest32 r_pre;
};

/// Session key provisioning to a pad over the wired link.
struct KeyDelivery {
    Digest32 session_key;
};

using ProtocolMessage =
    std::variant<M1, M2, M3, M4, ChainValue, RevM3, RevM4, PreAuth, KeyDelivery>;

/// Message body size under the 32-byte digest / 64-byte group element
/// convention (framing tag excluded).
std::size_t wire_bytes(const ProtocolMessage& msg);

std::string message_type_name(const ProtocolMessage& msg);

/// Named fields in wire order, for transcripts and the exact-match linker.
std::vector<std::pair<std::string, Bytes>> message_fields(const ProtocolMessage& msg);

/// Tagged wire encoding: type byte followed by the fixed-width body.
Bytes encode_message(const ProtocolMessage& msg);

/// Strict decode; std::nullopt for unknown tags or wrong body length.
std::optional<ProtocolMessage> decode_message(ByteView wire);

}  // namespace dwpt
