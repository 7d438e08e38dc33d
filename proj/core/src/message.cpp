#include "dwpt/message.hpp"

#include <cstring>

namespace dwpt {

namespace {

enum class Tag : std::uint8_t {
    M1 = 1,
    M2 = 2,
    M3 = 3,
    M4 = 4,
    Chain = 5,
    RevM3 = 6,
    RevM4 = 7,
    PreAuth = 8,
    KeyDelivery = 9,
};

struct FieldLister {
    std::vector<std::pair<std::string, Bytes>> out;

    void add(const char* name, const Digest32& d) {
        out.emplace_back(name, Bytes(d.bytes.begin(), d.bytes.end()));
    }
    void add(const char* name, const GroupElement& g) { out.emplace_back(name, g.to_wire()); }

    void operator()(const M1& m) {
        add("pwd", m.pwd);
        add("x_obu", m.x_obu);
    }
    void operator()(const M2& m) {
        add("x_obu", m.x_obu);
        add("h2", m.h2_val);
        add("h3", m.h3_val);
    }
    void operator()(const M3& m) {
        add("c1", m.c1);
        add("c2", m.c2);
        add("c3", m.c3);
        add("h3", m.h3);
        add("delta4", m.delta4);
    }
    void operator()(const M4& m) {
        add("c4", m.c4);
        add("c5", m.c5);
        add("c6", m.c6);
        add("c7", m.c7);
    }
    void operator()(const ChainValue& m) { add("v", m.v); }
    void operator()(const RevM3& m) {
        add("c1", m.c1);
        add("c3p", m.c3p);
        add("c4p", m.c4p);
        add("c5p", m.c5p);
        add("h3", m.h3);
    }
    void operator()(const RevM4& m) {
        add("c6p", m.c6p);
        add("c7p", m.c7p);
    }
    void operator()(const PreAuth& m) {
        add("x_obu_dyn", m.x_obu_dyn);
        add("pwd", m.pwd);
        add("r_pre", m.r_pre);
    }
    void operator()(const KeyDelivery& m) { add("session_key", m.session_key); }
};

Digest32 take32(ByteView wire, std::size_t offset) {
    Digest32 d;
    std::memcpy(d.bytes.data(), wire.data() + offset, 32);
    return d;
}

}  // namespace

std::size_t wire_bytes(const ProtocolMessage& msg) {
    std::size_t total = 0;
    for (const auto& [name, bytes] : message_fields(msg)) total += bytes.size();
    return total;
}

std::string message_type_name(const ProtocolMessage& msg) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, M1>) return "m1";
            else if constexpr (std::is_same_v<T, M2>) return "m2";
            else if constexpr (std::is_same_v<T, M3>) return "m3";
            else if constexpr (std::is_same_v<T, M4>) return "m4";
            else if constexpr (std::is_same_v<T, ChainValue>) return "chain_value";
            else if constexpr (std::is_same_v<T, RevM3>) return "rev_m3";
            else if constexpr (std::is_same_v<T, RevM4>) return "rev_m4";
            else if constexpr (std::is_same_v<T, PreAuth>) return "pre_auth";
            else return "key_delivery";
        },
        msg);
}

std::vector<std::pair<std::string, Bytes>> message_fields(const ProtocolMessage& msg) {
    FieldLister lister;
    std::visit(lister, msg);
    return std::move(lister.out);
}

Bytes encode_message(const ProtocolMessage& msg) {
    Bytes out;
    out.push_back(static_cast<std::uint8_t>(msg.index() + 1));
    for (const auto& [name, bytes] : message_fields(msg))
        out.insert(out.end(), bytes.begin(), bytes.end());
    return out;
}

std::optional<ProtocolMessage> decode_message(ByteView wire) {
    if (wire.empty()) return std::nullopt;
    const auto tag = static_cast<Tag>(wire[0]);
    const ByteView body = wire.subspan(1);

    const auto need = [&](std::size_t n) { return body.size() == n; };

    switch (tag) {
        case Tag::M1:
            if (!need(64)) return std::nullopt;
            return ProtocolMessage{M1{take32(body, 0), take32(body, 32)}};
        case Tag::M2:
            if (!need(96)) return std::nullopt;
            return ProtocolMessage{M2{take32(body, 0), take32(body, 32), take32(body, 64)}};
        case Tag::M3:
            if (!need(160)) return std::nullopt;
            return ProtocolMessage{M3{take32(body, 0), take32(body, 32), take32(body, 64),
                                      take32(body, 96), take32(body, 128)}};
        case Tag::M4:
            if (!need(128)) return std::nullopt;
            return ProtocolMessage{
                M4{take32(body, 0), take32(body, 32), take32(body, 64), take32(body, 96)}};
        case Tag::Chain:
            if (!need(32)) return std::nullopt;
            return ProtocolMessage{ChainValue{take32(body, 0)}};
        case Tag::RevM3:
            if (!need(160)) return std::nullopt;
            return ProtocolMessage{RevM3{take32(body, 0), take32(body, 32), take32(body, 64),
                                         take32(body, 96), take32(body, 128)}};
        case Tag::RevM4: {
            if (!need(96)) return std::nullopt;
            RevM4 m;
            m.c6p = take32(body, 0);
            // The element is validated against the active group by the
            // receiving entity; here only the width is fixed.
            m.c7p = GroupElement{BigUint::from_be_bytes(body.subspan(32, 64))};
            return ProtocolMessage{m};
        }
        case Tag::PreAuth:
            if (!need(96)) return std::nullopt;
            return ProtocolMessage{PreAuth{take32(body, 0), take32(body, 32), take32(body, 64)}};
        case Tag::KeyDelivery:
            if (!need(32)) return std::nullopt;
            return ProtocolMessage{KeyDelivery{take32(body, 0)}};
    }
    return std::nullopt;
}

}  // namespace dwpt
