#include "dwpt/transcript.hpp"

#include <json.hpp>

#include <stdexcept>

namespace dwpt {

using nlohmann::json;

std::string channel_name(Channel c) { return c == Channel::Wireless ? "wireless" : "wired"; }

namespace {
Phase phase_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kPhaseCount; ++i) {
        const auto p = static_cast<Phase>(i);
        if (phase_name(p) == name) return p;
    }
    throw std::invalid_argument("unknown phase: " + name);
}

json counts_to_json(const PrimitiveCounts& c) {
    json out = json::object();
    for (std::size_t i = 0; i < kPrimitiveCount; ++i) {
        if (c.ops[i] != 0) out[primitive_name(static_cast<Primitive>(i))] = c.ops[i];
    }
    return out;
}

PrimitiveCounts counts_from_json(const json& j) {
    PrimitiveCounts c;
    for (std::size_t i = 0; i < kPrimitiveCount; ++i) {
        const auto p = static_cast<Primitive>(i);
        const auto it = j.find(primitive_name(p));
        if (it != j.end()) c[p] = it->get<std::uint64_t>();
    }
    return c;
}
}  // namespace

std::string TranscriptEvent::to_json_line() const {
    json j;
    j["step"] = step;
    j["kind"] = kind;
    if (kind == "message") {
        j["from"] = from;
        j["to"] = to;
        j["type"] = type;
        j["phase"] = phase_name(phase);
        j["channel"] = channel_name(channel);
        j["accounted"] = accounted;
        j["bytes"] = bytes;
        json f = json::object();
        for (const auto& [name, value] : fields) f[name] = to_hex(ByteView{value});
        j["fields"] = f;
    } else {
        j["note"] = note;
    }
    j["session"] = session;
    if (ops) {
        json o = json::object();
        for (const auto& [role, phases] : *ops) {
            json pj = json::object();
            for (const auto& [ph, counts] : phases) pj[ph] = counts_to_json(counts);
            o[role] = pj;
        }
        j["ops"] = o;
    }
    return j.dump();
}

TranscriptEvent TranscriptEvent::from_json_line(const std::string& line) {
    const json j = json::parse(line);
    TranscriptEvent ev;
    ev.step = j.at("step").get<std::uint64_t>();
    ev.kind = j.at("kind").get<std::string>();
    ev.session = j.at("session").get<std::uint64_t>();
    if (ev.kind == "message") {
        ev.from = j.at("from").get<std::string>();
        ev.to = j.at("to").get<std::string>();
        ev.type = j.at("type").get<std::string>();
        ev.phase = phase_from_name(j.at("phase").get<std::string>());
        ev.channel =
            j.at("channel").get<std::string>() == "wireless" ? Channel::Wireless : Channel::Wired;
        ev.accounted = j.at("accounted").get<bool>();
        ev.bytes = j.at("bytes").get<std::size_t>();
        for (const auto& [name, value] : j.at("fields").items())
            ev.fields.emplace_back(name, from_hex(value.get<std::string>()));
    } else {
        ev.note = j.at("note").get<std::string>();
    }
    if (j.contains("ops")) {
        OpsDelta delta;
        for (const auto& [role, phases] : j.at("ops").items()) {
            for (const auto& [ph, counts] : phases.items())
                delta[role][ph] = counts_from_json(counts);
        }
        ev.ops = std::move(delta);
    }
    return ev;
}

bool Transcript::instrumented() const {
    for (const auto& ev : events_)
        if (ev.ops) return true;
    return false;
}

std::string Transcript::to_jsonl() const {
    std::string out;
    for (const auto& ev : events_) {
        out += ev.to_json_line();
        out += '\n';
    }
    return out;
}

OpsDelta diff_meters(const Meter& before, const Meter& after) {
    OpsDelta delta;
    for (std::size_t r = 0; r < kRoleCount; ++r) {
        for (std::size_t p = 0; p < kPhaseCount; ++p) {
            const auto role = static_cast<Role>(r);
            const auto phase = static_cast<Phase>(p);
            const PrimitiveCounts& b = before.at(role, phase);
            const PrimitiveCounts& a = after.at(role, phase);
            PrimitiveCounts d;
            bool any = false;
            for (std::size_t i = 0; i < kPrimitiveCount; ++i) {
                d.ops[i] = a.ops[i] - b.ops[i];
                any = any || d.ops[i] != 0;
            }
            if (any) delta[role_name(role)][phase_name(phase)] = d;
        }
    }
    return delta;
}

}  // namespace dwpt
