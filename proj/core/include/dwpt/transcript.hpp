#pragma once

#include "dwpt/message.hpp"
#include "dwpt/meter.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dwpt {

enum class Channel : std::uint8_t { Wireless, Wired };
std::string channel_name(Channel c);

/// Per-event primitive deltas keyed (role, phase).
using OpsDelta = std::map<std::string, std::map<std::string, PrimitiveCounts>>;

/// One wire event or bookkeeping note. Message events carry the delivered
/// field bytes; note events mark session boundaries and verdicts so
/// trailing computation (key finalization) stays attributed.
struct TranscriptEvent {
    std::uint64_t step = 0;
    std::string kind;  // "message" or "note"
    std::string from;
    std::string to;
    std::string type;  // message type, or the note label
    Phase phase = Phase::Auth;
    Channel channel = Channel::Wireless;
    bool accounted = false;
    std::uint64_t session = 0;
    std::size_t bytes = 0;
    std::vector<std::pair<std::string, Bytes>> fields;
    std::optional<OpsDelta> ops;
    std::string note;

    std::string to_json_line() const;
    static TranscriptEvent from_json_line(const std::string& line);
};

class Transcript {
public:
    void add(TranscriptEvent ev) { events_.push_back(std::move(ev)); }
    const std::vector<TranscriptEvent>& events() const { return events_; }
    std::uint64_t next_step() const { return events_.size(); }
    bool instrumented() const;

    /// JSON Lines body (events only; the scenario runner prepends its
    /// header line).
    std::string to_jsonl() const;

private:
    std::vector<TranscriptEvent> events_;
};

OpsDelta diff_meters(const Meter& before, const Meter& after);

}  // namespace dwpt
