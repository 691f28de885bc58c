// The growing causal set of spacetime events. Every actualized transaction
// contributes an emission and an absorption event plus the interval link
// between them; successive events at the same system are chained with
// worldline links. Events and links are append-only; order truth is
// reachability through links, never tick arithmetic.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rti/substratum.hpp"

namespace rti {

enum class EventKind { Emission, Absorption };

std::string to_string(EventKind k);

struct Event {
    std::uint64_t id = 0;
    EventKind kind = EventKind::Emission;
    std::string system_id; // emitter for emissions, absorber for absorptions
    std::int64_t tick = 0;
};

struct Link {
    std::uint64_t cause = 0;
    std::uint64_t effect = 0;
    bool operator==(const Link&) const = default;
};

enum class CausetFormat { Dot, Json };

struct InvariantReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

class CausalSet {
  public:
    // Appends the transaction's two events and links. The emission-to-
    // absorption interval comes first, then worldline links from each
    // system's latest prior event. Throws DuplicateEvent if either event id
    // is already present; CycleDetected if the new links would close a loop
    // (unreachable through this interface, but checked — the set must never
    // go bad silently).
    void add_transaction(const Transaction& t);

    // True iff `effect` is reachable from `cause` through one or more
    // links. Irreflexive by construction. Throws UnknownEvent.
    bool precedes(std::uint64_t cause, std::uint64_t effect) const;

    // Audits the whole structure: acyclicity, irreflexive closure,
    // emission-before-absorption for every recorded interval, and the
    // append-only watermark. Violations are reported, not thrown.
    InvariantReport check_invariants() const;

    std::string export_as(CausetFormat format) const;

    const std::vector<Event>& events() const { return events_; }
    const std::vector<Link>& links() const { return links_; }
    bool contains(std::uint64_t event_id) const;

  private:
    std::vector<Event> events_; // ordered by id (ids are assigned monotonically)
    std::vector<Link> links_;
    std::vector<std::uint64_t> intervals_; // indices into links_: the emission->absorption pairs
    std::size_t watermark_ = 0;            // high-water event count; must never exceed size
    // adjacency_[i] lists indices (into events_) reachable in one hop from
    // events_[i]; rebuilt incrementally as links append.
    std::vector<std::vector<std::size_t>> adjacency_;

    std::size_t index_of(std::uint64_t event_id) const; // throws UnknownEvent
    bool reachable(std::size_t from, std::size_t to) const;
    void append_link(std::uint64_t cause, std::uint64_t effect, bool is_interval);
};

} // namespace rti
