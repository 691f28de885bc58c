#include "rti/causet.hpp"

#include <algorithm>
#include <sstream>

#include "rti/errors.hpp"

namespace rti {

std::string to_string(EventKind k) {
    return k == EventKind::Emission ? "emission" : "absorption";
}

bool CausalSet::contains(std::uint64_t event_id) const {
    // Ids are appended in increasing order, so binary search applies.
    const auto it = std::lower_bound(events_.begin(), events_.end(), event_id,
                                     [](const Event& e, std::uint64_t id) { return e.id < id; });
    return it != events_.end() && it->id == event_id;
}

std::size_t CausalSet::index_of(std::uint64_t event_id) const {
    const auto it = std::lower_bound(events_.begin(), events_.end(), event_id,
                                     [](const Event& e, std::uint64_t id) { return e.id < id; });
    if (it == events_.end() || it->id != event_id) {
        throw SimError(ErrorCode::UnknownEvent,
                       "event " + std::to_string(event_id) + " is not in the causal set");
    }
    return static_cast<std::size_t>(it - events_.begin());
}

bool CausalSet::reachable(std::size_t from, std::size_t to) const {
    // Plain DFS over the one-hop adjacency. The sets we grow stay small
    // enough (a few thousand events) that this beats maintaining a closure.
    std::vector<std::size_t> stack{from};
    std::vector<bool> seen(events_.size(), false);
    while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        for (std::size_t next : adjacency_[cur]) {
            if (next == to) return true;
            if (!seen[next]) {
                seen[next] = true;
                stack.push_back(next);
            }
        }
    }
    return false;
}

void CausalSet::append_link(std::uint64_t cause, std::uint64_t effect, bool is_interval) {
    const std::size_t ci = index_of(cause);
    const std::size_t ei = index_of(effect);
    if (ci == ei || reachable(ei, ci)) {
        throw SimError(ErrorCode::CycleDetected,
                       "link " + std::to_string(cause) + "->" + std::to_string(effect) +
                           " would close a causal loop");
    }
    if (is_interval) intervals_.push_back(links_.size());
    links_.push_back({cause, effect});
    adjacency_[ci].push_back(ei);
}

void CausalSet::add_transaction(const Transaction& t) {
    if (contains(t.emission_event) || contains(t.absorption_event) ||
        t.emission_event == t.absorption_event) {
        throw SimError(ErrorCode::DuplicateEvent,
                       "transaction events " + std::to_string(t.emission_event) + "/" +
                           std::to_string(t.absorption_event) + " already recorded");
    }
    if (!events_.empty() && (t.emission_event <= events_.back().id ||
                             t.absorption_event <= events_.back().id)) {
        // Ids must grow monotonically or the sorted-by-id storage breaks.
        throw SimError(ErrorCode::DuplicateEvent, "event ids must increase monotonically");
    }
    if (t.absorption_event < t.emission_event) {
        throw SimError(ErrorCode::InvalidScenario,
                       "absorption event id must follow its emission event id");
    }

    // Find each system's latest prior event before appending, so the
    // worldline chains to the true predecessor.
    std::optional<std::uint64_t> prior_emitter_event;
    std::optional<std::uint64_t> prior_absorber_event;
    for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
        if (!prior_emitter_event && it->system_id == t.emitter_id) prior_emitter_event = it->id;
        if (!prior_absorber_event && it->system_id == t.winner_absorber_id) {
            prior_absorber_event = it->id;
        }
        if (prior_emitter_event && prior_absorber_event) break;
    }

    events_.push_back({t.emission_event, EventKind::Emission, t.emitter_id, t.tick});
    events_.push_back({t.absorption_event, EventKind::Absorption, t.winner_absorber_id, t.tick});
    adjacency_.resize(events_.size());

    append_link(t.emission_event, t.absorption_event, true);
    if (prior_emitter_event) append_link(*prior_emitter_event, t.emission_event, false);
    if (prior_absorber_event) append_link(*prior_absorber_event, t.absorption_event, false);
    watermark_ = events_.size();
}

bool CausalSet::precedes(std::uint64_t cause, std::uint64_t effect) const {
    const std::size_t ci = index_of(cause);
    const std::size_t ei = index_of(effect);
    if (ci == ei) return false;
    return reachable(ci, ei);
}

InvariantReport CausalSet::check_invariants() const {
    InvariantReport report;

    if (events_.size() < watermark_) {
        report.violations.push_back("event count fell below the append-only watermark");
    }

    // Kahn's algorithm: if some events never reach in-degree zero, the link
    // relation has a cycle (which also covers irreflexivity of the closure).
    std::vector<std::size_t> indegree(events_.size(), 0);
    for (const auto& link : links_) {
        std::size_t ei = 0;
        try {
            index_of(link.cause);
            ei = index_of(link.effect);
        } catch (const SimError&) {
            report.violations.push_back("link references an unknown event");
            continue;
        }
        ++indegree[ei];
    }
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < events_.size(); ++i) {
        if (indegree[i] == 0) frontier.push_back(i);
    }
    std::size_t ordered = 0;
    while (!frontier.empty()) {
        const std::size_t cur = frontier.back();
        frontier.pop_back();
        ++ordered;
        for (std::size_t next : adjacency_[cur]) {
            if (--indegree[next] == 0) frontier.push_back(next);
        }
    }
    if (ordered != events_.size()) {
        report.violations.push_back(std::string(to_string(ErrorCode::CycleDetected)) +
                                    ": link relation is not acyclic");
    }

    for (std::size_t li : intervals_) {
        const auto& link = links_[li];
        const Event& em = events_[index_of(link.cause)];
        const Event& ab = events_[index_of(link.effect)];
        if (em.kind != EventKind::Emission || ab.kind != EventKind::Absorption) {
            report.violations.push_back("interval link does not run emission->absorption");
        }
        if (ab.tick < em.tick) {
            report.violations.push_back("absorption tick precedes its emission tick");
        }
        if (ordered == events_.size() && !precedes(link.cause, link.effect)) {
            report.violations.push_back("emission does not precede its absorption");
        }
    }
    return report;
}

std::string CausalSet::export_as(CausetFormat format) const {
    std::ostringstream out;
    if (format == CausetFormat::Dot) {
        out << "digraph causet {\n";
        for (const auto& e : events_) {
            out << "  e" << e.id << " [label=\"" << to_string(e.kind) << "@" << e.tick
                << "\"];\n";
        }
        for (const auto& l : links_) {
            out << "  e" << l.cause << " -> e" << l.effect << ";\n";
        }
        out << "}\n";
        return out.str();
    }
    out << "{\n  \"events\": [";
    for (std::size_t i = 0; i < events_.size(); ++i) {
        const auto& e = events_[i];
        out << (i ? ",\n    " : "\n    ") << "{\"id\": " << e.id << ", \"kind\": \""
            << to_string(e.kind) << "\", \"system\": \"" << e.system_id
            << "\", \"tick\": " << e.tick << "}";
    }
    out << (events_.empty() ? "]" : "\n  ]") << ",\n  \"links\": [";
    for (std::size_t i = 0; i < links_.size(); ++i) {
        out << (i ? ",\n    " : "\n    ") << "{\"cause\": " << links_[i].cause
            << ", \"effect\": " << links_[i].effect << "}";
    }
    out << (links_.empty() ? "]" : "\n  ]") << "\n}\n";
    return out.str();
}

} // namespace rti
