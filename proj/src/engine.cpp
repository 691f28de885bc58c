#include "rti/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <set>
#include <thread>

#include "rti/amplitudes.hpp"
#include "rti/errors.hpp"
#include "rti/kernels.hpp"

namespace rti {

namespace {

// offset-th free ordinal when `excited` (sorted ascending) are occupied.
u128 nth_free_ordinal(const std::vector<u128>& excited, u128 offset) {
    u128 candidate = offset;
    for (u128 e : excited) {
        if (e <= candidate)
            ++candidate;
        else
            break;
    }
    return candidate;
}

bool add_overflows(u128 a, u128 b) { return a + b < a; }

} // namespace

void Scenario::validate() const {
    validate_coupling(alpha);
    if (max_ticks < 1) throw SimError(ErrorCode::InvalidScenario, "max_ticks must be >= 1");
    if (!(energy_tol >= 0.0) || energy_tol >= 0.5) {
        throw SimError(ErrorCode::InvalidScenario, "energy_tol must lie in [0, 0.5)");
    }
    if (emitters.empty()) {
        throw SimError(ErrorCode::InvalidScenario, "scenario needs at least one emitter");
    }
    if (channels.empty()) {
        throw SimError(ErrorCode::InvalidScenario, "scenario needs at least one channel");
    }

    std::set<std::string> channel_ids;
    double total = 0.0;
    for (const auto& ch : channels) {
        if (ch.id.empty() || !channel_ids.insert(ch.id).second) {
            throw SimError(ErrorCode::InvalidScenario, "channel ids must be unique and nonempty");
        }
        total += std::norm(ch.amplitude);
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw SimError(ErrorCode::NormalizationError, "channel amplitudes have zero total weight");
    }

    std::set<std::string> system_ids;
    auto claim_id = [&](const std::string& id, const char* what) {
        if (id.empty() || !system_ids.insert(id).second) {
            throw SimError(ErrorCode::InvalidScenario,
                           std::string(what) + " ids must be unique and nonempty, got '" + id +
                               "'");
        }
    };
    for (const auto& e : emitters) {
        claim_id(e.id, "emitter");
        e.spec.validate();
        if (e.current_level < 0 || e.current_level > e.spec.top_level()) {
            throw SimError(ErrorCode::InvalidScenario,
                           "emitter '" + e.id + "' initial level out of range");
        }
    }
    auto claim_channel = [&](const std::string& ch, const std::string& owner) {
        if (!channel_ids.count(ch)) {
            throw SimError(ErrorCode::InvalidScenario,
                           "'" + owner + "' references unknown channel '" + ch + "'");
        }
    };
    for (const auto& a : absorbers) {
        claim_id(a.id, "absorber");
        a.spec.validate();
        if (a.current_level < 0 || a.current_level > a.spec.top_level()) {
            throw SimError(ErrorCode::InvalidScenario,
                           "absorber '" + a.id + "' initial level out of range");
        }
        claim_channel(a.channel, a.id);
    }
    for (const auto& d : detectors) {
        claim_id(d.id, "detector");
        claim_channel(d.channel, d.id);
        if (!(d.gap > 0.0) || !std::isfinite(d.gap)) {
            throw SimError(ErrorCode::InvalidScenario,
                           "detector '" + d.id + "' gap must be finite and > 0");
        }
    }
    if (weight_by_amplitude && !(interaction_tau > 0.0)) {
        throw SimError(ErrorCode::InvalidScenario,
                       "interaction_tau must be > 0 when amplitude weighting is on");
    }
}

CompiledScenario compile(const Scenario& s) {
    s.validate();
    CompiledScenario cs;
    cs.scenario = s;

    // Normalize channel amplitudes once so collapse weights are |a|^2 with
    // unit total before pruning.
    double total = 0.0;
    for (const auto& ch : cs.scenario.channels) total += std::norm(ch.amplitude);
    const double scale = 1.0 / std::sqrt(total);
    if (std::abs(total - 1.0) > 1e-12) {
        for (auto& ch : cs.scenario.channels) ch.amplitude *= scale;
    }

    cs.emitter_order.resize(s.emitters.size());
    for (std::size_t i = 0; i < cs.emitter_order.size(); ++i) cs.emitter_order[i] = i;
    std::sort(cs.emitter_order.begin(), cs.emitter_order.end(), [&](std::size_t a, std::size_t b) {
        return s.emitters[a].id < s.emitters[b].id;
    });

    for (std::size_t i = 0; i < s.absorbers.size(); ++i) {
        const auto& a = s.absorbers[i];
        cs.units.push_back({Unit::Kind::Individual, i, a.id, a.channel, a.activation_tick});
        cs.last_activation = std::max(cs.last_activation, a.activation_tick);
    }
    for (std::size_t i = 0; i < s.detectors.size(); ++i) {
        const auto& d = s.detectors[i];
        cs.units.push_back({Unit::Kind::Block, i, d.id, d.channel, d.activation_tick});
        cs.last_activation = std::max(cs.last_activation, d.activation_tick);
    }
    cs.gate_threshold = threshold_from_prob(s.alpha);
    return cs;
}

std::string to_string(TrajectoryStatus s) {
    switch (s) {
    case TrajectoryStatus::Running: return "running";
    case TrajectoryStatus::Detected: return "detected";
    case TrajectoryStatus::MaxTicks: return "max-ticks";
    case TrajectoryStatus::NoAbsorbers: return "no-absorbers";
    case TrajectoryStatus::Inert: return "inert";
    }
    return "?";
}

Trajectory::Trajectory(const CompiledScenario& cs, std::uint64_t run_index, bool record_offers)
    : cs_(cs), run_(run_index), record_offers_(record_offers) {
    emitter_levels_.reserve(cs.scenario.emitters.size());
    for (const auto& e : cs.scenario.emitters) emitter_levels_.push_back(e.current_level);
    absorber_levels_.reserve(cs.scenario.absorbers.size());
    for (const auto& a : cs.scenario.absorbers) absorber_levels_.push_back(a.current_level);
    blocks_.resize(cs.scenario.detectors.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        blocks_[i].exhausted = cs.scenario.detectors[i].n.is_zero();
    }
    plans_.resize(cs.emitter_order.size());
}

int Trajectory::emitter_level(std::size_t emitter_index) const {
    return emitter_levels_.at(emitter_index);
}

int Trajectory::absorber_level(std::size_t absorber_index) const {
    return absorber_levels_.at(absorber_index);
}

u128 Trajectory::block_excited(std::size_t detector_index) const {
    return blocks_.at(detector_index).excited.size();
}

double Trajectory::total_energy() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < emitter_levels_.size(); ++i) {
        sum += cs_.scenario.emitters[i].spec.energy(emitter_levels_[i]);
    }
    for (std::size_t i = 0; i < absorber_levels_.size(); ++i) {
        sum += cs_.scenario.absorbers[i].spec.energy(absorber_levels_[i]);
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        sum += static_cast<double>(static_cast<std::uint64_t>(blocks_[i].excited.size())) *
               cs_.scenario.detectors[i].gap;
    }
    return sum;
}

bool Trajectory::unit_active(const Unit& u, std::int64_t tick) const {
    return tick >= u.activation_tick;
}

u128 Trajectory::block_remaining(std::size_t detector_index) const {
    const auto& d = cs_.scenario.detectors[detector_index];
    const auto& b = blocks_[detector_index];
    if (!d.n.fits_u128()) return ~static_cast<u128>(0); // effectively inexhaustible
    const u128 taken = b.excited.size();
    return d.n.as_u128() - taken;
}

void Trajectory::rebuild_view(std::int64_t tick) {
    // The active-unit set only ever grows, and is constant past the last
    // activation tick; key the cached view on the clamped tick.
    const std::int64_t key = std::min(tick, cs_.last_activation);
    if (key == view_built_for_ && view_epoch_ == epoch_) return;

    std::vector<std::size_t> active;
    for (std::size_t u = 0; u < cs_.units.size(); ++u) {
        if (unit_active(cs_.units[u], tick)) active.push_back(u);
    }
    if (active != view_units_) ++epoch_; // composition changed: plans are stale

    view_units_ = std::move(active);
    view_.clear();
    view_.reserve(view_units_.size());
    for (std::size_t u : view_units_) {
        const Unit& unit = cs_.units[u];
        if (unit.kind == Unit::Kind::Individual) {
            AbsorberState a = cs_.scenario.absorbers[unit.source];
            a.current_level = absorber_levels_[unit.source];
            view_.push_back(std::move(a));
        } else {
            AbsorberState rep = cs_.scenario.detectors[unit.source].representative();
            // A drained block behaves like a fully excited absorber.
            if (blocks_[unit.source].exhausted) rep.current_level = rep.spec.top_level();
            view_.push_back(std::move(rep));
        }
    }
    view_built_for_ = key;
    view_epoch_ = epoch_;
}

const Trajectory::EmissionPlan& Trajectory::plan_for(std::size_t order_slot) {
    auto& slot = plans_[order_slot];
    if (slot && slot->epoch == epoch_) return *slot;

    const std::size_t ei = cs_.emitter_order[order_slot];
    EmitterState emitter = cs_.scenario.emitters[ei];
    emitter.current_level = emitter_levels_[ei];

    EmissionPlan plan;
    plan.epoch = epoch_;
    plan.blocked = true;

    // Candidate downward transitions from the current level, nearest target
    // first; the first one with absorber support wins. An emitter whose
    // every candidate lacks absorbers cannot emit at all this epoch.
    std::vector<TransitionPair> candidates;
    for (const auto& pair : emitter.spec.allowed) {
        if (pair.from == emitter.current_level && pair.to < pair.from) candidates.push_back(pair);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](TransitionPair a, TransitionPair b) { return a.to > b.to; });

    for (const auto& gap : candidates) {
        OfferWave ow;
        try {
            ow = mk_offer_wave(emitter, gap, cs_.scenario.channels, view_,
                               cs_.scenario.energy_tol);
        } catch (const SimError& e) {
            if (e.code() == ErrorCode::NoAbsorbers) continue;
            throw;
        }
        plan.blocked = false;
        plan.gap = gap;
        plan.offer = std::move(ow);
        break;
    }
    if (plan.blocked) {
        slot = std::move(plan);
        return *slot;
    }

    const double m_elem = emitter.spec.matrix_element(plan.gap);
    for (std::size_t ci = 0; ci < plan.offer.components.size(); ++ci) {
        const Channel& comp = plan.offer.components[ci];
        PlanChannel pc;
        pc.component = ci;
        pc.weight = std::norm(comp.amplitude);
        for (std::size_t v = 0; v < view_.size(); ++v) {
            if (view_[v].channel != comp.id) continue;
            const auto up = matching_upward(view_[v], plan.offer.omega, cs_.scenario.energy_tol);
            if (!up) continue;
            if (pc.units.empty() && cs_.scenario.weight_by_amplitude) {
                // Detuning of this channel's representative absorber.
                TransitionParams tp;
                tp.matrix_element = m_elem;
                tp.e_initial = view_[v].spec.energy(up->from);
                tp.e_final = view_[v].spec.energy(up->to);
                tp.omega = plan.offer.omega;
                tp.sign = TransitionSign::Absorption;
                tp.tau = cs_.scenario.interaction_tau;
                pc.weight *= transition_probability(tp).value;
            }
            pc.units.push_back(view_units_[v]);
        }
        // mk_offer_wave pruned against the same view, so support is certain.
        assert(!pc.units.empty());
        plan.channels.push_back(std::move(pc));
    }
    slot = std::move(plan);
    return *slot;
}

bool Trajectory::gate_unit(std::size_t unit_index, std::int64_t tick, std::uint64_t emitter_ord,
                           CounterRng& attempt_rng) {
    const Unit& unit = cs_.units[unit_index];
    const double alpha = cs_.scenario.alpha;
    if (unit.kind == Unit::Kind::Individual) {
        if (alpha >= 1.0) return true;
        return attempt_rng.next_u64() < cs_.gate_threshold;
    }

    const auto& d = cs_.scenario.detectors[unit.source];
    const auto& b = blocks_[unit.source];
    if (b.exhausted) return false;
    if (alpha >= 1.0) return true;

    const std::uint64_t block_key =
        derive_key({cs_.scenario.seed, kSaltRun, run_, kSaltBlock, static_cast<std::uint64_t>(tick),
                    emitter_ord, static_cast<std::uint64_t>(unit_index)});

    if (d.n.fits_u64() && d.n.as_u64() <= cs_.materialize_cutoff) {
        // Per-constituent Bernoulli gate over the whole block, then remove
        // hits belonging to already-excited constituents. The excited list
        // stays tiny, so the correction is a handful of scalar probes.
        const std::uint64_t n = d.n.as_u64();
        std::uint64_t count = kernels::gate_count(block_key, cs_.gate_threshold, n);
        for (u128 e : b.excited) {
            const std::uint64_t ord = static_cast<std::uint64_t>(e);
            if (mix64(block_key + ord * kGamma) < cs_.gate_threshold) --count;
        }
        return count > 0;
    }

    // Analytic gate: one draw against 1 - (1-alpha)^remaining.
    CounterRng rng(block_key);
    const double remaining =
        d.n.approx() - static_cast<double>(static_cast<std::uint64_t>(b.excited.size()));
    const double p = -std::expm1(remaining * std::log1p(-alpha));
    return rng.next_double() < p;
}

std::string Trajectory::actualize(const EmissionPlan& plan, std::size_t emitter_index,
                                  std::size_t winner_unit, std::int64_t tick,
                                  CounterRng& collapse_rng, Transaction& out) {
    const Unit& unit = cs_.units[winner_unit];
    const double omega = plan.offer.omega;

    std::string winner_id;
    if (unit.kind == Unit::Kind::Individual) {
        AbsorberState a = cs_.scenario.absorbers[unit.source];
        a.current_level = absorber_levels_[unit.source];
        const auto up = matching_upward(a, omega, cs_.scenario.energy_tol);
        assert(up); // collapse only reaches eligible units
        if (!up) {
            throw SimError(ErrorCode::EnergyMismatch,
                           "winner '" + unit.id + "' lost eligibility before actualization");
        }
        absorber_levels_[unit.source] = up->to;
        winner_id = unit.id;
    } else {
        auto& b = blocks_[unit.source];
        const auto& d = cs_.scenario.detectors[unit.source];
        u128 ordinal = 0;
        if (d.n.fits_u128()) {
            const u128 offset = collapse_rng.next_below(block_remaining(unit.source));
            ordinal = nth_free_ordinal(b.excited, offset);
        } else {
            // Counts beyond 128 bits: the constituent label is drawn from a
            // 126-bit space (collision with the handful of excited ordinals
            // is re-drawn). Only the label needs the width; statistics are
            // channel-level.
            const u128 mask = (static_cast<u128>(1) << 126) - 1;
            do {
                ordinal = collapse_rng.next_u128() & mask;
            } while (std::binary_search(b.excited.begin(), b.excited.end(), ordinal));
        }
        b.excited.insert(std::lower_bound(b.excited.begin(), b.excited.end(), ordinal), ordinal);
        if (d.n.fits_u128() && static_cast<u128>(b.excited.size()) == d.n.as_u128()) {
            b.exhausted = true;
        }
        winner_id = unit.id + "#" + u128_to_string(ordinal);
    }

    emitter_levels_[emitter_index] = plan.gap.to;

    out.tick = tick;
    out.emitter_id = cs_.scenario.emitters[emitter_index].id;
    out.winner_absorber_id = winner_id;
    out.omega = omega;
    out.emission_event = next_event_++;
    out.absorption_event = next_event_++;
    causet_.add_transaction(out);
    transactions_.push_back(out);
    ++epoch_; // state changed; every cached plan is stale
    return winner_id;
}

TickOutcome Trajectory::step() {
    TickOutcome outcome;
    if (status_ != TrajectoryStatus::Running) {
        outcome.tick = tick_;
        return outcome;
    }
    ++tick_;
    outcome.tick = tick_;
    rebuild_view(tick_);

    bool any_excited = false;
    bool any_attempt = false;

    for (std::size_t slot = 0; slot < cs_.emitter_order.size(); ++slot) {
        const std::size_t ei = cs_.emitter_order[slot];
        if (emitter_levels_[ei] == 0) continue;
        any_excited = true;

        const EmissionPlan& plan = plan_for(slot);
        if (plan.blocked) continue;
        any_attempt = true;

        const std::uint64_t attempt_key =
            derive_key({cs_.scenario.seed, kSaltRun, run_, kSaltAttempt,
                        static_cast<std::uint64_t>(tick_), static_cast<std::uint64_t>(slot)});
        CounterRng attempt_rng(attempt_key);

        std::vector<std::size_t> responder_units;
        for (const auto& pc : plan.channels) {
            const Channel& comp = plan.offer.components[pc.component];
            for (std::size_t u : pc.units) {
                if (!gate_unit(u, tick_, slot, attempt_rng)) continue;
                responder_units.push_back(u);
                outcome.cw_set.push_back(
                    {cs_.units[u].id, comp.id, std::conj(comp.amplitude)});
            }
        }
        // The offer stands for this tick whether or not anything responds.
        if (record_offers_) outcome.offers.push_back(plan.offer);

        if (responder_units.empty()) continue; // no confirmation: nothing emitted this tick

        // Collapse: Born-weighted channel, uniform constituent within it.
        const std::uint64_t collapse_key =
            derive_key({cs_.scenario.seed, kSaltRun, run_, kSaltCollapse,
                        static_cast<std::uint64_t>(tick_), static_cast<std::uint64_t>(slot)});
        CounterRng collapse_rng(collapse_key);

        double total_weight = 0.0;
        for (const auto& pc : plan.channels) total_weight += pc.weight;
        const double u_chan = collapse_rng.next_double() * total_weight;
        std::size_t chosen = plan.channels.size() - 1;
        double cum = 0.0;
        for (std::size_t i = 0; i < plan.channels.size(); ++i) {
            cum += plan.channels[i].weight;
            if (u_chan < cum) {
                chosen = i;
                break;
            }
        }
        const PlanChannel& pc = plan.channels[chosen];

        // Constituent totals per unit; u128 exact while it fits, long-double
        // weighted otherwise (astronomical blocks dominate anyway).
        u128 total = 0;
        bool exact = true;
        for (std::size_t u : pc.units) {
            const Unit& unit = cs_.units[u];
            const u128 add =
                unit.kind == Unit::Kind::Individual ? 1 : block_remaining(unit.source);
            if (!cs_.scenario.detectors.empty() && unit.kind == Unit::Kind::Block &&
                !cs_.scenario.detectors[unit.source].n.fits_u128()) {
                exact = false;
                break;
            }
            if (add_overflows(total, add)) {
                exact = false;
                break;
            }
            total += add;
        }

        std::size_t winner_unit = pc.units.back();
        if (exact) {
            u128 r = collapse_rng.next_below(total);
            for (std::size_t u : pc.units) {
                const Unit& unit = cs_.units[u];
                const u128 span =
                    unit.kind == Unit::Kind::Individual ? 1 : block_remaining(unit.source);
                if (r < span) {
                    winner_unit = u;
                    break;
                }
                r -= span;
            }
        } else {
            long double lt = 0.0L;
            for (std::size_t u : pc.units) {
                const Unit& unit = cs_.units[u];
                lt += unit.kind == Unit::Kind::Individual
                          ? 1.0L
                          : static_cast<long double>(
                                cs_.scenario.detectors[unit.source].n.approx());
            }
            const long double pick = static_cast<long double>(collapse_rng.next_double()) * lt;
            long double run_sum = 0.0L;
            for (std::size_t u : pc.units) {
                const Unit& unit = cs_.units[u];
                run_sum += unit.kind == Unit::Kind::Individual
                               ? 1.0L
                               : static_cast<long double>(
                                     cs_.scenario.detectors[unit.source].n.approx());
                if (pick < run_sum) {
                    winner_unit = u;
                    break;
                }
            }
        }

        Transaction tr;
        actualize(plan, ei, winner_unit, tick_, collapse_rng, tr);
        outcome.transaction = tr;
        outcome.detection = DetectionRecord{tick_, plan.offer.components[pc.component].id,
                                            cs_.units[winner_unit].id, tr.winner_absorber_id};

        for (std::size_t u : responder_units) {
            if (u == winner_unit) continue;
            outcome.nulls.push_back({tick_, cs_.units[u].id, cs_.units[u].channel});
        }
        break; // the measurement transition concludes the tick
    }

    if (!outcome.transaction) {
        if (!any_excited) {
            status_ = TrajectoryStatus::Inert;
        } else if (!any_attempt && tick_ >= cs_.last_activation) {
            status_ = TrajectoryStatus::NoAbsorbers;
        } else if (tick_ >= cs_.scenario.max_ticks) {
            status_ = TrajectoryStatus::MaxTicks;
        }
    } else if (tick_ >= cs_.scenario.max_ticks) {
        status_ = TrajectoryStatus::MaxTicks;
    }
    return outcome;
}

TrajectoryResult drive(Trajectory& t, StopPolicy policy) {
    TrajectoryResult result;
    while (t.status() == TrajectoryStatus::Running) {
        TickOutcome out = t.step();
        if (out.transaction) {
            if (!result.first_detection) result.first_detection = out.detection;
            result.transactions.push_back(*out.transaction);
        }
        result.nulls.insert(result.nulls.end(), out.nulls.begin(), out.nulls.end());
        if (policy == StopPolicy::FirstTransaction && out.transaction) {
            result.status = TrajectoryStatus::Detected;
            result.ticks_run = t.tick();
            return result;
        }
    }
    result.status = t.status();
    result.ticks_run = t.tick();
    return result;
}

TrajectoryResult run_trajectory(const CompiledScenario& cs, std::uint64_t run_index,
                                StopPolicy policy) {
    Trajectory t(cs, run_index);
    return drive(t, policy);
}

EnsembleResult run_ensemble(const Scenario& s, std::uint64_t runs, unsigned threads) {
    return run_ensemble(compile(s), runs, threads);
}

EnsembleResult run_ensemble(const CompiledScenario& cs, std::uint64_t runs, unsigned threads) {
    if (runs < 1) throw SimError(ErrorCode::InvalidScenario, "ensemble needs runs >= 1");

    EnsembleResult result;
    result.records.resize(runs);

    auto run_one = [&](std::uint64_t r) {
        Trajectory t(cs, r);
        TrajectoryResult tr = drive(t, StopPolicy::FirstTransaction);
        RunRecord& rec = result.records[r];
        rec.run = r;
        rec.status = tr.status;
        rec.ticks_run = tr.ticks_run;
        rec.detection = std::move(tr.first_detection);
        rec.nulls = std::move(tr.nulls);
        if (r == 0) result.first_run_causet = t.causet();
    };

    const unsigned workers = std::max(1u, threads);
    if (workers == 1 || runs == 1) {
        for (std::uint64_t r = 0; r < runs; ++r) run_one(r);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t r = next.fetch_add(1); r < runs; r = next.fetch_add(1)) {
                    run_one(r);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Sequential reduction in run order: the aggregate cannot depend on the
    // schedule above.
    EnsembleStats& stats = result.stats;
    stats.runs = runs;
    for (const auto& ch : cs.scenario.channels) stats.channels[ch.id];
    for (const auto& u : cs.units) stats.absorbers[u.id];

    std::uint64_t tick_sum = 0;
    for (const RunRecord& rec : result.records) {
        if (rec.detection) {
            ++stats.detected;
            tick_sum += static_cast<std::uint64_t>(rec.detection->tick);
            ++stats.channels[rec.detection->channel_id].detections;
            ++stats.absorbers[rec.detection->unit_id].detections;
        } else {
            ++stats.no_detection;
        }
        for (const auto& null : rec.nulls) ++stats.absorbers[null.absorber_id].nulls;
    }
    if (stats.detected > 0) {
        stats.mean_ticks_to_transaction =
            static_cast<double>(tick_sum) / static_cast<double>(stats.detected);
        for (auto& [id, tally] : stats.channels) {
            tally.frequency =
                static_cast<double>(tally.detections) / static_cast<double>(stats.detected);
        }
        for (auto& [id, tally] : stats.absorbers) {
            tally.frequency =
                static_cast<double>(tally.detections) / static_cast<double>(stats.detected);
        }
    }
    return result;
}

std::vector<std::string> cw_trials(std::span<const std::string> eligible, double alpha,
                                   CounterRng& rng) {
    validate_coupling(alpha);
    const std::uint64_t threshold = threshold_from_prob(alpha);
    std::vector<std::string> responders;
    for (const auto& id : eligible) {
        if (alpha >= 1.0 || rng.next_u64() < threshold) responders.push_back(id);
    }
    return responders;
}

std::string collapse(const OfferWave& ow, const std::vector<ChannelEligibility>& eligible,
                     const std::vector<std::string>& responders, CounterRng& rng) {
    if (responders.empty()) {
        throw SimError(ErrorCode::NoAbsorbers,
                       "collapse requires at least one confirmation to have fired");
    }
    struct Group {
        const ChannelEligibility* elig;
        double weight;
    };
    std::vector<Group> groups;
    double total = 0.0;
    for (const auto& comp : ow.components) {
        for (const auto& group : eligible) {
            if (group.channel_id == comp.id && !group.absorber_ids.empty()) {
                groups.push_back({&group, std::norm(comp.amplitude)});
                total += groups.back().weight;
            }
        }
    }
    if (groups.empty() || !(total > 0.0)) {
        throw SimError(ErrorCode::NoAbsorbers, "no offer component hosts an eligible absorber");
    }
    const double pick = rng.next_double() * total;
    std::size_t chosen = groups.size() - 1;
    double cum = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        cum += groups[i].weight;
        if (pick < cum) {
            chosen = i;
            break;
        }
    }
    const auto& ids = groups[chosen].elig->absorber_ids;
    const u128 index = rng.next_below(static_cast<u128>(ids.size()));
    return ids[static_cast<std::size_t>(index)];
}

} // namespace rti
