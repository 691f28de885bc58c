// The stochastic state machine of the measurement transition.
//
// A trajectory ticks forward in unit time steps. Each tick, every excited
// emitter attempts one emission: the offer wave is constructed over the
// channels that reach eligible absorbers, each eligible constituent
// independently generates a confirmation with probability alpha, and as soon
// as at least one confirmation exists anywhere, the transition fires: a
// winner is drawn Born-weighted across channels (uniformly among a channel's
// constituents) and conserved energy moves from the emitter to the winner.
// Responders that did not win are recorded as null measurements.
//
// Every random draw is a pure function of (seed, run, tick, emitter, salt,
// index), so ensembles are bit-identical regardless of thread count.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rti/causet.hpp"
#include "rti/rng.hpp"
#include "rti/substratum.hpp"

namespace rti {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

// Detector blocks up to this many constituents draw one Bernoulli per
// constituent through the gate kernels; larger blocks switch to the analytic
// gate (one draw against 1-(1-alpha)^n). The two paths agree statistically;
// tests lower the cutoff to overlap them.
inline constexpr std::uint64_t kMaterializeCutoff = 10'000'000;

struct Scenario {
    double alpha = 0.007;
    double energy_tol = kDefaultEnergyTol;
    std::int64_t max_ticks = 1;
    std::uint64_t seed = kDefaultSeed;
    // True when the seed was stated explicitly (scenario file), so callers
    // know whether lower-precedence sources (environment) may still apply.
    bool seed_explicit = false;
    std::vector<Channel> channels;
    std::vector<EmitterState> emitters;
    std::vector<AbsorberState> absorbers;
    std::vector<DetectorSpec> detectors;
    // When set, collapse channel weights pick up the factor |c(tau)|^2 from
    // the transition amplitude at each channel's detuning. Off by default:
    // eligible absorbers are near resonance, where the factor is flat.
    bool weight_by_amplitude = false;
    double interaction_tau = 1.0;

    // Structural checks only (ids, references, ranges). Throws SimError.
    void validate() const;
};

// One absorbing unit: either an individual absorber or a whole detector
// block. Bookkeeping (confirmations, nulls, detection tallies) happens at
// unit granularity; block constituents surface only as transaction winners.
struct Unit {
    enum class Kind { Individual, Block };
    Kind kind = Kind::Individual;
    std::size_t source = 0; // index into scenario.absorbers or .detectors
    std::string id;
    std::string channel;
    std::int64_t activation_tick = 0;
};

struct CompiledScenario {
    Scenario scenario;
    std::vector<std::size_t> emitter_order; // indices into scenario.emitters, by id
    std::vector<Unit> units;                // individuals first, then blocks
    std::uint64_t gate_threshold = 0;       // u64 acceptance bound for alpha
    std::int64_t last_activation = 0;       // latest activation tick anywhere
    std::uint64_t materialize_cutoff = kMaterializeCutoff;
};

CompiledScenario compile(const Scenario& s);

struct DetectionRecord {
    std::int64_t tick = 0;
    std::string channel_id;
    std::string unit_id;   // aggregation identity (detector id for blocks)
    std::string winner_id; // constituent identity ("<detector>#<ordinal>")
};

struct TickOutcome {
    std::int64_t tick = 0;
    std::vector<ConfirmationWave> cw_set;
    std::optional<Transaction> transaction;
    std::optional<DetectionRecord> detection; // set alongside transaction
    std::vector<NullMeasurement> nulls;
    // Every offer constructed this tick, in attempt order; populated only
    // when the trajectory records offers (audit mode).
    std::vector<OfferWave> offers;
};

enum class TrajectoryStatus {
    Running,     // more ticks available
    Detected,    // stopped at first transaction (FirstTransaction policy)
    MaxTicks,    // tick budget exhausted
    NoAbsorbers, // an excited emitter remains but nothing can ever absorb
    Inert,       // no excited emitter remains
};

std::string to_string(TrajectoryStatus s);

enum class StopPolicy {
    FirstTransaction, // ensemble default: a run ends when the gate fires
    Exhaustion,       // keep going until inert or out of ticks
};

// Mutable per-run state plus the per-tick step function. Owns its causal
// set. Strictly sequential; distinct runs never share state.
class Trajectory {
  public:
    Trajectory(const CompiledScenario& cs, std::uint64_t run_index, bool record_offers = false);

    // Advances one tick. Emitters attempt in id order; the first attempt
    // whose confirmation set is nonempty actualizes a transaction and
    // concludes the tick.
    TickOutcome step();

    std::int64_t tick() const { return tick_; }
    TrajectoryStatus status() const { return status_; }
    const CausalSet& causet() const { return causet_; }
    const std::vector<Transaction>& transactions() const { return transactions_; }

    // Total energy in emitters plus absorbed quanta; conserved across
    // transactions (audited by tests).
    double total_energy() const;

    int emitter_level(std::size_t emitter_index) const;
    int absorber_level(std::size_t absorber_index) const;
    u128 block_excited(std::size_t detector_index) const;

  private:
    struct BlockState {
        std::vector<u128> excited; // sorted ordinals; small (<= transactions)
        bool exhausted = false;
    };
    struct PlanChannel {
        std::size_t component = 0;           // index into plan offer components
        double weight = 0.0;                 // |a|^2, optionally amplitude-modulated
        std::vector<std::size_t> units;      // unit indices eligible on this channel
    };
    struct EmissionPlan {
        std::uint64_t epoch = 0;
        bool blocked = false; // no gap with absorber support
        TransitionPair gap{0, 0};
        OfferWave offer;
        std::vector<PlanChannel> channels;
    };

    const CompiledScenario& cs_;
    std::uint64_t run_ = 0;
    bool record_offers_ = false;
    std::int64_t tick_ = 0; // last completed tick; first step() runs tick 1
    TrajectoryStatus status_ = TrajectoryStatus::Running;
    std::uint64_t next_event_ = 1;
    std::uint64_t epoch_ = 1; // bumped by any state change; invalidates plans
    std::vector<int> emitter_levels_;
    std::vector<int> absorber_levels_;
    std::vector<BlockState> blocks_;
    std::vector<AbsorberState> view_;          // active units as absorber states
    std::vector<std::size_t> view_units_;      // view index -> unit index
    std::int64_t view_built_for_ = -1;         // activation watermark of view_
    std::uint64_t view_epoch_ = 0;
    std::vector<std::optional<EmissionPlan>> plans_; // per emitter-order slot
    std::vector<Transaction> transactions_;
    CausalSet causet_;

    void rebuild_view(std::int64_t tick);
    const EmissionPlan& plan_for(std::size_t order_slot);
    bool unit_active(const Unit& u, std::int64_t tick) const;
    u128 block_remaining(std::size_t detector_index) const;
    bool gate_unit(std::size_t unit_index, std::int64_t tick, std::uint64_t emitter_ord,
                   CounterRng& attempt_rng);
    std::string actualize(const EmissionPlan& plan, std::size_t emitter_index,
                          std::size_t winner_unit, std::int64_t tick, CounterRng& collapse_rng,
                          Transaction& out);
};

struct TrajectoryResult {
    TrajectoryStatus status = TrajectoryStatus::Running;
    std::int64_t ticks_run = 0;
    std::optional<DetectionRecord> first_detection;
    std::vector<Transaction> transactions;
    std::vector<NullMeasurement> nulls;
};

// Steps an existing trajectory to its stop condition; the causal set stays
// on the trajectory for callers that need it afterwards.
TrajectoryResult drive(Trajectory& t, StopPolicy policy);

// Convenience wrapper: construct, drive, discard the trajectory.
TrajectoryResult run_trajectory(const CompiledScenario& cs, std::uint64_t run_index,
                                StopPolicy policy = StopPolicy::FirstTransaction);

struct ChannelTally {
    std::uint64_t detections = 0;
    double frequency = 0.0; // over runs that produced a transaction
};

struct UnitTally {
    std::uint64_t detections = 0;
    double frequency = 0.0;
    std::uint64_t nulls = 0;
};

struct EnsembleStats {
    std::uint64_t runs = 0;
    std::uint64_t detected = 0;
    std::uint64_t no_detection = 0;
    std::optional<double> mean_ticks_to_transaction;
    std::map<std::string, ChannelTally> channels; // keyed by channel id
    std::map<std::string, UnitTally> absorbers;   // keyed by unit id
};

struct RunRecord {
    std::uint64_t run = 0;
    TrajectoryStatus status = TrajectoryStatus::Running;
    std::int64_t ticks_run = 0;
    std::optional<DetectionRecord> detection;
    std::vector<NullMeasurement> nulls;
};

struct EnsembleResult {
    EnsembleStats stats;
    std::vector<RunRecord> records; // in run order
    CausalSet first_run_causet;
};

// Executes `runs` independent trajectories (first-transaction policy) and
// aggregates. Per-run randomness derives from (seed, run index) alone, and
// aggregation happens in run order after all workers join, so the result is
// identical for any `threads` >= 1.
EnsembleResult run_ensemble(const Scenario& s, std::uint64_t runs, unsigned threads = 1);
EnsembleResult run_ensemble(const CompiledScenario& cs, std::uint64_t runs, unsigned threads = 1);

// The per-tick confirmation trial as a standalone operation: each eligible
// id independently responds with probability alpha, drawn in list order
// from the caller's stream.
std::vector<std::string> cw_trials(std::span<const std::string> eligible, double alpha,
                                   CounterRng& rng);

// Standalone Born-weighted collapse over individually-listed absorbers:
// channel drawn by |amplitude|^2 restricted to channels with eligible
// entries, then uniformly within the channel. `responders` must be nonempty
// (the gate must have fired for a collapse to exist).
std::string collapse(const OfferWave& ow, const std::vector<ChannelEligibility>& eligible,
                     const std::vector<std::string>& responders, CounterRng& rng);

} // namespace rti
