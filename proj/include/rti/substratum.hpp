// Quantum-substratum entities: level systems that emit or receive quanta,
// the spatial channels an offer spreads over, and the wave/transaction
// records produced by the measurement transition. All types are immutable
// values after construction and safe to share across threads.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rti/bigcount.hpp"

namespace rti {

inline constexpr double kDefaultEnergyTol = 1e-9; // relative to omega

struct EnergyLevel {
    int index;
    double energy; // natural units
};

struct TransitionPair {
    int from;
    int to;
    bool operator==(const TransitionPair&) const = default;
};

// A bound-state level system with its allowed transitions. Matrix elements
// are supplied per allowed pair, not computed.
struct BoundStateSpec {
    std::vector<EnergyLevel> levels; // strictly increasing energy, index 0 = ground
    std::vector<TransitionPair> allowed;
    std::vector<double> matrix_elements; // parallel to `allowed`, each > 0

    // Builds a spec from raw energies; matrix elements default to 1.
    // Throws SimError(InvalidScenario) on any invariant violation.
    static BoundStateSpec make(std::vector<double> energies,
                               std::vector<TransitionPair> allowed,
                               std::vector<double> matrix_elements = {});

    void validate() const;
    int top_level() const { return static_cast<int>(levels.size()) - 1; }
    bool allows(TransitionPair pair) const;
    double matrix_element(TransitionPair pair) const; // 0 when pair not allowed
    double energy(int level) const { return levels.at(static_cast<std::size_t>(level)).energy; }
    // Signed gap E_from - E_to.
    double gap(TransitionPair pair) const { return energy(pair.from) - energy(pair.to); }
};

struct EmitterState {
    std::string id;
    BoundStateSpec spec;
    int current_level = 0;

    bool excited() const { return current_level > 0; }
};

struct AbsorberState {
    std::string id;
    BoundStateSpec spec;
    int current_level = 0;
    std::string channel;
    // First tick at which this absorber participates. Lets a scenario swing
    // an absorber into place mid-run; 0 means present from the start.
    std::int64_t activation_tick = 0;
};

// A conglomerate of n identical ground-state two-level micro-absorbers
// (energy gap `gap`) sharing one channel. Constituents are synthesized on
// demand rather than stored; counts may be astronomically large.
struct DetectorSpec {
    std::string id;
    std::string channel;
    BigCount n;
    double gap = 0.0;
    std::int64_t activation_tick = 0;

    AbsorberState constituent(u128 ordinal) const;
    // Stand-in with the detector's own id, used for eligibility checks that
    // apply uniformly to every ground-state constituent.
    AbsorberState representative() const;
};

struct Channel {
    std::string id;
    std::string label;
    std::complex<double> amplitude; // offer-wave component on this mode
};

struct OfferWave {
    std::string emitter_id;
    TransitionPair transition; // downward pair that generated the offer
    double omega;              // level gap being offered
    std::vector<Channel> components; // normalized; every channel has support
};

struct ConfirmationWave {
    std::string absorber_id;
    std::string channel_id;
    std::complex<double> response_amplitude; // conjugate of the received component
};

struct Transaction {
    std::int64_t tick = 0;
    std::string emitter_id;
    std::string winner_absorber_id; // "<detector>#<ordinal>" for constituents
    double omega = 0.0;
    std::uint64_t emission_event = 0;
    std::uint64_t absorption_event = 0;
};

struct NullMeasurement {
    std::int64_t tick = 0;
    std::string absorber_id;
    std::string channel_id;
};

// True when the absorber has an allowed upward transition from its current
// level whose gap matches omega within |gap - omega| <= energy_tol * omega.
bool absorber_eligible(const AbsorberState& absorber, double omega, double energy_tol);

// The matching upward transition used when the absorber wins; smallest
// target index on (degenerate) ties.
std::optional<TransitionPair> matching_upward(const AbsorberState& absorber, double omega,
                                              double energy_tol);

// Constructs the offer wave for one emission attempt. Channels without any
// eligible absorber are dropped and the survivors renormalized to unit total
// probability; an offer with no supported component does not exist at all.
// Throws GroundStateEmitter, ForbiddenTransition, NoAbsorbers,
// NormalizationError.
OfferWave mk_offer_wave(const EmitterState& emitter, TransitionPair gap,
                        std::span<const Channel> raw_channels,
                        std::span<const AbsorberState> registry,
                        double energy_tol = kDefaultEnergyTol);

// The advanced response: conjugate of the component the absorber received.
// Throws ChannelMismatch, EnergyMismatch.
ConfirmationWave conjugate_response(const OfferWave& ow, const AbsorberState& absorber,
                                    double energy_tol = kDefaultEnergyTol);

struct ChannelEligibility {
    std::string channel_id;
    std::vector<std::string> absorber_ids;
};

// Absorbers able to take up omega, grouped by channel in offer-component
// order. Empty groups are omitted.
std::vector<ChannelEligibility> eligible_absorbers(const OfferWave& ow,
                                                   std::span<const AbsorberState> registry,
                                                   double energy_tol = kDefaultEnergyTol);

} // namespace rti
