#include "rti/substratum.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rti/errors.hpp"

namespace rti {

BoundStateSpec BoundStateSpec::make(std::vector<double> energies,
                                    std::vector<TransitionPair> allowed,
                                    std::vector<double> matrix_elements) {
    BoundStateSpec spec;
    spec.levels.reserve(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) {
        spec.levels.push_back({static_cast<int>(i), energies[i]});
    }
    spec.allowed = std::move(allowed);
    if (matrix_elements.empty()) {
        matrix_elements.assign(spec.allowed.size(), 1.0);
    }
    spec.matrix_elements = std::move(matrix_elements);
    spec.validate();
    return spec;
}

void BoundStateSpec::validate() const {
    if (levels.size() < 2) {
        throw SimError(ErrorCode::InvalidScenario, "level system needs at least two levels");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i].index != static_cast<int>(i)) {
            throw SimError(ErrorCode::InvalidScenario, "level indices must be 0..n-1 in order");
        }
        if (i > 0 && !(levels[i].energy > levels[i - 1].energy)) {
            throw SimError(ErrorCode::InvalidScenario,
                           "level energies must be strictly increasing");
        }
    }
    if (matrix_elements.size() != allowed.size()) {
        throw SimError(ErrorCode::InvalidScenario,
                       "matrix elements must pair one-to-one with allowed transitions");
    }
    const int n = static_cast<int>(levels.size());
    for (std::size_t i = 0; i < allowed.size(); ++i) {
        const auto [from, to] = allowed[i];
        if (from < 0 || from >= n || to < 0 || to >= n || from == to) {
            throw SimError(ErrorCode::InvalidScenario, "allowed transition out of range");
        }
        if (!(matrix_elements[i] > 0.0) || !std::isfinite(matrix_elements[i])) {
            throw SimError(ErrorCode::InvalidScenario, "matrix element must be finite and > 0");
        }
        for (std::size_t j = i + 1; j < allowed.size(); ++j) {
            if (allowed[j] == allowed[i]) {
                throw SimError(ErrorCode::InvalidScenario, "duplicate allowed transition");
            }
        }
    }
}

bool BoundStateSpec::allows(TransitionPair pair) const {
    return std::find(allowed.begin(), allowed.end(), pair) != allowed.end();
}

double BoundStateSpec::matrix_element(TransitionPair pair) const {
    for (std::size_t i = 0; i < allowed.size(); ++i) {
        if (allowed[i] == pair) return matrix_elements[i];
    }
    return 0.0;
}

AbsorberState DetectorSpec::constituent(u128 ordinal) const {
    AbsorberState a = representative();
    a.id = id + "#" + u128_to_string(ordinal);
    return a;
}

AbsorberState DetectorSpec::representative() const {
    AbsorberState a;
    a.id = id;
    a.spec = BoundStateSpec::make({0.0, gap}, {{0, 1}});
    a.current_level = 0;
    a.channel = channel;
    a.activation_tick = activation_tick;
    return a;
}

namespace {

// Shared core of absorber_eligible / matching_upward: scan the allowed
// upward transitions out of the current level for a gap resonant with omega.
std::optional<TransitionPair> find_upward(const AbsorberState& absorber, double omega,
                                          double energy_tol) {
    std::optional<TransitionPair> best;
    for (const auto& pair : absorber.spec.allowed) {
        if (pair.from != absorber.current_level || pair.to <= pair.from) continue;
        const double gap = absorber.spec.energy(pair.to) - absorber.spec.energy(pair.from);
        if (std::abs(gap - omega) <= energy_tol * omega) {
            if (!best || pair.to < best->to) best = pair;
        }
    }
    return best;
}

} // namespace

bool absorber_eligible(const AbsorberState& absorber, double omega, double energy_tol) {
    return find_upward(absorber, omega, energy_tol).has_value();
}

std::optional<TransitionPair> matching_upward(const AbsorberState& absorber, double omega,
                                              double energy_tol) {
    return find_upward(absorber, omega, energy_tol);
}

OfferWave mk_offer_wave(const EmitterState& emitter, TransitionPair gap,
                        std::span<const Channel> raw_channels,
                        std::span<const AbsorberState> registry, double energy_tol) {
    if (!emitter.excited()) {
        throw SimError(ErrorCode::GroundStateEmitter,
                       "emitter '" + emitter.id + "' has no energy to offer");
    }
    if (gap.from != emitter.current_level || gap.to >= gap.from) {
        throw SimError(ErrorCode::ForbiddenTransition,
                       "emission must go downward from the current level");
    }
    if (!emitter.spec.allows(gap)) {
        throw SimError(ErrorCode::ForbiddenTransition,
                       "transition " + std::to_string(gap.from) + "->" + std::to_string(gap.to) +
                           " is not in the allowed set of '" + emitter.id + "'");
    }
    const double omega = emitter.spec.gap(gap);

    OfferWave ow;
    ow.emitter_id = emitter.id;
    ow.transition = gap;
    ow.omega = omega;

    // A component only exists where something could actually absorb it:
    // channels with no eligible absorber are pruned before normalization.
    for (const auto& ch : raw_channels) {
        const bool supported =
            std::any_of(registry.begin(), registry.end(), [&](const AbsorberState& a) {
                return a.channel == ch.id && absorber_eligible(a, omega, energy_tol);
            });
        if (supported) ow.components.push_back(ch);
    }
    if (ow.components.empty()) {
        throw SimError(ErrorCode::NoAbsorbers,
                       "no channel of '" + emitter.id + "' reaches an eligible absorber");
    }

    double total = 0.0;
    for (const auto& ch : ow.components) total += std::norm(ch.amplitude);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw SimError(ErrorCode::NormalizationError,
                       "offer-wave components have zero or non-finite total weight");
    }
    const double scale = 1.0 / std::sqrt(total);
    for (auto& ch : ow.components) ch.amplitude *= scale;
    return ow;
}

ConfirmationWave conjugate_response(const OfferWave& ow, const AbsorberState& absorber,
                                    double energy_tol) {
    const auto component =
        std::find_if(ow.components.begin(), ow.components.end(),
                     [&](const Channel& ch) { return ch.id == absorber.channel; });
    if (component == ow.components.end()) {
        throw SimError(ErrorCode::ChannelMismatch,
                       "absorber '" + absorber.id + "' sits on channel '" + absorber.channel +
                           "', which carries no offer component");
    }
    if (!absorber_eligible(absorber, ow.omega, energy_tol)) {
        throw SimError(ErrorCode::EnergyMismatch,
                       "absorber '" + absorber.id + "' has no upward gap matching the offer");
    }
    ConfirmationWave cw;
    cw.absorber_id = absorber.id;
    cw.channel_id = absorber.channel;
    cw.response_amplitude = std::conj(component->amplitude);
    return cw;
}

std::vector<ChannelEligibility> eligible_absorbers(const OfferWave& ow,
                                                   std::span<const AbsorberState> registry,
                                                   double energy_tol) {
    std::vector<ChannelEligibility> groups;
    for (const auto& ch : ow.components) {
        ChannelEligibility group{ch.id, {}};
        for (const auto& a : registry) {
            if (a.channel == ch.id && absorber_eligible(a, ow.omega, energy_tol)) {
                group.absorber_ids.push_back(a.id);
            }
        }
        if (!group.absorber_ids.empty()) groups.push_back(std::move(group));
    }
    return groups;
}

} // namespace rti
