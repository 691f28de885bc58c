#include "rti/relativistic_gate.hpp"

#include <algorithm>
#include <cmath>

#include "rti/errors.hpp"

namespace rti {

std::string to_string(SourceClass c) {
    switch (c) {
    case SourceClass::MasslessBoson: return "massless-boson";
    case SourceClass::MassiveBoson: return "massive-boson";
    case SourceClass::FermionDirect: return "fermion-direct";
    case SourceClass::BoundStateMotion: return "bound-state-motion";
    }
    return "?";
}

std::string to_string(GateRule r) {
    switch (r) {
    case GateRule::NotAnOfferWave: return "NotAnOfferWave";
    case GateRule::FermionUnmediated: return "FermionUnmediated";
    case GateRule::ShortRange: return "ShortRange";
    case GateRule::NoAbsorbers: return "NoAbsorbers";
    }
    return "?";
}

void SourceKind::validate() const {
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
        throw SimError(ErrorCode::InvalidScenario, "source mass must be finite and >= 0");
    }
    if (range && !(*range > 0.0)) {
        throw SimError(ErrorCode::InvalidScenario, "source range must be > 0 when bounded");
    }
    switch (cls) {
    case SourceClass::MasslessBoson:
        if (mass != 0.0 || range) {
            throw SimError(ErrorCode::InvalidScenario,
                           "a massless boson has zero mass and unbounded range");
        }
        break;
    case SourceClass::MassiveBoson:
        if (!(mass > 0.0)) {
            throw SimError(ErrorCode::InvalidScenario, "a massive boson needs mass > 0");
        }
        if (range && *range > 1.0 / mass) {
            throw SimError(ErrorCode::InvalidScenario,
                           "a massive boson cannot outreach its Compton range 1/mass");
        }
        break;
    case SourceClass::FermionDirect:
    case SourceClass::BoundStateMotion:
        break; // rejected by the gate, not by construction
    }
}

std::optional<GateRejection> validate_source(const SourceKind& kind, double intended_range) {
    kind.validate();
    if (!(intended_range > 0.0)) {
        throw SimError(ErrorCode::InvalidScenario, "intended range must be > 0");
    }
    switch (kind.cls) {
    case SourceClass::MasslessBoson:
        return std::nullopt;
    case SourceClass::BoundStateMotion:
        return GateRejection{GateRule::NotAnOfferWave,
                             "a slow-moving massive quantum is a bound state; bound states do "
                             "not propagate as offer waves"};
    case SourceClass::FermionDirect:
        return GateRejection{GateRule::FermionUnmediated,
                             "fermion emission is never confirmed directly; couple it through "
                             "a boson field instead"};
    case SourceClass::MassiveBoson:
        if (intended_range > 1.0 / kind.mass) {
            return GateRejection{GateRule::ShortRange,
                                 "a massive boson reaches only its Compton range 1/mass and "
                                 "cannot span the requested distance"};
        }
        return std::nullopt;
    }
    return std::nullopt;
}

namespace {

BoundStateSpec two_level_emitter() { return BoundStateSpec::make({0.0, 1.0}, {{1, 0}}); }
BoundStateSpec two_level_absorber() { return BoundStateSpec::make({0.0, 1.0}, {{0, 1}}); }

Scenario photon_analog(double re_left, double re_right) {
    Scenario s;
    s.alpha = 0.007;
    s.max_ticks = 5000; // overwhelming odds of a transaction well before this
    s.seed = kDefaultSeed;
    s.channels = {
        {"L", "leftward", {re_left, 0.0}},
        {"R", "rightward", {re_right, 0.0}},
    };
    s.emitters.push_back({"E", two_level_emitter(), 1});
    s.absorbers.push_back({"A", two_level_absorber(), 0, "R"});
    // The background absorber: channel L is never truly empty, whatever any
    // contingent detector does later.
    s.absorbers.push_back({"C", two_level_absorber(), 0, "L"});
    return s;
}

} // namespace

std::variant<Scenario, GateRejection> maudlin_scenario(MaudlinVariant variant) {
    if (variant == MaudlinVariant::AsProposed) {
        // The proposed carrier must move slowly enough for the contingent
        // detector to swing around, which makes it massive and bound — the
        // gate refuses before any absorber geometry matters.
        const SourceKind carrier{SourceClass::BoundStateMotion, 1.0, std::nullopt};
        auto rejection = validate_source(carrier, 2.0);
        return *rejection;
    }
    return photon_analog(1.0, 1.0);
}

bool LightTightReport::all_supported() const {
    return blocked_emitters.empty() &&
           std::all_of(entries.begin(), entries.end(),
                       [](const ChannelSupport& e) { return e.retained; });
}

LightTightReport light_tight_audit(const Scenario& s) {
    s.validate();
    LightTightReport report;

    // Initial absorbing registry: individual absorbers plus one
    // representative per nonempty detector block.
    std::vector<AbsorberState> registry;
    registry.reserve(s.absorbers.size() + s.detectors.size());
    for (const auto& a : s.absorbers) registry.push_back(a);
    for (const auto& d : s.detectors) {
        if (!d.n.is_zero()) registry.push_back(d.representative());
    }

    for (const auto& e : s.emitters) {
        // The gap this emitter would offer first: nearest target below the
        // initial level with absorber support, mirroring engine selection.
        std::vector<TransitionPair> candidates;
        for (const auto& pair : e.spec.allowed) {
            if (pair.from == e.current_level && pair.to < pair.from) candidates.push_back(pair);
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](TransitionPair a, TransitionPair b) { return a.to > b.to; });

        std::optional<double> omega;
        for (const auto& gap : candidates) {
            const double w = e.spec.gap(gap);
            const bool supported = std::any_of(registry.begin(), registry.end(),
                                               [&](const AbsorberState& a) {
                                                   return absorber_eligible(a, w, s.energy_tol);
                                               });
            if (supported) {
                omega = w;
                break;
            }
        }
        if (!omega && !candidates.empty()) omega = e.spec.gap(candidates.front());

        bool any_channel = false;
        for (const auto& ch : s.channels) {
            bool retained = false;
            if (omega) {
                retained = std::any_of(registry.begin(), registry.end(),
                                       [&](const AbsorberState& a) {
                                           return a.channel == ch.id &&
                                                  absorber_eligible(a, *omega, s.energy_tol);
                                       });
            }
            any_channel = any_channel || retained;
            report.entries.push_back({e.id, ch.id, retained});
        }
        if (!any_channel) report.blocked_emitters.push_back(e.id);
    }
    return report;
}

namespace {

Scenario builtin_single() {
    Scenario s;
    s.alpha = 0.007;
    s.max_ticks = 5000;
    s.seed = kDefaultSeed;
    s.channels = {{"C0", "forward", {1.0, 0.0}}};
    s.emitters.push_back({"E", two_level_emitter(), 1});
    s.absorbers.push_back({"A", two_level_absorber(), 0, "C0"});
    return s;
}

Scenario builtin_maudlin_asymmetric() {
    // |a|^2 = 0.64 / 0.36 exactly after normalization of 0.8 / 0.6.
    return photon_analog(0.6, 0.8);
}

Scenario builtin_maudlin_swing() {
    Scenario s = photon_analog(1.0, 1.0);
    // The contingent detector: a block swung onto channel L partway through
    // the run. C already supports L, so offer-wave support never changes.
    DetectorSpec b;
    b.id = "B";
    b.channel = "L";
    b.n = BigCount{100};
    b.gap = 1.0;
    b.activation_tick = 3;
    s.detectors.push_back(b);
    return s;
}

Scenario builtin_cascade() {
    // A long emission ladder against one detector block: each transaction
    // drops the emitter one rung and excites one fresh constituent, giving
    // trajectories with many transactions for causal-set work.
    Scenario s;
    s.alpha = 0.007;
    s.max_ticks = 4000;
    s.seed = kDefaultSeed;
    s.channels = {{"C0", "forward", {1.0, 0.0}}};

    constexpr int kRungs = 1000;
    std::vector<double> energies(kRungs + 1);
    std::vector<TransitionPair> allowed(kRungs);
    for (int i = 0; i <= kRungs; ++i) energies[i] = static_cast<double>(i);
    for (int i = 0; i < kRungs; ++i) allowed[i] = {i + 1, i};
    s.emitters.push_back({"E", BoundStateSpec::make(std::move(energies), std::move(allowed)),
                          kRungs});

    DetectorSpec d;
    d.id = "D";
    d.channel = "C0";
    d.n = BigCount{100'000};
    d.gap = 1.0;
    s.detectors.push_back(d);
    return s;
}

Scenario builtin_macro_detector() {
    // Eq.-(5)-scale conglomerate: detection is virtually certain on the
    // first tick, handled by the analytic gate.
    Scenario s;
    s.alpha = 0.007;
    s.max_ticks = 10;
    s.seed = kDefaultSeed;
    s.channels = {{"C0", "forward", {1.0, 0.0}}};
    s.emitters.push_back({"E", two_level_emitter(), 1});
    DetectorSpec d;
    d.id = "G";
    d.channel = "C0";
    d.n = BigCount::parse("1e23");
    d.gap = 1.0;
    s.detectors.push_back(d);
    return s;
}

} // namespace

std::optional<Scenario> find_builtin(const std::string& name) {
    if (name == "single") return builtin_single();
    if (name == "maudlin-photon-analog") {
        return std::get<Scenario>(maudlin_scenario(MaudlinVariant::PhotonAnalog));
    }
    if (name == "maudlin-asymmetric") return builtin_maudlin_asymmetric();
    if (name == "maudlin-swing") return builtin_maudlin_swing();
    if (name == "cascade") return builtin_cascade();
    if (name == "macro-detector") return builtin_macro_detector();
    return std::nullopt;
}

std::vector<std::string> builtin_names() {
    return {"cascade",          "macro-detector", "maudlin-asymmetric",
            "maudlin-photon-analog", "maudlin-swing",  "single"};
}

} // namespace rti
