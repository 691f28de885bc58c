// Relativistic admissibility of offer waves, and the contingent-absorber
// scenario library built on it.
//
// Only massless-boson emission produces a long-range offer wave: a
// slow-moving massive quantum is a bound state (not an offer wave at all),
// fermion exchange is never confirmed directly, and massive bosons reach no
// further than their Compton range. These rules decide which setups can even
// be mounted before any stochastic machinery runs.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rti/engine.hpp"

namespace rti {

enum class SourceClass { MasslessBoson, MassiveBoson, FermionDirect, BoundStateMotion };

std::string to_string(SourceClass c);

struct SourceKind {
    SourceClass cls = SourceClass::MasslessBoson;
    double mass = 0.0;
    // Natural-units propagation reach; unset means unbounded.
    std::optional<double> range;

    // Enforces the structural rules: a massless boson carries no mass and is
    // unbounded; a massive boson reaches at most its Compton range 1/mass.
    // Throws SimError(InvalidScenario).
    void validate() const;
};

enum class GateRule { NotAnOfferWave, FermionUnmediated, ShortRange, NoAbsorbers };

std::string to_string(GateRule r);

struct GateRejection {
    GateRule rule = GateRule::NotAnOfferWave;
    std::string message;
};

// Accepts or rejects a proposed emission source for a given reach. Returns
// nothing on acceptance; rejections are values, never exceptions.
std::optional<GateRejection> validate_source(const SourceKind& kind, double intended_range);

enum class MaudlinVariant {
    AsProposed,   // slow massive quantum toward A, contingent B behind it
    PhotonAnalog, // the runnable analog: photon split L/R, background C on L
};

// The contingent-absorber setup. AsProposed fails the gate outright (its
// carrier is a bound state, not an offer wave); PhotonAnalog yields a
// runnable scenario with symmetric L/R amplitudes, absorber A on R and
// background absorber C on L.
std::variant<Scenario, GateRejection> maudlin_scenario(MaudlinVariant variant);

struct ChannelSupport {
    std::string emitter_id;
    std::string channel_id;
    bool retained = false; // survives offer-wave construction
};

struct LightTightReport {
    std::vector<ChannelSupport> entries;
    std::vector<std::string> blocked_emitters; // cannot emit on any channel
    bool all_supported() const;
};

// Static audit of the light-tight-box condition: for every emitter and
// channel, would the channel survive offer-wave construction against the
// scenario's initial absorbers? Channels nobody can absorb on are pruned
// before any field exists; an emitter with no supported channel cannot emit
// at all.
LightTightReport light_tight_audit(const Scenario& s);

// Canonical scenario library. Unknown names return nullopt. The
// "maudlin-as-proposed" name is special-cased by callers through
// maudlin_scenario, since it deliberately has no runnable Scenario.
std::optional<Scenario> find_builtin(const std::string& name);
std::vector<std::string> builtin_names(); // runnable builtins, sorted

} // namespace rti
