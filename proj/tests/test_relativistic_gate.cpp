#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "rti/engine.hpp"
#include "rti/errors.hpp"
#include "rti/relativistic_gate.hpp"

using namespace rti;

TEST_CASE("massless bosons pass at any range") {
    SourceKind photon;
    photon.cls = SourceClass::MasslessBoson;
    CHECK_NOTHROW(photon.validate());
    CHECK_FALSE(validate_source(photon, 1e9).has_value());
    CHECK_FALSE(validate_source(photon, 1e-6).has_value());
}

TEST_CASE("a slow massive quantum is not an offer wave") {
    SourceKind lump;
    lump.cls = SourceClass::BoundStateMotion;
    lump.mass = 5.0;
    lump.range = 2.0;
    const auto rejection = validate_source(lump, 2.0);
    REQUIRE(rejection.has_value());
    CHECK(rejection->rule == GateRule::NotAnOfferWave);
    CHECK_FALSE(rejection->message.empty());
}

TEST_CASE("fermion exchange is never confirmed directly") {
    SourceKind electron;
    electron.cls = SourceClass::FermionDirect;
    electron.mass = 1.0;
    electron.range = 0.5;
    const auto rejection = validate_source(electron, 0.5);
    REQUIRE(rejection.has_value());
    CHECK(rejection->rule == GateRule::FermionUnmediated);
}

TEST_CASE("massive bosons stop at their Compton range") {
    SourceKind w;
    w.cls = SourceClass::MassiveBoson;
    w.mass = 4.0;
    w.range = 0.25;
    CHECK_NOTHROW(w.validate());
    CHECK_FALSE(validate_source(w, 0.2).has_value());   // inside 1/mass
    CHECK_FALSE(validate_source(w, 0.25).has_value());  // at the boundary
    const auto rejection = validate_source(w, 0.26);    // past it
    REQUIRE(rejection.has_value());
    CHECK(rejection->rule == GateRule::ShortRange);
}

TEST_CASE("source kinds enforce their own structure") {
    SourceKind bad;
    bad.cls = SourceClass::MasslessBoson;
    bad.mass = 1.0; // massless with mass
    CHECK_THROWS_AS(bad.validate(), SimError);

    bad.cls = SourceClass::MassiveBoson;
    bad.mass = 0.0; // massive without mass
    CHECK_THROWS_AS(bad.validate(), SimError);

    bad.mass = 2.0;
    bad.range = 3.0; // beyond Compton range 0.5
    CHECK_THROWS_AS(bad.validate(), SimError);
}

TEST_CASE("maudlin as proposed is rejected before any field exists") {
    const auto outcome = maudlin_scenario(MaudlinVariant::AsProposed);
    REQUIRE(std::holds_alternative<GateRejection>(outcome));
    const auto& rejection = std::get<GateRejection>(outcome);
    CHECK(rejection.rule == GateRule::NotAnOfferWave);
    CHECK(rejection.message.find("bound state") != std::string::npos);
}

TEST_CASE("the photon analog is runnable and symmetric") {
    const auto outcome = maudlin_scenario(MaudlinVariant::PhotonAnalog);
    REQUIRE(std::holds_alternative<Scenario>(outcome));
    const auto& s = std::get<Scenario>(outcome);
    CHECK_NOTHROW(s.validate());
    REQUIRE(s.channels.size() == 2);
    // The builtin leaves the even split to compile-time normalization.
    const auto norms = compile(s);
    CHECK(std::norm(norms.scenario.channels[0].amplitude) == doctest::Approx(0.5));
    CHECK(std::norm(norms.scenario.channels[1].amplitude) == doctest::Approx(0.5));

    // Every channel is supported: no absorber-free component can arise.
    const auto report = light_tight_audit(s);
    CHECK(report.all_supported());
    CHECK(report.blocked_emitters.empty());

    // And it actually runs to a detection.
    const auto result = run_trajectory(compile(s), 0);
    CHECK(result.status == TrajectoryStatus::Detected);
}

TEST_CASE("light-tight audit flags unsupported channels") {
    auto outcome = maudlin_scenario(MaudlinVariant::PhotonAnalog);
    auto s = std::get<Scenario>(outcome);
    // Knock out the background absorber C: the left channel goes dark.
    s.absorbers.erase(std::remove_if(s.absorbers.begin(), s.absorbers.end(),
                                     [](const AbsorberState& a) { return a.id == "C"; }),
                      s.absorbers.end());
    const auto report = light_tight_audit(s);
    CHECK_FALSE(report.all_supported());
    bool left_dark = false;
    for (const auto& entry : report.entries) {
        if (entry.channel_id == "L") {
            CHECK_FALSE(entry.retained);
            left_dark = true;
        } else {
            CHECK(entry.retained);
        }
    }
    CHECK(left_dark);
    CHECK(report.blocked_emitters.empty()); // R still carries the offer
}

TEST_CASE("an emitter with no supported channel is blocked entirely") {
    Scenario s;
    s.alpha = 0.007;
    s.max_ticks = 5;
    s.channels = {{"L", "", 1.0}};
    EmitterState e;
    e.id = "E";
    e.spec = BoundStateSpec::make({0.0, 1.0}, {{1, 0}});
    e.current_level = 1;
    s.emitters = {e};
    AbsorberState a;
    a.id = "A";
    a.spec = BoundStateSpec::make({0.0, 2.0}, {{0, 1}}); // never resonant
    a.channel = "L";
    s.absorbers = {a};

    const auto report = light_tight_audit(s);
    CHECK_FALSE(report.all_supported());
    REQUIRE(report.blocked_emitters.size() == 1);
    CHECK(report.blocked_emitters[0] == "E");

    // The trajectory agrees: nothing is ever emitted.
    const auto result = run_trajectory(compile(s), 0);
    CHECK(result.status == TrajectoryStatus::NoAbsorbers);
    CHECK(result.transactions.empty());
}

TEST_CASE("detector blocks support a channel like any absorber") {
    Scenario s;
    s.alpha = 0.007;
    s.max_ticks = 5;
    s.channels = {{"L", "", 1.0}};
    EmitterState e;
    e.id = "E";
    e.spec = BoundStateSpec::make({0.0, 1.0}, {{1, 0}});
    e.current_level = 1;
    s.emitters = {e};
    DetectorSpec d;
    d.id = "D";
    d.channel = "L";
    d.n = 1000;
    d.gap = 1.0;
    s.detectors = {d};

    CHECK(light_tight_audit(s).all_supported());

    // An empty block supports nothing.
    s.detectors[0].n = BigCount(0);
    CHECK_FALSE(light_tight_audit(s).all_supported());
}

TEST_CASE("builtin library") {
    const auto names = builtin_names();
    CHECK(std::is_sorted(names.begin(), names.end()));
    CHECK(std::find(names.begin(), names.end(), "maudlin-photon-analog") != names.end());
    CHECK(std::find(names.begin(), names.end(), "maudlin-asymmetric") != names.end());
    CHECK(std::find(names.begin(), names.end(), "cascade") != names.end());
    // as-proposed is deliberately not runnable, so not in the list
    CHECK(std::find(names.begin(), names.end(), "maudlin-as-proposed") == names.end());

    for (const auto& name : names) {
        CAPTURE(name);
        const auto s = find_builtin(name);
        REQUIRE(s.has_value());
        CHECK_NOTHROW(s->validate());
        CHECK(light_tight_audit(*s).all_supported());
    }
    CHECK_FALSE(find_builtin("no-such-scenario").has_value());
}

TEST_CASE("the asymmetric variant weights 0.64 rightward") {
    const auto s = find_builtin("maudlin-asymmetric");
    REQUIRE(s.has_value());
    double left = 0.0, right = 0.0;
    for (const auto& c : s->channels) {
        if (c.id == "L") left = std::norm(c.amplitude);
        if (c.id == "R") right = std::norm(c.amplitude);
    }
    CHECK(left == doctest::Approx(0.36));
    CHECK(right == doctest::Approx(0.64));
}

TEST_CASE("the swing variant adds a detector mid-run without breaking support") {
    const auto s = find_builtin("maudlin-swing");
    REQUIRE(s.has_value());
    REQUIRE(s->detectors.size() == 1);
    CHECK(s->detectors[0].activation_tick > 0);
    // Support must hold from tick 1, before the swing: the audit sees the
    // permanent background absorber, not the latecomer.
    CHECK(light_tight_audit(*s).all_supported());

    // The latecomer soaks up most detections on its channel once present:
    // its hundred constituents dwarf the lone background absorber.
    const auto result = run_ensemble(*s, 400, 2);
    const auto& block = result.stats.absorbers.at(s->detectors[0].id);
    const auto& background = result.stats.absorbers.at("C");
    CHECK(block.detections > background.detections);
}

TEST_CASE("gate rule names are stable for machine output") {
    CHECK(to_string(GateRule::NotAnOfferWave) == "NotAnOfferWave");
    CHECK(to_string(GateRule::FermionUnmediated) == "FermionUnmediated");
    CHECK(to_string(GateRule::ShortRange) == "ShortRange");
    CHECK(to_string(GateRule::NoAbsorbers) == "NoAbsorbers");
    CHECK_FALSE(to_string(SourceClass::MasslessBoson).empty());
}
