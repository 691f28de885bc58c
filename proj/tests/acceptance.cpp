// Acceptance suite: end-to-end checks of the shipped behaviour, one printed
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
//
// Usage: acceptance <path-to-rti_sim>
//
// Oracles: MPFR at 240 bits (~72 decimal digits) for the closed-form
// probabilities, adaptive Gauss-Kronrod quadrature for the transition
// amplitude, Kahn topological sort for the causal set, binomial 3-sigma
// bounds for the Monte Carlo ensembles.

#include <mpfr.h>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "rti/amplitudes.hpp"
#include "rti/bigcount.hpp"
#include "rti/engine.hpp"
#include "rti/relativistic_gate.hpp"
#include "rti/rng.hpp"
#include "rti/substratum.hpp"

#include "support/oracles.hpp"
#include "support/subprocess.hpp"

namespace {

int failures = 0;
std::string sim; // path to the CLI binary

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
    va_list args;
    va_start(args, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

// (1-0.993^n, log10 0.993^n) at 240-bit precision, double-rounded at the end.
struct HighPrecNoCw {
    double prob;
    double log10_prob;
};

HighPrecNoCw oracle_no_cw(const char* n_text) {
    mpfr_t q, n, t, ln10, l10, p;
    mpfr_inits2(240, q, n, t, ln10, l10, p, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_str(q, "0.993", 10, MPFR_RNDN);
    mpfr_set_str(n, n_text, 10, MPFR_RNDN);
    mpfr_log(t, q, MPFR_RNDN);
    mpfr_mul(t, t, n, MPFR_RNDN); // n ln(0.993)
    mpfr_set_ui(ln10, 10, MPFR_RNDN);
    mpfr_log(ln10, ln10, MPFR_RNDN);
    mpfr_div(l10, t, ln10, MPFR_RNDN);
    mpfr_exp(p, t, MPFR_RNDN);
    HighPrecNoCw out{mpfr_get_d(p, MPFR_RNDN), mpfr_get_d(l10, MPFR_RNDN)};
    mpfr_clears(q, n, t, ln10, l10, p, static_cast<mpfr_ptr>(nullptr));
    return out;
}

rti::EmitterState plain_emitter(double gap) {
    rti::EmitterState e;
    e.id = "E";
    e.spec = rti::BoundStateSpec::make({0.0, gap}, {{1, 0}});
    e.current_level = 1;
    return e;
}

// ---- criteria ---------------------------------------------------------------

void criterion_1_single_constituent() {
    const auto r = testutil::run_cmd(sim + " classify --n 1 --alpha 0.007");
    bool ok = r.exit_code == 0;
    double prob = -1.0;
    if (ok) {
        const auto doc = nlohmann::json::parse(r.out, nullptr, false);
        ok = !doc.is_discarded() && doc.contains("prob_no_cw");
        if (ok) {
            prob = doc["prob_no_cw"].get<double>();
            ok = std::abs(prob - 0.993) < 5e-4 && std::round(prob * 1000.0) == 993.0;
        }
    }
    report(1, ok, fmt("classify --n 1 reports prob_no_cw %.12g (want 0.993 at 3 decimals)", prob));
}

void criterion_2_sixty_split() {
    const auto got = rti::prob_no_cw(0.007, std::uint64_t{60});
    const double got_cw = rti::prob_cw(0.007, std::uint64_t{60});
    const auto want = oracle_no_cw("60");
    const bool printed = std::abs(got.prob - 0.656) <= 0.001 && std::abs(got_cw - 0.344) <= 0.001;
    const bool vs_oracle = std::abs(got.prob - want.prob) <= 1e-12 &&
                           std::abs((got.prob + got_cw) - 1.0) <= 1e-12;
    report(2, printed && vs_oracle,
           fmt("n=60 splits %.6f / %.6f (oracle %.15f, |diff| %.2e)", got.prob, got_cw,
               want.prob, std::abs(got.prob - want.prob)));
}

void criterion_3_mole_scale() {
    const auto r = testutil::run_cmd(sim + " classify --n 1e23");
    bool ok = r.exit_code == 0;
    double prob = -1.0, log10 = 0.0;
    const auto want = oracle_no_cw("1e23");
    if (ok) {
        const auto doc = nlohmann::json::parse(r.out, nullptr, false);
        ok = !doc.is_discarded();
        if (ok) {
            prob = doc["prob_no_cw"].get<double>();
            log10 = doc["log10_prob_no_cw"].get<double>();
            ok = prob == 0.0 && std::abs(log10 - want.log10_prob) <= 0.01 * std::abs(want.log10_prob) &&
                 std::abs(log10 - (-3.05e20)) <= 0.01 * 3.05e20;
        }
    }
    report(3, ok, fmt("n=1e23 underflows to %g with log10 %.6e (oracle %.6e)", prob, log10,
                      want.log10_prob));
}

void criterion_4_gate_consistency() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t n : {1ull, 10ull, 100ull, 1000ull}) {
        rti::Scenario s;
        s.alpha = 0.007;
        s.max_ticks = 1;
        s.seed = 0xC0FFEE;
        s.channels = {{"C", "", 1.0}};
        s.emitters = {plain_emitter(1.0)};
        rti::DetectorSpec d;
        d.id = "D";
        d.channel = "C";
        d.n = rti::BigCount(n);
        d.gap = 1.0;
        s.detectors = {d};

        const std::uint64_t runs = 10000;
        const auto result = rti::run_ensemble(s, runs, 4);
        const double p_none = rti::prob_no_cw(0.007, n).prob;
        const double freq = static_cast<double>(result.stats.no_detection) / runs;
        const double band = 3.0 * oracle::binom_sigma(p_none, runs);
        const bool inside = std::abs(freq - p_none) <= band;
        ok = ok && inside;
        detail += fmt("N=%" PRIu64 ":%+.4f/%.4f ", n, freq - p_none, band);
    }
    report(4, ok, "single-tick no-confirmation frequency vs (1-a)^N, 3-sigma bands: " + detail);
}

void criterion_5_born_convergence() {
    const std::uint64_t runs = 100000;

    const auto symmetric = rti::find_builtin("maudlin-photon-analog");
    const auto asymmetric = rti::find_builtin("maudlin-asymmetric");
    if (!symmetric || !asymmetric) {
        report(5, false, "builtin scenarios missing");
        return;
    }

    const auto sym = rti::run_ensemble(*symmetric, runs, 4);
    const double left = sym.stats.channels.at("L").frequency;
    const bool sym_ok = sym.stats.detected == runs && std::abs(left - 0.5) <= 0.005;

    // Enumeration oracle: expected channel weights straight from the
    // normalized amplitude table of the compiled scenario.
    const auto cs = rti::compile(*asymmetric);
    std::map<std::string, double> weight;
    for (const auto& c : cs.scenario.channels) weight[c.id] = std::norm(c.amplitude);
    const bool weights_exact = std::abs(weight.at("L") - 0.36) < 1e-12 &&
                               std::abs(weight.at("R") - 0.64) < 1e-12;

    const auto asym = rti::run_ensemble(cs, runs, 4);
    const double al = asym.stats.channels.at("L").frequency;
    const double ar = asym.stats.channels.at("R").frequency;
    const bool asym_ok = std::abs(al - weight.at("L")) <= 0.005 &&
                         std::abs(ar - weight.at("R")) <= 0.005;

    report(5, sym_ok && weights_exact && asym_ok,
           fmt("L-frequency %.4f (want 0.5+-0.005); asymmetric %.4f/%.4f vs exact 0.36/0.64",
               left, al, ar));
}

void criterion_6_rejection_and_offer_support() {
    const auto r = testutil::run_cmd(sim + " run --scenario maudlin-as-proposed --runs 1");
    bool cli_ok = r.exit_code == 1;
    if (cli_ok) {
        const auto doc = nlohmann::json::parse(r.err, nullptr, false);
        cli_ok = !doc.is_discarded() && doc.contains("rejection") &&
                 doc["rejection"]["rule"] == "NotAnOfferWave";
    }

    // Property: across randomized scenarios, no offer wave ever carries a
    // component without an eligible absorber behind it.
    bool property_ok = true;
    std::uint64_t offers_audited = 0;
    for (std::uint64_t trial = 0; trial < 30 && property_ok; ++trial) {
        rti::CounterRng gen(rti::derive_key({trial, 0xACCE97ull}));
        rti::Scenario s;
        s.alpha = 0.1;
        s.max_ticks = 25;
        s.seed = gen.next_u64();
        const int n_channels = 2 + static_cast<int>(gen.next_u64() % 3);
        for (int c = 0; c < n_channels; ++c)
            s.channels.push_back({"C" + std::to_string(c), "", 0.4 + 0.6 * gen.next_double()});
        s.emitters = {plain_emitter(1.0)};
        const double gaps[] = {0.5, 1.0, 1.5};
        for (int c = 0; c < n_channels; ++c) {
            if (gen.next_u64() % 4 == 0) continue; // leave some channels dark
            rti::AbsorberState a;
            a.id = "A" + std::to_string(c);
            a.spec = rti::BoundStateSpec::make({0.0, gaps[gen.next_u64() % 3]}, {{0, 1}});
            a.channel = "C" + std::to_string(c);
            a.activation_tick = static_cast<std::int64_t>(gen.next_u64() % 3);
            s.absorbers.push_back(a);
        }
        // Keep every trial live: at least one resonant absorber from tick one.
        const bool any_resonant = std::any_of(
            s.absorbers.begin(), s.absorbers.end(), [](const rti::AbsorberState& a) {
                return a.activation_tick == 0 && a.spec.levels[1].energy == 1.0;
            });
        if (!any_resonant) {
            rti::AbsorberState a;
            a.id = "A_base";
            a.spec = rti::BoundStateSpec::make({0.0, 1.0}, {{0, 1}});
            a.channel = "C0";
            s.absorbers.push_back(a);
        }
        const auto cs = rti::compile(s);
        rti::Trajectory t(cs, 0, /*record_offers=*/true);
        std::vector<int> level_before(s.absorbers.size());
        while (t.status() == rti::TrajectoryStatus::Running) {
            // Judge eligibility against the levels the offer saw, before this
            // tick's transaction could excite the winner.
            for (std::size_t i = 0; i < s.absorbers.size(); ++i)
                level_before[i] = t.absorber_level(i);
            const auto out = t.step();
            for (const auto& offer : out.offers) {
                ++offers_audited;
                if (offer.components.empty()) property_ok = false;
                for (const auto& comp : offer.components) {
                    bool backed = false;
                    for (std::size_t i = 0; i < s.absorbers.size(); ++i) {
                        const auto& a = s.absorbers[i];
                        if (a.channel != comp.id || a.activation_tick > out.tick) continue;
                        rti::AbsorberState live = a;
                        live.current_level = level_before[i];
                        if (rti::absorber_eligible(live, offer.omega, s.energy_tol))
                            backed = true;
                    }
                    if (!backed) property_ok = false;
                }
            }
        }
    }

    report(6, cli_ok && property_ok,
           fmt("as-proposed rejected structurally (exit %d); %" PRIu64
               " offers audited, all components absorber-backed: %s",
               r.exit_code, offers_audited, property_ok ? "yes" : "no"));
}

void criterion_7_amplitude_quadrature() {
    rti::CounterRng rng(rti::derive_key({7, 0x0A11CEull}));
    double worst = 0.0;
    bool ok = true;
    std::uint64_t near_resonance = 0;
    for (int i = 0; i < 1000; ++i) {
        const double m = 0.1 + 2.9 * rng.next_double();
        const double tau = 1e-3 + 19.999 * rng.next_double();
        double delta;
        if (i % 4 == 0) {
            // |delta * tau| below 1e-8: the cancellation-prone region.
            const double mag = std::pow(10.0, -12.0 + 4.0 * rng.next_double()); // 1e-12..1e-8
            delta = (rng.next_u64() & 1 ? mag : -mag) / tau;
            ++near_resonance;
        } else {
            // A relative-error bound is meaningless within roundoff of a
            // sinc null, so resample until the magnitude is genuinely there.
            for (;;) {
                delta = -50.0 + 100.0 * rng.next_double();
                const double x = 0.5 * delta * tau;
                if (std::abs(std::sin(x)) >= 1e-3 * std::abs(x)) break;
            }
        }
        rti::TransitionParams p;
        p.matrix_element = m;
        p.e_initial = 0.0;
        p.e_final = delta;
        p.omega = 0.0;
        p.sign = rti::TransitionSign::Absorption;
        p.tau = tau;
        const auto got = rti::transition_amplitude(p);
        const auto want = oracle::amplitude_by_quadrature(m, delta, tau);
        const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
        worst = std::max(worst, rel);
        if (rel > 1e-9) ok = false;
    }
    report(7, ok, fmt("1000 random (M,delta,tau) triples (%" PRIu64
                      " near resonance), worst relative error %.3e (bound 1e-9)",
                      near_resonance, worst));
}

void criterion_8_causal_invariants() {
    const auto builtin = rti::find_builtin("cascade");
    if (!builtin) {
        report(8, false, "cascade builtin missing");
        return;
    }
    const auto cs = rti::compile(*builtin);
    rti::Trajectory t(cs, 0);
    const auto result = rti::drive(t, rti::StopPolicy::Exhaustion);
    const auto& causet = t.causet();

    bool ok = result.transactions.size() == 1000;
    std::string why = ok ? "" : fmt("(only %zu transactions) ", result.transactions.size());

    const auto audit = causet.check_invariants();
    if (!audit.ok()) {
        ok = false;
        why += fmt("(%zu invariant violations) ", audit.violations.size());
    }

    // Independent oracle: Kahn's algorithm must order all events, and every
    // link must point forward in that order.
    std::vector<std::uint64_t> ids;
    for (const auto& e : causet.events()) ids.push_back(e.id);
    std::vector<oracle::Edge> edges;
    for (const auto& l : causet.links()) edges.push_back({l.cause, l.effect});
    const auto order = oracle::topo_order(ids, edges);
    if (order.size() != ids.size()) {
        ok = false;
        why += "(oracle found a cycle) ";
    } else {
        std::map<std::uint64_t, std::size_t> pos;
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        for (const auto& l : causet.links())
            if (pos.at(l.cause) >= pos.at(l.effect)) { ok = false; why += "(backward link) "; break; }
    }

    // Emission precedes absorption for every transaction, through links.
    for (const auto& txn : result.transactions) {
        if (!causet.precedes(txn.emission_event, txn.absorption_event)) {
            ok = false;
            why += "(interval out of order) ";
            break;
        }
    }
    report(8, ok, fmt("%zu-transaction trajectory: %zu events, %zu links, audit+oracle agree %s",
                      result.transactions.size(), causet.events().size(), causet.links().size(),
                      why.c_str()));
}

void criterion_9_thread_determinism() {
    const std::string base = "/tmp/rti_accept." + std::to_string(getpid());
    const std::string a = base + "/t1";
    const std::string b = base + "/t8";
    const std::string common = " run --scenario maudlin-photon-analog --runs 2000 --seed 7 --out ";
    const auto r1 = testutil::run_cmd(sim + common + a + " --threads 1");
    const auto r8 = testutil::run_cmd(sim + common + b + " --threads 8");
    bool ok = r1.exit_code == 0 && r8.exit_code == 0;
    bool stats_same = false, causet_same = false;
    if (ok) {
        const auto sa = testutil::slurp(a + "/stats.json");
        const auto sb = testutil::slurp(b + "/stats.json");
        const auto ca = testutil::slurp(a + "/causet.dot");
        const auto cb = testutil::slurp(b + "/causet.dot");
        stats_same = !sa.empty() && sa == sb;
        causet_same = !ca.empty() && ca == cb;
        ok = stats_same && causet_same;
    }
    report(9, ok, fmt("1 vs 8 threads: stats.json %s, causet.dot %s",
                      stats_same ? "byte-identical" : "DIFFER",
                      causet_same ? "byte-identical" : "DIFFER"));
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-rti_sim>\n", argv[0]);
        return 2;
    }
    sim = argv[1];

    criterion_1_single_constituent();
    criterion_2_sixty_split();
    criterion_3_mole_scale();
    criterion_4_gate_consistency();
    criterion_5_born_convergence();
    criterion_6_rejection_and_offer_support();
    criterion_7_amplitude_quadrature();
    criterion_8_causal_invariants();
    criterion_9_thread_determinism();

    if (failures == 0) {
        std::printf("all 9 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", failures);
    return 1;
}
