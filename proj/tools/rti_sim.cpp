// rti_sim: scenario runner and calculator front-end.
//
// Exit codes: 0 success, 1 validation/physics rejection, 2 I/O failure.
// Validation failures and gate rejections print machine-readable JSON on
// stderr; results go to stdout or the requested files.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rti/amplitudes.hpp"
#include "rti/classifier.hpp"
#include "rti/engine.hpp"
#include "rti/errors.hpp"
#include "rti/kernels.hpp"
#include "rti/relativistic_gate.hpp"
#include "rti/scenario_io.hpp"

#include <json.hpp>

namespace {

int exit_code_for(const rti::SimError& err) {
    return err.code() == rti::ErrorCode::IoError ? 2 : 1;
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("RTI_SIM_SEED");
    if (!raw || !*raw) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 0);
    if (end == raw || *end != '\0') {
        throw rti::SimError(rti::ErrorCode::InvalidScenario,
                            std::string("RTI_SIM_SEED is not an integer: '") + raw + "'");
    }
    return static_cast<std::uint64_t>(v);
}

struct RunArgs {
    std::string scenario;
    std::uint64_t runs = 1;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::vector<std::string> formats{"json", "csv", "dot"};
    unsigned threads = 1;
    std::string lane;
};

// Resolves a --scenario argument: builtin name first, then filesystem path.
// The deliberately unrunnable "maudlin-as-proposed" raises its rejection.
rti::Scenario resolve_scenario(const std::string& name) {
    if (name == "maudlin-as-proposed") {
        auto outcome = rti::maudlin_scenario(rti::MaudlinVariant::AsProposed);
        // Always a rejection; surface it to the caller.
        throw std::get<rti::GateRejection>(outcome);
    }
    if (auto builtin = rti::find_builtin(name)) return *builtin;
    return rti::load_scenario_file(name);
}

void apply_lane(const std::string& lane) {
    if (lane.empty()) return;
    if (lane == "scalar") {
        rti::kernels::set_lane(rti::kernels::Lane::Scalar);
    } else if (lane == "avx2") {
        rti::kernels::set_lane(rti::kernels::Lane::Avx2);
    } else {
        throw rti::SimError(rti::ErrorCode::InvalidScenario,
                            "unknown lane '" + lane + "' (expected scalar or avx2)");
    }
}

int cmd_run(const RunArgs& args) {
    rti::Scenario scenario = resolve_scenario(args.scenario);
    apply_lane(args.lane);

    if (args.seed) {
        scenario.seed = *args.seed;
    } else if (!scenario.seed_explicit) {
        if (auto env = env_seed()) scenario.seed = *env;
    }

    bool want_json = false;
    bool want_csv = false;
    bool want_dot = false;
    for (const auto& f : args.formats) {
        if (f == "json") {
            want_json = true;
        } else if (f == "csv") {
            want_csv = true;
        } else if (f == "dot") {
            want_dot = true;
        } else {
            throw rti::SimError(rti::ErrorCode::InvalidScenario,
                                "unknown format '" + f + "' (expected json, csv, or dot)");
        }
    }
    if (args.runs < 1) {
        throw rti::SimError(rti::ErrorCode::InvalidScenario, "--runs must be >= 1");
    }

    const rti::EnsembleResult result = rti::run_ensemble(scenario, args.runs, args.threads);

    const std::string dir = args.out_dir.empty() ? "." : args.out_dir;
    if (want_json) rti::write_file(dir + "/stats.json", rti::stats_json(result.stats));
    if (want_csv) rti::write_file(dir + "/detections.csv", rti::detections_csv(result));
    if (want_dot) {
        rti::write_file(dir + "/causet.dot",
                        result.first_run_causet.export_as(rti::CausetFormat::Dot));
    }

    const auto& stats = result.stats;
    std::cout << "scenario        " << args.scenario << "\n"
              << "runs            " << stats.runs << "\n"
              << "seed            " << scenario.seed << "\n"
              << "detected        " << stats.detected << "\n"
              << "no detection    " << stats.no_detection << "\n";
    if (stats.mean_ticks_to_transaction) {
        std::cout << "mean ticks      " << *stats.mean_ticks_to_transaction << "\n";
    }
    for (const auto& [id, tally] : stats.channels) {
        std::cout << "channel " << std::left << std::setw(8) << id << std::right << tally.detections
                  << " (" << tally.frequency << ")\n";
    }
    for (const auto& [id, tally] : stats.absorbers) {
        std::cout << "absorber " << std::left << std::setw(7) << id << std::right
                  << tally.detections << " (" << tally.frequency << "), nulls " << tally.nulls
                  << "\n";
    }
    return 0;
}

struct ClassifyArgs {
    std::string n;
    double alpha = 0.007;
    double eps_macro = 1e-6;
    double delta_micro = 0.05;
};

int cmd_classify(const ClassifyArgs& args) {
    const rti::BigCount n = rti::BigCount::parse(args.n);
    const rti::ScaleClass result =
        rti::classify(n, args.alpha, {args.eps_macro, args.delta_micro});
    nlohmann::json out;
    out["class"] = rti::to_string(result.regime);
    out["prob_cw"] = result.prob_cw;
    out["prob_no_cw"] = result.prob_no_cw;
    out["log10_prob_no_cw"] = result.log10_prob_no_cw;
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct AmplitudeArgs {
    double m = 1.0;
    std::optional<double> delta;
    double e_initial = 0.0;
    double e_final = 0.0;
    double omega = 0.0;
    std::string sign = "absorption";
    double tau = 1.0;
    std::optional<double> sweep_tau;
    unsigned steps = 200;
    std::string out;
};

rti::TransitionParams amplitude_params(const AmplitudeArgs& args) {
    rti::TransitionParams p;
    p.matrix_element = args.m;
    p.tau = args.tau;
    if (args.delta) {
        // Detuning given directly: encode it as the level gap with no
        // quantum energy.
        p.e_initial = 0.0;
        p.e_final = *args.delta;
        p.omega = 0.0;
        p.sign = rti::TransitionSign::Absorption;
        return p;
    }
    p.e_initial = args.e_initial;
    p.e_final = args.e_final;
    p.omega = args.omega;
    if (args.sign == "absorption") {
        p.sign = rti::TransitionSign::Absorption;
    } else if (args.sign == "emission") {
        p.sign = rti::TransitionSign::Emission;
    } else {
        throw rti::SimError(rti::ErrorCode::InvalidScenario,
                            "--sign must be absorption or emission");
    }
    return p;
}

int cmd_amplitude(const AmplitudeArgs& args) {
    rti::TransitionParams p = amplitude_params(args);

    if (args.sweep_tau) {
        if (!(*args.sweep_tau > 0.0) || args.steps < 2) {
            throw rti::SimError(rti::ErrorCode::InvalidScenario,
                                "sweep needs --sweep-tau > 0 and --steps >= 2");
        }
        std::ostringstream csv;
        csv << "tau,prob\n";
        for (unsigned i = 0; i < args.steps; ++i) {
            p.tau = *args.sweep_tau * static_cast<double>(i) /
                    static_cast<double>(args.steps - 1);
            csv << p.tau << ',' << rti::transition_probability(p).value << "\n";
        }
        if (args.out.empty() || args.out == "-") {
            std::cout << csv.str();
        } else {
            rti::write_file(args.out, csv.str());
        }
        return 0;
    }

    const std::complex<double> c = rti::transition_amplitude(p);
    const rti::TransitionProbability prob = rti::transition_probability(p);
    nlohmann::json out;
    out["re"] = c.real();
    out["im"] = c.imag();
    out["prob"] = prob.value;
    out["clamped"] = prob.clamped;
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct ExportArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::uint64_t run_index = 0;
    std::string format = "dot";
    std::string out = "-";
    std::string lane;
};

int cmd_export_causet(const ExportArgs& args) {
    rti::Scenario scenario = resolve_scenario(args.scenario);
    apply_lane(args.lane);
    if (args.seed) {
        scenario.seed = *args.seed;
    } else if (!scenario.seed_explicit) {
        if (auto env = env_seed()) scenario.seed = *env;
    }

    rti::CausetFormat format = rti::CausetFormat::Dot;
    if (args.format == "json") {
        format = rti::CausetFormat::Json;
    } else if (args.format != "dot") {
        throw rti::SimError(rti::ErrorCode::InvalidScenario,
                            "unknown format '" + args.format + "' (expected dot or json)");
    }

    const rti::CompiledScenario cs = rti::compile(scenario);
    rti::Trajectory trajectory(cs, args.run_index);
    rti::drive(trajectory, rti::StopPolicy::Exhaustion);
    const std::string body = trajectory.causet().export_as(format);
    if (args.out.empty() || args.out == "-") {
        std::cout << body;
    } else {
        rti::write_file(args.out, body);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator of transactional measurement transitions"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run a scenario ensemble and write statistics");
    run->add_option("--scenario", run_args.scenario, "Builtin name or scenario file path")
        ->required();
    run->add_option("--runs", run_args.runs, "Number of independent runs");
    run->add_option("--seed", run_args.seed, "Seed override (highest precedence)");
    run->add_option("--out", run_args.out_dir, "Output directory");
    run->add_option("--format", run_args.formats,
                    "Output formats: json, csv, dot (repeatable)");
    run->add_option("--threads", run_args.threads, "Worker threads (results are identical)");
    run->add_option("--lane", run_args.lane, "Force gate kernel lane: scalar or avx2");

    ClassifyArgs classify_args;
    CLI::App* classify =
        app.add_subcommand("classify", "Classify a constituent count as micro/meso/macro");
    classify->add_option("--n", classify_args.n, "Constituent count (integer or decimal string)")
        ->required();
    classify->add_option("--alpha", classify_args.alpha, "Per-constituent response probability");
    classify->add_option("--eps-macro", classify_args.eps_macro,
                         "Macro bound on the no-response probability");
    classify->add_option("--delta-micro", classify_args.delta_micro,
                         "Micro bound on the response probability");

    AmplitudeArgs amp_args;
    CLI::App* amplitude =
        app.add_subcommand("amplitude", "Evaluate the first-order transition amplitude");
    amplitude->add_option("--m", amp_args.m, "Coupling matrix element");
    amplitude->add_option("--delta", amp_args.delta, "Detuning (overrides level parameters)");
    amplitude->add_option("--e-initial", amp_args.e_initial, "Initial level energy");
    amplitude->add_option("--e-final", amp_args.e_final, "Final level energy");
    amplitude->add_option("--omega", amp_args.omega, "Quantum energy");
    amplitude->add_option("--sign", amp_args.sign, "absorption or emission");
    amplitude->add_option("--tau", amp_args.tau, "Interaction duration");
    amplitude->add_option("--sweep-tau", amp_args.sweep_tau,
                          "Emit CSV sweeping tau from 0 to this value");
    amplitude->add_option("--steps", amp_args.steps, "Sweep sample count");
    amplitude->add_option("--out", amp_args.out, "Sweep CSV path (default stdout)");

    ExportArgs export_args;
    CLI::App* export_causet =
        app.add_subcommand("export-causet", "Run one trajectory and export its causal set");
    export_causet
        ->add_option("--scenario", export_args.scenario, "Builtin name or scenario file path")
        ->required();
    export_causet->add_option("--seed", export_args.seed, "Seed override");
    export_causet->add_option("--run-index", export_args.run_index, "Run stream to replay");
    export_causet->add_option("--format", export_args.format, "dot or json");
    export_causet->add_option("--out", export_args.out, "Output path (default stdout)");
    export_causet->add_option("--lane", export_args.lane, "Force gate kernel lane");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (classify->parsed()) return cmd_classify(classify_args);
        if (amplitude->parsed()) return cmd_amplitude(amp_args);
        if (export_causet->parsed()) return cmd_export_causet(export_args);
    } catch (const rti::SimError& e) {
        std::cerr << rti::error_json(e);
        return exit_code_for(e);
    } catch (const rti::GateRejection& rejection) {
        std::cerr << rti::rejection_json(rejection);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": {\"code\": \"Internal\", \"message\": \"" << e.what()
                  << "\"}}\n";
        return 1;
    }
    return 0;
}
