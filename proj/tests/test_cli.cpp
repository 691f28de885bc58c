#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// End-to-end checks of the rti_sim binary: flag handling, exit codes, seed
// precedence, and the file outputs. The binary path is baked in by the build
// as RTI_SIM_PATH.

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include "json.hpp"

#include "rti/amplitudes.hpp"

#include "support/subprocess.hpp"

using nlohmann::json;

namespace {

std::string sim() { return RTI_SIM_PATH; }

std::string tmp_dir(const char* tag) {
    return "/tmp/rti_cli_test." + std::to_string(getpid()) + "." + tag;
}

// Pulls the "seed            <n>" line out of the run summary.
std::string seed_line(const std::string& out) {
    const auto at = out.find("seed");
    if (at == std::string::npos) return "";
    const auto end = out.find('\n', at);
    std::string line = out.substr(at, end - at);
    const auto last_space = line.find_last_of(' ');
    return line.substr(last_space + 1);
}

} // namespace

TEST_CASE("classify emits the scale split as json") {
    const auto r = testutil::run_cmd(sim() + " classify --n 1 --alpha 0.007");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["class"] == "micro");
    CHECK(doc["prob_no_cw"].get<double>() == doctest::Approx(0.993).epsilon(1e-12));
    CHECK(doc["prob_cw"].get<double>() == doctest::Approx(0.007).epsilon(1e-9));
}

TEST_CASE("classify handles mole-scale counts via decimal strings") {
    const auto r = testutil::run_cmd(sim() + " classify --n 1e23");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["class"] == "macro");
    CHECK(doc["prob_no_cw"].get<double>() == 0.0);
    CHECK(doc["log10_prob_no_cw"].get<double>() ==
          doctest::Approx(-3.05075150461882409683e20).epsilon(1e-9));
}

TEST_CASE("classify rejects malformed counts with a machine-readable error") {
    const auto r = testutil::run_cmd(sim() + " classify --n 2.5");
    CHECK(r.exit_code == 1);
    const auto doc = json::parse(r.err);
    CHECK(doc["error"]["code"] == "InvalidCount");
}

TEST_CASE("amplitude agrees with the in-process evaluation") {
    const auto r = testutil::run_cmd(sim() + " amplitude --m 1 --delta 0.5 --tau 1");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);

    rti::TransitionParams p;
    p.matrix_element = 1.0;
    p.e_final = 0.5;
    p.tau = 1.0;
    const auto c = rti::transition_amplitude(p);
    CHECK(doc["re"].get<double>() == doctest::Approx(c.real()).epsilon(1e-15));
    CHECK(doc["im"].get<double>() == doctest::Approx(c.imag()).epsilon(1e-15));
    CHECK(doc["prob"].get<double>() == doctest::Approx(std::norm(c)).epsilon(1e-15));
    CHECK_FALSE(doc["clamped"].get<bool>());
}

TEST_CASE("amplitude sweep writes a csv ramp starting at zero") {
    const auto r = testutil::run_cmd(sim() + " amplitude --m 1 --delta 2 --sweep-tau 1 --steps 5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("tau,prob\n", 0) == 0);
    CHECK(r.out.find("\n0,0\n") != std::string::npos);
    int lines = 0;
    for (char ch : r.out)
        if (ch == '\n') ++lines;
    CHECK(lines == 6); // header + 5 samples
}

TEST_CASE("run writes the requested artifacts and a summary") {
    const auto dir = tmp_dir("run");
    const auto r = testutil::run_cmd(sim() + " run --scenario single --runs 50 --seed 5 --out " +
                                     dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("runs            50") != std::string::npos);
    CHECK(seed_line(r.out) == "5");

    const auto stats = json::parse(testutil::slurp(dir + "/stats.json"));
    CHECK(stats["runs"] == 50);
    CHECK(stats["detected"].get<std::uint64_t>() + stats["no_detection"].get<std::uint64_t>() ==
          50);
    CHECK(testutil::slurp(dir + "/detections.csv").rfind("run,tick,channel,absorber_id,is_null",
                                                         0) == 0);
    CHECK(testutil::slurp(dir + "/causet.dot").rfind("digraph", 0) == 0);
}

TEST_CASE("seed precedence: flag beats environment beats default") {
    const auto dir = tmp_dir("seed");
    const std::string tail = " run --scenario single --runs 1 --out " + dir;

    const auto env_only = testutil::run_cmd("RTI_SIM_SEED=123 " + sim() + tail);
    REQUIRE(env_only.exit_code == 0);
    CHECK(seed_line(env_only.out) == "123");

    const auto flag_wins = testutil::run_cmd("RTI_SIM_SEED=123 " + sim() + tail + " --seed 9");
    REQUIRE(flag_wins.exit_code == 0);
    CHECK(seed_line(flag_wins.out) == "9");

    const auto bad_env = testutil::run_cmd("RTI_SIM_SEED=downstream " + sim() + tail);
    CHECK(bad_env.exit_code == 1);
    CHECK(json::parse(bad_env.err)["error"]["code"] == "InvalidScenario");
}

TEST_CASE("missing scenario files exit 2 with an io error") {
    const auto r = testutil::run_cmd(sim() + " run --scenario /nonexistent/path.json");
    CHECK(r.exit_code == 2);
    CHECK(json::parse(r.err)["error"]["code"] == "IoError");
}

TEST_CASE("usage errors exit nonzero") {
    CHECK(testutil::run_cmd(sim()).exit_code != 0);                        // no subcommand
    CHECK(testutil::run_cmd(sim() + " run").exit_code != 0);               // missing --scenario
    CHECK(testutil::run_cmd(sim() + " classify --n 5 --frobnicate").exit_code != 0);
}

TEST_CASE("the as-proposed scenario is refused with a structured rejection") {
    const auto r = testutil::run_cmd(sim() + " run --scenario maudlin-as-proposed");
    CHECK(r.exit_code == 1);
    const auto doc = json::parse(r.err);
    CHECK(doc["rejection"]["rule"] == "NotAnOfferWave");
    CHECK(doc["rejection"]["message"].get<std::string>().find("bound state") !=
          std::string::npos);
}

TEST_CASE("unknown run formats are rejected") {
    const auto r = testutil::run_cmd(sim() + " run --scenario single --format yaml");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("unknown format") != std::string::npos);
}

TEST_CASE("export-causet emits deterministic dot and json") {
    const std::string cmd = sim() + " export-causet --scenario single --seed 77";
    const auto a = testutil::run_cmd(cmd);
    const auto b = testutil::run_cmd(cmd);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("digraph", 0) == 0);

    const auto j = testutil::run_cmd(cmd + " --format json");
    REQUIRE(j.exit_code == 0);
    const auto doc = json::parse(j.out);
    CHECK(doc.contains("events"));
    CHECK(doc.contains("links"));

    const auto path = tmp_dir("causet") + "/out.dot";
    const auto f = testutil::run_cmd(cmd + " --out " + path);
    REQUIRE(f.exit_code == 0);
    CHECK(testutil::slurp(path) == a.out);
}

TEST_CASE("kernel lanes are selectable and agree") {
    const auto dir_s = tmp_dir("lane_scalar");
    const auto dir_d = tmp_dir("lane_default");
    const std::string tail = " run --scenario maudlin-photon-analog --runs 200 --seed 3 --out ";
    const auto scalar = testutil::run_cmd(sim() + tail + dir_s + " --lane scalar");
    const auto dflt = testutil::run_cmd(sim() + tail + dir_d);
    REQUIRE(scalar.exit_code == 0);
    REQUIRE(dflt.exit_code == 0);
    CHECK(testutil::slurp(dir_s + "/stats.json") == testutil::slurp(dir_d + "/stats.json"));
    CHECK(testutil::slurp(dir_s + "/causet.dot") == testutil::slurp(dir_d + "/causet.dot"));

    const auto bogus = testutil::run_cmd(sim() + tail + dir_s + " --lane sse9");
    CHECK(bogus.exit_code == 1);
}
