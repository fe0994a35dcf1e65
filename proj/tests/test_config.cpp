#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tsb/tasks.hpp"

using namespace tsb;

namespace {

Scenario scenario_of(const std::string &text, CliOverrides ov = {}) {
    Config cfg = Config::parse_text(text);
    return scenario_from_config(cfg, ov);
}

const char *kMinimal = R"cfg(
[run]
task = integrability
samples = 10
)cfg";

} // namespace

TEST_SUITE("config") {

TEST_CASE("parses sections, numbers, lists and quoted expressions") {
    Config cfg = Config::parse_text(R"cfg(
# comment
[run]
task = curvature        # trailing comment
samples = 12

[manifold]
dim = 2
metric = conformally-flat
factor = "exp(2*x1)"    # the '#' inside quotes stays: no, it's outside
box_min = -1, -1
box_max = 1, 1
)cfg");
    CliOverrides ov;
    Scenario sc = scenario_from_config(cfg, ov);
    CHECK(sc.task == "curvature");
    CHECK(sc.samples == 12);
    CHECK(sc.manifold.has_value());
    CHECK(sc.manifold->family() == MetricFamily::ConformallyFlat);
}

TEST_CASE("unknown keys are rejected with their location") {
    CHECK_THROWS_WITH_AS(scenario_of("[run]\ntask = integrability\nbogus = 1\n"),
                         doctest::Contains("unknown key 'bogus'"), ConfigError);
    CHECK_THROWS_WITH_AS(scenario_of("[nonsense]\nkey = 1\n[run]\ntask = integrability\n"),
                         doctest::Contains("unknown key"), ConfigError);
}

TEST_CASE("malformed configs raise errors naming the line") {
    CHECK_THROWS_WITH_AS(Config::parse_text("[run\ntask = x\n"),
                         doctest::Contains("1"), ConfigError);
    CHECK_THROWS_WITH_AS(Config::parse_text("task = x\n"),
                         doctest::Contains("outside of any"), ConfigError);
    CHECK_THROWS_WITH_AS(Config::parse_text("[run]\ntask\n"), doctest::Contains("key = value"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(Config::parse_text("[run]\ntask = a\ntask = b\n"),
                         doctest::Contains("duplicate"), ConfigError);
}

TEST_CASE("expression errors carry the parse position") {
    const char *text = R"cfg(
[run]
task = curvature
[manifold]
dim = 2
metric = conformally-flat
factor = "exp("
)cfg";
    CHECK_THROWS_AS(scenario_of(text), ParseError);
}

TEST_CASE("task and parameter validation") {
    CHECK_THROWS_WITH_AS(scenario_of("[run]\ntask = no-such-task\n"),
                         doctest::Contains("unknown task"), ConfigError);
    CHECK_THROWS_WITH_AS(scenario_of("[run]\nsamples = 5\n"),
                         doctest::Contains("no task selected"), ConfigError);
    CHECK_THROWS_WITH_AS(scenario_of("[run]\ntask = integrability\nformat = yaml\n"),
                         doctest::Contains("format"), ConfigError);
    CliOverrides ov;
    ov.task = "curvature";
    CHECK_THROWS_WITH_AS(scenario_of("[run]\nsamples = 5\n", ov),
                         doctest::Contains("[manifold]"), ConfigError);
}

TEST_CASE("explicit metrics demand every diagonal entry") {
    const char *text = R"cfg(
[run]
task = curvature
[manifold]
dim = 2
metric = explicit
g_1_1 = "1"
)cfg";
    CHECK_THROWS_WITH_AS(scenario_of(text), doctest::Contains("g_2_2"), ConfigError);
}

TEST_CASE("overrides replace config values") {
    CliOverrides ov;
    ov.samples = 33;
    ov.seed = 5;
    ov.format = std::string("json");
    Scenario sc = scenario_of(kMinimal, ov);
    CHECK(sc.samples == 33);
    CHECK(sc.seed == 5);
    CHECK(sc.format == "json");
}

TEST_CASE("reports serialize deterministically and carry the version") {
    Scenario sc = scenario_of(kMinimal);
    sc.samples = 8;
    RunReport rep = run_task(sc);
    const std::string a = to_json(rep);
    RunReport rep2 = run_task(sc);
    rep2.wall_ms = rep.wall_ms + 123; // wall time must not enter the JSON
    const std::string b = to_json(rep2);
    CHECK(a == b);
    auto j = nlohmann::json::parse(a);
    CHECK(j["report_version"] == 1);
    CHECK(j["status"] == "pass");
    CHECK(j["checks"].is_array());
}

} // TEST_SUITE

// ---------------------------------------------------------------------------
// End-to-end CLI tests: spawn the built binary against the shipped configs.

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string &args) {
    const char *bin = std::getenv("TSBLAB_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "TSBLAB_BIN must point at the tsblab binary");
    const std::string tmp = "cli_out.tmp";
    const std::string cmd = std::string(bin) + " " + args + " > " + tmp + " 2>&1";
    const int rc = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WEXITSTATUS(rc);
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
    std::remove(tmp.c_str());
    return res;
}

std::string src_path(const std::string &rel) {
    const char *src = std::getenv("TSBLAB_SRC");
    REQUIRE_MESSAGE(src != nullptr, "TSBLAB_SRC must point at the repository root");
    return std::string(src) + "/" + rel;
}

void compare_structurally(const nlohmann::json &a, const nlohmann::json &b,
                          const std::string &where) {
    REQUIRE_MESSAGE(a.type() == b.type(), "type mismatch at ", where);
    if (a.is_object()) {
        REQUIRE_MESSAGE(a.size() == b.size(), "object size mismatch at ", where);
        for (auto it = a.begin(); it != a.end(); ++it) {
            REQUIRE_MESSAGE(b.contains(it.key()), "missing key at ", where, "/", it.key());
            compare_structurally(it.value(), b[it.key()], where + "/" + it.key());
        }
    } else if (a.is_array()) {
        REQUIRE_MESSAGE(a.size() == b.size(), "array size mismatch at ", where);
        for (std::size_t i = 0; i < a.size(); ++i)
            compare_structurally(a[i], b[i], where + "[" + std::to_string(i) + "]");
    } else if (a.is_number_float()) {
        const double x = a.get<double>(), y = b.get<double>();
        CHECK_MESSAGE(std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)}),
                      "value drift at ", where, ": ", x, " vs ", y);
    } else {
        CHECK_MESSAGE(a == b, "mismatch at ", where);
    }
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("every shipped config runs green") {
    for (const char *conf :
         {"configs/curvature.conf", "configs/scal-spaceform.conf", "configs/radius-search.conf",
          "configs/tm-homothety.conf", "configs/srm-homothety.conf",
          "configs/integrability.conf", "configs/dmu-identity.conf", "configs/chern-weil.conf",
          "configs/einstein-check.conf"}) {
        CliResult res = run_cli("--config " + src_path(conf));
        INFO(conf, "\n", res.output);
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("status: pass") != std::string::npos);
    }
}

TEST_CASE("exit code 2 for config and usage errors") {
    CHECK(run_cli("--config /nonexistent.conf").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);

    std::ofstream bad("bad.conf");
    bad << "[run]\ntask = curvature\n[manifold]\ndim = 2\nmetric = "
           "conformally-flat\nfactor = \"exp(\"\n";
    bad.close();
    CliResult res = run_cli("--config bad.conf");
    CHECK(res.exit_code == 2);
    std::remove("bad.conf");

    std::ofstream unknown("unknown.conf");
    unknown << "[run]\ntask = integrability\nwhat = 1\n";
    unknown.close();
    CHECK(run_cli("--config unknown.conf").exit_code == 2);
    std::remove("unknown.conf");
}

TEST_CASE("exit code 1 when a check fails, with a witness in the report") {
    // srm-homothety with a wrong weight power: expected isometry fails
    std::ofstream f("failing.conf");
    f << R"cfg([run]
task = srm-homothety
samples = 40
[manifold]
dim = 3
metric = sphere-stereographic
R = 1
[radius]
r = "1 + 0.3*sin(x1)"
s = "1/(1 + 0.3*sin(x1))"
[homothety]
phi = "0"
target_phi2 = "2.05*ln(1 + 0.3*sin(x1))"
expected = isometry
)cfg";
    f.close();
    CliResult res = run_cli("--config failing.conf --format json");
    CHECK(res.exit_code == 1);
    auto j = nlohmann::json::parse(res.output);
    CHECK(j["status"] == "fail");
    bool witness_found = false;
    for (const auto &c : j["checks"])
        if (c.contains("witness")) witness_found = true;
    CHECK(witness_found);
    std::remove("failing.conf");
}

TEST_CASE("fixed seeds give byte-identical JSON reports") {
    const std::string args =
        "--config " + src_path("configs/srm-homothety.conf") + " --format json --seed 7";
    CliResult a = run_cli(args);
    CliResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.find("\"report_version\": 1") != std::string::npos);
    // a different seed still passes but resamples
    CliResult c = run_cli("--config " + src_path("configs/srm-homothety.conf") +
                          " --format json --seed 8");
    CHECK(c.exit_code == 0);
}

TEST_CASE("reports match the pinned golden files up to numeric noise") {
    for (const char *name : {"scal-spaceform", "integrability"}) {
        CliResult res = run_cli("--config " + src_path(std::string("configs/") + name +
                                                       ".conf") +
                                " --format json");
        REQUIRE(res.exit_code == 0);
        std::ifstream gf(src_path(std::string("tests/golden/") + name + ".json"));
        REQUIRE_MESSAGE(gf.good(), "missing golden file for ", name);
        nlohmann::json want = nlohmann::json::parse(gf);
        nlohmann::json got = nlohmann::json::parse(res.output);
        compare_structurally(want, got, name);
    }
}

TEST_CASE("--task all composes the runnable tasks") {
    CliResult res = run_cli("--config " + src_path("configs/curvature.conf") +
                            " --task all --samples 8 --format json");
    INFO(res.output);
    CHECK(res.exit_code == 0);
    auto j = nlohmann::json::parse(res.output);
    bool has_curvature = false, has_integrability = false;
    for (const auto &c : j["checks"]) {
        const std::string n = c["name"];
        if (n.rfind("curvature/", 0) == 0) has_curvature = true;
        if (n.rfind("integrability/", 0) == 0) has_integrability = true;
    }
    CHECK(has_curvature);
    CHECK(has_integrability);
}

} // TEST_SUITE
