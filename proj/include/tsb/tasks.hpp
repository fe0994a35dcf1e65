// Scenario execution: builds the geometry from a parsed config and runs the
// selected verification task, producing a RunReport.
#pragma once

#include "tsb/chern_weil.hpp"
#include "tsb/config.hpp"
#include "tsb/homothety.hpp"
#include "tsb/integrability.hpp"
#include "tsb/report.hpp"

namespace tsb {

struct CliOverrides {
    std::optional<std::string> task;
    std::optional<std::string> format;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

struct SpaceformParams {
    int sign = 1;
    double R = 1, s = 1, f1 = 1, f2 = 1;
    int m = 3;
};

struct HomothetyConfig {
    ScalarExpr source_phi, phi, t;
    ScalarExpr target_phi1, target_phi2;
    std::optional<std::string> expected;
    std::optional<double> expected_psi;
};

struct Scenario {
    std::string task;
    std::string format = "table";
    int samples = 100;
    std::uint64_t seed = 0;
    std::optional<double> tol;

    std::optional<ChartedManifold> manifold;
    ConnectionSpec connection;
    ScalarExpr phi1 = ScalarExpr::constant(0.0), phi2 = ScalarExpr::constant(0.0);
    ScalarExpr radius_r = ScalarExpr::constant(1.0), radius_s = ScalarExpr::constant(1.0);
    std::optional<SpaceformParams> spaceform;
    std::optional<HomothetyConfig> homothety;
    SampleParams sampling;

    double tol_or(double fallback) const { return tol ? *tol : fallback; }
};

// Consumes the config (schema validation included) and applies CLI overrides.
Scenario scenario_from_config(Config &cfg, const CliOverrides &ov);

// Runs one task ("all" fans out and prefixes check names).
RunReport run_task(const Scenario &sc);

// Individual tasks (exposed for tests and the acceptance suite).
RunReport task_curvature(const Scenario &sc);
RunReport task_tm_homothety(const Scenario &sc);
RunReport task_srm_homothety(const Scenario &sc);
RunReport task_scal_spaceform(const Scenario &sc);
RunReport task_radius_search(const Scenario &sc);
RunReport task_integrability(const Scenario &sc);
RunReport task_dmu_identity(const Scenario &sc);
RunReport task_chern_weil(const Scenario &sc);
RunReport task_einstein_check(const Scenario &sc);

const std::vector<std::string> &task_names();

} // namespace tsb
