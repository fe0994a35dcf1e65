// Command line front end: loads a scenario config, runs the selected
// verification task and prints the report. Exit codes: 0 all checks pass,
// 1 at least one check failed, 2 usage or config error.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "tsb/tasks.hpp"

int main(int argc, char **argv) {
    CLI::App app{"numerical laboratory for weighted Sasaki metrics on tangent "
                 "and tangent-sphere bundles"};
    std::string config_path, format, task;
    int samples = 0;
    std::uint64_t seed = 0;
    double tol = 0;
    app.add_option("--config", config_path, "scenario config file")->required();
    auto *fmt_opt =
        app.add_option("--format", format, "report format: json or table");
    auto *task_opt = app.add_option("--task", task, "task override");
    auto *samples_opt = app.add_option("--samples", samples, "sample count override");
    auto *seed_opt = app.add_option("--seed", seed, "seed override");
    auto *tol_opt = app.add_option("--tol", tol, "primary tolerance override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    tsb::RunReport report;
    std::string out_format = "table";
    try {
        tsb::Config cfg = tsb::Config::parse_file(config_path);
        tsb::CliOverrides ov;
        if (*task_opt) ov.task = task;
        if (*fmt_opt) ov.format = format;
        if (*samples_opt) ov.samples = samples;
        if (*seed_opt) ov.seed = seed;
        if (*tol_opt) ov.tol = tol;
        tsb::Scenario sc = tsb::scenario_from_config(cfg, ov);
        out_format = sc.format;
        report = tsb::run_task(sc);
    } catch (const tsb::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const tsb::ParseError &e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        // numeric failure inside a task: report it as a failed check
        report.add_flag("task-exception", false, e.what());
        std::cout << (out_format == "json" ? tsb::to_json(report) : tsb::to_table(report));
        return 1;
    }

    std::cout << (out_format == "json" ? tsb::to_json(report) : tsb::to_table(report));
    return report.ok() ? 0 : 1;
}
