// Run reports: one line per check with the measured value, its threshold and
// an optional witness note. JSON output is deterministic for fixed inputs
// (report_version 1); the table format additionally carries wall time.
#pragma once

#include <string>
#include <vector>

namespace tsb {

struct CheckResult {
    std::string name;
    double measured = 0;
    double threshold = 0;
    bool pass = false;
    std::string note; // witness or context, empty when not needed
};

struct RunReport {
    std::string task;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<CheckResult> checks;
    double wall_ms = 0;

    bool ok() const {
        for (const auto &c : checks)
            if (!c.pass) return false;
        return true;
    }
    void add(CheckResult c) { checks.push_back(std::move(c)); }
    // pass when measured <= threshold
    void add_max(const std::string &name, double measured, double threshold,
                 const std::string &note = "");
    // pass when measured >= threshold
    void add_min(const std::string &name, double measured, double threshold,
                 const std::string &note = "");
    void add_flag(const std::string &name, bool pass, const std::string &note = "");
};

std::string to_json(const RunReport &report);
std::string to_table(const RunReport &report);

} // namespace tsb
