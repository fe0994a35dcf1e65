#include "tsb/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace tsb {

void RunReport::add_max(const std::string &name, double measured, double threshold,
                        const std::string &note) {
    checks.push_back({name, measured, threshold, measured <= threshold, note});
}

void RunReport::add_min(const std::string &name, double measured, double threshold,
                        const std::string &note) {
    checks.push_back({name, measured, threshold, measured >= threshold, note});
}

void RunReport::add_flag(const std::string &name, bool pass, const std::string &note) {
    checks.push_back({name, pass ? 1.0 : 0.0, 1.0, pass, note});
}

std::string to_json(const RunReport &report) {
    nlohmann::ordered_json j;
    j["report_version"] = 1;
    j["task"] = report.task;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto &[k, v] : report.inputs) inputs[k] = v;
    j["inputs"] = inputs;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto &c : report.checks) {
        nlohmann::ordered_json jc;
        jc["name"] = c.name;
        jc["measured"] = c.measured;
        jc["threshold"] = c.threshold;
        jc["pass"] = c.pass;
        if (!c.note.empty()) jc["witness"] = c.note;
        checks.push_back(jc);
    }
    j["checks"] = checks;
    j["status"] = report.ok() ? "pass" : "fail";
    return j.dump(2) + "\n";
}

std::string to_table(const RunReport &report) {
    std::string out;
    char buf[256];
    out += "task: " + report.task + "\n";
    for (const auto &[k, v] : report.inputs) out += "  " + k + " = " + v + "\n";
    std::size_t width = 4;
    for (const auto &c : report.checks) width = std::max(width, c.name.size());
    for (const auto &c : report.checks) {
        std::snprintf(buf, sizeof(buf), "%-*s  %-4s  measured=%-13.6g threshold=%-10.4g %s\n",
                      (int)width, c.name.c_str(), c.pass ? "PASS" : "FAIL", c.measured,
                      c.threshold, c.note.c_str());
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "status: %s  (%.1f ms)\n", report.ok() ? "pass" : "fail",
                  report.wall_ms);
    out += buf;
    return out;
}

} // namespace tsb
