#include "lnt/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace lnt {

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "PASS";
        case CheckStatus::Fail: return "FAIL";
        case CheckStatus::Info: return "INFO";
    }
    return "?";
}

CheckStatus check_status_from_string(const std::string& s) {
    if (s == "PASS") return CheckStatus::Pass;
    if (s == "FAIL") return CheckStatus::Fail;
    if (s == "INFO") return CheckStatus::Info;
    throw DomainError("unknown check status '" + s + "'");
}

json to_json(const Check& c) {
    json j;
    j["name"] = c.name;
    j["status"] = to_string(c.status);
    j["anchor"] = c.anchor;
    j["margins"] = c.margins;
    j["fixtures"] = c.fixtures;
    if (!c.message.empty()) j["message"] = c.message;
    return j;
}

Check check_from_json(const json& j) {
    Check c;
    c.name = j.at("name").get<std::string>();
    c.status = check_status_from_string(j.at("status").get<std::string>());
    c.anchor = j.value("anchor", "");
    c.margins = j.value("margins", json::object());
    c.fixtures = j.value("fixtures", json::object());
    c.message = j.value("message", "");
    return c;
}

Check& ReportBundle::add(Check c) {
    for (auto& existing : checks)
        if (existing.name == c.name) throw DomainError("duplicate check name '" + c.name + "'");
    checks.push_back(std::move(c));
    return checks.back();
}

CheckStatus ReportBundle::worst() const {
    for (const auto& c : checks)
        if (c.status == CheckStatus::Fail) return CheckStatus::Fail;
    return CheckStatus::Pass;
}

const Check* ReportBundle::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

json to_json(const ReportBundle& b) {
    json j;
    j["meta"] = b.meta;
    j["status"] = to_string(b.worst());
    j["checks"] = json::array();
    for (const auto& c : b.checks) j["checks"].push_back(to_json(c));
    j["artifacts"] = b.artifacts;
    if (!b.points.empty()) j["points"] = b.points;
    return j;
}

ReportBundle bundle_from_json(const json& j) {
    ReportBundle b;
    b.meta = j.value("meta", json::object());
    for (const auto& c : j.value("checks", json::array())) b.checks.push_back(check_from_json(c));
    b.artifacts = j.value("artifacts", std::vector<std::string>{});
    b.points = j.value("points", json::array());
    return b;
}

void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return json::parse(in);
}

json constants_json(const DerivedConstants& c) {
    json j;
    j["theta"] = c.theta;
    j["A"] = c.A;
    j["m"] = c.m;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["Dp"] = c.Dp;
    j["pS"] = c.pS;
    if (std::isinf(c.pJL)) j["pJL"] = "inf";
    else j["pJL"] = c.pJL;
    j["regime"] = std::string(to_string(c.regime));
    return j;
}

std::vector<std::size_t> thinned_rows(std::size_t n, bool full, std::size_t max_rows) {
    std::vector<std::size_t> rows;
    if (n == 0) return rows;
    const std::size_t stride = full || n <= max_rows ? 1 : (n + max_rows - 2) / (max_rows - 1);
    for (std::size_t k = 0; k < n; k += stride) rows.push_back(k);
    if (rows.back() != n - 1) rows.push_back(n - 1);
    return rows;
}

void write_trajectory_csv(const std::filesystem::path& path, const RadialTrajectory& traj, bool full) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path.string());
    std::fputs("r,u,du,E\n", f);
    const auto& s = traj.samples();
    const auto& e = traj.energy();
    for (std::size_t k : thinned_rows(s.size(), full))
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", s[k].r, s[k].u, s[k].du, e[k]);
    std::fclose(f);
}

json trajectory_json(const RadialTrajectory& traj, bool full) {
    json j;
    json r = json::array(), u = json::array(), du = json::array(), E = json::array();
    const auto& s = traj.samples();
    for (std::size_t k : thinned_rows(s.size(), full)) {
        r.push_back(s[k].r);
        u.push_back(s[k].u);
        du.push_back(s[k].du);
        E.push_back(traj.energy()[k]);
    }
    j["r"] = r;
    j["u"] = u;
    j["du"] = du;
    j["E"] = E;
    j["unit_crossings"] = traj.unit_crossings();
    json crit = json::array();
    for (const auto& cp : traj.critical_points())
        crit.push_back({{"r", cp.r}, {"kind", cp.kind == CriticalKind::Min ? "min" : "max"}, {"u", cp.u}});
    j["critical_points"] = crit;
    return j;
}

}  // namespace lnt
