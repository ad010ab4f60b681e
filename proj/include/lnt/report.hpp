#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lnt/params.hpp"
#include "lnt/radial_ode.hpp"

namespace lnt {

using json = nlohmann::ordered_json;

enum class CheckStatus { Pass, Fail, Info };

std::string to_string(CheckStatus s);
CheckStatus check_status_from_string(const std::string& s);

struct Check {
    std::string name;
    CheckStatus status = CheckStatus::Info;
    std::string anchor;  // identifier of the property under test
    json margins = json::object();
    json fixtures = json::object();
    std::string message;
};

json to_json(const Check& c);
Check check_from_json(const json& j);

inline Check pass_fail(std::string name, bool ok, std::string anchor) {
    return {std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(anchor), json::object(),
            json::object(), {}};
}

struct ReportBundle {
    json meta = json::object();  // config hash, timestamp, tolerances, command
    std::vector<Check> checks;
    std::vector<std::string> artifacts;
    json points = json::array();  // sweep points (sweeps only)

    Check& add(Check c);
    /// Fail if any check failed, otherwise Pass.
    CheckStatus worst() const;
    int exit_code() const { return worst() == CheckStatus::Fail ? 1 : 0; }
    const Check* find(const std::string& name) const;
};

json to_json(const ReportBundle& b);
ReportBundle bundle_from_json(const json& j);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

json constants_json(const DerivedConstants& c);

/// Rows kept when serializing a trajectory: every step with `full`,
/// otherwise an even stride that keeps at most `max_rows` (last row always kept).
std::vector<std::size_t> thinned_rows(std::size_t n, bool full, std::size_t max_rows = 10000);

/// CSV with the fixed header `r,u,du,E` (schema trajectory-csv/1).
void write_trajectory_csv(const std::filesystem::path& path, const RadialTrajectory& traj, bool full);
json trajectory_json(const RadialTrajectory& traj, bool full);

}  // namespace lnt
