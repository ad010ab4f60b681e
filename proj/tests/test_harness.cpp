#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "lnt/harness.hpp"

using namespace lnt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("lnt-test-" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cli(const std::string& args) {
    const int status = std::system((std::string(LNT_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command names") {
    for (auto c : {Command::Singular, Command::Shoot, Command::Branch, Command::FindExponent, Command::Continuity,
                   Command::Morse, Command::Hardy, Command::VerifyAll})
        CHECK(command_from_string(to_string(c)) == c);
    CHECK_THROWS_AS(command_from_string("bogus"), DomainError);
}

TEST_CASE("config validation") {
    RunConfig c;
    CHECK_NOTHROW(validate(c));
    c.tol.abs = 0.0;
    CHECK_THROWS_AS(validate(c), DomainError);
    c = {};
    c.command = Command::FindExponent;
    CHECK_THROWS_AS(validate(c), DomainError);
    c.params.R = 1.0;
    CHECK_NOTHROW(validate(c));
    c = {};
    c.command = Command::Continuity;
    CHECK_THROWS_AS(validate(c), DomainError);
    c = {};
    c.sweep = SweepSpec{};
    CHECK_THROWS_AS(validate(c), DomainError);
    c = {};
    c.params.p = 1.5;
    CHECK_THROWS_AS(run(c), DomainError);
}

TEST_CASE("config hash") {
    RunConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.jobs = 7;
    b.out_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.params.p = 21.0;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("row thinning") {
    CHECK(thinned_rows(5, false).size() == 5);
    const auto rows = thinned_rows(123457, false);
    CHECK(rows.size() <= 10001);
    CHECK(rows.front() == 0);
    CHECK(rows.back() == 123456);
    CHECK(thinned_rows(123457, true).size() == 123457);
}

TEST_CASE("bundle round trip") {
    ReportBundle b;
    b.meta["x"] = 1;
    auto c = pass_fail("a", true, "anchor-a");
    c.margins["m"] = 0.5;
    b.add(c);
    b.add(pass_fail("b", false, "anchor-b"));
    CHECK_THROWS_AS(b.add(pass_fail("a", true, "anchor-a")), DomainError);
    CHECK(b.worst() == CheckStatus::Fail);
    CHECK(b.exit_code() == 1);
    const auto back = bundle_from_json(to_json(b));
    REQUIRE(back.checks.size() == 2);
    CHECK(back.checks[0].margins["m"] == 0.5);
    CHECK(back.checks[1].status == CheckStatus::Fail);
    CHECK(to_json(back).dump() == to_json(b).dump());
}

TEST_CASE("identical configurations write identical trajectories") {
    RunConfig c;
    c.command = Command::Singular;
    c.emit = OutputFormat::Csv;
    c.out_dir = scratch("det-a");
    const auto b1 = run(c);
    const auto csv1 = slurp(run_directory(c) / "singular.csv");
    c.out_dir = scratch("det-b");
    run(c);
    const auto csv2 = slurp(run_directory(c) / "singular.csv");
    CHECK(!csv1.empty());
    CHECK(csv1 == csv2);
    CHECK(csv1.rfind("r,u,du,E\n", 0) == 0);
    CHECK(b1.worst() == CheckStatus::Pass);
    CHECK(fs::exists(run_directory(c) / "report.json"));
}

TEST_CASE("verify-all composition") {
    RunConfig c;
    c.command = Command::VerifyAll;
    c.params = {5, 20.0, 1.0};
    c.out_dir = scratch("verify");
    const auto b = run(c);
    for (const char* name : {"origin-sandwich-bound", "energy-nonincreasing", "energy-dissipation-identity",
                             "derivative-bound", "seed-sensitivity", "regular-to-singular-convergence"})
        CHECK(b.find(name) != nullptr);
    std::set<std::string> names;
    for (const auto& ch : b.checks) {
        CHECK(names.insert(ch.name).second);
        if (ch.status != CheckStatus::Info) CHECK(!ch.anchor.empty());
    }
    CHECK(b.worst() == CheckStatus::Pass);
    const auto saved = bundle_from_json(read_json(run_directory(c) / "report.json"));
    CHECK(saved.checks.size() == b.checks.size());
    CHECK(saved.meta["config_hash"] == config_hash(c));
}

TEST_CASE("module errors become FAIL checks") {
    RunConfig c;
    c.command = Command::FindExponent;
    c.params = {5, 20.0, 1.0};
    c.p_cap = 8.0;
    c.out_dir = scratch("err");
    const auto b = run(c);
    CHECK(b.worst() == CheckStatus::Fail);
    REQUIRE(b.find("error") != nullptr);
    CHECK(b.find("error")->status == CheckStatus::Fail);
}

TEST_CASE("p sweep: fresh run, resume, trend") {
    RunConfig c;
    c.command = Command::Singular;
    c.params = {5, 20.0, {}};
    c.sweep = SweepSpec{{5}, {10.0, 20.0, 40.0, 80.0}, {}, {1}};
    c.out_dir = scratch("sweep");
    c.jobs = 3;
    const auto fresh = run(c);
    CHECK(fresh.meta["reused_points"] == 0);
    CHECK(fresh.points.size() == 4);
    const auto* trend = fresh.find("critical-radius-decreasing-N5-i1");
    REQUIRE(trend != nullptr);
    CHECK(trend->status == CheckStatus::Pass);
    CHECK(fresh.worst() == CheckStatus::Pass);

    const auto resumed = run(c);
    CHECK(resumed.meta["reused_points"] == 4);
    CHECK(resumed.find("critical-radius-decreasing-N5-i1")->status == CheckStatus::Pass);
    for (std::size_t k = 0; k < 4; ++k) CHECK(resumed.points[k].dump() == fresh.points[k].dump());
}

TEST_CASE("sweep with a failing point") {
    RunConfig c;
    c.command = Command::Singular;
    c.params = {5, 20.0, {}};
    c.sweep = SweepSpec{{5}, {10.0, 2.0, 40.0}, {}, {1}};  // p = 2 is below the critical exponent
    c.out_dir = scratch("mixed");
    const auto b = run(c);
    CHECK(b.worst() == CheckStatus::Fail);
    CHECK(b.find("sweep-points")->status == CheckStatus::Fail);
    CHECK(b.find("critical-radius-decreasing-N5-i1")->status == CheckStatus::Info);
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch("cli");
    CHECK(cli("bogus --out-dir " + dir.string()) == 2);
    CHECK_FALSE(fs::exists(dir));
    CHECK(cli("find-exponent --N 5 --out-dir " + dir.string()) == 2);
    CHECK_FALSE(fs::exists(dir));
    CHECK(cli("singular --N 5 --p 20 --check-bounds --out-dir " + dir.string()) == 0);
    CHECK(cli("find-exponent --N 5 --R 1 --p-cap 8 --out-dir " + dir.string()) == 1);
    const auto cfg = dir / "run.toml";
    std::ofstream(cfg) << "[singular]\nN = 12\np = 50\n";
    CHECK(cli("--config " + cfg.string() + " singular --p 10 --out-dir " + dir.string()) == 0);
}
