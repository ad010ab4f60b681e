#include "lnt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace lnt {

std::string to_string(Command c) {
    switch (c) {
        case Command::Singular: return "singular";
        case Command::Shoot: return "shoot";
        case Command::Branch: return "branch";
        case Command::FindExponent: return "find-exponent";
        case Command::Continuity: return "continuity";
        case Command::Morse: return "morse";
        case Command::Hardy: return "hardy";
        case Command::VerifyAll: return "verify-all";
    }
    return "?";
}

Command command_from_string(const std::string& s) {
    for (auto c : {Command::Singular, Command::Shoot, Command::Branch, Command::FindExponent, Command::Continuity,
                   Command::Morse, Command::Hardy, Command::VerifyAll})
        if (to_string(c) == s) return c;
    throw DomainError("unknown command '" + s + "'");
}

void validate(const RunConfig& cfg) {
    validate(cfg.params);
    if (!(cfg.tol.abs > 0.0 && cfg.tol.rel > 0.0)) throw DomainError("tolerances must be positive");
    if (!(cfg.r_end > 0.0)) throw DomainError("r_end must be positive");
    const bool needs_R = cfg.command == Command::Branch || cfg.command == Command::FindExponent;
    if (needs_R && !cfg.params.R) throw DomainError(to_string(cfg.command) + " needs --R");
    if (cfg.command == Command::Continuity && cfg.p_grid.empty()) throw DomainError("continuity needs --p-grid");
    if (cfg.command == Command::Branch && cfg.gamma_list.empty()) throw DomainError("branch needs --gamma-list");
    if (cfg.command == Command::Morse && (cfg.deltas.empty() || cfg.grids.empty()))
        throw DomainError("morse needs --deltas and --grids");
    if (cfg.i < 1) throw DomainError("--i must be >= 1");
    if (cfg.j_max < 1) throw DomainError("--j-max must be >= 1");
    if (cfg.sweep) {
        const auto& s = *cfg.sweep;
        if (s.Ns.empty() && s.ps.empty() && s.gammas.empty() && s.is.empty())
            throw DomainError("sweep grid is empty");
    }
}

json config_json(const RunConfig& cfg) {
    json j;
    j["command"] = to_string(cfg.command);
    j["N"] = cfg.params.N;
    j["p"] = cfg.params.p;
    j["R"] = cfg.params.R ? json(*cfg.params.R) : json(nullptr);
    j["tol_abs"] = cfg.tol.abs;
    j["tol_rel"] = cfg.tol.rel;
    j["r_end"] = cfg.r_end;
    j["check_bounds"] = cfg.check_bounds;
    j["gamma"] = cfg.gamma;
    j["i"] = cfg.i;
    j["gamma_list"] = cfg.gamma_list;
    j["p_bracket"] = {cfg.p_bracket.lo, cfg.p_bracket.hi};
    j["p_lo"] = cfg.p_lo;
    j["p_cap"] = cfg.p_cap;
    j["p_grid"] = cfg.p_grid;
    j["p_grid_fine"] = cfg.p_grid_fine ? json(*cfg.p_grid_fine) : json(nullptr);
    j["deltas"] = cfg.deltas;
    j["grids"] = cfg.grids;
    j["grid_kind"] = to_string(cfg.grid_kind);
    j["eps0"] = cfg.eps0;
    j["j_max"] = cfg.j_max;
    j["emit"] = cfg.emit ? json(*cfg.emit == OutputFormat::Csv ? "csv" : "json") : json(nullptr);
    j["format"] = cfg.format == OutputFormat::Csv ? "csv" : "json";
    j["full"] = cfg.full;
    if (cfg.sweep) {
        j["sweep"] = {{"N", cfg.sweep->Ns}, {"p", cfg.sweep->ps}, {"gamma", cfg.sweep->gammas}, {"i", cfg.sweep->is}};
    }
    return j;
}

std::string config_hash(const RunConfig& cfg) {
    const std::string text = config_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::filesystem::path run_directory(const RunConfig& cfg) { return cfg.out_dir / config_hash(cfg); }

namespace {

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

SolverOptions solver_options(const RunConfig& cfg) {
    SolverOptions o;
    o.tol = cfg.tol;
    return o;
}

Check info(std::string name, std::string anchor, json fixtures = json::object(), std::string message = {}) {
    return {std::move(name), CheckStatus::Info, std::move(anchor), json::object(), std::move(fixtures),
            std::move(message)};
}

Check failure(std::string name, const std::exception& e) {
    return {std::move(name), CheckStatus::Fail, "module-error", json::object(), json::object(), e.what()};
}

void energy_checks(ReportBundle& b, const RadialTrajectory& traj, const ProblemParams& params, const Tolerances& tol,
                   const std::string& prefix) {
    const auto audit = audit_energy(traj, params, tol);
    auto mono = pass_fail(prefix + "energy-nonincreasing", audit.monotone, "energy-nonincreasing");
    mono.margins["worst_increase_over_allowance"] = audit.worst_increase;
    b.add(std::move(mono));
    auto ident = pass_fail(prefix + "energy-dissipation-identity", audit.worst_dissipation_mismatch <= 1e-4,
                           "energy-dissipation-identity");
    ident.margins["worst_relative_mismatch"] = audit.worst_dissipation_mismatch;
    ident.margins["limit"] = 1e-4;
    ident.fixtures["smooth_steps"] = audit.smooth_steps;
    b.add(std::move(ident));
}

void emit_trajectory(ReportBundle& b, const RunConfig& cfg, const RadialTrajectory& traj, const std::string& stem) {
    if (!cfg.emit) return;
    const auto dir = run_directory(cfg);
    if (*cfg.emit == OutputFormat::Csv) {
        write_trajectory_csv(dir / (stem + ".csv"), traj, cfg.full);
        b.artifacts.push_back(stem + ".csv");
    } else {
        write_json(dir / (stem + ".json"), trajectory_json(traj, cfg.full));
        b.artifacts.push_back(stem + ".json");
    }
}

json radii_json(const CriticalRadii& cr) { return cr.radii; }

// Singular solve, reporting a seed-sensitivity failure as a check.
std::optional<SingularSolution> singular_with_check(ReportBundle& b, const ProblemParams& params, double r_end,
                                                    const SolverOptions& so, const std::string& prefix) {
    try {
        auto sol = solve_singular(params, r_end, so);
        auto c = pass_fail(prefix + "seed-sensitivity", sol.sensitivity.passed(), "singular-seed-uniqueness");
        c.margins["difference"] = std::abs(sol.sensitivity.u_seed - sol.sensitivity.u_half_seed);
        c.margins["allowed"] = sol.sensitivity.allowed;
        b.add(std::move(c));
        return sol;
    } catch (const SeedSensitivityError& e) {
        auto c = pass_fail(prefix + "seed-sensitivity", false, "singular-seed-uniqueness");
        c.fixtures["u_seed"] = e.u_seed;
        c.fixtures["u_half_seed"] = e.u_half_seed;
        c.message = e.what();
        b.add(std::move(c));
        return std::nullopt;
    }
}

void bounds_check(ReportBundle& b, const SingularSolution& sol, const std::string& prefix) {
    const auto rep = verify_origin_bounds(sol, 64);
    auto c = pass_fail(prefix + "origin-sandwich-bound", rep.passed, "origin-sandwich-bound");
    c.margins["worst_lower"] = rep.worst_lower_margin;
    c.margins["worst_upper"] = rep.worst_upper_margin;
    c.margins["tolerance"] = rep.tolerance;
    c.fixtures["r_worst_lower"] = rep.r_worst_lower;
    c.fixtures["r_worst_upper"] = rep.r_worst_upper;
    b.add(std::move(c));
}

void singular_summary(ReportBundle& b, const SingularSolution& sol, const std::string& prefix) {
    json fx;
    fx["constants"] = constants_json(sol.constants);
    fx["ctilde"] = sol.ctilde;
    fx["rtilde"] = sol.rtilde;
    fx["seed_radius"] = sol.seed_radius;
    fx["r_p"] = sol.r_p ? json(*sol.r_p) : json(nullptr);
    fx["critical_radii"] = radii_json(sol.critical_radii);
    fx["unit_crossings"] = sol.trajectory.unit_crossings();
    b.add(info(prefix + "singular-solution", "singular-solution-events", fx));
    const auto d = derivative_bound_check(sol);
    json dfx;
    dfx["du_at_rtilde"] = d.du_at_rtilde;
    dfx["scaled_du"] = d.scaled_du;
    dfx["max_correction_ratio"] = d.max_correction_ratio;
    dfx["u_at_rtilde"] = d.u_at_rtilde;
    b.add(info(prefix + "derivative-correction-constant", "origin-derivative-correction", dfx,
               "fitted constant; no reference value exists"));
}

void cmd_singular(ReportBundle& b, const RunConfig& cfg) {
    auto sol = singular_with_check(b, cfg.params, cfg.r_end, solver_options(cfg), "");
    if (!sol) return;
    if (cfg.check_bounds) bounds_check(b, *sol, "");
    energy_checks(b, sol->trajectory, cfg.params, cfg.tol, "");
    singular_summary(b, *sol, "");
    emit_trajectory(b, cfg, sol->trajectory, "singular");
}

void cmd_shoot(ReportBundle& b, const RunConfig& cfg) {
    ShootOptions so;
    so.tol = cfg.tol;
    const auto res = shoot(cfg.gamma, cfg.params, cfg.r_end, so);
    json fx;
    fx["gamma"] = cfg.gamma;
    fx["status"] = to_string(res.status);
    fx["h_start"] = res.h_start;
    fx["critical_radii"] = radii_json(res.critical_radii);
    fx["unit_crossings"] = res.trajectory.unit_crossings();
    b.add(info("shot", "regular-shot", fx, res.message));
    if (res.ok() || res.status == ShotStatus::NonPositive) energy_checks(b, res.trajectory, cfg.params, cfg.tol, "");
    emit_trajectory(b, cfg, res.trajectory, "shot");
}

void cmd_branch(ReportBundle& b, const RunConfig& cfg) {
    ShootOptions so;
    so.tol = cfg.tol;
    std::ostringstream csv;
    csv << "gamma,p\n";
    for (double g : cfg.gamma_list) {
        char gbuf[32];
        std::snprintf(gbuf, sizeof gbuf, "%g", g);
        const std::string name = std::string("branch-sample-gamma-") + gbuf;
        try {
            const auto s = branch_sample(cfg.i, *cfg.params.R, cfg.params.N, g, cfg.p_bracket, so);
            auto c = pass_fail(name, s.residual < 1e-8 && s.p > critical_exponent(cfg.params.N) && s.p < cfg.p_bracket.hi,
                               "branch-critical-radius-root");
            c.margins["residual"] = s.residual;
            c.fixtures["p"] = s.p;
            c.fixtures["r_i"] = s.r_i;
            c.fixtures["evaluations"] = s.evaluations;
            b.add(std::move(c));
            char line[64];
            std::snprintf(line, sizeof line, "%.17g,%.17g\n", g, s.p);
            csv << line;
        } catch (const std::exception& e) {
            b.add(failure(name, e));
        }
    }
    const auto path = run_directory(cfg) / "branch.csv";
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path) << csv.str();
    b.artifacts.push_back("branch.csv");
}

void cmd_find_exponent(ReportBundle& b, const RunConfig& cfg) {
    const double R = *cfg.params.R;
    const auto istar = find_istar({cfg.params.N, cfg.p_lo, std::nullopt}, R, solver_options(cfg));
    b.add(info("istar", "smallest-index-above-R", {{"istar", istar}, {"p_lo", cfg.p_lo}}));
    ExponentOptions eo;
    eo.solver = solver_options(cfg);
    eo.p_cap = cfg.p_cap;
    const auto s = find_exponent(cfg.i, R, cfg.params.N, cfg.p_lo, eo);
    auto res = pass_fail("exponent-residual", s.residual < 1e-6 * R, "critical-radius-equals-R");
    res.margins["residual"] = s.residual;
    res.margins["limit"] = 1e-6 * R;
    res.fixtures["p"] = s.p;
    res.fixtures["bracket"] = {s.bracket_lo, s.bracket_hi};
    res.fixtures["evaluations"] = s.evaluations;
    res.fixtures["retries"] = s.retries;
    b.add(std::move(res));
    auto cc = pass_fail("crossing-count", s.crossings_match(), "unit-crossings-equal-index");
    cc.fixtures["crossings"] = s.crossings;
    cc.fixtures["i"] = cfg.i;
    b.add(std::move(cc));
    b.add(info("derivative-at-R", "neumann-condition-at-R", {{"du_at_R", s.du_at_R}}));
}

void cmd_continuity(ReportBundle& b, const RunConfig& cfg) {
    const auto rep = continuity_scan(cfg.i, cfg.params.N, cfg.p_grid, cfg.p_grid_fine, solver_options(cfg));
    auto c = pass_fail("continuity-refinement", rep.passed, "critical-radius-continuity-in-p");
    c.margins["ratio"] = rep.ratio;
    c.margins["range"] = {1.0 / 3.0, 2.0 / 3.0};
    c.fixtures["coarse_modulus"] = rep.coarse_modulus;
    c.fixtures["fine_modulus"] = rep.fine_modulus;
    c.fixtures["coarse_p"] = rep.coarse_p;
    c.fixtures["coarse_R"] = rep.coarse_R;
    c.fixtures["fine_p"] = rep.fine_p;
    c.fixtures["fine_R"] = rep.fine_R;
    b.add(std::move(c));
    auto j = pass_fail("no-local-jumps", rep.jump_free, "critical-radius-continuity-in-p");
    j.margins["worst_jump_ratio"] = rep.worst_jump_ratio;
    j.margins["limit"] = 10.0;
    b.add(std::move(j));
}

// Singular solution covering [cutoff, R]; R defaults to the first critical radius.
std::pair<SingularSolution, double> solution_for_spectrum(const RunConfig& cfg, double cutoff) {
    SolverOptions so = solver_options(cfg);
    const auto c = derive_constants(cfg.params);
    const double rtilde = choose_ctilde(cfg.params.N, {cfg.params.p, cfg.params.p}) / std::sqrt(cfg.params.p);
    so.seed_radius = std::min(rtilde / 16.0, 0.5 * cutoff);
    (void)c;
    if (cfg.params.R) {
        auto sol = solve_singular(cfg.params, std::max(*cfg.params.R, 2.0 * rtilde), so);
        return {std::move(sol), *cfg.params.R};
    }
    auto sol = solve_until_critical(cfg.params, 1, cfg.r_end, so);
    const double R = sol.critical_radii(1);
    return {std::move(sol), R};
}

void morse_checks(ReportBundle& b, const RunConfig& cfg, const std::vector<std::size_t>& grids, GridKind kind,
                  const std::string& prefix) {
    const auto [sol, R] = solution_for_spectrum(cfg, *std::min_element(cfg.deltas.begin(), cfg.deltas.end()));
    MorseOptions mo;
    mo.grid_kind = kind;
    mo.n_eigs = 2;
    const auto scan = morse_scan(sol.trajectory, cfg.params, R, cfg.deltas, grids, mo);
    const bool finite_side = cfg.params.p > sol.constants.pJL;
    const auto expected = finite_side ? MorseClass::StableTail : MorseClass::Unbounded;
    auto c = pass_fail(prefix + "morse-dichotomy", scan.classification == expected, "morse-index-dichotomy");
    c.fixtures["classification"] = to_string(scan.classification);
    c.fixtures["expected"] = to_string(expected);
    c.fixtures["R"] = R;
    c.fixtures["deltas"] = scan.deltas;
    c.fixtures["counts"] = scan.counts;
    c.fixtures["grid_kind"] = to_string(kind);
    json per = json::array();
    for (const auto& r : scan.reports)
        per.push_back({{"delta", r.cutoff}, {"grid", r.grid_size}, {"count", r.negative_count},
                       {"smallest", r.smallest_eigenvalues}});
    c.fixtures["reports"] = per;
    b.add(std::move(c));
    const bool conv = std::all_of(scan.grid_converged.begin(), scan.grid_converged.end(), [](bool x) { return x; });
    b.add(pass_fail(prefix + "morse-grid-converged", conv, "morse-index-dichotomy"));
}

void hardy_checks(ReportBundle& b, const RunConfig& cfg, const std::string& prefix) {
    SolverOptions so = solver_options(cfg);
    so.seed_radius = 0.5 * hardy_radius(cfg.j_max + 1, cfg.eps0);
    const double rtilde = choose_ctilde(cfg.params.N, {cfg.params.p, cfg.params.p}) / std::sqrt(cfg.params.p);
    const auto sol = solve_singular(cfg.params, 2.0 * rtilde, so);
    const auto q = potential_from_trajectory(sol.trajectory, cfg.params.p);
    const bool infinite_side = cfg.params.p < sol.constants.pJL;
    for (int j = 1; j <= cfg.j_max; ++j) {
        const auto cert = hardy_certificate(j, cfg.eps0, q, sol.constants);
        Check c = infinite_side ? pass_fail(prefix + "hardy-negative-j" + std::to_string(j), cert.negative(),
                                            "hardy-test-function-negativity")
                                : info(prefix + "hardy-negative-j" + std::to_string(j), "hardy-test-function-negativity",
                                       json::object(), "finite-index side: no sign is asserted");
        c.margins["J"] = cert.J;
        c.margins["discrete"] = cert.discrete;
        c.fixtures["J_model"] = cert.J_model;
        c.fixtures["support"] = {cert.r_lo, cert.r_hi};
        b.add(std::move(c));
    }
    const auto th = potential_threshold_check(sol.trajectory, sol.constants, sol.seed_radius, sol.rtilde, cfg.eps0);
    auto lim = pass_fail(prefix + "hardy-threshold-limit", th.limit_rel_error < 1e-3, "linearized-potential-limit");
    lim.margins["relative_error"] = th.limit_rel_error;
    lim.fixtures["observed"] = th.observed;
    lim.fixtures["limit"] = th.limit;
    b.add(std::move(lim));
    auto side = pass_fail(prefix + "hardy-threshold-side", th.above == infinite_side, "linearized-potential-vs-hardy");
    side.margins["margin"] = th.margin;
    side.margins["eps_margin"] = th.eps_margin;
    side.fixtures["hardy_constant"] = th.hardy_constant;
    b.add(std::move(side));
}

void cmd_verify_all(ReportBundle& b, const RunConfig& cfg) {
    const auto& P = cfg.params;
    b.add(info("constants", "derived-constants", constants_json(derive_constants(P))));
    auto guarded = [&](const std::string& section, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            b.add(failure(section + "-error", e));
        }
    };
    guarded("singular", [&] {
        auto so = solver_options(cfg);
        auto sol = singular_with_check(b, P, cfg.r_end, so, "");
        if (!sol) return;
        bounds_check(b, *sol, "");
        energy_checks(b, sol->trajectory, P, cfg.tol, "");
        singular_summary(b, *sol, "");
    });
    guarded("derivative", [&] {
        const auto sw = derivative_bound_sweep(P.N, {P.p, 4.0 * P.p, 16.0 * P.p}, solver_options(cfg));
        auto c = pass_fail("derivative-bound", sw.bounded, "origin-derivative-decay");
        c.margins["max_scaled_du"] = sw.max_scaled_du;
        c.margins["min_scaled_du"] = sw.min_scaled_du;
        json pts = json::array();
        for (const auto& pt : sw.points) pts.push_back({{"p", pt.p}, {"scaled_du", pt.scaled_du}, {"u", pt.u_at_rtilde}});
        c.fixtures["points"] = pts;
        b.add(std::move(c));
        b.add(pass_fail("value-at-rtilde-tends-to-one", sw.u_tends_to_one, "origin-derivative-decay"));
    });
    guarded("shot", [&] {
        ShootOptions so;
        so.tol = cfg.tol;
        const auto res = shoot(cfg.gamma, P, cfg.r_end, so);
        if (!res.ok()) throw NumericalError("shot " + to_string(res.status) + ": " + res.message);
        energy_checks(b, res.trajectory, P, cfg.tol, "shot-");
    });
    guarded("convergence", [&] {
        const double a = P.R ? 0.5 * *P.R : 0.5, bb = P.R ? 2.0 * *P.R : 2.0;
        ConvergenceOptions co;
        co.tol = cfg.tol;
        const auto rep = convergence_to_singular(P, {10.0, 100.0, 1000.0}, a, bb, co);
        auto c = pass_fail("regular-to-singular-convergence", rep.passed && rep.halves(), "regular-to-singular-convergence");
        json d = json::array(), nd = json::array();
        for (const auto& x : rep.distances) d.push_back(x ? json(*x) : json(nullptr));
        for (const auto& x : rep.naive_distances) nd.push_back(x ? json(*x) : json(nullptr));
        c.fixtures["gammas"] = rep.gammas;
        c.fixtures["distances"] = d;
        c.fixtures["naive_distances"] = nd;
        b.add(std::move(c));
    });
    guarded("morse", [&] { morse_checks(b, cfg, {1u << 12, 1u << 13}, GridKind::Geometric, ""); });
    guarded("hardy", [&] { hardy_checks(b, cfg, ""); });
}

ReportBundle run_unpersisted(const RunConfig& cfg) {
    validate(cfg);
    ReportBundle b;
    b.meta["command"] = to_string(cfg.command);
    b.meta["config_hash"] = config_hash(cfg);
    b.meta["timestamp"] = timestamp();
    b.meta["tolerances"] = {{"abs", cfg.tol.abs}, {"rel", cfg.tol.rel}};
    b.meta["config"] = config_json(cfg);
    try {
        switch (cfg.command) {
            case Command::Singular: cmd_singular(b, cfg); break;
            case Command::Shoot: cmd_shoot(b, cfg); break;
            case Command::Branch: cmd_branch(b, cfg); break;
            case Command::FindExponent: cmd_find_exponent(b, cfg); break;
            case Command::Continuity: cmd_continuity(b, cfg); break;
            case Command::Morse: morse_checks(b, cfg, cfg.grids, cfg.grid_kind, ""); break;
            case Command::Hardy: hardy_checks(b, cfg, ""); break;
            case Command::VerifyAll: cmd_verify_all(b, cfg); break;
        }
    } catch (const std::exception& e) {
        b.add(failure("error", e));
    }
    return b;
}

void persist(ReportBundle& b, const RunConfig& cfg, const std::string& name) {
    b.artifacts.push_back(name);
    write_json(run_directory(cfg) / name, to_json(b));
}

std::string point_key(int N, double p, double gamma, std::size_t i) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "N=%d,p=%.17g,gamma=%.17g,i=%zu", N, p, gamma, i);
    return buf;
}

}  // namespace

ReportBundle run(const RunConfig& cfg) {
    if (cfg.sweep) return sweep(cfg);
    auto b = run_unpersisted(cfg);
    persist(b, cfg, "report.json");
    return b;
}

ReportBundle sweep(const RunConfig& cfg) {
    if (!cfg.sweep) throw DomainError("sweep needs a grid");
    validate(cfg);
    const auto& s = *cfg.sweep;
    const auto Ns = s.Ns.empty() ? std::vector<int>{cfg.params.N} : s.Ns;
    const auto ps = s.ps.empty() ? std::vector<double>{cfg.params.p} : s.ps;
    const auto gs = s.gammas.empty() ? std::vector<double>{cfg.gamma} : s.gammas;
    const auto is = s.is.empty() ? std::vector<std::size_t>{cfg.i} : s.is;

    struct Point {
        std::string key;
        RunConfig cfg;
    };
    std::vector<Point> grid;
    for (int N : Ns)
        for (double p : ps)
            for (double g : gs)
                for (std::size_t i : is) {
                    RunConfig sub = cfg;
                    sub.sweep.reset();
                    sub.params.N = N;
                    sub.params.p = p;
                    sub.gamma = g;
                    sub.i = i;
                    grid.push_back({point_key(N, p, g, i), std::move(sub)});
                }

    const auto bundle_path = run_directory(cfg) / "sweep.json";
    std::map<std::string, json> done;
    if (std::filesystem::exists(bundle_path)) {
        const auto old = bundle_from_json(read_json(bundle_path));
        for (const auto& pt : old.points)
            if (pt.value("complete", false)) done[pt.at("key").get<std::string>()] = pt;
    }

    std::vector<json> results(grid.size());
    std::vector<std::size_t> todo;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (auto it = done.find(grid[k].key); it != done.end()) results[k] = it->second;
        else todo.push_back(k);
    }

    unsigned jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, todo.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < todo.size(); t = next++) {
            const auto& pt = grid[todo[t]];
            json rec;
            rec["key"] = pt.key;
            rec["N"] = pt.cfg.params.N;
            rec["p"] = pt.cfg.params.p;
            rec["gamma"] = pt.cfg.gamma;
            rec["i"] = pt.cfg.i;
            try {
                auto b = run(pt.cfg);
                rec["status"] = to_string(b.worst());
                rec["run"] = config_hash(pt.cfg);
                if (const auto* c = b.find("singular-solution")) {
                    rec["critical_radii"] = c->fixtures.value("critical_radii", json::array());
                    rec["r_p"] = c->fixtures.value("r_p", json(nullptr));
                }
            } catch (const std::exception& e) {
                rec["status"] = "FAIL";
                rec["message"] = e.what();
            }
            rec["complete"] = true;
            results[todo[t]] = std::move(rec);
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
    }

    ReportBundle b;
    b.meta["command"] = to_string(cfg.command);
    b.meta["config_hash"] = config_hash(cfg);
    b.meta["timestamp"] = timestamp();
    b.meta["tolerances"] = {{"abs", cfg.tol.abs}, {"rel", cfg.tol.rel}};
    b.meta["config"] = config_json(cfg);
    b.meta["reused_points"] = grid.size() - todo.size();
    for (auto& r : results) b.points.push_back(r);

    std::size_t failed = 0;
    for (const auto& r : results)
        if (r.value("status", "FAIL") == "FAIL") ++failed;
    auto pts = pass_fail("sweep-points", failed == 0, "sweep-completeness");
    pts.margins["failed"] = failed;
    pts.margins["total"] = results.size();
    b.add(std::move(pts));

    if (cfg.command == Command::Singular) {
        // R_p^i decreasing in p, per (N, i, gamma-independent) group
        for (int N : Ns)
            for (std::size_t i : is) {
                std::vector<double> Rs;
                bool complete = true;
                for (double p : ps) {
                    const auto& r = results[std::find_if(grid.begin(), grid.end(), [&](const Point& pt) {
                                                return pt.key == point_key(N, p, gs.front(), i);
                                            }) - grid.begin()];
                    const auto radii = r.value("critical_radii", json::array());
                    if (r.value("status", "FAIL") == "FAIL" || radii.size() < i) {
                        complete = false;
                        break;
                    }
                    Rs.push_back(radii[i - 1].get<double>());
                }
                const std::string name = "critical-radius-decreasing-N" + std::to_string(N) + "-i" + std::to_string(i);
                if (!complete || ps.size() < 2) {
                    b.add(info(name, "critical-radius-decreasing-in-p", json::object(),
                               "incomplete grid; trend not assessed"));
                    continue;
                }
                bool dec = true;
                for (std::size_t k = 1; k < Rs.size(); ++k)
                    if (!(Rs[k] < Rs[k - 1])) dec = false;
                auto c = pass_fail(name, dec, "critical-radius-decreasing-in-p");
                c.fixtures["p"] = ps;
                c.fixtures["R"] = Rs;
                b.add(std::move(c));
            }
    }
    persist(b, cfg, "sweep.json");
    return b;
}

std::string summary(const ReportBundle& bundle) {
    std::ostringstream out;
    for (const auto& c : bundle.checks) {
        out << to_string(c.status) << ' ' << c.name << " [" << c.anchor << ']';
        if (!c.message.empty()) out << ' ' << c.message;
        out << '\n';
    }
    out << "overall " << to_string(bundle.worst()) << '\n';
    return out.str();
}

}  // namespace lnt
