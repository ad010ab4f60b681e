#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "lnt/harness.hpp"

using namespace lnt;

namespace {

const std::map<std::string, OutputFormat> kFormats{{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}};
const std::map<std::string, GridKind> kGridKinds{{"uniform", GridKind::Uniform}, {"geometric", GridKind::Geometric}};

struct Flags {
    RunConfig cfg;
    std::optional<double> R;
    std::optional<double> tol;
    std::optional<std::string> emit;
    std::string format = "json";
    std::vector<double> p_bracket;
    std::vector<double> p_grid_fine;
    std::vector<int> sweep_N;
    std::vector<double> sweep_p, sweep_gamma;
    std::vector<std::size_t> sweep_i;
    std::string grid_kind = "uniform";
};

void add_params(CLI::App* sub, Flags& f, bool with_p = true) {
    sub->add_option("--N", f.cfg.params.N, "space dimension")->capture_default_str();
    if (with_p) sub->add_option("--p", f.cfg.params.p, "exponent")->capture_default_str();
    sub->add_option("--R", f.R, "ball radius");
    sub->add_option("--tol", f.tol, "sets both --tol-abs and --tol-rel");
}

void add_sweep(CLI::App* sub, Flags& f) {
    sub->add_option("--sweep-N", f.sweep_N, "sweep over N");
    sub->add_option("--sweep-p", f.sweep_p, "sweep over p");
    sub->add_option("--sweep-gamma", f.sweep_gamma, "sweep over gamma");
    sub->add_option("--sweep-i", f.sweep_i, "sweep over i");
}

void add_emit(CLI::App* sub, Flags& f) {
    sub->add_option("--emit", f.emit, "write the trajectory (csv|json)")
        ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial solutions of -Lap u + u = u^p: singular solutions, shooting, exponents, Morse scans"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key-value config file (flags override it)");
    Flags f;
    auto& c = f.cfg;

    app.add_option("--tol-abs", c.tol.abs, "absolute ODE tolerance")->capture_default_str();
    app.add_option("--tol-rel", c.tol.rel, "relative ODE tolerance")->capture_default_str();
    app.add_option("--jobs", c.jobs, "worker threads for sweeps (0 = all cores)");
    app.add_option("--out-dir", c.out_dir, "output root")->capture_default_str();
    app.add_option("--format", f.format, "stdout report format (csv|json)")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--full", c.full, "keep every integrator step in trajectory outputs");

    auto* singular = app.add_subcommand("singular", "singular solution from the origin expansion");
    add_params(singular, f);
    singular->add_option("--r-end", c.r_end, "outer radius")->capture_default_str();
    add_emit(singular, f);
    singular->add_flag("--check-bounds", c.check_bounds, "verify the two-sided bound near the origin");
    add_sweep(singular, f);

    auto* shoot = app.add_subcommand("shoot", "regular solution with u(0) = gamma");
    add_params(shoot, f);
    shoot->add_option("--gamma", c.gamma, "initial value")->capture_default_str();
    shoot->add_option("--r-end", c.r_end, "outer radius")->capture_default_str();
    add_emit(shoot, f);
    add_sweep(shoot, f);

    auto* branch = app.add_subcommand("branch", "(gamma, p) samples with r^i_{p,gamma} = R");
    add_params(branch, f, false);
    branch->add_option("--i", c.i, "critical point index")->capture_default_str();
    branch->add_option("--gamma-list", c.gamma_list, "initial values")->capture_default_str();
    branch->add_option("--p-bracket", f.p_bracket, "p search interval")->expected(2);

    auto* exponent = app.add_subcommand("find-exponent", "p with R_p^i = R for the singular solution");
    add_params(exponent, f, false);
    exponent->add_option("--i", c.i, "critical point index")->capture_default_str();
    exponent->add_option("--p-lo", c.p_lo, "lower end of the p search")->capture_default_str();
    exponent->add_option("--p-cap", c.p_cap, "upper limit of the p search")->capture_default_str();
    add_emit(exponent, f);

    auto* continuity = app.add_subcommand("continuity", "refinement test for p -> R_p^i");
    add_params(continuity, f, false);
    continuity->add_option("--i", c.i, "critical point index")->capture_default_str();
    continuity->add_option("--p-grid", c.p_grid, "coarse p grid")->required();
    continuity->add_option("--p-grid-fine", f.p_grid_fine, "fine p grid (default: midpoint refinement)");

    auto* morse = app.add_subcommand("morse", "negative eigenvalue counts with a cutoff at delta");
    add_params(morse, f);
    morse->add_option("--deltas", c.deltas, "inner cutoffs")->capture_default_str();
    morse->add_option("--grids", c.grids, "cell counts (last two decide convergence)")->capture_default_str();
    morse->add_option("--grid-kind", f.grid_kind, "uniform|geometric")->check(CLI::IsMember({"uniform", "geometric"}));
    morse->add_option("--r-end", c.r_end, "initial search radius for R when --R is absent")->capture_default_str();
    add_emit(morse, f);

    auto* hardy = app.add_subcommand("hardy", "Hardy-type test functions near the origin");
    add_params(hardy, f);
    hardy->add_option("--eps0", c.eps0, "oscillation parameter")->capture_default_str();
    hardy->add_option("--j-max", c.j_max, "number of test functions")->capture_default_str();

    auto* verify = app.add_subcommand("verify-all", "every check at one (N, p, R)");
    add_params(verify, f);
    verify->add_option("--gamma", c.gamma, "initial value for the shot checks")->capture_default_str();
    verify->add_option("--r-end", c.r_end, "outer radius")->capture_default_str();
    verify->add_option("--eps0", c.eps0, "oscillation parameter")->capture_default_str();
    verify->add_option("--j-max", c.j_max, "number of test functions")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        c.command = command_from_string(app.get_subcommands().front()->get_name());
        c.params.R = f.R;
        if (f.tol) c.tol = {*f.tol, *f.tol};
        if (f.emit) c.emit = kFormats.at(*f.emit);
        c.format = kFormats.at(f.format);
        c.grid_kind = kGridKinds.at(f.grid_kind);
        if (!f.p_bracket.empty()) c.p_bracket = {f.p_bracket[0], f.p_bracket[1]};
        if (!f.p_grid_fine.empty()) c.p_grid_fine = f.p_grid_fine;
        if (!f.sweep_N.empty() || !f.sweep_p.empty() || !f.sweep_gamma.empty() || !f.sweep_i.empty())
            c.sweep = SweepSpec{f.sweep_N, f.sweep_p, f.sweep_gamma, f.sweep_i};
        validate(c);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    ReportBundle bundle;
    try {
        bundle = run(c);
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (c.format == OutputFormat::Json) {
        std::cout << to_json(bundle).dump(2) << '\n';
    } else {
        std::cout << "status,name,anchor\n";
        for (const auto& ch : bundle.checks) std::cout << to_string(ch.status) << ',' << ch.name << ',' << ch.anchor << '\n';
    }
    std::cerr << summary(bundle) << "results in " << run_directory(c).string() << '\n';
    return bundle.exit_code();
}
