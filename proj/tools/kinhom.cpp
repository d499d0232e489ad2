#include <kinhom/kinhom.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace kinhom;

double pick_eps(const SweepConfig& cfg, const std::vector<double>& override_eps) {
    if (!override_eps.empty()) {
        require(override_eps.size() == 1, "--eps takes a single value here");
        return override_eps.front();
    }
    require(cfg.eps.size() == 1, "config lists several eps values; pass --eps to choose one");
    return cfg.eps.front();
}

int solve_kinetic(const std::string& config, const std::string& out, const std::vector<double>& eps_override) {
    const auto cfg = load_sweep_config(config);
    const double eps = pick_eps(cfg, eps_override);
    const auto problem = make_kinetic_problem(cfg, eps);
    if (!problem) {
        std::cerr << "eps = " << eps << " needs more than " << cfg.max_cells << " cells\n";
        return 2;
    }
    const auto sol = solve_steady(*problem, cfg.solver);
    write_solution_csv(out, sol);
    std::printf("eps=%g nx=%zu iterations=%zu residual=%.3e\n", eps, problem->grid().cells(), sol.stats().iterations,
                sol.stats().residual);
    return 0;
}

int solve_diffusion(const std::string& config, const std::string& out, std::size_t cells) {
    const auto cfg = load_sweep_config(config);
    if (cells == 0) {
        const auto rule = cfg.cells_for(cfg.eps.back());
        cells = rule ? *rule : cfg.max_cells;
    }
    const SlabGrid grid(cfg.half_length, cells);
    const auto mode = cfg.compare == CompareMode::PointwiseSigmaBar ? LimitMode::PointwiseSigmaBar : LimitMode::WeakStar;
    const auto problem = build_limit_problem(cfg.quadrature(), cfg.profile, mode, grid, grid.sample(cfg.source),
                                             cfg.sigma_bar());
    write_diffusion_csv(out, solve_limit(problem));
    std::printf("nx=%zu kappa(0)=%.17g\n", cells, problem.kappa[cells / 2]);
    return 0;
}

int check_estimates(const std::string& config, const std::string& out) {
    const auto cfg = load_sweep_config(config);
    std::vector<EstimateReport> all;
    std::vector<KineticSolution> solved;
    bool ok = true;
    for (double eps : cfg.eps) {
        const auto problem = make_kinetic_problem(cfg, eps);
        if (!problem) {
            std::cerr << "skipping eps = " << eps << ": above the cell budget\n";
            continue;
        }
        solved.push_back(solve_steady(*problem, cfg.solver));
        const auto& sol = solved.back();
        std::vector<EstimateReport> reps{check_entropy(sol)};
        for (auto& r : check_apriori(sol)) reps.push_back(r);
        reps.push_back(check_crucial(sol, 0.05));
        for (auto& r : check_hdiv(sol)) reps.push_back(r);
        for (auto& r : reps) {
            ok = ok && r.pass;
            r.name += "@eps=" + format_short(eps);
            all.push_back(r);
        }
    }
    if (solved.size() >= 2) {
        const auto r = check_g_eps_uniform(solved, cfg.beta, cfg.g_eps_factor);
        ok = ok && (r.pass || r.out_of_hypothesis);
        all.push_back(r);
    }
    write_estimates_csv(out, all);
    if (cfg.eps.size() >= 3) {
        const auto h = check_h_half_condition(cfg.profile, cfg.sigma_bar(), cfg.beta, cfg.eps);
        std::printf("h_half exponent=%.6g verdict=%s\n", h.exponent, h.satisfied ? "satisfied" : "not-satisfied");
    }
    std::printf("%zu checks, %s\n", all.size(), ok ? "all passed" : "FAILURES");
    return ok ? 0 : 1;
}

struct NormsArgs {
    std::string profile = "sinusoidal";
    double mean = 2.0;
    double amplitude = 1.0;
    std::vector<double> values{1.0, 3.0};
    double fraction = 0.5;
    double period = 2.0 * std::numbers::pi;
    double beta = 1.0;
    std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
    double order = -0.5;
    double sigma_bar = 0.0;
    double length = 2.0 * std::numbers::pi;
    std::string out;
};

int norms(const NormsArgs& a) {
    ScatteringProfile p = ScatteringProfile::constant(1.0);
    if (a.profile == "sinusoidal") p = ScatteringProfile::sinusoidal(a.mean, a.amplitude, a.period);
    else if (a.profile == "two-phase") {
        require(a.values.size() == 2, "--values takes two phase values");
        p = ScatteringProfile::two_phase(a.values[0], a.values[1], a.fraction, a.period);
    } else if (a.profile == "constant") p = ScatteringProfile::constant(a.mean, a.period);
    else throw InvalidArgument("unknown profile '" + a.profile + "'");

    const double bar = a.sigma_bar > 0.0 ? a.sigma_bar : weak_star_limit(p);
    const std::function<double(double)> sigma_bar = [bar](double) { return bar; };
    const auto fourier = quotient_norms(p, sigma_bar, a.beta, a.eps, a.order, SobolevMode::Fourier, a.length);
    std::vector<QuotientNorm> interp;
    if (a.order == -0.5)
        interp = quotient_norms(p, sigma_bar, a.beta, a.eps, a.order, SobolevMode::DualityInterpolation, a.length);

    auto out = open_csv(a.out);
    out << "eps,order,samples,fourier,duality_interpolation\n";
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t k = 0; k < fourier.size(); ++k) {
        out << format_number(fourier[k].eps) << ',' << format_number(a.order) << ',' << fourier[k].samples << ','
            << format_number(fourier[k].value) << ',' << format_number(interp.empty() ? nan_value : interp[k].value)
            << '\n';
        pairs.emplace_back(fourier[k].eps, fourier[k].value);
    }
    if (pairs.size() >= 3 && std::all_of(pairs.begin(), pairs.end(), [](const auto& q) { return q.second > 0.0; })) {
        const double slope = fit_rate(pairs);
        std::printf("slope=%.6g\n", slope);
        if (a.order == -0.5) std::printf("h_half verdict=%s\n", slope > 1.0 ? "satisfied" : "not-satisfied");
    } else if (pairs.size() >= 3) {
        std::printf("slope=inf\n");
        if (a.order == -0.5) std::printf("h_half verdict=satisfied\n");
    }
    return 0;
}

int sweep(const std::string& config, std::string out_dir) {
    const auto cfg = load_sweep_config(config);
    if (out_dir.empty()) out_dir = cfg.output_dir;
    require(!out_dir.empty(), "sweep needs --out-dir or output.dir");
    const std::filesystem::path dir(out_dir);
    const auto rep = run_sweep(cfg);

    write_report_csv(dir / "report.csv", rep, cfg.test_functions, cfg.compare == CompareMode::Both);
    write_checks_csv(dir / "checks.csv", rep);
    for (std::size_t k = 0; k < rep.rows.size(); ++k)
        if (rep.solutions[k])
            write_solution_csv(dir / "solutions" / ("eps_" + format_short(rep.rows[k].eps) + ".csv"), *rep.solutions[k]);

    for (const auto& r : rep.rows) {
        if (r.skipped) {
            std::printf("eps=%-8g skipped (cell budget)\n", r.eps);
            continue;
        }
        std::printf("eps=%-8g nx=%-8zu l2_err=%.6e s_hat=%.6g iterations=%zu checks=%s\n", r.eps, r.nx, r.l2_err,
                    r.s_hat, r.iterations, r.checks_passed ? "pass" : "FAIL");
    }
    if (!std::isnan(rep.fitted_rate)) std::printf("fitted rate=%.4f\n", rep.fitted_rate);
    std::printf("sigma_star=%.6g sigma_harm=%.6g\n", rep.sigma_star, rep.sigma_harm);
    if (rep.aborted) std::fprintf(stderr, "sweep aborted: %s\n", rep.failure.c_str());
    return rep.exit_code();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinetic-to-diffusion homogenization solver and estimate checker"};
    app.require_subcommand(1);

    std::string config, out, out_dir;
    std::vector<double> eps_override;
    std::size_t cells = 0;

    auto* sk = app.add_subcommand("solve-kinetic", "Solve the kinetic problem for one eps");
    sk->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    sk->add_option("--out", out, "Output CSV")->required();
    sk->add_option("--eps", eps_override, "Override the eps value");

    auto* sd = app.add_subcommand("solve-diffusion", "Solve the limit diffusion problem");
    sd->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    sd->add_option("--out", out, "Output CSV")->required();
    sd->add_option("--cells", cells, "Grid cells (default: resolution rule at the smallest eps)");

    auto* ce = app.add_subcommand("check-estimates", "Run the estimate checks over the eps list");
    ce->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    ce->add_option("--out", out, "Output CSV")->required();

    NormsArgs na;
    auto* nm = app.add_subcommand("norms", "Sobolev norms of (sigma_bar - sigma_eps)/sigma_bar over eps");
    nm->add_option("--profile", na.profile, "constant | sinusoidal | two-phase")->capture_default_str();
    nm->add_option("--mean", na.mean, "Mean (or constant value)")->capture_default_str();
    nm->add_option("--amplitude", na.amplitude, "Sinusoid amplitude")->capture_default_str();
    nm->add_option("--values", na.values, "Two-phase values")->delimiter(',');
    nm->add_option("--fraction", na.fraction, "Two-phase volume fraction of the first value")->capture_default_str();
    nm->add_option("--period", na.period, "Profile period")->capture_default_str();
    nm->add_option("--beta", na.beta, "Oscillation exponent")->capture_default_str();
    nm->add_option("--eps", na.eps, "Comma-separated eps list")->delimiter(',');
    nm->add_option("--order", na.order, "Sobolev order: -1, -0.5, 0 or 0.5")->capture_default_str();
    nm->add_option("--sigma-bar", na.sigma_bar, "Constant sigma_bar (default: period mean)");
    nm->add_option("--length", na.length, "Sampling window length")->capture_default_str();
    nm->add_option("--out", na.out, "Output CSV")->required();

    auto* sw = app.add_subcommand("sweep", "Run an eps-sweep and write report.csv and solutions/");
    sw->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    sw->add_option("--out-dir", out_dir, "Output directory (default: output.dir from the config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sk->parsed()) return solve_kinetic(config, out, eps_override);
        if (sd->parsed()) return solve_diffusion(config, out, cells);
        if (ce->parsed()) return check_estimates(config, out);
        if (nm->parsed()) return norms(na);
        if (sw->parsed()) return sweep(config, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
