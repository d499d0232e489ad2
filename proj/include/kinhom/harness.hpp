#pragma once

// eps-sweeps: kinetic solves against the diffusion limit, estimate checks,
// convergence rates and effective-coefficient extraction.

#include <kinhom/config.hpp>
#include <kinhom/diffusion_solver.hpp>
#include <kinhom/errors.hpp>
#include <kinhom/estimates.hpp>
#include <kinhom/kinetic_solver.hpp>
#include <kinhom/rate_fit.hpp>
#include <kinhom/scattering_field.hpp>
#include <kinhom/slab_grid.hpp>
#include <kinhom/velocity_space.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace kinhom {

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

/// sin(m pi (x + l) / (2 l)), m >= 1.
inline double sine_test_function(std::size_t m, double x, double half_length) {
    return std::sin(static_cast<double>(m) * std::numbers::pi * (x + half_length) / (2.0 * half_length));
}

/// |sum_i h (u_i - w_i) phi_m(x_i)| for m = 1..count.
inline std::vector<double> weak_errors(const SlabGrid& grid, std::span<const double> u, std::span<const double> w,
                                       std::size_t count) {
    require(u.size() == grid.cells() && w.size() == grid.cells(), "weak_errors: sample sizes do not match grid");
    std::vector<double> out(count);
    for (std::size_t m = 1; m <= count; ++m) {
        double sum = 0.0;
        for (std::size_t i = 0; i < grid.cells(); ++i)
            sum += (u[i] - w[i]) * sine_test_function(m, grid.center(i), grid.half_length());
        out[m - 1] = std::abs(sum * grid.width());
    }
    return out;
}

/// argmin over s in [lower/2, 2 upper] of ||density - rho_s||, where
/// rho_s - ((<v^2>/s) rho_s')' = g with rho_s(+-l) = 0.
///
/// A uniform scan locates the bracket and must be unimodal; golden-section
/// search then narrows it to relative width 1e-4.
inline double fit_effective_coefficient(std::span<const double> density, std::span<const double> source,
                                        const SlabGrid& grid, const VelocityQuadrature& q, double lower,
                                        double upper) {
    require(density.size() == grid.cells() && source.size() == grid.cells(),
            "fit_effective_coefficient: sample sizes do not match grid");
    require(lower > 0.0 && upper >= lower, "fit_effective_coefficient needs 0 < a <= b");
    const double h = grid.width();
    const double d = q.moment(2);
    auto objective = [&](double s) {
        const std::vector<double> kappa(grid.cells() + 1, d / s);
        return l2_distance(density, solve_dirichlet_diffusion(grid, kappa, 1.0, source), h);
    };

    constexpr std::size_t scan_points = 33;
    const double lo = 0.5 * lower, hi = 2.0 * upper;
    std::vector<std::pair<double, double>> trace;
    for (std::size_t k = 0; k < scan_points; ++k) {
        const double s = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(scan_points - 1);
        trace.emplace_back(s, objective(s));
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < scan_points; ++k)
        if (trace[k].second < trace[best].second) best = k;
    if (best == 0 || best + 1 == scan_points)
        throw BracketFailure("effective coefficient minimum lies on the search boundary", trace);
    for (std::size_t k = 1; k < scan_points; ++k) {
        const double prev = trace[k - 1].second, cur = trace[k].second;
        const double noise = 1e-12 * std::max(prev, cur);
        const bool rising = cur > prev + noise, falling = cur < prev - noise;
        if ((k <= best && rising) || (k > best && falling))
            throw BracketFailure("effective coefficient objective is not unimodal", trace);
    }

    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = trace[best - 1].first, b = trace[best + 1].first;
    double c = b - ratio * (b - a), e = a + ratio * (b - a);
    double fc = objective(c), fe = objective(e);
    while ((b - a) > 1e-4 * 0.5 * (a + b)) {
        if (fc <= fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - ratio * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + ratio * (b - a);
            fe = objective(e);
        }
    }
    return 0.5 * (a + b);
}

struct SweepRow {
    double eps = 0.0;
    double beta = 0.0;
    std::size_t nx = 0;
    bool skipped = false;
    double l2_err = nan_value;           ///< against the primary limit
    double l2_err_pointwise = nan_value; ///< against the pointwise-sigma_bar limit in `both` mode
    std::vector<double> weak_err;
    double rate_so_far = nan_value;
    double s_hat = nan_value;
    std::size_t iterations = 0;
    std::vector<EstimateReport> checks;
    bool checks_passed = false;
    std::string error; ///< nonempty when the point failed outright
};

struct ConvergenceReport {
    std::vector<SweepRow> rows; ///< ordered by decreasing eps
    double sigma_star = 0.0;
    double sigma_harm = 0.0;
    double fitted_rate = nan_value;
    std::optional<EstimateReport> g_eps_check;
    std::vector<std::shared_ptr<const KineticSolution>> solutions; ///< parallel to rows; null when absent
    std::vector<std::vector<double>> limits;                       ///< primary limit density per row
    bool aborted = false;
    std::string failure;

    std::size_t skipped() const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.skipped; }));
    }

    bool all_checks_passed() const {
        if (aborted) return false;
        for (const auto& r : rows)
            if (!r.skipped && !r.checks_passed) return false;
        return !g_eps_check || g_eps_check->pass || g_eps_check->out_of_hypothesis;
    }

    /// 0 all passed, 2 points skipped by the N_x guard, 1 failure.
    int exit_code() const {
        if (!all_checks_passed()) return 1;
        return skipped() > 0 ? 2 : 0;
    }
};

namespace detail {

struct PointOutcome {
    SweepRow row;
    std::shared_ptr<const KineticSolution> solution;
    std::vector<double> limit;
};

inline PointOutcome run_point(const SweepConfig& cfg, double eps, const VelocityQuadrature& q) {
    PointOutcome out;
    SweepRow& row = out.row;
    row.eps = eps;
    row.beta = cfg.beta;
    const auto cells = cfg.cells_for(eps);
    if (!cells) {
        row.skipped = true;
        return out;
    }
    row.nx = *cells;
    try {
        const SlabGrid grid(cfg.half_length, row.nx);
        const ScatteringField field(cfg.profile, eps, cfg.beta);
        const auto source = grid.sample(cfg.source);

        const auto hyp = verify_hypotheses(field, 1024);
        auto hyp_report = make_report("sigma_hypotheses", static_cast<double>(hyp.violation_count), 0.0, 0.0);
        const bool hypotheses_met = hyp.pass;

        const KineticProblem problem(grid, q, field, source);
        auto sol = std::make_shared<const KineticSolution>(solve_steady(problem, cfg.solver));
        row.iterations = sol->stats().iterations;
        const auto rho = density(*sol);

        const auto sigma_bar = cfg.sigma_bar();
        const auto weak_star = solve_limit(build_limit_problem(q, cfg.profile, grid, source)).rho;
        std::vector<double> pointwise;
        if (cfg.compare != CompareMode::WeakStar)
            pointwise = solve_limit(build_limit_problem(q, sigma_bar, grid, source)).rho;
        const auto& primary = cfg.compare == CompareMode::PointwiseSigmaBar ? pointwise : weak_star;

        const double h = grid.width();
        row.l2_err = l2_distance(rho, primary, h);
        if (cfg.compare == CompareMode::Both) row.l2_err_pointwise = l2_distance(rho, pointwise, h);
        row.weak_err = weak_errors(grid, rho, primary, cfg.test_functions);

        row.checks.push_back(hyp_report);
        row.checks.push_back(check_entropy(*sol));
        for (auto& r : check_apriori(*sol)) row.checks.push_back(r);
        row.checks.push_back(check_crucial(*sol, 0.05));
        for (auto& r : check_hdiv(*sol)) row.checks.push_back(r);
        if (!hypotheses_met)
            for (auto& r : row.checks) r.out_of_hypothesis = true;
        row.checks_passed = std::all_of(row.checks.begin(), row.checks.end(),
                                        [](const EstimateReport& r) { return r.pass || r.out_of_hypothesis; });

        if (l2_norm(source, h) > 0.0) {
            const auto [a, b] = cfg.profile.bounds();
            row.s_hat = fit_effective_coefficient(rho, source, grid, q, a, b);
        }
        out.solution = std::move(sol);
        out.limit = primary;
    } catch (const Error& e) {
        row.error = e.what();
        row.checks_passed = false;
    }
    return out;
}

} // namespace detail

/// Runs every eps of the sweep, in parallel when cfg.threads > 1. Rows are
/// assembled in eps order, so the report does not depend on the thread count.
/// The first failing point truncates the report after its row.
inline ConvergenceReport run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto q = cfg.quadrature();
    const std::size_t count = cfg.eps.size();
    std::vector<detail::PointOutcome> outcomes(count);

    const std::size_t workers = std::min(cfg.threads, count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) outcomes[k] = detail::run_point(cfg, cfg.eps[k], q);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < count; k = next++) outcomes[k] = detail::run_point(cfg, cfg.eps[k], q);
            });
    }

    ConvergenceReport rep;
    rep.sigma_star = weak_star_limit(cfg.profile);
    rep.sigma_harm = harmonic_mean(cfg.profile);
    std::vector<std::pair<double, double>> rate_points;
    for (std::size_t k = 0; k < count; ++k) {
        auto& o = outcomes[k];
        if (!o.row.skipped && o.row.error.empty() && o.row.l2_err > 0.0) {
            rate_points.emplace_back(o.row.eps, o.row.l2_err);
            if (rate_points.size() >= 3) o.row.rate_so_far = fit_rate(rate_points);
        }
        const bool failed = !o.row.skipped && !o.row.checks_passed;
        rep.rows.push_back(std::move(o.row));
        rep.solutions.push_back(std::move(o.solution));
        rep.limits.push_back(std::move(o.limit));
        if (failed) {
            const auto& row = rep.rows.back();
            rep.aborted = true;
            if (!row.error.empty()) {
                rep.failure = "eps = " + std::to_string(row.eps) + ": " + row.error;
            } else {
                for (const auto& c : row.checks)
                    if (!c.pass && !c.out_of_hypothesis) {
                        rep.failure = "eps = " + std::to_string(row.eps) + ": check " + c.name + " failed";
                        break;
                    }
            }
            return rep;
        }
    }
    if (!rate_points.empty() && rate_points.size() >= 3) rep.fitted_rate = fit_rate(rate_points);

    std::vector<KineticSolution> solved;
    for (const auto& s : rep.solutions)
        if (s) solved.push_back(*s);
    if (solved.size() >= 2) {
        rep.g_eps_check = check_g_eps_uniform(solved, cfg.beta, cfg.g_eps_factor);
        if (!rep.g_eps_check->pass && !rep.g_eps_check->out_of_hypothesis) {
            rep.aborted = true;
            rep.failure = "check g_eps_uniform failed";
        }
    }
    return rep;
}

} // namespace kinhom
