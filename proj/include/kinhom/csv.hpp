#pragma once

// CSV output with 17 significant digits.

#include <kinhom/diffusion_solver.hpp>
#include <kinhom/errors.hpp>
#include <kinhom/estimates.hpp>
#include <kinhom/harness.hpp>
#include <kinhom/kinetic_solver.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace kinhom {

inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Short form for file names: 0.025 -> "0.025".
inline std::string format_short(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline std::ofstream open_csv(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

inline void write_row(std::ostream& out, const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) out << (k ? "," : "") << format_number(values[k]);
    out << '\n';
}

inline void write_solution_csv(const std::filesystem::path& path, const KineticSolution& sol) {
    auto out = open_csv(path);
    out << "x,density,flux,second_moment,zeta,g_eps\n";
    const auto rho = density(sol), j = flux(sol), m2 = second_moment(sol), z = zeta(sol), g = g_eps(sol);
    const auto& grid = sol.problem().grid();
    for (std::size_t i = 0; i < grid.cells(); ++i) write_row(out, {grid.center(i), rho[i], j[i], m2[i], z[i], g[i]});
}

inline void write_diffusion_csv(const std::filesystem::path& path, const DiffusionSolution& sol) {
    auto out = open_csv(path);
    out << "x,rho\n";
    for (std::size_t i = 0; i < sol.grid.cells(); ++i) write_row(out, {sol.grid.center(i), sol.rho[i]});
}

inline void write_estimates_csv(const std::filesystem::path& path, const std::vector<EstimateReport>& reports) {
    auto out = open_csv(path);
    out << "estimate,lhs,rhs,slack,pass\n";
    for (const auto& r : reports)
        out << r.name << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ',' << format_number(r.slack)
            << ',' << (r.pass ? 1 : 0) << '\n';
}

/// report.csv; a trailing l2_err_pointwise column appears in `both` mode.
inline void write_report_csv(const std::filesystem::path& path, const ConvergenceReport& rep, std::size_t test_functions,
                             bool with_pointwise) {
    auto out = open_csv(path);
    out << "eps,beta,nx,l2_err";
    for (std::size_t m = 1; m <= test_functions; ++m) out << ",weak_err_" << m;
    out << ",rate_so_far,s_hat,sigma_star,sigma_harm,checks_passed";
    if (with_pointwise) out << ",l2_err_pointwise";
    out << '\n';
    for (const auto& r : rep.rows) {
        std::vector<double> v{r.eps, r.beta, static_cast<double>(r.nx), r.l2_err};
        for (std::size_t m = 0; m < test_functions; ++m) v.push_back(m < r.weak_err.size() ? r.weak_err[m] : nan_value);
        v.insert(v.end(), {r.rate_so_far, r.s_hat, rep.sigma_star, rep.sigma_harm});
        for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << format_number(v[k]);
        out << ',' << (!r.skipped && r.checks_passed ? 1 : 0);
        if (with_pointwise) out << ',' << format_number(r.l2_err_pointwise);
        out << '\n';
    }
}

/// Full estimate ledger of a sweep, one line per check and eps.
inline void write_checks_csv(const std::filesystem::path& path, const ConvergenceReport& rep) {
    auto out = open_csv(path);
    out << "eps,estimate,lhs,rhs,slack,tolerance,discretization_term,pass,out_of_hypothesis\n";
    auto line = [&out](const std::string& eps, const EstimateReport& c) {
        out << eps << ',' << c.name << ',' << format_number(c.lhs) << ',' << format_number(c.rhs) << ','
            << format_number(c.slack) << ',' << format_number(c.tolerance) << ','
            << format_number(c.discretization_term) << ',' << (c.pass ? 1 : 0) << ','
            << (c.out_of_hypothesis ? 1 : 0) << '\n';
    };
    for (const auto& r : rep.rows)
        for (const auto& c : r.checks) line(format_number(r.eps), c);
    if (rep.g_eps_check) line("all", *rep.g_eps_check);
}

} // namespace kinhom
