#pragma once

// Finite-volume solver for rho - (kappa rho')' = g on (-l, l), rho(+-l) = 0.

#include <kinhom/errors.hpp>
#include <kinhom/scattering_field.hpp>
#include <kinhom/slab_grid.hpp>
#include <kinhom/velocity_space.hpp>

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace kinhom {

/// Thomas elimination for a tridiagonal system. lower[0] and upper[n-1] are ignored.
inline std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    require(lower.size() == n && upper.size() == n && rhs.size() == n, "tridiagonal bands differ in length");
    std::vector<double> c(n), d(n), x(n);
    double pivot = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) pivot = diag[i] - lower[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw Error("zero or non-finite pivot in tridiagonal solve at row " + std::to_string(i));
        c[i] = (i + 1 < n) ? upper[i] / pivot : 0.0;
        d[i] = (rhs[i] - (i > 0 ? lower[i] * d[i - 1] : 0.0)) / pivot;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

/// Interior faces take the harmonic average of the two neighbouring cells;
/// wall faces take the adjacent cell value.
inline std::vector<double> harmonic_faces(std::span<const double> cell_values) {
    const std::size_t n = cell_values.size();
    std::vector<double> faces(n + 1);
    faces[0] = cell_values[0];
    faces[n] = cell_values[n - 1];
    for (std::size_t i = 1; i < n; ++i) {
        const double a = cell_values[i - 1], b = cell_values[i];
        faces[i] = 2.0 * a * b / (a + b);
    }
    return faces;
}

/// Solves absorption * u - (kappa u')' = rhs with u = 0 on both walls.
/// kappa lives on the cells()+1 faces; wall faces see a half-cell distance.
inline std::vector<double> solve_dirichlet_diffusion(const SlabGrid& grid, std::span<const double> kappa_faces,
                                                     double absorption, std::span<const double> rhs) {
    const std::size_t n = grid.cells();
    require(kappa_faces.size() == n + 1, "kappa must be sampled on cells()+1 faces");
    require(rhs.size() == n, "right-hand side must be sampled on cell centers");
    const double h = grid.width();
    std::vector<double> lower(n), diag(n), upper(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = kappa_faces[i] / (i == 0 ? 0.5 * h : h) / h;
        const double right = kappa_faces[i + 1] / (i + 1 == n ? 0.5 * h : h) / h;
        lower[i] = -left;
        upper[i] = -right;
        diag[i] = absorption + left + right;
    }
    return solve_tridiagonal(lower, diag, upper, rhs);
}

struct DiffusionProblem {
    DiffusionProblem(SlabGrid grid_, std::vector<double> kappa_, std::vector<double> source_)
        : grid(grid_), kappa(std::move(kappa_)), source(std::move(source_)) {
        require(kappa.size() == grid.cells() + 1, "kappa must be sampled on cells()+1 faces");
        require(source.size() == grid.cells(), "source must be sampled on cell centers");
        for (double k : kappa) require(k > 0.0 && std::isfinite(k), "kappa must be positive and finite");
        for (double g : source) require(std::isfinite(g), "source must be finite");
    }

    SlabGrid grid;
    std::vector<double> kappa;  ///< on faces
    std::vector<double> source; ///< on cell centers
};

struct DiffusionSolution {
    SlabGrid grid;
    std::vector<double> rho;  ///< on cell centers
    std::vector<double> flux; ///< -kappa rho' on faces
};

/// Distance from the cell-center unknown on each side of face f.
inline double face_spacing(const SlabGrid& grid, std::size_t f) {
    return (f == 0 || f == grid.cells()) ? 0.5 * grid.width() : grid.width();
}

inline DiffusionSolution solve_limit(const DiffusionProblem& problem) {
    const auto& grid = problem.grid;
    const std::size_t n = grid.cells();
    DiffusionSolution sol{grid, solve_dirichlet_diffusion(grid, problem.kappa, 1.0, problem.source), {}};
    sol.flux.resize(n + 1);
    for (std::size_t f = 0; f <= n; ++f) {
        const double left = f == 0 ? 0.0 : sol.rho[f - 1];
        const double right = f == n ? 0.0 : sol.rho[f];
        sol.flux[f] = -problem.kappa[f] * (right - left) / face_spacing(grid, f);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(sol.rho[i])) throw Error("non-finite diffusion solution at cell " + std::to_string(i));
    return sol;
}

/// Terms of the discrete weak form tested against the solution itself:
/// mass + dissipation == work.
struct EnergyBalance {
    double mass;        ///< sum rho^2 h
    double dissipation; ///< sum over faces kappa (D_h rho)^2 d_f
    double work;        ///< sum g rho h
};

inline EnergyBalance energy_balance(const DiffusionProblem& problem, const DiffusionSolution& sol) {
    const auto& grid = problem.grid;
    const std::size_t n = grid.cells();
    const double h = grid.width();
    EnergyBalance e{inner(sol.rho, sol.rho, h), 0.0, inner(problem.source, sol.rho, h)};
    for (std::size_t f = 0; f <= n; ++f) {
        const double left = f == 0 ? 0.0 : sol.rho[f - 1];
        const double right = f == n ? 0.0 : sol.rho[f];
        const double d = face_spacing(grid, f);
        const double grad = (right - left) / d;
        e.dissipation += problem.kappa[f] * grad * grad * d;
    }
    return e;
}

enum class LimitMode { WeakStar, PointwiseSigmaBar };

inline LimitMode parse_limit_mode(const std::string& s) {
    if (s == "weak-star") return LimitMode::WeakStar;
    if (s == "pointwise-sigma-bar") return LimitMode::PointwiseSigmaBar;
    throw InvalidArgument("unknown limit mode '" + s + "'");
}

/// kappa = <v^2> / sigma*, with sigma* the period average of the profile.
inline DiffusionProblem build_limit_problem(const VelocityQuadrature& q, const ScatteringProfile& profile,
                                            const SlabGrid& grid, std::vector<double> source) {
    const double kappa = q.moment(2) / weak_star_limit(profile);
    return DiffusionProblem(grid, std::vector<double>(grid.cells() + 1, kappa), std::move(source));
}

/// kappa(x_face) = <v^2> / sigma_bar(x_face); sigma_bar must stay bounded away from zero.
inline DiffusionProblem build_limit_problem(const VelocityQuadrature& q,
                                            const std::function<double(double)>& sigma_bar,
                                            const SlabGrid& grid, std::vector<double> source) {
    const std::size_t n = grid.cells();
    std::vector<double> kappa(n + 1);
    for (std::size_t f = 0; f <= n; ++f) {
        const double s = sigma_bar(grid.face(f));
        if (!(s > 0.0) || !std::isfinite(s))
            throw InvalidArgument("sigma_bar must be positive: got " + std::to_string(s) + " at x = " +
                                  std::to_string(grid.face(f)));
        kappa[f] = q.moment(2) / s;
    }
    return DiffusionProblem(grid, std::move(kappa), std::move(source));
}

/// Mode-dispatching form. Pointwise mode with a periodic profile uses the
/// constant sigma_bar equal to the profile's period average.
inline DiffusionProblem build_limit_problem(const VelocityQuadrature& q, const ScatteringProfile& profile,
                                            LimitMode mode, const SlabGrid& grid, std::vector<double> source,
                                            const std::function<double(double)>& sigma_bar = {}) {
    if (mode == LimitMode::WeakStar) return build_limit_problem(q, profile, grid, std::move(source));
    if (sigma_bar) return build_limit_problem(q, sigma_bar, grid, std::move(source));
    const double mean = weak_star_limit(profile);
    return build_limit_problem(q, std::function<double(double)>([mean](double) { return mean; }), grid,
                               std::move(source));
}

} // namespace kinhom
