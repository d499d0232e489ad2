#pragma once

// Discrete-ordinates solver for the scaled stationary linear Boltzmann equation
//
//   f + (v/eps) f_x + (sigma_eps/eps^2) (f - <f>) = g   on (-l, l) x V,
//   f = 0 on the incoming boundary,
//
// plus the velocity moments and moment-method diagnostics built from f.

#include <kinhom/diffusion_solver.hpp>
#include <kinhom/errors.hpp>
#include <kinhom/scattering_field.hpp>
#include <kinhom/slab_grid.hpp>
#include <kinhom/velocity_space.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kinhom {

/// Slab, velocity measure, scattering field and source. Cell width must
/// resolve the oscillation: h <= eta * period / 16.
class KineticProblem {
public:
    static constexpr double cells_per_oscillation = 16.0;

    KineticProblem(SlabGrid grid, VelocityQuadrature quadrature, ScatteringField field, std::vector<double> source)
        : grid_(grid), quadrature_(std::move(quadrature)), field_(std::move(field)), source_(std::move(source)) {
        require(source_.size() == grid_.cells(), "source must be sampled on cell centers");
        for (std::size_t i = 0; i < source_.size(); ++i)
            if (!std::isfinite(source_[i])) throw InvalidArgument("source is not finite at cell " + std::to_string(i));
        require(field_.epsilon() <= 1.0, "epsilon must not exceed 1");
        const double max_width = field_.spatial_period() / cells_per_oscillation;
        if (grid_.width() > max_width * (1.0 + 1e-12))
            throw InvalidArgument("grid does not resolve the oscillation: h = " + std::to_string(grid_.width()) +
                                  " > eta * period / 16 = " + std::to_string(max_width));
        sigma_ = grid_.sample([this](double x) { return field_(x); });
    }

    const SlabGrid& grid() const noexcept { return grid_; }
    const VelocityQuadrature& quadrature() const noexcept { return quadrature_; }
    const ScatteringField& field() const noexcept { return field_; }
    double epsilon() const noexcept { return field_.epsilon(); }
    const std::vector<double>& source() const noexcept { return source_; }
    /// sigma_eps at cell centers.
    const std::vector<double>& sigma() const noexcept { return sigma_; }

private:
    SlabGrid grid_;
    VelocityQuadrature quadrature_;
    ScatteringField field_;
    std::vector<double> source_;
    std::vector<double> sigma_;
};

struct IterationStats {
    std::size_t iterations = 0;
    double residual = 0.0; ///< ||residual|| / ||g|| in discrete L2(dx dmu)
    bool accelerated = false;
};

/// f(x_i, v_j), stored ordinate-major so that each sweep walks contiguous memory.
class KineticSolution {
public:
    KineticSolution(KineticProblem problem, std::vector<double> values, IterationStats stats = {})
        : problem_(std::move(problem)), values_(std::move(values)), stats_(stats) {
        require(values_.size() == problem_.grid().cells() * problem_.quadrature().size(),
                "distribution size must equal cells * ordinates");
    }

    /// Fills f(x_i, v_j) = fn(x_i, v_j).
    template <class F>
    static KineticSolution from_function(KineticProblem problem, F&& fn) {
        const std::size_t n = problem.grid().cells(), m = problem.quadrature().size();
        std::vector<double> values(n * m);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n; ++i)
                values[j * n + i] = fn(problem.grid().center(i), problem.quadrature().node(j));
        return KineticSolution(std::move(problem), std::move(values));
    }

    const KineticProblem& problem() const noexcept { return problem_; }
    const IterationStats& stats() const noexcept { return stats_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> ordinate(std::size_t j) const {
        const std::size_t n = problem_.grid().cells();
        return std::span<const double>(values_).subspan(j * n, n);
    }
    double operator()(std::size_t i, std::size_t j) const { return values_[j * problem_.grid().cells() + i]; }

private:
    KineticProblem problem_;
    std::vector<double> values_;
    IterationStats stats_;
};

struct SolverOptions {
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    bool accelerate = true;
};

namespace detail {

// sum_j w_j v_j^k f(., v_j) for ordinate-major f, accumulated over mirror pairs.
inline std::vector<double> velocity_moment(const VelocityQuadrature& q, std::size_t n, std::span<const double> f,
                                           int k) {
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < q.size() / 2; ++j) {
        const double* neg = f.data() + j * n;
        const double* pos = f.data() + q.mirror(j) * n;
        const double w = q.weight(j) * std::pow(q.node(q.mirror(j)), k);
        if (k % 2 == 0)
            for (std::size_t i = 0; i < n; ++i) out[i] += w * (pos[i] + neg[i]);
        else
            for (std::size_t i = 0; i < n; ++i) out[i] += w * (pos[i] - neg[i]);
    }
    return out;
}

inline std::vector<double> velocity_moment(const KineticSolution& sol, int k) {
    return velocity_moment(sol.problem().quadrature(), sol.problem().grid().cells(), sol.values(), k);
}

// One transport sweep per ordinate with scattering source (sigma/eps^2) rho.
inline void sweep(const KineticProblem& p, std::span<const double> rho, std::vector<double>& f) {
    const auto& q = p.quadrature();
    const auto& g = p.source();
    const auto& sigma = p.sigma();
    const std::size_t n = p.grid().cells();
    const double eps = p.epsilon();
    const double inv_eps2 = 1.0 / (eps * eps);
    const double h = p.grid().width();

    std::vector<double> src(n), removal(n);
    for (std::size_t i = 0; i < n; ++i) {
        src[i] = g[i] + sigma[i] * inv_eps2 * rho[i];
        removal[i] = 1.0 + sigma[i] * inv_eps2;
    }
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double v = q.node(j);
        const double stream = std::abs(v) / (eps * h);
        double* fj = f.data() + j * n;
        double upstream = 0.0; // inflow ghost value
        if (v > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                upstream = (src[i] + stream * upstream) / (removal[i] + stream);
                fj[i] = upstream;
            }
        } else {
            for (std::size_t i = n; i-- > 0;) {
                upstream = (src[i] + stream * upstream) / (removal[i] + stream);
                fj[i] = upstream;
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(fj[i]))
                throw NonFinite("non-finite distribution at cell " + std::to_string(i) + " (x = " +
                                    std::to_string(p.grid().center(i)) + "), ordinate " + std::to_string(j),
                                i, j);
    }
}

} // namespace detail

inline std::vector<double> density(const KineticSolution& sol) { return detail::velocity_moment(sol, 0); }
inline std::vector<double> flux(const KineticSolution& sol) { return detail::velocity_moment(sol, 1); }
inline std::vector<double> second_moment(const KineticSolution& sol) { return detail::velocity_moment(sol, 2); }

/// Source iteration with upwind sweeps and, by default, diffusion synthetic
/// acceleration. After each sweep the density update is corrected by
///
///   delta - D_h((<v^2>/sigma_eps) D_h delta) = (sigma_eps/eps^2)(rho_swept - rho_old),  delta(+-l) = 0,
///
/// solved with the same tridiagonal kernel as the limit problem.
inline KineticSolution solve_steady(const KineticProblem& problem, const SolverOptions& opts = {}) {
    require(opts.tol > 0.0 && opts.tol <= 1e-4, "solver tolerance must lie in (0, 1e-4]");
    require(opts.max_iter >= 1, "max_iter must be at least 1");

    const auto& grid = problem.grid();
    const std::size_t n = grid.cells();
    const double h = grid.width();
    const double eps = problem.epsilon();
    const auto& sigma = problem.sigma();
    const double g_norm = l2_norm(problem.source(), h);

    std::vector<double> kappa_cells(n);
    for (std::size_t i = 0; i < n; ++i) kappa_cells[i] = problem.quadrature().moment(2) / sigma[i];
    const auto kappa_faces = harmonic_faces(kappa_cells);

    std::vector<double> f(n * problem.quadrature().size(), 0.0);
    std::vector<double> rho_old(n, 0.0), update(n);
    IterationStats stats;
    stats.accelerated = opts.accelerate;

    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        detail::sweep(problem, rho_old, f);
        stats.iterations = it;
        if (g_norm == 0.0) {
            stats.residual = 0.0;
            return KineticSolution(problem, std::move(f), stats);
        }
        const auto rho = detail::velocity_moment(problem.quadrature(), n, f, 0);
        // The swept f satisfies the discrete system exactly except for the
        // scattering term, so its residual is (sigma/eps^2)(rho_old - rho).
        for (std::size_t i = 0; i < n; ++i) update[i] = sigma[i] / (eps * eps) * (rho[i] - rho_old[i]);
        stats.residual = l2_norm(update, h) / g_norm;
        if (stats.residual <= opts.tol) return KineticSolution(problem, std::move(f), stats);

        if (opts.accelerate) {
            const auto delta = solve_dirichlet_diffusion(grid, kappa_faces, 1.0, update);
            for (std::size_t i = 0; i < n; ++i) rho_old[i] = rho[i] + delta[i];
        } else {
            rho_old = rho;
        }
    }
    throw NonConvergence("source iteration did not converge in " + std::to_string(opts.max_iter) +
                             " iterations; last relative residual " + std::to_string(stats.residual),
                         stats.iterations, stats.residual);
}

/// <f> + (1/eps) D_h <v f> - g.
inline std::vector<double> continuity_residual(const KineticSolution& sol) {
    const auto& p = sol.problem();
    const auto rho = density(sol);
    const auto div_j = centered_derivative(flux(sol), p.grid().width());
    std::vector<double> r(rho.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rho[i] + div_j[i] / p.epsilon() - p.source()[i];
    return r;
}

/// G_eps = g - <f> + (eps/sigma) D_h<v f> - eps (D_h sigma / sigma^2) <v f>.
inline std::vector<double> g_eps(const KineticSolution& sol) {
    const auto& p = sol.problem();
    const double h = p.grid().width();
    const double eps = p.epsilon();
    const auto rho = density(sol);
    const auto j = flux(sol);
    const auto dj = centered_derivative(j, h);
    const auto dsigma = centered_derivative(p.sigma(), h);
    std::vector<double> out(rho.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = p.sigma()[i];
        out[i] = p.source()[i] - rho[i] + eps / s * dj[i] - eps * dsigma[i] / (s * s) * j[i];
    }
    return out;
}

/// zeta_eps = (1/sigma) D_h <v^2 f>, which solves -zeta' = G_eps.
inline std::vector<double> zeta(const KineticSolution& sol) {
    const auto& p = sol.problem();
    const auto d = centered_derivative(second_moment(sol), p.grid().width());
    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = d[i] / p.sigma()[i];
    return out;
}

/// sum_j w_j v_j^2 D_up f_j with the same upwind stencil and zero inflow ghosts as the sweep.
/// Equals -(eps + sigma/eps) <v f> for a converged solution.
inline std::vector<double> upwind_second_moment_gradient(const KineticSolution& sol) {
    const auto& p = sol.problem();
    const auto& q = p.quadrature();
    const std::size_t n = p.grid().cells();
    const double h = p.grid().width();
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double v = q.node(j);
        const double w = q.weight(j) * v * v / h;
        const auto fj = sol.ordinate(j);
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = v > 0.0 ? fj[i] - (i > 0 ? fj[i - 1] : 0.0)
                                        : (i + 1 < n ? fj[i + 1] : 0.0) - fj[i];
            out[i] += w * diff;
        }
    }
    return out;
}

} // namespace kinhom
