#include <kinhom/estimates.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace kinhom;
using Catch::Approx;

namespace {

KineticSolution solve(const ScatteringProfile& p, double eps, double beta = 1.0, double source = 1.0) {
    const std::size_t cells = static_cast<std::size_t>(std::ceil(std::max(200.0 / eps, 40.0 / std::pow(eps, beta))));
    const SlabGrid grid(1.0, cells + cells % 2);
    return solve_steady(KineticProblem(grid, build_quadrature(QuadratureFamily::GaussLegendreUniform, 16),
                                       ScatteringField(p, eps, beta), grid.sample([source](double x) {
                                           return source * (1.0 + 0.5 * x);
                                       })));
}

std::vector<double> sample(std::size_t n, double length, double (*fn)(double)) {
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) u[k] = fn(length * k / n);
    return u;
}

} // namespace

TEST_CASE("all estimate checks pass on an oscillating-coefficient solve") {
    const auto sol = solve(ScatteringProfile::sinusoidal(2.0, 1.0), 0.05);
    CHECK(check_entropy(sol).pass);
    for (const auto& r : check_apriori(sol)) CHECK(r.pass);
    CHECK(check_crucial(sol).pass);
    for (const auto& r : check_hdiv(sol)) CHECK(r.pass);
}

TEST_CASE("entropy left side equals ||f||^2 + (2/eps^2) sum sigma <(f - <f>)^2>") {
    const auto sol = solve(ScatteringProfile::two_phase(1.0, 3.0), 0.1);
    const auto& p = sol.problem();
    const auto rho = density(sol);
    const double h = p.grid().width(), eps = p.epsilon();
    double mass = 0.0, dissipation = 0.0;
    for (std::size_t i = 0; i < p.grid().cells(); ++i)
        for (std::size_t j = 0; j < p.quadrature().size(); ++j) {
            const double w = p.quadrature().weight(j) * h;
            mass += w * sol(i, j) * sol(i, j);
            dissipation += w * p.sigma()[i] * (sol(i, j) - rho[i]) * (sol(i, j) - rho[i]);
        }
    const auto r = check_entropy(sol);
    CHECK(r.lhs == Approx(mass + 2.0 * dissipation / (eps * eps)).epsilon(1e-10));
    CHECK(r.rhs == Approx(std::pow(l2_norm(p.source(), h), 2)).epsilon(1e-14));
    CHECK(r.slack > 0.0);
}

TEST_CASE("zero solution passes every check trivially") {
    const auto sol = solve(ScatteringProfile::constant(2.0), 0.2, 1.0, 0.0);
    CHECK(check_entropy(sol).pass);
    CHECK(check_entropy(sol).lhs == 0.0);
    for (const auto& r : check_apriori(sol)) CHECK(r.pass);
    CHECK(check_crucial(sol).pass);
    for (const auto& r : check_hdiv(sol)) CHECK(r.pass);
}

TEST_CASE("f - <f> scales like eps") {
    const auto p = ScatteringProfile::sinusoidal(2.0, 1.0);
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto sol = solve(p, eps);
        const auto r = check_apriori(sol)[1];
        CHECK(r.name == "apriori_f_minus_density");
        CHECK(r.lhs / eps <= l2_norm(sol.problem().source(), sol.problem().grid().width()) / std::sqrt(1.0));
    }
}

TEST_CASE("make_report applies relative tolerance and additive allowance") {
    CHECK(make_report("x", 1.0, 1.0, 0.0).pass);
    CHECK_FALSE(make_report("x", 1.01, 1.0, 0.0).pass);
    CHECK(make_report("x", 1.01, 1.0, 0.02).pass);
    CHECK(make_report("x", 1.01, 1.0, 0.0, 0.02).pass);
    CHECK(make_report("x", 0.5, 1.0, 0.0).slack == Approx(0.5));
}

TEST_CASE("G_eps uniform check flags beta > 2 as outside the hypothesis") {
    const auto p = ScatteringProfile::sinusoidal(2.0, 1.0);
    std::vector<KineticSolution> sweep{solve(p, 0.2), solve(p, 0.1)};
    const auto r = check_g_eps_uniform(sweep, 1.0);
    CHECK(r.pass);
    CHECK_FALSE(r.out_of_hypothesis);
    CHECK(check_g_eps_uniform(sweep, 3.0).out_of_hypothesis);
    CHECK_THROWS_AS(check_g_eps_uniform(std::span<const KineticSolution>{}, 1.0), InvalidArgument);
}

TEST_CASE("Sobolev norm of sin(kx) matches the closed form") {
    const double length = 2 * std::numbers::pi;
    const auto u = sample(256, length, [](double x) { return std::sin(3 * x); });
    for (double s : {-1.0, -0.5, 0.0, 0.5}) {
        const double exact = std::sqrt(std::numbers::pi * std::pow(10.0, s));
        CHECK(sobolev_norm(u, length, s).value == Approx(exact).epsilon(1e-12));
    }
    const auto interp = sobolev_norm(u, length, -0.5, SobolevMode::DualityInterpolation);
    CHECK(interp.value ==
          Approx(std::sqrt(sobolev_norm(u, length, -1.0).value * sobolev_norm(u, length, 0.0).value)).epsilon(1e-14));
    // For a single mode, interpolation is exact.
    CHECK(interp.value == Approx(sobolev_norm(u, length, -0.5).value).epsilon(1e-12));
}

TEST_CASE("Sobolev norms drop the mean for negative orders") {
    const std::vector<double> c(128, 2.0);
    CHECK(sobolev_norm(c, 1.0, -0.5).value <= 1e-14);
    CHECK(sobolev_norm(c, 1.0, 0.0).value == Approx(2.0));
}

TEST_CASE("Sobolev norm input validation") {
    const std::vector<double> small(32, 1.0), u(64, 1.0);
    CHECK_THROWS_AS(sobolev_norm(small, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(sobolev_norm(u, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(sobolev_norm(u, 1.0, 0.0, SobolevMode::DualityInterpolation), InvalidArgument);
    std::vector<double> x(64);
    for (std::size_t k = 0; k < 64; ++k) x[k] = std::pow(k / 64.0, 2);
    CHECK_THROWS_AS(sobolev_norm(x, u, 1.0, 0.0), InvalidArgument);
    for (std::size_t k = 0; k < 64; ++k) x[k] = k / 64.0;
    CHECK(sobolev_norm(x, u, 1.0, 0.0).value == Approx(1.0));
}

TEST_CASE("quotient norms of 2 + sin(x / eps^beta) scale like eps^beta and eps^(beta/2)") {
    const auto p = ScatteringProfile::sinusoidal(2.0, 1.0);
    const std::function<double(double)> bar = [](double) { return 2.0; };
    const std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
    for (double beta : {1.0, 2.0, 3.0}) {
        for (double order : {-1.0, -0.5}) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& qn : quotient_norms(p, bar, beta, eps, order)) pts.emplace_back(qn.eps, qn.value);
            CHECK(fit_rate(pts) == Approx(-order * beta).epsilon(0.1));
        }
    }
}

TEST_CASE("H^{-1/2} condition holds iff beta > 2") {
    const auto p = ScatteringProfile::sinusoidal(2.0, 1.0);
    const std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
    CHECK_FALSE(check_h_half_condition(p, 2.0, 1.0, eps).satisfied);
    CHECK_FALSE(check_h_half_condition(p, 2.0, 2.0, eps).satisfied);
    const auto r = check_h_half_condition(p, 2.0, 3.0, eps);
    CHECK(r.satisfied);
    CHECK(r.exponent == Approx(1.5).epsilon(0.1));

    const auto flat = check_h_half_condition(ScatteringProfile::constant(2.0), 2.0, 1.0, eps);
    CHECK(flat.satisfied);
    CHECK(std::isinf(flat.exponent));
    CHECK_THROWS_AS(check_h_half_condition(p, 0.0, 1.0, eps), InvalidArgument);
    CHECK_THROWS_AS(check_h_half_condition(p, 2.0, 1.0, std::vector<double>{0.1, 0.05}), InvalidArgument);
}

TEST_CASE("flux H^{1/2} norm is reported") {
    const auto sol = solve(ScatteringProfile::constant(2.0), 0.1);
    CHECK(flux_h_half_norm(sol) > 0.0);
}
