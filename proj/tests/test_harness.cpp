#include <kinhom/csv.hpp>
#include <kinhom/harness.hpp>

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace kinhom;
using Catch::Approx;

namespace {

SweepConfig config_from(const std::string& text) { return sweep_config_from(KeyValueConfig::parse_string(text)); }

std::vector<double> limit_density(double s, const SlabGrid& grid, const std::vector<double>& g) {
    const auto q = build_quadrature(QuadratureFamily::GaussLegendreUniform, 16);
    return solve_limit(build_limit_problem(q, ScatteringProfile::constant(s), grid, g)).rho;
}

} // namespace

TEST_CASE("key/value parsing") {
    const auto kv = KeyValueConfig::parse_string("# comment\n  beta = 2   # trailing\n\neps = 0.1, 0.05,0.01\nflag = yes\n");
    CHECK(kv.get_double("beta", 0) == 2.0);
    CHECK(kv.get_list("eps", {}) == std::vector<double>{0.1, 0.05, 0.01});
    CHECK(kv.get_bool("flag", false));
    CHECK(kv.get_double("missing", 7.0) == 7.0);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("novalue\n"), InvalidArgument);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("a = 1\na = 2\n"), InvalidArgument);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("beta = two\n").get_double("beta", 0), InvalidArgument);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("n = 1.5\n").get_size("n", 0), InvalidArgument);
    CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent.cfg"), InvalidArgument);
}

TEST_CASE("sweep config defaults and validation") {
    const auto c = config_from("");
    CHECK(c.eps == std::vector<double>{0.2, 0.1, 0.05, 0.025});
    CHECK(c.beta == 1.0);
    CHECK(c.quadrature_n == 16);
    CHECK(c.test_functions == 8);
    CHECK(c.profile.kind() == ProfileKind::Sinusoidal);

    CHECK_THROWS_AS(config_from("eps = 0.1, 0.2\n"), InvalidArgument);
    CHECK_THROWS_AS(config_from("eps = 1.5, 0.2\n"), InvalidArgument);
    CHECK_THROWS_AS(config_from("beta = 0\n"), InvalidArgument);
    CHECK_THROWS_AS(config_from("resolution.cells_per_period = 8\n"), InvalidArgument);
    CHECK_THROWS_AS(config_from("sigma.kind = wavy\n"), InvalidArgument);
    CHECK_THROWS_AS(config_from("colour = blue\n"), InvalidArgument);
    CHECK_THROWS_AS(config_from("compare.mode = strong\n"), InvalidArgument);
    CHECK_THROWS_AS(config_from("resolution.max_cells = 99999999\n"), InvalidArgument);
    CHECK_THROWS_AS(config_from("sigma.kind = two-phase\nsigma.values = 1\n"), InvalidArgument);

    const auto tp = config_from("sigma.kind = two-phase\nsigma.values = 1, 3\nsigma.fractions = 0.3, 0.7\n");
    CHECK(tp.profile.kind() == ProfileKind::TwoPhase);
    CHECK(weak_star_limit(tp.profile) == Approx(0.3 * 1 + 0.7 * 3).epsilon(1e-3));
    CHECK(config_from("sigma.bounds = 0.5, 4\n").profile.bounds().lower == 0.5);
}

TEST_CASE("resolution rule") {
    const auto c = config_from("sigma.kind = sinusoidal\nbeta = 2\n");
    // 2 * 16 / (0.1^2 * 2 pi) = 509.3 -> 510 cells; 2 * 100 / 0.1 = 2000 cells
    CHECK(*c.cells_for(0.1) == 2000);
    CHECK(*c.cells_for(0.01) == 50930);
    const auto capped = config_from("resolution.max_cells = 1000\n");
    CHECK_FALSE(capped.cells_for(0.025).has_value());
    CHECK(*config_from("grid.cells = 64\n").cells_for(0.5) == 64);
}

TEST_CASE("source specifications") {
    SourceSpec bump;
    bump.kind = SourceKind::GaussianBump;
    bump.value = 2.0;
    CHECK(bump(0.0) == 2.0);
    CHECK(bump(0.2) == Approx(2.0 * std::exp(-0.5)));

    const auto path = std::filesystem::temp_directory_path() / "kinhom_source.csv";
    {
        std::ofstream out(path);
        out << "x,g\n-1,0\n0,2\n1,0\n";
    }
    const auto c = config_from("source.kind = user-table\nsource.table_path = " + path.string() + "\n");
    CHECK(c.source(-0.5) == Approx(1.0));
    CHECK(c.source(0.25) == Approx(1.5));
    CHECK(c.source(3.0) == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("fit_rate recovers exact and noisy power laws") {
    std::vector<std::pair<double, double>> lin, quad, noisy;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    for (double eps : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        lin.emplace_back(eps, eps);
        quad.emplace_back(eps, eps * eps);
        noisy.emplace_back(eps, 3.0 * std::pow(eps, 0.7) * (1.0 + noise(rng)));
    }
    CHECK(fit_rate(lin) == Approx(1.0).epsilon(1e-12));
    CHECK(fit_rate(quad) == Approx(2.0).epsilon(1e-12));
    CHECK(fit_rate(noisy) == Approx(0.7).margin(0.05));
    const std::vector<std::pair<double, double>> two{{0.1, 0.1}, {0.05, 0.05}};
    const std::vector<std::pair<double, double>> zero{{0.1, 0.1}, {0.05, 0.0}, {0.01, 0.01}};
    CHECK_THROWS_AS(fit_rate(two), InvalidArgument);
    CHECK_THROWS_AS(fit_rate(zero), InvalidArgument);
}

TEST_CASE("effective coefficient: self-consistency and scale invariance") {
    const auto q = build_quadrature(QuadratureFamily::GaussLegendreUniform, 16);
    const SlabGrid grid(1.0, 800);
    const std::vector<double> g(800, 1.0);
    const auto rho = limit_density(2.0, grid, g);
    const double s = fit_effective_coefficient(rho, g, grid, q, 1.0, 3.0);
    CHECK(s == Approx(2.0).margin(1e-3));

    std::vector<double> g2(g), rho2(rho);
    for (auto& x : g2) x *= 3.7;
    for (auto& x : rho2) x *= 3.7;
    CHECK(fit_effective_coefficient(rho2, g2, grid, q, 1.0, 3.0) == Approx(s).epsilon(1e-6));

    const auto rho15 = limit_density(1.5, grid, g);
    CHECK(fit_effective_coefficient(rho15, g, grid, q, 1.0, 3.0) == Approx(1.5).margin(1e-3));
}

TEST_CASE("effective coefficient: boundary minimum raises BracketFailure with a trace") {
    const auto q = build_quadrature(QuadratureFamily::GaussLegendreUniform, 16);
    const SlabGrid grid(1.0, 200);
    const std::vector<double> g(200, 1.0), zero(200, 0.0);
    try {
        fit_effective_coefficient(zero, g, grid, q, 1.0, 3.0);
        FAIL("expected BracketFailure");
    } catch (const BracketFailure& e) {
        CHECK(e.trace().size() == 33);
        CHECK(e.trace().front().first == Approx(0.5));
        CHECK(e.trace().back().first == Approx(6.0));
    }
}

TEST_CASE("weak errors against the sine basis") {
    const SlabGrid grid(1.0, 1000);
    const auto u = grid.sample([](double x) { return std::sin(3 * std::numbers::pi * (x + 1) / 2); });
    const std::vector<double> zero(1000, 0.0);
    const auto w = weak_errors(grid, u, zero, 4);
    CHECK(w[0] == Approx(0.0).margin(1e-12));
    CHECK(w[2] == Approx(1.0).epsilon(1e-5)); // integral of sin^2 over a length-2 window
    CHECK(w[3] == Approx(0.0).margin(1e-12));
}

TEST_CASE("constant-sigma sweep: decreasing errors, rate and coefficient") {
    auto c = config_from("sigma.kind = constant\nsigma.mean = 2\neps = 0.2, 0.1, 0.05\n");
    const auto rep = run_sweep(c);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.exit_code() == 0);
    CHECK(rep.rows[1].l2_err < rep.rows[0].l2_err);
    CHECK(rep.rows[2].l2_err < rep.rows[1].l2_err);
    CHECK(std::isnan(rep.rows[1].rate_so_far));
    CHECK(rep.rows[2].rate_so_far >= 0.5);
    CHECK(rep.fitted_rate == rep.rows[2].rate_so_far);
    CHECK(rep.sigma_star == Approx(2.0));
    CHECK(rep.rows[2].s_hat == Approx(2.0).epsilon(0.1));
    CHECK(rep.g_eps_check.has_value());
    for (const auto& r : rep.rows) {
        CHECK(r.checks_passed);
        CHECK(r.weak_err.size() == 8);
        CHECK(r.checks.size() == 8);
    }
}

TEST_CASE("zero source sweep reports zero errors") {
    const auto rep = run_sweep(config_from("source.value = 0\neps = 0.2, 0.1, 0.05\n"));
    for (const auto& r : rep.rows) {
        CHECK(r.l2_err == 0.0);
        for (double w : r.weak_err) CHECK(w == 0.0);
        CHECK(std::isnan(r.s_hat));
        CHECK(r.checks_passed);
    }
    CHECK(std::isnan(rep.fitted_rate));
}

TEST_CASE("report rows are bitwise identical across thread counts") {
    auto c = config_from("eps = 0.2, 0.1, 0.05\ncompare.mode = both\n");
    const auto a = run_sweep(c);
    c.threads = 3;
    const auto b = run_sweep(c);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        CHECK(std::memcmp(&a.rows[k].l2_err, &b.rows[k].l2_err, sizeof(double)) == 0);
        CHECK(std::memcmp(&a.rows[k].s_hat, &b.rows[k].s_hat, sizeof(double)) == 0);
        CHECK(a.rows[k].weak_err == b.rows[k].weak_err);
        CHECK(std::memcmp(a.solutions[k]->values().data(), b.solutions[k]->values().data(),
                          a.solutions[k]->values().size_bytes()) == 0);
        CHECK(a.rows[k].l2_err_pointwise == Approx(a.rows[k].l2_err).epsilon(1e-10));
    }
}

TEST_CASE("points above the cell budget are skipped with exit code 2") {
    const auto rep = run_sweep(config_from("eps = 0.2, 0.1, 0.05\nresolution.max_cells = 2500\n"));
    REQUIRE(rep.rows.size() == 3);
    CHECK_FALSE(rep.rows[1].skipped);
    CHECK(rep.rows[2].skipped);
    CHECK(rep.skipped() == 1);
    CHECK(rep.exit_code() == 2);
}

TEST_CASE("a solver failure aborts and keeps the partial report") {
    auto c = config_from("eps = 0.2, 0.1, 0.05\nsolver.max_iter = 3\nsolver.accelerate = false\n");
    const auto rep = run_sweep(c);
    CHECK(rep.aborted);
    CHECK(rep.exit_code() == 1);
    REQUIRE(rep.rows.size() == 1);
    CHECK_FALSE(rep.rows[0].error.empty());
    CHECK(rep.failure.find("did not converge") != std::string::npos);
}

TEST_CASE("report CSV layout") {
    const auto c = config_from("sigma.kind = constant\nsigma.mean = 2\neps = 0.2, 0.1, 0.05\nweak.test_functions = 3\n");
    const auto rep = run_sweep(c);
    const auto dir = std::filesystem::temp_directory_path() / "kinhom_report_test";
    write_report_csv(dir / "report.csv", rep, 3, false);
    write_checks_csv(dir / "checks.csv", rep);
    write_solution_csv(dir / "sol.csv", *rep.solutions[0]);
    std::ifstream in(dir / "report.csv");
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "eps,beta,nx,l2_err,weak_err_1,weak_err_2,weak_err_3,rate_so_far,s_hat,sigma_star,sigma_harm,"
                    "checks_passed");
    std::getline(in, row);
    CHECK(row.rfind("0.20000000000000001,1,1000,", 0) == 0);
    std::ifstream sol(dir / "sol.csv");
    std::getline(sol, header);
    CHECK(header == "x,density,flux,second_moment,zeta,g_eps");
    std::filesystem::remove_all(dir);
    CHECK(format_short(0.025) == "0.025");
}

TEST_CASE("oscillating sweep: largest weak error over the sine basis decreases") {
    const auto rep = run_sweep(config_from("sigma.kind = sinusoidal\nbeta = 1\n"));
    REQUIRE(rep.rows.size() == 4);
    double previous = 1e9;
    for (const auto& r : rep.rows) {
        const double worst = *std::max_element(r.weak_err.begin(), r.weak_err.end());
        CHECK(worst < previous);
        previous = worst;
    }
    CHECK(rep.exit_code() == 0);
}
