#include <kinhom/scattering_field.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace kinhom;
using Catch::Approx;

namespace {

// Composite Simpson rule on [0, 2 pi], independent of the library's trapezoid.
template <class F>
double simpson_mean(F&& f) {
    const int n = 20000;
    const double h = 2 * std::numbers::pi / n;
    double s = f(0.0) + f(2 * std::numbers::pi);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
    return s * h / 3.0 / (2 * std::numbers::pi);
}

} // namespace

TEST_CASE("constant profile: both means equal the value") {
    const auto p = ScatteringProfile::constant(2.0);
    CHECK(weak_star_limit(p) == Approx(2.0).epsilon(1e-14));
    CHECK(harmonic_mean(p) == Approx(2.0).epsilon(1e-14));
    CHECK(p.lipschitz() == 0.0);
}

TEST_CASE("2 + sin: weak-* limit 2 and harmonic mean sqrt 3") {
    const auto p = ScatteringProfile::sinusoidal(2.0, 1.0);
    const double harmonic_oracle = 1.0 / simpson_mean([](double y) { return 1.0 / (2.0 + std::sin(y)); });
    CHECK(harmonic_oracle == Approx(std::sqrt(3.0)).epsilon(1e-10));
    CHECK(weak_star_limit(p) == Approx(2.0).epsilon(1e-12));
    CHECK(harmonic_mean(p) == Approx(harmonic_oracle).epsilon(1e-10));
    CHECK(p.bounds().lower == 1.0);
    CHECK(p.bounds().upper == 3.0);
    CHECK(p(std::numbers::pi / 2) == Approx(3.0));
}

TEST_CASE("two-phase {1,3}: weak-* 2, harmonic near 1.5") {
    const auto p = ScatteringProfile::two_phase(1.0, 3.0);
    CHECK(weak_star_limit(p) == Approx(2.0).epsilon(1e-6));
    CHECK(harmonic_mean(p) == Approx(1.5).margin(0.01));
    CHECK(p(0.25 * p.period()) == 1.0);
    CHECK(p(0.75 * p.period()) == 3.0);
    CHECK_THROWS_AS(ScatteringProfile::two_phase(1.0, 3.0, 0.001), InvalidArgument);
    CHECK_THROWS_AS(ScatteringProfile::two_phase(-1.0, 3.0), InvalidArgument);
}

TEST_CASE("profiles are periodic and the field rescales by eta = eps^beta") {
    const auto p = ScatteringProfile::sinusoidal(2.0, 0.5, 3.0);
    for (double y : {-4.1, -0.3, 0.0, 0.7, 2.9, 11.2}) CHECK(p(y + 3.0) == Approx(p(y)).epsilon(1e-13));
    const ScatteringField f(p, 0.1, 2.0);
    CHECK(f.eta() == Approx(0.01));
    CHECK(f.spatial_period() == Approx(0.03));
    CHECK(f(0.0123) == Approx(p(1.23)).epsilon(1e-13));
    CHECK(evaluate(f, 0.0123) == f(0.0123));
    CHECK_THROWS_AS(ScatteringProfile::sinusoidal(1.0, 1.0), InvalidArgument);
}

TEST_CASE("verify_hypotheses audits bounds and slope") {
    const auto p = ScatteringProfile::sinusoidal(2.0, 1.0);
    const ScatteringField f(p, 0.05, 1.0);
    const auto ok = verify_hypotheses(f, 512);
    CHECK(ok.pass);
    CHECK(ok.violation_count == 0);
    CHECK(ok.min_value == Approx(1.0).margin(1e-4));
    CHECK(ok.max_value == Approx(3.0).margin(1e-4));
    CHECK(ok.max_slope <= ok.slope_bound);

    const ScatteringField tight(p.with_bounds(1.5, 3.0), 0.05, 1.0);
    const auto bad = verify_hypotheses(tight, 512);
    CHECK_FALSE(bad.pass);
    CHECK(bad.violation_count > 0);
    CHECK(!bad.violations.empty());

    const auto tp = ScatteringProfile::two_phase(1.0, 3.0);
    CHECK(verify_hypotheses(ScatteringField(tp, 0.1, 1.0), 4096).pass);
}

TEST_CASE("user table interpolates linearly and wraps") {
    const auto path = std::filesystem::temp_directory_path() / "kinhom_sigma_table.csv";
    {
        std::ofstream out(path);
        out << "y,sigma\n0,1\n1,3\n2,1\n";
    }
    const auto p = ScatteringProfile::load_user_table(path.string());
    CHECK(p.kind() == ProfileKind::UserTable);
    CHECK(p.period() == 2.0);
    CHECK(p(0.5) == Approx(2.0));
    CHECK(p(1.5) == Approx(2.0));
    CHECK(p(2.5) == Approx(2.0));
    CHECK(p.lipschitz() == Approx(2.0));
    CHECK(weak_star_limit(p) == Approx(2.0).epsilon(1e-6));
    std::filesystem::remove(path);

    CHECK_THROWS_AS(ScatteringProfile::user_table({0, 1, 2}, {1, 3, 2}), InvalidArgument);
    CHECK_THROWS_AS(ScatteringProfile::user_table({0, 2, 1}, {1, 3, 1}), InvalidArgument);
    CHECK_THROWS_AS(ScatteringProfile::user_table({0, 1, 2}, {1, -3, 1}), InvalidArgument);
    CHECK_THROWS_AS(ScatteringProfile::load_user_table("/nonexistent/table.csv"), InvalidArgument);
}
