#pragma once

// Periodic scattering profiles sigma(y) and their oscillating realizations
// sigma_eps(x) = sigma(x / eps^beta).

#include <kinhom/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace kinhom {

enum class ProfileKind { Constant, Sinusoidal, TwoPhase, UserTable };

inline std::string to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::Sinusoidal: return "sinusoidal";
    case ProfileKind::TwoPhase: return "two-phase";
    case ProfileKind::UserTable: return "user-table";
    }
    return "?";
}

struct Bounds {
    double lower; ///< a
    double upper; ///< b
};

/// Periodic base profile sigma(y) with declared bounds a <= sigma <= b and
/// Lipschitz constant c. Two-phase profiles carry linear transition layers
/// of width transition_fraction * period centered on each interface.
class ScatteringProfile {
public:
    static constexpr double transition_fraction = 0.01;

    static ScatteringProfile constant(double value, double period = 2.0 * std::numbers::pi) {
        require(value > 0.0, "constant scattering value must be positive");
        ScatteringProfile p(ProfileKind::Constant, period);
        p.params_ = {value};
        p.bounds_ = {value, value};
        p.lipschitz_ = 0.0;
        return p;
    }

    /// mean + amplitude * sin(2 pi y / period); the default period gives mean + amplitude * sin(y).
    static ScatteringProfile sinusoidal(double mean, double amplitude,
                                        double period = 2.0 * std::numbers::pi) {
        require(mean - std::abs(amplitude) > 0.0, "sinusoidal profile must stay positive");
        ScatteringProfile p(ProfileKind::Sinusoidal, period);
        p.params_ = {mean, amplitude};
        p.bounds_ = {mean - std::abs(amplitude), mean + std::abs(amplitude)};
        p.lipschitz_ = std::abs(amplitude) * 2.0 * std::numbers::pi / period;
        return p;
    }

    /// Value first on [0, fraction * period), second on the rest of the period.
    static ScatteringProfile two_phase(double first, double second, double fraction = 0.5,
                                       double period = 2.0 * std::numbers::pi) {
        require(first > 0.0 && second > 0.0, "two-phase values must be positive");
        require(fraction > 0.0 && fraction < 1.0, "two-phase volume fraction must lie in (0, 1)");
        ScatteringProfile p(ProfileKind::TwoPhase, period);
        const double layer = transition_fraction * period;
        require(layer < fraction * period && layer < (1.0 - fraction) * period,
                "two-phase volume fraction too small for the transition layer");
        p.params_ = {first, second, fraction};
        p.bounds_ = {std::min(first, second), std::max(first, second)};
        p.lipschitz_ = std::abs(second - first) / layer;
        return p;
    }

    /// Piecewise-linear periodic table. ys must start at 0 and increase to the
    /// period; the last value must repeat the first.
    static ScatteringProfile user_table(std::vector<double> ys, std::vector<double> values) {
        require(ys.size() >= 2 && ys.size() == values.size(), "user table needs matching y and sigma columns");
        require(ys.front() == 0.0, "user table must start at y = 0");
        for (std::size_t k = 1; k < ys.size(); ++k)
            require(ys[k] > ys[k - 1], "user table y column must be strictly increasing");
        require(std::abs(values.front() - values.back()) <= 1e-12,
                "user table must be periodic: last sigma must equal first");
        ScatteringProfile p(ProfileKind::UserTable, ys.back());
        double lo = values.front(), hi = values.front(), slope = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k) {
            lo = std::min(lo, values[k]);
            hi = std::max(hi, values[k]);
            if (k > 0) slope = std::max(slope, std::abs(values[k] - values[k - 1]) / (ys[k] - ys[k - 1]));
        }
        require(lo > 0.0, "user table sigma values must be positive");
        p.table_y_ = std::move(ys);
        p.table_sigma_ = std::move(values);
        p.bounds_ = {lo, hi};
        p.lipschitz_ = slope;
        return p;
    }

    /// Reads a two-column CSV `y,sigma` with a header row.
    static ScatteringProfile load_user_table(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot open sigma table '" + path + "'");
        std::string line;
        std::getline(in, line); // header
        std::vector<double> ys, vals;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double y = 0.0, s = 0.0;
            if (!(row >> y >> s)) throw InvalidArgument("malformed row in sigma table '" + path + "': " + line);
            ys.push_back(y);
            vals.push_back(s);
        }
        return user_table(std::move(ys), std::move(vals));
    }

    /// Replaces the declared bounds (a, b) without touching the profile itself.
    ScatteringProfile with_bounds(double lower, double upper) const {
        require(0.0 < lower && lower <= upper, "declared bounds need 0 < a <= b");
        ScatteringProfile p = *this;
        p.bounds_ = {lower, upper};
        return p;
    }

    ProfileKind kind() const noexcept { return kind_; }
    double period() const noexcept { return period_; }
    Bounds bounds() const noexcept { return bounds_; }
    double lipschitz() const noexcept { return lipschitz_; }
    const std::vector<double>& params() const noexcept { return params_; }

    double operator()(double y) const {
        switch (kind_) {
        case ProfileKind::Constant: return params_[0];
        case ProfileKind::Sinusoidal:
            return params_[0] + params_[1] * std::sin(2.0 * std::numbers::pi * y / period_);
        case ProfileKind::TwoPhase: return two_phase_value(wrap(y));
        case ProfileKind::UserTable: return table_value(wrap(y));
        }
        return 0.0;
    }

private:
    ScatteringProfile(ProfileKind kind, double period) : kind_(kind), period_(period) {
        require(period > 0.0 && std::isfinite(period), "profile period must be positive");
    }

    double wrap(double y) const {
        double t = y - period_ * std::floor(y / period_);
        if (t >= period_) t -= period_;
        return t < 0.0 ? 0.0 : t;
    }

    double two_phase_value(double t) const {
        const double first = params_[0], second = params_[1];
        const double split = params_[2] * period_;
        const double half = 0.5 * transition_fraction * period_;
        if (t < half) return second + (first - second) * (t + half) / (2.0 * half);
        if (t > period_ - half) return second + (first - second) * (t - (period_ - half)) / (2.0 * half);
        if (std::abs(t - split) < half) return first + (second - first) * (t - (split - half)) / (2.0 * half);
        return t < split ? first : second;
    }

    double table_value(double t) const {
        const auto it = std::upper_bound(table_y_.begin(), table_y_.end(), t);
        const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - table_y_.begin()), 1,
                                                      table_y_.size() - 1);
        const double y0 = table_y_[k - 1], y1 = table_y_[k];
        const double s = (t - y0) / (y1 - y0);
        return table_sigma_[k - 1] + s * (table_sigma_[k] - table_sigma_[k - 1]);
    }

    ProfileKind kind_;
    double period_;
    std::vector<double> params_;
    std::vector<double> table_y_, table_sigma_;
    Bounds bounds_{1.0, 1.0};
    double lipschitz_ = 0.0;
};

/// sigma_eps(x) = profile(x / eta) with eta = eps^beta.
class ScatteringField {
public:
    ScatteringField(ScatteringProfile profile, double epsilon, double beta)
        : profile_(std::move(profile)), epsilon_(epsilon), beta_(beta), eta_(std::pow(epsilon, beta)) {
        require(epsilon > 0.0, "epsilon must be positive");
        require(beta > 0.0, "beta must be positive");
    }

    const ScatteringProfile& profile() const noexcept { return profile_; }
    double epsilon() const noexcept { return epsilon_; }
    double beta() const noexcept { return beta_; }
    double eta() const noexcept { return eta_; }
    /// Period of sigma_eps in x.
    double spatial_period() const noexcept { return eta_ * profile_.period(); }

    double operator()(double x) const { return profile_(x / eta_); }

private:
    ScatteringProfile profile_;
    double epsilon_;
    double beta_;
    double eta_;
};

inline double evaluate(const ScatteringField& field, double x) { return field(x); }

namespace detail {
constexpr std::size_t cell_average_panels = std::size_t{1} << 14;

template <class F>
double periodic_mean(const ScatteringProfile& p, F&& integrand) {
    // trapezoid on a periodic integrand; spectrally accurate for smooth profiles
    const double dy = p.period() / static_cast<double>(cell_average_panels);
    double sum = 0.0;
    for (std::size_t k = 0; k < cell_average_panels; ++k) sum += integrand(p(k * dy));
    return sum / static_cast<double>(cell_average_panels);
}
} // namespace detail

/// Period average of sigma: the weak-* limit of sigma(x / eta) as eta -> 0.
inline double weak_star_limit(const ScatteringProfile& profile) {
    return detail::periodic_mean(profile, [](double s) { return s; });
}

/// Reciprocal of the period average of 1 / sigma.
inline double harmonic_mean(const ScatteringProfile& profile) {
    return 1.0 / detail::periodic_mean(profile, [](double s) { return 1.0 / s; });
}

struct HypothesisReport {
    double min_value = 0.0;
    double max_value = 0.0;
    double max_slope = 0.0;
    double slope_bound = 0.0; ///< c / eta
    bool pass = true;
    std::vector<double> violations; ///< positions where a check failed (first 64)
    std::size_t violation_count = 0;
};

/// Audits a <= sigma_eps <= b and |sigma_eps'| <= c / eta on audit_points
/// uniformly spaced positions over [x0, x1] plus their midpoints.
inline HypothesisReport verify_hypotheses(const ScatteringField& field, std::size_t audit_points, double x0,
                                          double x1) {
    require(audit_points >= 2, "verify_hypotheses needs at least two audit points");
    require(x1 > x0, "audit interval must be nonempty");
    constexpr double slack = 1e-6;
    const auto [a, b] = field.profile().bounds();
    const std::size_t samples = 2 * audit_points - 1;
    const double step = (x1 - x0) / static_cast<double>(samples - 1);

    HypothesisReport rep;
    rep.slope_bound = field.profile().lipschitz() / field.eta();
    rep.min_value = rep.max_value = field(x0);

    auto flag = [&rep](double x) {
        rep.pass = false;
        ++rep.violation_count;
        if (rep.violations.size() < 64) rep.violations.push_back(x);
    };

    double prev = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double x = x0 + step * static_cast<double>(k);
        const double s = field(x);
        rep.min_value = std::min(rep.min_value, s);
        rep.max_value = std::max(rep.max_value, s);
        bool bad = s < a * (1.0 - slack) || s > b * (1.0 + slack);
        if (k > 0) {
            const double slope = std::abs(s - prev) / step;
            rep.max_slope = std::max(rep.max_slope, slope);
            bad = bad || slope > rep.slope_bound * (1.0 + slack);
        }
        if (bad) flag(x);
        prev = s;
    }
    return rep;
}

/// Audits one full spatial period of the field.
inline HypothesisReport verify_hypotheses(const ScatteringField& field, std::size_t audit_points) {
    return verify_hypotheses(field, audit_points, 0.0, field.spatial_period());
}

} // namespace kinhom
