#pragma once

// Flat `key = value` configuration files and the objects built from them.

#include <kinhom/diffusion_solver.hpp>
#include <kinhom/errors.hpp>
#include <kinhom/kinetic_solver.hpp>
#include <kinhom/scattering_field.hpp>
#include <kinhom/velocity_space.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace kinhom {

namespace detail {
inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
} // namespace detail

/// Raw key/value pairs. Lines are `key = value`; `#` starts a comment.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& origin = "<config>") {
        KeyValueConfig cfg;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
            const auto key = detail::trim(line.substr(0, eq));
            const auto value = detail::trim(line.substr(eq + 1));
            if (key.empty()) throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": empty key");
            if (!cfg.values_.emplace(key, value).second)
                throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        return cfg;
    }

    static KeyValueConfig parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
        return parse(in, path);
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : to_double(key, it->second);
    }

    std::size_t get_size(const std::string& key, std::size_t fallback) const {
        const double v = get_double(key, static_cast<double>(fallback));
        if (v < 0.0 || v != std::floor(v)) throw InvalidArgument("config key '" + key + "' must be a nonnegative integer");
        return static_cast<std::size_t>(v);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
        if (it->second == "false" || it->second == "0" || it->second == "no") return false;
        throw InvalidArgument("config key '" + key + "' must be a boolean");
    }

    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        std::string item;
        std::istringstream in(it->second);
        while (std::getline(in, item, ',')) {
            item = detail::trim(item);
            if (!item.empty()) out.push_back(to_double(key, item));
        }
        if (out.empty()) throw InvalidArgument("config key '" + key + "' holds an empty list");
        return out;
    }

    /// Throws on any key outside `known`.
    void check_keys(const std::set<std::string>& known) const {
        for (const auto& [k, v] : values_)
            if (!known.count(k)) throw InvalidArgument("unknown config key '" + k + "'");
    }

private:
    static double to_double(const std::string& key, const std::string& text) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("config key '" + key + "' is not a number: '" + text + "'");
        }
        if (used != text.size()) throw InvalidArgument("config key '" + key + "' is not a number: '" + text + "'");
        return v;
    }

    std::map<std::string, std::string> values_;
};

enum class SourceKind { Constant, GaussianBump, UserTable };

/// g(x): a constant, value * exp(-x^2 / 0.08), or a piecewise-linear table.
struct SourceSpec {
    SourceKind kind = SourceKind::Constant;
    double value = 1.0;
    std::vector<double> table_x, table_g;

    double operator()(double x) const {
        switch (kind) {
        case SourceKind::Constant: return value;
        case SourceKind::GaussianBump: return value * std::exp(-x * x / 0.08);
        case SourceKind::UserTable: {
            if (x <= table_x.front()) return table_g.front();
            if (x >= table_x.back()) return table_g.back();
            const auto it = std::upper_bound(table_x.begin(), table_x.end(), x);
            const std::size_t k = static_cast<std::size_t>(it - table_x.begin());
            const double s = (x - table_x[k - 1]) / (table_x[k] - table_x[k - 1]);
            return table_g[k - 1] + s * (table_g[k] - table_g[k - 1]);
        }
        }
        return 0.0;
    }

    static SourceSpec load_table(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot open source table '" + path + "'");
        SourceSpec s;
        s.kind = SourceKind::UserTable;
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (detail::trim(line).empty()) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double x = 0.0, g = 0.0;
            if (!(row >> x >> g)) throw InvalidArgument("malformed row in source table '" + path + "'");
            require(s.table_x.empty() || x > s.table_x.back(), "source table x column must increase");
            s.table_x.push_back(x);
            s.table_g.push_back(g);
        }
        require(s.table_x.size() >= 2, "source table needs at least two rows");
        return s;
    }
};

enum class CompareMode { WeakStar, PointwiseSigmaBar, Both };

/// Everything an eps-sweep needs, validated.
struct SweepConfig {
    QuadratureFamily quadrature_family = QuadratureFamily::GaussLegendreUniform;
    std::size_t quadrature_n = 16;
    ScatteringProfile profile = ScatteringProfile::sinusoidal(2.0, 1.0);
    double beta = 1.0;
    double half_length = 1.0;
    SourceSpec source;
    std::vector<double> eps{0.2, 0.1, 0.05, 0.025};

    // resolution rule: N_x = max(min_cells, 2l cells_per_period/(eta P), 2l cells_per_eps/eps), rounded up to even
    double cells_per_period = 16.0;
    double cells_per_eps = 100.0;
    std::size_t min_cells = 16;
    std::size_t max_cells = std::size_t{1} << 22;
    std::optional<std::size_t> fixed_cells;

    SolverOptions solver;
    CompareMode compare = CompareMode::WeakStar;
    double sigma_bar_value = 0.0; ///< 0 means the period average of the profile
    double sigma_bar_curvature = 0.0;
    std::size_t test_functions = 8;
    double g_eps_factor = 10.0;
    std::size_t threads = 1;
    std::string output_dir;

    VelocityQuadrature quadrature() const { return build_quadrature(quadrature_family, quadrature_n); }

    /// sigma_bar(x) = value + curvature * x^2 for the pointwise comparison.
    std::function<double(double)> sigma_bar() const {
        const double base = sigma_bar_value > 0.0 ? sigma_bar_value : weak_star_limit(profile);
        const double curv = sigma_bar_curvature;
        return [base, curv](double x) { return base + curv * x * x; };
    }

    /// Cells required at this eps, or nullopt when above max_cells.
    std::optional<std::size_t> cells_for(double epsilon) const {
        if (fixed_cells) return *fixed_cells;
        const ScatteringField field(profile, epsilon, beta);
        const double span = 2.0 * half_length;
        const double by_period = std::ceil(span * cells_per_period / field.spatial_period() * (1.0 - 1e-12));
        const double by_eps = std::ceil(span * cells_per_eps / epsilon * (1.0 - 1e-12));
        double n = std::max({static_cast<double>(min_cells), by_period, by_eps});
        if (std::fmod(n, 2.0) != 0.0) n += 1.0;
        if (n > static_cast<double>(max_cells)) return std::nullopt;
        return static_cast<std::size_t>(n);
    }

    void validate() const {
        require(beta > 0.0, "beta must be positive");
        require(half_length > 0.0, "ell must be positive");
        require(!eps.empty(), "eps list must not be empty");
        for (std::size_t k = 0; k < eps.size(); ++k) {
            require(eps[k] > 0.0 && eps[k] <= 1.0, "every eps must lie in (0, 1]");
            require(k == 0 || eps[k] < eps[k - 1], "eps list must be strictly decreasing");
        }
        require(cells_per_period >= KineticProblem::cells_per_oscillation,
                "resolution.cells_per_period must be at least 16");
        require(cells_per_eps > 0.0, "resolution.cells_per_eps must be positive");
        require(max_cells <= (std::size_t{1} << 22), "resolution.max_cells may not exceed 2^22");
        require(test_functions >= 1, "weak.test_functions must be at least 1");
        require(threads >= 1, "threads must be at least 1");
        require(solver.tol > 0.0 && solver.tol <= 1e-4, "solver.tol must lie in (0, 1e-4]");
    }
};

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys{
        "quadrature.family", "quadrature.n",  "sigma.kind",       "sigma.mean",       "sigma.amplitude",
        "sigma.period",      "sigma.values",  "sigma.fractions",  "sigma.table_path", "sigma.bounds",
        "beta",              "ell",           "source.kind",      "source.value",     "source.table_path",
        "eps",               "resolution.cells_per_period",       "resolution.cells_per_eps",
        "resolution.min_cells",               "resolution.max_cells",             "grid.cells",
        "solver.tol",        "solver.max_iter", "solver.accelerate", "compare.mode", "sigma_bar.value",
        "sigma_bar.curvature", "weak.test_functions", "estimates.g_eps_factor", "threads", "output.dir",
    };
    return keys;
}

inline ScatteringProfile profile_from_config(const KeyValueConfig& kv) {
    const auto kind = kv.get("sigma.kind", "sinusoidal");
    const double period = kv.get_double("sigma.period", 2.0 * std::numbers::pi);
    ScatteringProfile p = ScatteringProfile::constant(1.0);
    if (kind == "constant") {
        p = ScatteringProfile::constant(kv.get_double("sigma.mean", 1.0), period);
    } else if (kind == "sinusoidal") {
        p = ScatteringProfile::sinusoidal(kv.get_double("sigma.mean", 2.0), kv.get_double("sigma.amplitude", 1.0),
                                          period);
    } else if (kind == "two-phase") {
        const auto values = kv.get_list("sigma.values", {1.0, 3.0});
        require(values.size() == 2, "sigma.values must hold two phase values");
        const auto fractions = kv.get_list("sigma.fractions", {0.5, 0.5});
        require(fractions.size() == 1 || (fractions.size() == 2 && std::abs(fractions[0] + fractions[1] - 1.0) < 1e-12),
                "sigma.fractions must be one fraction or two fractions summing to one");
        p = ScatteringProfile::two_phase(values[0], values[1], fractions[0], period);
    } else if (kind == "user-table") {
        require(kv.has("sigma.table_path"), "sigma.kind = user-table needs sigma.table_path");
        p = ScatteringProfile::load_user_table(kv.get("sigma.table_path", ""));
    } else {
        throw InvalidArgument("unknown sigma.kind '" + kind + "'");
    }
    if (kv.has("sigma.bounds")) {
        const auto b = kv.get_list("sigma.bounds", {});
        require(b.size() == 2, "sigma.bounds must be `a, b`");
        p = p.with_bounds(b[0], b[1]);
    }
    return p;
}

inline SourceSpec source_from_config(const KeyValueConfig& kv) {
    const auto kind = kv.get("source.kind", "constant");
    SourceSpec s;
    if (kind == "constant") {
        s.kind = SourceKind::Constant;
    } else if (kind == "gaussian-bump") {
        s.kind = SourceKind::GaussianBump;
    } else if (kind == "user-table") {
        require(kv.has("source.table_path"), "source.kind = user-table needs source.table_path");
        return SourceSpec::load_table(kv.get("source.table_path", ""));
    } else {
        throw InvalidArgument("unknown source.kind '" + kind + "'");
    }
    s.value = kv.get_double("source.value", 1.0);
    return s;
}

inline SweepConfig sweep_config_from(const KeyValueConfig& kv) {
    kv.check_keys(known_config_keys());
    SweepConfig c;
    c.quadrature_family = parse_quadrature_family(kv.get("quadrature.family", "gauss-legendre-uniform"));
    c.quadrature_n = kv.get_size("quadrature.n", 16);
    c.profile = profile_from_config(kv);
    c.beta = kv.get_double("beta", 1.0);
    c.half_length = kv.get_double("ell", 1.0);
    c.source = source_from_config(kv);
    c.eps = kv.get_list("eps", c.eps);
    c.cells_per_period = kv.get_double("resolution.cells_per_period", c.cells_per_period);
    c.cells_per_eps = kv.get_double("resolution.cells_per_eps", c.cells_per_eps);
    c.min_cells = kv.get_size("resolution.min_cells", c.min_cells);
    c.max_cells = kv.get_size("resolution.max_cells", c.max_cells);
    if (kv.has("grid.cells")) c.fixed_cells = kv.get_size("grid.cells", 0);
    c.solver.tol = kv.get_double("solver.tol", c.solver.tol);
    c.solver.max_iter = kv.get_size("solver.max_iter", c.solver.max_iter);
    c.solver.accelerate = kv.get_bool("solver.accelerate", c.solver.accelerate);
    const auto mode = kv.get("compare.mode", "weak-star");
    if (mode == "weak-star") c.compare = CompareMode::WeakStar;
    else if (mode == "pointwise-sigma-bar") c.compare = CompareMode::PointwiseSigmaBar;
    else if (mode == "both") c.compare = CompareMode::Both;
    else throw InvalidArgument("unknown compare.mode '" + mode + "'");
    c.sigma_bar_value = kv.get_double("sigma_bar.value", 0.0);
    c.sigma_bar_curvature = kv.get_double("sigma_bar.curvature", 0.0);
    c.test_functions = kv.get_size("weak.test_functions", c.test_functions);
    c.g_eps_factor = kv.get_double("estimates.g_eps_factor", c.g_eps_factor);
    c.threads = kv.get_size("threads", c.threads);
    c.output_dir = kv.get("output.dir", "");
    c.validate();
    return c;
}

inline SweepConfig load_sweep_config(const std::string& path) { return sweep_config_from(KeyValueConfig::load(path)); }

/// Kinetic problem for one eps under the configured resolution rule.
inline std::optional<KineticProblem> make_kinetic_problem(const SweepConfig& c, double epsilon) {
    const auto cells = c.cells_for(epsilon);
    if (!cells) return std::nullopt;
    const SlabGrid grid(c.half_length, *cells);
    return KineticProblem(grid, c.quadrature(), ScatteringField(c.profile, epsilon, c.beta), grid.sample(c.source));
}

} // namespace kinhom
