#pragma once

// Discrete velocity measure on V = (-1, 1) and the collision operator
// L phi = phi - <phi>.

#include <kinhom/errors.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kinhom {

enum class QuadratureFamily { GaussLegendreUniform, UniformMidpoint };

inline QuadratureFamily parse_quadrature_family(std::string_view name) {
    if (name == "gauss-legendre-uniform") return QuadratureFamily::GaussLegendreUniform;
    if (name == "uniform-midpoint") return QuadratureFamily::UniformMidpoint;
    throw InvalidArgument("unknown quadrature family '" + std::string(name) + "'");
}

inline std::string to_string(QuadratureFamily family) {
    switch (family) {
    case QuadratureFamily::GaussLegendreUniform: return "gauss-legendre-uniform";
    case QuadratureFamily::UniformMidpoint: return "uniform-midpoint";
    }
    return "?";
}

/// Symmetric probability measure on (-1, 1) represented by nodes and weights.
///
/// Nodes are stored in ascending order and node j mirrors node n-1-j exactly,
/// so every velocity average is accumulated pairwise and odd moments vanish
/// identically. Immutable after construction.
class VelocityQuadrature {
public:
    VelocityQuadrature(std::vector<double> nodes, std::vector<double> weights)
        : nodes_(std::move(nodes)), weights_(std::move(weights)) {
        validate();
        const std::size_t kmax = 2 * nodes_.size() + 4;
        moments_.resize(kmax + 1);
        for (std::size_t k = 0; k <= kmax; ++k) moments_[k] = compute_moment(k);
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double node(std::size_t j) const { return nodes_[j]; }
    double weight(std::size_t j) const { return weights_[j]; }

    /// Index of the node -v_j.
    std::size_t mirror(std::size_t j) const noexcept { return nodes_.size() - 1 - j; }

    /// <v^k> = sum_j w_j v_j^k.
    double moment(int k) const {
        require(k >= 0, "moment order must be nonnegative");
        if (static_cast<std::size_t>(k) < moments_.size()) return moments_[k];
        return compute_moment(static_cast<std::size_t>(k));
    }

    /// Weighted average of samples phi_j, accumulated over mirror pairs.
    double average(std::span<const double> phi) const {
        check_length(phi.size());
        const std::size_t half = nodes_.size() / 2;
        double sum = 0.0;
        for (std::size_t j = 0; j < half; ++j)
            sum += weights_[j] * (phi[j] + phi[mirror(j)]);
        return sum;
    }

    void check_length(std::size_t n) const {
        if (n != nodes_.size())
            throw InvalidArgument("sample length " + std::to_string(n) +
                                  " does not match node count " + std::to_string(nodes_.size()));
    }

private:
    double compute_moment(std::size_t k) const {
        if (k % 2 == 1) return 0.0;
        const std::size_t half = nodes_.size() / 2;
        double sum = 0.0;
        for (std::size_t j = 0; j < half; ++j)
            sum += 2.0 * weights_[j] * std::pow(nodes_[j], static_cast<double>(k));
        return sum;
    }

    void validate() const {
        const std::size_t n = nodes_.size();
        require(n >= 2, "quadrature needs at least two nodes");
        require(n % 2 == 0, "quadrature node count must be even");
        require(weights_.size() == n, "nodes and weights differ in length");
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            require(std::abs(nodes_[j]) < 1.0, "velocity nodes must lie in (-1, 1)");
            require(nodes_[j] != 0.0, "zero velocity node is not allowed");
            require(weights_[j] >= 0.0, "weights must be nonnegative");
            require(j == 0 || nodes_[j - 1] < nodes_[j], "nodes must be strictly ascending");
            require(nodes_[j] == -nodes_[n - 1 - j] && weights_[j] == weights_[n - 1 - j],
                    "node set must be symmetric under v -> -v");
            total += weights_[j];
        }
        require(std::abs(total - 1.0) <= 1e-14, "weights must sum to one");
    }

    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> moments_;
};

namespace detail {

// Legendre P_n and its derivative at x by the three-term recurrence.
inline std::pair<double, double> legendre(std::size_t n, double x) {
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
    }
    const double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

} // namespace detail

/// Builds a symmetric quadrature for the normalized uniform measure dv/2 on (-1, 1).
///
/// gauss-legendre-uniform is exact for polynomials up to degree 2n-1;
/// uniform-midpoint places n equal-weight nodes at cell midpoints.
inline VelocityQuadrature build_quadrature(QuadratureFamily family, std::size_t n) {
    require(n >= 2, "quadrature node count must be at least 2");
    require(n % 2 == 0, "quadrature node count must be even so nodes pair under v -> -v");

    const std::size_t half = n / 2;
    std::vector<double> positive(half), pos_weights(half);

    if (family == QuadratureFamily::GaussLegendreUniform) {
        for (std::size_t i = 0; i < half; ++i) {
            // i-th largest root, Newton from the Chebyshev-like initial guess
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                const auto [p, dp] = detail::legendre(n, x);
                const double dx = p / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            const auto [p, dp] = detail::legendre(n, x);
            (void)p;
            positive[i] = x;
            pos_weights[i] = 1.0 / ((1.0 - x * x) * dp * dp); // halved Gauss weight
        }
    } else {
        const double width = 2.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < half; ++i) {
            positive[i] = 1.0 - (i + 0.5) * width;
            pos_weights[i] = 1.0 / static_cast<double>(n);
        }
    }

    // Normalize so the pair sums add to exactly one up to rounding.
    double total = 0.0;
    for (double w : pos_weights) total += 2.0 * w;
    for (double& w : pos_weights) w /= total;

    std::vector<double> nodes(n), weights(n);
    for (std::size_t i = 0; i < half; ++i) {
        // positive[] is descending, so its negation fills the front ascending
        nodes[i] = -positive[i];
        weights[i] = pos_weights[i];
        nodes[n - 1 - i] = positive[i];
        weights[n - 1 - i] = pos_weights[i];
    }
    return VelocityQuadrature(std::move(nodes), std::move(weights));
}

/// (L phi)_j = phi_j - <phi>.
inline std::vector<double> apply_collision(const VelocityQuadrature& q, std::span<const double> phi) {
    const double mean = q.average(phi);
    std::vector<double> out(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) out[j] = phi[j] - mean;
    return out;
}

/// <phi L phi>, nonnegative for every phi.
inline double dirichlet_form(const VelocityQuadrature& q, std::span<const double> phi) {
    const auto lphi = apply_collision(q, phi);
    double sum = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) sum += q.weight(j) * phi[j] * lphi[j];
    return sum;
}

/// (1/2) sum_j sum_m w_j w_m (phi_j - phi_m)^2, the same quantity as a double sum.
inline double dirichlet_form_pairwise(const VelocityQuadrature& q, std::span<const double> phi) {
    q.check_length(phi.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j)
        for (std::size_t m = 0; m < phi.size(); ++m) {
            const double d = phi[j] - phi[m];
            sum += q.weight(j) * q.weight(m) * d * d;
        }
    return 0.5 * sum;
}

/// |<psi L phi> - <phi L psi>|.
inline double self_adjointness_defect(const VelocityQuadrature& q, std::span<const double> phi,
                                      std::span<const double> psi) {
    q.check_length(psi.size());
    const auto lphi = apply_collision(q, phi);
    const auto lpsi = apply_collision(q, psi);
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        a += q.weight(j) * psi[j] * lphi[j];
        b += q.weight(j) * phi[j] * lpsi[j];
    }
    return std::abs(a - b);
}

/// Samples a function of velocity on the quadrature nodes.
template <class F>
std::vector<double> sample_velocity(const VelocityQuadrature& q, F&& fn) {
    std::vector<double> out(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) out[j] = fn(q.node(j));
    return out;
}

} // namespace kinhom
