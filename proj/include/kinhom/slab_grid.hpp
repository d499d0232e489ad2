#pragma once

#include <kinhom/errors.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace kinhom {

/// Uniform cell-centered grid on the slab (-l, l).
class SlabGrid {
public:
    static constexpr std::size_t min_cells = 16;

    SlabGrid(double half_length, std::size_t cells) : half_length_(half_length), cells_(cells) {
        require(half_length > 0.0 && std::isfinite(half_length), "slab half length must be positive");
        require(cells >= min_cells, "slab grid needs at least 16 cells");
    }

    double half_length() const noexcept { return half_length_; }
    std::size_t cells() const noexcept { return cells_; }
    double width() const noexcept { return 2.0 * half_length_ / static_cast<double>(cells_); }
    double center(std::size_t i) const noexcept { return -half_length_ + (static_cast<double>(i) + 0.5) * width(); }
    /// Face i sits at the left edge of cell i; face `cells()` is the right wall.
    double face(std::size_t i) const noexcept { return -half_length_ + static_cast<double>(i) * width(); }

    std::vector<double> centers() const {
        std::vector<double> x(cells_);
        for (std::size_t i = 0; i < cells_; ++i) x[i] = center(i);
        return x;
    }

    template <class F>
    std::vector<double> sample(F&& fn) const {
        std::vector<double> out(cells_);
        for (std::size_t i = 0; i < cells_; ++i) out[i] = fn(center(i));
        return out;
    }

private:
    double half_length_;
    std::size_t cells_;
};

/// Midpoint-rule integral sum_i h u_i v_i.
inline double inner(std::span<const double> u, std::span<const double> v, double h) {
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
    return sum * h;
}

inline double l2_norm(std::span<const double> u, double h) { return std::sqrt(inner(u, u, h)); }

inline double l2_distance(std::span<const double> u, std::span<const double> v, double h) {
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        sum += d * d;
    }
    return std::sqrt(sum * h);
}

/// Centered differences inside, one-sided second-order stencils at both ends.
inline std::vector<double> centered_derivative(std::span<const double> u, double h) {
    const std::size_t n = u.size();
    require(n >= 3, "centered_derivative needs at least three samples");
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    return d;
}

} // namespace kinhom
