#pragma once

// Discrete Sobolev norms of periodic samples on (0, L) via the DFT:
//
//   ||u||_s^2 = L * sum_k (1 + (2 pi k / L)^2)^s |c_k|^2,   c_k = (1/N) sum_n u_n e^{-2 pi i k n / N}.
//
// Negative orders drop the mean (k = 0) term.

#include <kinhom/errors.hpp>

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace kinhom {

enum class SobolevMode { Fourier, DualityInterpolation };

inline std::string to_string(SobolevMode mode) {
    return mode == SobolevMode::Fourier ? "fourier" : "duality-interpolation";
}

struct SobolevNormResult {
    double order;
    double value;
    SobolevMode mode;
};

namespace detail {

// FFTW planning is not thread-safe; execution with new-array execute is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

// |c_k|^2 for k = 0..N/2 of real samples.
inline std::vector<double> power_spectrum(std::span<const double> u) {
    const std::size_t n = u.size();
    const std::size_t m = n / 2 + 1;
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
    if (!in || !out) throw Error("fftw_malloc failed");
    for (std::size_t i = 0; i < n; ++i) in.get()[i] = u[i];

    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    }
    if (!plan) throw Error("fftw plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    std::vector<double> power(m);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < m; ++k) {
        const double re = out.get()[k][0] * scale, im = out.get()[k][1] * scale;
        power[k] = re * re + im * im;
    }
    return power;
}

inline double fourier_norm(std::span<const double> power, std::size_t n, double length, double order,
                           bool include_mean) {
    double sum = include_mean ? power[0] : 0.0;
    for (std::size_t k = 1; k < power.size(); ++k) {
        const double wave = 2.0 * std::numbers::pi * static_cast<double>(k) / length;
        // +k and -k both appear except at the Nyquist index of an even-length sequence
        const double multiplicity = (n % 2 == 0 && k == n / 2) ? 1.0 : 2.0;
        sum += multiplicity * std::pow(1.0 + wave * wave, order) * power[k];
    }
    return std::sqrt(length * sum);
}

} // namespace detail

/// Sobolev norm of order s of samples u_n = u(n L / N) of an L-periodic function.
///
/// Fourier mode evaluates the weighted spectral sum directly. Duality-interpolation
/// mode (s = -1/2 only) returns sqrt(||u||_{-1} ||u||_0) of the mean-free samples.
inline SobolevNormResult sobolev_norm(std::span<const double> samples, double length, double order,
                                      SobolevMode mode = SobolevMode::Fourier) {
    require(samples.size() >= 64, "sobolev_norm needs at least 64 samples");
    require(length > 0.0, "sobolev_norm needs a positive period length");
    require(order == -1.0 || order == -0.5 || order == 0.0 || order == 0.5,
            "sobolev_norm supports orders -1, -1/2, 0 and 1/2");
    const auto power = detail::power_spectrum(samples);
    const std::size_t n = samples.size();

    if (mode == SobolevMode::DualityInterpolation) {
        require(order == -0.5, "duality-interpolation mode is defined for order -1/2 only");
        const double dual = detail::fourier_norm(power, n, length, -1.0, false);
        const double l2 = detail::fourier_norm(power, n, length, 0.0, false);
        return {order, std::sqrt(dual * l2), mode};
    }
    return {order, detail::fourier_norm(power, n, length, order, order >= 0.0), mode};
}

/// Same as above for samples tagged with positions; rejects nonuniform spacing.
inline SobolevNormResult sobolev_norm(std::span<const double> positions, std::span<const double> samples,
                                      double length, double order, SobolevMode mode = SobolevMode::Fourier) {
    require(positions.size() == samples.size(), "positions and samples differ in length");
    require(positions.size() >= 2, "sobolev_norm needs at least 64 samples");
    const double step = length / static_cast<double>(positions.size());
    for (std::size_t i = 1; i < positions.size(); ++i)
        if (std::abs(positions[i] - positions[i - 1] - step) > 1e-9 * step)
            throw InvalidArgument("sobolev_norm needs a uniform periodic grid with spacing L / N");
    return sobolev_norm(samples, length, order, mode);
}

} // namespace kinhom
