#pragma once

// Closed-form reproducing kernels p(zeta, w) for standard spaces of analytic
// functions, analytic in the first argument and conjugate-analytic in the
// second, oriented so that p_w = p(., w) reproduces via f(w) = (f, p_w).

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rkcont/errors.hpp"
#include "rkcont/types.hpp"

namespace rkcont {

enum class KernelFamily { SzegoDisk, BergmanDisk, PaleyWiener, Gaussian };

constexpr std::string_view kernel_family_name(KernelFamily f) noexcept {
    switch (f) {
        case KernelFamily::SzegoDisk: return "szego_disk";
        case KernelFamily::BergmanDisk: return "bergman_disk";
        case KernelFamily::PaleyWiener: return "paley_wiener";
        case KernelFamily::Gaussian: return "gaussian";
    }
    return "szego_disk";
}

struct KernelSpec {
    KernelFamily family = KernelFamily::SzegoDisk;
    double bandwidth = 1.0;  ///< Paley-Wiener: zero spacing of p(., w) is 1/bandwidth
    double gamma = 1.0;      ///< Gaussian width

    static KernelSpec szego_disk() { return {KernelFamily::SzegoDisk, 1.0, 1.0}; }
    static KernelSpec bergman_disk() { return {KernelFamily::BergmanDisk, 1.0, 1.0}; }
    static KernelSpec paley_wiener(double bandwidth = 1.0) {
        return {KernelFamily::PaleyWiener, bandwidth, 1.0};
    }
    static KernelSpec gaussian(double gamma = 1.0) {
        return {KernelFamily::Gaussian, 1.0, gamma};
    }
};

inline void validate_kernel(const KernelSpec& kernel) {
    if (kernel.family == KernelFamily::PaleyWiener &&
        !(kernel.bandwidth > 0.0 && std::isfinite(kernel.bandwidth))) {
        throw DomainError("paley_wiener bandwidth must be a positive finite number");
    }
    if (kernel.family == KernelFamily::Gaussian &&
        !(kernel.gamma > 0.0 && std::isfinite(kernel.gamma))) {
        throw DomainError("gaussian width must be a positive finite number");
    }
}

namespace detail {

// Disk kernels blow up at the boundary; stay strictly inside.
inline constexpr double kDiskMargin = 1e-9;

inline bool finite(Complex w) noexcept {
    return std::isfinite(w.real()) && std::isfinite(w.imag());
}

// sin(x)/x with a series branch near the removable singularity.
inline Complex sinc(Complex x) {
    if (std::abs(x) < 1e-6) {
        const Complex x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

}  // namespace detail

inline bool in_domain(const KernelSpec& kernel, Complex w) noexcept {
    if (!detail::finite(w)) return false;
    switch (kernel.family) {
        case KernelFamily::SzegoDisk:
        case KernelFamily::BergmanDisk:
            return std::abs(w) < 1.0 - detail::kDiskMargin;
        case KernelFamily::PaleyWiener:
        case KernelFamily::Gaussian:
            return true;
    }
    return false;
}

/// Evaluates p(zeta, w). Hermitian: p(zeta, w) == conj(p(w, zeta)); the
/// diagonal p(w, w) = ||p_w||^2 is real and positive.
inline Complex kernel_eval(const KernelSpec& kernel, Complex zeta, Complex w) {
    validate_kernel(kernel);
    if (!in_domain(kernel, zeta) || !in_domain(kernel, w)) {
        throw DomainError("kernel_eval: point outside the kernel domain");
    }
    const Complex cw = std::conj(w);
    switch (kernel.family) {
        case KernelFamily::SzegoDisk:
            return 1.0 / (1.0 - zeta * cw);
        case KernelFamily::BergmanDisk: {
            const Complex d = 1.0 - zeta * cw;
            return 1.0 / (std::numbers::pi * d * d);
        }
        case KernelFamily::PaleyWiener:
            return detail::sinc(kernel.bandwidth * std::numbers::pi * (zeta - cw));
        case KernelFamily::Gaussian: {
            const Complex d = zeta - cw;
            return std::exp(-kernel.gamma * d * d);
        }
    }
    throw DomainError("kernel_eval: unknown kernel family");
}

/// Checks that an instance is well posed: n >= 1, every point and the target
/// in the kernel domain, and all n+1 points pairwise distinct (separation
/// > 1e-12 in max-norm).
inline void validate_instance(const KernelSpec& kernel, std::span<const Complex> points,
                              Complex target) {
    validate_kernel(kernel);
    if (points.empty()) {
        throw EmptyDataError("points: at least one sample point is required");
    }
    auto require_in_domain = [&](Complex w, const std::string& label) {
        if (!in_domain(kernel, w)) {
            throw DomainError(label + " lies outside the kernel domain");
        }
    };
    require_in_domain(target, "target");
    for (std::size_t j = 0; j < points.size(); ++j) {
        require_in_domain(points[j], "points[" + std::to_string(j) + "]");
    }

    constexpr double kSeparation = 1e-12;
    auto coincide = [](Complex a, Complex b) {
        return std::max(std::abs(a.real() - b.real()), std::abs(a.imag() - b.imag())) <=
               kSeparation;
    };
    for (std::size_t j = 0; j < points.size(); ++j) {
        for (std::size_t k = j + 1; k < points.size(); ++k) {
            if (coincide(points[j], points[k])) {
                throw DuplicatePointError(
                    static_cast<int>(j), static_cast<int>(k),
                    "points[" + std::to_string(j) + "] and points[" + std::to_string(k) +
                        "] coincide");
            }
        }
        if (coincide(target, points[j])) {
            throw DuplicatePointError(-1, static_cast<int>(j),
                                      "target and points[" + std::to_string(j) + "] coincide");
        }
    }
}

/// Immutable description of a continuation problem: which space, where the
/// samples live, and where the value is wanted.
struct ProblemInstance {
    KernelSpec kernel;
    std::vector<Complex> points;
    Complex target;
};

inline void validate_instance(const ProblemInstance& instance) {
    validate_instance(instance.kernel, instance.points, instance.target);
}

}  // namespace rkcont
