#pragma once

#include <complex>
#include <string_view>

namespace rkcont {

using Complex = std::complex<double>;

/// Stability regime of a continuation instance, decided from the spectral
/// data of the sampling operator relative to the kernel section at the
/// target point.
enum class Regime {
    Generic,            ///< 0 < a0 < p(z,z): both constraints active
    KernelRegime,       ///< samples carry no information on f(z); A == ||p_z||
    CompleteStability,  ///< f(z) is determined by the samples; A <= eps*|c|
    Degenerate,         ///< reserved; not produced by the current analysis
};

constexpr std::string_view regime_name(Regime r) noexcept {
    switch (r) {
        case Regime::Generic: return "Generic";
        case Regime::KernelRegime: return "KernelRegime";
        case Regime::CompleteStability: return "CompleteStability";
        case Regime::Degenerate: return "Degenerate";
    }
    return "Degenerate";
}

/// Numerical knobs shared by the spectral decomposition and the root solve.
/// All three are relative tolerances.
struct Tolerances {
    double tol_zero = 1e-10;       ///< rank cut on eig(G), relative to the top eigenvalue
    double tol_cluster = 1e-8;     ///< eigenvalue clustering gap, relative to the top eigenvalue
    double root_residual = 1e-12;  ///< residual target when solving the eta equation
};

}  // namespace rkcont
