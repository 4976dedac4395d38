#pragma once

// Optimal linear recovery of f(z) from eps-noisy samples.
//
// A coefficient vector c estimates f(z) by sum_j c_j (f(z_j) + delta_j); its
// worst case over ||f|| <= 1, |delta| <= eps is
//
//     E(eps, c) = ||p_z - sum_j conj(c_j) p_{z_j}|| + eps |c|,
//
// and the minimizer is the Tikhonov-regularized interpolant c = (G + eta I)^{-1} beta
// at exactly the eta(eps) of the continuation problem, for which E = A_z(eps).

#include <Eigen/Dense>
#include <cmath>

#include "rkcont/continuation.hpp"
#include "rkcont/errors.hpp"
#include "rkcont/spectral.hpp"
#include "rkcont/types.hpp"

namespace rkcont {

struct RecoveryResult {
    Eigen::VectorXcd c;
    double E = 0.0;
    double eps = 0.0;
    bool upper_bound_only = false;  ///< true in the complete-stability regime
};

/// Worst-case error of the linear algorithm c at noise level eps.
inline double worst_case_error(const GramData& gram, const Eigen::VectorXcd& c, double eps) {
    if (c.size() != gram.G.rows()) {
        throw DimensionError("worst_case_error: coefficient length does not match the instance");
    }
    if (!(eps >= 0.0)) throw std::invalid_argument("worst_case_error: eps must be nonnegative");
    const double lin = std::real(gram.beta.dot(c));
    const double quad = std::real(c.dot(gram.G * c));
    const double norm_sq = std::max(gram.pzz - 2.0 * lin + quad, 0.0);
    return std::sqrt(norm_sq) + eps * c.norm();
}

/// Optimal coefficients per regime. Generic: c = (G + eta I)^{-1} beta (the
/// eta -> 0 pseudo-inverse limit at eps == 0, and c = 0 in the trivial range
/// where no data helps). Kernel regime: c = 0. Complete stability: c = G^+ beta
/// with E = eps |c|, an upper bound only.
inline RecoveryResult optimal_coefficients(const SpectralData& sd, const GramData& gram,
                                           double eps, double root_residual = 1e-12) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("optimal_coefficients: eps must be finite and nonnegative");
    }
    RecoveryResult out;
    out.eps = eps;
    const Eigen::Index n = gram.G.rows();

    switch (sd.regime) {
        case Regime::KernelRegime: {
            out.c = Eigen::VectorXcd::Zero(n);
            out.E = worst_case_error(gram, out.c, eps);
            return out;
        }
        case Regime::CompleteStability: {
            out.c = pinv_apply(sd, gram.beta);
            out.E = eps * out.c.norm();
            out.upper_bound_only = true;
            return out;
        }
        case Regime::Generic: {
            const double cap = phi_infinity(sd);
            if (eps == 0.0) {
                out.c = pinv_apply(sd, gram.beta);
            } else if (eps * eps >= cap * (1.0 - 1e-10)) {
                out.c = Eigen::VectorXcd::Zero(n);
            } else {
                const double eta = solve_eta(sd, eps, root_residual);
                Eigen::MatrixXcd A = gram.G;
                A.diagonal().array() += eta;
                const auto solver = A.ldlt();
                out.c = solver.solve(gram.beta);
                out.c += solver.solve(gram.beta - A * out.c);
                const double resid = (A * out.c - gram.beta).norm();
                if (resid > 1e-10 * std::max(gram.beta.norm(), 1e-300)) {
                    throw ConvergenceError(
                        "optimal_coefficients: linear solve residual above tolerance");
                }
            }
            out.E = worst_case_error(gram, out.c, eps);
            return out;
        }
        case Regime::Degenerate:
            break;
    }
    throw RegimeError("optimal_coefficients: degenerate spectral data");
}

}  // namespace rkcont
