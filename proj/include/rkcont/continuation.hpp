#pragma once

// Worst-case continuation error A_z(eps) and the extremal function.
//
// In the generic regime the optimum is reached by the resolvent trial
// u = (K + eta)^{-1} p_z, where eta > 0 is fixed by the constraint ratio
//
//     Phi(eta) = [u]^2 / ||u||^2 = eps^2,
//
// a strictly increasing function of eta with Phi(0+) = 0 and
// Phi(+inf) = |beta|^2 / pzz. Then A = (eps^2 + eta) ||u|| = u(z) / ||u||,
// A(0) = sqrt(a0), and A(eps) = (1 + sigma*eps) A(0) + O(eps^2) with
// sigma^2 = (1/a0) sum_j a_j / lambda_j.
//
// Spectral sums are evaluated with the overflow-free weights
// w_i = eta / (lambda_i + eta) in (0, 1).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <span>

#include "rkcont/errors.hpp"
#include "rkcont/spectral.hpp"
#include "rkcont/types.hpp"

namespace rkcont {

struct BoundResult {
    double eps = 0.0;
    std::optional<double> eta;  ///< present only when the eta equation was solved
    double A = 0.0;             ///< A_z(eps)
    double A0 = 0.0;            ///< A_z(0) = sqrt(a0)
    double sigma = 0.0;         ///< first-order coefficient; 0 when undefined
    double asymptotic = 0.0;    ///< (1 + sigma*eps) * A0
    Regime regime = Regime::Generic;
    bool upper_bound_only = false;  ///< true in the complete-stability regime
};

/// ||(K + eta)^{-1} p_z||^2 = a0/eta^2 + sum_i a_i/(lambda_i + eta)^2.
inline double resolvent_norm_sq(const SpectralData& sd, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("resolvent_norm_sq: eta must be positive");
    double s = sd.a0 / (eta * eta);
    for (Eigen::Index i = 0; i < sd.eig_values.size(); ++i) {
        const double d = sd.eig_values(i) + eta;
        s += sd.eig_energies(i) / (d * d);
    }
    return s;
}

/// Constraint ratio Phi(eta) = [(K+eta)^{-1} p_z]^2 / ||(K+eta)^{-1} p_z||^2.
inline double phi(const SpectralData& sd, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("phi: eta must be positive");
    double num = 0.0;
    double den = sd.a0;
    for (Eigen::Index i = 0; i < sd.eig_values.size(); ++i) {
        const double w = eta / (sd.eig_values(i) + eta);
        const double t = sd.eig_energies(i) * w * w;
        num += sd.eig_values(i) * t;
        den += t;
    }
    return den > 0.0 ? num / den : 0.0;
}

/// Phi(+inf) = [p_z]^2 / ||p_z||^2; the solvability threshold for eps^2.
inline double phi_infinity(const SpectralData& sd) { return sd.beta_sq / sd.pzz; }

/// Solves Phi(eta) = eps^2 for the unique positive root by bisection.
/// Requires the generic regime and 0 < eps^2 < Phi(+inf) * (1 - 1e-10).
inline double solve_eta(const SpectralData& sd, double eps, double root_residual = 1e-12) {
    if (sd.regime != Regime::Generic) {
        throw RegimeError("solve_eta: the eta equation is defined only in the generic regime");
    }
    const double target = eps * eps;
    const double cap = phi_infinity(sd);
    if (!(eps > 0.0) || !(target < cap * (1.0 - 1e-10))) {
        throw RegimeError("solve_eta: eps^2 outside the solvable range (0, Phi(+inf))");
    }

    double lo = eps * std::sqrt(sd.a0) / (2.0 * std::sqrt(sd.beta_sq));
    double hi = 1.0;
    while (phi(sd, lo) >= target) {
        lo *= 0.5;
        if (lo < 1e-300) throw BracketError("solve_eta: lower bracket underflow");
    }
    while (phi(sd, hi) <= target) {
        hi *= 2.0;
        if (hi > 1e30) throw BracketError("solve_eta: bracket growth exceeded 1e30");
    }

    // Bisect to bracket collapse: the documented residual applies to the
    // polynomial form of the equation as well, whose scale factor can exceed
    // one, so the root itself is resolved to machine precision.
    double mid = std::sqrt(lo * hi);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        mid = std::sqrt(lo * hi);
        const double value = phi(sd, mid);
        if (std::abs(value - target) <= 1e-3 * root_residual * target) break;
        (value < target ? lo : hi) = mid;
    }
    if (std::abs(phi(sd, mid) - target) <= root_residual * target) return mid;
    throw ConvergenceError("solve_eta: residual tolerance not reached in 200 bisections");
}

/// sigma^2 = (1/a0) sum_i a_i / lambda_i. Undefined when a0 == 0.
inline double sigma_coefficient(const SpectralData& sd) {
    if (!(sd.a0 > 0.0)) {
        throw RegimeError("sigma_coefficient: undefined when a0 == 0 (complete stability)");
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < sd.eig_values.size(); ++i) {
        s += sd.eig_energies(i) / sd.eig_values(i);
    }
    return std::sqrt(s / sd.a0);
}

/// Relative residual of the polynomial form of the eta equation,
/// eta^2 sum_i (lambda_i - eps^2) a_i / (lambda_i + eta)^2 = eps^2 a0.
inline double eta_equation_residual(const SpectralData& sd, double eps, double eta) {
    double lhs = 0.0;
    for (Eigen::Index i = 0; i < sd.eig_values.size(); ++i) {
        const double w = eta / (sd.eig_values(i) + eta);
        lhs += (sd.eig_values(i) - eps * eps) * sd.eig_energies(i) * w * w;
    }
    const double rhs = eps * eps * sd.a0;
    return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

/// A_z(eps) with all regime branches. Never throws on valid SpectralData:
/// the regimes and the eps ranges exhaust all inputs.
inline BoundResult compute_bound(const SpectralData& sd, double eps,
                                 double root_residual = 1e-12) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("compute_bound: eps must be finite and nonnegative");
    }
    BoundResult out;
    out.eps = eps;
    out.regime = sd.regime;

    switch (sd.regime) {
        case Regime::KernelRegime: {
            // Samples see nothing of p_z; f* = p_z/||p_z|| attains ||p_z||.
            out.A0 = std::sqrt(sd.a0);
            out.sigma = sigma_coefficient(sd);
            out.A = std::sqrt(sd.pzz);
            out.asymptotic = (1.0 + out.sigma * eps) * out.A0;
            return out;
        }
        case Regime::CompleteStability: {
            // A <= eps |c| with c = G^+ beta; |c|^2 = sum_i a_i / lambda_i.
            double csq = 0.0;
            for (Eigen::Index i = 0; i < sd.eig_values.size(); ++i) {
                csq += sd.eig_energies(i) / sd.eig_values(i);
            }
            out.A = eps * std::sqrt(csq);
            out.A0 = 0.0;
            out.sigma = 0.0;
            out.asymptotic = 0.0;
            out.upper_bound_only = true;
            return out;
        }
        case Regime::Generic: {
            out.A0 = std::sqrt(sd.a0);
            out.sigma = sigma_coefficient(sd);
            out.asymptotic = (1.0 + out.sigma * eps) * out.A0;
            const double cap = phi_infinity(sd);
            if (eps == 0.0) {
                out.A = out.A0;
            } else if (eps * eps >= cap * (1.0 - 1e-10)) {
                // Trivial range: p_z/||p_z|| is feasible, so A = ||p_z||.
                out.A = std::sqrt(sd.pzz);
            } else {
                const double eta = solve_eta(sd, eps, root_residual);
                out.eta = eta;
                out.A = (eps * eps + eta) * std::sqrt(resolvent_norm_sq(sd, eta));
            }
            return out;
        }
        case Regime::Degenerate:
            break;
    }
    throw RegimeError("compute_bound: degenerate spectral data");
}

/// Coefficients of the extremal function u = alpha p_z + sum_k gamma_k p_{z_k}
/// over the instance sections, together with ||u|| and eta. The normalized
/// maximizer is u/||u||.
struct MaximizerRep {
    Complex alpha{0.0, 0.0};
    Eigen::VectorXcd gamma;
    double norm_u = 0.0;
    double eta = 0.0;
};

/// Extremal function for the generic regime. For eps > 0 this is the
/// resolvent u_eps = (K + eta(eps))^{-1} p_z, with alpha = 1/eta and
/// (G + eta I) conj(gamma) = -beta/eta. For eps == 0 it is the eta -> 0
/// limit P_0 p_z, via conj(gamma) = -G^+ beta and alpha = 1.
inline MaximizerRep build_maximizer(const SpectralData& sd, const GramData& gram, double eps,
                                    double root_residual = 1e-12) {
    if (sd.regime != Regime::Generic) {
        throw RegimeError("build_maximizer: maximizer representation requires the generic regime");
    }
    MaximizerRep rep;
    if (eps == 0.0) {
        rep.alpha = 1.0;
        rep.eta = 0.0;
        rep.gamma = (-pinv_apply(sd, gram.beta)).conjugate();
        rep.norm_u = std::sqrt(sd.a0);
        return rep;
    }
    const double eta = solve_eta(sd, eps, root_residual);
    Eigen::MatrixXcd A = gram.G;
    A.diagonal().array() += eta;
    const Eigen::VectorXcd rhs = -gram.beta / eta;

    const auto solver = A.ldlt();
    Eigen::VectorXcd x = solver.solve(rhs);
    x += solver.solve(rhs - A * x);  // one refinement pass
    const double resid = (A * x - rhs).norm();
    if (resid > 1e-10 * std::max(rhs.norm(), 1e-300)) {
        throw ConvergenceError("build_maximizer: linear solve residual above tolerance");
    }

    rep.alpha = 1.0 / eta;
    rep.eta = eta;
    rep.gamma = x.conjugate();
    rep.norm_u = std::sqrt(resolvent_norm_sq(sd, eta));
    return rep;
}

/// f* = p_z / ||p_z||: the maximizer in the kernel regime and in the trivial
/// range eps^2 >= Phi(+inf) of the generic regime.
inline MaximizerRep kernel_section_maximizer(const SpectralData& sd) {
    MaximizerRep rep;
    rep.alpha = 1.0;
    rep.gamma = Eigen::VectorXcd::Zero(sd.beta.size());
    rep.norm_u = std::sqrt(sd.pzz);
    rep.eta = std::numeric_limits<double>::infinity();
    return rep;
}

/// Value of the normalized extremal function at zeta:
/// (alpha p(zeta, z) + sum_k gamma_k p(zeta, z_k)) / ||u||.
inline Complex evaluate_maximizer(const MaximizerRep& rep, const KernelSpec& kernel,
                                  std::span<const Complex> points, Complex target,
                                  Complex zeta) {
    if (static_cast<Eigen::Index>(points.size()) != rep.gamma.size()) {
        throw DimensionError("evaluate_maximizer: point count does not match the representation");
    }
    Complex acc = rep.alpha * kernel_eval(kernel, zeta, target);
    for (std::size_t k = 0; k < points.size(); ++k) {
        acc += rep.gamma(static_cast<Eigen::Index>(k)) * kernel_eval(kernel, zeta, points[k]);
    }
    return acc / rep.norm_u;
}

}  // namespace rkcont
