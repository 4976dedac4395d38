#pragma once

// Independent verification of the continuation bound.
//
// The dual side evaluates the Lagrangian upper bound
//
//     B(mu, nu) = (1/2) ((mu + nu K)^{-1} p_z, p_z) + (1/2)(mu + nu eps^2)
//
// over a grid of multipliers; every grid point is a valid upper bound for
// A_z(eps). The primal side scales resolvent trials (K + eta')^{-1} p_z into
// the feasible set; every trial is a valid lower bound. Neither side solves
// the eta equation, so together they sandwich the solver's output.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "rkcont/continuation.hpp"
#include "rkcont/errors.hpp"
#include "rkcont/spectral.hpp"

namespace rkcont {

struct SandwichReport {
    double lower = 0.0;
    double upper = 0.0;
    double A = 0.0;  ///< value under test
    double gap = 0.0;
    bool pass = false;
};

struct DualPoint {
    double mu = 0.0;
    double nu = 0.0;
};

/// Geometric grid of count points spanning [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_grid: need 0 < lo <= hi");
    if (count == 0) throw std::invalid_argument("log_grid: empty grid");
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = lo;
        return g;
    }
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo * std::exp(step * static_cast<double>(i));
    }
    return g;
}

/// The dual bound at a single multiplier pair (mu > 0, nu >= 0).
inline double dual_bound_at(const SpectralData& sd, double eps, double mu, double nu) {
    if (!(mu > 0.0) || !(nu >= 0.0)) {
        throw std::invalid_argument("dual_bound_at: need mu > 0 and nu >= 0");
    }
    double quad = sd.a0 / mu;
    for (Eigen::Index i = 0; i < sd.eig_values.size(); ++i) {
        quad += sd.eig_energies(i) / (mu + nu * sd.eig_values(i));
    }
    return 0.5 * quad + 0.5 * (mu + nu * eps * eps);
}

inline double dual_upper_bound(const SpectralData& sd, double eps,
                               std::span<const DualPoint> grid) {
    if (grid.empty()) throw std::invalid_argument("dual_upper_bound: empty grid");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : grid) {
        best = std::min(best, dual_bound_at(sd, eps, p.mu, p.nu));
    }
    return best;
}

/// Product-grid overload; nu = 0 is admitted in nu_grid.
inline double dual_upper_bound(const SpectralData& sd, double eps,
                               std::span<const double> mu_grid,
                               std::span<const double> nu_grid) {
    if (mu_grid.empty() || nu_grid.empty()) {
        throw std::invalid_argument("dual_upper_bound: empty grid");
    }
    double best = std::numeric_limits<double>::infinity();
    for (double mu : mu_grid) {
        for (double nu : nu_grid) {
            best = std::min(best, dual_bound_at(sd, eps, mu, nu));
        }
    }
    return best;
}

/// Best feasible-trial value over a grid of regularization parameters.
/// Each eta' > 0 yields u' = (K + eta')^{-1} p_z via its coefficients;
/// t u' with t = min(1/||u'||, eps/[u']) is feasible, so Re(t u'(z)) is a
/// valid lower bound for the supremum.
inline double primal_lower_bound(const SpectralData& sd, const GramData& gram, double eps,
                                 std::span<const double> eta_grid) {
    if (eta_grid.empty()) throw std::invalid_argument("primal_lower_bound: empty grid");
    if (!(eps >= 0.0)) throw std::invalid_argument("primal_lower_bound: eps must be nonnegative");
    if (sd.beta.size() != gram.G.rows()) {
        throw DimensionError("primal_lower_bound: spectral and Gram data disagree on n");
    }
    double best = 0.0;
    for (double eta : eta_grid) {
        if (!(eta > 0.0)) throw std::invalid_argument("primal_lower_bound: eta grid must be positive");
        Eigen::MatrixXcd A = gram.G;
        A.diagonal().array() += eta;
        const Eigen::VectorXcd d = A.ldlt().solve(gram.beta);
        // u' = (p_z - sum_k conj(d_k) p_{z_k}) / eta; u'(z_j) = conj(d_j).
        const double dbeta = std::real(d.dot(gram.beta));
        const double dGd = std::real(d.dot(gram.G * d));
        const double norm_sq = std::max(gram.pzz - 2.0 * dbeta + dGd, 0.0) / (eta * eta);
        const double value_at_z = (gram.pzz - dbeta) / eta;
        const double sample_norm = d.norm();

        double t = norm_sq > 0.0 ? 1.0 / std::sqrt(norm_sq)
                                 : std::numeric_limits<double>::infinity();
        if (sample_norm > 0.0) t = std::min(t, eps / sample_norm);
        if (!std::isfinite(t)) continue;
        best = std::max(best, t * value_at_z);
    }
    return best;
}

/// Assembles a sandwich report around a value under test; pass means the
/// value is bracketed within 1e-9 * upper on each side.
inline SandwichReport make_sandwich(double lower, double upper, double value) {
    SandwichReport rep;
    rep.lower = lower;
    rep.upper = upper;
    rep.A = value;
    rep.gap = upper - lower;
    const double tol = 1e-9 * upper;
    rep.pass = (lower <= value + tol) && (value <= upper + tol);
    return rep;
}

struct AsymptoticReport {
    std::vector<double> eps;        ///< halving sequence, as given
    std::vector<double> remainder;  ///< R(eps) = A(eps) - (1 + sigma*eps) A0
    std::vector<double> ratio;      ///< |R(eps_{k+1}) / R(eps_k)|
    double A0 = 0.0;
    double sigma = 0.0;
    bool pass = false;
};

/// Order test for the expansion A(eps) = (1 + sigma*eps) A0 + O(eps^2):
/// consecutive remainder ratios must stay at or below 0.35 once eps <= 1e-2.
/// Remainders below the cancellation floor 1e-13 * A0 count as zero.
inline AsymptoticReport asymptotic_order_check(const SpectralData& sd,
                                               std::span<const double> eps_sequence,
                                               double root_residual = 1e-12) {
    if (sd.regime == Regime::CompleteStability || sd.regime == Regime::Degenerate) {
        throw RegimeError("asymptotic_order_check: requires the generic or kernel regime");
    }
    if (eps_sequence.size() < 2) {
        throw std::invalid_argument("asymptotic_order_check: need at least two eps values");
    }
    AsymptoticReport rep;
    rep.A0 = std::sqrt(sd.a0);
    rep.sigma = sigma_coefficient(sd);
    const double floor = 1e-13 * std::max(rep.A0, 1e-300);

    for (double eps : eps_sequence) {
        const BoundResult b = compute_bound(sd, eps, root_residual);
        rep.eps.push_back(eps);
        rep.remainder.push_back(b.A - (1.0 + rep.sigma * eps) * rep.A0);
    }
    rep.pass = true;
    for (std::size_t k = 0; k + 1 < rep.remainder.size(); ++k) {
        const double prev = std::abs(rep.remainder[k]);
        const double next = std::abs(rep.remainder[k + 1]);
        const double ratio = (prev <= floor) ? 0.0 : next / prev;
        rep.ratio.push_back(ratio);
        if (rep.eps[k] <= 1e-2 && ratio > 0.35) rep.pass = false;
    }
    return rep;
}

}  // namespace rkcont
