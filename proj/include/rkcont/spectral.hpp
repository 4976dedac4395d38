#pragma once

// Gram data of the sampling operator and its spectral decomposition.
//
// The operator K f = sum_j f(z_j) p_{z_j} has the same positive spectrum as
// the Gram matrix G_{jk} = (p_{z_j}, p_{z_k}) = p_{z_j}(z_k). An eigenvector
// v of G with G v = lambda v and |v| = 1 corresponds to the eigenfunction
// e = sum_k conj(v_k) p_{z_k} with ||e||^2 = lambda, so the projection energy
// of p_z onto that eigendirection is |v^H beta|^2 / lambda, where
// beta_k = p_{z_k}(z).
//
// Downstream formulas always sum over individual eigenvector terms; the
// clustered view (distinct eigenvalues with summed energies) is kept for
// reporting, so results do not depend on the clustering tolerance.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rkcont/errors.hpp"
#include "rkcont/kernels.hpp"
#include "rkcont/types.hpp"

namespace rkcont {

struct GramData {
    Eigen::MatrixXcd G;     ///< n x n Hermitian PSD, G_{jk} = p_{z_j}(z_k)
    Eigen::VectorXcd beta;  ///< beta_k = p_{z_k}(z) = p(z, z_k)
    double pzz = 0.0;       ///< p(z, z) = ||p_z||^2
};

/// Builds the Gram data of an instance. G is Hermitian-symmetrized by
/// averaging with its adjoint. Expects validate_instance to have passed.
inline GramData assemble_gram(const KernelSpec& kernel, std::span<const Complex> points,
                              Complex target) {
    const auto n = static_cast<Eigen::Index>(points.size());
    GramData gram;
    gram.G.resize(n, n);
    gram.beta.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            // (p_{z_j}, p_{z_k}) = p_{z_j}(z_k) = p(z_k, z_j)
            gram.G(j, k) = kernel_eval(kernel, points[k], points[j]);
        }
        gram.beta(j) = kernel_eval(kernel, target, points[j]);
    }
    gram.G = 0.5 * (gram.G + gram.G.adjoint()).eval();
    gram.pzz = kernel_eval(kernel, target, target).real();
    return gram;
}

inline GramData assemble_gram(const ProblemInstance& instance) {
    return assemble_gram(instance.kernel, instance.points, instance.target);
}

struct EigenDecomposition {
    Eigen::VectorXd values;    ///< descending
    Eigen::MatrixXcd vectors;  ///< orthonormal columns aligned with values
};

/// Dense Hermitian eigendecomposition with verified residuals:
/// ||M v - mu v|| <= 1e-10 ||M|| per pair and orthonormality to 1e-10.
inline EigenDecomposition hermitian_eig(const Eigen::MatrixXcd& M) {
    if (M.rows() != M.cols()) {
        throw DimensionError("hermitian_eig: matrix must be square");
    }
    const Eigen::Index n = M.rows();
    EigenDecomposition out;
    if (n == 0) {
        out.values.resize(0);
        out.vectors.resize(0, 0);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(M);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("hermitian_eig: eigensolver did not converge");
    }
    // Eigen returns ascending order.
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();

    const double scale = std::max(out.values.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double resid = (M * out.vectors.col(i) - out.values(i) * out.vectors.col(i)).norm();
        if (resid > 1e-10 * scale) {
            throw ConvergenceError("hermitian_eig: eigenpair residual above tolerance");
        }
    }
    const double ortho =
        (out.vectors.adjoint() * out.vectors - Eigen::MatrixXcd::Identity(n, n))
            .cwiseAbs()
            .maxCoeff();
    if (ortho > 1e-10) {
        throw ConvergenceError("hermitian_eig: eigenvectors not orthonormal to tolerance");
    }
    return out;
}

struct SpectralData {
    // Clustered (reporting) view: distinct eigenvalues, descending.
    std::vector<double> lambdas;             ///< cluster representatives
    std::vector<double> energies;            ///< a_j = ||P_j p_z||^2 per cluster
    std::vector<std::size_t> cluster_sizes;  ///< eigenvector count per cluster
    bool clusters_merged = false;

    // Per-eigenvector terms on the positive spectrum, descending. All
    // downstream sums run over these.
    Eigen::VectorXd eig_values;    ///< lambda_i
    Eigen::VectorXd eig_energies;  ///< |v_i^H beta|^2 / lambda_i
    Eigen::MatrixXcd eig_vectors;  ///< n x r unit eigenvectors of G

    double a0 = 0.0;   ///< ||P_0 p_z||^2 = pzz - sum of energies, clamped at 0
    double pzz = 0.0;  ///< ||p_z||^2
    Eigen::VectorXcd beta;
    double beta_sq = 0.0;  ///< |beta|^2 = [p_z]^2
    Regime regime = Regime::Generic;

    std::size_t rank() const noexcept { return static_cast<std::size_t>(eig_values.size()); }
};

/// Spectral decomposition of the Gram data. Eigenvalues at or below
/// tol_zero * lambda_max fall into the kernel subspace U_0 (rank deficiency
/// is allowed and expected for nearly coincident sample directions);
/// surviving eigenvalues are clustered when consecutive gaps do not exceed
/// tol_cluster * lambda_max.
inline SpectralData build_spectral_data(const GramData& gram, const Tolerances& tol = {}) {
    SpectralData sd;
    sd.beta = gram.beta;
    sd.pzz = gram.pzz;
    sd.beta_sq = gram.beta.squaredNorm();

    const EigenDecomposition eig = hermitian_eig(gram.G);
    const Eigen::Index n = eig.values.size();
    const double lambda_max = n > 0 ? eig.values(0) : 0.0;
    const double cut = tol.tol_zero * std::max(lambda_max, 0.0);

    Eigen::Index r = 0;
    while (r < n && eig.values(r) > cut) ++r;

    sd.eig_values.resize(r);
    sd.eig_energies.resize(r);
    sd.eig_vectors.resize(gram.G.rows(), r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const double lambda = eig.values(i);
        const Complex proj = eig.vectors.col(i).dot(gram.beta);
        sd.eig_values(i) = lambda;
        sd.eig_energies(i) = std::norm(proj) / lambda;
        sd.eig_vectors.col(i) = eig.vectors.col(i);
    }

    // Cluster along descending eigenvalues.
    const double gap = tol.tol_cluster * std::max(lambda_max, 0.0);
    Eigen::Index i = 0;
    while (i < r) {
        Eigen::Index j = i + 1;
        while (j < r && sd.eig_values(j - 1) - sd.eig_values(j) <= gap) ++j;
        double mean = 0.0, energy = 0.0;
        for (Eigen::Index k = i; k < j; ++k) {
            mean += sd.eig_values(k);
            energy += sd.eig_energies(k);
        }
        mean /= static_cast<double>(j - i);
        sd.lambdas.push_back(mean);
        sd.energies.push_back(energy);
        sd.cluster_sizes.push_back(static_cast<std::size_t>(j - i));
        if (j - i > 1) sd.clusters_merged = true;
        i = j;
    }

    double sum_energy = 0.0;
    for (double a : sd.energies) sum_energy += a;
    sd.a0 = std::max(gram.pzz - sum_energy, 0.0);

    if (sd.beta_sq <= tol.tol_zero * gram.pzz) {
        sd.regime = Regime::KernelRegime;
    } else if (sd.a0 <= tol.tol_zero * gram.pzz) {
        sd.regime = Regime::CompleteStability;
        sd.a0 = 0.0;
    } else {
        sd.regime = Regime::Generic;
    }
    return sd;
}

/// Applies the pseudo-inverse of G on its positive spectrum (the same rank
/// cut that produced the SpectralData).
inline Eigen::VectorXcd pinv_apply(const SpectralData& sd, const Eigen::VectorXcd& rhs) {
    if (rhs.size() != sd.eig_vectors.rows()) {
        throw DimensionError("pinv_apply: vector length does not match the instance size");
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(rhs.size());
    for (Eigen::Index i = 0; i < sd.eig_values.size(); ++i) {
        const Complex coeff = sd.eig_vectors.col(i).dot(rhs);
        out += sd.eig_vectors.col(i) * (coeff / sd.eig_values(i));
    }
    return out;
}

}  // namespace rkcont
