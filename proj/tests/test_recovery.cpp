#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "rkcont/recovery.hpp"
#include "test_support.hpp"

using namespace rkcont;
using testsup::Complex;

namespace {

struct Fixture {
    ProblemInstance inst;
    GramData gram;
    SpectralData sd;
};

Fixture make(const ProblemInstance& inst) {
    Fixture f;
    f.inst = inst;
    f.gram = assemble_gram(inst);
    f.sd = build_spectral_data(f.gram);
    return f;
}

}  // namespace

TEST_CASE("worst_case_error: closed-form spot checks on the one-point instance") {
    const auto f = make(testsup::one_point_instance());

    // Ignoring the data costs ||p_z||.
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(1);
    CHECK(worst_case_error(f.gram, zero, 0.0) == Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-14));
    CHECK(worst_case_error(f.gram, zero, 5.0) == Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-14));

    // c = [1] at eps = 0: ||p_z - p_{z_1}||^2 = 4/3 - 2 + 1 = 1/3.
    Eigen::VectorXcd one = Eigen::VectorXcd::Ones(1);
    CHECK(worst_case_error(f.gram, one, 0.0) == Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));

    Eigen::VectorXcd wrong = Eigen::VectorXcd::Zero(2);
    CHECK_THROWS_AS(worst_case_error(f.gram, wrong, 0.1), DimensionError);
    CHECK_THROWS_AS(worst_case_error(f.gram, one, -0.1), std::invalid_argument);
}

TEST_CASE("optimal_coefficients: one-point closed form and E = A") {
    const auto f = make(testsup::one_point_instance());
    const double eps = 0.1;
    const double eta = testsup::one_point_eta(eps);

    const RecoveryResult rec = optimal_coefficients(f.sd, f.gram, eps);
    REQUIRE(rec.c.size() == 1);
    CHECK(std::abs(rec.c(0) - Complex{1.0 / (1.0 + eta), 0.0}) < 1e-10);
    CHECK(rec.E == Approx(testsup::one_point_bound(eps)).epsilon(1e-10));
    CHECK(rec.E == Approx(compute_bound(f.sd, eps).A).epsilon(1e-9));
    CHECK_FALSE(rec.upper_bound_only);
}

TEST_CASE("optimal_coefficients: eps -> 0 limit recovers interpolation") {
    const auto f = make(testsup::one_point_instance());
    const RecoveryResult rec = optimal_coefficients(f.sd, f.gram, 0.0);
    CHECK(std::abs(rec.c(0) - Complex{1.0, 0.0}) < 1e-12);
    CHECK(rec.E == Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("optimal coefficients agree between the two construction routes") {
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 5; ++trial) {
        const auto family = trial % 2 == 0 ? KernelFamily::SzegoDisk : KernelFamily::BergmanDisk;
        const auto f = make(testsup::random_generic_instance(rng, family));
        REQUIRE(f.sd.regime == Regime::Generic);
        const double eps = testsup::solvable_eps(f.sd, 0.1);

        const RecoveryResult rec = optimal_coefficients(f.sd, f.gram, eps);

        // Route 2: c_j = conj(u_eps(z_j)) with u evaluated through the kernels.
        const MaximizerRep rep = build_maximizer(f.sd, f.gram, eps);
        Eigen::VectorXcd via_maximizer(rec.c.size());
        for (Eigen::Index j = 0; j < rec.c.size(); ++j) {
            const Complex uz =
                evaluate_maximizer(rep, f.inst.kernel, f.inst.points, f.inst.target,
                                   f.inst.points[static_cast<std::size_t>(j)]) *
                rep.norm_u;
            via_maximizer(j) = std::conj(uz);
        }
        CHECK((via_maximizer - rec.c).norm() <= 1e-10 * std::max(1.0, rec.c.norm()));

        // Ridge equivalence: Tikhonov-regularized interpolation at eta(eps).
        REQUIRE(rep.eta > 0.0);
        Eigen::MatrixXcd reg = f.gram.G;
        reg.diagonal().array() += rep.eta;
        const Eigen::VectorXcd ridge = reg.ldlt().solve(f.gram.beta);
        CHECK((ridge - rec.c).norm() <= 1e-10 * std::max(1.0, rec.c.norm()));

        // E = A identity.
        CHECK(rec.E == Approx(compute_bound(f.sd, eps).A).epsilon(1e-9));
    }
}

TEST_CASE("local optimality under random perturbations") {
    std::mt19937_64 rng(417);
    const auto f = make(testsup::random_generic_instance(rng, KernelFamily::SzegoDisk));
    const double eps = testsup::solvable_eps(f.sd, 0.1);
    const RecoveryResult rec = optimal_coefficients(f.sd, f.gram, eps);
    const double base = worst_case_error(f.gram, rec.c, eps);
    for (int k = 0; k < 20; ++k) {
        const Eigen::VectorXcd delta = 1e-3 * testsup::random_direction(rng, rec.c.size());
        CHECK(worst_case_error(f.gram, rec.c + delta, eps) >= base - 1e-12);
    }
}

TEST_CASE("worst-case error is convex in the coefficients") {
    std::mt19937_64 rng(1213);
    const auto f = make(testsup::random_generic_instance(rng, KernelFamily::BergmanDisk));
    const auto n = f.gram.G.rows();
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        Eigen::VectorXcd c1(n), c2(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            c1(i) = Complex{gauss(rng), gauss(rng)};
            c2(i) = Complex{gauss(rng), gauss(rng)};
        }
        const double lhs = worst_case_error(f.gram, 0.5 * (c1 + c2), 0.07);
        const double rhs =
            0.5 * (worst_case_error(f.gram, c1, 0.07) + worst_case_error(f.gram, c2, 0.07));
        CHECK(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("every coefficient vector is dominated by the optimum") {
    std::mt19937_64 rng(77);
    const auto f = make(testsup::random_generic_instance(rng, KernelFamily::SzegoDisk));
    const double eps = testsup::solvable_eps(f.sd, 0.1);
    const double a_value = compute_bound(f.sd, eps).A;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        Eigen::VectorXcd c(f.gram.G.rows());
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = Complex{gauss(rng), gauss(rng)};
        CHECK(worst_case_error(f.gram, c, eps) >= a_value - 1e-10);
    }
}

TEST_CASE("kernel regime: no coefficients help") {
    const ProblemInstance pw{
        KernelSpec::paley_wiener(),
        {{-2.0, 0.0}, {-1.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}},
        {0.0, 0.0}};
    const auto f = make(pw);
    REQUIRE(f.sd.regime == Regime::KernelRegime);
    const RecoveryResult rec = optimal_coefficients(f.sd, f.gram, 0.1);
    CHECK(rec.c.cwiseAbs().maxCoeff() == 0.0);
    CHECK(rec.E == Approx(std::sqrt(f.gram.pzz)).epsilon(1e-12));
}

TEST_CASE("complete stability: minimal-norm interpolation, bound only") {
    const ProblemInstance inst{KernelSpec::szego_disk(), {{0.0, 0.0}}, {1e-6, 0.0}};
    const auto f = make(inst);
    REQUIRE(f.sd.regime == Regime::CompleteStability);
    const RecoveryResult rec = optimal_coefficients(f.sd, f.gram, 0.01);
    CHECK(rec.upper_bound_only);
    CHECK(rec.E == Approx(0.01 * rec.c.norm()).epsilon(1e-12));
    CHECK(rec.E == Approx(compute_bound(f.sd, 0.01).A).epsilon(1e-12));
}

TEST_CASE("trivial range: c = 0 is optimal") {
    const auto f = make(testsup::one_point_instance());
    const RecoveryResult rec = optimal_coefficients(f.sd, f.gram, 0.9);
    CHECK(rec.c.cwiseAbs().maxCoeff() == 0.0);
    CHECK(rec.E == Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-12));
    CHECK(rec.E == Approx(compute_bound(f.sd, 0.9).A).epsilon(1e-12));
}
