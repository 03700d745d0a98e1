#include <gtest/gtest.h>

#include <cmath>

#include "mdiew/linalg.hpp"
#include "mdiew/states.hpp"

using namespace mdiew;

TEST(Werner, Endpoints) {
    EXPECT_LE(max_abs_diff(werner(0.0).matrix(), ComplexMatrix::identity(4) * 0.25), 1e-15);
    ComplexMatrix singlet(4);
    singlet(1, 1) = singlet(2, 2) = 0.5;
    singlet(1, 2) = singlet(2, 1) = -0.5;
    EXPECT_LE(max_abs_diff(werner(1.0).matrix(), singlet), 1e-15);
}

TEST(Werner, PartialTransposeTouchesZeroAtOneThird) {
    const ComplexMatrix pt = partial_transpose(werner(1.0 / 3.0).matrix(), {2, 2}, 1);
    EXPECT_NEAR(min_eigenvalue(pt), 0.0, 1e-12);
}

TEST(Werner, PartialTransposeSpectrumAcrossGrid) {
    for (int k = 0; k <= 20; ++k) {
        const double p = k / 20.0;
        const EigenDecomposition eig =
            hermitian_eigen(partial_transpose(werner(p).matrix(), {2, 2}, 1));
        EXPECT_NEAR(eig.eigenvalues[0], (1.0 - 3.0 * p) / 4.0, 1e-10);
        for (int j = 1; j < 4; ++j) EXPECT_NEAR(eig.eigenvalues[j], (1.0 + p) / 4.0, 1e-10);
    }
}

TEST(Werner, RejectsOutOfRange) {
    EXPECT_THROW(werner(-0.01), DomainError);
    EXPECT_THROW(werner(1.01), DomainError);
}

TEST(NoisyGhz, Endpoints) {
    EXPECT_LE(max_abs_diff(noisy_ghz(0.0).matrix(), ComplexMatrix::identity(8) * 0.125), 1e-15);
    ComplexMatrix ghz(8);
    ghz(0, 0) = ghz(7, 7) = ghz(0, 7) = ghz(7, 0) = 0.5;
    EXPECT_LE(max_abs_diff(noisy_ghz(1.0).matrix(), ghz), 1e-15);
    EXPECT_THROW(noisy_ghz(1.5), DomainError);
}

TEST(MaxEntangled, TwoQubits) {
    const ComplexMatrix m = max_entangled(2).matrix();
    for (std::size_t i : {0u, 3u})
        for (std::size_t j : {0u, 3u}) EXPECT_NEAR(std::abs(m(i, j) - Complex(0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(1, 1)), 0.0, 1e-15);
    const ComplexMatrix reduced_a = partial_trace(m, {2, 2}, {0});
    const ComplexMatrix reduced_b = partial_trace(m, {2, 2}, {1});
    EXPECT_LE(max_abs_diff(reduced_a, ComplexMatrix::identity(2) * 0.5), 1e-15);
    EXPECT_LE(max_abs_diff(reduced_b, ComplexMatrix::identity(2) * 0.5), 1e-15);
}

TEST(MaxEntangled, Qutrits) {
    const ComplexMatrix m = max_entangled(3).matrix();
    for (std::size_t i : {0u, 4u, 8u}) EXPECT_NEAR(m(i, i).real(), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(std::abs(m(1, 1)), 0.0, 1e-15);
    EXPECT_THROW(max_entangled(1), DomainError);
}

TEST(Tetrahedral, FirstStateMatchesBlochForm) {
    const StateBasis tetra = tetrahedral_basis();
    const double inv = 1.0 / std::sqrt(3.0);
    const ComplexMatrix tau0 =
        (ComplexMatrix::identity(2) + (pauli(1) + pauli(2) + pauli(3)) * inv) * 0.5;
    EXPECT_LE(max_abs_diff(tetra[0].matrix(), tau0), 1e-15);
}

TEST(Tetrahedral, TracesOverlapsAndCompleteness) {
    const StateBasis tetra = tetrahedral_basis();
    ComplexMatrix sum(2);
    for (std::size_t r = 0; r < 4; ++r) {
        EXPECT_NEAR(trace(tetra[r].matrix()).real(), 1.0, 1e-14);
        sum += tetra[r].matrix();
        for (std::size_t s = 0; s < 4; ++s) {
            const double overlap = trace_product(tetra[r].matrix(), tetra[s].matrix()).real();
            EXPECT_NEAR(overlap, r == s ? 1.0 : 1.0 / 3.0, 1e-12);
        }
    }
    EXPECT_LE(max_abs_diff(sum, ComplexMatrix::identity(2) * 2.0), 1e-12);
}

TEST(ValidateDensity, AcceptsMaximallyMixed) {
    EXPECT_NO_THROW(validate_density(ComplexMatrix::identity(4) * 0.25, {2, 2}));
}

TEST(ValidateDensity, ReportsDistinctViolations) {
    const DensityReport trace_bad = check_density(pauli(3), {2});
    EXPECT_FALSE(trace_bad.ok());
    EXPECT_TRUE(trace_bad.hermitian());
    EXPECT_FALSE(trace_bad.unit_trace());
    EXPECT_THROW(validate_density(pauli(3), {2}), ValidationError);

    const ComplexMatrix neg = ComplexMatrix::from_rows({{1.5, 0}, {0, -0.5}});
    const DensityReport pos_bad = check_density(neg, {2});
    EXPECT_TRUE(pos_bad.unit_trace());
    EXPECT_FALSE(pos_bad.positive());
    EXPECT_NEAR(pos_bad.min_eigenvalue, -0.5, 1e-12);
    EXPECT_THROW(validate_density(neg, {2}), ValidationError);

    const ComplexMatrix nonherm = ComplexMatrix::from_rows({{0.5, 1}, {0, 0.5}});
    const DensityReport herm_bad = check_density(nonherm, {2});
    EXPECT_FALSE(herm_bad.hermitian());
    EXPECT_THROW(validate_density(nonherm, {2}), ValidationError);

    EXPECT_FALSE(check_density(ComplexMatrix::identity(4) * 0.25, {2, 3}).dims_match);
}

TEST(RandomSeparable, PureProductStateIsPptAndValid) {
    const DensityMatrix rho = random_separable({2, 2}, 1, 42);
    const double purity = trace_product(rho.matrix(), rho.matrix()).real();
    EXPECT_NEAR(purity, 1.0, 1e-12);
    const ComplexMatrix pt = partial_transpose(rho.matrix(), {2, 2}, 1);
    EXPECT_GE(min_eigenvalue(pt), -1e-9);
}

TEST(RandomSeparable, FiveHundredSamplesStayPpt) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const DensityMatrix rho = random_separable({2, 2}, 1 + seed % 5, seed);
        const ComplexMatrix pt = partial_transpose(rho.matrix(), {2, 2}, 1);
        ASSERT_GE(min_eigenvalue(pt), -1e-9) << "seed " << seed;
    }
}

TEST(RandomSeparable, SeedReproducibilityIsBitIdentical) {
    const DensityMatrix a = random_separable({2, 2}, 3, 7);
    const DensityMatrix b = random_separable({2, 2}, 3, 7);
    const DensityMatrix c = random_separable({2, 2}, 3, 8);
    EXPECT_EQ(max_abs_diff(a.matrix(), b.matrix()), 0.0);
    EXPECT_GT(max_abs_diff(a.matrix(), c.matrix()), 0.0);
}

TEST(RandomDensity, ProducesValidStates) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DensityMatrix rho = random_density({2, 2}, 4, seed);
        EXPECT_TRUE(check_density(rho.matrix(), rho.dims()).ok());
    }
}

TEST(StateBasis, RejectsDegenerateSets) {
    const DensityMatrix mixed(ComplexMatrix::identity(2) * 0.5, {2});
    EXPECT_THROW(StateBasis({mixed, mixed, mixed, mixed}), ValidationError);
    EXPECT_THROW(StateBasis({mixed, mixed, mixed}), DimensionError);
}
