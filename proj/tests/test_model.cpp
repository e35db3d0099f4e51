#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "ottokz/model.hpp"

using namespace ottokz;
constexpr double kPi = std::numbers::pi;

// Independent long-double evaluation of the mode gap.
long double gap_ld(long double h, long double k) {
    long double a = h + std::cos(k);
    long double b = std::sin(k);
    return 2.0L * std::sqrt(a * a + b * b);
}

long double ground_energy_ld(long double h, int L) {
    long double e = 0.0L;
    for (int m = 1; m <= L / 2; ++m) {
        e -= gap_ld(h, (2.0L * m - 1.0L) * std::numbers::pi_v<long double> / L);
    }
    return e;
}

TEST(MomentumGrid, SmallSizes) {
    auto g4 = momentum_grid(4);
    ASSERT_EQ(g4.size(), 2u);
    EXPECT_DOUBLE_EQ(g4[0], kPi / 4);
    EXPECT_DOUBLE_EQ(g4[1], 3 * kPi / 4);
    auto g2 = momentum_grid(2);
    ASSERT_EQ(g2.size(), 1u);
    EXPECT_DOUBLE_EQ(g2[0], kPi / 2);
}

TEST(MomentumGrid, HundredSites) {
    auto g = momentum_grid(100);
    ASSERT_EQ(g.size(), 50u);
    EXPECT_DOUBLE_EQ(g.front(), kPi / 100);
    EXPECT_DOUBLE_EQ(g.back(), 99 * kPi / 100);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_GT(g[i], 0.0);
        EXPECT_LT(g[i], kPi);
        EXPECT_GT(2.0 * std::sin(g[i]), 0.0);
        if (i > 0) {
            EXPECT_LT(g[i - 1], g[i]);
        }
    }
}

TEST(MomentumGrid, RejectsBadSizes) {
    EXPECT_THROW(momentum_grid(3), std::invalid_argument);
    EXPECT_THROW(momentum_grid(0), std::invalid_argument);
    EXPECT_THROW(momentum_grid(-4), std::invalid_argument);
}

TEST(TimMode, Coefficients) {
    auto m = tim_mode(0.0, kPi / 2);
    EXPECT_NEAR(m.diag, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(m.offdiag.real(), 2.0);
    EXPECT_EQ(m.offdiag.imag(), 0.0);

    auto m70 = tim_mode(70.0, kPi / 2);
    EXPECT_NEAR(m70.diag, 140.0, 1e-12);
    EXPECT_DOUBLE_EQ(m70.offdiag.real(), 2.0);
}

TEST(TimMode, CriticalModeCloses) {
    for (double eps : {1e-2, 1e-4, 1e-6}) {
        auto m = tim_mode(1.0, kPi - eps);
        EXPECT_LT(std::abs(m.diag), 2 * eps * eps);
        EXPECT_LT(std::abs(m.offdiag), 2.1 * eps);
        EXPECT_LT(gap(m), 2.1 * eps);
    }
    EXPECT_LT(gap(tim_mode(1.0, kPi)), 1e-15);
}

TEST(Gap, Values) {
    for (double k : {0.1, 0.7, 1.5, 2.9}) {
        EXPECT_NEAR(gap(tim_mode(0.0, k)), 2.0, 1e-14);
    }
    EXPECT_NEAR(gap(tim_mode(70.0, kPi / 2)), static_cast<double>(gap_ld(70.0L, std::numbers::pi_v<long double> / 2)),
                1e-12);
    EXPECT_NEAR(gap(tim_mode(70.0, kPi / 2)), 140.0143, 1e-4);
}

TEST(ModeHamiltonian, ExactlyHermitian) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> h(-10, 10), k(0.01, kPi - 0.01);
    for (int i = 0; i < 50; ++i) {
        auto m = tim_mode(h(rng), k(rng));
        EXPECT_TRUE(m.block() == m.block().adjoint());
        EXPECT_TRUE(m.full() == m.full().adjoint());
    }
    ModeHamiltonian generic{1.0, 0.3, Complex(0.4, -1.2)};
    EXPECT_TRUE(generic.full() == generic.full().adjoint());
}

TEST(ModeHamiltonian, SpectrumMatchesClosedForm) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> h(-80, 80), k(0.0, kPi);
    for (int i = 0; i < 200; ++i) {
        const double hh = h(rng), kk = k(rng);
        Eigen::SelfAdjointEigenSolver<Matrix4c> es(tim_mode(hh, kk).full());
        const double ek = 2.0 * std::sqrt((hh + std::cos(kk)) * (hh + std::cos(kk)) + std::sin(kk) * std::sin(kk));
        auto ev = es.eigenvalues();
        const double tol = 1e-12 * std::max(1.0, ek);
        EXPECT_NEAR(ev(0), -ek, tol);
        EXPECT_NEAR(ev(1), 0.0, tol);
        EXPECT_NEAR(ev(2), 0.0, tol);
        EXPECT_NEAR(ev(3), ek, tol);
    }
}

TEST(GroundStateEnergy, ReferenceValues) {
    EXPECT_NEAR(ground_state_energy(0.0, 100), -100.0, 1e-12);
    EXPECT_NEAR(ground_state_energy(70.0, 100), static_cast<double>(ground_energy_ld(70.0L, 100)), 1e-9);
    EXPECT_NEAR(ground_state_energy(70.0, 100), -7000.357, 1e-3);
    EXPECT_NEAR(ground_state_energy(10.0, 100), static_cast<double>(ground_energy_ld(10.0L, 100)), 1e-10);
    // large-h expansion -(L h + L/(4h))
    EXPECT_NEAR(ground_state_energy(10.0, 100), -1002.5, 1e-2);
}

TEST(GroundStateEnergy, MonotoneBeyondCriticality) {
    double prev = ground_state_energy(1.0, 100);
    for (double h = 1.5; h < 20; h += 0.5) {
        double e = ground_state_energy(h, 100);
        EXPECT_LT(e, prev);
        prev = e;
    }
}

TEST(GroundStateEnergy, DensityConvergesWithSize) {
    auto density = [](double h, int L) { return ground_state_energy(h, L) / L; };
    // Away from criticality the finite-size correction is exponentially small.
    for (double h : {0.0, 0.5, 3.0}) {
        EXPECT_LT(std::abs(density(h, 100) - density(h, 200)), 1e-12) << "h = " << h;
    }
    // At h = 1 it decays as a power of L.
    const double d1 = std::abs(density(1.0, 50) - density(1.0, 100));
    const double d2 = std::abs(density(1.0, 100) - density(1.0, 200));
    EXPECT_GT(d1, 1e-6);
    EXPECT_NEAR(d1 / d2, 4.0, 0.1);
}

TEST(CriticalExponents, Validation) {
    EXPECT_NO_THROW(CriticalExponents::ising().validate());
    EXPECT_NO_THROW(CriticalExponents::ising(2).validate());
    EXPECT_THROW((CriticalExponents{0.0, 1.0, 1, 1}.validate()), std::invalid_argument);
    EXPECT_THROW((CriticalExponents{1.0, -1.0, 1, 1}.validate()), std::invalid_argument);
    EXPECT_THROW((CriticalExponents{1.0, 1.0, 0, 1}.validate()), std::invalid_argument);
    EXPECT_THROW((CriticalExponents{1.0, 1.0, 1, 3}.validate()), std::invalid_argument);
}
