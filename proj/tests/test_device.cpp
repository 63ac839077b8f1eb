#include <doctest.h>

#include <cmath>
#include <random>

#include "excsim/device.hpp"

using namespace excsim;

namespace {
const DeviceParams dev{};
}

TEST_CASE("bias_to_field at reference points") {
    CHECK(bias_to_field(2.2, dev) == doctest::Approx(0.0).epsilon(1e-12));
    // 0 V: -2.2 V over 140 nm -> -157.142857 kV/cm
    CHECK(bias_to_field(0.0, dev) == doctest::Approx(-2.2 / 140.0 * 1e4).epsilon(1e-12));
    CHECK(bias_to_field(-0.25, dev) == doctest::Approx(-175.0).epsilon(1e-12));
}

TEST_CASE("bias_to_field is affine in the bias") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng), b = u(rng), w = std::uniform_real_distribution<double>(0, 1)(rng);
        const double lhs = bias_to_field(w * a + (1 - w) * b, dev);
        const double rhs = w * bias_to_field(a, dev) + (1 - w) * bias_to_field(b, dev);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("detuning is zero at F0 and linear with slope k") {
    CHECK(detuning(dev.F0, dev) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(detuning(-175.0, dev) == doctest::Approx(-5.096).epsilon(1e-12));
    CHECK(detuning(-135.8, dev) == doctest::Approx(5.096).epsilon(1e-12));
}

TEST_CASE("splitting: minimum s0 at the anticrossing, hyperbolic shape") {
    CHECK(splitting(dev.F0, dev) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(splitting(-175.0, dev) ==
          doctest::Approx(std::sqrt(5.096 * 5.096 + 0.16)).epsilon(1e-12));
    CHECK(splitting(-175.0, dev) == doctest::Approx(5.1117).epsilon(1e-4));

    // Asymptotic slope |d s / dF| -> k far from the anticrossing.
    const double slope = (splitting(-4000.0, dev) - splitting(-4010.0, dev)) / 10.0;
    CHECK(std::fabs(slope) == doctest::Approx(dev.gradient_k).epsilon(1e-6));
}

TEST_CASE("splitting identity s^2 = delta^2 + s0^2 across a dense sweep") {
    for (int i = 0; i <= 1000; ++i) {
        const double f = -200.0 + 0.09 * i;
        const double s = splitting(f, dev), d = detuning(f, dev);
        CHECK(std::fabs(s * s - d * d - dev.s0 * dev.s0) < 1e-9);
    }
}

TEST_CASE("eigenbasis angle: 45 degrees at F0, sweeps the quadrant") {
    CHECK(eigenbasis_angle(dev.F0, dev) == doctest::Approx(45.0).epsilon(1e-12));
    // delta = s0 one gradient-step above F0 -> 22.5 degrees.
    CHECK(eigenbasis_angle(dev.F0 + dev.s0 / dev.gradient_k, dev) ==
          doctest::Approx(22.5).epsilon(1e-12));
    CHECK(eigenbasis_angle(-50.0, dev) < 1.0);
    CHECK(eigenbasis_angle(-300.0, dev) > 89.0);

    // Mirror symmetry about the anticrossing and monotonic decrease with F.
    double prev = eigenbasis_angle(-300.0, dev);
    for (int i = 1; i <= 500; ++i) {
        const double x = 0.5 * i;
        CHECK(eigenbasis_angle(dev.F0 + x, dev) + eigenbasis_angle(dev.F0 - x, dev) ==
              doctest::Approx(90.0).epsilon(1e-10));
        const double cur = eigenbasis_angle(-300.0 + 0.5 * i, dev);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("hamiltonian at the anticrossing is pure coupling") {
    const auto h = hamiltonian(dev.F0, dev).matrix;
    CHECK(std::abs(h(0, 0)) < 1e-14);
    CHECK(std::abs(h(1, 1)) < 1e-14);
    CHECK(h(0, 1).real() == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(h(1, 0).real() == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("hamiltonian eigensystem matches splitting and angle everywhere") {
    for (int i = 0; i <= 1000; ++i) {
        const double f = -200.0 + 0.1 * i;
        const auto h = hamiltonian(f, dev).matrix;
        CHECK((h - h.adjoint()).norm() < 1e-14);
        CHECK(std::abs(h.trace()) < 1e-14);

        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
        const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
        CHECK(gap == doctest::Approx(splitting(f, dev)).epsilon(1e-12));

        const Eigen::Vector2d e_up = upper_eigenvector(f, dev);
        const double chi = std::atan2(e_up(1), e_up(0)) * 180.0 / M_PI;
        CHECK(chi == doctest::Approx(eigenbasis_angle(f, dev)).epsilon(1e-10));

        const Eigen::Vector2cd v = e_up.cast<std::complex<double>>();
        CHECK((h * v - 0.5 * splitting(f, dev) * v).norm() < 1e-12);
    }
}

TEST_CASE("parameter validation rejects unphysical values") {
    DeviceParams bad = dev;
    bad.tau_r = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = dev;
    bad.s0 = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = dev;
    bad.d = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = dev;
    bad.T_spin = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_NOTHROW(dev.validate());
}
