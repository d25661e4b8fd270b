#include <cmath>

#include <gtest/gtest.h>

#include "cdn/activation.hpp"

using namespace cdn;

TEST(Activation, LogisticValues)
{
    const auto act = ActivationSpec::make(Kind::logistic);
    EXPECT_DOUBLE_EQ(eval_derivative(act, 0, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(eval_derivative(act, 1, 0.0), 0.25);
    EXPECT_EQ(eval_derivative(ActivationSpec::heaviside(), 0, -0.1), 0.0);
    EXPECT_EQ(eval_derivative(ActivationSpec::heaviside(), 0, 0.0), 1.0);
}

TEST(Activation, SecondDerivativeAtOne)
{
    const auto act = ActivationSpec::make(Kind::logistic);
    EXPECT_NEAR(eval_derivative(act, 2, 1.0), -0.09085, 1e-5);
}

TEST(Activation, OrderGuard)
{
    const auto act = ActivationSpec::make(Kind::logistic, 3);
    EXPECT_NO_THROW(eval_derivative(act, 4, 0.1));
    try {
        eval_derivative(act, 5, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "derivative order exceeds k0+1");
    }
}

class DerivativeFD : public ::testing::TestWithParam<Kind> { };

// central differences of order j-1 against the closed form of order j
TEST_P(DerivativeFD, MatchesFiniteDifferences)
{
    const auto act = ActivationSpec::make(GetParam());
    const double h = 1e-5;
    for (double t : {-1.7, -0.4, 0.0, 0.3, 1.2})
        for (int j = 1; j <= act.k0() + 1; ++j) {
            const double fd = (act.derivative(j - 1, t + h) - act.derivative(j - 1, t - h)) / (2 * h);
            const double exact = act.derivative(j, t);
            EXPECT_NEAR(fd, exact, 1e-6 * (1.0 + std::abs(exact))) << kind_name(GetParam()) << " j=" << j << " t=" << t;
        }
}

INSTANTIATE_TEST_SUITE_P(Kinds, DerivativeFD,
                         ::testing::Values(Kind::logistic, Kind::tanh, Kind::gompertz, Kind::gaussian));

TEST(Activation, ExtendedValueAgreesWithDouble)
{
    for (auto k : {Kind::logistic, Kind::tanh, Kind::gompertz, Kind::gaussian}) {
        const auto act = ActivationSpec::make(k);
        for (double t : {-3.0, -0.5, 0.0, 0.7, 2.5})
            EXPECT_NEAR(static_cast<double>(act.value(t)), act.derivative(0, t), 1e-15) << kind_name(k);
    }
}

TEST(Activation, TanhIsScaledLogistic)
{
    const auto act = ActivationSpec::make(Kind::tanh);
    for (double t : {-1.0, 0.2, 0.9})
        EXPECT_NEAR(act.derivative(0, t), 0.5 * (1.0 + std::tanh(t)), 1e-15);
}

TEST(Activation, TailThreshold)
{
    const auto act = ActivationSpec::make(Kind::logistic);
    EXPECT_NEAR(tail_threshold(act, 0.01), std::log(99.0), 1e-9);
    EXPECT_NEAR(tail_threshold(act, 0.1), std::log(9.0), 1e-9);
    EXPECT_EQ(tail_threshold(act, 0.5), 0.0);
    EXPECT_THROW(tail_threshold(ActivationSpec::make(Kind::gaussian), 0.1), Error);
}

TEST(Activation, TailThresholdAgreesWithBisection)
{
    for (auto k : {Kind::logistic, Kind::tanh, Kind::gompertz})
        for (double eps : {1e-2, 1e-4, 1e-8, 1e-12}) {
            const auto act = ActivationSpec::make(k);
            const double K = tail_threshold(act, eps);
            EXPECT_GE(act.derivative(0, K), 1.0 - eps);
            EXPECT_LE(act.derivative(0, -K), eps);
            // near 1 - eps the tail test resolves K only to the spacing of doubles there
            const double Kb = tail_threshold_bisect(act, eps);
            EXPECT_NEAR(act.derivative(0, K), act.derivative(0, Kb), 1e-13) << kind_name(k) << " " << eps;
            EXPECT_NEAR(act.derivative(0, -K), act.derivative(0, -Kb), 1e-3 * eps) << kind_name(k) << " " << eps;
        }
}

TEST(Activation, NoncriticalPoint)
{
    const auto act = ActivationSpec::make(Kind::logistic, 2);
    EXPECT_NE(act.b0(), 0.0);
    for (int j = 0; j <= 2; ++j)
        EXPECT_GE(std::abs(act.derivative(j, act.b0())), 1e-8);

    const auto g = ActivationSpec::make(Kind::gompertz, 1, {1.0, 1.0});
    EXPECT_GT(g.derivative(0, g.b0()), 1e-8);
    EXPECT_GT(g.derivative(1, g.b0()), 1e-8);
}

TEST(Activation, DerivativeRatio)
{
    const auto act = ActivationSpec::make(Kind::logistic);
    const double coarse = curvature_ratio(act, 1, 10000);
    const double fine = curvature_ratio(act, 1, 100000);
    EXPECT_GT(coarse, 0.0);
    EXPECT_NEAR(coarse, fine, 1e-3 * fine);
    EXPECT_LE(derivative_ratio(act, 1, 0), 0.25 / act.derivative(0, act.b0()) + 1e-12);

    const auto gauss = ActivationSpec::restore(Kind::gaussian, 5, 0.0);
    EXPECT_THROW(derivative_ratio(gauss, 2, 1), Error);
}

TEST(Activation, ParseKind)
{
    EXPECT_EQ(parse_kind("tanh"), Kind::tanh);
    EXPECT_EQ(kind_name(Kind::gompertz), "gompertz");
    EXPECT_THROW(parse_kind("relu"), Error);
}
