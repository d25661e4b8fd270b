#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cdn/targets.hpp"

using namespace cdn;

namespace {

TargetFunction exp_target()
{
    TargetFunction f;
    f.name = "exp";
    f.d = 1;
    f.k = 2;
    f.max_order = 12;
    f.value = [](const double* x) { return std::exp(x[0]); };
    f.partial = [](const MultiIndex&, const double* x) { return std::exp(x[0]); };
    return f;
}

TargetFunction sincos_target()
{
    constexpr double pi = std::numbers::pi;
    TargetFunction f;
    f.name = "sincos";
    f.d = 2;
    f.k = 1;
    f.max_order = 1;
    f.value = [](const double* x) { return std::sin(pi * x[0]) * std::cos(pi * x[1]); };
    f.partial = [](const MultiIndex& a, const double* x) {
        double s = a[0] ? pi * std::cos(pi * x[0]) : std::sin(pi * x[0]);
        double c = a[1] ? -pi * std::sin(pi * x[1]) : std::cos(pi * x[1]);
        return s * c;
    };
    return f;
}

} // namespace

TEST(Taylor, PolynomialReproducesItself)
{
    auto f = quadratic_target(1);
    const auto P = taylor_at(f, 2, {0.3});
    for (double x : {0.0, 0.1, 0.77, 1.0})
        EXPECT_NEAR(P(Point{x}), x * x, 1e-14);
}

TEST(Taylor, Exponential)
{
    const auto P = taylor_at(exp_target(), 2, {0.0});
    for (double x : {0.0, 0.2, 0.9})
        EXPECT_NEAR(P(Point{x}), 1.0 + x + 0.5 * x * x, 1e-14);
    const auto g = P.global();
    EXPECT_NEAR(g.coeff({2}), 0.5, 1e-15);
}

TEST(Taylor, GradientAtCenter)
{
    const auto P = taylor_at(sincos_target(), 1, {0.5, 0.5});
    const double pi = std::numbers::pi;
    EXPECT_NEAR(P(Point{0.5, 0.5}), 0.0, 1e-15);
    EXPECT_NEAR(P(Point{0.5, 0.6}), -pi * 0.1, 1e-14);
    EXPECT_NEAR(P(Point{0.7, 0.5}), 0.0, 1e-14);
}

TEST(Taylor, GlobalExpansionMatches)
{
    auto f = sinprod_target(2, 3);
    const auto P = taylor_at(f, 3, {0.3, 0.6});
    const auto g = P.global();
    for (const auto& x : unit_grid(2, 6))
        EXPECT_NEAR(g(x), P(x), 1e-9);
}

TEST(Taylor, Errors)
{
    EXPECT_THROW(taylor_at(fracv_target(1), 1, {0.2}), Error);
    EXPECT_THROW(taylor_at(affine_target(1), 0, {1.2}), Error);
}

// Taylor remainder bound with the declared constant
TEST(Taylor, RemainderWithinDeclaredConstant)
{
    for (const auto& f : {sinprod_target(1, 1), sinprod_target(2, 1), quadratic_target(2), affine_target(3)})
        for (const auto& x0 : unit_grid(f.d, 4)) {
            const auto P = taylor_at(f, f.k, x0);
            for (const auto& x : unit_grid(f.d, 9)) {
                double dist = 0.0;
                for (int l = 0; l < f.d; ++l)
                    dist += (x[l] - x0[l]) * (x[l] - x0[l]);
                dist = std::sqrt(dist);
                EXPECT_LE(std::abs(f(x) - P(x)), f.c0 * std::pow(dist, f.r()) + 1e-12) << f.name;
            }
        }
}

TEST(Corpus, Contents)
{
    const auto c1 = builtin_corpus(1);
    EXPECT_EQ(c1[0].name, "affine");
    EXPECT_EQ(c1[0].r(), 1.0);
    EXPECT_EQ(c1[0].c0, 1.0);
    EXPECT_EQ(c1[2].name, "sinprod");
    EXPECT_EQ(c1[2].k, 1);
    EXPECT_EQ(c1[2].v, 1.0);
    EXPECT_GE(c1[2].c0, std::pow(2.0 * std::numbers::pi, 2));
    const auto c2 = builtin_corpus(2);
    EXPECT_EQ(c2[1].k, 1);
    EXPECT_EQ(c2[1].v, 1.0);
    EXPECT_DOUBLE_EQ(c2[1](Point{0.5, 0.4}), 0.2);
}

TEST(SparseBump, PeakAndSupport)
{
    SparseSupport sup(2, 2, {{1, 2}});
    for (double r : {1.0, 2.0, 3.0}) {
        const auto f = sparse_target(sup, r, 2);
        EXPECT_DOUBLE_EQ(f(Point{0.25, 0.75}), 1.0);
        EXPECT_EQ(f(Point{0.75, 0.75}), 0.0);
        EXPECT_EQ(f(Point{0.25, 0.25}), 0.0);
        EXPECT_EQ(f(Point{0.5, 0.75}), 0.0);
    }
}

// value and partials up to order k vanish at the support boundary
TEST(SparseBump, SmoothGluing)
{
    SparseSupport sup(1, 2, {{1}});
    for (double r : {1.0, 2.0, 3.0}) {
        const auto f = sparse_target(sup, r, 1);
        const double h = 1e-6;
        for (double b : {0.0, 0.5})
            for (int o = 0; o <= f.k; ++o) {
                EXPECT_NEAR(f.partial({o}, &b), 0.0, 1e-12);
                double xl = std::max(0.0, b - h), xr = b + h;
                if (o >= 1) {
                    double fd = (f.partial({o - 1}, &xr) - f.partial({o - 1}, &xl)) / (xr - xl);
                    EXPECT_NEAR(fd, 0.0, 1e-2) << "r=" << r << " o=" << o;
                }
            }
    }
}

TEST(SparseBump, DerivativeOracleMatchesFiniteDifferences)
{
    SparseSupport sup(1, 2, {{2}});
    const auto f = sparse_target(sup, 3.0, 1);
    const double h = 1e-6;
    for (double x : {0.55, 0.7, 0.93})
        for (int o = 1; o <= 3; ++o) {
            double a = x + h, b = x - h;
            double fd = (f.partial({o - 1}, &a) - f.partial({o - 1}, &b)) / (2 * h);
            EXPECT_NEAR(fd, f.partial({o}, &x), 1e-5 * (1.0 + std::abs(fd)));
        }
}

TEST(SparseBump, ConstantsForTwoCells)
{
    SparseSupport sup(1, 2, {{1}});
    EXPECT_NEAR(sparse_target(sup, 1.0, 1).c0, 8.0, 1e-6);
    EXPECT_NEAR(sparse_target(sup, 2.0, 1).c0, 128.0, 1e-6);
}

TEST(Targets, FactoryAndFit)
{
    EXPECT_THROW(make_target("nope", 1), Error);
    EXPECT_THROW(make_target("sparse-bump", 1), Error);
    const auto f = sinprod_target(1, 1);
    const double c = fit_taylor_constant(f, 1);
    EXPECT_GT(c, 0.0);
    EXPECT_LE(c, f.c0);
    EXPECT_EQ(fit_taylor_constant(affine_target(2), 1), affine_target(2).c0);
    EXPECT_NEAR(measured_sup(f), 1.0, 1e-6);
}
