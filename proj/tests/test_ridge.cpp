#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cdn/ridge.hpp"

using namespace cdn;

namespace {

Polynomial poly_from(int d, std::initializer_list<std::pair<MultiIndex, double>> terms)
{
    Polynomial p(d);
    for (const auto& [a, c] : terms)
        p[a] = c;
    return p;
}

} // namespace

TEST(Ridge, DirectionCount)
{
    EXPECT_EQ(choose_directions(3, 1, 1).size(), 3u);
    EXPECT_EQ(choose_directions(2, 2, 1).size(), 5u);
    EXPECT_EQ(choose_directions(0, 3, 1).size(), 3u);
    EXPECT_EQ(choose_directions(4, 3, 1).size(), static_cast<std::size_t>(binomial(6, 2) + 2));
}

TEST(Ridge, MomentMatrixFullRank)
{
    const auto dirs = choose_directions(2, 2, 9);
    EXPECT_TRUE(detail::full_row_rank(detail::ridge_moment_matrix(dirs, 2, 2)));
}

TEST(Ridge, Polarization)
{
    const auto p = poly_from(2, {{{1, 1}, 1.0}});
    const auto dec = decompose(p, {{1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}});
    EXPECT_NEAR(dec.coeffs[0][2], 0.5, 1e-12);
    EXPECT_NEAR(dec.coeffs[1][2], -0.5, 1e-12);
    EXPECT_NEAR(dec.coeffs[2][2], -0.5, 1e-12);
    EXPECT_LE(dec.residual, 1e-12);
    EXPECT_NEAR(ridge_eval(dec, Point{0.5, 0.5}), 0.25, 1e-12);
    EXPECT_NEAR(ridge_eval(dec, Point{1.0, 0.0}), 0.0, 1e-12);
}

TEST(Ridge, Constant)
{
    const auto p = poly_from(3, {{{0, 0, 0}, 2.5}});
    const auto dec = decompose(p, choose_directions(0, 3, 1));
    double s = 0.0;
    for (const auto& row : dec.coeffs) {
        s += row[0];
        for (std::size_t j = 1; j < row.size(); ++j)
            EXPECT_EQ(row[j], 0.0);
    }
    EXPECT_NEAR(s, 2.5, 1e-14);
    EXPECT_NEAR(ridge_eval(dec, Point{0.0, 0.0, 0.0}), s, 1e-14);
}

TEST(Ridge, UnivariateCube)
{
    const auto dec = decompose(poly_from(1, {{{3}, 1.0}}), {{1.0}});
    EXPECT_NEAR(dec.coeffs[0][3], 1.0, 1e-14);
    for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(dec.coeffs[0][j], 0.0, 1e-14);
}

TEST(Ridge, RandomPolynomialsReconstruct)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 30; ++t) {
        const int d = 1 + t % 3, m = t % 5;
        Polynomial p(d);
        for (const auto& a : indices_up_to(d, m))
            p[a] = u(rng);
        const auto dec = decompose(p, choose_directions(m, d, t));
        EXPECT_LE(dec.residual, 1e-8);
        for (const auto& x : unit_grid(d, 7))
            EXPECT_NEAR(p(x), ridge_eval(dec, x), 1e-8);
    }
}

TEST(Ridge, DegenerateDirectionsRejected)
{
    const auto p = poly_from(2, {{{1, 1}, 1.0}});
    EXPECT_THROW(decompose(p, {{1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}}), Error);
}

TEST(Ridge, Deterministic)
{
    EXPECT_EQ(choose_directions(3, 2, 42), choose_directions(3, 2, 42));
}
