#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cdn/error.hpp"
#include "cdn/multi_index.hpp"
#include "cdn/polynomial.hpp"

namespace cdn {

using Direction = std::vector<double>;

struct RidgeDecomposition {
    int m = 0;
    int d = 1;
    std::vector<Direction> directions;
    std::vector<std::vector<double>> coeffs; // coeffs[i][j] = C(i, j)
    double residual = 0.0;

    std::size_t L() const { return directions.size(); }
};

inline constexpr int ridge_slack = 2;
inline constexpr double ridge_tolerance = 1e-8;

inline std::size_t ridge_direction_count(int m, int d)
{
    return static_cast<std::size_t>(binomial(m + d - 1, d - 1)) + ridge_slack;
}

inline double dot(const Direction& w, const double* x)
{
    double s = 0.0;
    for (std::size_t l = 0; l < w.size(); ++l)
        s += w[l] * x[l];
    return s;
}

namespace detail {

// Rows: monomials of order j. Columns: coefficient of x^a in (w_i . x)^j.
inline Eigen::MatrixXd ridge_moment_matrix(const std::vector<Direction>& dirs, int d, int j)
{
    auto mons = indices_of_order(d, j);
    Eigen::MatrixXd A(static_cast<Eigen::Index>(mons.size()), static_cast<Eigen::Index>(dirs.size()));
    for (std::size_t r = 0; r < mons.size(); ++r)
        for (std::size_t i = 0; i < dirs.size(); ++i)
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = multinomial(mons[r]) * monomial(mons[r], dirs[i].data());
    return A;
}

inline bool full_row_rank(const Eigen::MatrixXd& A)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& s = svd.singularValues();
    if (s.size() < A.rows() || s(0) == 0.0)
        return false;
    return s(A.rows() - 1) > 1e-10 * s(0);
}

// Largest 1/sigma_min over the per-degree systems; bounds the minimum-norm coefficients.
inline double conditioning(const std::vector<Direction>& dirs, int d, int m)
{
    double worst = 0.0;
    for (int j = 0; j <= m; ++j) {
        const auto A = ridge_moment_matrix(dirs, d, j);
        if (!full_row_rank(A))
            return std::numeric_limits<double>::infinity();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        worst = std::max(worst, 1.0 / svd.singularValues()(A.rows() - 1));
    }
    return worst;
}

} // namespace detail

inline constexpr int direction_draws = 32;

/// binom(m+d-1, d-1) + 2 seeded points of [0,1]^d, scaled by 1/d.
/// Of several seeded draws, the best-conditioned full-rank set is kept.
inline std::vector<Direction> choose_directions(int m, int d, std::uint64_t seed)
{
    require(m >= 0 && d >= 1, "invalid degree or dimension");
    const std::size_t L = ridge_direction_count(m, d);
    std::vector<Direction> best;
    double best_score = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < direction_draws; ++attempt) {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<Direction> dirs(L, Direction(d));
        for (auto& w : dirs)
            for (auto& c : w)
                c = u(rng) / d;
        const double score = detail::conditioning(dirs, d, m);
        if (score < best_score) {
            best_score = score;
            best = std::move(dirs);
        }
        if (d == 1 && !best.empty())
            break; // any nonzero draw is as good as another up to scale
    }
    if (best.empty())
        throw Error("degenerate directions");
    return best;
}

inline double ridge_eval(const RidgeDecomposition& dec, const double* x)
{
    double v = 0.0;
    for (std::size_t i = 0; i < dec.L(); ++i) {
        double t = dot(dec.directions[i], x), p = 1.0;
        for (int j = 0; j <= dec.m; ++j) {
            v += dec.coeffs[i][j] * p;
            p *= t;
        }
    }
    return v;
}

inline double ridge_eval(const RidgeDecomposition& dec, const Point& x)
{
    require(static_cast<int>(x.size()) == dec.d, "dimension mismatch");
    return ridge_eval(dec, x.data());
}

/// Per-degree minimum-norm least squares onto ridge monomials (w_i . x)^j.
/// m < 0 takes the degree of poly.
inline RidgeDecomposition decompose(const Polynomial& poly, const std::vector<Direction>& dirs, double tol = ridge_tolerance,
                                    int m = -1)
{
    require(!dirs.empty(), "no directions");
    RidgeDecomposition dec;
    dec.d = poly.d;
    dec.m = m < 0 ? poly.degree() : m;
    require(poly.degree() <= dec.m, "polynomial degree exceeds m");
    dec.directions = dirs;
    for (const auto& w : dirs)
        require(static_cast<int>(w.size()) == dec.d, "direction has wrong dimension");
    dec.coeffs.assign(dirs.size(), std::vector<double>(dec.m + 1, 0.0));

    for (int j = 0; j <= dec.m; ++j) {
        auto mons = indices_of_order(dec.d, j);
        Eigen::VectorXd b(static_cast<Eigen::Index>(mons.size()));
        bool any = false;
        for (std::size_t r = 0; r < mons.size(); ++r) {
            b(static_cast<Eigen::Index>(r)) = poly.coeff(mons[r]);
            any = any || b(static_cast<Eigen::Index>(r)) != 0.0;
        }
        if (!any)
            continue;
        Eigen::MatrixXd A = detail::ridge_moment_matrix(dirs, dec.d, j);
        Eigen::VectorXd c = A.completeOrthogonalDecomposition().solve(b);
        for (std::size_t i = 0; i < dirs.size(); ++i)
            dec.coeffs[i][j] = c(static_cast<Eigen::Index>(i));
    }

    double res = 0.0;
    for (const auto& x : unit_grid(dec.d, 10))
        res = std::max(res, std::abs(ridge_eval(dec, x) - poly(x)));
    dec.residual = res;
    if (!(res <= tol))
        throw Error("decomposition residual exceeds tolerance");
    return dec;
}

} // namespace cdn
