#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cdn/error.hpp"
#include "cdn/multi_index.hpp"
#include "cdn/partition.hpp"
#include "cdn/polynomial.hpp"

namespace cdn {

/// Target with value and partial-derivative oracles and smoothness metadata r = k + v.
struct TargetFunction {
    std::string name;
    int d = 1;
    int k = 0;
    double v = 1.0;
    double c0 = 1.0;
    int max_order = 0; // highest partial order the oracle provides
    std::function<double(const double*)> value;
    std::function<double(const MultiIndex&, const double*)> partial;
    std::optional<SparseSupport> support;

    double r() const { return k + v; }
    double operator()(const Point& x) const { return value(x.data()); }
    double operator()(const double* x) const { return value(x); }
};

/// Taylor polynomial stored in powers of (x - center).
struct TaylorPolynomial {
    Point center;
    int k = 0;
    std::map<MultiIndex, double> coeffs;

    double operator()(const double* x) const
    {
        double v = 0.0;
        std::vector<double> dx(center.size());
        for (std::size_t l = 0; l < center.size(); ++l)
            dx[l] = x[l] - center[l];
        for (const auto& [a, c] : coeffs)
            v += c * monomial(a, dx.data());
        return v;
    }

    double operator()(const Point& x) const { return (*this)(x.data()); }

    Polynomial global() const { return expand_shifted(static_cast<int>(center.size()), coeffs, center); }
};

inline TaylorPolynomial taylor_at(const TargetFunction& f, int k, const Point& x0)
{
    require(static_cast<int>(x0.size()) == f.d, "dimension mismatch");
    require(k >= 0, "negative Taylor degree");
    if (k > f.max_order)
        throw Error("derivative oracle missing order " + std::to_string(k));
    if (!in_unit_cube(x0))
        throw Error("point outside domain");
    TaylorPolynomial t;
    t.center = x0;
    t.k = k;
    for (const auto& a : indices_up_to(f.d, k))
        t.coeffs[a] = f.partial(a, x0.data()) / multi_factorial(a);
    return t;
}

namespace detail {

// d^a x^b
inline double monomial_partial(const MultiIndex& b, const MultiIndex& a, const double* x)
{
    double v = 1.0;
    for (std::size_t l = 0; l < b.size(); ++l) {
        if (a[l] > b[l])
            return 0.0;
        for (int p = 0; p < a[l]; ++p)
            v *= b[l] - p;
        for (int p = 0; p < b[l] - a[l]; ++p)
            v *= x[l];
    }
    return v;
}

inline double sin_derivative(int n, double y)
{
    return std::sin(y + n * std::numbers::pi / 2.0);
}

} // namespace detail

/// (x_1 + ... + x_d) / d.
inline TargetFunction affine_target(int d)
{
    TargetFunction f;
    f.name = "affine";
    f.d = d;
    f.k = 0;
    f.v = 1.0;
    f.c0 = 1.0 / std::sqrt(static_cast<double>(d));
    f.max_order = 8;
    f.value = [d](const double* x) {
        double s = 0.0;
        for (int l = 0; l < d; ++l)
            s += x[l];
        return s / d;
    };
    f.partial = [d, g = f.value](const MultiIndex& a, const double* x) {
        int o = order(a);
        if (o == 0)
            return g(x);
        return o == 1 ? 1.0 / d : 0.0;
    };
    return f;
}

/// x^2 for d = 1, otherwise the product x_1 ... x_d.
inline TargetFunction quadratic_target(int d)
{
    TargetFunction f;
    f.name = "quadratic";
    f.d = d;
    f.k = 1;
    f.v = 1.0;
    MultiIndex b = d == 1 ? MultiIndex{2} : MultiIndex(d, 1);
    // Lipschitz constant of the gradient: |f''| = 2 for x^2, sqrt(d-1) for the product
    f.c0 = d == 1 ? 2.0 : std::sqrt(static_cast<double>(d - 1));
    f.max_order = 12;
    f.value = [b](const double* x) { return monomial(b, x); };
    f.partial = [b](const MultiIndex& a, const double* x) { return detail::monomial_partial(b, a, x); };
    return f;
}

/// prod_l sin(2 pi x_l) with declared smoothness k + 1.
inline TargetFunction sinprod_target(int d, int k = 1)
{
    require(k >= 0 && k <= 10, "sinprod smoothness out of range");
    TargetFunction f;
    f.name = "sinprod";
    f.d = d;
    f.k = k;
    f.v = 1.0;
    const double w = 2.0 * std::numbers::pi;
    f.c0 = std::sqrt(static_cast<double>(d)) * std::pow(w, k + 1);
    f.max_order = 12;
    f.value = [d, w](const double* x) {
        double v = 1.0;
        for (int l = 0; l < d; ++l)
            v *= std::sin(w * x[l]);
        return v;
    };
    f.partial = [d, w](const MultiIndex& a, const double* x) {
        double v = 1.0;
        for (int l = 0; l < d; ++l)
            v *= std::pow(w, a[l]) * detail::sin_derivative(a[l], w * x[l]);
        return v;
    };
    return f;
}

/// |mean(x) - 1/2|^v, Hoelder of order v < = 1.
inline TargetFunction fracv_target(int d, double v = 0.5)
{
    require(v > 0.0 && v <= 1.0, "fractional order must lie in (0,1]");
    TargetFunction f;
    f.name = "frac-v";
    f.d = d;
    f.k = 0;
    f.v = v;
    f.c0 = 1.0;
    f.max_order = 0;
    f.value = [d, v](const double* x) {
        double s = 0.0;
        for (int l = 0; l < d; ++l)
            s += x[l];
        return std::pow(std::abs(s / d - 0.5), v);
    };
    f.partial = [g = f.value](const MultiIndex&, const double* x) { return g(x); };
    return f;
}

inline TargetFunction constant_target(int d, double c)
{
    TargetFunction f;
    f.name = "constant";
    f.d = d;
    f.k = 0;
    f.v = 1.0;
    f.c0 = 0.0;
    f.max_order = 12;
    f.value = [c](const double*) { return c; };
    f.partial = [c](const MultiIndex& a, const double*) { return order(a) == 0 ? c : 0.0; };
    return f;
}

inline std::vector<TargetFunction> builtin_corpus(int d)
{
    require(d >= 1 && d <= 3, "corpus dimension must be 1, 2 or 3");
    return {affine_target(d), quadratic_target(d), sinprod_target(d, 1), fracv_target(d, 0.5)};
}

/// Bump prod_l (4 t_l (1 - t_l))^(k+1) on each support cell, zero elsewhere.
inline TargetFunction sparse_target(const SparseSupport& sup, double r, int d)
{
    require(sup.d == d, "dimension mismatch");
    require(r > 0.0, "smoothness must be positive");
    const int k = static_cast<int>(std::ceil(r)) - 1;
    const double v = r - k;
    const int p = k + 1;

    // phi(t) = 4^p (t - t^2)^p and its derivatives as coefficient vectors
    std::vector<std::vector<double>> phi(1, std::vector<double>(2 * p + 1, 0.0));
    for (int q = 0; q <= p; ++q)
        phi[0][p + q] = std::pow(4.0, p) * binomial(p, q) * (q % 2 ? -1.0 : 1.0);
    for (int o = 1; o <= 12; ++o) {
        const auto& prev = phi.back();
        std::vector<double> next(prev.size() > 1 ? prev.size() - 1 : 1, 0.0);
        for (std::size_t i = 1; i < prev.size(); ++i)
            next[i - 1] = prev[i] * static_cast<double>(i);
        phi.push_back(std::move(next));
    }
    auto poly = [](const std::vector<double>& c, double t) {
        double s = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it)
            s = s * t + *it;
        return s;
    };

    TargetFunction f;
    f.name = "sparse-bump";
    f.d = d;
    f.k = k;
    f.v = v;
    f.max_order = 12;
    f.support = sup;
    const int N = sup.N;
    auto locate = [sup, d, N](const double* x) -> const MultiIndex* {
        for (const auto& c : sup.lambda) {
            bool in = true;
            for (int l = 0; l < d && in; ++l)
                in = x[l] >= cell_lower(c[l], N) && x[l] <= cell_upper(c[l], N);
            if (in)
                return &c;
        }
        return nullptr;
    };
    f.partial = [phi, poly, locate, d, N](const MultiIndex& a, const double* x) {
        const MultiIndex* c = locate(x);
        if (!c)
            return 0.0;
        double v = 1.0;
        for (int l = 0; l < d; ++l) {
            double t = N * x[l] - ((*c)[l] - 1);
            v *= std::pow(static_cast<double>(N), a[l]) * poly(phi[std::min<std::size_t>(a[l], phi.size() - 1)], t);
        }
        return v;
    };
    f.value = [g = f.partial, d](const double* x) { return g(MultiIndex(d, 0), x); };

    // Hoelder constant of the order-k partials, from the order-(k+1) bound
    double top = 0.0, kth = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        double t = i / 4000.0;
        top = std::max(top, std::abs(poly(phi[k + 1], t)));
        kth = std::max(kth, std::abs(poly(phi[k], t)));
    }
    double lip = std::sqrt(static_cast<double>(d)) * std::pow(static_cast<double>(N), k + 1) * top;
    f.c0 = v >= 1.0 ? lip : std::max(lip, 2.0 * std::pow(static_cast<double>(N), k) * kth);
    return f;
}

/// Target factory used by the CLI and the experiment drivers. r <= 0 selects the default.
inline TargetFunction make_target(const std::string& name, int d, double r = 0.0, const std::optional<SparseSupport>& sup = {})
{
    if (name == "affine") {
        require(r <= 0.0 || r == 1.0, "affine target has r = 1");
        return affine_target(d);
    }
    if (name == "quadratic") {
        require(r <= 0.0 || r == 2.0, "quadratic target has r = 2");
        return quadratic_target(d);
    }
    if (name == "sinprod") {
        double rr = r <= 0.0 ? 2.0 : r;
        require(rr == std::floor(rr) && rr >= 1.0, "sinprod needs an integer r >= 1");
        return sinprod_target(d, static_cast<int>(rr) - 1);
    }
    if (name == "frac-v") {
        double rr = r <= 0.0 ? 0.5 : r;
        return fracv_target(d, rr);
    }
    if (name == "sparse-bump") {
        require(sup.has_value(), "sparse-bump needs a support");
        return sparse_target(*sup, r <= 0.0 ? 1.0 : r, d);
    }
    throw Error("unknown target '" + name + "'");
}

/// Largest |f(x) - P_{x0}(x)| / |x - x0|^r over seeded pairs, global and local.
inline double fit_taylor_constant(const TargetFunction& f, std::uint64_t seed, int pairs = 4000)
{
    if (f.k == 0)
        return f.c0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = f.r();
    double best = 0.0;
    Point x(f.d), x0(f.d);
    for (int s = 0; s < pairs; ++s) {
        for (int l = 0; l < f.d; ++l)
            x0[l] = u(rng);
        double reach = s % 2 ? 0.1 : 1.0;
        for (int l = 0; l < f.d; ++l)
            x[l] = std::clamp(x0[l] + reach * (2.0 * u(rng) - 1.0), 0.0, 1.0);
        double dist = 0.0;
        for (int l = 0; l < f.d; ++l)
            dist += (x[l] - x0[l]) * (x[l] - x0[l]);
        dist = std::sqrt(dist);
        if (dist < 1e-6)
            continue;
        auto P = taylor_at(f, f.k, x0);
        best = std::max(best, std::abs(f(x) - P(x)) / std::pow(dist, r));
    }
    return best;
}

/// max |f| on roughly 10^4 grid points.
inline double measured_sup(const TargetFunction& f)
{
    int res = f.d == 1 ? 10000 : f.d == 2 ? 100 : f.d == 3 ? 22 : 10;
    double m = 0.0;
    for (const auto& x : unit_grid(f.d, res))
        m = std::max(m, std::abs(f(x)));
    return m;
}

} // namespace cdn
