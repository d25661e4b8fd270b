#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cdn/error.hpp"

namespace cdn {

enum class Kind { heaviside, logistic, tanh, gompertz, gaussian };

struct GompertzParams {
    double a = 1.0;
    double b = 1.0;
};

inline std::string kind_name(Kind k)
{
    switch (k) {
    case Kind::heaviside: return "heaviside";
    case Kind::logistic: return "logistic";
    case Kind::tanh: return "tanh";
    case Kind::gompertz: return "gompertz";
    case Kind::gaussian: return "gaussian";
    }
    return "?";
}

inline Kind parse_kind(const std::string& s)
{
    if (s == "heaviside") return Kind::heaviside;
    if (s == "logistic") return Kind::logistic;
    if (s == "tanh") return Kind::tanh;
    if (s == "gompertz") return Kind::gompertz;
    if (s == "gaussian") return Kind::gaussian;
    throw Error("unknown activation '" + s + "'");
}

namespace detail {

// Polynomial coefficients, lowest degree first.
using Poly = std::vector<double>;

inline double horner(const Poly& p, double x)
{
    double v = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        v = v * x + *it;
    return v;
}

inline Poly derive(const Poly& p)
{
    if (p.size() <= 1)
        return {0.0};
    Poly q(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i)
        q[i - 1] = p[i] * static_cast<double>(i);
    return q;
}

// logistic: sigma^(n) = P_n(s), P_{n+1} = P_n'(s) * (s - s^2)
inline std::vector<Poly> logistic_polys(int n_max)
{
    std::vector<Poly> out{{0.0, 1.0}};
    for (int n = 0; n < n_max; ++n) {
        Poly dp = derive(out.back());
        Poly next(dp.size() + 2, 0.0);
        for (std::size_t i = 0; i < dp.size(); ++i) {
            next[i + 1] += dp[i];
            next[i + 2] -= dp[i];
        }
        out.push_back(std::move(next));
    }
    return out;
}

// gompertz: sigma^(n) = sigma * R_n(z), z = a e^{-bt}, R_{n+1} = b z (R_n - R_n')
inline std::vector<Poly> gompertz_polys(int n_max, double b)
{
    std::vector<Poly> out{{1.0}};
    for (int n = 0; n < n_max; ++n) {
        const Poly& r = out.back();
        Poly dr = derive(r);
        Poly next(r.size() + 1, 0.0);
        for (std::size_t i = 0; i < r.size(); ++i)
            next[i + 1] += b * r[i];
        for (std::size_t i = 0; i < dr.size(); ++i)
            next[i + 1] -= b * dr[i];
        out.push_back(std::move(next));
    }
    return out;
}

// physicists' Hermite polynomials H_0..H_n
inline std::vector<Poly> hermite_polys(int n_max)
{
    std::vector<Poly> out{{1.0}, {0.0, 2.0}};
    for (int n = 1; n < n_max; ++n) {
        Poly next(n + 2, 0.0);
        for (std::size_t i = 0; i < out[n].size(); ++i)
            next[i + 1] += 2.0 * out[n][i];
        for (std::size_t i = 0; i < out[n - 1].size(); ++i)
            next[i] -= 2.0 * n * out[n - 1][i];
        out.push_back(std::move(next));
    }
    out.resize(static_cast<std::size_t>(n_max) + 1);
    return out;
}

inline double logistic(double t)
{
    return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

} // namespace detail

inline constexpr double noncritical_tau = 1e-8;
inline constexpr double noncritical_scan_lo = -3.0;
inline constexpr double noncritical_scan_hi = 3.0;
inline constexpr double noncritical_scan_step = 1e-2;

/// A Heaviside or sigmoidal activation with closed-form derivatives.
class ActivationSpec {
public:
    ActivationSpec() : ActivationSpec(make(Kind::logistic)) { }

    static ActivationSpec heaviside() { return ActivationSpec(Kind::heaviside, 0, {}, 0.0); }

    /// Builds the activation and locates b0 by the noncritical-point scan.
    static ActivationSpec make(Kind kind, int k0 = 5, GompertzParams g = {}, double tau = noncritical_tau);

    /// Rebuilds an activation with a known b0 (deserialization).
    static ActivationSpec restore(Kind kind, int k0, double b0, GompertzParams g = {})
    {
        return ActivationSpec(kind, k0, g, b0);
    }

    Kind kind() const { return kind_; }
    int k0() const { return k0_; }
    double b0() const { return b0_; }
    GompertzParams gompertz() const { return gp_; }
    std::string name() const { return kind_name(kind_); }
    bool sigmoidal() const { return kind_ == Kind::logistic || kind_ == Kind::tanh || kind_ == Kind::gompertz; }
    bool smooth() const { return kind_ != Kind::heaviside; }

    double deriv_sup_bound() const
    {
        switch (kind_) {
        case Kind::heaviside: return 0.0;
        case Kind::logistic: return 0.25;
        case Kind::tanh: return 0.5;
        case Kind::gompertz: return gp_.b / std::exp(1.0);
        case Kind::gaussian: return std::sqrt(2.0 / std::exp(1.0));
        }
        return 0.0;
    }

    // Highest derivative order with a closed form available.
    int max_order() const { return kind_ == Kind::heaviside ? 0 : k0_ + 1; }

    /// sigma^(order)(t) without the order guard.
    double derivative(int order, double t) const
    {
        switch (kind_) {
        case Kind::heaviside:
            return t >= 0.0 ? 1.0 : 0.0;
        case Kind::logistic:
            return order == 0 ? detail::logistic(t) : detail::horner(polys_.at(order), detail::logistic(t));
        case Kind::tanh: {
            double s = detail::logistic(2.0 * t);
            return order == 0 ? s : std::ldexp(detail::horner(polys_.at(order), s), order);
        }
        case Kind::gompertz: {
            double z = gp_.a * std::exp(-gp_.b * t);
            if (!(z < 700.0))
                return 0.0;
            return std::exp(-z) * detail::horner(polys_.at(order), z);
        }
        case Kind::gaussian: {
            double h = detail::horner(polys_.at(order), t);
            return (order % 2 ? -h : h) * std::exp(-t * t);
        }
        }
        return 0.0;
    }

    /// sigma(t) in extended precision, used by network evaluation.
    long double value(long double t) const
    {
        switch (kind_) {
        case Kind::heaviside: return t >= 0.0L ? 1.0L : 0.0L;
        case Kind::logistic: return 1.0L / (1.0L + std::exp(-t));
        case Kind::tanh: return 1.0L / (1.0L + std::exp(-2.0L * t));
        case Kind::gompertz:
            return std::exp(-static_cast<long double>(gp_.a) * std::exp(-static_cast<long double>(gp_.b) * t));
        case Kind::gaussian: return std::exp(-t * t);
        }
        return 0.0L;
    }

private:
    ActivationSpec(Kind kind, int k0, GompertzParams g, double b0)
        : kind_(kind), k0_(k0), b0_(b0), gp_(g)
    {
        require(k0 >= 0 && k0 <= 12, "k0 must lie in [0, 12]");
        if (kind == Kind::gompertz)
            require(g.a > 0 && g.b > 0, "gompertz parameters must be positive");
        int n = k0 + 1;
        switch (kind) {
        case Kind::logistic:
        case Kind::tanh: polys_ = detail::logistic_polys(n); break;
        case Kind::gompertz: polys_ = detail::gompertz_polys(n, g.b); break;
        case Kind::gaussian: polys_ = detail::hermite_polys(n); break;
        case Kind::heaviside: break;
        }
    }

    Kind kind_;
    int k0_;
    double b0_;
    GompertzParams gp_;
    std::vector<detail::Poly> polys_;
};

/// Checked derivative evaluation.
inline double eval_derivative(const ActivationSpec& act, int order, double t)
{
    require(order >= 0, "negative derivative order");
    if (act.kind() == Kind::heaviside)
        require(order == 0, "heaviside has no derivatives");
    else
        require(order <= act.k0() + 1, "derivative order exceeds k0+1");
    return act.derivative(order, t);
}

/// Scans [-3,3] for the point maximizing min_{j<=k0} |sigma^(j)|.
inline double noncritical_point(const ActivationSpec& act, int k0, double tau = noncritical_tau)
{
    require(act.smooth(), "no noncritical point found");
    require(k0 <= act.k0() + 1, "derivative order exceeds k0+1");
    int steps = static_cast<int>(std::lround((noncritical_scan_hi - noncritical_scan_lo) / noncritical_scan_step));
    double best = -1.0, best_b = 0.0;
    for (int i = 0; i <= steps; ++i) {
        double b = noncritical_scan_lo + i * noncritical_scan_step;
        double worst = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= k0; ++j)
            worst = std::min(worst, std::abs(act.derivative(j, b)));
        if (worst > best) {
            best = worst;
            best_b = b;
        }
    }
    if (best < tau)
        throw Error("no noncritical point found");
    return best_b;
}

inline ActivationSpec ActivationSpec::make(Kind kind, int k0, GompertzParams g, double tau)
{
    if (kind == Kind::heaviside)
        return heaviside();
    ActivationSpec a(kind, k0, g, 0.0);
    a.b0_ = noncritical_point(a, k0, tau);
    return a;
}

/// max over [b0-1, b0+1] of |sigma^(num)| divided by |sigma^(den)(b0)|.
inline double derivative_ratio(const ActivationSpec& act, int num, int den, int samples = 10000)
{
    require(num <= act.k0() + 1, "derivative order exceeds k0+1");
    double denom = std::abs(act.derivative(den, act.b0()));
    if (denom < 1e-12)
        throw Error("critical denominator");
    double mx = 0.0;
    for (int i = 0; i < samples; ++i) {
        double xi = act.b0() - 1.0 + 2.0 * i / (samples - 1);
        mx = std::max(mx, std::abs(act.derivative(num, xi)));
    }
    return mx / denom;
}

/// M_m: max |sigma^(m+1)| on [b0-1, b0+1] over |sigma^(m)(b0)|.
inline double curvature_ratio(const ActivationSpec& act, int m, int samples = 10000)
{
    return derivative_ratio(act, m + 1, m, samples);
}

namespace detail {

inline double tail_closed_form(const ActivationSpec& act, double eps)
{
    switch (act.kind()) {
    case Kind::logistic: return std::log((1.0 - eps) / eps);
    case Kind::tanh: return 0.5 * std::log((1.0 - eps) / eps);
    case Kind::gompertz: {
        auto g = act.gompertz();
        double upper = std::log(g.a / -std::log1p(-eps)) / g.b;
        double lower = std::log(-std::log(eps) / g.a) / g.b;
        return std::max(upper, lower);
    }
    default: throw Error("no sigmoidal tails");
    }
}

inline bool tails_hold(const ActivationSpec& act, double K, double eps)
{
    return act.derivative(0, K) >= 1.0 - eps && act.derivative(0, -K) <= eps;
}

} // namespace detail

/// Bisection for the smallest K with both tail conditions; independent of the closed forms.
inline double tail_threshold_bisect(const ActivationSpec& act, double eps, double tol = 1e-12)
{
    require(act.sigmoidal(), "no sigmoidal tails");
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    if (detail::tails_hold(act, 0.0, eps))
        return 0.0;
    double lo = 0.0, hi = 1.0;
    while (!detail::tails_hold(act, hi, eps)) {
        lo = hi;
        hi *= 2.0;
        require(hi < 1e6, "no sigmoidal tails");
    }
    while (hi - lo > tol * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        (detail::tails_hold(act, mid, eps) ? hi : lo) = mid;
    }
    return hi;
}

/// K_eps: closed form, then nudged up until both tails hold in floating point.
inline double tail_threshold(const ActivationSpec& act, double eps)
{
    require(act.sigmoidal(), "no sigmoidal tails");
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    double K = std::max(0.0, detail::tail_closed_form(act, eps));
    for (int i = 0; i < 64 && !detail::tails_hold(act, K, eps); ++i)
        K = std::nextafter(K, std::numeric_limits<double>::infinity());
    while (!detail::tails_hold(act, K, eps))
        K = K * (1.0 + 1e-12) + 1e-300;
    return K;
}

} // namespace cdn
