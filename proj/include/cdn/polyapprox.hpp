#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cdn/activation.hpp"
#include "cdn/error.hpp"
#include "cdn/network.hpp"
#include "cdn/ridge.hpp"

namespace cdn {

/// Neuron coeff * sigma(scale * (w_i . x) + bias).
struct Neuron {
    std::size_t direction = 0;
    double scale = 0.0;
    double coeff = 0.0;
    double bias = 0.0;
};

struct PeelState {
    int level = 0;
    std::vector<std::vector<double>> coeffs; // coeffs[i][j]
    std::vector<double> deltas;              // per degree, 0 until peeled
    std::vector<double> remainder;           // certified error of each peeled level
    std::vector<Neuron> outer;
};

enum class PeelScheme {
    sequential, // one neuron per direction, lower degrees rewritten
    centered    // centered j-th difference stencil, lower degrees untouched
};

inline PeelState make_peel_state(const RidgeDecomposition& dec)
{
    PeelState s;
    s.level = dec.m;
    s.coeffs = dec.coeffs;
    s.deltas.assign(dec.m + 1, 0.0);
    s.remainder.assign(dec.m + 1, 0.0);
    return s;
}

namespace detail {

inline double top_mass(const PeelState& s)
{
    double S = 0.0;
    for (const auto& row : s.coeffs)
        S += std::abs(row[s.level]);
    return S;
}

} // namespace detail

/// Replaces the top-degree ridge monomials by one scaled neuron per direction
/// and rewrites the lower-degree coefficients.
inline PeelState peel_top_degree(PeelState state, const ActivationSpec& act, double eps_level)
{
    require(state.level >= 1, "nothing left to peel");
    require(eps_level > 0.0, "eps must be positive");
    const int m = state.level;
    const double S = detail::top_mass(state);
    if (S == 0.0) {
        state.level = m - 1;
        return state;
    }
    const double M = curvature_ratio(act, m);
    double delta = std::min({1.0, eps_level / M, eps_level / (S * M)});
    if (!(delta >= 1e-300))
        throw Error("epsilon too small for degree");
    const double sm = act.derivative(m, act.b0());
    const double norm = factorial(m) / (std::pow(delta, m) * sm);
    if (!std::isfinite(norm))
        throw Error("epsilon too small for degree");

    std::vector<double> lower(m);
    for (int j = 0; j < m; ++j)
        lower[j] = act.derivative(j, act.b0()) * std::pow(delta, j) / factorial(j);

    for (std::size_t i = 0; i < state.coeffs.size(); ++i) {
        double c = state.coeffs[i][m];
        if (c == 0.0)
            continue;
        double a = c * norm;
        state.outer.push_back({i, delta, a, act.b0()});
        for (int j = 0; j < m; ++j)
            state.coeffs[i][j] -= a * lower[j];
        state.coeffs[i][m] = 0.0;
    }
    state.deltas[m] = delta;
    state.remainder[m] = delta * M * S;
    state.level = m - 1;
    return state;
}

/// Bias for a centered j-th difference: a zero of sigma^(j+2) where |sigma^(j)| is
/// at least a quarter of its peak, so the stencil error is fourth order in delta.
/// Falls back to b0 when the needed derivatives are unavailable or no zero qualifies.
inline double stencil_bias(const ActivationSpec& act, int j, double tau = noncritical_tau)
{
    if (act.k0() + 1 < j + 2)
        return act.b0();
    const int steps = static_cast<int>(std::lround((noncritical_scan_hi - noncritical_scan_lo) / noncritical_scan_step));
    auto at = [&](int i) { return noncritical_scan_lo + i * noncritical_scan_step; };
    double peak = 0.0;
    for (int i = 0; i <= steps; ++i)
        peak = std::max(peak, std::abs(act.derivative(j, at(i))));
    auto admissible = [&](double b) {
        for (int q = 0; q <= j + 1; ++q)
            if (std::abs(act.derivative(q, b)) < tau)
                return false;
        return std::abs(act.derivative(j, b)) >= 0.25 * peak;
    };
    auto cost = [&](double b) { return std::abs(act.derivative(j + 2, b)) / std::abs(act.derivative(j, b)); };
    int best = -1;
    for (int i = 0; i <= steps; ++i)
        if (admissible(at(i)) && (best < 0 || cost(at(i)) < cost(at(best))))
            best = i;
    if (best < 0)
        return act.b0();
    double b = at(best);
    // refine onto a sign change of sigma^(j+2) next to the grid minimizer
    for (int side : {-1, 1}) {
        double lo = b, hi = b + side * noncritical_scan_step;
        double flo = act.derivative(j + 2, lo), fhi = act.derivative(j + 2, hi);
        if (flo == 0.0)
            return lo;
        if ((flo < 0) == (fhi < 0) || !admissible(hi))
            continue;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = act.derivative(j + 2, mid);
            if ((fm < 0) == (flo < 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    return b;
}

/// Bias for the square gate; the j = 2 case of stencil_bias.
inline double gate_bias(const ActivationSpec& act, double tau = noncritical_tau)
{
    return stencil_bias(act, 2, tau);
}

namespace detail {

inline constexpr int stencil_check_points = 1001;

// Max over t in [-1,1] of |unit-coefficient stencil - t^j|, with weights rounded as stored.
inline double stencil_error(const ActivationSpec& act, int j, double delta, double bias)
{
    const double norm = 1.0 / (std::pow(delta, j) * act.derivative(j, bias));
    std::vector<double> w(j + 1), sc(j + 1);
    for (int l = 0; l <= j; ++l) {
        w[l] = (l % 2 ? -1.0 : 1.0) * binomial(j, l) * norm;
        sc[l] = (0.5 * j - l) * delta;
    }
    double e = 0.0;
    for (int i = 0; i < stencil_check_points; ++i) {
        const double t = -1.0 + 2.0 * i / (stencil_check_points - 1);
        Accumulator acc;
        for (int l = 0; l <= j; ++l)
            acc.add(static_cast<long double>(w[l]) * act.value(static_cast<long double>(sc[l] * t) + bias));
        e = std::max(e, static_cast<double>(std::fabs(acc.value() - std::pow(static_cast<long double>(t), j))));
    }
    return e;
}

// Largest delta in (0, start] found by halving then bisecting with error(delta) <= target.
template <class F>
double measured_scale(F&& error, double start, double target)
{
    double lo = start, hi = start;
    while (!(error(lo) <= target)) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-8)
            throw Error("epsilon too small for degree");
    }
    for (int it = 0; it < 60 && hi - lo > 1e-6 * lo; ++it) {
        double mid = 0.5 * (lo + hi);
        (error(mid) <= target ? lo : hi) = mid;
    }
    return lo;
}

} // namespace detail

/// Centered-difference peel: nodes (j/2 - l) delta, weights (-1)^l binom(j, l).
/// The stencil annihilates every degree below j, so lower coefficients are unchanged.
/// With a stencil bias available, delta is the largest scale whose measured error fits.
inline PeelState peel_top_degree_centered(PeelState state, const ActivationSpec& act, double eps_level)
{
    require(state.level >= 1, "nothing left to peel");
    require(eps_level > 0.0, "eps must be positive");
    const int j = state.level;
    const double S = detail::top_mass(state);
    if (S == 0.0) {
        state.level = j - 1;
        return state;
    }
    const double bias = stencil_bias(act, j);
    const double start = std::min(1.0, 2.0 / j);
    double delta, remainder;
    if (bias != act.b0()) {
        auto err = [&](double dl) { return detail::stencil_error(act, j, dl, bias); };
        delta = detail::measured_scale(err, start, eps_level / S);
        remainder = S * err(delta);
    } else {
        const double M2 = derivative_ratio(act, j + 2, j);
        delta = start;
        if (M2 > 0.0)
            delta = std::min(delta, std::sqrt(24.0 * eps_level / (j * M2 * S)));
        remainder = (j / 24.0) * delta * delta * M2 * S;
    }
    if (!(delta >= 1e-300))
        throw Error("epsilon too small for degree");
    const double norm = 1.0 / (std::pow(delta, j) * act.derivative(j, bias));
    if (!std::isfinite(norm))
        throw Error("epsilon too small for degree");

    for (std::size_t i = 0; i < state.coeffs.size(); ++i) {
        double c = state.coeffs[i][j];
        if (c == 0.0)
            continue;
        double g = c * norm;
        for (int l = 0; l <= j; ++l) {
            double w = (l % 2 ? -1.0 : 1.0) * binomial(j, l);
            state.outer.push_back({i, (0.5 * j - l) * delta, g * w, bias});
        }
        state.coeffs[i][j] = 0.0;
    }
    state.deltas[j] = delta;
    state.remainder[j] = remainder;
    state.level = j - 1;
    return state;
}

struct PolyNetOptions {
    PeelScheme scheme = PeelScheme::centered;
    bool verify = true;
};

struct PolyNet {
    NetworkGraph net;   // one hidden layer over x
    PeelState state;    // after all peels
    double bound = 0.0; // sum of certified level remainders
    double measured = 0.0;
};

inline int verify_resolution(int d)
{
    switch (d) {
    case 1: return 1001;
    case 2: return 31;
    case 3: return 11;
    default: return 5;
    }
}

/// Shallow sigmoid net approximating a ridge-decomposed polynomial within eps.
inline PolyNet polynomial_net(const RidgeDecomposition& dec, const ActivationSpec& act, double eps, PolyNetOptions opt = {})
{
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    require(act.smooth(), "polynomial nets need a smooth activation");
    require(dec.residual <= eps / 10.0, "decomposition residual exceeds eps/10");
    const double eps_level = eps / (dec.m + 1);

    PolyNet out;
    out.state = make_peel_state(dec);
    while (out.state.level >= 1)
        out.state = opt.scheme == PeelScheme::centered ? peel_top_degree_centered(std::move(out.state), act, eps_level)
                                                       : peel_top_degree(std::move(out.state), act, eps_level);
    for (double r : out.state.remainder)
        out.bound += r;

    NetworkGraph net(dec.d, act);
    Layer layer;
    for (const Neuron& nr : out.state.outer) {
        Unit u;
        u.bias = nr.bias;
        if (nr.scale != 0.0)
            for (int l = 0; l < dec.d; ++l)
                u.connect(l, nr.scale * dec.directions[nr.direction][l]);
        layer.units.push_back(std::move(u));
        net.output.push_back(nr.coeff);
    }
    double p0 = 0.0;
    for (const auto& row : out.state.coeffs)
        p0 += row[0];
    if (p0 != 0.0) {
        Unit u;
        u.bias = act.b0();
        layer.units.push_back(std::move(u));
        net.output.push_back(p0 / act.derivative(0, act.b0()));
    }
    net.layers.push_back(std::move(layer));
    out.net = std::move(net);

    if (opt.verify) {
        double err = 0.0;
        for (const auto& x : unit_grid(dec.d, verify_resolution(dec.d)))
            err = std::max(err, std::abs(ridge_eval(dec, x) - forward(out.net, x)));
        out.measured = err;
        if (!(err <= eps))
            throw Error("polynomial net exceeds tolerance");
    }
    return out;
}

/// Three-neuron approximation of t^2 on [-1,1].
struct SquareGate {
    NetworkGraph h3;
    double delta = 0.0;
    double bias = 0.0;
    double range_bound = 0.0;    // measured on the check grid
    double analytic_bound = 0.0; // delta^2 M / 12
    double eps = 0.0;

    double operator()(double t) const { return forward(h3, {t}); }
};

inline constexpr int gate_check_points = 1001;

namespace detail {

inline NetworkGraph gate_network(const ActivationSpec& act, double delta, double bias)
{
    NetworkGraph net(1, act);
    Layer layer;
    const double c = 1.0 / (delta * delta * act.derivative(2, bias));
    for (double s : {delta, 0.0, -delta}) {
        Unit u;
        u.bias = bias;
        u.connect(0, s);
        layer.units.push_back(std::move(u));
    }
    net.layers.push_back(std::move(layer));
    net.output = {c, -2.0 * c, c};
    return net;
}

inline double gate_error(const NetworkGraph& net)
{
    double e = 0.0;
    for (int i = 0; i < gate_check_points; ++i) {
        double t = -1.0 + 2.0 * i / (gate_check_points - 1);
        e = std::max(e, std::abs(forward(net, {t}) - t * t));
    }
    return e;
}

} // namespace detail

/// Centered second difference of sigma at the gate bias, delta chosen as large as
/// the measured error bound eps/4 on [-1,1] allows.
inline SquareGate square_gate(const ActivationSpec& act, double eps)
{
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    require(act.smooth() && act.k0() + 1 >= 4, "square gate needs sigma derivatives up to order 4");
    SquareGate g;
    g.eps = eps;
    g.bias = gate_bias(act);
    require(std::abs(act.derivative(2, g.bias)) >= noncritical_tau, "square gate needs sigma''(b) != 0");
    const double target = eps / 4.0;
    double M = 0.0;
    for (int i = 0; i < 10000; ++i)
        M = std::max(M, std::abs(act.derivative(4, g.bias - 1.0 + 2.0 * i / 9999.0)));
    M /= std::abs(act.derivative(2, g.bias));
    auto err = [&](double delta) { return detail::gate_error(detail::gate_network(act, delta, g.bias)); };

    // walk down from delta = 1 to the first passing scale, then bisect upwards
    double lo = 1.0, hi = 1.0;
    while (err(lo) > target) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-8)
            throw Error("square gate cannot reach the requested tolerance");
    }
    for (int it = 0; it < 60 && hi - lo > 1e-6 * lo; ++it) {
        double mid = 0.5 * (lo + hi);
        (err(mid) <= target ? lo : hi) = mid;
    }
    g.delta = lo;
    g.h3 = detail::gate_network(act, g.delta, g.bias);
    g.range_bound = detail::gate_error(g.h3);
    g.analytic_bound = g.delta * g.delta * M / 12.0;
    return g;
}

/// 2 h3((u1+u2)/2) - h3(u1)/2 - h3(u2)/2, approximately u1*u2.
inline double product_combine(const SquareGate& gate, double u1, double u2)
{
    if (!(std::abs(u1) <= 1.0 && std::abs(u2) <= 1.0))
        throw Error("product gate domain");
    return 2.0 * gate(0.5 * (u1 + u2)) - 0.5 * gate(u1) - 0.5 * gate(u2);
}

} // namespace cdn
