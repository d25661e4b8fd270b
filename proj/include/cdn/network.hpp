#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "cdn/activation.hpp"
#include "cdn/error.hpp"

namespace cdn {

enum class UnitAct : std::uint8_t { identity, heaviside, sigma };

/// One unit: sparse incoming connections, a bias and an activation tag.
struct Unit {
    std::vector<std::uint32_t> src;
    std::vector<double> w;
    double bias = 0.0;
    UnitAct act = UnitAct::sigma;

    /// Adds a connection; exact zeros are structural and never stored.
    void connect(std::size_t from, double weight)
    {
        if (weight != 0.0) {
            src.push_back(static_cast<std::uint32_t>(from));
            w.push_back(weight);
        }
    }
};

struct Layer {
    std::vector<Unit> units;

    std::size_t width() const { return units.size(); }
};

/// Layered network with heterogeneous unit activations and a linear read-out.
struct NetworkGraph {
    int d = 1;
    ActivationSpec sigma;
    std::vector<Layer> layers;
    std::vector<double> output;
    nlohmann::json meta = nlohmann::json::object();

    NetworkGraph() = default;
    NetworkGraph(int dim, ActivationSpec act) : d(dim), sigma(std::move(act)) { }

    std::size_t width(std::size_t layer) const { return layer == 0 ? static_cast<std::size_t>(d) : layers[layer - 1].width(); }
};

struct ParamAudit {
    std::size_t count = 0;
    double max_abs = 0.0;
    std::vector<double> per_layer_max;
};

namespace detail {

// Neumaier compensated accumulator in extended precision.
struct Accumulator {
    long double s = 0.0L;
    long double c = 0.0L;

    void add(long double v)
    {
        long double t = s + v;
        if (std::fabs(s) >= std::fabs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }

    long double value() const { return s + c; }
};

} // namespace detail

/// Checks index ranges and array shapes.
inline void validate(const NetworkGraph& net)
{
    require(net.d >= 1, "network dimension must be positive");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        std::size_t fan = net.width(l);
        for (const auto& u : net.layers[l].units) {
            require(u.src.size() == u.w.size(), "connection arrays differ in length");
            for (auto s : u.src)
                require(s < fan, "connection source out of range");
            if (u.act == UnitAct::sigma)
                require(net.sigma.smooth(), "sigma units need a smooth activation");
        }
    }
    require(net.output.size() == net.width(net.layers.size()), "output weights do not match last layer width");
}

inline long double activate(const NetworkGraph& net, UnitAct a, long double t)
{
    switch (a) {
    case UnitAct::identity: return t;
    case UnitAct::heaviside: return t >= 0.0L ? 1.0L : 0.0L;
    case UnitAct::sigma: return net.sigma.value(t);
    }
    return t;
}

/// Evaluates the network; sums are compensated and carried in long double.
inline double forward(const NetworkGraph& net, std::span<const double> x)
{
    if (x.size() != static_cast<std::size_t>(net.d))
        throw Error("dimension mismatch");
    std::vector<long double> prev(x.begin(), x.end()), cur;
    for (const auto& layer : net.layers) {
        cur.assign(layer.units.size(), 0.0L);
        for (std::size_t u = 0; u < layer.units.size(); ++u) {
            const Unit& unit = layer.units[u];
            detail::Accumulator acc;
            for (std::size_t i = 0; i < unit.src.size(); ++i)
                acc.add(static_cast<long double>(unit.w[i]) * prev[unit.src[i]]);
            acc.add(unit.bias);
            cur[u] = activate(net, unit.act, acc.value());
        }
        prev.swap(cur);
    }
    detail::Accumulator out;
    for (std::size_t i = 0; i < net.output.size(); ++i)
        out.add(static_cast<long double>(net.output[i]) * prev[i]);
    return static_cast<double>(out.value());
}

inline double forward(const NetworkGraph& net, const std::vector<double>& x)
{
    return forward(net, std::span<const double>(x));
}

inline double forward(const NetworkGraph& net, std::initializer_list<double> x)
{
    return forward(net, std::span<const double>(x.begin(), x.size()));
}

/// Counts stored weights, biases and output weights.
inline ParamAudit audit(const NetworkGraph& net)
{
    ParamAudit a;
    for (const auto& layer : net.layers) {
        double m = 0.0;
        for (const auto& u : layer.units) {
            a.count += u.w.size() + 1;
            m = std::max(m, std::abs(u.bias));
            for (double w : u.w)
                m = std::max(m, std::abs(w));
        }
        a.per_layer_max.push_back(m);
        a.max_abs = std::max(a.max_abs, m);
    }
    double m = 0.0;
    for (double w : net.output)
        m = std::max(m, std::abs(w));
    a.count += net.output.size();
    a.per_layer_max.push_back(m);
    a.max_abs = std::max(a.max_abs, m);
    return a;
}

/// Number of layers holding at least one non-identity unit.
inline int nonlinear_depth(const NetworkGraph& net)
{
    int depth = 0;
    for (const auto& layer : net.layers)
        if (std::any_of(layer.units.begin(), layer.units.end(), [](const Unit& u) { return u.act != UnitAct::identity; }))
            ++depth;
    return depth;
}

/// Depth 3, Heaviside-only nonlinear units in the first layer, sigmoid units after.
inline bool has_three_layer_layout(const NetworkGraph& net)
{
    if (net.layers.size() != 3 || nonlinear_depth(net) != 3)
        return false;
    for (const auto& u : net.layers[0].units)
        if (u.act == UnitAct::sigma)
            return false;
    for (std::size_t l = 1; l < 3; ++l)
        for (const auto& u : net.layers[l].units)
            if (u.act != UnitAct::sigma)
                return false;
    return true;
}

} // namespace cdn
