#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cdn/activation.hpp"
#include "cdn/error.hpp"
#include "cdn/network.hpp"
#include "cdn/partition.hpp"
#include "cdn/polyapprox.hpp"
#include "cdn/ridge.hpp"
#include "cdn/targets.hpp"

namespace cdn {

enum class IndicatorForm {
    lower_index, // cells (a, b] with the first cell closed at 0: one cell per point
    closed       // closed cells [a, b]: boundary points light up both neighbours
};

namespace detail {

// Heaviside units for one cell plus the weights and bias of the sigmoid unit reading them.
struct IndicatorParts {
    std::vector<Unit> steps;
    std::vector<double> gain;
    double bias = 0.0;
};

inline IndicatorParts indicator_parts(const CubicPartition& p, const MultiIndex& j, double K, IndicatorForm form,
                                      const std::vector<std::size_t>& x_source)
{
    // Small margin so rounding in the argument sum never pulls it below K.
    const double g = 2.0 * (K * (1.0 + 1e-9) + 1e-12);
    IndicatorParts parts;
    int flipped = 0;
    for (int l = 0; l < p.d; ++l) {
        const double a = cell_lower(j[l], p.n), b = cell_upper(j[l], p.n);
        Unit upper; // [x <= b]
        upper.act = UnitAct::heaviside;
        upper.connect(x_source[l], -1.0);
        upper.bias = b;
        parts.steps.push_back(std::move(upper));
        parts.gain.push_back(g);

        Unit lower;
        lower.act = UnitAct::heaviside;
        if (form == IndicatorForm::lower_index && j[l] > 1) {
            // [x > a] = 1 - [x <= a]
            lower.connect(x_source[l], -1.0);
            lower.bias = a;
            parts.gain.push_back(-g);
            ++flipped;
        } else {
            // [x >= a]
            lower.connect(x_source[l], 1.0);
            lower.bias = -a;
            parts.gain.push_back(g);
        }
        parts.steps.push_back(std::move(lower));
    }
    parts.bias = g * (0.5 - 2.0 * p.d + flipped);
    return parts;
}

inline std::vector<std::size_t> iota_sources(int d, std::size_t base = 0)
{
    std::vector<std::size_t> s(d);
    for (int l = 0; l < d; ++l)
        s[l] = base + l;
    return s;
}

} // namespace detail

/// Two-hidden-layer localized indicator of cell j.
inline NetworkGraph indicator_net(const CubicPartition& p, const MultiIndex& j, double eps, const ActivationSpec& act,
                                  IndicatorForm form = IndicatorForm::lower_index)
{
    require(act.sigmoidal(), "no sigmoidal tails");
    center(p, j); // range check
    const double K = tail_threshold(act, eps);
    auto parts = detail::indicator_parts(p, j, K, form, detail::iota_sources(p.d));
    NetworkGraph net(p.d, act);
    Layer l1, l2;
    Unit s;
    for (std::size_t i = 0; i < parts.steps.size(); ++i) {
        l1.units.push_back(parts.steps[i]);
        s.connect(i, parts.gain[i]);
    }
    s.bias = parts.bias;
    l2.units.push_back(std::move(s));
    net.layers = {std::move(l1), std::move(l2)};
    net.output = {1.0};
    return net;
}

/// Sum over cells of Taylor polynomial times indicator, evaluated directly.
class PhiReference {
public:
    PhiReference(const TargetFunction& f, const CubicPartition& p, double eps, const ActivationSpec& act,
                 IndicatorForm form = IndicatorForm::lower_index)
        : d_(p.d)
    {
        require(f.d == p.d, "dimension mismatch");
        for (const auto& j : p.cells()) {
            taylor_.push_back(taylor_at(f, f.k, center(p, j)));
            nets_.push_back(indicator_net(p, j, eps, act, form));
        }
    }

    double operator()(const Point& x) const
    {
        if (!in_unit_cube(x))
            throw Error("point outside domain");
        long double s = 0.0L;
        for (std::size_t c = 0; c < nets_.size(); ++c)
            s += static_cast<long double>(taylor_[c](x)) * forward(nets_[c], x);
        return static_cast<double>(s);
    }

private:
    int d_;
    std::vector<TaylorPolynomial> taylor_;
    std::vector<NetworkGraph> nets_;
};

inline double phi_reference(const TargetFunction& f, const CubicPartition& p, double eps, const ActivationSpec& act,
                            const Point& x)
{
    return PhiReference(f, p, eps, act)(x);
}

struct BuildOptions {
    std::uint64_t seed = 1;
    bool prune = false;
    IndicatorForm form = IndicatorForm::lower_index;
    PeelScheme scheme = PeelScheme::centered;
    bool floors = true;       // clamp the inner tolerances at the roundoff floors below
    double gate_floor = 1e-9; // smallest square-gate tolerance
    int fit_pairs = 4000;     // sample pairs for the Taylor constant
};

/// Smallest polynomial-net tolerance that extended-precision evaluation supports for degree k.
inline double poly_floor(int k)
{
    const double u = LDBL_EPSILON / 2.0;
    return 100.0 * std::pow(u, 2.0 / (k + 2));
}

struct DeepNetMeta {
    int n = 0;
    int d = 0;
    double eps = 0.0;
    double K_eps = 0.0;
    double B = 0.0;
    int k = 0;
    double r = 0.0;
    std::size_t L = 0;
    std::size_t n_tilde = 0;
    std::string builder;
    double gate_eps = 0.0;
    double poly_eps = 0.0;
    double c1_tilde = 0.0;
    double f_sup = 0.0;
    std::uint64_t seed = 0;
    bool prune = false;
};

struct DeepNetBundle {
    NetworkGraph net;
    DeepNetMeta meta;
    ParamAudit audit;
    SquareGate gate;
};

inline nlohmann::json to_json(const DeepNetMeta& m)
{
    return {{"n", m.n},
            {"d", m.d},
            {"eps", m.eps},
            {"K_eps", m.K_eps},
            {"B", m.B},
            {"k", m.k},
            {"r", m.r},
            {"L", m.L},
            {"n_tilde", m.n_tilde},
            {"builder", m.builder},
            {"gate_eps", m.gate_eps},
            {"poly_eps", m.poly_eps},
            {"c1_tilde", m.c1_tilde},
            {"f_sup", m.f_sup},
            {"seed", m.seed},
            {"prune", m.prune}};
}

inline int check_resolution(int d)
{
    switch (d) {
    case 1: return 1001;
    case 2: return 101;
    case 3: return 21;
    default: return 5;
    }
}

namespace detail {

// Shared assembly for the smooth and the sparse builder.
inline DeepNetBundle assemble(const TargetFunction& f, const CubicPartition& p, double eps, const ActivationSpec& act,
                              const BuildOptions& opt, double B_factor, const std::string& builder,
                              const std::set<MultiIndex>* taylor_cells)
{
    require(f.d == p.d, "dimension mismatch");
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    require(act.sigmoidal(), "no sigmoidal tails");
    const int d = p.d, k = f.k;

    DeepNetMeta meta;
    meta.n = p.n;
    meta.d = d;
    meta.eps = eps;
    meta.k = k;
    meta.r = f.r();
    meta.builder = builder;
    meta.seed = opt.seed;
    meta.prune = taylor_cells != nullptr;
    meta.K_eps = tail_threshold(act, eps);
    meta.f_sup = measured_sup(f);
    meta.c1_tilde = fit_taylor_constant(f, opt.seed, opt.fit_pairs);
    // |x - eta|^r reaches d^(r/2) on the cube, which the normalizer has to absorb for d > 1
    meta.B = B_factor * (meta.f_sup + meta.c1_tilde * std::pow(static_cast<double>(d), 0.5 * meta.r) + 1.0);
    meta.gate_eps = opt.floors ? std::max(eps, opt.gate_floor) : eps;
    meta.poly_eps = opt.floors ? std::max(2.0 * eps, poly_floor(k)) : 2.0 * eps;
    require(meta.poly_eps < 1.0, "polynomial tolerance must lie in (0,1)");

    const double B = meta.B;
    const auto dirs = choose_directions(k, d, opt.seed);
    meta.L = dirs.size();
    SquareGate gate = square_gate(act, meta.gate_eps);
    const auto& gate_units = gate.h3.layers[0].units;
    const auto& gate_out = gate.h3.output;

    NetworkGraph net(d, act);
    Layer l1, l2, l3;
    std::vector<double> out;
    const auto grid = unit_grid(d, check_resolution(d));

    for (const auto& j : p.cells()) {
        const Point eta = center(p, j);
        Polynomial P(d);
        if (!taylor_cells || taylor_cells->count(j)) {
            P = taylor_at(f, k, eta).global();
            P *= 1.0 / B;
        }
        double sup_p = 0.0;
        for (const auto& x : grid)
            sup_p = std::max(sup_p, std::abs(P(x)));
        if (sup_p + meta.poly_eps > 0.5)
            throw Error("gate domain: Taylor branch of cell " + format_index(j) + " reaches " +
                        std::to_string(sup_p + meta.poly_eps) + " > 1/2");
        auto dec = decompose(P, dirs, ridge_tolerance, k);
        auto poly = polynomial_net(dec, act, meta.poly_eps, {opt.scheme, true});

        // layer 1: identity channels for x, then the cell's Heaviside units
        const std::size_t id_base = l1.width();
        for (int l = 0; l < d; ++l) {
            Unit u;
            u.act = UnitAct::identity;
            u.connect(l, 1.0);
            l1.units.push_back(std::move(u));
        }
        auto parts = indicator_parts(p, j, meta.K_eps, opt.form, iota_sources(d));
        const std::size_t step_base = l1.width();
        for (auto& s : parts.steps)
            l1.units.push_back(std::move(s));

        // layer 2: indicator unit, then the polynomial-net units over the identity channels
        const std::size_t ind = l2.width();
        {
            Unit s;
            for (std::size_t i = 0; i < parts.gain.size(); ++i)
                s.connect(step_base + i, parts.gain[i]);
            s.bias = parts.bias;
            l2.units.push_back(std::move(s));
        }
        const std::size_t poly_base = l2.width();
        for (const auto& pu : poly.net.layers[0].units) {
            Unit u;
            for (std::size_t i = 0; i < pu.src.size(); ++i)
                u.connect(id_base + pu.src[i], pu.w[i]);
            u.bias = pu.bias;
            l2.units.push_back(std::move(u));
        }
        const auto& a = poly.net.output;

        // layer 3: three square gates on h/2 + N/(2B), h and N/B
        struct GateInput {
            double on_poly, on_ind, lambda;
        };
        const GateInput inputs[3] = {{0.5, 0.5 / B, 2.0}, {1.0, 0.0, -0.5}, {0.0, 1.0 / B, -0.5}};
        for (const auto& in : inputs) {
            for (std::size_t gu = 0; gu < gate_units.size(); ++gu) {
                const double s = gate_units[gu].w.empty() ? 0.0 : gate_units[gu].w[0];
                Unit u;
                if (s != 0.0) {
                    u.connect(ind, s * in.on_ind);
                    for (std::size_t i = 0; i < a.size(); ++i)
                        u.connect(poly_base + i, s * in.on_poly * a[i]);
                }
                u.bias = gate_units[gu].bias;
                l3.units.push_back(std::move(u));
                out.push_back(B * B * in.lambda * gate_out[gu]);
            }
        }
    }

    net.layers = {std::move(l1), std::move(l2), std::move(l3)};
    net.output = std::move(out);
    validate(net);

    DeepNetBundle bundle;
    bundle.audit = audit(net);
    meta.n_tilde = bundle.audit.count;
    net.meta = to_json(meta);
    bundle.net = std::move(net);
    bundle.meta = meta;
    bundle.gate = std::move(gate);
    return bundle;
}

} // namespace detail

/// Three-hidden-layer net for a smooth target, normalizer B = 4(sup|f| + c1 d^(r/2) + 1).
inline DeepNetBundle build_deep_net(const TargetFunction& f, const CubicPartition& p, double eps, const ActivationSpec& act,
                                    std::uint64_t seed = 1, BuildOptions opt = {})
{
    opt.seed = seed;
    return detail::assemble(f, p, eps, act, opt, 4.0, "smooth", nullptr);
}

/// Three-hidden-layer net for a sparse target, normalizer B = 2(sup|f| + c1 d^(r/2) + 1).
/// With prune, only cells touching the support carry a Taylor branch.
inline DeepNetBundle build_sparse_deep_net(const TargetFunction& f, const CubicPartition& p, double eps,
                                           const ActivationSpec& act, std::uint64_t seed = 1, bool prune = false,
                                           BuildOptions opt = {})
{
    require(f.support.has_value(), "sparse builder needs a target with sparse support");
    if (p.n < f.support->N)
        throw Error("fine partition coarser than support grid");
    opt.seed = seed;
    opt.prune = prune;
    if (!prune)
        return detail::assemble(f, p, eps, act, opt, 2.0, "sparse", nullptr);
    auto cells = touching_fine_cells(*f.support, p);
    std::set<MultiIndex> keep(cells.begin(), cells.end());
    return detail::assemble(f, p, eps, act, opt, 2.0, "sparse", &keep);
}

} // namespace cdn
