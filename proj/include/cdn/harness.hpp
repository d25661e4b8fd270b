#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cdn/construct.hpp"
#include "cdn/error.hpp"
#include "cdn/network.hpp"
#include "cdn/partition.hpp"
#include "cdn/targets.hpp"

namespace cdn {

enum class EpsRule { fixed, corollary1, corollary2 };

inline EpsRule parse_eps_rule(const std::string& s)
{
    if (s == "fixed") return EpsRule::fixed;
    if (s == "corollary1") return EpsRule::corollary1;
    if (s == "corollary2") return EpsRule::corollary2;
    throw Error("unknown eps rule '" + s + "'");
}

struct ExperimentConfig {
    std::string target = "sinprod";
    int d = 1;
    double r = 0.0; // 0 selects the target's own smoothness
    std::string activation = "logistic";
    GompertzParams gompertz;
    std::vector<int> n_list{4, 8, 16, 32};
    EpsRule eps_rule = EpsRule::corollary1;
    double eps = 1e-3; // value for the fixed rule
    double T = 0.0;    // exponent for corollary2; 0 selects (r + d) / d
    int grid = 0;      // points per axis; 0 selects the default for d
    std::uint64_t seed = 1;
    std::string out;

    // sparse targets
    int N = 2;
    int s = 1;
    std::vector<MultiIndex> support; // empty: drawn from the seed
    bool prune = false;

    bool record_wall_time = true;
    int off_samples = 10000;
    double doubling_eps = 1e-3; // base eps of the doubling check in param_growth_audit
};

inline void validate(const ExperimentConfig& cfg)
{
    require(cfg.d >= 1, "dimension must be positive");
    require(!cfg.n_list.empty(), "n_list must not be empty");
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
        require(cfg.n_list[i] >= 1, "n must be positive");
        if (i)
            require(cfg.n_list[i] > cfg.n_list[i - 1], "n_list must be strictly increasing");
    }
    require(cfg.grid == 0 || cfg.grid >= 10, "grid resolution must be at least 10 per axis");
    if (cfg.eps_rule == EpsRule::fixed)
        require(cfg.eps > 0.0 && cfg.eps < 1.0, "eps must lie in (0,1)");
}

inline int default_resolution(int d)
{
    switch (d) {
    case 1: return 1001;
    case 2: return 101;
    case 3: return 41;
    default: return 10;
    }
}

inline ActivationSpec make_activation(const ExperimentConfig& cfg)
{
    return ActivationSpec::make(parse_kind(cfg.activation), 5, cfg.gompertz);
}

inline bool is_sparse_target(const ExperimentConfig& cfg) { return cfg.target == "sparse-bump"; }

inline SparseSupport make_support(const ExperimentConfig& cfg)
{
    if (!cfg.support.empty())
        return SparseSupport(cfg.d, cfg.N, cfg.support);
    return SparseSupport::random(cfg.d, cfg.N, cfg.s, cfg.seed);
}

inline TargetFunction make_target(const ExperimentConfig& cfg)
{
    if (is_sparse_target(cfg))
        return make_target(cfg.target, cfg.d, cfg.r, make_support(cfg));
    return make_target(cfg.target, cfg.d, cfg.r);
}

/// Copy of cfg with r filled in from the target when left at 0.
inline ExperimentConfig resolved(ExperimentConfig cfg)
{
    if (cfg.r <= 0.0)
        cfg.r = make_target(cfg).r();
    return cfg;
}

struct SupError {
    double value = 0.0;
    Point argmax;
};

inline SupError sup_error_at(const TargetFunction& f, const NetworkGraph& net, int resolution)
{
    require(resolution >= 10, "grid resolution must be at least 10 per axis");
    require(f.d == net.d, "dimension mismatch");
    if (std::pow(static_cast<double>(resolution), f.d) > 1e7)
        throw Error("grid too large");
    SupError e;
    for (const auto& x : unit_grid(f.d, resolution)) {
        double v = std::abs(f(x) - forward(net, x));
        if (v > e.value || e.argmax.empty()) {
            e.value = v;
            e.argmax = x;
        }
    }
    return e;
}

/// max |f - net| over the uniform resolution^d grid, boundary included.
inline double sup_error(const TargetFunction& f, const NetworkGraph& net, int resolution)
{
    return sup_error_at(f, net, resolution).value;
}

/// Least-squares slope of log y against log x; needs at least 3 points.
inline std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 3)
        return std::nullopt;
    double mx = 0, my = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            return std::nullopt;
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0)
        return std::nullopt;
    return sxy / sxx;
}

struct RateRow {
    int n = 0;
    std::size_t n_tilde = 0;
    double eps = 0.0;
    std::optional<double> sup_error;
    std::optional<double> off_support_max;
    std::optional<double> max_param;
    std::optional<double> wall_time_s;
    bool triangle_ok = true;
    std::string error; // non-empty when the build failed
};

struct RateTable {
    std::vector<RateRow> rows;
    std::optional<double> slope;

    std::vector<const RateRow*> valid_rows() const
    {
        std::vector<const RateRow*> v;
        for (const auto& r : rows)
            if (r.error.empty() && r.sup_error)
                v.push_back(&r);
        return v;
    }
};

inline std::string csv_number(const std::optional<double>& v)
{
    if (!v)
        return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", *v);
    return buf;
}

inline std::string to_csv(const RateTable& t)
{
    std::ostringstream os;
    os << "n,n_tilde,eps,sup_error,off_support_max,max_param,wall_time_s\n";
    for (const auto& r : t.rows) {
        os << r.n << ',' << (r.n_tilde ? std::to_string(r.n_tilde) : "") << ',' << csv_number(r.eps) << ','
           << csv_number(r.sup_error) << ',' << csv_number(r.off_support_max) << ',' << csv_number(r.max_param) << ','
           << csv_number(r.wall_time_s) << '\n';
    }
    return os.str();
}

inline double rule_eps(const ExperimentConfig& cfg, std::size_t n_tilde)
{
    const double nt = static_cast<double>(n_tilde);
    switch (cfg.eps_rule) {
    case EpsRule::fixed: return cfg.eps;
    case EpsRule::corollary1: return std::pow(nt, -(cfg.r + cfg.d) / cfg.d);
    case EpsRule::corollary2: return std::pow(nt, -(cfg.T > 0.0 ? cfg.T : (cfg.r + cfg.d) / cfg.d));
    }
    return cfg.eps;
}

inline DeepNetBundle build_once(const ExperimentConfig& cfg, const TargetFunction& f, const ActivationSpec& act, int n,
                                double eps)
{
    CubicPartition p(cfg.d, n);
    if (f.support)
        return build_sparse_deep_net(f, p, eps, act, cfg.seed, cfg.prune);
    return build_deep_net(f, p, eps, act, cfg.seed);
}

/// Builds for one n, resolving eps rules that depend on the parameter count.
inline DeepNetBundle build_for(const ExperimentConfig& cfg, const TargetFunction& f, const ActivationSpec& act, int n)
{
    if (cfg.eps_rule == EpsRule::fixed)
        return build_once(cfg, f, act, n, cfg.eps);
    DeepNetBundle b = build_once(cfg, f, act, n, 1e-3);
    for (int it = 0; it < 4; ++it) {
        const double eps = rule_eps(cfg, b.meta.n_tilde);
        const std::size_t before = b.meta.n_tilde;
        b = build_once(cfg, f, act, n, eps);
        if (b.meta.n_tilde == before)
            break;
    }
    return b;
}

/// Uniform sampler over the cube minus the closed fine cells touching the support.
class OffSupportSampler {
public:
    OffSupportSampler(const SparseSupport& sup, const CubicPartition& p, std::uint64_t seed) : p_(p), rng_(seed)
    {
        auto t = touching_fine_cells(sup, p);
        touching_.insert(t.begin(), t.end());
        for (const auto& j : p.cells())
            if (!touching_.count(j))
                free_.push_back(j);
    }

    bool empty() const { return free_.empty(); }

    bool in_touching_region(const Point& x) const
    {
        for (const auto& j : touching_)
            if (in_closed_cell(p_, j, x))
                return true;
        return false;
    }

    Point operator()()
    {
        require(!free_.empty(), "no off-support region");
        std::uniform_int_distribution<std::size_t> pick(0, free_.size() - 1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (;;) {
            const auto& j = free_[pick(rng_)];
            Point x(p_.d);
            for (int l = 0; l < p_.d; ++l)
                x[l] = cell_lower(j[l], p_.n) + u(rng_) * (cell_upper(j[l], p_.n) - cell_lower(j[l], p_.n));
            if (!in_touching_region(x))
                return x;
        }
    }

private:
    CubicPartition p_;
    std::mt19937_64 rng_;
    std::set<MultiIndex> touching_;
    std::vector<MultiIndex> free_;
};

namespace detail {

inline RateTable run_rate(const ExperimentConfig& config, bool sparse)
{
    const auto cfg = resolved(config);
    validate(cfg);
    const auto act = make_activation(cfg);
    const auto f = make_target(cfg);
    if (sparse)
        require(f.support.has_value(), "sparsity experiment needs a sparse target");
    const int res = cfg.grid ? cfg.grid : default_resolution(cfg.d);
    RateTable t;
    for (int n : cfg.n_list) {
        RateRow row;
        row.n = n;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto b = build_for(cfg, f, act, n);
            row.n_tilde = b.meta.n_tilde;
            row.eps = b.meta.eps;
            row.max_param = b.audit.max_abs;
            const auto se = sup_error_at(f, b.net, res);
            row.sup_error = se.value;

            PhiReference phi(f, CubicPartition(cfg.d, n), b.meta.eps, act);
            const double h = forward(b.net, se.argmax), ph = phi(se.argmax), fx = f(se.argmax);
            row.triangle_ok = std::abs(h - fx) <= std::abs(h - ph) + std::abs(ph - fx) + 1e-12 * (1.0 + std::abs(fx));

            if (sparse) {
                OffSupportSampler sampler(*f.support, CubicPartition(cfg.d, n), cfg.seed);
                if (!sampler.empty()) {
                    double m = 0.0;
                    for (int i = 0; i < cfg.off_samples; ++i)
                        m = std::max(m, std::abs(forward(b.net, sampler())));
                    row.off_support_max = m;
                }
            }
        } catch (const Error& e) {
            row.error = e.what();
            row.sup_error.reset();
        }
        if (cfg.record_wall_time)
            row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        t.rows.push_back(std::move(row));
    }
    std::vector<double> xs, ys;
    for (const auto* r : t.valid_rows()) {
        xs.push_back(static_cast<double>(r->n_tilde));
        ys.push_back(*r->sup_error);
    }
    t.slope = fit_loglog_slope(xs, ys);
    return t;
}

} // namespace detail

/// Sup-error against parameter count over n_list.
inline RateTable rate_experiment(const ExperimentConfig& cfg)
{
    return detail::run_rate(cfg, false);
}

/// As rate_experiment, plus max |H| over points away from the support.
inline RateTable sparsity_experiment(const ExperimentConfig& cfg)
{
    return detail::run_rate(cfg, true);
}

struct GrowthRow {
    int n = 0;
    std::size_t n_tilde = 0;
    double inv_eps = 0.0;
    double max_param = 0.0;
};

struct GrowthReport {
    std::vector<GrowthRow> rows;
    std::optional<double> slope_n_tilde;
    std::optional<double> slope_inv_eps;
    double doubling_increase = 0.0; // log(max_param(eps/2)) - log(max_param(eps)) at the first n
    double doubling_limit = 0.0;    // (k + 2) log 2 + 1
    bool pass = false;
};

inline std::string to_csv(const GrowthReport& g)
{
    std::ostringstream os;
    os << "n,n_tilde,inv_eps,max_param\n";
    for (const auto& r : g.rows)
        os << r.n << ',' << r.n_tilde << ',' << csv_number(r.inv_eps) << ',' << csv_number(r.max_param) << '\n';
    return os.str();
}

/// Table of (n_tilde, 1/eps, max |param|) with separate log-log slopes, plus an eps-halving check.
inline GrowthReport param_growth_audit(const ExperimentConfig& config)
{
    const auto cfg = resolved(config);
    validate(cfg);
    require(cfg.n_list.size() >= 3, "param growth audit needs at least 3 (n, eps) pairs");
    const auto act = make_activation(cfg);
    const auto f = make_target(cfg);
    GrowthReport g;
    std::vector<double> nt, ie, mp;
    for (int n : cfg.n_list) {
        const auto b = build_for(cfg, f, act, n);
        g.rows.push_back({n, b.meta.n_tilde, 1.0 / b.meta.eps, b.audit.max_abs});
        nt.push_back(static_cast<double>(b.meta.n_tilde));
        ie.push_back(1.0 / b.meta.eps);
        mp.push_back(b.audit.max_abs);
    }
    g.slope_n_tilde = fit_loglog_slope(nt, mp);
    g.slope_inv_eps = fit_loglog_slope(ie, mp);

    const int n0 = cfg.n_list.front();
    const double a = build_once(cfg, f, act, n0, cfg.doubling_eps).audit.max_abs;
    const double b = build_once(cfg, f, act, n0, cfg.doubling_eps / 2.0).audit.max_abs;
    g.doubling_increase = std::log(b) - std::log(a);
    g.doubling_limit = (f.k + 2) * std::log(2.0) + 1.0;

    // slopes that cannot be fitted (constant eps or n_tilde) are vacuous
    const bool s1 = !g.slope_n_tilde || *g.slope_n_tilde <= 8.0;
    const bool s2 = !g.slope_inv_eps || *g.slope_inv_eps <= 8.0;
    g.pass = s1 && s2 && g.doubling_increase <= g.doubling_limit;
    return g;
}

} // namespace cdn
