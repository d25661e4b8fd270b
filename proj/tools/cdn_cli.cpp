#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdn/construct.hpp"
#include "cdn/harness.hpp"
#include "cdn/serialize.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_assert = 2;

struct Common {
    cdn::ExperimentConfig cfg;
    std::string support_json;
    std::string eps_rule = "corollary1";
    int n = 8;
    bool no_timing = false;
};

void add_target_flags(CLI::App* sub, Common& c)
{
    sub->add_option("--target", c.cfg.target, "affine|quadratic|sinprod|frac-v|sparse-bump")
        ->check(CLI::IsMember({"affine", "quadratic", "sinprod", "frac-v", "sparse-bump"}));
    sub->add_option("--activation", c.cfg.activation, "logistic|tanh|gompertz|gaussian")
        ->check(CLI::IsMember({"logistic", "tanh", "gompertz", "gaussian"}));
    sub->add_option("--gompertz-a", c.cfg.gompertz.a)->check(CLI::PositiveNumber);
    sub->add_option("--gompertz-b", c.cfg.gompertz.b)->check(CLI::PositiveNumber);
    sub->add_option("--d", c.cfg.d, "input dimension")->check(CLI::Range(1, 8));
    sub->add_option("--r", c.cfg.r, "smoothness (default: the target's own)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.cfg.seed);
    sub->add_option("--support", c.support_json, "support cells as a JSON array, e.g. [[1],[2]]");
    sub->add_option("--N", c.cfg.N, "support grid size")->check(CLI::PositiveNumber);
    sub->add_option("--s", c.cfg.s, "number of support cells")->check(CLI::PositiveNumber);
    sub->add_flag("--prune", c.cfg.prune, "drop Taylor branches away from the support");
}

void add_sweep_flags(CLI::App* sub, Common& c)
{
    sub->add_option("--n-list", c.cfg.n_list, "partition sizes")->delimiter(',')->check(CLI::PositiveNumber);
    sub->add_option("--eps", c.cfg.eps, "tolerance for the fixed rule")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--eps-rule", c.eps_rule)->check(CLI::IsMember({"fixed", "corollary1", "corollary2"}));
    sub->add_option("--T", c.cfg.T, "decay exponent for corollary2")->check(CLI::NonNegativeNumber);
    sub->add_option("--grid", c.cfg.grid, "grid points per axis")->check(CLI::Range(10, 100000));
    sub->add_option("--out", c.cfg.out, "CSV output path (stdout if omitted)");
    sub->add_flag("--no-timing", c.no_timing, "leave wall_time_s empty");
}

void finish(Common& c)
{
    c.cfg.eps_rule = cdn::parse_eps_rule(c.eps_rule);
    c.cfg.record_wall_time = !c.no_timing;
    if (!c.support_json.empty()) {
        auto j = nlohmann::json::parse(c.support_json);
        c.cfg.support = j.get<std::vector<cdn::MultiIndex>>();
        c.cfg.s = static_cast<int>(c.cfg.support.size());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os)
        throw cdn::Error("cannot write " + path);
    os << text;
}

std::string sidecar_path(const std::string& out)
{
    const std::string ext = ".json";
    if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
        return out.substr(0, out.size() - ext.size()) + ".meta.json";
    return out + ".meta.json";
}

int report_table(const cdn::RateTable& t, const std::string& out)
{
    write_text(out, cdn::to_csv(t));
    int rc = exit_ok;
    for (const auto& r : t.rows) {
        if (!r.error.empty())
            std::cerr << "n=" << r.n << ": build failed: " << r.error << '\n';
        if (!r.triangle_ok) {
            std::cerr << "n=" << r.n << ": triangle check failed\n";
            rc = exit_assert;
        }
    }
    if (t.slope)
        std::cerr << "slope " << *t.slope << '\n';
    else
        std::cerr << "slope undefined (fewer than 3 valid rows)\n";
    return rc;
}

int run_build(Common& c, const std::string& out)
{
    auto cfg = cdn::resolved(c.cfg);
    const auto act = cdn::make_activation(cfg);
    const auto f = cdn::make_target(cfg);
    cfg.n_list = {c.n};
    cdn::validate(cfg);
    const auto b = cdn::build_for(cfg, f, act, c.n);
    write_text(out, cdn::serialize(b.net));
    auto meta = cdn::to_json(b.meta);
    meta["target"] = cfg.target;
    meta["activation"] = act.name();
    write_text(sidecar_path(out), meta.dump(2) + "\n");
    std::cerr << "n_tilde " << b.meta.n_tilde << ", eps " << b.meta.eps << ", B " << b.meta.B << ", max |param| "
              << b.audit.max_abs << '\n';
    return exit_ok;
}

std::string read_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw cdn::Error("cannot read " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_eval(const std::string& net_path, const std::vector<std::string>& xs, Common& c, bool with_target)
{
    const auto net = cdn::parse(read_file(net_path));
    for (const auto& s : xs) {
        cdn::Point x;
        std::stringstream ss(s);
        for (std::string tok; std::getline(ss, tok, ',');)
            x.push_back(std::stod(tok));
        std::printf("%.17g\n", cdn::forward(net, x));
    }
    if (with_target) {
        c.cfg.d = net.d;
        const auto f = cdn::make_target(c.cfg);
        const int res = c.cfg.grid ? c.cfg.grid : cdn::default_resolution(net.d);
        std::printf("sup_error %.12g\n", cdn::sup_error(f, net, res));
    }
    return exit_ok;
}

int run_audit(Common& c)
{
    const auto g = cdn::param_growth_audit(c.cfg);
    write_text(c.cfg.out, cdn::to_csv(g));
    auto show = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("undefined"); };
    std::cerr << "slope vs n_tilde " << show(g.slope_n_tilde) << ", slope vs 1/eps " << show(g.slope_inv_eps)
              << ", eps-halving log-increase " << g.doubling_increase << " (limit " << g.doubling_limit << ")\n";
    return g.pass ? exit_ok : exit_assert;
}

int run_gate_test(double eps, const std::string& activation)
{
    const auto act = cdn::ActivationSpec::make(cdn::parse_kind(activation));
    const auto gate = cdn::square_gate(act, eps);
    std::printf("u1,u2,product,gate_output,error\n");
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const double u1 = -1.0 + 0.1 * i, u2 = -1.0 + 0.1 * j;
            const double g = cdn::product_combine(gate, u1, u2);
            const double e = std::abs(g - u1 * u2);
            worst = std::max(worst, e);
            std::printf("%.12g,%.12g,%.12g,%.12g,%.12g\n", u1, u2, u1 * u2, g, e);
        }
    std::fprintf(stderr, "max error %.3g (eps %.3g, delta %.6g)\n", worst, eps, gate.delta);
    return worst <= eps ? exit_ok : exit_assert;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Constructive deep sigmoid networks: build, evaluate and measure approximation rates."};
    app.require_subcommand(1);

    Common c;

    auto* build = app.add_subcommand("build", "construct a network and write it as JSON");
    add_target_flags(build, c);
    std::string net_out = "net.json";
    build->add_option("--n", c.n, "cells per axis")->required()->check(CLI::PositiveNumber);
    build->add_option("--eps", c.cfg.eps, "tolerance")->check(CLI::Range(0.0, 1.0));
    build->add_option("--eps-rule", c.eps_rule)->check(CLI::IsMember({"fixed", "corollary1", "corollary2"}));
    build->add_option("--T", c.cfg.T)->check(CLI::NonNegativeNumber);
    build->add_option("--out", net_out, "network JSON path; metadata goes to <stem>.meta.json");
    c.eps_rule = "fixed";

    auto* eval = app.add_subcommand("eval", "evaluate a serialized network");
    std::string net_path;
    std::vector<std::string> xs;
    bool eval_target = false;
    eval->add_option("--net", net_path, "network JSON")->required();
    eval->add_option("--x", xs, "comma-separated input point (repeatable)");
    eval->add_option("--grid", c.cfg.grid)->check(CLI::Range(10, 100000));
    eval->add_flag("--sup-error", eval_target, "also report the grid sup-error against --target");
    add_target_flags(eval, c);

    auto* rate = app.add_subcommand("rate", "sup-error against parameter count over --n-list");
    add_target_flags(rate, c);
    add_sweep_flags(rate, c);

    auto* sparsity = app.add_subcommand("sparsity", "rate table plus off-support magnitude for a sparse target");
    add_target_flags(sparsity, c);
    add_sweep_flags(sparsity, c);

    auto* audit_cmd = app.add_subcommand("audit", "growth of the largest parameter against n_tilde and 1/eps");
    add_target_flags(audit_cmd, c);
    add_sweep_flags(audit_cmd, c);

    auto* gate = app.add_subcommand("gate-test", "product gate over a 21x21 grid as CSV");
    double gate_eps = 1e-3;
    std::string gate_act = "logistic";
    gate->add_option("--eps", gate_eps)->check(CLI::Range(0.0, 1.0));
    gate->add_option("--activation", gate_act)->check(CLI::IsMember({"logistic", "tanh", "gompertz", "gaussian"}));

    // the sweep subcommands default to the corollary rule, build to a fixed eps
    for (auto* s : {rate, sparsity, audit_cmd})
        s->preparse_callback([&c](std::size_t) { c.eps_rule = "corollary1"; });
    sparsity->preparse_callback([&c](std::size_t) {
        c.eps_rule = "corollary1";
        c.cfg.target = "sparse-bump";
        c.cfg.n_list = {4, 8, 16};
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        finish(c);
        if (*build)
            return run_build(c, net_out);
        if (*eval)
            return run_eval(net_path, xs, c, eval_target);
        if (*rate)
            return report_table(cdn::rate_experiment(c.cfg), c.cfg.out);
        if (*sparsity)
            return report_table(cdn::sparsity_experiment(c.cfg), c.cfg.out);
        if (*audit_cmd)
            return run_audit(c);
        if (*gate)
            return run_gate_test(gate_eps, gate_act);
    } catch (const cdn::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
