#include <set>

#include <gtest/gtest.h>

#include "cdn/harness.hpp"

using namespace cdn;

namespace {

NetworkGraph linear_net(double w)
{
    NetworkGraph net(1, ActivationSpec::make(Kind::logistic));
    net.output = {w};
    return net;
}

NetworkGraph constant_half()
{
    NetworkGraph net(1, ActivationSpec::make(Kind::logistic));
    Unit u;
    net.layers.push_back({{u}});
    net.output = {1.0};
    return net;
}

ExperimentConfig quick(const std::string& target, double r, std::vector<int> ns)
{
    ExperimentConfig cfg;
    cfg.target = target;
    cfg.r = r;
    cfg.n_list = std::move(ns);
    cfg.record_wall_time = false;
    return cfg;
}

} // namespace

TEST(SupError, Examples)
{
    EXPECT_EQ(sup_error(constant_target(1, 0.0), linear_net(0.0), 101), 0.0);
    EXPECT_EQ(sup_error(affine_target(1), linear_net(1.0), 1001), 0.0);
    const auto e = sup_error_at(affine_target(1), constant_half(), 1001);
    EXPECT_DOUBLE_EQ(e.value, 0.5);
    EXPECT_TRUE(e.argmax[0] == 0.0 || e.argmax[0] == 1.0);
    EXPECT_THROW(sup_error(affine_target(1), linear_net(1.0), 5), Error);
    NetworkGraph net4(4, ActivationSpec::make(Kind::logistic));
    net4.output = {0, 0, 0, 0};
    try {
        sup_error(constant_target(4, 0.0), net4, 100);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "grid too large");
    }
}

TEST(Slope, Fit)
{
    EXPECT_FALSE(fit_loglog_slope({1, 2}, {1, 0.5}));
    auto s = fit_loglog_slope({1, 2, 4, 8}, {1, 0.25, 0.0625, 0.015625});
    ASSERT_TRUE(s);
    EXPECT_NEAR(*s, -2.0, 1e-12);
}

TEST(Config, Validation)
{
    auto cfg = quick("affine", 1, {4, 4});
    EXPECT_THROW(validate(cfg), Error);
    cfg = quick("affine", 1, {4, 8});
    cfg.grid = 5;
    EXPECT_THROW(validate(cfg), Error);
    EXPECT_THROW(parse_eps_rule("other"), Error);
}

TEST(Rate, TwoRowsLeaveSlopeUndefined)
{
    const auto t = rate_experiment(quick("affine", 1, {4, 8}));
    EXPECT_EQ(t.rows.size(), 2u);
    EXPECT_FALSE(t.slope);
    EXPECT_TRUE(t.rows[0].sup_error);
}

TEST(Rate, AffineSlope)
{
    const auto t = rate_experiment(quick("affine", 1, {4, 8, 16, 32}));
    ASSERT_TRUE(t.slope);
    EXPECT_LE(*t.slope, -1.0 + 0.5);
    for (const auto& r : t.rows) {
        EXPECT_TRUE(r.triangle_ok);
        EXPECT_NEAR(r.eps, std::pow(static_cast<double>(r.n_tilde), -2.0), 1e-15);
    }
}

TEST(Rate, CsvFormatAndDeterminism)
{
    const auto cfg = quick("sinprod", 2, {4, 8, 16});
    const auto a = to_csv(rate_experiment(cfg));
    const auto b = to_csv(rate_experiment(cfg));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.substr(0, a.find('\n')), "n,n_tilde,eps,sup_error,off_support_max,max_param,wall_time_s");
    // off_support_max and wall_time_s are empty here
    const auto line = a.substr(a.find('\n') + 1, a.find('\n', a.find('\n') + 1) - a.find('\n') - 1);
    EXPECT_NE(line.find(",,"), std::string::npos);
    EXPECT_EQ(line.back(), ',');
}

TEST(Rate, WallTimeRecorded)
{
    auto cfg = quick("affine", 1, {4, 8});
    cfg.record_wall_time = true;
    const auto t = rate_experiment(cfg);
    EXPECT_TRUE(t.rows[0].wall_time_s);
}

TEST(Sparsity, OffSupportSmallAndDecreasing)
{
    auto cfg = quick("sparse-bump", 1, {4, 8, 16});
    cfg.eps_rule = EpsRule::corollary2;
    cfg.T = 2.0;
    const auto t = sparsity_experiment(cfg);
    double prev = 1.0;
    for (const auto& r : t.rows) {
        ASSERT_TRUE(r.off_support_max);
        EXPECT_LE(*r.off_support_max, 1e-2);
        EXPECT_LT(*r.off_support_max, prev);
        prev = *r.off_support_max;
    }
}

TEST(Sparsity, FullSupportLeavesColumnEmpty)
{
    auto cfg = quick("sparse-bump", 1, {4, 8, 16});
    cfg.support = {{1}, {2}};
    const auto t = sparsity_experiment(cfg);
    for (const auto& r : t.rows)
        EXPECT_FALSE(r.off_support_max);
}

TEST(Sparsity, FailedRowsExcluded)
{
    auto cfg = quick("sparse-bump", 1, {1, 4, 8, 16});
    const auto t = sparsity_experiment(cfg);
    EXPECT_FALSE(t.rows[0].error.empty());
    EXPECT_FALSE(t.rows[0].sup_error);
    EXPECT_EQ(t.valid_rows().size(), 3u);
    EXPECT_TRUE(t.slope);
    EXPECT_THROW(sparsity_experiment(quick("affine", 1, {4, 8})), Error);
}

TEST(Sampler, StaysOffSupport)
{
    for (int d : {1, 2}) {
        auto sup = SparseSupport::random(d, 3, 2, 9);
        CubicPartition p(d, 6);
        OffSupportSampler s(sup, p, 4);
        auto touching = touching_fine_cells(sup, p);
        for (int i = 0; i < 2000; ++i) {
            const auto x = s();
            for (const auto& j : touching)
                ASSERT_FALSE(in_closed_cell(p, j, x));
            EXPECT_FALSE(sup.contains(x));
        }
    }
}

TEST(Growth, Audit)
{
    const auto cfg = quick("sinprod", 2, {4, 8, 16});
    const auto g = param_growth_audit(cfg);
    ASSERT_TRUE(g.slope_n_tilde);
    EXPECT_LE(*g.slope_n_tilde, 8.0);
    EXPECT_LE(g.doubling_increase, 3 * std::log(2.0) + 1.0);
    EXPECT_TRUE(g.pass);
    const auto again = param_growth_audit(cfg);
    for (std::size_t i = 0; i < g.rows.size(); ++i)
        EXPECT_EQ(g.rows[i].max_param, again.rows[i].max_param);
    EXPECT_THROW(param_growth_audit(quick("sinprod", 2, {4, 8})), Error);
}

TEST(Config, SmoothnessDefaultsToTarget)
{
    ExperimentConfig cfg;
    cfg.target = "affine";
    EXPECT_EQ(resolved(cfg).r, 1.0);
    cfg.target = "sinprod";
    EXPECT_EQ(resolved(cfg).r, 2.0);
    cfg.target = "sparse-bump";
    EXPECT_EQ(resolved(cfg).r, 1.0);
    cfg.r = 2.0;
    EXPECT_EQ(resolved(cfg).r, 2.0);
}
