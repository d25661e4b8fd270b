#include <random>

#include <gtest/gtest.h>

#include "cdn/construct.hpp"
#include "cdn/network.hpp"
#include "cdn/serialize.hpp"

using namespace cdn;

namespace {

NetworkGraph single(UnitAct act, double w, double b, double out)
{
    NetworkGraph net(1, ActivationSpec::make(Kind::logistic));
    Unit u;
    u.act = act;
    u.bias = b;
    u.src = {0};
    u.w = {w};
    net.layers.push_back({{u}});
    net.output = {out};
    return net;
}

} // namespace

TEST(Network, ForwardExamples)
{
    EXPECT_DOUBLE_EQ(forward(single(UnitAct::identity, 1.0, 0.0, 1.0), {0.7}), 0.7);
    EXPECT_DOUBLE_EQ(forward(single(UnitAct::sigma, 0.0, 0.0, 2.0), {0.3}), 1.0);
    EXPECT_EQ(forward(single(UnitAct::heaviside, 1.0, -0.5, 1.0), {0.4}), 0.0);
    EXPECT_THROW(forward(single(UnitAct::identity, 1.0, 0.0, 1.0), {0.1, 0.2}), Error);
}

TEST(Network, AuditCount)
{
    NetworkGraph net(2, ActivationSpec::make(Kind::logistic));
    Layer layer;
    for (int i = 0; i < 3; ++i) {
        Unit u;
        u.connect(0, 1.0 + i);
        u.connect(1, -2.0);
        layer.units.push_back(u);
    }
    net.layers.push_back(layer);
    net.output = {1.0, 1.0, 5.0};
    const auto a = audit(net);
    EXPECT_EQ(a.count, 12u);
    EXPECT_EQ(a.max_abs, 5.0);
    ASSERT_EQ(a.per_layer_max.size(), 2u);
    EXPECT_EQ(a.per_layer_max[0], 3.0);
}

TEST(Network, ConnectDropsZeros)
{
    Unit u;
    u.connect(0, 0.0);
    u.connect(1, 2.0);
    EXPECT_EQ(u.src.size(), 1u);
}

TEST(Network, IndicatorCount)
{
    const auto net = indicator_net(CubicPartition(1, 2), {1}, 0.01, ActivationSpec::make(Kind::logistic));
    EXPECT_EQ(audit(net).count, 8u);
}

TEST(Network, ValidateCatchesBadShapes)
{
    auto net = single(UnitAct::identity, 1.0, 0.0, 1.0);
    net.layers[0].units[0].src = {3};
    EXPECT_THROW(validate(net), Error);
    net = single(UnitAct::identity, 1.0, 0.0, 1.0);
    net.output.push_back(1.0);
    EXPECT_THROW(validate(net), Error);
}

TEST(Network, DeterministicForward)
{
    const auto net = build_deep_net(sinprod_target(1, 1), CubicPartition(1, 4), 1e-4, ActivationSpec()).net;
    for (double x : {0.0, 0.13, 0.5, 0.77, 1.0})
        EXPECT_EQ(forward(net, {x}), forward(net, {x}));
}

TEST(Serialize, IdentityRoundTrip)
{
    const auto net = single(UnitAct::identity, 1.0, 0.0, 1.0);
    const auto back = parse(serialize(net));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double x = u(rng);
        EXPECT_EQ(forward(net, {x}), forward(back, {x}));
    }
}

TEST(Serialize, DeepNetRoundTripAndCount)
{
    const auto act = ActivationSpec::make(Kind::tanh);
    const auto b = build_deep_net(quadratic_target(2), CubicPartition(2, 2), 1e-4, act);
    const auto text = serialize(b.net);
    EXPECT_EQ(nlohmann::json::parse(text)["meta"]["param_count"].get<std::size_t>(), b.audit.count);
    const auto back = parse(text);
    EXPECT_EQ(back.sigma.kind(), Kind::tanh);
    EXPECT_EQ(back.sigma.b0(), act.b0());
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        Point x{u(rng), u(rng)};
        EXPECT_EQ(forward(b.net, x), forward(back, x));
    }
    const auto count = audit(build_deep_net(affine_target(1), CubicPartition(1, 2), 1e-3, act).net).count;
    EXPECT_EQ(nlohmann::json::parse(serialize(build_deep_net(affine_target(1), CubicPartition(1, 2), 1e-3, act).net))
                  ["meta"]["param_count"]
                      .get<std::size_t>(),
              count);
}

TEST(Serialize, UnknownActivation)
{
    auto doc = nlohmann::json::parse(serialize(single(UnitAct::identity, 1.0, 0.0, 1.0)));
    doc["layers"][0]["units"][0]["act"] = "relu";
    try {
        parse(doc.dump());
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("relu"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("$.layers[0].units[0].act"), std::string::npos);
    }
}

TEST(Serialize, MalformedJsonReportsPosition)
{
    try {
        parse("{\n  \"d\": 1,\n  oops\n}");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Network, ThreeLayerLayout)
{
    const auto b = build_deep_net(affine_target(1), CubicPartition(1, 4), 1e-3, ActivationSpec());
    EXPECT_TRUE(has_three_layer_layout(b.net));
    EXPECT_EQ(nonlinear_depth(b.net), 3);
    EXPECT_FALSE(has_three_layer_layout(single(UnitAct::sigma, 1.0, 0.0, 1.0)));
}
