// Builds a three-hidden-layer net for sin(2 pi x) on [0,1] at a few resolutions
// and prints the sup-error, parameter count and largest weight for each.
#include <cstdio>

#include "cdn/construct.hpp"
#include "cdn/harness.hpp"

int main()
{
    const auto act = cdn::ActivationSpec::make(cdn::Kind::logistic);
    const auto f = cdn::sinprod_target(1, 1);

    std::printf("%4s %8s %10s %12s %12s\n", "n", "n_tilde", "eps", "sup_error", "max|param|");
    for (int n : {4, 8, 16, 32}) {
        const auto b = cdn::build_deep_net(f, cdn::CubicPartition(1, n), 1e-6, act);
        const double err = cdn::sup_error(f, b.net, 1001);
        std::printf("%4d %8zu %10.1e %12.4e %12.4e\n", n, b.meta.n_tilde, b.meta.eps, err, b.audit.max_abs);
    }

    const auto b = cdn::build_deep_net(f, cdn::CubicPartition(1, 32), 1e-6, act);
    std::printf("\n%6s %12s %12s\n", "x", "f(x)", "H(x)");
    for (double x : {0.0, 0.125, 0.25, 0.4, 0.5, 0.75, 1.0})
        std::printf("%6.3f %12.6f %12.6f\n", x, f({x}), cdn::forward(b.net, {x}));
}
