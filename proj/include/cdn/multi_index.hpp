#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace cdn {

using MultiIndex = std::vector<int>;
using Point = std::vector<double>;

inline double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

inline double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    double b = 1.0;
    for (int i = 1; i <= k; ++i)
        b = b * (n - k + i) / i;
    return std::round(b);
}

inline int order(const MultiIndex& a)
{
    return std::accumulate(a.begin(), a.end(), 0);
}

inline double multi_factorial(const MultiIndex& a)
{
    double f = 1.0;
    for (int ai : a)
        f *= factorial(ai);
    return f;
}

// j! / (a_1! ... a_d!) for |a| = j
inline double multinomial(const MultiIndex& a)
{
    return factorial(order(a)) / multi_factorial(a);
}

inline double monomial(const MultiIndex& a, const double* x)
{
    double v = 1.0;
    for (std::size_t l = 0; l < a.size(); ++l)
        for (int p = 0; p < a[l]; ++p)
            v *= x[l];
    return v;
}

/// All multi-indices of dimension d and total order j, in lexicographic order.
inline std::vector<MultiIndex> indices_of_order(int d, int j)
{
    std::vector<MultiIndex> out;
    MultiIndex cur(d, 0);
    auto rec = [&](auto&& self, int l, int left) -> void {
        if (l == d - 1) {
            cur[l] = left;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[l] = v;
            self(self, l + 1, left - v);
        }
    };
    rec(rec, 0, j);
    return out;
}

/// All multi-indices with total order at most j.
inline std::vector<MultiIndex> indices_up_to(int d, int j)
{
    std::vector<MultiIndex> out;
    for (int o = 0; o <= j; ++o) {
        auto part = indices_of_order(d, o);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

/// {1..n}^d in lexicographic order (first coordinate most significant).
inline std::vector<MultiIndex> box_indices(int d, int n)
{
    std::vector<MultiIndex> out;
    MultiIndex cur(d, 1);
    if (d == 0 || n <= 0)
        return out;
    for (;;) {
        out.push_back(cur);
        int l = d - 1;
        while (l >= 0 && cur[l] == n) {
            cur[l] = 1;
            --l;
        }
        if (l < 0)
            break;
        ++cur[l];
    }
    return out;
}

/// Uniform tensor grid with `res` points per axis on [0,1]^d, boundaries included.
inline std::vector<Point> unit_grid(int d, int res)
{
    std::vector<Point> pts;
    for (const auto& j : box_indices(d, res)) {
        Point p(d);
        for (int l = 0; l < d; ++l)
            p[l] = res == 1 ? 0.5 : static_cast<double>(j[l] - 1) / (res - 1);
        pts.push_back(std::move(p));
    }
    return pts;
}

} // namespace cdn
