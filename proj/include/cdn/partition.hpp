#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cdn/error.hpp"
#include "cdn/multi_index.hpp"

namespace cdn {

/// Uniform partition of [0,1]^d into n^d closed cubes of side 1/n.
struct CubicPartition {
    int d = 1;
    int n = 1;

    CubicPartition() = default;
    CubicPartition(int d_, int n_) : d(d_), n(n_)
    {
        require(d >= 1, "dimension must be positive");
        require(n >= 1, "cells per axis must be positive");
    }

    std::size_t cell_count() const
    {
        std::size_t c = 1;
        for (int l = 0; l < d; ++l)
            c *= static_cast<std::size_t>(n);
        return c;
    }

    std::vector<MultiIndex> cells() const { return box_indices(d, n); }
};

// Cell boundaries are computed the same way everywhere so that network biases
// and cell lookup agree bit for bit.
inline double cell_lower(int j, int n) { return static_cast<double>(j - 1) / n; }
inline double cell_upper(int j, int n) { return static_cast<double>(j) / n; }

inline bool in_unit_cube(const Point& x)
{
    return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

/// Smallest-index cell containing x.
inline MultiIndex cell_of(const CubicPartition& p, const Point& x)
{
    require(static_cast<int>(x.size()) == p.d, "dimension mismatch");
    if (!in_unit_cube(x))
        throw Error("point outside domain");
    MultiIndex j(p.d);
    for (int l = 0; l < p.d; ++l) {
        int c = std::clamp(static_cast<int>(std::ceil(x[l] * p.n)), 1, p.n);
        while (c > 1 && x[l] <= cell_upper(c - 1, p.n))
            --c;
        while (c < p.n && x[l] > cell_upper(c, p.n))
            ++c;
        j[l] = c;
    }
    return j;
}

inline Point center(const CubicPartition& p, const MultiIndex& j)
{
    require(static_cast<int>(j.size()) == p.d, "dimension mismatch");
    Point c(p.d);
    for (int l = 0; l < p.d; ++l) {
        require(j[l] >= 1 && j[l] <= p.n, "cell index out of range");
        c[l] = (2.0 * j[l] - 1.0) / (2.0 * p.n);
    }
    return c;
}

inline bool in_closed_cell(const CubicPartition& p, const MultiIndex& j, const Point& x)
{
    for (int l = 0; l < p.d; ++l)
        if (x[l] < cell_lower(j[l], p.n) || x[l] > cell_upper(j[l], p.n))
            return false;
    return true;
}

/// Coarse support: s distinct cells of the N^d partition.
struct SparseSupport {
    int d = 1;
    int N = 1;
    std::vector<MultiIndex> lambda;

    SparseSupport() = default;
    SparseSupport(int d_, int N_, std::vector<MultiIndex> lambda_) : d(d_), N(N_), lambda(std::move(lambda_))
    {
        require(d >= 1 && N >= 1, "invalid support grid");
        std::set<MultiIndex> seen;
        for (const auto& k : lambda) {
            require(static_cast<int>(k.size()) == d, "support index has wrong dimension");
            for (int v : k)
                require(v >= 1 && v <= N, "support index out of range");
            require(seen.insert(k).second, "duplicate support index");
        }
        require(!lambda.empty(), "support must be nonempty");
    }

    int s() const { return static_cast<int>(lambda.size()); }

    CubicPartition coarse() const { return CubicPartition(d, N); }

    /// x in the closed union of the support cells.
    bool contains(const Point& x) const
    {
        CubicPartition c = coarse();
        return std::any_of(lambda.begin(), lambda.end(), [&](const MultiIndex& k) { return in_closed_cell(c, k, x); });
    }

    /// s distinct coarse cells drawn from a seeded shuffle.
    static SparseSupport random(int d, int N, int s, std::uint64_t seed)
    {
        auto all = box_indices(d, N);
        require(s >= 1 && s <= static_cast<int>(all.size()), "support size out of range");
        std::mt19937_64 rng(seed);
        std::shuffle(all.begin(), all.end(), rng);
        all.resize(s);
        std::sort(all.begin(), all.end());
        return SparseSupport(d, N, std::move(all));
    }
};

/// Fine cells whose closed box meets the closed support, in lexicographic order.
inline std::vector<MultiIndex> touching_fine_cells(const SparseSupport& sup, const CubicPartition& p)
{
    require(sup.d == p.d, "dimension mismatch");
    if (p.n < sup.N)
        throw Error("fine partition coarser than support grid");
    std::set<MultiIndex> out;
    const long n = p.n, N = sup.N;
    for (const auto& k : sup.lambda) {
        // (j-1) N <= k n  and  (k-1) n <= j N, per axis, in exact integers
        MultiIndex lo(p.d), hi(p.d);
        for (int l = 0; l < p.d; ++l) {
            long a = ((k[l] - 1) * n + N - 1) / N;
            long b = (k[l] * n) / N + 1;
            lo[l] = static_cast<int>(std::max(1L, a));
            hi[l] = static_cast<int>(std::min(n, b));
        }
        MultiIndex cur = lo;
        for (;;) {
            out.insert(cur);
            int l = p.d - 1;
            while (l >= 0 && cur[l] == hi[l]) {
                cur[l] = lo[l];
                --l;
            }
            if (l < 0)
                break;
            ++cur[l];
        }
    }
    return {out.begin(), out.end()};
}

inline std::string format_index(const MultiIndex& j)
{
    std::string s = "(";
    for (std::size_t l = 0; l < j.size(); ++l)
        s += (l ? "," : "") + std::to_string(j[l]);
    return s + ")";
}

} // namespace cdn
