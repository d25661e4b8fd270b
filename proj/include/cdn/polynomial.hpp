#pragma once

#include <cmath>
#include <map>
#include <string>

#include "cdn/error.hpp"
#include "cdn/multi_index.hpp"

namespace cdn {

/// Multivariate polynomial in the monomial basis.
struct Polynomial {
    int d = 1;
    std::map<MultiIndex, double> coeffs;

    Polynomial() = default;
    explicit Polynomial(int dim) : d(dim) { }

    double& operator[](const MultiIndex& a)
    {
        require(static_cast<int>(a.size()) == d, "monomial has wrong dimension");
        return coeffs[a];
    }

    double coeff(const MultiIndex& a) const
    {
        auto it = coeffs.find(a);
        return it == coeffs.end() ? 0.0 : it->second;
    }

    int degree() const
    {
        int deg = 0;
        for (const auto& [a, c] : coeffs)
            if (c != 0.0)
                deg = std::max(deg, order(a));
        return deg;
    }

    double operator()(const double* x) const
    {
        double v = 0.0;
        for (const auto& [a, c] : coeffs)
            v += c * monomial(a, x);
        return v;
    }

    double operator()(const Point& x) const { return (*this)(x.data()); }

    Polynomial& operator*=(double s)
    {
        for (auto& [a, c] : coeffs)
            c *= s;
        return *this;
    }

    Polynomial& operator+=(const Polynomial& o)
    {
        require(o.d == d, "dimension mismatch");
        for (const auto& [a, c] : o.coeffs)
            coeffs[a] += c;
        return *this;
    }
};

/// Expands sum_a c_a (x - eta)^a into the monomial basis in x.
inline Polynomial expand_shifted(int d, const std::map<MultiIndex, double>& shifted, const Point& eta)
{
    Polynomial p(d);
    for (const auto& [a, c] : shifted) {
        if (c == 0.0)
            continue;
        // product over axes of sum_b binom(a_l, b_l) x^b_l (-eta_l)^(a_l - b_l)
        std::map<MultiIndex, double> terms{{MultiIndex(d, 0), c}};
        for (int l = 0; l < d; ++l) {
            std::map<MultiIndex, double> next;
            for (const auto& [m, v] : terms) {
                for (int b = 0; b <= a[l]; ++b) {
                    MultiIndex mm = m;
                    mm[l] = b;
                    next[mm] += v * binomial(a[l], b) * std::pow(-eta[l], a[l] - b);
                }
            }
            terms.swap(next);
        }
        for (const auto& [m, v] : terms)
            p.coeffs[m] += v;
    }
    return p;
}

} // namespace cdn
