#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace dirac::quad {

// A quadrature rule stored as full node/weight lists.
// Legendre rules live on [-1, 1], Laguerre rules on [0, inf) with weight e^{-p}.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n in {2, 3, 4, 8, 16, 32}
const Rule& gauss_legendre(int n);
// n in {8, 16, 24, 32, 48}
const Rule& gauss_laguerre(int n);

template <class F>
auto gauss(F&& f, double a, double b, const Rule& rule)
{
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    decltype(f(mid)) sum{};
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    return sum * half;
}

template <class F>
auto gl8(F&& f, double a, double b)
{
    return gauss(f, a, b, gauss_legendre(8));
}

// Composite Gauss-Legendre with `cells` equal cells on [a, b].
template <class F>
auto composite(F&& f, double a, double b, std::size_t cells, const Rule& rule)
{
    decltype(f(a)) sum{};
    if (cells == 0 || !(b > a)) return sum;
    const double width = (b - a) / static_cast<double>(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        const double lo = a + width * static_cast<double>(c);
        const double hi = (c + 1 == cells) ? b : lo + width;
        sum += gauss(f, lo, hi, rule);
    }
    return sum;
}

// Composite GL8 whose cell width is bounded by `max_width(t)` evaluated at
// the left edge of each cell. Used for integrands with growing local
// frequency; max_width must be positive.
template <class F, class W>
auto adaptive_cells(F&& f, double a, double b, W&& max_width)
{
    decltype(f(a)) sum{};
    const Rule& rule = gauss_legendre(8);
    double lo = a;
    while (lo < b) {
        double w = max_width(lo);
        // the right edge may be more oscillatory than the left one
        while (w > 1e-300 && max_width(std::min(b, lo + w)) < 0.5 * w) w *= 0.5;
        const double hi = (lo + w >= b) ? b : lo + w;
        sum += gauss(f, lo, hi, rule);
        lo = hi;
    }
    return sum;
}

// Gauss-Chebyshev (first kind): int_a^b g(t) / sqrt((t-a)(b-t)) dt.
template <class G>
double chebyshev_first(G&& g, double a, double b, int n)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double theta = (2.0 * k - 1.0) * 3.14159265358979323846 / (2.0 * n);
        sum += g(mid + half * std::cos(theta));
    }
    return sum * 3.14159265358979323846 / n;
}

} // namespace dirac::quad
