#include "dirac/quadrature.hpp"

#include "doctest.h"

#include <cmath>

using namespace dirac;

TEST_CASE("Gauss-Legendre rules integrate polynomials of degree 2n-1 exactly")
{
    for (int n : {2, 3, 4, 8, 16, 32}) {
        const auto& rule = quad::gauss_legendre(n);
        CHECK(rule.nodes.size() == static_cast<std::size_t>(n));
        const int deg = 2 * n - 1;
        const double got = quad::gauss([&](double t) { return std::pow(t, deg - 1); }, 0.0, 1.0, rule);
        CHECK(got == doctest::Approx(1.0 / deg).epsilon(1e-13));
    }
}

TEST_CASE("Gauss-Laguerre moments")
{
    for (int n : {8, 16, 24, 32, 48}) {
        const auto& rule = quad::gauss_laguerre(n);
        double m0 = 0.0, m3 = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            m0 += rule.weights[k];
            m3 += rule.weights[k] * std::pow(rule.nodes[k], 3);
        }
        CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(m3 == doctest::Approx(6.0).epsilon(1e-12));
    }
}

TEST_CASE("composite and adaptive cells")
{
    auto f = [](double t) { return std::cos(40.0 * t); };
    const double exact = std::sin(40.0 * 3.0) / 40.0;
    CHECK(quad::composite(f, 0.0, 3.0, 64, quad::gauss_legendre(8)) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(quad::adaptive_cells(f, 0.0, 3.0, [](double) { return 0.05; }) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("Gauss-Chebyshev absorbs the endpoint square roots")
{
    // int_{-1}^{1} t^2 / sqrt(1 - t^2) dt = pi / 2
    const double got = quad::chebyshev_first([](double t) { return t * t; }, -1.0, 1.0, 16);
    CHECK(got == doctest::Approx(M_PI / 2).epsilon(1e-14));
}
