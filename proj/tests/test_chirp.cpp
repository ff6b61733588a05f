#include "dirac/chirp.hpp"
#include "dirac/quadrature.hpp"

#include "doctest.h"

#include <cmath>

using namespace dirac;

namespace {

// Plain composite Gauss-Legendre with cells resolving the local frequency.
template <class F>
cplx brute(F&& f, double a, double b, double rate)
{
    const auto cells = static_cast<std::size_t>(std::ceil((b - a) * rate / 0.3)) + 1;
    return quad::composite(f, a, b, cells, quad::gauss_legendre(8));
}

} // namespace

TEST_CASE("tail differences match direct quadrature of the chirp")
{
    for (double alpha : {1.5, 2.0, 3.0}) {
        chirp::PowerTail P(alpha);
        const double a = 0.5 * P.zone_start();
        const double b = P.zone_start() + 3.0;
        const double rate = alpha * std::pow(b, alpha - 1.0);
        const cplx ref = brute([&](double s) { return std::polar(1.0, std::pow(s, alpha)); }, a, b, rate);
        CHECK(std::abs(P.integral(a, b) - ref) < 1e-12);
        const cplx far = brute([&](double s) { return std::polar(1.0, std::pow(s, alpha)); }, 50.0, 52.0,
                               alpha * std::pow(52.0, alpha - 1.0));
        CHECK(std::abs(P.integral(50.0, 52.0) - far) < 1e-12);
    }
}

TEST_CASE("scaled integral equals the rescaled tail")
{
    chirp::PowerTail P(2.0);
    const double rate = 2.0 * 2.0 * 30.0;
    const cplx ref = brute([](double s) { return std::polar(1.0, 2.0 * s * s); }, 20.0, 30.0, rate);
    CHECK(std::abs(P.integral_scaled(2.0, 20.0, 30.0) - ref) < 1e-12);
}

TEST_CASE("Fresnel limit of the full tail")
{
    // int_0^inf e^{i s^2} ds = (sqrt(pi)/2) e^{i pi/4}
    chirp::PowerTail P(2.0);
    const cplx expected = 0.5 * std::sqrt(M_PI) * std::polar(1.0, M_PI / 4.0);
    CHECK(std::abs(P.tail(0.0) - expected) < 1e-12);
}

TEST_CASE("tail integrals and products against brute force")
{
    for (double alpha : {1.5, 2.0, 3.0}) {
        chirp::PowerTail P(alpha);
        const double a = P.zone_start() + 0.3;
        const double b = a + 2.5;
        const double rate = 2.0 * alpha * std::pow(b + 1.0, alpha - 1.0);
        for (double eps : {0.25, 1.0}) {
            const cplx p1 = brute([&](double t) { return P.tail(t + eps); }, a, b, rate);
            CHECK(std::abs(P.tail_integral(a, b, eps) - p1) < 1e-14);
            const cplx p2 = brute([&](double t) { return P.tail(t) * P.tail(t + eps); }, a, b, rate);
            CHECK(std::abs(P.tail_product(a, b, 0.0, eps) - p2) < 1e-15);
            const cplx p2d = brute([&](double t) { return P.tail(t + eps) * P.tail(t + eps); }, a, b, rate);
            CHECK(std::abs(P.tail_product(a, b, eps, eps) - p2d) < 1e-15);
            const cplx p3 = brute([&](double t) { return P.tail(t) * std::conj(P.tail(t + eps)); }, a, b, rate);
            CHECK(std::abs(P.tail_cross(a, b, 0.0, eps) - p3) < 1e-14);
            CHECK(std::abs(P.tail_cross(a, b, eps, 0.0) - std::conj(p3)) < 1e-14);
        }
    }
}

TEST_CASE("deformed cross product far out")
{
    chirp::PowerTail P(2.0);
    for (double eps : {0.25, 1.0}) {
        auto f = [&](double t) {
            return std::polar(1.0, t * t - (t + eps) * (t + eps)) * P.envelope(t)
                * std::conj(P.envelope(t + eps));
        };
        const cplx ref = brute(f, 1000.0, 1030.0, 2.0 * eps);
        CHECK(std::abs(P.tail_cross(1000.0, 1030.0, 0.0, eps) - ref) < 1e-15);
    }
}

TEST_CASE("chirp exponent must exceed one")
{
    CHECK_THROWS_AS(chirp::PowerTail(1.0), DomainError);
}
