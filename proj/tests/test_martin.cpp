#include "dirac/martin.hpp"
#include "dirac/quadrature.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

using namespace dirac;

namespace {

std::vector<cplx> random_points(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-4.0, 4.0);
    std::uniform_real_distribution<double> im(-3.0, 3.0);
    std::vector<cplx> zs;
    for (std::size_t k = 0; k < n; ++k) zs.emplace_back(re(rng), im(rng));
    return zs;
}

} // namespace

TEST_CASE("gap set parsing")
{
    CHECK(GapSet::parse("free").gaps.empty());
    CHECK(GapSet::parse("").gaps.empty());
    const auto g = GapSet::parse("(2, 3) (-1,1)");
    REQUIRE(g.gaps.size() == 2);
    CHECK(g.gaps[0] == std::pair<double, double>{-1.0, 1.0});
    CHECK(g.in_gap(2.5));
    CHECK_FALSE(g.in_gap(1.5));
    CHECK(g.endpoint_distance(1.25) == 0.25);
    CHECK_THROWS_AS(GapSet::parse("(1,0)"), ConfigError);
    CHECK_THROWS_AS(GapSet::parse("(0,2) (1,3)"), ConfigError);
    CHECK_THROWS_AS(GapSet::parse("(0,x)"), ConfigError);
    CHECK_THROWS_AS(GapSet::parse("0,1"), ConfigError);
    CHECK_THROWS_AS(GapSet::from({{0.0, 0.0}}), DomainError);
}

TEST_CASE("Martin function without gaps")
{
    const auto m = martin_build(GapSet::line());
    CHECK(m.bE == 0.0);
    for (cplx z : random_points(20, 1)) CHECK(martin_eval(m, z) == std::abs(z.imag()));
}

TEST_CASE("Martin function of one gap")
{
    for (double c : {0.5, 1.0, 2.0}) {
        const auto m = martin_build(GapSet::from({{-c, c}}));
        REQUIRE(m.critical_points.size() == 1);
        CHECK(std::abs(m.critical_points[0]) < 1e-12);
        CHECK(std::abs(m.bE - c * c) < 1e-4);
        CHECK(m.gap_residual <= 1e-10);
        CHECK(std::abs(m.normalization) < 1e-6);
        for (cplx z : random_points(100, 7)) CHECK(std::abs(martin_eval(m, z) - one_gap_martin(-c, c, z)) < 1e-6);
    }
    const double a = 0.5;
    const double b = 2.5;
    const auto m = martin_build(GapSet::from({{a, b}}));
    CHECK(std::abs(m.bE - (b - a) * (b - a) / 4.0) < 1e-4);
    CHECK(std::abs(m.critical_points[0] - 0.5 * (a + b)) < 1e-10);
    for (double t : {0.6, 1.0, 1.5, 2.4}) CHECK(std::abs(martin_eval(m, t) - one_gap_martin(a, b, t)) < 1e-8);
}

TEST_CASE("Martin function properties")
{
    const std::vector<GapSet> sets{GapSet::from({{-1.0, 1.0}}), GapSet::from({{-2.0, -1.0}, {0.5, 1.5}}),
                                   GapSet::from({{-3.0, -2.5}, {-0.2, 0.4}, {1.0, 2.2}})};
    for (const auto& gs : sets) {
        const auto m = martin_build(gs);
        CHECK(m.gap_residual <= 1e-10);
        CHECK(m.bE > 0.0);
        for (std::size_t j = 0; j < gs.gaps.size(); ++j) {
            CHECK(m.critical_points[j] > gs.gaps[j].first);
            CHECK(m.critical_points[j] < gs.gaps[j].second);
        }
        // vanishes on the bands, positive in the gaps
        for (double t : {-4.0, -2.3, 0.45, 2.5, 5.0})
            if (!gs.in_gap(t)) CHECK(martin_eval(m, t) < 1e-8);
        for (const auto& [a, b] : gs.gaps) CHECK(martin_eval(m, 0.5 * (a + b)) > 0.0);
        for (cplx z : random_points(40, 3)) {
            const double v = martin_eval(m, z);
            CHECK(v >= std::abs(z.imag()) - 1e-8);
            CHECK(std::abs(v - martin_eval(m, std::conj(z))) < 1e-12);
        }
        // translation covariance
        const auto moved = martin_build(gs.shifted(0.75));
        CHECK(std::abs(moved.bE - m.bE) < 1e-6);
        for (cplx z : random_points(10, 5))
            CHECK(std::abs(martin_eval(moved, z + 0.75) - martin_eval(m, z)) < 1e-8);
    }
    // a larger gap raises the function and the constant
    const auto small = martin_build(GapSet::from({{-0.5, 0.5}, {1.0, 1.5}}));
    const auto big = martin_build(GapSet::from({{-0.7, 0.7}, {1.0, 1.5}}));
    CHECK(big.bE > small.bE);
    for (cplx z : random_points(20, 9)) CHECK(martin_eval(big, z) >= martin_eval(small, z) - 1e-9);

    const auto one = martin_build(GapSet::from({{-1.0, 1.0}}));
    const std::vector<cplx> zs = random_points(32, 11);
    const auto par = martin_table(one, zs, Exec::parallel);
    const auto ser = martin_table(one, zs, Exec::serial);
    CHECK(par == ser);
}

TEST_CASE("Martin measure")
{
    const auto line = martin_measure(martin_build(GapSet::line()), -2.0, 2.0, 16);
    for (double v : line.masses) CHECK(std::abs(v - 0.25 / kPi) < 1e-12);

    const auto m = martin_build(GapSet::from({{-1.0, 1.0}}));
    auto density = [](double t) { return std::abs(t) / (kPi * std::sqrt(t * t - 1.0)); };
    for (double t : {1.2, 1.5, 3.0, -2.0}) CHECK(std::abs(martin_density(m, t) - density(t)) < 1e-6);
    const auto h = martin_measure(m, 1.5, 2.5, 32);
    for (std::size_t b = 0; b < h.masses.size(); ++b) {
        const double exact = quad::composite(density, h.bin_edges[b], h.bin_edges[b + 1], 4, quad::gauss_legendre(8));
        CHECK(std::abs(h.masses[b] - exact) < 1e-6 * exact);
    }
    const auto inside = martin_measure(m, -0.5, 0.5, 8);
    for (double v : inside.masses) CHECK(v == 0.0);
    CHECK_THROWS_AS(martin_measure(m, 0.5, 1.5, 8), DomainError);
}

TEST_CASE("zero counting")
{
    // free operator: zeros of u1 - u2 at kpi/x
    const double x = 100.0;
    const auto fine = zero_counting_detail(OperatorData::zero(), x, -3.2, 3.2, 16);
    for (std::size_t b = 0; b < fine.counts.size(); ++b) {
        const double lo = fine.histogram.bin_edges[b];
        const double hi = fine.histogram.bin_edges[b + 1];
        const long lattice = static_cast<long>(std::floor(hi * x / kPi) - std::floor(lo * x / kPi));
        CHECK(fine.counts[b] == lattice);
        CHECK(fine.histogram.masses[b] == static_cast<double>(lattice) / x);
    }
    long total = 0;
    for (long c : fine.counts) total += c;
    CHECK(total == 203);

    ZeroCountOptions locate;
    locate.locate = true;
    const auto z = zero_counting_detail(OperatorData::zero(), x, 0.05, 0.4, 2, locate);
    REQUIRE(z.zeros.size() == 11);
    for (double t : z.zeros) {
        const double k = std::round(t * x / kPi);
        CHECK(std::abs(t - k * kPi / x) < 1e-7);
    }

    // density of zeros tends to 1/pi for the free case
    const auto d = zero_counting(OperatorData::zero(), 200.0, -1.0, 1.0, 4);
    CHECK(std::abs(d.total_mass - 2.0 / kPi) < 0.02 * 2.0 / kPi);

    // constant data opens the gap (-|c|, |c|): few zeros inside
    const auto c = zero_counting(OperatorData::constant(1.0), 200.0, -0.8, 0.8, 4);
    CHECK(c.total_mass <= 3.0 / 200.0);
    const auto band = zero_counting(OperatorData::constant(1.0), 200.0, 1.5, 3.0, 4);
    CHECK(band.total_mass > 0.5);

    // counts do not depend on how the grid was refined
    ZeroCountOptions serial;
    serial.exec = Exec::serial;
    const auto chirp = OperatorData::chirp(2.0);
    const auto a = zero_counting_detail(chirp, 30.0, -2.0, 2.0, 8);
    const auto b = zero_counting_detail(chirp, 30.0, -2.0, 2.0, 8, serial);
    CHECK(a.counts == b.counts);
    const auto c16 = zero_counting_detail(chirp, 30.0, -2.0, 2.0, 16);
    for (std::size_t k = 0; k < 8; ++k) CHECK(a.counts[k] == c16.counts[2 * k] + c16.counts[2 * k + 1]);

    CHECK_THROWS_AS(zero_counting(chirp, 0.0, -1.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(zero_counting(chirp, 10.0, 1.0, -1.0, 2), DomainError);
}
