#include "dirac/series.hpp"
#include "dirac/quadrature.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace dirac;

namespace {

// I_1(a, a + L) for constant c: |c|^2 ((e^{2izL} - 1)/(2iz) - L) / (2iz)
cplx constant_I1(cplx c, double L, cplx z)
{
    const cplx k = 2.0 * kI * z;
    return std::norm(c) * ((std::exp(k * L) - 1.0) / k - L) / k;
}

// Composite GL8 on cells of width <= h, split at the breakpoints of phi.
template <class F>
cplx split_quad(const OperatorData& phi, F&& f, double a, double b, double h)
{
    std::vector<double> cuts{a};
    for (double e : phi.breakpoints(a, b))
        if (e > a && e < b) cuts.push_back(e);
    cuts.push_back(b);
    cplx sum = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const auto cells = static_cast<std::size_t>(std::ceil((cuts[k + 1] - cuts[k]) / h));
        if (cells > 0) sum += quad::composite(f, cuts[k], cuts[k + 1], cells, quad::gauss_legendre(8));
    }
    return sum;
}

// Brute force: nested Gauss-Legendre.
cplx brute_I1(const OperatorData& phi, double a, double b, cplx z, double h)
{
    auto inner = [&](double t1) {
        return split_quad(phi, [&](double t2) { return std::exp(2.0 * kI * z * (t2 - t1)) * phi(t2); }, t1, b, h);
    };
    return split_quad(phi, [&](double t1) { return std::conj(phi(t1)) * inner(t1); }, a, b, h);
}

cplx brute_functional(const OperatorData& phi, double x, cplx z, double h)
{
    auto inner = [&](double t) {
        return split_quad(phi, [&](double s) { return std::exp(2.0 * kI * z * (s - t)) * phi(s); }, t, t + 1.0, h);
    };
    return split_quad(phi, [&](double t) { return std::conj(phi(t)) * inner(t); }, 0.0, x, h) / x;
}

} // namespace

TEST_CASE("simplex integrals: closed forms")
{
    CHECK(simplex_I(OperatorData::zero(), 1, 0.0, 1.0, {0.0, 2.0}).value == cplx(0.0));
    for (double y : {0.5, 2.0, 9.0}) {
        const cplx c = 1.5;
        const auto r = simplex_I(OperatorData::constant(c), 1, 0.0, 1.0, {0.0, y});
        const double expected = 2.25 * (2.0 * y - 1.0 + std::exp(-2.0 * y)) / (4.0 * y * y);
        CHECK(std::abs(r.value - expected) < 1e-12);
    }
    const cplx c(0.3, -0.9);
    for (cplx z : {cplx(1.0, 0.5), cplx(-3.0, 2.0)}) {
        const auto r = simplex_I(OperatorData::constant(c), 1, 2.0, 3.7, z);
        CHECK(std::abs(r.value - constant_I1(c, 1.7, z)) < 1e-12);
    }
}

TEST_CASE("simplex integrals: brute-force quadrature")
{
    const auto chirp = OperatorData::chirp(2.0);
    for (cplx z : {cplx(0.0, 1.0), cplx(2.0, 0.5)}) {
        const cplx fast = simplex_I(chirp, 1, 1.0, 4.0, z).value;
        CHECK(std::abs(fast - brute_I1(chirp, 1.0, 4.0, z, 0.05)) < 1e-9);
    }
    const auto gated = OperatorData::gated_chirp(2.0, 2.0);
    CHECK(std::abs(simplex_I(gated, 1, 0.5, 4.5, {1.0, 1.0}).value - brute_I1(gated, 0.5, 4.5, {1.0, 1.0}, 0.05)) <
          1e-9);
}

TEST_CASE("simplex series sums to the transfer matrix entry")
{
    // 1 + sum_n I_n(a, b) = t1 e^{iz(b - a)} for the propagator from a to b
    const auto grid = OperatorData::grid_samples(0.25, {0.5, cplx(0.0, 1.0), -0.7, 0.2, 1.0, cplx(0.3, 0.3)});
    for (const auto& phi : {OperatorData::constant(1.0), OperatorData::chirp(2.0), OperatorData::gated_chirp(2.0, 2.0),
                            grid}) {
        for (cplx z : {cplx(0.0, 3.0), cplx(1.5, 2.0)}) {
            const double a = 0.25;
            const double b = 1.75;
            const auto T = transfer_matrix_between(phi, a, b, z);
            const cplx lhs = 1.0 + series_sum(phi, a, b, z).partial;
            const cplx rhs = T.entry(0) * std::exp(kI * z * (b - a));
            CHECK(std::abs(lhs - rhs) <= series_sum(phi, a, b, z).tail_bound + 1e-9);
        }
    }
}

TEST_CASE("simplex bound")
{
    for (const auto& phi : {OperatorData::constant(cplx(0.0, 2.0)), OperatorData::chirp(2.0),
                            OperatorData::gated_chirp(2.0, 2.0)}) {
        for (cplx z : {cplx(0.0, 0.2), cplx(1.0, 1.0), cplx(-2.0, 5.0)}) {
            for (const auto& [a, b] : {std::pair{0.0, 1.0}, std::pair{0.5, 3.0}, std::pair{2.0, 2.3}}) {
                for (const auto& term : simplex_series(phi, 3, a, b, z)) CHECK(std::abs(term.value) <= term.bound);
            }
        }
    }
    CHECK_THROWS_AS(simplex_I(OperatorData::zero(), 4, 0.0, 1.0, {0.0, 1.0}), DomainError);
}

TEST_CASE("short-hop logarithm")
{
    for (const auto& phi : {OperatorData::constant(1.0), OperatorData::chirp(2.0)}) {
        const double t = triple_norm(phi, 2, 3.0);
        for (double y : {4.0, 8.0, 16.0}) {
            const cplx z(0.0, y);
            const auto s = series_sum(phi, 1.0, 3.0, z);
            const cplx i1 = simplex_I(phi, 1, 1.0, 3.0, z).value;
            CHECK(std::abs(log1p(s.partial) - i1) + 2.0 * s.tail_bound <= 10.0 * std::pow(t, 4) / (y * y));
        }
    }
}

TEST_CASE("log-ratio expansion against the propagated Weyl solution")
{
    const cplx z(0.0, 8.0);
    CHECK(log_ratio_expansion(OperatorData::zero(), 0.0, z) == cplx(0.0));
    CHECK(std::abs(log_ratio_propagated(OperatorData::zero(), 0.0, z)) < 1e-10);

    const auto c1 = OperatorData::constant(1.0);
    CHECK(std::abs(log_ratio_expansion(c1, 0.0, z) - log_ratio_propagated(c1, 0.0, z)) <= 10.0 / 64.0);
    const auto chirp = OperatorData::chirp(2.0);
    CHECK(std::abs(log_ratio_expansion(chirp, 3.0, z) - log_ratio_propagated(chirp, 3.0, z)) <= 10.0 / 64.0);

    CHECK_THROWS_AS(log_ratio_expansion(c1, 0.0, {0.0, 3.0}), DomainError);
}

TEST_CASE("kernel w")
{
    const cplx z(0.0, 1.5);
    CHECK(kernel_w(z, 0.5) == cplx(0.0));
    CHECK(std::abs(kernel_w(z, -1.0) - 2.0 * kI * z * std::exp(-3.0)) < 1e-15);
    CHECK(std::abs(kernel_w_l1(z) - (1.0 - std::exp(-3.0))) < 1e-15);
    const cplx w(2.0, 0.7);
    const double numeric = quad::composite([&](double t) { return std::abs(kernel_w(w, t)); }, -1.0, 0.0, 16,
                                           quad::gauss_legendre(8));
    CHECK(std::abs(kernel_w_l1(w) - numeric) < 1e-13);
    CHECK(kernel_w_l1(w) <= std::abs(w) / w.imag());
}

TEST_CASE("two-term functional")
{
    CHECK(two_term_functional(OperatorData::zero(), 10.0, {0.0, 1.0}) == cplx(0.0));
    const cplx c(0.8, -0.6);
    for (cplx z : {cplx(0.0, 2.0), cplx(1.0, 0.3)}) {
        const cplx expected = std::norm(c) * (std::exp(2.0 * kI * z) - 1.0) / (2.0 * kI * z);
        CHECK(std::abs(two_term_functional(OperatorData::constant(c), 37.0, z) - expected) < 1e-12);
    }

    for (const auto& phi : {OperatorData::chirp(2.0), OperatorData::gated_chirp(2.0, 2.0),
                            OperatorData::grid_samples(0.3, {1.0, -1.0, cplx(0.0, 2.0), 0.5})}) {
        const cplx z(0.5, 2.0);
        const double x = 12.0;
        CHECK(std::abs(two_term_functional(phi, x, z) - brute_functional(phi, x, z, 0.02)) < 1e-9);
        // Cauchy-Schwarz and Young with ||w_z||_1 |z|^-1 <= 1 / Im z
        const double bound = std::sqrt(cesaro_l2(phi, x) * cesaro_l2(phi, x + 1.0) * (x + 1.0) / x) / (2.0 * z.imag());
        CHECK(std::abs(two_term_functional(phi, x, z)) <= bound);
    }
}

TEST_CASE("growth residual for constant data matches the closed form")
{
    const double x = 60.0;
    const cplx c = 1.0;
    for (double y : {4.0, 16.0}) {
        const cplx z(0.0, y);
        const cplx mu = std::sqrt(1.0 - z * z);
        const cplx e = std::exp(-2.0 * mu * x);
        // log u1 from u1 = cosh(mu x) + sinh(mu x) (ic - iz) / mu
        const cplx log_u1 = mu * x + std::log(0.5 * (1.0 + e) + 0.5 * (1.0 - e) * (kI * c - kI * z) / mu);
        const cplx F = (std::exp(2.0 * kI * z) - 1.0) / (2.0 * kI * z);
        const auto r = growth_residual(OperatorData::constant(c), x, z);
        CHECK(std::abs(r.rate - (log_u1 / x + kI * z)) < 1e-9);
        CHECK(std::abs(r.residual - std::abs(log_u1 / x + kI * z - F)) < 1e-9);
        const auto w = growth_residual_between(OperatorData::constant(c), 20.0, x, z);
        CHECK(std::abs(w.residual - std::abs(mu + kI * z - F)) < 1e-9);
    }
    CHECK(loglog_slope({1.0, 2.0, 4.0}, {1.0, 0.25, 0.0625}) == doctest::Approx(-2.0));
}

TEST_CASE("growth residual table: serial and parallel paths agree")
{
    const auto phi = OperatorData::chirp(2.0);
    const std::vector<cplx> zs{{0.0, 8.0}, {1.0, 4.0}, {-2.0, 16.0}};
    const auto par = growth_residual_table(phi, 5.0, 20.0, zs, Exec::parallel);
    const auto ser = growth_residual_table(phi, 5.0, 20.0, zs, Exec::serial);
    REQUIRE(par.size() == zs.size());
    for (std::size_t k = 0; k < zs.size(); ++k) {
        CHECK(par[k].residual == ser[k].residual);
        CHECK(par[k].residual == growth_residual_between(phi, 5.0, 20.0, zs[k]).residual);
    }
}
