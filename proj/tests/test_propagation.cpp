#include "dirac/propagation.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace dirac;

namespace {

// |computed / expected - 1| for an entry stored as e^{log_scale} * t
double rel_entry(const TransferMatrix& T, int k, cplx log_expected)
{
    const auto c = static_cast<std::size_t>(k % 2);
    const cplx ratio = std::exp(std::log(T.t[static_cast<std::size_t>(k)]) + T.log_scale[c] - log_expected);
    return std::abs(ratio - 1.0);
}

// Constant-coefficient oracle: exp(xA) = cosh(mu x) I + sinh(mu x)/mu A with
// A = [[-iz, ic], [-i conj c, iz]] and mu^2 = |c|^2 - z^2.
Mat2 constant_exact(cplx c, double x, cplx z)
{
    const cplx mu = std::sqrt(std::norm(c) - z * z);
    const cplx ch = std::cosh(mu * x);
    const cplx sh = std::abs(mu) > 0.0 ? std::sinh(mu * x) / mu : cplx(x);
    return {ch - kI * z * sh, kI * c * sh, -kI * std::conj(c) * sh, ch + kI * z * sh};
}

cplx sqrt_upper(cplx w)
{
    const cplx r = std::sqrt(w);
    return r.imag() < 0.0 ? -r : r;
}

} // namespace

TEST_CASE("free transfer matrix is diagonal exponential")
{
    const auto phi = OperatorData::zero();
    for (double x : {1.0, 37.5, 100.0}) {
        for (cplx z : {cplx(0.0, 0.1), cplx(3.0, 0.5), cplx(-7.0, 7.0), cplx(0.0, 10.0), cplx(10.0, 0.0),
                       cplx(6.0, -8.0)}) {
            const auto T = transfer_matrix(phi, x, z);
            CHECK(rel_entry(T, 0, -kI * z * x) < 1e-8);
            CHECK(rel_entry(T, 3, kI * z * x) < 1e-8);
            CHECK(T.t[1] == cplx(0.0));
            CHECK(T.t[2] == cplx(0.0));
            CHECK(residuals_of(T).det < 1e-8);
        }
    }
}

TEST_CASE("constant transfer matrix matches the matrix exponential")
{
    for (cplx c : {cplx(1.0), cplx(0.6, -0.8)}) {
        const auto phi = OperatorData::constant(c);
        for (cplx z : {cplx(0.0, 1.0), cplx(3.0, 0.5), cplx(0.5, 0.0), cplx(2.0, -1.0)}) {
            const double x = 10.0;
            const auto T = transfer_matrix(phi, x, z);
            const Mat2 E = constant_exact(c, x, z);
            double size = 0.0;
            for (cplx e : E) size = std::max(size, std::abs(e));
            for (int k = 0; k < 4; ++k) CHECK(std::abs(T.entry(k) - E[static_cast<std::size_t>(k)]) < 1e-8 * size);
        }
    }
}

TEST_CASE("conservation residuals stay small")
{
    const std::vector<OperatorData> fams{OperatorData::zero(), OperatorData::constant(1.0), OperatorData::chirp(2.0),
                                         OperatorData::gated_chirp(2.0, 2.0)};
    for (const auto& phi : fams) {
        for (cplx z : {cplx(0.0, 1.0), cplx(3.0, 0.5), cplx(-2.0, 0.1)}) {
            const auto r = conservation_residuals(phi, 10.0, z);
            CHECK(r.det <= 1e-6);
            CHECK(r.energy <= 1e-6);
        }
    }
    const auto r0 = conservation_residuals(OperatorData::zero(), 5.0, {1.0, 1.0});
    CHECK(r0.det < 1e-10);
    CHECK(r0.energy < 1e-10);
}

TEST_CASE("residuals converge at fourth order")
{
    for (const auto& phi : {OperatorData::constant(1.0), OperatorData::chirp(2.0)}) {
        const cplx z(1.0, 1.0);
        PropagationOptions coarse;
        coarse.forced_step = 0.1;
        PropagationOptions fine = coarse;
        fine.forced_step = 0.05;
        const auto a = conservation_residuals(phi, 5.0, z, coarse);
        const auto b = conservation_residuals(phi, 5.0, z, fine);
        CHECK(a.det / b.det >= 8.0);
        CHECK(a.energy / b.energy >= 8.0);
    }
}

TEST_CASE("log-determinant tracks the direct determinant while it is representable")
{
    const auto T = transfer_matrix(OperatorData::chirp(2.0), 3.0, {1.0, 0.3});
    CHECK(direct_det_residual(T) < 1e-9);
    CHECK(std::abs(residuals_of(T).det - direct_det_residual(T)) < 1e-9);
}

TEST_CASE("Dirichlet solution")
{
    const auto free = OperatorData::zero();
    const auto u0 = dirichlet_solution(OperatorData::chirp(2.0), 0.0, {1.0, 2.0});
    CHECK(u0.logmag == 0.0);
    CHECK(u0.direction.u1 == cplx(1.0));
    CHECK(u0.direction.u2 == cplx(1.0));

    const double y = 0.7;
    const double x = 30.0;
    const auto u = dirichlet_solution(free, x, {0.0, y});
    CHECK(std::abs(u.logmag - y * x) < 1e-9 * y * x);
    CHECK(std::abs(u.direction.u1 - 1.0) < 1e-9);
    CHECK(std::abs(u.direction.u2 - std::exp(-2.0 * y * x)) < 1e-12);

    // constant c = 1, z = 0.5i: the dominant rate is Im sqrt(z^2 - 1)
    const auto v = dirichlet_solution(OperatorData::constant(1.0), 20.0, {0.0, 0.5});
    CHECK(std::abs(v.logmag / 20.0 - sqrt_upper(cplx(-1.25)).imag()) < 0.05);
}

TEST_CASE("growth field")
{
    const auto free = OperatorData::zero();
    const double y = 0.5;
    for (double x : {2.0, 40.0}) {
        const double expected = std::log(std::exp(y * x) - std::exp(-y * x)) / x;
        CHECK(std::abs(growth_h(free, x, {0.0, y}) - expected) < 1e-9);
    }

    const auto c1 = OperatorData::constant(1.0);
    const cplx z(2.0, 1.0);
    CHECK(std::abs(growth_h(c1, 200.0, z) - sqrt_upper(z * z - 1.0).imag()) < 0.05);

    for (const auto& phi : {c1, OperatorData::chirp(2.0), OperatorData::gated_chirp(2.0, 2.0)})
        for (cplx w : {cplx(0.3, 0.7), cplx(-2.0, 1.5)}) CHECK(growth_h(phi, 20.0, w) == growth_h(phi, 20.0, std::conj(w)));

    // u1 = u2 identically for the free operator at z = 0
    CHECK(growth_h(free, 1.0, 0.0) == kMinusInfinity);
}

TEST_CASE("growth field liminf stays above zero")
{
    std::vector<double> xs;
    for (double x = 50.0; x <= 150.0; x += 25.0) xs.push_back(x);
    const std::vector<cplx> zs{{0.0, 0.2}, {1.0, 0.5}, {-2.0, 0.3}};
    for (const auto& phi : {OperatorData::chirp(2.0), OperatorData::gated_chirp(2.0, 2.0), OperatorData::constant(1.0)}) {
        const auto field = growth_field(phi, zs, xs);
        for (double h : field.h) CHECK(h >= -0.05);
    }
}

TEST_CASE("serial and parallel growth fields agree bit for bit")
{
    const auto phi = OperatorData::chirp(2.0);
    const std::vector<cplx> zs{{0.0, 1.0}, {1.0, -0.5}, {-3.0, 2.0}, {0.5, 0.25}};
    const std::vector<double> xs{1.0, 5.0, 12.0};
    const auto a = growth_field(phi, zs, xs, Exec::serial);
    const auto b = growth_field(phi, zs, xs, Exec::parallel);
    CHECK(a.h == b.h);
    // checkpoints split the step sequence, so only stepper-level agreement
    CHECK(std::abs(a.at(1, 2) - growth_h(phi, 12.0, zs[1])) < 1e-10);
}

TEST_CASE("Riccati flow for the Schur function")
{
    const auto free = OperatorData::zero();
    const cplx z(0.5, 0.8);
    CHECK(riccati_schur(free, 0.0, 3.0, z, 0.0) == cplx(0.0));
    const cplx sb(0.3, -0.6);
    const cplx s = riccati_schur(free, 1.0, 4.0, z, sb);
    CHECK(std::abs(s - sb * std::exp(2.0 * kI * z * 3.0)) < 1e-9);
    CHECK(std::abs(std::abs(s) - std::abs(sb) * std::exp(-2.0 * z.imag() * 3.0)) < 1e-9);

    // contraction of the flow: two starts approach at the exponential rate
    for (const auto& phi : {OperatorData::constant(1.0), OperatorData::chirp(2.0)}) {
        const double a = 2.0;
        const double b = 5.0;
        const cplx w(1.0, 0.6);
        const cplx s1 = riccati_schur(phi, a, b, w, {0.9, 0.0});
        const cplx s2 = riccati_schur(phi, a, b, w, {-0.2, -0.7});
        const double bound = 2.0 * std::exp(-2.0 * w.imag() * (b - a) + 2.0 * phi.integral_abs(a, b));
        CHECK(std::abs(s1 - s2) <= bound);
        CHECK(std::abs(s1) <= 1.0);
    }

    CHECK_THROWS_AS(riccati_schur(free, 0.0, 1.0, {1.0, -1.0}, 0.0), DomainError);
    CHECK_THROWS_AS(riccati_schur(free, 1.0, 1.0, {1.0, 1.0}, 0.0), DomainError);
}

TEST_CASE("Prufer phase")
{
    CHECK(std::abs(prufer_phase(OperatorData::zero(), 7.0, 1.3) + 2.0 * 1.3 * 7.0) < 1e-10);
    CHECK(prufer_phase(OperatorData::zero(), 7.0, 0.0) == 0.0);

    // cross-method: the Dirichlet solution's accumulated phases give the unwrapped arg(u1 / u2)
    for (const auto& phi : {OperatorData::zero(), OperatorData::constant(1.0)}) {
        for (double z : {3.0, 0.4, -1.7}) {
            const double theta = prufer_phase(phi, 10.0, z);
            const auto u = dirichlet_solution(phi, 10.0, z);
            CHECK(std::abs(theta - (u.phase1 - u.phase2)) < 1e-6);
            const auto T = transfer_matrix(phi, 10.0, z);
            const cplx ratio = (T.entry(0) + T.entry(1)) / (T.entry(2) + T.entry(3));
            CHECK(std::abs(std::polar(1.0, theta) - ratio) < 1e-6);
        }
    }

    const auto prof = prufer_profile(OperatorData::constant(1.0), {1.0, 2.0, 10.0}, 3.0);
    CHECK(prof.back() == prufer_phase(OperatorData::constant(1.0), 10.0, 3.0));
}
