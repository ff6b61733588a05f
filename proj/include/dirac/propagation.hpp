#pragma once

#include "dirac/common.hpp"
#include "dirac/operator_data.hpp"
#include "dirac/parallel.hpp"

#include <array>
#include <limits>
#include <vector>

namespace dirac {

// Step control for the RK4 integrator: h <= max_step, h (|z| + |phi|) <=
// z_phase and h * (chirp rate) <= oscillation_phase. A positive forced_step
// overrides the adaptive bounds (used to probe the convergence order).
struct PropagationOptions {
    double max_step = 0.01;
    double z_phase = 0.005;
    double oscillation_phase = 0.05;
    double forced_step = 0.0;
};

struct Spinor {
    cplx u1 = 1.0;
    cplx u2 = 1.0;
};

using Mat2 = std::array<cplx, 4>; // row-major

// T(x, z) with column c stored as e^{log_scale[c]} times the unit-size
// column of t (row-major [[t1, t2], [t3, t4]]). The columns grow at
// different rates, so a single scale would underflow one of them.
// gram(i, j) holds e^{-(log_scale[i] + log_scale[j])} (int_0^x T*T)(i, j).
struct TransferMatrix {
    Mat2 t{1.0, 0.0, 0.0, 1.0};
    std::array<double, 2> log_scale{0.0, 0.0};
    Mat2 gram{0.0, 0.0, 0.0, 0.0};
    // log det T accumulated from the per-step propagators
    cplx log_det = 0.0;
    double x = 0.0;
    cplx z = 0.0;

    // Unscaled entry k in 0..3; overflows for large growth.
    cplx entry(int k) const { return std::exp(log_scale[static_cast<std::size_t>(k % 2)]) * t[static_cast<std::size_t>(k)]; }
};

// A solution e^{logmag} * direction with max(|d1|, |d2|) = 1. The phases are
// the continuously accumulated arguments of u1 and u2.
struct ScaledSolution {
    Spinor direction;
    double logmag = 0.0;
    double x = 0.0;
    cplx z = 0.0;
    double phase1 = 0.0;
    double phase2 = 0.0;

    cplx log_u1() const { return {logmag + std::log(std::abs(direction.u1)), phase1}; }
    cplx log_u2() const { return {logmag + std::log(std::abs(direction.u2)), phase2}; }
};

TransferMatrix transfer_matrix(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts = {});
// Continues T from T.x to b at the stored z.
TransferMatrix& advance(TransferMatrix& T, const OperatorData& phi, double b, const PropagationOptions& opts = {});
// Propagator from a to b (T(a) = I).
TransferMatrix transfer_matrix_between(const OperatorData& phi, double a, double b, cplx z,
                                       const PropagationOptions& opts = {});

// Solution with U(x0) = u0 sampled at increasing checkpoints >= x0.
std::vector<ScaledSolution> solution_profile(const OperatorData& phi, double x0, Spinor u0,
                                             const std::vector<double>& xs, cplx z, const PropagationOptions& opts = {});
// Dirichlet solution U(0) = (1, 1).
ScaledSolution dirichlet_solution(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts = {});
// The same solution sampled at increasing checkpoints.
std::vector<ScaledSolution> dirichlet_profile(const OperatorData& phi, const std::vector<double>& xs, cplx z,
                                              const PropagationOptions& opts = {});

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

// (1/x) log|u1 - u2|; -inf when u1 = u2 exactly. Lower half-plane values are
// taken from the conjugate path, so h(x, conj z) = h(x, z) bit for bit.
double growth_h(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts = {});
double growth_from(const ScaledSolution& u);

struct Residuals {
    double det = 0.0;
    double energy = 0.0;
};

// Residuals of det T = 1 and of j - T*jT = 2 Im z int T*T. The determinant
// is tracked as the product of the step propagators' determinants, which
// stays representable when the columns of T align. Each entry of the
// second identity is compared in the scale of its own terms.
Residuals residuals_of(const TransferMatrix& T);
// |det T - 1| relative to |t1 t4| + |t2 t3|, formed from the stored entries;
// only meaningful while the subdominant components are representable.
double direct_det_residual(const TransferMatrix& T);
Residuals conservation_residuals(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts = {});

// Integrates -i s' = conj(phi) s^2 - 2 z s + phi backwards from s(b) = s_b.
cplx riccati_schur(const OperatorData& phi, double a, double b, cplx z, cplx s_b,
                   const PropagationOptions& opts = {});

// Unwrapped angle with u1/u2 = e^{i theta} for real z.
double prufer_phase(const OperatorData& phi, double x, double z, double theta0 = 0.0,
                    const PropagationOptions& opts = {});
std::vector<double> prufer_profile(const OperatorData& phi, const std::vector<double>& xs, double z,
                                   double theta0 = 0.0, const PropagationOptions& opts = {});

struct GrowthField {
    std::vector<cplx> z;
    std::vector<double> x;
    std::vector<double> h; // h[iz * x.size() + ix]

    double at(std::size_t iz, std::size_t ix) const { return h[iz * x.size() + ix]; }
};

GrowthField growth_field(const OperatorData& phi, const std::vector<cplx>& zs, const std::vector<double>& xs,
                         Exec exec = Exec::parallel, const PropagationOptions& opts = {});

} // namespace dirac
