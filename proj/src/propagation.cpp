#include "dirac/propagation.hpp"

#include "stepping.hpp"

#include <algorithm>
#include <cmath>

namespace dirac {

namespace {

// Columns of M = i j (z - Phi) = [[-iz, i phi], [-i conj(phi), iz]] applied to
// the 2x2 matrix or spinor.
inline Mat2 apply(cplx z, cplx f, const Mat2& T)
{
    const cplx a = -kI * z;
    const cplx b = kI * f;
    const cplx c = -kI * std::conj(f);
    const cplx d = kI * z;
    return {a * T[0] + b * T[2], a * T[1] + b * T[3], c * T[0] + d * T[2], c * T[1] + d * T[3]};
}

inline Spinor apply(cplx z, cplx f, const Spinor& u)
{
    return {-kI * z * u.u1 + kI * f * u.u2, -kI * std::conj(f) * u.u1 + kI * z * u.u2};
}

inline Mat2 mul(const Mat2& A, const Mat2& B)
{
    return {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3], A[2] * B[0] + A[3] * B[2],
            A[2] * B[1] + A[3] * B[3]};
}

inline Mat2 axpy(const Mat2& T, double h, const Mat2& K)
{
    return {T[0] + h * K[0], T[1] + h * K[1], T[2] + h * K[2], T[3] + h * K[3]};
}

// T* T for row-major T
inline Mat2 gram_of(const Mat2& T)
{
    const cplx g11 = std::norm(T[0]) + std::norm(T[2]);
    const cplx g12 = std::conj(T[0]) * T[1] + std::conj(T[2]) * T[3];
    const cplx g22 = std::norm(T[1]) + std::norm(T[3]);
    return {g11, g12, std::conj(g12), g22};
}

void check_finite(double v)
{
    if (!std::isfinite(v)) throw ResolutionError("propagation produced non-finite values; step too coarse");
}

struct SpinorState {
    Spinor d;
    double logmag = 0.0;
    double phase1 = 0.0;
    double phase2 = 0.0;

    void step(cplx z, double h, cplx f0, cplx fm, cplx f1)
    {
        const Spinor k1 = apply(z, f0, d);
        const Spinor k2 = apply(z, fm, Spinor{d.u1 + 0.5 * h * k1.u1, d.u2 + 0.5 * h * k1.u2});
        const Spinor k3 = apply(z, fm, Spinor{d.u1 + 0.5 * h * k2.u1, d.u2 + 0.5 * h * k2.u2});
        const Spinor k4 = apply(z, f1, Spinor{d.u1 + h * k3.u1, d.u2 + h * k3.u2});
        Spinor n{d.u1 + h / 6.0 * (k1.u1 + 2.0 * k2.u1 + 2.0 * k3.u1 + k4.u1),
                 d.u2 + h / 6.0 * (k1.u2 + 2.0 * k2.u2 + 2.0 * k3.u2 + k4.u2)};
        const double m = std::max(std::abs(n.u1), std::abs(n.u2));
        check_finite(m);
        if (m == 0.0) throw ResolutionError("eigensolution collapsed to zero");
        n.u1 /= m;
        n.u2 /= m;
        if (d.u1 != 0.0 && n.u1 != 0.0) phase1 += std::arg(n.u1 / d.u1);
        if (d.u2 != 0.0 && n.u2 != 0.0) phase2 += std::arg(n.u2 / d.u2);
        logmag += std::log(m);
        d = n;
    }

    ScaledSolution snapshot(double x, cplx z) const { return {d, logmag, x, z, phase1, phase2}; }
};

} // namespace

TransferMatrix& advance(TransferMatrix& T, const OperatorData& phi, double b, const PropagationOptions& opts)
{
    require_domain(b >= T.x, "transfer matrix can only advance forward");
    const cplx z = T.z;
    Mat2& t = T.t;
    Mat2& g = T.gram;
    const Mat2 id{1.0, 0.0, 0.0, 1.0};
    detail::march(phi, T.x, b, z, opts, false, [&](double, double h, cplx f0, cplx fm, cplx f1) {
        // stage maps of one RK4 step, applied to T afterwards
        const Mat2 k1 = apply(z, f0, id);
        const Mat2 s2 = axpy(id, 0.5 * h, k1);
        const Mat2 s3 = axpy(id, 0.5 * h, apply(z, fm, s2));
        const Mat2 s4 = axpy(id, h, apply(z, fm, s3));
        Mat2 step = id;
        const Mat2 k2 = apply(z, fm, s2);
        const Mat2 k3 = apply(z, fm, s3);
        const Mat2 k4 = apply(z, f1, s4);
        for (std::size_t k = 0; k < 4; ++k) step[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        const Mat2 t2 = mul(s2, t);
        const Mat2 t3 = mul(s3, t);
        const Mat2 t4 = mul(s4, t);
        const Mat2 g1 = gram_of(t);
        const Mat2 g2 = gram_of(t2);
        const Mat2 g3 = gram_of(t3);
        const Mat2 g4 = gram_of(t4);
        for (std::size_t k = 0; k < 4; ++k) g[k] += h / 6.0 * (g1[k] + 2.0 * g2[k] + 2.0 * g3[k] + g4[k]);
        t = mul(step, t);
        // det(step) - 1 formed without cancelling the leading 1
        const cplx tr = step[0] - 1.0 + step[3] - 1.0;
        const cplx delta = tr + (step[0] - 1.0) * (step[3] - 1.0) - step[1] * step[2];
        T.log_det += log1p(delta);
        const double m0 = std::max(std::abs(t[0]), std::abs(t[2]));
        const double m1 = std::max(std::abs(t[1]), std::abs(t[3]));
        check_finite(m0);
        check_finite(m1);
        t[0] /= m0;
        t[2] /= m0;
        t[1] /= m1;
        t[3] /= m1;
        g[0] /= m0 * m0;
        g[1] /= m0 * m1;
        g[2] /= m0 * m1;
        g[3] /= m1 * m1;
        T.log_scale[0] += std::log(m0);
        T.log_scale[1] += std::log(m1);
    });
    T.x = b;
    return T;
}

TransferMatrix transfer_matrix_between(const OperatorData& phi, double a, double b, cplx z,
                                       const PropagationOptions& opts)
{
    require_domain(b >= a, "transfer matrix needs a <= b");
    TransferMatrix T;
    T.x = a;
    T.z = z;
    return advance(T, phi, b, opts);
}

TransferMatrix transfer_matrix(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts)
{
    require_domain(x >= 0.0, "transfer matrix needs x >= 0");
    return transfer_matrix_between(phi, 0.0, x, z, opts);
}

std::vector<ScaledSolution> solution_profile(const OperatorData& phi, double x0, Spinor u0,
                                             const std::vector<double>& xs, cplx z, const PropagationOptions& opts)
{
    const double m = std::max(std::abs(u0.u1), std::abs(u0.u2));
    require_domain(std::isfinite(m) && m > 0.0, "initial spinor must be finite and nonzero");
    SpinorState s;
    s.d = Spinor{u0.u1 / m, u0.u2 / m};
    s.logmag = std::log(m);
    s.phase1 = std::arg(u0.u1);
    s.phase2 = std::arg(u0.u2);
    std::vector<ScaledSolution> out;
    out.reserve(xs.size());
    double at = x0;
    for (double x : xs) {
        require_domain(x >= at, "checkpoints must be nonnegative and increasing");
        detail::march(phi, at, x, z, opts, false,
                      [&](double, double h, cplx f0, cplx fm, cplx f1) { s.step(z, h, f0, fm, f1); });
        at = x;
        out.push_back(s.snapshot(x, z));
    }
    return out;
}

std::vector<ScaledSolution> dirichlet_profile(const OperatorData& phi, const std::vector<double>& xs, cplx z,
                                              const PropagationOptions& opts)
{
    return solution_profile(phi, 0.0, Spinor{}, xs, z, opts);
}

ScaledSolution dirichlet_solution(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts)
{
    return dirichlet_profile(phi, {x}, z, opts).front();
}

double growth_from(const ScaledSolution& u)
{
    require_domain(u.x > 0.0, "growth needs x > 0");
    const double gap = std::abs(u.direction.u1 - u.direction.u2);
    if (gap == 0.0) return kMinusInfinity;
    return (u.logmag + std::log(gap)) / u.x;
}

double growth_h(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts)
{
    require_domain(x > 0.0, "growth needs x > 0");
    // U(x, conj z) = swap(conj U(x, z)), so |u1 - u2| agrees on both half-planes
    const cplx zz = z.imag() < 0.0 ? std::conj(z) : z;
    return growth_from(dirichlet_solution(phi, x, zz, opts));
}

double direct_det_residual(const TransferMatrix& T)
{
    const auto& t = T.t;
    const double unit = std::exp(-(T.log_scale[0] + T.log_scale[1]));
    const cplx det = t[0] * t[3] - t[1] * t[2];
    return std::abs(det - unit) / std::max(unit, std::abs(t[0] * t[3]) + std::abs(t[1] * t[2]));
}

Residuals residuals_of(const TransferMatrix& T)
{
    const auto& t = T.t;
    const double l0 = T.log_scale[0];
    const double l1 = T.log_scale[1];
    Residuals r;
    r.det = std::abs(expm1(T.log_det));

    // entry (i, k) of j - T*jT - 2 Im z int T*T, divided by e^{l_i + l_k}
    const cplx a11 = -std::norm(t[0]) + std::norm(t[2]);
    const cplx a12 = -std::conj(t[0]) * t[1] + std::conj(t[2]) * t[3];
    const cplx a22 = -std::norm(t[1]) + std::norm(t[3]);
    const Mat2 tjt{a11, a12, std::conj(a12), a22};
    const Mat2 j{-std::exp(-2.0 * l0), 0.0, 0.0, std::exp(-2.0 * l1)};
    const double two_y = 2.0 * T.z.imag();
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double err = std::abs(j[k] - tjt[k] - two_y * T.gram[k]);
        const double size = std::max({std::abs(j[k]), std::abs(tjt[k]), std::abs(two_y * T.gram[k])});
        if (size > 0.0) worst = std::max(worst, err / size);
    }
    r.energy = worst;
    return r;
}

Residuals conservation_residuals(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts)
{
    require_domain(x > 0.0, "residuals need x > 0");
    return residuals_of(transfer_matrix(phi, x, z, opts));
}

cplx riccati_schur(const OperatorData& phi, double a, double b, cplx z, cplx s_b, const PropagationOptions& opts)
{
    require_domain(a < b, "Riccati integration needs a < b");
    require_domain(z.imag() > 0.0, "Riccati integration needs Im z > 0");
    require_domain(std::abs(s_b) <= 1.0 + 1e-12, "Riccati start must lie in the closed unit disk");
    constexpr double kSlack = 1e-6;
    cplx s = s_b;
    auto rhs = [&](cplx f, cplx v) { return kI * (std::conj(f) * v * v - 2.0 * z * v + f); };
    detail::march(phi, a, b, z, opts, true, [&](double, double h, cplx f0, cplx fm, cplx f1) {
        const cplx k1 = rhs(f0, s);
        const cplx k2 = rhs(fm, s + 0.5 * h * k1);
        const cplx k3 = rhs(fm, s + 0.5 * h * k2);
        const cplx k4 = rhs(f1, s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double m = std::abs(s);
        if (!(m <= 1.0 + kSlack)) throw InstabilityError("Schur function left the unit disk; step too coarse");
        if (m > 1.0) s /= m;
    });
    return s;
}

std::vector<double> prufer_profile(const OperatorData& phi, const std::vector<double>& xs, double z, double theta0,
                                   const PropagationOptions& opts)
{
    double theta = theta0;
    auto rhs = [&](cplx f, double th) { return -2.0 * z + 2.0 * (f * std::polar(1.0, -th)).real(); };
    std::vector<double> out;
    out.reserve(xs.size());
    double at = 0.0;
    for (double x : xs) {
        require_domain(x >= at, "checkpoints must be nonnegative and increasing");
        detail::march(phi, at, x, z, opts, false, [&](double, double h, cplx f0, cplx fm, cplx f1) {
            const double k1 = rhs(f0, theta);
            const double k2 = rhs(fm, theta + 0.5 * h * k1);
            const double k3 = rhs(fm, theta + 0.5 * h * k2);
            const double k4 = rhs(f1, theta + h * k3);
            theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        });
        at = x;
        out.push_back(theta);
    }
    return out;
}

double prufer_phase(const OperatorData& phi, double x, double z, double theta0, const PropagationOptions& opts)
{
    require_domain(x >= 0.0, "Prufer phase needs x >= 0");
    return prufer_profile(phi, {x}, z, theta0, opts).front();
}

GrowthField growth_field(const OperatorData& phi, const std::vector<cplx>& zs, const std::vector<double>& xs,
                         Exec exec, const PropagationOptions& opts)
{
    require_domain(!zs.empty() && !xs.empty(), "growth field needs nonempty grids");
    require_domain(xs.front() > 0.0, "growth field checkpoints must be positive");
    GrowthField field{zs, xs, std::vector<double>(zs.size() * xs.size())};
    for_each_index(zs.size(), exec, [&](std::size_t iz) {
        const cplx z = zs[iz].imag() < 0.0 ? std::conj(zs[iz]) : zs[iz];
        const auto profile = dirichlet_profile(phi, xs, z, opts);
        for (std::size_t ix = 0; ix < xs.size(); ++ix) field.h[iz * xs.size() + ix] = growth_from(profile[ix]);
    });
    return field;
}

} // namespace dirac
