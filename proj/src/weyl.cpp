#include "dirac/weyl.hpp"

#include "stepping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dirac {

Disk disk_from(const TransferMatrix& T)
{
    const auto& t = T.t;
    const double l0 = T.log_scale[0];
    const double l1 = T.log_scale[1];
    const double d = std::norm(t[0]) - std::norm(t[2]);
    if (!(d > 0.0) || !(2.0 * l0 + std::log(d) > 0.0))
        throw ResolutionError("|t1|^2 - |t3|^2 <= 1; propagation is not accurate enough for this disk");
    Disk disk;
    disk.log_radius = -(2.0 * l0 + std::log(d));
    disk.radius = std::exp(disk.log_radius);
    disk.center = std::exp(l1 - l0) * (std::conj(t[2]) * t[3] - std::conj(t[0]) * t[1]) / d;
    return disk;
}

Disk weyl_disk(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts)
{
    require_domain(x > 0.0, "Weyl disk needs x > 0");
    require_domain(z.imag() > 0.0, "Weyl disk needs Im z > 0");
    return disk_from(transfer_matrix(phi, x, z, opts));
}

std::vector<Disk> weyl_disks(const OperatorData& phi, const std::vector<double>& xs, cplx z,
                             const PropagationOptions& opts)
{
    require_domain(z.imag() > 0.0, "Weyl disk needs Im z > 0");
    TransferMatrix T;
    T.z = z;
    std::vector<Disk> out;
    out.reserve(xs.size());
    for (double x : xs) {
        require_domain(x > 0.0 && x >= T.x, "disk checkpoints must be positive and increasing");
        advance(T, phi, x, opts);
        out.push_back(disk_from(T));
    }
    return out;
}

Disk reflected_disk(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts)
{
    return weyl_disk(reflect_translate(phi, x), x, z, opts);
}

bool nested_in(const Disk& inner, const Disk& outer, double slack)
{
    return std::abs(inner.center - outer.center) + inner.radius < outer.radius + slack;
}

SchurResult schur_function(const OperatorData& phi, cplx z, const SchurOptions& sopts, const PropagationOptions& opts)
{
    require_domain(z.imag() > 0.0, "Schur function needs Im z > 0");
    require_domain(sopts.target_radius > 0.0 && sopts.target_radius < 1.0, "target radius must lie in (0, 1)");
    require_domain(sopts.horizon > 0.0 && sopts.chunk > 0.0, "horizon and chunk must be positive");
    TransferMatrix T;
    T.z = z;
    SchurResult r;
    r.z = z;
    while (T.x < sopts.horizon) {
        advance(T, phi, std::min(sopts.horizon, T.x + sopts.chunk), opts);
        const Disk d = disk_from(T);
        r.s = d.center;
        r.radius = d.radius;
        r.x_used = T.x;
        if (d.radius <= sopts.target_radius) {
            r.converged = true;
            break;
        }
    }
    return r;
}

std::vector<SchurResult> schur_table(const OperatorData& phi, const std::vector<cplx>& zs, Exec exec,
                                     const SchurOptions& sopts, const PropagationOptions& opts)
{
    std::vector<SchurResult> out(zs.size());
    for_each_index(zs.size(), exec, [&](std::size_t k) { out[k] = schur_function(phi, zs[k], sopts, opts); });
    return out;
}

Disk circumcircle(cplx a, cplx b, cplx c)
{
    const cplx p = b - a;
    const cplx q = c - a;
    const cplx den = std::conj(p) * q - p * std::conj(q);
    Disk d;
    if (std::abs(den) == 0.0) {
        d.radius = (p == 0.0 && q == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
        d.log_radius = d.radius;
        d.center = a;
        return d;
    }
    const cplx w = (std::norm(p) * q - std::norm(q) * p) / den;
    d.center = a + w;
    d.radius = std::abs(w);
    d.log_radius = std::log(d.radius);
    return d;
}

namespace {

// Backward RK4 for the pair (s, l) with -i s' = conj(phi) s^2 - 2 z s + phi
// and l' = iz - i conj(phi) s, from b down to a.
void backward_pair(const OperatorData& phi, double a, double b, cplx z, cplx& s, cplx& l,
                   const PropagationOptions& opts)
{
    constexpr double kSlack = 1e-6;
    auto ds = [&](cplx f, cplx v) { return kI * (std::conj(f) * v * v - 2.0 * z * v + f); };
    auto dl = [&](cplx f, cplx v) { return kI * z - kI * std::conj(f) * v; };
    detail::march(phi, a, b, z, opts, true, [&](double, double h, cplx f0, cplx fm, cplx f1) {
        const cplx s1 = s;
        const cplx k1 = ds(f0, s1);
        const cplx s2 = s + 0.5 * h * k1;
        const cplx k2 = ds(fm, s2);
        const cplx s3 = s + 0.5 * h * k2;
        const cplx k3 = ds(fm, s3);
        const cplx s4 = s + h * k3;
        const cplx k4 = ds(f1, s4);
        l += h / 6.0 * (dl(f0, s1) + 2.0 * dl(fm, s2) + 2.0 * dl(fm, s3) + dl(f1, s4));
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double m = std::abs(s);
        if (!(m <= 1.0 + kSlack)) throw InstabilityError("Schur function left the unit disk; step too coarse");
        if (m > 1.0) s /= m;
    });
}

} // namespace

ScaledSolution WeylProfile::solution(std::size_t k, cplx z) const
{
    ScaledSolution u;
    u.direction = Spinor{s[k], 1.0};
    u.logmag = log_psi2[k].real();
    u.phase2 = log_psi2[k].imag();
    u.phase1 = u.phase2 + std::arg(s[k]);
    u.x = x[k];
    u.z = z;
    return u;
}

WeylProfile weyl_profile(const OperatorData& phi, const std::vector<double>& xs, cplx z, const WeylOptions& wopts,
                         const PropagationOptions& opts)
{
    require_domain(z.imag() > 0.0, "Weyl solution needs Im z > 0");
    require_domain(wopts.far_tolerance > 0.0 && wopts.max_extension > 0.0, "far-point settings must be positive");
    for (std::size_t k = 0; k < xs.size(); ++k)
        require_domain(xs[k] >= 0.0 && (k == 0 || xs[k] >= xs[k - 1]), "checkpoints must be nonnegative and increasing");
    const double last = xs.empty() ? 0.0 : xs.back();

    // Extend until the backward flow on [last, last + L] maps the unit
    // circle into a circle below the tolerance; three points fix the circle.
    const cplx starts[3] = {1.0, std::polar(1.0, 2.0 * kPi / 3.0), std::polar(1.0, -2.0 * kPi / 3.0)};
    WeylProfile out;
    double ext = std::min(1.0, wopts.max_extension);
    for (;;) {
        cplx img[3];
        for (int k = 0; k < 3; ++k) img[k] = riccati_schur(phi, last, last + ext, z, starts[k], opts);
        const double spread = std::max({std::abs(img[0] - img[1]), std::abs(img[1] - img[2]), std::abs(img[2] - img[0])});
        // below roundoff the circle through the images is noise
        out.far_radius = spread <= 4.0 * std::numeric_limits<double>::epsilon()
            ? spread : circumcircle(img[0], img[1], img[2]).radius;
        if (out.far_radius <= wopts.far_tolerance || ext >= wopts.max_extension) break;
        ext = std::min(2.0 * ext, wopts.max_extension);
    }
    out.far_point = last + ext;

    cplx s = 0.0;
    cplx l = 0.0;
    std::vector<cplx> ls(xs.size());
    out.s.resize(xs.size());
    double at = out.far_point;
    for (std::size_t k = xs.size(); k-- > 0;) {
        if (xs[k] < at) backward_pair(phi, xs[k], at, z, s, l, opts);
        at = xs[k];
        out.s[k] = s;
        ls[k] = l;
    }
    if (at > 0.0) backward_pair(phi, 0.0, at, z, s, l, opts);
    out.s0 = s;
    out.x = xs;
    out.log_psi2.resize(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) out.log_psi2[k] = ls[k] - l;
    return out;
}

ScaledSolution weyl_solution(const OperatorData& phi, double x, cplx z, const WeylOptions& wopts,
                             const PropagationOptions& opts)
{
    return weyl_profile(phi, {x}, z, wopts, opts).solution(0, z);
}

} // namespace dirac
