#include "dirac/series.hpp"

#include "dirac/quadrature.hpp"
#include "dirac/weyl.hpp"
#include "stepping.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace dirac {

namespace {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// State (1, J_n, H_n, J_{n-1}, H_{n-1}, ..., J_1, H_1); J_k sits at
// 2(n-k)+1 and reads H_{k+1} one slot below it.
Mat generator(int n, cplx z, cplx f)
{
    const int dim = 2 * n + 1;
    Mat A = Mat::Zero(dim, dim);
    for (int j = 1; j < dim; j += 2) {
        A(j, j) = -2.0 * kI * z;
        A(j, j - 1) = -f;
        A(j + 1, j) = -std::conj(f);
    }
    return A;
}

Vec sweep(const OperatorData& phi, int n, double a, double b, cplx z, const PropagationOptions& opts)
{
    Vec y = Vec::Zero(2 * n + 1);
    y(0) = 1.0;
    const auto segs = detail::segments(phi, a, b);
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
        const auto& s = *it;
        if (!s.smooth) {
            y = (generator(n, z, s.value) * (s.a - s.b)).exp() * y;
            continue;
        }
        detail::march(phi, s.a, s.b, z, opts, true, [&](double, double h, cplx f0, cplx fm, cplx f1) {
            const Mat A0 = generator(n, z, f0);
            const Mat Am = generator(n, z, fm);
            const Mat A1 = generator(n, z, f1);
            const Vec k1 = A0 * y;
            const Vec k2 = Am * (y + 0.5 * h * k1);
            const Vec k3 = Am * (y + 0.5 * h * k2);
            const Vec k4 = A1 * (y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        });
    }
    return y;
}

double triple2(const OperatorData& phi, double b)
{
    return triple_norm(phi, 2, std::max(1.0, b));
}

double factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

} // namespace

double simplex_bound(const OperatorData& phi, int n, double a, double b, cplx z)
{
    const double t = triple2(phi, b);
    return std::pow(std::ceil(b - a), n) * std::pow(t, 2 * n) / (std::pow(2.0 * z.imag(), n) * factorial(n));
}

std::vector<SimplexIntegral> simplex_series(const OperatorData& phi, int n, double a, double b, cplx z,
                                            const PropagationOptions& opts)
{
    require_domain(n >= 1 && n <= 3, "simplex integrals are supported for n = 1, 2, 3");
    require_domain(a < b, "simplex integral needs a < b");
    require_domain(z.imag() > 0.0, "simplex integral needs Im z > 0");
    const Vec y = sweep(phi, n, a, b, z, opts);
    std::vector<SimplexIntegral> out;
    for (int m = 1; m <= n; ++m) {
        SimplexIntegral r;
        r.n = m;
        r.a = a;
        r.b = b;
        r.z = z;
        // H_k(a) = I_{n-k+1}(a, b), stored at 2(n-k)+2
        r.value = y(2 * m);
        r.bound = simplex_bound(phi, m, a, b, z);
        out.push_back(r);
    }
    return out;
}

SimplexIntegral simplex_I(const OperatorData& phi, int n, double a, double b, cplx z, const PropagationOptions& opts)
{
    return simplex_series(phi, n, a, b, z, opts).back();
}

SeriesSum series_sum(const OperatorData& phi, double a, double b, cplx z, const PropagationOptions& opts)
{
    SeriesSum r;
    for (const auto& term : simplex_series(phi, 3, a, b, z, opts)) r.partial += term.value;
    const double t = std::ceil(b - a) * std::pow(triple2(phi, b), 2) / (2.0 * z.imag());
    r.tail_bound = std::max(0.0, std::exp(t) - (1.0 + t + t * t / 2.0 + t * t * t / 6.0));
    return r;
}

cplx log_ratio_expansion(const OperatorData& phi, double a, cplx z, const PropagationOptions& opts)
{
    const double t = triple2(phi, a + 2.0);
    require_domain(z.imag() >= 4.0 * t * t, "expansion needs Im z >= 4 |||phi|||_2^2");
    return simplex_I(phi, 1, a, a + 2.0, z, opts).value - simplex_I(phi, 1, a + 1.0, a + 2.0, z, opts).value;
}

cplx log_ratio_propagated(const OperatorData& phi, double a, cplx z, const PropagationOptions& opts)
{
    const auto w = weyl_profile(phi, {a, a + 1.0}, z, {}, opts);
    return w.log_psi2[0] - w.log_psi2[1] + kI * z;
}

cplx kernel_w(cplx z, double t)
{
    if (t < -1.0 || t > 0.0) return 0.0;
    return 2.0 * kI * z * std::exp(-2.0 * kI * z * t);
}

double kernel_w_l1(cplx z)
{
    const double y = z.imag();
    if (y == 0.0) return 2.0 * std::abs(z);
    // int_{-1}^0 2|z| e^{2yt} dt
    return std::abs(z) * -std::expm1(-2.0 * y) / y;
}

namespace {

// int_y^{y1} e^{2iz(s-y)} phi(s) ds on a stretch without breakpoints
cplx damped_piece(const OperatorData& phi, double y, double y1, cplx z)
{
    const double len = y1 - y;
    if (!(len > 0.0)) return 0.0;
    const double mid = 0.5 * (y + y1);
    if (phi.piecewise_constant()) return phi(mid) * expm1(2.0 * kI * z * len) / (2.0 * kI * z);
    return quad::gl8([&](double s) { return std::exp(2.0 * kI * z * (s - y)) * phi(s); }, y, y1);
}

// L(y) = int_y^end e^{2iz(s-y)} phi(s) ds on a node set containing every
// breakpoint, tabulated at the nodes and completed inside a cell on demand.
class DampedTail {
public:
    DampedTail(const OperatorData& phi, std::vector<double> nodes, cplx z)
        : phi_(phi), nodes_(std::move(nodes)), z_(z), at_(nodes_.size(), 0.0)
    {
        for (std::size_t k = nodes_.size() - 1; k-- > 0;) {
            const double h = nodes_[k + 1] - nodes_[k];
            at_[k] = damped_piece(phi_, nodes_[k], nodes_[k + 1], z_) + std::exp(2.0 * kI * z_ * h) * at_[k + 1];
        }
    }

    cplx operator()(double y) const
    {
        if (y >= nodes_.back()) return 0.0;
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
        const auto k = static_cast<std::size_t>(it - nodes_.begin());
        const double right = nodes_[k];
        return damped_piece(phi_, y, right, z_) + std::exp(2.0 * kI * z_ * (right - y)) * at_[k];
    }

private:
    const OperatorData& phi_;
    std::vector<double> nodes_;
    cplx z_;
    std::vector<cplx> at_;
};

std::vector<double> band_nodes(const OperatorData& phi, double x0, double x, cplx z)
{
    const double end = x + 1.0;
    std::vector<double> cuts{x0, x, end};
    for (double e : phi.breakpoints(x0, end + 1.0)) {
        if (e > x0 && e < end) cuts.push_back(e);
        if (e - 1.0 > x0 && e - 1.0 < end) cuts.push_back(e - 1.0);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    // cells resolve e^{2izs}, phi on the cell and phi one unit to the right
    const double zcap = 0.5 / std::max(std::abs(z), 1e-300);
    std::vector<double> nodes{cuts.front()};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double t = cuts[i];
        const double stop = cuts[i + 1];
        while (t < stop) {
            double h = std::min(0.25, zcap);
            const double rate = phi.local_rate(std::min(stop, t + h) + 1.0);
            if (rate > 0.0) h = std::min(h, 0.25 * kPi / rate);
            t = (stop - t <= h * (1.0 + 1e-12)) ? stop : t + h;
            nodes.push_back(t);
        }
    }
    return nodes;
}

} // namespace

cplx two_term_functional_between(const OperatorData& phi, double x0, double x, cplx z)
{
    require_domain(x > x0 && x0 >= 0.0, "functional needs 0 <= x0 < x");
    require_domain(z.imag() > 0.0, "functional needs Im z > 0");
    if (phi.family() == Family::zero) return 0.0;
    const auto nodes = band_nodes(phi, x0, x, z);
    const DampedTail tail(phi, nodes, z);
    const cplx shift = std::exp(2.0 * kI * z);
    cplx sum = 0.0;
    for (std::size_t k = 0; k + 1 < nodes.size() && nodes[k] < x; ++k) {
        sum += quad::gl8(
            [&](double t) { return std::conj(phi(t)) * (tail(t) - shift * tail(t + 1.0)); }, nodes[k], nodes[k + 1]);
    }
    return sum / (x - x0);
}

cplx two_term_functional(const OperatorData& phi, double x, cplx z)
{
    return two_term_functional_between(phi, 0.0, x, z);
}

GrowthResidual growth_residual_between(const OperatorData& phi, double x0, double x, cplx z,
                                       const PropagationOptions& opts)
{
    require_domain(x > x0 && x0 >= 0.0, "residual needs 0 <= x0 < x");
    require_domain(z.imag() > 0.0, "residual needs Im z > 0");
    const auto u = dirichlet_profile(phi, {x0, x}, z, opts);
    auto log_u1 = [](const ScaledSolution& s) { return s.log_u1(); };
    GrowthResidual r;
    r.z = z;
    r.x0 = x0;
    r.x = x;
    r.rate = (log_u1(u[1]) - log_u1(u[0])) / (x - x0) + kI * z;
    r.functional = two_term_functional_between(phi, x0, x, z);
    r.residual = std::abs(r.rate - r.functional);
    r.modulus_residual = std::abs((r.rate - r.functional).real());
    return r;
}

GrowthResidual growth_residual(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts)
{
    return growth_residual_between(phi, 0.0, x, z, opts);
}

std::vector<GrowthResidual> growth_residual_table(const OperatorData& phi, double x0, double x,
                                                  const std::vector<cplx>& zs, Exec exec,
                                                  const PropagationOptions& opts)
{
    std::vector<GrowthResidual> out(zs.size());
    for_each_index(zs.size(), exec, [&](std::size_t k) { out[k] = growth_residual_between(phi, x0, x, zs[k], opts); });
    return out;
}

double loglog_slope(const std::vector<double>& scale, const std::vector<double>& residual)
{
    require_domain(scale.size() == residual.size() && scale.size() >= 2, "slope needs two or more points");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(scale.size());
    for (std::size_t k = 0; k < scale.size(); ++k) {
        mx += std::log(scale[k]) / n;
        my += std::log(residual[k]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < scale.size(); ++k) {
        const double dx = std::log(scale[k]) - mx;
        sxy += dx * (std::log(residual[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

} // namespace dirac
