#include "dirac/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

namespace dirac {

MeasureHistogram empty_histogram(double lo, double hi, int bins)
{
    require_domain(bins >= 1 && hi > lo, "histogram needs lo < hi and at least one bin");
    MeasureHistogram h;
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int k = 0; k <= bins; ++k) h.bin_edges[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / bins;
    h.masses.assign(static_cast<std::size_t>(bins), 0.0);
    return h;
}

double window_mass(const MeasureHistogram& h, double L)
{
    double m = 0.0;
    const double slack = 1e-12 * std::max(1.0, L);
    for (std::size_t k = 0; k < h.masses.size(); ++k)
        if (h.bin_edges[k] >= -L - slack && h.bin_edges[k + 1] <= L + slack) m += h.masses[k];
    return m;
}

std::string to_string(SigmaRoute r)
{
    return r == SigmaRoute::riemann ? "riemann" : "cells";
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::regular_consistent: return "REGULAR-CONSISTENT";
    case Verdict::inequality_violated: return "INEQUALITY-VIOLATED";
    default: return "INCONCLUSIVE";
    }
}

double g_hat_sq(double eps, double k)
{
    const double th = eps * k;
    if (std::abs(th) < 1e-8) return 1.0 - th * th / 12.0;
    const double s = 2.0 * std::sin(0.5 * th) / th;
    return s * s;
}

namespace {

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

// The planner is not reentrant; execution is.
std::mutex& planner_lock()
{
    static std::mutex m;
    return m;
}

// Weights a_j at cell midpoints (j + 1/2) h, h = x / N. Visits every point of
// the k-lattice n pi / (4x) in the band |n| <= 4N with |F^(k)|^2, where
// F^(k) = (2pi)^{-1/2} sum_j a_j e^{-ik(j + 1/2)h}. The lattice is covered by
// eight length-N transforms of pre-twiddled weights, one per residue n mod 8.
template <class Visit>
void padded_spectrum(const std::vector<cplx>& a, double x, Visit&& visit)
{
    const std::size_t n0 = a.size();
    const int n = static_cast<int>(n0);
    std::unique_ptr<fftw_complex[], FftwFree> in(fftw_alloc_complex(n0));
    std::unique_ptr<fftw_complex[], FftwFree> out(fftw_alloc_complex(n0));
    if (!in || !out) throw ResolutionError("spectral transform: allocation failed");
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_lock());
        plan = fftw_plan_dft_1d(n, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    const double dk = kPi / (4.0 * x);
    const double norm = 1.0 / (2.0 * kPi);
    const double twiddle = -2.0 * kPi / (8.0 * static_cast<double>(n0));
    for (int r = 0; r < 8; ++r) {
        for (std::size_t j = 0; j < n0; ++j) {
            const cplx g = a[j] * std::polar(1.0, twiddle * static_cast<double>(r) * static_cast<double>(j));
            in[j][0] = g.real();
            in[j][1] = g.imag();
        }
        fftw_execute(plan);
        for (std::size_t m = 0; m < n0; ++m) {
            const long long mm = (2 * m < n0) ? static_cast<long long>(m)
                                              : static_cast<long long>(m) - static_cast<long long>(n0);
            const double k = dk * static_cast<double>(8 * mm + r);
            visit(k, norm * (out[m][0] * out[m][0] + out[m][1] * out[m][1]));
        }
    }
    std::lock_guard<std::mutex> lock(planner_lock());
    fftw_destroy_plan(plan);
}

struct Sampling {
    SigmaRoute route = SigmaRoute::riemann;
    std::size_t count = 0;
    double step = 0.0;
};

// Riemann grid: h = unit / 2^p with unit the data step (1 for analytic
// families), fine enough to put twice the local rate and kmax inside the
// band and to keep the midpoint rule for |phi|^2 near 1e-7 relative.
Sampling riemann_sampling(const OperatorData& phi, double x, double kmax)
{
    const bool sampled = phi.family() == Family::grid_samples || phi.family() == Family::periodic_samples;
    double unit = sampled ? phi.step() : 1.0;
    // refine the unit so x is a whole number of units when x / unit is a
    // ratio of small integers; then jumps and the cut at x sit on cell edges
    const double ratio = x / unit;
    for (int q = 1; q <= 64; ++q) {
        if (std::abs(ratio * q - std::round(ratio * q)) <= 1e-9 * ratio * q) {
            unit /= q;
            break;
        }
    }
    const double target = std::min(kPi / (2.0 * (phi.local_rate(x) + kmax + 1.0)), 1.0 / 1024.0);
    double h = unit;
    while (h > target) h *= 0.5;
    const double cells = x / h;
    Sampling s;
    const double rounded = std::round(cells);
    s.count = static_cast<std::size_t>(std::abs(cells - rounded) <= 1e-9 * cells ? rounded : std::ceil(cells));
    s.count = std::max<std::size_t>(s.count, 16);
    s.step = x / static_cast<double>(s.count);
    return s;
}

Sampling cell_sampling(double x, double kmax)
{
    Sampling s;
    s.route = SigmaRoute::cells;
    s.count = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(x * std::max(kmax, 1.0) / 0.05)));
    s.step = x / static_cast<double>(s.count);
    return s;
}

std::vector<cplx> riemann_weights(const OperatorData& phi, double x, const Sampling& s)
{
    std::vector<cplx> a(s.count);
    const double h = s.step;
    const auto jumps = phi.breakpoints(0.0, x);
    for (std::size_t j = 0; j < s.count; ++j) a[j] = h * phi((static_cast<double>(j) + 0.5) * h);
    // cells with an interior jump take the exact cell integral
    for (double e : jumps) {
        const double u = e / h;
        const double nearest = std::round(u);
        if (std::abs(u - nearest) <= 1e-9 * std::max(1.0, u)) continue;
        const auto j = static_cast<std::size_t>(std::floor(u));
        if (j < s.count) a[j] = phi.integral(h * static_cast<double>(j), h * static_cast<double>(j + 1));
    }
    return a;
}

std::vector<cplx> cell_weights(const OperatorData& phi, const Sampling& s)
{
    std::vector<cplx> a(s.count);
    const double h = s.step;
    for (std::size_t j = 0; j < s.count; ++j)
        a[j] = phi.integral(h * static_cast<double>(j), h * static_cast<double>(j + 1));
    return a;
}

// R_m = sum_j a_{j+m} conj(a_j) for m = 0..N-1 through a zero-padded transform.
std::vector<cplx> autocorrelation(const std::vector<cplx>& a)
{
    const std::size_t n0 = a.size();
    const std::size_t len = 2 * n0;
    std::unique_ptr<fftw_complex[], FftwFree> buf(fftw_alloc_complex(len));
    if (!buf) throw ResolutionError("spectral transform: allocation failed");
    fftw_plan fwd;
    fftw_plan bwd;
    {
        std::lock_guard<std::mutex> lock(planner_lock());
        fwd = fftw_plan_dft_1d(static_cast<int>(len), buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(static_cast<int>(len), buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (std::size_t j = 0; j < len; ++j) {
        buf[j][0] = j < n0 ? a[j].real() : 0.0;
        buf[j][1] = j < n0 ? a[j].imag() : 0.0;
    }
    fftw_execute(fwd);
    for (std::size_t j = 0; j < len; ++j) {
        buf[j][0] = buf[j][0] * buf[j][0] + buf[j][1] * buf[j][1];
        buf[j][1] = 0.0;
    }
    fftw_execute(bwd);
    std::vector<cplx> R(n0);
    for (std::size_t m = 0; m < n0; ++m) R[m] = cplx(buf[m][0], buf[m][1]) / static_cast<double>(len);
    {
        std::lock_guard<std::mutex> lock(planner_lock());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    return R;
}

// Primitive in k of the density (1/(2 pi x)) sum_m R_m e^{-ikmh}.
double mass_primitive(const std::vector<cplx>& R, double h, double x, double k)
{
    double sum = R[0].real() * k;
    const cplx step = std::polar(1.0, -k * h);
    cplx rot = 1.0;
    for (std::size_t m = 1; m < R.size(); ++m) {
        // refresh the rotation to keep roundoff from accumulating
        rot = (m % 4096 == 0) ? std::polar(1.0, -k * h * static_cast<double>(m)) : rot * step;
        sum += 2.0 * (kI * R[m] * rot).real() / (static_cast<double>(m) * h);
    }
    return sum / (2.0 * kPi * x);
}

double sinc_sq(double t)
{
    if (std::abs(t) < 1e-8) return 1.0;
    const double s = std::sin(t) / t;
    return s * s;
}

} // namespace

SigmaResult sigma_summary(const OperatorData& phi, double x, double kmax, int bins, const SigmaOptions& opts)
{
    require_domain(x > 0.0, "sigma_x needs x > 0");
    require_domain(kmax > 0.0, "sigma_x needs kmax > 0");
    require_domain(bins >= 16, "sigma_x needs at least 16 bins");
    SigmaResult r;
    r.histogram = empty_histogram(-kmax, kmax, bins);
    r.dk = kPi / (4.0 * x);
    r.cesaro = cesaro_l2(phi, x);
    auto& h = r.histogram;
    Sampling s = riemann_sampling(phi, x, kmax);
    if (s.count > opts.max_samples) {
        if (!opts.allow_cells)
            throw ResolutionError("sigma_x: Riemann grid needs " + std::to_string(s.count) + " samples, above budget");
        s = cell_sampling(x, kmax);
        if (s.count > opts.max_samples)
            throw ResolutionError("sigma_x: cell grid needs " + std::to_string(s.count) + " cells, above budget");
    }
    r.route = s.route;
    r.step = s.step;

    if (phi.family() != Family::zero) {
        const auto a = s.route == SigmaRoute::riemann ? riemann_weights(phi, x, s) : cell_weights(phi, s);
        const auto R = autocorrelation(a);
        // bin masses integrate |F^|^2 exactly between edges
        std::vector<double> G(h.bin_edges.size());
        for (std::size_t e = 0; e < G.size(); ++e) G[e] = mass_primitive(R, s.step, x, h.bin_edges[e]);
        for (std::size_t b = 0; b < h.masses.size(); ++b) {
            double m = std::max(0.0, G[b + 1] - G[b]);
            if (s.route == SigmaRoute::cells) m /= sinc_sq(0.25 * (h.bin_edges[b] + h.bin_edges[b + 1]) * s.step);
            h.masses[b] = m;
        }
        r.band_mass = s.route == SigmaRoute::riemann ? R[0].real() / (x * s.step)
                                                     : std::numeric_limits<double>::quiet_NaN();
    }

    double binned = 0.0;
    for (double m : h.masses) binned += m;
    h.tail_mass = r.cesaro - binned;
    const double tol = (s.route == SigmaRoute::riemann ? 1e-6 : 2e-2) * r.cesaro + 1e-12;
    if (h.tail_mass < -tol)
        throw ResolutionError("sigma_x: binned mass exceeds the Cesaro average; k-grid too coarse");
    h.total_mass = binned + h.tail_mass;
    return r;
}

MeasureHistogram sigma_x(const OperatorData& phi, double x, double kmax, int bins, const SigmaOptions& opts)
{
    return sigma_summary(phi, x, kmax, bins, opts).histogram;
}

namespace {

// Frequency side for several eps from one transform; throws if the
// Riemann grid is over budget.
std::vector<double> frequency_values(const OperatorData& phi, double x, const std::vector<double>& eps,
                                     const SigmaOptions& opts)
{
    std::vector<double> out(eps.size(), 0.0);
    if (phi.family() == Family::zero) return out;
    const Sampling s = riemann_sampling(phi, x, 1.0);
    if (s.count > opts.max_samples)
        throw ResolutionError("frequency functional: Riemann grid needs " + std::to_string(s.count)
                              + " samples, above budget");
    const auto a = riemann_weights(phi, x, s);
    const double scale = kPi / (4.0 * x) / x;
    padded_spectrum(a, x, [&](double k, double f2) {
        for (std::size_t e = 0; e < eps.size(); ++e) out[e] += g_hat_sq(eps[e], k) * f2 * scale;
    });
    return out;
}

} // namespace

double g_eps_functional(const OperatorData& phi, double x, double eps, GMode mode, const SigmaOptions& opts)
{
    require_domain(x > 0.0 && eps > 0.0, "g_eps functional needs x > 0 and eps > 0");
    if (mode == GMode::time) return avg_l2_profile(phi, x, eps);
    return frequency_values(phi, x, {eps}, opts).front();
}

RegularitySummary regularity_gap(const OperatorData& phi, double bE, const std::vector<double>& x_grid,
                                 const std::vector<double>& eps_grid, const RegularityOptions& opts)
{
    require_domain(!x_grid.empty() && !eps_grid.empty(), "regularity gap needs nonempty grids");
    require_domain(bE >= 0.0, "regularity gap needs bE >= 0");
    for (std::size_t k = 0; k < x_grid.size(); ++k)
        require_domain(x_grid[k] > 0.0 && (k == 0 || x_grid[k] > x_grid[k - 1]), "x grid must be positive, increasing");
    for (std::size_t k = 0; k < eps_grid.size(); ++k)
        require_domain(eps_grid[k] > 0.0 && (k == 0 || eps_grid[k] < eps_grid[k - 1]),
                       "eps grid must be positive, decreasing");

    RegularitySummary out;
    out.bE = bE;
    out.eps = eps_grid;
    const std::size_t ne = eps_grid.size();
    out.rows.resize(x_grid.size() * ne);
    for_each_index(x_grid.size(), opts.exec, [&](std::size_t i) {
        const double x = x_grid[i];
        std::optional<std::vector<double>> freq;
        if (opts.frequency && riemann_sampling(phi, x, 1.0).count <= opts.sigma.max_samples)
            freq = frequency_values(phi, x, eps_grid, opts.sigma);
        for (std::size_t e = 0; e < ne; ++e) {
            auto& row = out.rows[i * ne + e];
            row.x = x;
            row.eps = eps_grid[e];
            row.time_value = avg_l2_profile(phi, x, eps_grid[e]);
            if (freq) row.freq_value = (*freq)[e];
            row.gap = row.time_value - bE;
        }
    });

    out.window_hi = x_grid.back();
    out.window_lo = x_grid.back() / 10.0;
    out.tolerance = 0.05 * std::max(1.0, bE);
    out.liminf_proxy.assign(ne, std::numeric_limits<double>::infinity());
    out.limsup_proxy.assign(ne, -std::numeric_limits<double>::infinity());
    for (const auto& row : out.rows) {
        if (row.x < out.window_lo) continue;
        const auto e = static_cast<std::size_t>(&row - out.rows.data()) % ne;
        out.liminf_proxy[e] = std::min(out.liminf_proxy[e], row.time_value);
        out.limsup_proxy[e] = std::max(out.limsup_proxy[e], row.time_value);
    }
    out.sup_liminf = *std::max_element(out.liminf_proxy.begin(), out.liminf_proxy.end());
    const bool below = std::all_of(out.limsup_proxy.begin(), out.limsup_proxy.end(),
                                   [&](double v) { return v <= bE + out.tolerance; });
    if (out.sup_liminf < bE - out.tolerance) out.verdict = Verdict::inequality_violated;
    else if (below) out.verdict = Verdict::regular_consistent;
    else out.verdict = Verdict::inconclusive;
    return out;
}

} // namespace dirac
