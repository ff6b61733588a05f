#include "dirac/martin.hpp"

#include "dirac/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>

namespace dirac {

GapSet GapSet::from(std::vector<std::pair<double, double>> gaps)
{
    std::sort(gaps.begin(), gaps.end());
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        require_domain(std::isfinite(gaps[j].first) && std::isfinite(gaps[j].second), "gap endpoints must be finite");
        require_domain(gaps[j].first < gaps[j].second, "gap needs alpha < beta");
        require_domain(j == 0 || gaps[j - 1].second < gaps[j].first, "gaps must be disjoint");
    }
    GapSet g;
    g.gaps = std::move(gaps);
    return g;
}

GapSet GapSet::parse(const std::string& text)
{
    const auto blank = text.find_first_not_of(" \t\r\n");
    if (blank == std::string::npos || text == "free") return line();
    static const std::regex pair(R"(\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\))");
    std::vector<std::pair<double, double>> gaps;
    std::string rest;
    auto last = text.cbegin();
    for (std::sregex_iterator it(text.begin(), text.end(), pair), end; it != end; ++it) {
        rest.append(last, (*it)[0].first);
        last = (*it)[0].second;
        try {
            std::size_t used = 0;
            const std::string a = (*it)[1].str();
            const std::string b = (*it)[2].str();
            const double lo = std::stod(a, &used);
            if (used != a.size()) throw std::invalid_argument(a);
            const double hi = std::stod(b, &used);
            if (used != b.size()) throw std::invalid_argument(b);
            gaps.emplace_back(lo, hi);
        } catch (const std::exception&) {
            throw ConfigError("gap list: cannot read numbers in '" + (*it)[0].str() + "'");
        }
    }
    rest.append(last, text.cend());
    if (rest.find_first_not_of(" ,;\t\r\n") != std::string::npos || gaps.empty())
        throw ConfigError("gap list must look like \"(a,b) (c,d)\", got '" + text + "'");
    try {
        return from(std::move(gaps));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("gap list: ") + e.what());
    }
}

GapSet GapSet::shifted(double c) const
{
    GapSet g = *this;
    for (auto& [a, b] : g.gaps) {
        a += c;
        b += c;
    }
    return g;
}

bool GapSet::in_gap(double t) const
{
    return std::any_of(gaps.begin(), gaps.end(), [&](const auto& g) { return g.first < t && t < g.second; });
}

double GapSet::endpoint_distance(double t) const
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : gaps) d = std::min({d, std::abs(t - a), std::abs(t - b)});
    return d;
}

namespace {

// One integrator per thread: its abscissa tables grow lazily.
boost::math::quadrature::tanh_sinh<double>& integrator()
{
    thread_local boost::math::quadrature::tanh_sinh<double> q;
    return q;
}

constexpr double kQuadTol = 1e-12;

// q(t)/R(t) as a product of per-gap factors (t - c_j) / (sqrt(t - alpha_j) sqrt(t - beta_j)).
// `pin` names an endpoint (2j for alpha_j, 2j+1 for beta_j) whose offset
// t - endpoint is supplied exactly as `offset`.
cplx ratio(const MartinModel& m, cplx t, int pin = -1, cplx offset = 0.0)
{
    cplx r = 1.0;
    for (std::size_t j = 0; j < m.gapset.gaps.size(); ++j) {
        const auto [a, b] = m.gapset.gaps[j];
        const cplx da = pin == static_cast<int>(2 * j) ? offset : t - a;
        const cplx db = pin == static_cast<int>(2 * j + 1) ? offset : t - b;
        r *= (t - m.critical_points[j]) / (std::sqrt(da) * std::sqrt(db));
    }
    return r;
}

// Im int_{alpha_j}^{t} q/R(s + i0) ds for t inside gap j, integrated from
// the nearer endpoint (the gap condition makes both choices agree).
double gap_part(const MartinModel& m, std::size_t j, double t)
{
    const auto [a, b] = m.gapset.gaps[j];
    const bool left = t - a <= b - t;
    const double lo = left ? a : t;
    const double hi = left ? t : b;
    const int pin = left ? static_cast<int>(2 * j) : static_cast<int>(2 * j + 1);
    auto f = [&](double s, double sc) {
        // sc is the signed distance to the nearer end of [lo, hi]
        cplx off;
        if (left) off = (sc < 0.0 && s - lo < hi - s) ? cplx(-sc, 0.0) : cplx(s - a, 0.0);
        else off = (sc > 0.0 && hi - s < s - lo) ? cplx(-sc, 0.0) : cplx(s - b, 0.0);
        return ratio(m, cplx(s, 0.0), pin, off).imag();
    };
    double err = 0.0;
    double l1 = 0.0;
    const double v = integrator().integrate(f, lo, hi, kQuadTol, &err, &l1);
    if (!(err <= 1e-8 * std::max(1.0, l1)))
        throw ResolutionError("Martin function: gap quadrature did not converge near a band edge");
    return left ? v : -v;
}

// int_0^y (Re q/R(t + is) - 1) ds
double vertical_excess(const MartinModel& m, double t, double y)
{
    if (!(y > 0.0)) return 0.0;
    int pin = -1;
    for (std::size_t j = 0; j < m.gapset.gaps.size(); ++j) {
        if (t == m.gapset.gaps[j].first) pin = static_cast<int>(2 * j);
        if (t == m.gapset.gaps[j].second) pin = static_cast<int>(2 * j + 1);
    }
    auto f = [&](double s) { return ratio(m, cplx(t, s), pin, cplx(0.0, s)).real() - 1.0; };
    double err = 0.0;
    double l1 = 0.0;
    const double v = integrator().integrate(f, 0.0, y, kQuadTol, &err, &l1);
    if (!(err <= 1e-8 * std::max(1.0, l1)))
        throw ResolutionError("Martin function: path quadrature did not converge near a band edge");
    return v;
}

// Gauss-Chebyshev: int_gap g(t) / sqrt|P(t)| dt with P the full product,
// absorbing the two endpoint square roots of the gap.
template <class G>
double gap_integral(const std::vector<std::pair<double, double>>& gaps, std::size_t j, G&& g, int nodes)
{
    auto inner = [&](double t) {
        double rest = 1.0;
        for (std::size_t i = 0; i < gaps.size(); ++i)
            if (i != j) rest *= std::abs((t - gaps[i].first) * (t - gaps[i].second));
        return g(t) / std::sqrt(rest);
    };
    return quad::chebyshev_first(inner, gaps[j].first, gaps[j].second, nodes);
}

constexpr int kChebNodes = 256;

} // namespace

double one_gap_martin(double alpha, double beta, cplx z)
{
    const cplx w(z.real(), std::abs(z.imag()));
    return (std::sqrt(w - alpha) * std::sqrt(w - beta)).imag();
}

double martin_excess(const MartinModel& model, cplx z)
{
    if (model.gapset.gaps.empty()) return 0.0;
    const double t = z.real();
    const double y = std::abs(z.imag());
    double base = 0.0;
    for (std::size_t j = 0; j < model.gapset.gaps.size(); ++j)
        if (model.gapset.gaps[j].first < t && t < model.gapset.gaps[j].second) base = gap_part(model, j, t);
    return base + vertical_excess(model, t, y);
}

double martin_eval(const MartinModel& model, cplx z)
{
    const double y = std::abs(z.imag());
    if (model.gapset.gaps.empty()) return y;
    return std::abs(y + martin_excess(model, z));
}

std::vector<double> martin_table(const MartinModel& model, const std::vector<cplx>& zs, Exec exec)
{
    std::vector<double> out(zs.size());
    for_each_index(zs.size(), exec, [&](std::size_t k) { out[k] = martin_eval(model, zs[k]); });
    return out;
}

double extract_b(const MartinModel& model)
{
    if (model.gapset.gaps.empty()) return 0.0;
    // 2y (M(iy) - y) = b + O(y^-2) with only even powers
    double v[3];
    const double ys[3] = {1e2, 1e3, 1e4};
    for (int k = 0; k < 3; ++k) v[k] = 2.0 * ys[k] * martin_excess(model, cplx(0.0, ys[k]));
    const double r1 = (100.0 * v[1] - v[0]) / 99.0;
    const double r2 = (100.0 * v[2] - v[1]) / 99.0;
    const double b = (1e4 * r2 - r1) / 9999.0;
    if (b < -1e-8 * std::max(1.0, std::abs(v[2])))
        throw ModelError("Robin constant extrapolated to a negative value");
    return std::max(0.0, b);
}

MartinModel martin_build(const GapSet& gapset)
{
    const auto& gaps = gapset.gaps;
    require_domain(gaps.size() <= 8, "Martin model supports at most 8 gaps");
    for (std::size_t j = 1; j < gaps.size(); ++j) require_domain(gaps[j - 1].second < gaps[j].first, "gaps overlap");
    MartinModel m;
    m.gapset = gapset;
    if (gaps.empty()) return m;

    // Work in u = (t - mid) / half over the span of the gaps.
    const std::size_t g = gaps.size();
    const double mid = 0.5 * (gaps.front().first + gaps.back().second);
    const double half = 0.5 * (gaps.back().second - gaps.front().first);
    std::vector<std::pair<double, double>> ug(g);
    for (std::size_t j = 0; j < g; ++j) ug[j] = {(gaps[j].first - mid) / half, (gaps[j].second - mid) / half};

    // Gap conditions are linear in the coefficients of the monic numerator.
    Eigen::MatrixXd A(g, g);
    Eigen::VectorXd rhs(g);
    for (std::size_t j = 0; j < g; ++j) {
        for (std::size_t k = 0; k <= g; ++k) {
            const double mom = gap_integral(ug, j, [&](double u) { return std::pow(u, static_cast<double>(k)); },
                                            kChebNodes);
            if (k < g) A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = mom;
            else rhs(static_cast<Eigen::Index>(j)) = -mom;
        }
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw ModelError("gap conditions are singular");
    const Eigen::VectorXd coef = lu.solve(rhs);
    auto poly = [&](double u) {
        double p = 1.0;
        for (std::size_t k = g; k-- > 0;) p = p * u + coef(static_cast<Eigen::Index>(k));
        return p;
    };

    // One critical point per gap, by bisection on the sign change.
    for (std::size_t j = 0; j < g; ++j) {
        double lo = ug[j].first;
        double hi = ug[j].second;
        double plo = poly(lo);
        if (plo * poly(hi) > 0.0) throw ModelError("critical point not bracketed in a gap");
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo));
             ++it) {
            const double c = 0.5 * (lo + hi);
            const double pc = poly(c);
            if ((pc < 0.0) == (plo < 0.0)) {
                lo = c;
                plo = pc;
            } else {
                hi = c;
            }
        }
        m.critical_points.push_back(mid + half * 0.5 * (lo + hi));
    }

    for (std::size_t j = 0; j < g; ++j) {
        auto q = [&](double t) {
            double p = 1.0;
            for (double c : m.critical_points) p *= t - c;
            return p;
        };
        const double signed_int = gap_integral(gaps, j, q, kChebNodes);
        const double abs_int = gap_integral(gaps, j, [&](double t) { return std::abs(q(t)); }, kChebNodes);
        m.gap_residual = std::max(m.gap_residual, std::abs(signed_int) / abs_int);
    }

    m.bE = extract_b(m);
    m.normalization = martin_excess(m, cplx(0.0, 1e6)) / 1e6;
    return m;
}

double martin_density(const MartinModel& model, double t)
{
    if (model.gapset.gaps.empty()) return 1.0 / kPi;
    if (model.gapset.in_gap(t)) return 0.0;
    const double d = model.gapset.endpoint_distance(t);
    if (!(d > 0.0)) throw ResolutionError("Martin density is singular at a band edge");
    // M(t + iy) = y M_y - y^3 M_yyy / 6 + ...; Richardson on h and 2h
    const double h = std::min(1e-3, d / 20.0);
    const double d1 = martin_eval(model, cplx(t, h)) / h;
    const double d2 = martin_eval(model, cplx(t, 2.0 * h)) / (2.0 * h);
    return (4.0 * d1 - d2) / 3.0 / kPi;
}

MeasureHistogram martin_measure(const MartinModel& model, double lo, double hi, int bins)
{
    auto h = empty_histogram(lo, hi, bins);
    const double bw = (hi - lo) / bins;
    for (const auto& [a, b] : model.gapset.gaps)
        for (double e : {a, b})
            require_domain(e <= lo - bw || e >= hi + bw, "Martin measure window must avoid band edges by a bin width");
    for (std::size_t k = 0; k < h.masses.size(); ++k) {
        const double mid = 0.5 * (h.bin_edges[k] + h.bin_edges[k + 1]);
        if (model.gapset.in_gap(mid)) continue;
        h.masses[k] = quad::composite([&](double t) { return martin_density(model, t); }, h.bin_edges[k],
                                      h.bin_edges[k + 1], 2, quad::gauss_legendre(8));
    }
    for (double v : h.masses) h.total_mass += v;
    return h;
}

ZeroCounting zero_counting_detail(const OperatorData& phi, double x, double lo, double hi, int bins,
                                  const ZeroCountOptions& opts)
{
    require_domain(x > 0.0, "zero counting needs x > 0");
    require_domain(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "zero counting needs a bounded window");
    require_domain(bins >= 1, "zero counting needs at least one bin");
    ZeroCounting out;
    out.histogram = empty_histogram(lo, hi, bins);
    out.counts.assign(static_cast<std::size_t>(bins), 0);
    auto theta = [&](double z) { return prufer_phase(phi, x, z, 0.0, opts.prufer); };

    // theta decreases at about 2x per unit z; pi/(4x) spacing gives |dtheta| ~ pi/2
    const double bw = (hi - lo) / bins;
    const auto per_bin = static_cast<std::size_t>(std::ceil(bw / (kPi / (4.0 * x))));
    std::vector<double> zs;
    std::vector<int> bin_of; // bin of the interval starting at zs[i]
    for (int b = 0; b < bins; ++b) {
        for (std::size_t k = 0; k < per_bin; ++k) {
            zs.push_back(out.histogram.bin_edges[static_cast<std::size_t>(b)] + bw * static_cast<double>(k) / per_bin);
            bin_of.push_back(b);
        }
    }
    zs.push_back(hi);
    bin_of.push_back(bins - 1);
    std::vector<double> th(zs.size());
    for_each_index(zs.size(), opts.exec, [&](std::size_t i) { th[i] = theta(zs[i]); });

    for (int pass = 0;; ++pass) {
        std::vector<std::size_t> coarse;
        for (std::size_t i = 0; i + 1 < zs.size(); ++i)
            if (!(std::abs(th[i + 1] - th[i]) < kPi)) coarse.push_back(i);
        if (coarse.empty()) break;
        if (pass >= opts.max_refine)
            throw ResolutionError("zero counting: Prufer phase still jumps by pi or more after refinement");
        std::vector<double> mids(coarse.size());
        std::vector<double> mth(coarse.size());
        for (std::size_t k = 0; k < coarse.size(); ++k) mids[k] = 0.5 * (zs[coarse[k]] + zs[coarse[k] + 1]);
        for_each_index(mids.size(), opts.exec, [&](std::size_t k) { mth[k] = theta(mids[k]); });
        std::vector<double> nz, nth;
        std::vector<int> nb;
        std::size_t c = 0;
        for (std::size_t i = 0; i < zs.size(); ++i) {
            nz.push_back(zs[i]);
            nth.push_back(th[i]);
            nb.push_back(bin_of[i]);
            if (c < coarse.size() && coarse[c] == i) {
                nz.push_back(mids[c]);
                nth.push_back(mth[c]);
                nb.push_back(bin_of[i]);
                ++c;
            }
        }
        zs.swap(nz);
        th.swap(nth);
        bin_of.swap(nb);
    }
    out.samples = zs.size();

    // Crossings of 2 pi Z: a zero at a grid point belongs to the interval it closes.
    auto level = [](double t) { return static_cast<long>(std::ceil(t / (2.0 * kPi))); };
    std::vector<std::pair<std::size_t, double>> brackets;
    for (std::size_t i = 0; i + 1 < zs.size(); ++i) {
        const long a = level(th[i]);
        const long b = level(th[i + 1]);
        if (a == b) continue;
        out.counts[static_cast<std::size_t>(bin_of[i])] += std::labs(a - b);
        brackets.emplace_back(i, 2.0 * kPi * static_cast<double>(std::min(a, b)));
    }
    for (std::size_t b = 0; b < out.counts.size(); ++b) {
        out.histogram.masses[b] = static_cast<double>(out.counts[b]) / x;
        out.histogram.total_mass += out.histogram.masses[b];
    }

    if (opts.locate) {
        out.zeros.resize(brackets.size());
        for_each_index(brackets.size(), opts.exec, [&](std::size_t k) {
            const auto [i, L] = brackets[k];
            double a = zs[i];
            double b = zs[i + 1];
            const bool falling = th[i] > th[i + 1];
            while (b - a > opts.zero_tolerance) {
                const double m = 0.5 * (a + b);
                const double f = theta(m) - L;
                // keep the closed end of the bracket on the lattice side
                if (falling ? (f > 0.0) : (f <= 0.0)) a = m;
                else b = m;
            }
            out.zeros[k] = 0.5 * (a + b);
        });
    }
    return out;
}

MeasureHistogram zero_counting(const OperatorData& phi, double x, double lo, double hi, int bins,
                               const ZeroCountOptions& opts)
{
    return zero_counting_detail(phi, x, lo, hi, bins, opts).histogram;
}

} // namespace dirac
