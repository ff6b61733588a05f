#include "dirac/operator_data.hpp"

#include "dirac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dirac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(const std::vector<cplx>& values)
{
    for (const auto& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InvalidDataError("operator data contains non-finite samples");
}

void sort_unique(std::vector<double>& pts)
{
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

} // namespace

OperatorData OperatorData::zero()
{
    return OperatorData{};
}

OperatorData OperatorData::constant(cplx c)
{
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw InvalidDataError("constant operator data is not finite");
    OperatorData phi;
    phi.family_ = Family::constant;
    phi.c_ = c;
    return phi;
}

OperatorData OperatorData::chirp(double alpha)
{
    require_domain(alpha > 1.0, "chirp exponent must exceed 1");
    OperatorData phi;
    phi.family_ = Family::chirp;
    phi.alpha_ = alpha;
    phi.tail_ = std::make_shared<chirp::PowerTail>(alpha);
    return phi;
}

OperatorData OperatorData::gated_chirp(double alpha, double q)
{
    require_domain(alpha > 1.0, "chirp exponent must exceed 1");
    require_domain(q > 1.0, "gate ratio must exceed 1");
    OperatorData phi = chirp(alpha);
    phi.family_ = Family::gated_chirp;
    phi.q_ = q;
    return phi;
}

static void build_prefix(const std::vector<cplx>& v, double h, std::vector<cplx>& p,
                         std::vector<double>& psq, std::vector<double>& pabs)
{
    p.assign(v.size() + 1, 0.0);
    psq.assign(v.size() + 1, 0.0);
    pabs.assign(v.size() + 1, 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        p[k + 1] = p[k] + h * v[k];
        psq[k + 1] = psq[k] + h * std::norm(v[k]);
        pabs[k + 1] = pabs[k] + h * std::abs(v[k]);
    }
}

OperatorData OperatorData::periodic_samples(double period, std::vector<cplx> values)
{
    require_domain(period > 0.0, "period must be positive");
    require_domain(!values.empty(), "periodic samples are empty");
    check_finite(values);
    OperatorData phi;
    phi.family_ = Family::periodic_samples;
    phi.step_ = period / static_cast<double>(values.size());
    phi.values_ = std::move(values);
    build_prefix(phi.values_, phi.step_, phi.prefix_, phi.prefix_sq_, phi.prefix_abs_);
    return phi;
}

OperatorData OperatorData::grid_samples(double step, std::vector<cplx> values)
{
    require_domain(step > 0.0, "grid step must be positive");
    check_finite(values);
    OperatorData phi;
    phi.family_ = Family::grid_samples;
    phi.step_ = step;
    phi.values_ = std::move(values);
    build_prefix(phi.values_, phi.step_, phi.prefix_, phi.prefix_sq_, phi.prefix_abs_);
    return phi;
}

OperatorData OperatorData::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open operator data file: " + path);
    std::vector<double> ts;
    std::vector<cplx> values;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        double t = 0.0, re = 0.0, im = 0.0;
        if (!(row >> t)) continue;
        if (!(row >> re)) throw ConfigError("operator data line without a value: " + line);
        if (!(row >> im)) im = 0.0;
        ts.push_back(t);
        values.emplace_back(re, im);
    }
    if (ts.size() < 2) throw ConfigError("operator data file needs at least two samples");
    const double step = ts[1] - ts[0];
    if (!(step > 0.0) || std::abs(ts[0]) > 1e-9 * step)
        throw ConfigError("operator data samples must start at t = 0 with increasing t");
    for (std::size_t k = 0; k < ts.size(); ++k)
        if (std::abs(ts[k] - static_cast<double>(k) * step) > 1e-6 * step)
            throw ConfigError("operator data samples are not uniformly spaced");
    return grid_samples(step, std::move(values));
}

bool OperatorData::piecewise_constant() const
{
    return family_ != Family::chirp && family_ != Family::gated_chirp;
}

std::string OperatorData::describe() const
{
    std::ostringstream out;
    out.precision(17);
    switch (family_) {
    case Family::zero: out << "zero"; break;
    case Family::constant: out << "constant(" << c_.real() << "," << c_.imag() << ")"; break;
    case Family::chirp: out << "chirp(alpha=" << alpha_ << ")"; break;
    case Family::gated_chirp: out << "gated_chirp(alpha=" << alpha_ << ",q=" << q_ << ")"; break;
    case Family::periodic_samples:
        out << "periodic_samples(period=" << period() << ",n=" << values_.size() << ")";
        break;
    case Family::grid_samples:
        out << "grid_samples(step=" << step_ << ",n=" << values_.size() << ")";
        break;
    }
    return out.str();
}

std::vector<std::pair<double, double>> OperatorData::gates(double a, double b) const
{
    std::vector<std::pair<double, double>> out;
    if (family_ == Family::chirp) {
        if (b > 0.0) out.emplace_back(0.0, kInf);
        return out;
    }
    if (family_ != Family::gated_chirp) return out;
    for (int k = 0;; ++k) {
        const double l = std::pow(q_, 2 * k);
        if (!(l < b)) break;
        const double r = std::pow(q_, 2 * k + 1);
        if (r > a) out.emplace_back(l, r);
    }
    return out;
}

cplx OperatorData::operator()(double t) const
{
    if (t < 0.0) return 0.0;
    switch (family_) {
    case Family::zero: return 0.0;
    case Family::constant: return c_;
    case Family::chirp: return std::sin(std::pow(t, alpha_));
    case Family::gated_chirp: {
        if (t < 1.0) return 0.0;
        int k = static_cast<int>(std::floor(std::log(t) / std::log(q_)));
        while (std::pow(q_, k + 1) <= t) ++k;
        while (k > 0 && std::pow(q_, k) > t) --k;
        return (k % 2 == 0) ? std::sin(std::pow(t, alpha_)) : 0.0;
    }
    case Family::periodic_samples: {
        const double r = std::fmod(t, period());
        auto k = static_cast<std::size_t>(r / step_);
        return values_[std::min(k, values_.size() - 1)];
    }
    case Family::grid_samples: {
        const double k = std::floor(t / step_);
        if (k >= static_cast<double>(values_.size())) return 0.0;
        return values_[static_cast<std::size_t>(k)];
    }
    }
    return 0.0;
}

cplx OperatorData::grid_primitive(double t) const
{
    if (t <= 0.0) return 0.0;
    const std::size_t n = values_.size();
    double periods = 0.0;
    if (family_ == Family::periodic_samples) {
        periods = std::floor(t / period());
        t -= periods * period();
    }
    const double kf = std::floor(t / step_);
    cplx base = periods * prefix_[n];
    if (kf >= static_cast<double>(n)) return base + prefix_[n];
    const auto k = static_cast<std::size_t>(kf);
    return base + prefix_[k] + values_[k] * (t - kf * step_);
}

double OperatorData::grid_primitive_sq(double t) const
{
    if (t <= 0.0) return 0.0;
    const std::size_t n = values_.size();
    double periods = 0.0;
    if (family_ == Family::periodic_samples) {
        periods = std::floor(t / period());
        t -= periods * period();
    }
    const double kf = std::floor(t / step_);
    double base = periods * prefix_sq_[n];
    if (kf >= static_cast<double>(n)) return base + prefix_sq_[n];
    const auto k = static_cast<std::size_t>(kf);
    return base + prefix_sq_[k] + std::norm(values_[k]) * (t - kf * step_);
}

double OperatorData::grid_primitive_abs(double t) const
{
    if (t <= 0.0) return 0.0;
    const std::size_t n = values_.size();
    double periods = 0.0;
    if (family_ == Family::periodic_samples) {
        periods = std::floor(t / period());
        t -= periods * period();
    }
    const double kf = std::floor(t / step_);
    double base = periods * prefix_abs_[n];
    if (kf >= static_cast<double>(n)) return base + prefix_abs_[n];
    const auto k = static_cast<std::size_t>(kf);
    return base + prefix_abs_[k] + std::abs(values_[k]) * (t - kf * step_);
}

cplx OperatorData::chirp_integral(double a, double b) const
{
    double sum = 0.0;
    for (const auto& [l, r] : gates(a, b)) {
        const double lo = std::max(l, a);
        const double hi = std::min(r, b);
        if (hi > lo) sum += tail_->integral(lo, hi).imag();
    }
    return sum;
}

double OperatorData::chirp_integral_sq(double a, double b) const
{
    double sum = 0.0;
    for (const auto& [l, r] : gates(a, b)) {
        const double lo = std::max(l, a);
        const double hi = std::min(r, b);
        if (hi > lo) sum += 0.5 * (hi - lo) - 0.5 * tail_->integral_scaled(2.0, lo, hi).real();
    }
    return sum;
}

double OperatorData::chirp_integral_abs(double a, double b) const
{
    double sum = 0.0;
    for (const auto& [l, r] : gates(a, b)) {
        const double lo = std::max(l, a);
        const double hi = std::min(r, b);
        if (!(hi > lo)) continue;
        // sin(t^alpha) keeps its sign between consecutive zeros (k pi)^{1/alpha}
        double k = std::floor(std::pow(lo, alpha_) / kPi) + 1.0;
        double left = lo;
        while (left < hi) {
            const double right = std::min(hi, std::pow(k * kPi, 1.0 / alpha_));
            if (right > left) sum += std::abs(tail_->integral(left, right).imag());
            left = right;
            k += 1.0;
        }
    }
    return sum;
}

cplx OperatorData::integral(double a, double b) const
{
    a = std::max(a, 0.0);
    if (!(b > a)) return 0.0;
    switch (family_) {
    case Family::zero: return 0.0;
    case Family::constant: return c_ * (b - a);
    case Family::chirp:
    case Family::gated_chirp: return chirp_integral(a, b);
    case Family::periodic_samples:
    case Family::grid_samples: return grid_primitive(b) - grid_primitive(a);
    }
    return 0.0;
}

double OperatorData::integral_sq(double a, double b) const
{
    a = std::max(a, 0.0);
    if (!(b > a)) return 0.0;
    switch (family_) {
    case Family::zero: return 0.0;
    case Family::constant: return std::norm(c_) * (b - a);
    case Family::chirp:
    case Family::gated_chirp: return chirp_integral_sq(a, b);
    case Family::periodic_samples:
    case Family::grid_samples: return grid_primitive_sq(b) - grid_primitive_sq(a);
    }
    return 0.0;
}

double OperatorData::integral_abs(double a, double b) const
{
    a = std::max(a, 0.0);
    if (!(b > a)) return 0.0;
    switch (family_) {
    case Family::zero: return 0.0;
    case Family::constant: return std::abs(c_) * (b - a);
    case Family::chirp:
    case Family::gated_chirp: return chirp_integral_abs(a, b);
    case Family::periodic_samples:
    case Family::grid_samples: return grid_primitive_abs(b) - grid_primitive_abs(a);
    }
    return 0.0;
}

std::vector<double> OperatorData::breakpoints(double a, double b) const
{
    std::vector<double> out;
    auto keep = [&](double t) {
        if (t > a && t < b) out.push_back(t);
    };
    switch (family_) {
    case Family::zero:
    case Family::chirp: break;
    case Family::constant: keep(0.0); break;
    case Family::gated_chirp:
        for (const auto& [l, r] : gates(a, b)) {
            keep(l);
            keep(r);
        }
        break;
    case Family::periodic_samples:
    case Family::grid_samples: {
        const double last = family_ == Family::grid_samples
            ? static_cast<double>(values_.size()) : kInf;
        const double k0 = std::max(0.0, std::floor(a / step_));
        for (double k = k0; k <= last && k * step_ < b; k += 1.0) keep(k * step_);
        break;
    }
    }
    return out;
}

double OperatorData::local_rate(double t) const
{
    if (piecewise_constant() || t <= 0.0) return 0.0;
    return alpha_ * std::pow(t, alpha_ - 1.0);
}

double triple_norm(const OperatorData& phi, int p, double horizon)
{
    require_domain(p == 1 || p == 2, "triple norm order must be 1 or 2");
    require_domain(horizon >= 1.0, "triple norm horizon must be at least 1");
    if (phi.family() == Family::zero) return 0.0;
    if (phi.family() == Family::constant) return std::abs(phi.constant_value());

    std::vector<double> starts;
    const auto lattice = static_cast<long long>(std::floor(16.0 * horizon));
    for (long long k = 0; k <= lattice; ++k) starts.push_back(static_cast<double>(k) / 16.0);
    for (double e : phi.breakpoints(-1.0, horizon + 1.0)) {
        if (e <= horizon) starts.push_back(e);
        if (e - 1.0 >= 0.0 && e - 1.0 <= horizon) starts.push_back(e - 1.0);
    }
    sort_unique(starts);
    double best = 0.0;
    for (double x : starts) {
        const double v = (p == 2) ? phi.integral_sq(x, x + 1.0) : phi.integral_abs(x, x + 1.0);
        if (!std::isfinite(v)) throw InvalidDataError("non-finite window integral");
        best = std::max(best, v);
    }
    return p == 2 ? std::sqrt(best) : best;
}

double cesaro_l2(const OperatorData& phi, double x)
{
    require_domain(x > 0.0, "Cesaro average needs x > 0");
    return phi.integral_sq(0.0, x) / x;
}

cplx local_average(const OperatorData& phi, double t, double eps)
{
    require_domain(eps > 0.0, "local average needs eps > 0");
    return phi.integral(t, t + eps) / eps;
}

namespace {

// int_a^b (Im W)^2 / eps^2 dt on a piece where the window [t, t+eps] meets
// the same gate endpoints throughout, so that
// W(t) = C + sum_k s_k E(t + u_k) with E the chirp tail.
double zone_piece(const OperatorData& phi, double a, double b, double eps)
{
    const auto& tail = phi.tail();
    const double tm = 0.5 * (a + b);
    cplx C = 0.0;
    double s[2];
    double u[2];
    int terms = 0;
    for (const auto& [l, r] : phi.gates(tm, tm + eps)) {
        const double lo = std::max(l, tm);
        const double hi = std::min(r, tm + eps);
        if (!(hi > lo)) continue;
        if (l <= tm) {
            s[terms] = 1.0;
            u[terms++] = 0.0;
        } else {
            C += tail.tail(l);
        }
        if (r >= tm + eps) {
            s[terms] = -1.0;
            u[terms++] = eps;
        } else {
            C -= tail.tail(r);
        }
    }
    const double len = b - a;
    double mod_sq = std::norm(C) * len;
    cplx sq = C * C * len;
    for (int k = 0; k < terms; ++k) {
        const cplx p1 = tail.tail_integral(a, b, u[k]);
        mod_sq += 2.0 * s[k] * (std::conj(C) * p1).real();
        sq += 2.0 * s[k] * C * p1;
        mod_sq += tail.tail_cross(a, b, u[k], u[k]).real();
        sq += tail.tail_product(a, b, u[k], u[k]);
    }
    if (terms == 2) {
        mod_sq += 2.0 * s[0] * s[1] * tail.tail_cross(a, b, u[0], u[1]).real();
        sq += 2.0 * s[0] * s[1] * tail.tail_product(a, b, u[0], u[1]);
    }
    return (mod_sq - sq.real()) / (2.0 * eps * eps);
}

double brute_piece(const OperatorData& phi, double a, double b, double eps)
{
    auto f = [&](double t) { return std::norm(phi.integral(t, t + eps)) / (eps * eps); };
    auto width = [&](double t) {
        const double rate = 2.0 * phi.local_rate(t + eps);
        return rate > 0.0 ? std::min(0.25, 0.25 * kPi / rate) : 0.25;
    };
    return quad::adaptive_cells(f, a, b, width);
}

} // namespace

double avg_l2_profile(const OperatorData& phi, double x, double eps)
{
    require_domain(x > 0.0, "averaged profile needs x > 0");
    require_domain(eps > 0.0, "averaged profile needs eps > 0");
    if (phi.family() == Family::zero) return 0.0;

    // The local average is smooth between these points.
    std::vector<double> cuts{0.0, x};
    for (double e : phi.breakpoints(-eps, x + eps)) {
        if (e > 0.0 && e < x) cuts.push_back(e);
        if (e - eps > 0.0 && e - eps < x) cuts.push_back(e - eps);
    }
    const bool chirped = !phi.piecewise_constant();
    const double zone = chirped ? phi.tail().zone_start() : 0.0;
    if (chirped && zone < x) cuts.push_back(zone);
    sort_unique(cuts);

    double total = 0.0;
    const auto& gl2 = quad::gauss_legendre(2);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        if (!chirped) {
            // the local average is affine here, so two Gauss points are exact
            total += quad::gauss([&](double t) { return std::norm(phi.integral(t, t + eps)); }, a, b, gl2)
                / (eps * eps);
        } else if (a >= zone) {
            total += zone_piece(phi, a, b, eps);
        } else {
            total += brute_piece(phi, a, b, eps);
        }
    }
    return total / x;
}

std::vector<cplx> cell_averages(const OperatorData& phi, double a, double h, std::size_t n, Exec exec)
{
    std::vector<cplx> out(n);
    if (phi.family() == Family::zero) return out;
    if (phi.piecewise_constant()) {
        for_each_index(n, exec, [&](std::size_t k) {
            const double lo = a + h * static_cast<double>(k);
            out[k] = phi.integral(lo, lo + h) / h;
        });
        return out;
    }
    // Chirp families: tails at shared cell edges, one evaluation per edge.
    const auto& tail = phi.tail();
    std::vector<cplx> edge(n + 1);
    std::vector<char> usable(n + 1, 0);
    for_each_index(n + 1, exec, [&](std::size_t k) {
        const double t = a + h * static_cast<double>(k);
        if (t >= tail.zone_start()) {
            edge[k] = tail.tail(t);
            usable[k] = 1;
        }
    });
    const bool gated = phi.family() == Family::gated_chirp;
    for_each_index(n, exec, [&](std::size_t k) {
        const double lo = a + h * static_cast<double>(k);
        const double hi = lo + h;
        bool inside = usable[k] && usable[k + 1];
        if (inside && gated) {
            const auto g = phi.gates(lo, hi);
            inside = g.size() == 1 && g[0].first <= lo && g[0].second >= hi;
            if (g.empty()) {
                out[k] = 0.0;
                return;
            }
        }
        out[k] = inside ? cplx((edge[k] - edge[k + 1]).imag() / h, 0.0) : phi.integral(lo, hi) / h;
    });
    return out;
}

OperatorData reflect_translate(const OperatorData& phi, double x0)
{
    require_domain(x0 >= 0.0, "reflection point must be nonnegative");
    if (phi.family() == Family::zero) return OperatorData::zero();
    if (x0 == 0.0) return OperatorData::grid_samples(1.0, {});

    double h = 0.0;
    if (phi.family() == Family::grid_samples || phi.family() == Family::periodic_samples) {
        const double cells = x0 / phi.step();
        h = std::abs(cells - std::round(cells)) < 1e-9 * std::max(1.0, cells) && std::round(cells) >= 1.0
            ? x0 / std::round(cells)
            : std::min(phi.step(), 0.01);
    } else if (phi.family() == Family::constant) {
        h = std::min(x0, 1.0);
    } else {
        h = std::min(0.01, 0.1 / std::max(1.0, phi.local_rate(x0)));
    }
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(x0 / h - 1e-9)));
    h = x0 / static_cast<double>(n);
    std::vector<cplx> avg = cell_averages(phi, 0.0, h, n);
    std::vector<cplx> values(n);
    for (std::size_t j = 0; j < n; ++j) values[j] = std::conj(avg[n - 1 - j]);
    return OperatorData::grid_samples(h, std::move(values));
}

} // namespace dirac
