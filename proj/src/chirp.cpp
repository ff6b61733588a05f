#include "dirac/chirp.hpp"

#include "dirac/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace dirac::chirp {

namespace {

constexpr double kZonePhase = 256.0;

int laguerre_order(double phase_modulus)
{
    return phase_modulus >= 4096.0 ? 8 : 16;
}

} // namespace

PowerTail::PowerTail(double alpha)
    : alpha_(alpha), zone_start_(std::pow(kZonePhase, 1.0 / alpha))
{
    require_domain(alpha > 1.0, "chirp exponent must exceed 1");
}

cplx PowerTail::envelope(cplx w) const
{
    const cplx wa = std::pow(w, alpha_);
    const auto& rule = quad::gauss_laguerre(laguerre_order(std::abs(wa)));
    const double beta = 1.0 / alpha_ - 1.0;
    cplx sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        sum += rule.weights[k] * std::pow(wa + kI * rule.nodes[k], beta);
    return kI / alpha_ * sum;
}

cplx PowerTail::brute(double a, double b, double kappa) const
{
    auto f = [&](double s) { return std::polar(1.0, kappa * std::pow(s, alpha_)); };
    auto width = [&](double s) {
        const double rate = kappa * alpha_ * std::pow(std::max(s, 1e-3), alpha_ - 1.0);
        return std::min(0.25, 0.25 * kPi / rate);
    };
    return quad::adaptive_cells(f, a, b, width);
}

cplx PowerTail::tail(double w) const
{
    if (w < zone_start_) return brute(w, zone_start_, 1.0) + tail(zone_start_);
    return std::polar(1.0, std::pow(w, alpha_)) * envelope(cplx(w, 0.0));
}

cplx PowerTail::tail(cplx w) const
{
    if (w.imag() == 0.0) return tail(w.real());
    const double c = w.real();
    const double ca = std::pow(c, alpha_);
    const cplx incr = ca * dirac::expm1(alpha_ * dirac::log1p(cplx(0.0, w.imag() / c)));
    return std::polar(1.0, ca) * std::exp(kI * incr) * envelope(w);
}

cplx PowerTail::integral(double a, double b) const
{
    if (!(b > a)) return 0.0;
    if (b <= zone_start_) return brute(a, b, 1.0);
    if (a < zone_start_) return brute(a, zone_start_, 1.0) + tail(zone_start_) - tail(b);
    return tail(a) - tail(b);
}

cplx PowerTail::integral_scaled(double kappa, double a, double b) const
{
    const double s = std::pow(kappa, 1.0 / alpha_);
    return integral(s * a, s * b) / s;
}

cplx PowerTail::tail_primitive(double c) const
{
    require_domain(c >= zone_start_, "tail primitive below the oscillatory zone");
    const double ca = std::pow(c, alpha_);
    const auto& rule = quad::gauss_laguerre(laguerre_order(ca));
    cplx sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const cplx rel = dirac::log1p(cplx(0.0, rule.nodes[k] / ca)) / alpha_;
        const cplx sigma = c * std::exp(rel);
        const cplx gap = c * dirac::expm1(rel);
        sum += rule.weights[k] * gap * sigma / (ca + kI * rule.nodes[k]);
    }
    return std::polar(1.0, ca) * (kI / alpha_) * sum;
}

cplx PowerTail::tail_integral(double a, double b, double u) const
{
    if (!(b > a)) return 0.0;
    return tail_primitive(a + u) - tail_primitive(b + u);
}

cplx PowerTail::ray_product(double c, double u, double v) const
{
    const double cu = c + u;
    const double cv = c + v;
    const double cua = std::pow(cu, alpha_);
    const double cva = std::pow(cv, alpha_);
    const double lambda = alpha_ * (cua / cu + cva / cv);
    const auto& rule = quad::gauss_laguerre(16);
    cplx sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double tau = rule.nodes[k] / lambda;
        const cplx iu = cua * dirac::expm1(alpha_ * dirac::log1p(cplx(0.0, tau / cu)));
        const cplx iv = cva * dirac::expm1(alpha_ * dirac::log1p(cplx(0.0, tau / cv)));
        const cplx factor = std::exp(kI * (iu + iv) + rule.nodes[k]);
        sum += rule.weights[k] * factor * envelope(cplx(cu, tau)) * envelope(cplx(cv, tau));
    }
    // the two real base phases are reduced separately to keep full accuracy
    return std::polar(1.0, cua) * std::polar(1.0, cva) * sum / lambda;
}

cplx PowerTail::tail_product(double a, double b, double u, double v) const
{
    if (!(b > a)) return 0.0;
    require_domain(a + std::min(u, v) >= zone_start_, "tail product below the oscillatory zone");
    return kI * (ray_product(a, u, v) - ray_product(b, u, v));
}

cplx PowerTail::ray_cross(double c, double u, double v) const
{
    // e^{i((t+u)^alpha - (t+v)^alpha)} decays upward when u > v, downward otherwise
    const double d = (u > v) ? 1.0 : -1.0;
    const double lambda = drift(c, u, v);
    const auto& rule = quad::gauss_laguerre(16);
    cplx sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double tau = d * rule.nodes[k] / lambda;
        const cplx wv(c + v, tau);
        const cplx phase = std::pow(wv, alpha_) * dirac::expm1(alpha_ * dirac::log1p((u - v) / wv));
        const cplx factor = std::exp(kI * phase + rule.nodes[k]);
        sum += rule.weights[k] * factor * envelope(cplx(c + u, tau))
            * std::conj(envelope(cplx(c + v, -tau)));
    }
    return d * kI * sum / lambda;
}

double PowerTail::drift(double t, double u, double v) const
{
    return alpha_ * std::abs(std::pow(t + u, alpha_ - 1.0) - std::pow(t + v, alpha_ - 1.0));
}

cplx PowerTail::tail_cross(double a, double b, double u, double v) const
{
    if (!(b > a)) return 0.0;
    require_domain(a + std::min(u, v) >= zone_start_, "tail cross product below the oscillatory zone");
    auto f = [&](double t) {
        const double base = std::pow(t + v, alpha_);
        const double rel = std::expm1(alpha_ * std::log1p((u - v) / (t + v)));
        return std::polar(1.0, base * rel) * envelope(cplx(t + u, 0.0))
            * std::conj(envelope(cplx(t + v, 0.0)));
    };
    auto width = [&](double t) {
        const double rate = drift(t, u, v);
        double w = std::max(t, 1.0) / 8.0;
        if (rate > 0.0) w = std::min(w, 0.5 * kPi / rate);
        return w;
    };
    if (u == v) return quad::adaptive_cells(f, a, b, width);

    // Past `split` the decay length of the deformed rays is short against t.
    auto deformable = [&](double t) { return drift(t, u, v) * t >= kZonePhase; };
    if (!deformable(b)) return quad::adaptive_cells(f, a, b, width);
    double split = a;
    if (!deformable(a)) {
        double lo = a;
        split = b;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + split);
            (deformable(mid) ? split : lo) = mid;
        }
    }
    return quad::adaptive_cells(f, a, split, width) + (ray_cross(split, u, v) - ray_cross(b, u, v));
}

} // namespace dirac::chirp
