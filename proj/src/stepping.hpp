#pragma once

#include "dirac/operator_data.hpp"
#include "dirac/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dirac::detail {

// A stretch of [a, b] on which phi is either a constant or the smooth chirp
// sin(t^alpha), so the stepper never evaluates across a jump.
struct Segment {
    double a = 0.0;
    double b = 0.0;
    bool smooth = false;
    cplx value = 0.0;
    double alpha = 0.0;

    cplx operator()(double t) const { return smooth ? cplx(std::sin(std::pow(t, alpha)), 0.0) : value; }
    double magnitude() const { return smooth ? 1.0 : std::abs(value); }
};

inline std::vector<Segment> segments(const OperatorData& phi, double a, double b)
{
    std::vector<Segment> out;
    if (!(b > a)) return out;
    std::vector<double> cuts{a, b};
    if (a < 0.0 && b > 0.0) cuts.push_back(0.0);
    for (double e : phi.breakpoints(a, b)) cuts.push_back(e);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    out.reserve(cuts.size());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Segment s;
        s.a = cuts[i];
        s.b = cuts[i + 1];
        const double mid = 0.5 * (s.a + s.b);
        if (phi.piecewise_constant()) {
            s.value = phi(mid);
        } else if (mid > 0.0 && !phi.gates(mid, mid).empty()) {
            s.smooth = true;
            s.alpha = phi.alpha();
        }
        out.push_back(s);
    }
    return out;
}

// Step lengths on a segment: bounded by max_step, by z_phase over the local
// size of the right-hand side, and by oscillation_phase over the chirp rate.
class StepPlan {
public:
    StepPlan(const PropagationOptions& opts, cplx z) : opts_(opts), zmag_(std::abs(z)) {}

    double next(const Segment& s, double t, double remaining) const
    {
        if (opts_.forced_step > 0.0) {
            const double n = std::ceil(remaining / opts_.forced_step - 1e-9);
            return remaining / std::max(1.0, n);
        }
        double h = std::min(opts_.max_step, opts_.z_phase / std::max(1e-300, zmag_ + s.magnitude()));
        if (s.smooth) {
            const double ahead = std::abs(t) + h;
            const double rate = s.alpha * std::pow(ahead, s.alpha - 1.0);
            h = std::min(h, opts_.oscillation_phase / std::max(rate, 1e-300));
        }
        if (!s.smooth) {
            // equal steps across a constant segment
            const double n = std::ceil(remaining / h - 1e-9);
            return remaining / std::max(1.0, n);
        }
        return remaining <= h * (1.0 + 1e-9) ? remaining : h;
    }

private:
    PropagationOptions opts_;
    double zmag_;
};

// Walks [a, b] forward (or [b, a] backward when reverse) calling
// fn(t, h, phi(t), phi(t + h/2), phi(t + h)) with signed h.
template <class Fn>
void march(const OperatorData& phi, double a, double b, cplx z, const PropagationOptions& opts, bool reverse, Fn&& fn)
{
    const auto segs = segments(phi, a, b);
    const StepPlan plan(opts, z);
    auto run = [&](const Segment& s) {
        if (!reverse) {
            double t = s.a;
            while (t < s.b) {
                double h = plan.next(s, t, s.b - t);
                const double t1 = (s.b - t <= h * (1.0 + 1e-12)) ? s.b : t + h;
                h = t1 - t;
                fn(t, h, s(t), s(t + 0.5 * h), s(t1));
                t = t1;
            }
        } else {
            double t = s.b;
            while (t > s.a) {
                double h = plan.next(s, t, t - s.a);
                const double t1 = (t - s.a <= h * (1.0 + 1e-12)) ? s.a : t - h;
                h = t1 - t;
                fn(t, h, s(t), s(t + 0.5 * h), s(t1));
                t = t1;
            }
        }
    };
    if (!reverse)
        for (const auto& s : segs) run(s);
    else
        for (auto it = segs.rbegin(); it != segs.rend(); ++it) run(*it);
}

} // namespace dirac::detail
