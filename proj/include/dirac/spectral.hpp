#pragma once

#include "dirac/common.hpp"
#include "dirac/operator_data.hpp"
#include "dirac/parallel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dirac {

// Masses per bin on an increasing edge list plus the mass left outside it.
struct MeasureHistogram {
    std::vector<double> bin_edges;
    std::vector<double> masses;
    double total_mass = 0.0;
    double tail_mass = 0.0;
};

// Equal-width bins on [lo, hi].
MeasureHistogram empty_histogram(double lo, double hi, int bins);
// Mass of the bins lying inside [-L, L].
double window_mass(const MeasureHistogram& h, double L);

// How the transform of phi chi_[0,x] was sampled.
//   riemann: point samples resolving phi, whole band |k| < pi/step kept;
//   cells: exact integrals over cells of width w (box filter), divided by
//     sinc(kw/2) and kept for |k| <= kmax only. Used when the Riemann grid
//     would exceed the sample budget; aliasing stays below (kmax w / 2pi)^2.
enum class SigmaRoute { riemann, cells };
std::string to_string(SigmaRoute r);

struct SigmaOptions {
    std::size_t max_samples = std::size_t{1} << 24;
    bool allow_cells = true;
};

struct SigmaResult {
    MeasureHistogram histogram;
    SigmaRoute route = SigmaRoute::riemann;
    double step = 0.0;       // sample spacing or cell width
    double dk = 0.0;         // k-lattice spacing of the frequency functional, pi / (4x)
    double band_mass = 0.0;  // mass over the whole sampled band (riemann only)
    double cesaro = 0.0;
};

// sigma_x = (1/x) |(phi chi_[0,x])^|^2 dk with f^(k) = (2pi)^{-1/2} int f e^{-ikt} dt,
// binned on [-kmax, kmax]; tail_mass = cesaro_l2(phi, x) - binned mass.
// The transform of the sampled data is a trigonometric polynomial in k, so
// each bin holds its exact integral, formed from the sample autocorrelation.
SigmaResult sigma_summary(const OperatorData& phi, double x, double kmax, int bins, const SigmaOptions& opts = {});
MeasureHistogram sigma_x(const OperatorData& phi, double x, double kmax, int bins, const SigmaOptions& opts = {});

// |g_eps^(k)|^2 with g_eps^(k) = (e^{i eps k} - 1) / (i eps k)
double g_hat_sq(double eps, double k);

enum class GMode { frequency, time };
// frequency: int |g_eps^|^2 d sigma_x over the Riemann band (no truncation);
// time: avg_l2_profile(phi, x, eps).
double g_eps_functional(const OperatorData& phi, double x, double eps, GMode mode, const SigmaOptions& opts = {});

struct RegularityRow {
    double x = 0.0;
    double eps = 0.0;
    double time_value = 0.0;
    std::optional<double> freq_value;
    double gap = 0.0; // time_value - bE
};

enum class Verdict { regular_consistent, inconclusive, inequality_violated };
std::string to_string(Verdict v);

struct RegularityOptions {
    bool frequency = true;  // also evaluate the frequency side where the budget allows
    SigmaOptions sigma{std::size_t{1} << 21, false};
    Exec exec = Exec::parallel;
};

struct RegularitySummary {
    double bE = 0.0;
    std::vector<RegularityRow> rows; // x-major, then eps in grid order
    double window_lo = 0.0;          // proxies use x in [window_lo, window_hi]
    double window_hi = 0.0;
    std::vector<double> eps;
    std::vector<double> liminf_proxy; // per eps: min over the window
    std::vector<double> limsup_proxy; // per eps: max over the window
    double sup_liminf = 0.0;          // sup over eps of liminf_proxy
    double tolerance = 0.0;           // 0.05 max(1, bE)
    Verdict verdict = Verdict::inconclusive;
};

// Gap table avg_l2_profile - bE over the grids, proxies over the largest
// decade of x, and the verdict: inequality_violated if the sup of liminf
// proxies lies below bE - tolerance, regular_consistent if every limsup proxy
// lies below bE + tolerance, inconclusive otherwise.
RegularitySummary regularity_gap(const OperatorData& phi, double bE, const std::vector<double>& x_grid,
                                 const std::vector<double>& eps_grid, const RegularityOptions& opts = {});

} // namespace dirac
