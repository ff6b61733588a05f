#pragma once

#include "dirac/common.hpp"
#include "dirac/operator_data.hpp"
#include "dirac/parallel.hpp"
#include "dirac/propagation.hpp"
#include "dirac/spectral.hpp"

#include <utility>
#include <vector>

namespace dirac {

// E = R minus finitely many disjoint open gaps, sorted.
struct GapSet {
    std::vector<std::pair<double, double>> gaps;

    static GapSet line() { return {}; }
    static GapSet from(std::vector<std::pair<double, double>> gaps);
    // Text form "(a,b) (c,d) ..." or "free"/"" for the whole line.
    static GapSet parse(const std::string& text);
    GapSet shifted(double c) const;
    bool in_gap(double t) const;
    // Distance from t to the nearest gap endpoint; +inf without gaps.
    double endpoint_distance(double t) const;
};

// Martin function of the complement of E: M(z) = |Im int_{x0}^z q/R| with
// R = prod_j sqrt(t - alpha_j) sqrt(t - beta_j) (principal roots, continuous
// in the closed upper half plane), q = prod_j (t - c_j) monic with one
// critical point per gap fixed by int_gap q / |R| = 0, and x0 a band point.
struct MartinModel {
    GapSet gapset;
    std::vector<double> critical_points;
    double bE = 0.0;
    double normalization = 0.0; // M(iy)/y - 1 at y = 1e6
    double gap_residual = 0.0;  // max_j |int_gap q/|R|| / int_gap |q|/|R|
};

MartinModel martin_build(const GapSet& gapset);
double martin_eval(const MartinModel& model, cplx z);
// M(z) - |Im z| without cancellation.
double martin_excess(const MartinModel& model, cplx z);
std::vector<double> martin_table(const MartinModel& model, const std::vector<cplx>& zs, Exec exec = Exec::parallel);

// Im sqrt((z - alpha)(z - beta)) with the branch ~ z at infinity; the
// one-gap closed form.
double one_gap_martin(double alpha, double beta, cplx z);

// Richardson limit of 2y (M(iy) - y) over y in {1e2, 1e3, 1e4}.
double extract_b(const MartinModel& model);

// Martin measure (1/pi) dM/dy(t + i0) binned on [lo, hi]; the normal
// derivative comes from a Richardson-corrected finite difference.
double martin_density(const MartinModel& model, double t);
MeasureHistogram martin_measure(const MartinModel& model, double lo, double hi, int bins);

struct ZeroCountOptions {
    int max_refine = 12;
    bool locate = false; // also bisect each crossing to zero_tolerance
    double zero_tolerance = 1e-8;
    PropagationOptions prufer{0.01, 0.05, 0.2, 0.0};
    Exec exec = Exec::parallel;
};

struct ZeroCounting {
    MeasureHistogram histogram; // masses = counts / x
    std::vector<long> counts;
    std::vector<double> zeros;  // filled when locate is set
    std::size_t samples = 0;
};

// Zeros of u1 - u2 at x for z in the open window (lo, hi): crossings of the
// Prufer phase through 2 pi Z on a z-grid with |dtheta| < pi between
// neighbours. Bin edges are grid points, so counts per bin need no root
// location.
ZeroCounting zero_counting_detail(const OperatorData& phi, double x, double lo, double hi, int bins,
                                  const ZeroCountOptions& opts = {});
MeasureHistogram zero_counting(const OperatorData& phi, double x, double lo, double hi, int bins,
                               const ZeroCountOptions& opts = {});

} // namespace dirac
