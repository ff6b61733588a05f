#pragma once

#include "dirac/common.hpp"
#include "dirac/operator_data.hpp"
#include "dirac/parallel.hpp"
#include "dirac/propagation.hpp"

#include <vector>

namespace dirac {

// I_n(a, b): the integral over a <= t_1 <= ... <= t_2n <= b of
// prod_k conj(phi(t_{2k-1})) e^{2iz(t_2k - t_{2k-1})} phi(t_2k).
struct SimplexIntegral {
    int n = 0;
    double a = 0.0;
    double b = 0.0;
    cplx z = 0.0;
    cplx value = 0.0;
    double bound = 0.0; // ceil(b-a)^n |||phi|||_2^{2n} / ((2 Im z)^n n!)
};

// Evaluated as nested integrals, innermost first: with H_{n+1} = 1,
//   J_k(u) = int_u^b e^{2iz(v-u)} phi(v) H_{k+1}(v) dv,
//   H_k(s) = int_s^b conj(phi(u)) J_k(u) du,
// and I_n = H_1(a). The cumulative integrals are carried from b down to a;
// on constant stretches of phi the step is an exact matrix exponential.
SimplexIntegral simplex_I(const OperatorData& phi, int n, double a, double b, cplx z,
                          const PropagationOptions& opts = {});
// All of I_1..I_n from one sweep.
std::vector<SimplexIntegral> simplex_series(const OperatorData& phi, int n, double a, double b, cplx z,
                                            const PropagationOptions& opts = {});

double simplex_bound(const OperatorData& phi, int n, double a, double b, cplx z);

// sum_{n<=3} I_n(a, b) and a bound on the omitted terms from the
// envelope sum_{n>=4} T^n / n!, T = ceil(b-a) |||phi|||^2 / (2 Im z).
struct SeriesSum {
    cplx partial = 0.0;
    double tail_bound = 0.0;
};
SeriesSum series_sum(const OperatorData& phi, double a, double b, cplx z, const PropagationOptions& opts = {});

// I_1(a, a+2) - I_1(a+1, a+2), the expansion of log(psi2(a)/psi2(a+1)) + iz.
// Requires Im z >= 4 |||phi|||_2^2.
cplx log_ratio_expansion(const OperatorData& phi, double a, cplx z, const PropagationOptions& opts = {});
// The same quantity from the propagated Weyl solution.
cplx log_ratio_propagated(const OperatorData& phi, double a, cplx z, const PropagationOptions& opts = {});

// w_z(t) = 2iz e^{-2izt} on [-1, 0], zero elsewhere.
cplx kernel_w(cplx z, double t);
double kernel_w_l1(cplx z);

// (1/(x - x0)) (1/(2iz)) int_{x0}^x conj(phi) (w_z * phi), where
// (1/(2iz)) (w_z * phi)(t) = int_t^{t+1} e^{2iz(s-t)} phi(s) ds.
cplx two_term_functional(const OperatorData& phi, double x, cplx z);
cplx two_term_functional_between(const OperatorData& phi, double x0, double x, cplx z);

// |(1/x) log u1(x) + iz - functional(x)| with log u1 the continuously
// continued logarithm of the Dirichlet solution.
struct GrowthResidual {
    cplx z = 0.0;
    double x0 = 0.0;
    double x = 0.0;
    cplx rate = 0.0;       // (log u1(x) - log u1(x0)) / (x - x0) + iz
    cplx functional = 0.0;
    double residual = 0.0; // |rate - functional|
    double modulus_residual = 0.0; // |Re(rate - functional)|, the log|u1| part
};
GrowthResidual growth_residual(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts = {});
// Over [x0, x]: the boundary terms log(u1 psi2) at both ends are O(|z|^-2)
// instead of the O(|z|^-1) term log(1 - s(0)) carried by the full range.
GrowthResidual growth_residual_between(const OperatorData& phi, double x0, double x, cplx z,
                                       const PropagationOptions& opts = {});
std::vector<GrowthResidual> growth_residual_table(const OperatorData& phi, double x0, double x,
                                                  const std::vector<cplx>& zs, Exec exec = Exec::parallel,
                                                  const PropagationOptions& opts = {});

// Least-squares slope of log residual against log |z|.
double loglog_slope(const std::vector<double>& scale, const std::vector<double>& residual);

} // namespace dirac
