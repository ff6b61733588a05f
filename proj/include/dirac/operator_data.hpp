#pragma once

#include "dirac/chirp.hpp"
#include "dirac/common.hpp"
#include "dirac/parallel.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dirac {

enum class Family { zero, constant, chirp, gated_chirp, periodic_samples, grid_samples };

// The off-diagonal datum phi of the Dirac operator. Every family vanishes on
// the negative half-line. Sampled families are piecewise constant on cells
// [k step, (k+1) step); grid samples vanish past their last cell, periodic
// samples repeat.
class OperatorData {
public:
    static OperatorData zero();
    static OperatorData constant(cplx c);
    static OperatorData chirp(double alpha);
    static OperatorData gated_chirp(double alpha, double q);
    static OperatorData periodic_samples(double period, std::vector<cplx> values);
    static OperatorData grid_samples(double step, std::vector<cplx> values);
    // Whitespace separated lines "t re [im]" with t = 0, h, 2h, ...
    static OperatorData from_file(const std::string& path);

    Family family() const { return family_; }
    cplx constant_value() const { return c_; }
    double alpha() const { return alpha_; }
    double q() const { return q_; }
    double step() const { return step_; }
    double period() const { return step_ * static_cast<double>(values_.size()); }
    const std::vector<cplx>& values() const { return values_; }
    bool piecewise_constant() const;
    std::string describe() const;

    cplx operator()(double t) const;

    cplx integral(double a, double b) const;
    double integral_sq(double a, double b) const;
    double integral_abs(double a, double b) const;

    // Jump locations of phi inside (a, b), sorted.
    std::vector<double> breakpoints(double a, double b) const;
    // Local angular frequency of phi near t; zero for piecewise constant data.
    double local_rate(double t) const;

    // Gated set intervals [q^{2k}, q^{2k+1}) meeting [a, b); for the plain
    // chirp the single interval [0, inf).
    std::vector<std::pair<double, double>> gates(double a, double b) const;

    const chirp::PowerTail& tail() const { return *tail_; }

private:
    OperatorData() = default;
    cplx grid_primitive(double t) const;
    double grid_primitive_sq(double t) const;
    double grid_primitive_abs(double t) const;
    cplx chirp_integral(double a, double b) const;
    double chirp_integral_sq(double a, double b) const;
    double chirp_integral_abs(double a, double b) const;

    Family family_ = Family::zero;
    cplx c_ = 0.0;
    double alpha_ = 0.0;
    double q_ = 0.0;
    double step_ = 0.0;
    std::vector<cplx> values_;
    std::vector<cplx> prefix_;
    std::vector<double> prefix_sq_;
    std::vector<double> prefix_abs_;
    std::shared_ptr<const chirp::PowerTail> tail_;
};

// sup over window starts x in [0, horizon] of (int_x^{x+1} |phi|^p)^{1/p}.
// Starts are a fixed 1/16 lattice plus data breakpoints, so the result is
// nondecreasing in horizon.
double triple_norm(const OperatorData& phi, int p, double horizon);

// (1/x) int_0^x |phi|^2
double cesaro_l2(const OperatorData& phi, double x);

// (1/eps) int_t^{t+eps} phi
cplx local_average(const OperatorData& phi, double t, double eps);

// (1/x) int_0^x |local_average(phi, t, eps)|^2 dt
double avg_l2_profile(const OperatorData& phi, double x, double eps);

// Averages of phi over the n cells [a + k h, a + (k+1) h).
std::vector<cplx> cell_averages(const OperatorData& phi, double a, double h, std::size_t n,
                                Exec exec = Exec::serial);

// t -> conj(phi(x0 - t)) on [0, x0] as grid samples (zero stays zero).
OperatorData reflect_translate(const OperatorData& phi, double x0);

} // namespace dirac
