#pragma once

#include "dirac/common.hpp"

// Oscillatory integrals of e^{i s^alpha} for the power-chirp families.
//
// The tail E(w) = int_w^inf e^{i s^alpha} ds is evaluated along its steepest
// descent path s^alpha = w^alpha + i p, which turns it into a Laplace
// integral handled by Gauss-Laguerre. Writing E(w) = e^{i w^alpha} G(w),
// the envelope G is smooth and decays like w^{1-alpha}.
namespace dirac::chirp {

class PowerTail {
public:
    explicit PowerTail(double alpha);

    double alpha() const { return alpha_; }
    // Below this point the Laplace form is not used for real arguments.
    double zone_start() const { return zone_start_; }

    cplx envelope(cplx w) const;
    cplx tail(double w) const;
    cplx tail(cplx w) const;

    // int_a^b e^{i s^alpha} ds for 0 <= a <= b
    cplx integral(double a, double b) const;
    // int_a^b e^{i kappa s^alpha} ds, kappa > 0
    cplx integral_scaled(double kappa, double a, double b) const;

    // H(c) = int_c^inf E(s) ds, c in the zone
    cplx tail_primitive(double c) const;
    // int_a^b E(t + u) dt
    cplx tail_integral(double a, double b, double u) const;
    // int_a^b E(t + u) E(t + v) dt, a + min(u,v) in the zone
    cplx tail_product(double a, double b, double u, double v) const;
    // int_a^b E(t + u) conj(E(t + v)) dt, a + min(u,v) in the zone
    cplx tail_cross(double a, double b, double u, double v) const;

private:
    cplx brute(double a, double b, double kappa) const;
    cplx ray_product(double c, double u, double v) const;
    cplx ray_cross(double c, double u, double v) const;
    double drift(double t, double u, double v) const;

    double alpha_;
    double zone_start_;
};

} // namespace dirac::chirp
