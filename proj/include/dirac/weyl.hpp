#pragma once

#include "dirac/common.hpp"
#include "dirac/operator_data.hpp"
#include "dirac/parallel.hpp"
#include "dirac/propagation.hpp"

#include <vector>

namespace dirac {

struct Disk {
    cplx center = 0.0;
    double radius = 1.0;
    double log_radius = 0.0; // stays finite after radius underflows
};

// The disk {w : (w, 1)^* T^* j T (w, 1) >= 0} of a propagator T.
Disk disk_from(const TransferMatrix& T);
Disk weyl_disk(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts = {});
// Disks at increasing checkpoints from one propagation.
std::vector<Disk> weyl_disks(const OperatorData& phi, const std::vector<double>& xs, cplx z,
                             const PropagationOptions& opts = {});
// Disk of the reflected problem on [0, x], i.e. D^- at -x.
Disk reflected_disk(const OperatorData& phi, double x, cplx z, const PropagationOptions& opts = {});

// Strict containment: |c_in - c_out| + r_in < r_out + slack.
bool nested_in(const Disk& inner, const Disk& outer, double slack = 0.0);

struct SchurOptions {
    double target_radius = 1e-8;
    double horizon = 400.0;
    double chunk = 0.5;
};

struct SchurResult {
    cplx z = 0.0;
    cplx s = 0.0;
    double radius = 1.0; // error bar on s
    double x_used = 0.0;
    bool converged = false;
};

SchurResult schur_function(const OperatorData& phi, cplx z, const SchurOptions& sopts = {},
                           const PropagationOptions& opts = {});
std::vector<SchurResult> schur_table(const OperatorData& phi, const std::vector<cplx>& zs, Exec exec = Exec::parallel,
                                     const SchurOptions& sopts = {}, const PropagationOptions& opts = {});

// Weyl solution normalized by psi_2(0) = 1, sampled at checkpoints. The
// Schur function s(x) = psi_1/psi_2 is integrated backwards from a far point
// where the flow has contracted the unit disk below far_tolerance; log psi_2
// then follows from (log psi_2)' = iz - i conj(phi) s.
struct WeylProfile {
    std::vector<double> x;
    std::vector<cplx> s;
    std::vector<cplx> log_psi2; // imaginary part is the unwrapped phase
    cplx s0 = 0.0;              // s(0), the Schur function
    double far_point = 0.0;
    double far_radius = 0.0; // radius of the contracted image of the unit disk

    ScaledSolution solution(std::size_t k, cplx z) const;
};

struct WeylOptions {
    double far_tolerance = 1e-12;
    double max_extension = 400.0;
};

WeylProfile weyl_profile(const OperatorData& phi, const std::vector<double>& xs, cplx z, const WeylOptions& wopts = {},
                         const PropagationOptions& opts = {});
ScaledSolution weyl_solution(const OperatorData& phi, double x, cplx z, const WeylOptions& wopts = {},
                             const PropagationOptions& opts = {});

// Circle through three distinct points: (center, radius).
Disk circumcircle(cplx a, cplx b, cplx c);

} // namespace dirac
