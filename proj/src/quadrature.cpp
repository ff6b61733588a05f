#include "dirac/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include <map>
#include <mutex>
#include <stdexcept>

namespace dirac::quad {

namespace {

template <int N>
Rule legendre_from_boost()
{
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    Rule rule;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] == 0.0) {
            rule.nodes.push_back(0.0);
            rule.weights.push_back(w[k]);
            continue;
        }
        rule.nodes.push_back(-x[k]);
        rule.weights.push_back(w[k]);
        rule.nodes.push_back(x[k]);
        rule.weights.push_back(w[k]);
    }
    return rule;
}

// Golub-Welsch on the Laguerre Jacobi matrix.
Rule laguerre_golub_welsch(int n)
{
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        jacobi(k, k) = 2.0 * k + 1.0;
        if (k + 1 < n) {
            jacobi(k, k + 1) = k + 1.0;
            jacobi(k + 1, k) = k + 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Rule rule;
    for (int k = 0; k < n; ++k) {
        rule.nodes.push_back(solver.eigenvalues()(k));
        const double v0 = solver.eigenvectors()(0, k);
        rule.weights.push_back(v0 * v0);
    }
    return rule;
}

} // namespace

const Rule& gauss_legendre(int n)
{
    static const Rule r2 = legendre_from_boost<2>();
    static const Rule r3 = legendre_from_boost<3>();
    static const Rule r4 = legendre_from_boost<4>();
    static const Rule r8 = legendre_from_boost<8>();
    static const Rule r16 = legendre_from_boost<16>();
    static const Rule r32 = legendre_from_boost<32>();
    switch (n) {
    case 2: return r2;
    case 3: return r3;
    case 4: return r4;
    case 8: return r8;
    case 16: return r16;
    case 32: return r32;
    default: throw std::invalid_argument("unsupported Gauss-Legendre order");
    }
}

const Rule& gauss_laguerre(int n)
{
    static const Rule r8 = laguerre_golub_welsch(8);
    static const Rule r16 = laguerre_golub_welsch(16);
    static const Rule r24 = laguerre_golub_welsch(24);
    static const Rule r32 = laguerre_golub_welsch(32);
    static const Rule r48 = laguerre_golub_welsch(48);
    switch (n) {
    case 8: return r8;
    case 16: return r16;
    case 24: return r24;
    case 32: return r32;
    case 48: return r48;
    default: throw std::invalid_argument("unsupported Gauss-Laguerre order");
    }
}

} // namespace dirac::quad
