#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace dirac {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Failure classes. The CLI maps DomainError/ConfigError to exit code 2 and
// the numerical ones (resolution, instability, model) to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidDataError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ResolutionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InstabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ModelError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// log(1 + z) and exp(z) - 1 without cancellation for small complex z
inline cplx log1p(cplx z)
{
    const double x = z.real();
    const double y = z.imag();
    return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
}

inline cplx expm1(cplx z)
{
    return 2.0 * std::sinh(0.5 * z) * std::exp(0.5 * z);
}

inline void require_domain(bool ok, const std::string& what)
{
    if (!ok) throw DomainError(what);
}

} // namespace dirac
