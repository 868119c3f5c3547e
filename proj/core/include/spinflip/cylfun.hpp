// Complex-argument cylinder functions of integer order in an overflow-safe
// scaled representation: Bessel J and Hankel H^(1) with derivatives.
//
// Supported arguments: any finite complex z off the negative real axis
// (upper half-plane, positive reals, and the lower half-plane with
// Re z > 0). Relative accuracy is ~1e-12 or better for |z| <= 1e4 and
// orders up to a few thousand.

#pragma once

#include <complex>
#include <cstdint>

namespace spinflip::cylfun {

/// One cylinder-function value in scaled form:
///   true value      = value * 2^scale_exponent
///   true derivative = derivative * 2^scale_exponent
/// The mantissa is normalized so that 1/2 <= |value| < 2 whenever the true
/// value is nonzero; the derivative shares the exponent.
struct CylValue {
    std::complex<double> value{};
    std::complex<double> derivative{};
    std::int64_t scale_exponent = 0;

    /// Unscaled value; saturates to inf/0 outside the double range.
    std::complex<double> true_value() const;
    std::complex<double> true_derivative() const;
};

/// Bessel function of the first kind J_n(z) with derivative J'_n(z).
/// Throws std::invalid_argument for non-finite z and std::domain_error for
/// an unsupported order.
CylValue cyl_j(int n, std::complex<double> z);

/// Hankel function of the first kind H^(1)_n(z) with derivative.
/// Throws std::domain_error for z = 0 (singular) and for unsupported
/// orders, std::invalid_argument for non-finite z.
CylValue cyl_h1(int n, std::complex<double> z);

/// | J_n H'_n - J'_n H_n - 2i/(pi z) | / |2i/(pi z)|, evaluated with the
/// scale exponents combined exactly.
double wronskian_residual(int n, std::complex<double> z);

} // namespace spinflip::cylfun
