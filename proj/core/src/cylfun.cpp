#include "spinflip/cylfun.hpp"

#include <cmath>
#include <stdexcept>

#include "spinflip/detail/cylfun_impl.hpp"

namespace spinflip::cylfun {

namespace {

using cylfun_detail::CylPair;
using cylfun_detail::kMaxOrder;

void check_inputs(int n, std::complex<double> z) {
    if (n < 0 || n > kMaxOrder)
        throw std::domain_error("cylfun: unsupported order n=" + std::to_string(n));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("cylfun: non-finite argument");
}

// pack (value, derivative) into the shared-exponent public form
CylValue pack(const SComplex<double>& v, const SComplex<double>& d) {
    SComplex<double> vn = v;
    SComplex<double> dn = d;
    CylValue out;
    if (!vn.is_zero()) {
        vn.normalize_unit();
        out.scale_exponent = vn.e2;
    } else if (!dn.is_zero()) {
        dn.normalize_unit();
        out.scale_exponent = dn.e2;
    }
    auto align = [&](const SComplex<double>& s) -> std::complex<double> {
        if (s.is_zero()) return {0.0, 0.0};
        double f = std::exp2(double(s.e2 - out.scale_exponent));
        return {s.re * f, s.im * f};
    };
    out.value = align(vn);
    out.derivative = align(dn);
    return out;
}

} // namespace

std::complex<double> CylValue::true_value() const {
    SComplex<double> s(value.real(), value.imag(), scale_exponent);
    return s.to_complex();
}

std::complex<double> CylValue::true_derivative() const {
    SComplex<double> s(derivative.real(), derivative.imag(), scale_exponent);
    return s.to_complex();
}

CylValue cyl_j(int n, std::complex<double> z) {
    check_inputs(n, z);
    if (z == std::complex<double>(0.0, 0.0)) {
        // J_n(0) = delta_{n0}; J'_0(0) = 0, J'_1(0) = 1/2, higher orders 0
        CylValue out;
        out.value = (n == 0) ? 1.0 : 0.0;
        out.derivative = (n == 1) ? 0.5 : 0.0;
        return out;
    }
    CylPair<double> p = cylfun_detail::cyl_pair<double>(n, cx_of(z));
    return pack(p.j, p.jp);
}

CylValue cyl_h1(int n, std::complex<double> z) {
    check_inputs(n, z);
    if (z == std::complex<double>(0.0, 0.0))
        throw std::domain_error("cylfun: H^(1) is singular at z = 0");
    CylPair<double> p = cylfun_detail::cyl_pair<double>(n, cx_of(z));
    return pack(p.h, p.hp);
}

double wronskian_residual(int n, std::complex<double> z) {
    check_inputs(n, z);
    if (z == std::complex<double>(0.0, 0.0))
        throw std::domain_error("cylfun: H^(1) is singular at z = 0");
    CylPair<double> p = cylfun_detail::cyl_pair<double>(n, cx_of(z));
    SComplex<double> w = p.j * p.hp - p.jp * p.h;
    Cx<double> rc = Cx<double>{0.0, dd_const::two_over_pi.hi} / cx_of(z);
    SComplex<double> ref(rc.re, rc.im, 0);
    ref.renorm();
    return std::abs(((w - ref) / ref).to_complex());
}

} // namespace spinflip::cylfun
