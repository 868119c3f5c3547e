// Minimal complex-over-R template. std::complex is only specified for the
// builtin floating types, so the double-double paths need their own.

#pragma once

#include <cmath>
#include <complex>

#include "spinflip/dd.hpp"

namespace spinflip {

template <class R>
struct Cx {
    R re{};
    R im{};

    Cx() = default;
    Cx(R r) : re(r) {}
    Cx(R r, R i) : re(r), im(i) {}
};

template <class R> inline Cx<R> operator+(Cx<R> a, Cx<R> b) { return {a.re + b.re, a.im + b.im}; }
template <class R> inline Cx<R> operator-(Cx<R> a, Cx<R> b) { return {a.re - b.re, a.im - b.im}; }
template <class R> inline Cx<R> operator-(Cx<R> a) { return {-a.re, -a.im}; }
template <class R> inline Cx<R> operator*(Cx<R> a, Cx<R> b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class R> inline Cx<R> operator*(R s, Cx<R> a) { return {s * a.re, s * a.im}; }
template <class R> inline Cx<R> operator/(Cx<R> a, Cx<R> b) {
    R den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}
template <class R> inline Cx<R> conj(Cx<R> a) { return {a.re, -a.im}; }

inline Cx<double> cx_of(std::complex<double> z) { return {z.real(), z.imag()}; }
inline std::complex<double> to_std(Cx<double> z) { return {z.re, z.im}; }
inline std::complex<double> to_std(Cx<DD> z) { return {double(z.re), double(z.im)}; }

template <class R> inline Cx<R> widen(std::complex<double> z) { return {R(z.real()), R(z.imag())}; }

inline double abs_hi(Cx<double> z) { return std::hypot(z.re, z.im); }
inline double abs_hi(Cx<DD> z) { return std::hypot(z.re.hi, z.im.hi); }

template <class R>
inline R real_sqrt(R x) {
    if constexpr (std::is_same_v<R, double>) return std::sqrt(x);
    else return sqrt(x);
}

template <class R>
inline Cx<R> cx_sqrt(Cx<R> z) {
    // principal branch
    R r = real_sqrt(z.re * z.re + z.im * z.im);
    R half(0.5);
    if (!(double(z.re) < 0.0)) {
        R t = real_sqrt(half * (r + z.re));
        if (double(t) == 0.0) return {R(0.0), R(0.0)};
        return {t, half * z.im / t};
    }
    R t = real_sqrt(half * (r - z.re));
    R im_mag = half * z.im / t;         // carries the sign of z.im
    if (double(z.im) < 0.0) return {-im_mag, -t};
    return {im_mag, t};
}

} // namespace spinflip
