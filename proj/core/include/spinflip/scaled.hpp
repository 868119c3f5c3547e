// Scaled complex arithmetic: a complex mantissa together with a base-2
// exponent, so that products of exponentially large and small factors
// (high-order Hankel values against high-order Bessel values) never leave
// the representable range. Radix 2 keeps renormalization exact.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

#include "spinflip/dd.hpp"

namespace spinflip {

namespace scaled_detail {

inline double to_double(double x) { return x; }
inline double to_double(const DD& x) { return double(x); }

inline double mag1(double re, double im) { return std::abs(re) + std::abs(im); }
inline double mag1(const DD& re, const DD& im) { return std::abs(re.hi) + std::abs(im.hi); }

template <class R> inline R ldx(const R& x, int e) {
    if constexpr (std::is_same_v<R, double>) return std::ldexp(x, e);
    else return ldexp(x, e);
}

} // namespace scaled_detail

template <class R>
struct SComplex {
    R re{};
    R im{};
    std::int64_t e2 = 0;   // value = (re + i im) * 2^e2

    SComplex() = default;
    SComplex(R r, R i, std::int64_t e = 0) : re(r), im(i), e2(e) {}

    static SComplex zero() { return {}; }

    bool is_zero() const {
        return scaled_detail::to_double(re) == 0.0 && scaled_detail::to_double(im) == 0.0;
    }

    // Keep |mantissa|_inf within [2^-512, 2^512]; exact power-of-two shifts.
    void renorm() {
        double m = scaled_detail::mag1(re, im);
        if (m == 0.0) { e2 = 0; return; }
        if (m < 0x1p-512 || m > 0x1p512) {
            int k = 0;
            std::frexp(m, &k);
            re = scaled_detail::ldx(re, -k);
            im = scaled_detail::ldx(im, -k);
            e2 += k;
        }
    }

    // Normalize so that the mantissa magnitude lies in [1, 2).
    void normalize_unit() {
        double m = std::hypot(scaled_detail::to_double(re), scaled_detail::to_double(im));
        if (m == 0.0) { e2 = 0; return; }
        int k = 0;
        std::frexp(m, &k);
        --k;                               // frexp gives [0.5,1); shift to [1,2)
        re = scaled_detail::ldx(re, -k);
        im = scaled_detail::ldx(im, -k);
        e2 += k;
    }

    std::complex<double> to_complex() const {
        double r = scaled_detail::to_double(re);
        double i = scaled_detail::to_double(im);
        if (e2 == 0) return {r, i};
        if (e2 > 1'000'000) return {r * std::numeric_limits<double>::infinity(),
                                    i * std::numeric_limits<double>::infinity()};
        if (e2 < -1'100'000) return {0.0, 0.0};
        double s = std::exp2(double(e2));  // saturates to inf/0 beyond double range
        return {r * s, i * s};
    }
};

template <class R>
inline SComplex<R> operator+(const SComplex<R>& a, const SComplex<R>& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const SComplex<R>* big = &a;
    const SComplex<R>* sml = &b;
    if (b.e2 > a.e2) { big = &b; sml = &a; }
    std::int64_t d = sml->e2 - big->e2;    // <= 0
    SComplex<R> out = *big;
    if (d > -2090) {                       // otherwise the small term vanishes
        out.re = out.re + scaled_detail::ldx(sml->re, int(d));
        out.im = out.im + scaled_detail::ldx(sml->im, int(d));
    }
    out.renorm();
    return out;
}

template <class R>
inline SComplex<R> operator-(const SComplex<R>& a) {
    return {-a.re, -a.im, a.e2};
}

template <class R>
inline SComplex<R> operator-(const SComplex<R>& a, const SComplex<R>& b) {
    return a + (-b);
}

template <class R>
inline SComplex<R> operator*(const SComplex<R>& a, const SComplex<R>& b) {
    SComplex<R> out(a.re * b.re - a.im * b.im,
                    a.re * b.im + a.im * b.re,
                    a.e2 + b.e2);
    out.renorm();
    return out;
}

template <class R>
inline SComplex<R> operator/(const SComplex<R>& a, const SComplex<R>& b) {
    // mantissas are kept near unit magnitude, so the naive formula is safe
    R den = b.re * b.re + b.im * b.im;
    SComplex<R> out((a.re * b.re + a.im * b.im) / den,
                    (a.im * b.re - a.re * b.im) / den,
                    a.e2 - b.e2);
    out.renorm();
    return out;
}

template <class R>
inline SComplex<R> scaled_from(std::complex<double> z) {
    SComplex<R> out(R(z.real()), R(z.imag()), 0);
    out.renorm();
    return out;
}

template <class R>
inline SComplex<R> sc_real(double x) {
    SComplex<R> out(R(x), R(0.0), 0);
    out.renorm();
    return out;
}

// |a| as a plain double together with its exponent, for magnitude tests.
template <class R>
inline double abs_log2(const SComplex<R>& a) {
    double m = std::hypot(scaled_detail::to_double(a.re), scaled_detail::to_double(a.im));
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(m) + double(a.e2);
}

template <class R>
inline SComplex<R> scaled_mul(const SComplex<R>& a, const R& bre, const R& bim) {
    SComplex<R> out(a.re * bre - a.im * bim, a.re * bim + a.im * bre, a.e2);
    out.renorm();
    return out;
}

} // namespace spinflip
