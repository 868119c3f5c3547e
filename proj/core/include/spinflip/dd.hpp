// Double-double arithmetic: ~32 significant decimal digits built from pairs
// of IEEE doubles. Used internally where a single double loses too many
// digits to cancellation (small-argument Bessel series, the Hankel
// assembly J + iY, and the extended-precision fallback of the reflection
// blocks). Only the operations the library actually needs are provided.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace spinflip {

struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

namespace dd_detail {

// Error-free transforms. two_prod relies on FMA.
inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace dd_detail

inline DD operator+(DD a, DD b) {
    using namespace dd_detail;
    DD s = two_sum(a.hi, b.hi);
    double lo = s.lo + a.lo + b.lo;
    return quick_two_sum(s.hi, lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
    using namespace dd_detail;
    DD p = two_prod(a.hi, b.hi);
    double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, lo);
}

inline DD operator/(DD a, DD b) {
    using namespace dd_detail;
    double q1 = a.hi / b.hi;
    DD r = a - b * DD(q1);
    double q2 = r.hi / b.hi;
    r = r - b * DD(q2);
    double q3 = r.hi / b.hi;
    DD q = quick_two_sum(q1, q2);
    return q + DD(q3);
}

inline DD& operator+=(DD& a, DD b) { a = a + b; return a; }
inline DD& operator-=(DD& a, DD b) { a = a - b; return a; }
inline DD& operator*=(DD& a, DD b) { a = a * b; return a; }
inline DD& operator/=(DD& a, DD b) { a = a / b; return a; }

inline bool operator<(DD a, DD b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(DD a, DD b) { return b < a; }
inline bool operator==(DD a, DD b) { return a.hi == b.hi && a.lo == b.lo; }

inline DD fabs(DD a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

inline DD ldexp(DD a, int e) { return {std::ldexp(a.hi, e), std::ldexp(a.lo, e)}; }

// frexp on the hi part is enough for range bookkeeping.
inline DD frexp(DD a, int* e) {
    std::frexp(a.hi, e);
    return ldexp(a, -*e);
}

inline DD sqrt(DD a) {
    if (a.hi == 0.0) return DD(0.0);
    double s0 = std::sqrt(a.hi);
    // one dd Newton correction on top of the double estimate
    DD s(s0);
    DD r = (a - s * s) / (DD(2.0) * s);
    return s + r;
}

namespace dd_const {
inline constexpr DD pi{3.141592653589793, 1.2246467991473532e-16};
inline constexpr DD two_pi{6.283185307179586, 2.4492935982947064e-16};
inline constexpr DD half_pi{1.5707963267948966, 6.123233995736766e-17};
inline constexpr DD ln2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr DD euler_gamma{0.5772156649015329, -4.942915152430645e-18};
inline constexpr DD two_over_pi{0.6366197723675814, -3.935735335036497e-17};
} // namespace dd_const

// exp on a reduced argument; callers keep |x| modest (the scaled
// representation absorbs the dynamic range before we get here).
inline DD exp_small(DD x) {
    // |x| <= ~0.7 after the callers' ln2 reduction
    DD sum(1.0), term(1.0);
    for (int k = 1; k < 26; ++k) {
        term = term * x / DD(double(k));
        sum += term;
        if (std::abs(term.hi) < 1e-35 * std::abs(sum.hi)) break;
    }
    return sum;
}

inline DD log(DD x) {
    int e = 0;
    DD m = frexp(x, &e);            // m in [0.5, 1)
    if (m < DD(0.70710678118654752)) { m = ldexp(m, 1); --e; }
    // ln m = 2 atanh((m-1)/(m+1)), |t| <= ~0.172
    DD t = (m - DD(1.0)) / (m + DD(1.0));
    DD t2 = t * t, term = t, sum = t;
    for (int k = 1; k < 40; ++k) {
        term = term * t2;
        DD add = term / DD(double(2 * k + 1));
        sum += add;
        if (std::abs(add.hi) < 1e-35 * std::abs(sum.hi)) break;
    }
    return DD(2.0) * sum + DD(double(e)) * dd_const::ln2;
}

inline DD atan(DD x) {
    bool neg = x.hi < 0.0;
    if (neg) x = -x;
    // halve the angle until the Taylor series converges quickly
    int halvings = 0;
    while (x > DD(0.25) && halvings < 8) {
        x = x / (DD(1.0) + sqrt(DD(1.0) + x * x));
        ++halvings;
    }
    DD x2 = x * x, term = x, sum = x;
    for (int k = 1; k < 40; ++k) {
        term = term * x2;
        DD add = term / DD(double(2 * k + 1));
        sum = (k & 1) ? sum - add : sum + add;
        if (std::abs(add.hi) < 1e-35 * std::abs(sum.hi)) break;
    }
    sum = ldexp(sum, halvings);
    return neg ? -sum : sum;
}

inline DD atan2(DD y, DD x) {
    if (x.hi > 0.0) return atan(y / x);
    if (x.hi == 0.0 && x.lo == 0.0)
        return y.hi >= 0.0 ? dd_const::half_pi : -dd_const::half_pi;
    // x < 0
    DD a = atan(y / x);
    return (y.hi >= 0.0) ? a + dd_const::pi : a - dd_const::pi;
}

// sin/cos via range reduction mod 2*pi and a plain Taylor sum on [-pi, pi].
inline void sincos(DD x, DD& s, DD& c) {
    double k = std::nearbyint((double)x / (double)dd_const::two_pi);
    DD r = x - DD(k) * dd_const::two_pi;
    DD r2 = r * r;
    DD term = r, ss = r;
    for (int n = 1; n < 32; ++n) {
        term = term * r2 / DD(double(2 * n) * double(2 * n + 1));
        ss = (n & 1) ? ss - term : ss + term;
        if (std::abs(term.hi) < 1e-36) break;
    }
    DD tc(1.0), cc(1.0);
    for (int n = 1; n < 32; ++n) {
        tc = tc * r2 / DD(double(2 * n) * double(2 * n - 1));
        cc = (n & 1) ? cc - tc : cc + tc;
        if (std::abs(tc.hi) < 1e-36) break;
    }
    s = ss;
    c = cc;
}

} // namespace spinflip
