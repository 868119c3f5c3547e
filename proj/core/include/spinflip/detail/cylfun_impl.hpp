// Engine behind the cylinder functions. Strategy:
//
//   |z| <= 15   J_n by the ascending series; H seeded from the order-0/1
//               J and Y series and carried up by the forward recurrence,
//               which is stable because H is the dominant solution in
//               increasing order. The series run in double-double where
//               the alternating sums or the J + iY assembly would cost
//               more digits than a double can spare.
//   |z| >  15   H_0, H_1 from the Hankel asymptotic expansion truncated at
//               its smallest term; forward recurrence upward; J at the top
//               order from the continued-fraction ratio J_{m+1}/J_m
//               (modified Lentz) normalized through the cross-order
//               Wronskian with H, then two stable downward steps.
//
// Every recurrence step renormalizes the base-2 exponent, so no admissible
// input can overflow or underflow the mantissa.
//
// Arguments in the lower half-plane are folded to the upper half-plane via
// J_n(conj z) = conj J_n(z) and H1_n(z) = conj(2 J_n(conj z) - H1_n(conj z));
// the subtraction is benign because H1 is recessive where it matters.

#pragma once

#include <cmath>
#include <stdexcept>

#include "spinflip/cx.hpp"
#include "spinflip/scaled.hpp"

namespace spinflip::cylfun_detail {

inline constexpr double kSeriesRadius = 15.0;
inline constexpr int kMaxOrder = 1 << 20;

template <class R>
struct CylPair {
    SComplex<R> j, jp, h, hp;
};

// ---------------------------------------------------------------- series --

// The alternating J series loses ~0.43 (|z| - |Im z|) digits; the J + iY
// assembly of H loses another ~0.87 Im z. Work in plain doubles when the
// budget allows, double-double otherwise.
inline bool series_j_needs_dd(double az, double aiz) { return az - aiz > 5.0; }
inline bool series_h_needs_dd(double az, double aiz) {
    return az - aiz > 5.0 || aiz > 2.5;
}

template <class P>
inline P p_const(double hi, double lo) {
    if constexpr (std::is_same_v<P, DD>) return DD(hi, lo);
    else return hi;
}

// J_n by the ascending series; requires |z| <= ~16.
template <class P>
inline SComplex<P> series_j(int n, Cx<P> z) {
    P half(0.5);
    Cx<P> zh{half * z.re, half * z.im};
    SComplex<P> pref(P(1.0), P(0.0), 0);   // (z/2)^n / n!
    for (int k = 1; k <= n; ++k)
        pref = scaled_mul(pref, zh.re / P(double(k)), zh.im / P(double(k)));
    Cx<P> mz2{-(zh.re * zh.re - zh.im * zh.im), -(P(2.0) * zh.re * zh.im)};
    Cx<P> term{P(1.0), P(0.0)}, sum = term;
    const double cut = std::is_same_v<P, DD> ? 1e-36 : 5e-18;
    for (int k = 1; k < 400; ++k) {
        term = term * mz2;
        P d(double(k) * double(n + k));
        term = {term.re / d, term.im / d};
        sum = sum + term;
        if (abs_hi(term) < cut * (abs_hi(sum) + 1e-300)) break;
    }
    return scaled_mul(pref, sum.re, sum.im);
}

template <class P>
inline P p_log(P x) {
    if constexpr (std::is_same_v<P, DD>) return log(x);
    else return std::log(x);
}

template <class P>
inline P p_atan2(P y, P x) {
    if constexpr (std::is_same_v<P, DD>) return atan2(y, x);
    else return std::atan2(y, x);
}

// J0, J1, Y0, Y1 series seeds (|z| <= ~16, z off the negative real axis).
template <class P>
inline void series_seeds(Cx<P> z, SComplex<P>& h0, SComplex<P>& h1) {
    const P euler = p_const<P>(0.5772156649015329, -4.942915152430645e-18);
    const P two_over_pi = p_const<P>(0.6366197723675814, -3.935735335036497e-17);
    P half(0.5);

    SComplex<P> j0s = series_j(0, z);
    SComplex<P> j1s = series_j(1, z);
    Cx<P> j0{scaled_detail::ldx(j0s.re, int(j0s.e2)), scaled_detail::ldx(j0s.im, int(j0s.e2))};
    Cx<P> j1{scaled_detail::ldx(j1s.re, int(j1s.e2)), scaled_detail::ldx(j1s.im, int(j1s.e2))};

    // log(z/2) on the principal branch
    P r2 = z.re * z.re + z.im * z.im;
    Cx<P> lg{half * p_log(P(0.25) * r2) + euler, p_atan2(z.im, z.re)};

    Cx<P> zh{half * z.re, half * z.im};
    Cx<P> mz2{-(zh.re * zh.re - zh.im * zh.im), -(P(2.0) * zh.re * zh.im)};
    const double cut = std::is_same_v<P, DD> ? 1e-36 : 5e-18;

    // Y0 = (2/pi) [ (log(z/2)+gamma) J0 - sum_{k>=1} H_k (-z^2/4)^k / (k!)^2 ]
    Cx<P> u{P(1.0), P(0.0)}, s0{P(0.0), P(0.0)};
    P hk(0.0);
    for (int k = 1; k < 400; ++k) {
        P dk{double(k)};
        u = u * mz2;
        u = {u.re / (dk * dk), u.im / (dk * dk)};
        hk += P(1.0) / dk;
        Cx<P> add = hk * u;
        s0 = s0 + add;
        if (abs_hi(add) < cut * (abs_hi(s0) + 1e-300)) break;
    }
    Cx<P> y0 = two_over_pi * (lg * j0 - s0);

    // Y1 = -2/(pi z) + (2/pi)(log(z/2)+gamma) J1
    //      - (1/pi)(z/2) sum_{k>=0} (H_k + H_{k+1}) (-z^2/4)^k / (k!(k+1)!)
    Cx<P> v{P(1.0), P(0.0)}, s1{P(1.0), P(0.0)};  // k = 0 term: H_0+H_1 = 1
    P hk1(1.0);
    hk = P(0.0);
    for (int k = 1; k < 400; ++k) {
        P dk{double(k)};
        v = v * mz2;
        v = {v.re / (dk * (dk + P(1.0))), v.im / (dk * (dk + P(1.0)))};
        hk += P(1.0) / dk;
        hk1 += P(1.0) / (dk + P(1.0));
        Cx<P> add = (hk + hk1) * v;
        s1 = s1 + add;
        if (abs_hi(add) < cut * (abs_hi(s1) + 1e-300)) break;
    }
    Cx<P> y1 = two_over_pi * (lg * j1) - (two_over_pi * Cx<P>{P(1.0), P(0.0)}) / z
               - (half * two_over_pi) * (zh * s1);

    Cx<P> h0c{j0.re - y0.im, j0.im + y0.re};   // J + iY
    Cx<P> h1c{j1.re - y1.im, j1.im + y1.re};
    h0 = SComplex<P>(h0c.re, h0c.im, 0); h0.renorm();
    h1 = SComplex<P>(h1c.re, h1c.im, 0); h1.renorm();
}

// ----------------------------------------------------------- asymptotics --

// e^{i z} as a scaled complex (phase in dd, magnitude folded into the exponent)
inline SComplex<DD> exp_iz(Cx<DD> z) {
    using namespace dd_const;
    DD s, c;
    sincos(z.re, s, c);
    DD y = -z.im;                                    // |e^{iz}| = e^{-Im z}
    double k = std::nearbyint(double(y) / double(ln2));
    DD m = exp_small(y - DD(k) * ln2);
    SComplex<DD> out(m * c, m * s, std::int64_t(k));
    out.renorm();
    return out;
}

// Hankel H^(1)_nu, nu = 0 or 1, |z| >= ~12, -pi < arg z < pi.
inline SComplex<DD> asymptotic_h(int nu, Cx<DD> z) {
    using namespace dd_const;
    // term_{k+1} = term_k * (4 nu^2 - (2k+1)^2) / (8(k+1)) * (i/z)
    Cx<DD> i_over_z = Cx<DD>{DD(0.0), DD(1.0)} / z;
    Cx<DD> term{DD(1.0), DD(0.0)}, sum = term;
    double best = 1e300;
    DD fournu2(double(4 * nu * nu));
    for (int k = 0; k < 64; ++k) {
        DD num = fournu2 - DD(double(2 * k + 1)) * DD(double(2 * k + 1));
        term = (num / DD(8.0 * double(k + 1))) * (term * i_over_z);
        double t = abs_hi(term);
        if (t >= best) break;                        // optimal truncation
        best = t;
        sum = sum + term;
        if (t < 1e-36 * abs_hi(sum)) break;
    }
    // sqrt(2/(pi z)) * e^{i(z - nu pi/2 - pi/4)}
    Cx<DD> w = Cx<DD>{two_over_pi, DD(0.0)} / z;
    Cx<DD> root = cx_sqrt(w);
    DD phase_s, phase_c;
    sincos(-(DD(double(nu)) * half_pi + DD(0.5) * half_pi), phase_s, phase_c);
    Cx<DD> rot{phase_c, phase_s};
    SComplex<DD> e = exp_iz(z);
    Cx<DD> front = root * rot * sum;
    return scaled_mul(e, front.re, front.im);
}

// ------------------------------------------------------------ ladder core --

template <class R>
inline SComplex<R> narrow(const SComplex<DD>& a) {
    if constexpr (std::is_same_v<R, DD>) return a;
    else return SComplex<double>(double(a.re), double(a.im), a.e2);
}

// continued fraction J_{m+1}/J_m, modified Lentz
template <class R>
inline Cx<R> cf1_ratio(int m, Cx<R> z) {
    const double tol = std::is_same_v<R, DD> ? 1e-30 : 8e-16;
    Cx<R> tiny{R(1e-30), R(0.0)};   // must survive squaring in the divisions
    Cx<R> f = tiny, C = tiny, D{R(0.0), R(0.0)};
    Cx<R> two_over_z = Cx<R>{R(2.0), R(0.0)} / z;
    for (int j = 1; j < 200000; ++j) {
        Cx<R> b = R(double(m + j)) * two_over_z;
        R aj = (j == 1) ? R(1.0) : R(-1.0);
        D = b + Cx<R>{aj * D.re, aj * D.im};
        if (abs_hi(D) == 0.0) D = tiny;
        C = b + Cx<R>{aj, R(0.0)} / C;
        if (abs_hi(C) == 0.0) C = tiny;
        D = Cx<R>{R(1.0), R(0.0)} / D;
        Cx<R> delta = C * D;
        f = f * delta;
        double dr = double(delta.re) - 1.0, di = double(delta.im);
        if (std::abs(dr) + std::abs(di) < tol) return f;
    }
    throw std::runtime_error("cylfun: continued fraction for the Bessel ratio did not converge");
}

// J, J', H, H' at order n and argument z (upper half-plane or positive reals).
template <class R>
CylPair<R> cyl_pair_upper(int n, Cx<R> z, bool want_j) {
    const double az = abs_hi(z);
    const double aiz = std::abs(double(z.im));
    Cx<DD> zdd{DD(double(z.re)), DD(double(z.im))};
    if constexpr (std::is_same_v<R, DD>) zdd = z;

    // H seeds at order 0, 1
    SComplex<DD> h0dd, h1dd;
    bool h_double_ok = false;
    SComplex<double> h0d, h1d;
    if (az <= kSeriesRadius) {
        if constexpr (std::is_same_v<R, double>) {
            if (!series_h_needs_dd(az, aiz)) {
                series_seeds<double>(Cx<double>{double(z.re), double(z.im)}, h0d, h1d);
                h_double_ok = true;
            }
        }
        if (!h_double_ok) series_seeds<DD>(zdd, h0dd, h1dd);
    } else {
        h0dd = asymptotic_h(0, zdd);
        h1dd = asymptotic_h(1, zdd);
    }

    // forward recurrence up to n+2, recording n-1 .. n+2
    Cx<R> w2 = Cx<R>{R(2.0), R(0.0)} / z;
    SComplex<R> hkm1, hk;
    if constexpr (std::is_same_v<R, double>) {
        hkm1 = h_double_ok ? h0d : narrow<R>(h0dd);
        hk = h_double_ok ? h1d : narrow<R>(h1dd);
    } else {
        hkm1 = narrow<R>(h0dd);
        hk = narrow<R>(h1dd);
    }
    SComplex<R> hrec[4];                         // orders n-1, n, n+1, n+2
    auto record = [&](int order, const SComplex<R>& v) {
        int idx = order - (n - 1);
        if (idx >= 0 && idx < 4) hrec[idx] = v;
    };
    record(0, hkm1);
    record(1, hk);
    for (int k = 1; k <= n + 1; ++k) {
        SComplex<R> hkp1 = scaled_mul(hk, R(double(k)) * w2.re, R(double(k)) * w2.im) - hkm1;
        hkm1 = hk;
        hk = hkp1;
        record(k + 1, hk);
    }
    if (n == 0) hrec[0] = -hrec[2];              // H_{-1} = -H_1

    CylPair<R> out;
    out.h = hrec[1];
    out.hp = scaled_mul(hrec[0] - hrec[2], R(0.5), R(0.0));
    if (!want_j) return out;

    SComplex<R> jrec[3];                         // orders n-1, n, n+1
    if (az <= kSeriesRadius) {
        bool j_double_ok = false;
        if constexpr (std::is_same_v<R, double>) {
            if (!series_j_needs_dd(az, aiz)) {
                Cx<double> zd{double(z.re), double(z.im)};
                jrec[2] = series_j<double>(n + 1, zd);
                jrec[1] = series_j<double>(n, zd);
                j_double_ok = true;
            }
        }
        if (!j_double_ok) {
            jrec[2] = narrow<R>(series_j<DD>(n + 1, zdd));
            jrec[1] = narrow<R>(series_j<DD>(n, zdd));
        }
        // one stable downward step for the n-1 order
        jrec[0] = (n >= 1)
                      ? scaled_mul(jrec[1], R(double(n)) * w2.re, R(double(n)) * w2.im) - jrec[2]
                      : -jrec[2];
    } else {
        Cx<R> r = cf1_ratio(n + 1, z);           // J_{n+2}/J_{n+1}
        // cross-order Wronskian: J_{m+1} H_m - J_m H_{m+1} = 2i/(pi z), m = n+1
        SComplex<R> den = scaled_mul(hrec[2], r.re, r.im) - hrec[3];
        Cx<R> wron = Cx<R>{R(0.0), R(dd_const::two_over_pi.hi)} / z;
        if constexpr (std::is_same_v<R, DD>)
            wron = Cx<DD>{DD(0.0), dd_const::two_over_pi} / z;
        SComplex<R> wr(wron.re, wron.im, 0);
        wr.renorm();
        jrec[2] = wr / den;
        SComplex<R> jtop2 = scaled_mul(jrec[2], r.re, r.im);   // J_{n+2}
        jrec[1] = scaled_mul(jrec[2], R(double(n + 1)) * w2.re, R(double(n + 1)) * w2.im) - jtop2;
        if (n >= 1)
            jrec[0] = scaled_mul(jrec[1], R(double(n)) * w2.re, R(double(n)) * w2.im) - jrec[2];
        else
            jrec[0] = -jrec[2];
    }
    out.j = jrec[1];
    out.jp = scaled_mul(jrec[0] - jrec[2], R(0.5), R(0.0));
    return out;
}

template <class R>
inline SComplex<R> sc_conj(const SComplex<R>& a) { return {a.re, -a.im, a.e2}; }

template <class R>
CylPair<R> cyl_pair(int n, Cx<R> z, bool want_j = true) {
    if (double(z.im) < 0.0) {
        CylPair<R> up = cyl_pair_upper(n, conj(z), true);
        CylPair<R> out;
        out.j = sc_conj(up.j);
        out.jp = sc_conj(up.jp);
        SComplex<R> two_j = scaled_mul(up.j, R(2.0), R(0.0));
        SComplex<R> two_jp = scaled_mul(up.jp, R(2.0), R(0.0));
        out.h = sc_conj(two_j - up.h);
        out.hp = sc_conj(two_jp - up.hp);
        return out;
    }
    return cyl_pair_upper(n, z, want_j);
}

} // namespace spinflip::cylfun_detail
