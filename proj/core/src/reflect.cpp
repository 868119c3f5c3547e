#include "spinflip/reflect.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "spinflip/cx.hpp"
#include "spinflip/detail/cylfun_impl.hpp"

namespace spinflip::reflect {

namespace {

using cylfun_detail::CylPair;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Falls back to double-double when a sum loses more than ~1e6 in relative
// magnitude; gives up (bundle treated as zero) when even dd is wiped out.
constexpr double kGuardBitsDouble = 20.0;
constexpr double kGuardBitsDD = 66.0;

// Tracks how many bits the worst-conditioned sum lost.
template <class R>
struct CancelGuard {
    double worst = 0.0;

    SComplex<R> sum(std::initializer_list<SComplex<R>> terms) {
        SComplex<R> s;
        double w = -kInf;
        for (const auto& t : terms) {
            s = s + t;
            w = std::max(w, abs_log2(t));
        }
        if (w != -kInf) {
            double r = abs_log2(s);
            worst = std::max(worst, r == -kInf ? 1e9 : w - r);
        }
        return s;
    }
};

template <class R>
void fill_composites(BlockTableT<R>& t) {
    CancelGuard<R> g;
    auto cmul = [](const SComplex<R>& s, Cx<R> c) { return scaled_mul(s, c.re, c.im); };

    Cx<R> e2 = widen<R>(t.eps2), m2 = widen<R>(t.mu2);
    Cx<R> two_e2{R(2.0) * e2.re, R(2.0) * e2.im};

    t.t21 = g.sum({t.aJ2J1_mu * t.aJ2J1_eps, t.bJ2J1 * t.bJ2J1});
    t.t32 = g.sum({t.aH3H2_eps * t.aH3H2_mu, t.bH3H2 * t.bH3H2});
    t.d21 = g.sum({t.aH2J1_mu * t.aH2J1_eps, t.bH2J1 * t.bH2J1});
    t.d32 = g.sum({t.aH3J2_mu * t.aH3J2_eps, t.bH3J2 * t.bH3J2});

    t.a11 = g.sum({t.aH3J2_mu * t.aH3H2_eps, t.bH3J2 * t.bH3H2});
    t.a22 = g.sum({t.aH3J2_eps * t.aH3H2_mu, t.bH3J2 * t.bH3H2});
    t.b11 = g.sum({t.aH2J1_mu * t.aJ2J1_eps, t.bH2J1 * t.bJ2J1});
    t.b22 = g.sum({t.aH2J1_eps * t.aJ2J1_mu, t.bH2J1 * t.bJ2J1});

    // a12/b12 use the Wronskian-reduced closed forms; the product forms
    // a^{H3'J2}_mu b^{H3H2} - a^{H3'H2}_mu b^{H3J2} (and the b analogue)
    // cancel to ~1e-12 of their terms near the branch point. The a21/b21
    // partners follow from mu2 -> -eps2.
    {
        Cx<R> ks1 = widen<R>(t.eps1 * t.mu1), ks2 = widen<R>(t.eps2 * t.mu2);
        Cx<R> ks3 = widen<R>(t.eps3 * t.mu3);
        Cx<R> eta1 = widen<R>(t.eta1), eta3 = widen<R>(t.eta3);
        double ca2 = -(2.0 / (std::numbers::pi * t.a2_scaled)) *
                     (t.q * double(t.n) / t.a2_scaled);
        double ca1 = -(2.0 / (std::numbers::pi * t.a1_scaled)) *
                     (t.q * double(t.n) / t.a1_scaled);
        Cx<R> f_a = (R(ca2) * (eta3 * eta3)) * (ks2 - ks3);
        Cx<R> f_b = (R(ca1) * (eta1 * eta1)) * (ks1 - ks2);
        SComplex<R> h3sq = t.h3 * t.h3;
        SComplex<R> j1sq = t.j1 * t.j1;
        t.a12 = cmul(h3sq, f_a * m2);
        t.a21 = cmul(h3sq, -(f_a * e2));
        t.b12 = cmul(j1sq, f_b * m2);
        t.b21 = cmul(j1sq, -(f_b * e2));
    }

    SComplex<R> asq = t.aH3J2_mu * t.aH3J2_mu;
    SComplex<R> bsq = t.bH3J2 * t.bH3J2;
    SComplex<R> ab = t.aH3J2_mu * t.bH3J2;
    SComplex<R> aeb = g.sum({t.aH3J2_mu * t.aH3J2_eps, -bsq});

    t.alpha = g.sum({-cmul(asq * t.b11, e2), cmul(bsq * t.b22, m2),
                     -cmul((t.b12 * ab), two_e2)});
    t.beta = g.sum({-cmul(asq * t.a22, e2), cmul(bsq * t.a11, m2),
                    cmul((t.a12 * ab), two_e2)});
    t.gamma = g.sum({-cmul(ab * t.b11, e2), -cmul((t.aH3J2_eps * t.bH3J2) * t.b22, m2),
                     cmul(t.b12 * aeb, e2)});
    t.delta = g.sum({-cmul(ab * t.a22, e2), -cmul((t.aH3J2_eps * t.bH3J2) * t.a11, m2),
                     -cmul(t.a12 * aeb, e2)});

    t.T11 = g.sum({t.d32 * t.alpha, -(t.t21 * t.beta)});
    t.T = g.sum({t.d32 * t.gamma, -(t.t21 * t.delta)});

    Cx<R> ratio = two_e2 / m2;   // 2 eps2 / mu2
    SComplex<R> bracket = g.sum({t.d32 * t.d21, t.t21 * t.t32, -(t.a11 * t.b11),
                                 cmul(t.a12 * t.b12, ratio), -(t.a22 * t.b22)});
    t.N = t.d32 * t.d32 * bracket;

    t.worst_cancellation_log2 = std::max(t.worst_cancellation_log2, g.worst);
}

template <class R>
std::complex<double> branch_eta(Cx<R>& eta) {
    if (double(eta.im) < 0.0) eta = -eta;
    if (double(eta.im) == 0.0 && double(eta.re) < 0.0) eta = -eta;
    return {double(eta.re), double(eta.im)};
}

template <class R>
BlockTableT<R> build_table(int n, double q,
                           std::complex<double> eps1, std::complex<double> mu1,
                           std::complex<double> eps2, std::complex<double> mu2,
                           double a1t, double a2t) {
    BlockTableT<R> t;
    t.n = n;
    t.q = q;
    t.a1_scaled = a1t;
    t.a2_scaled = a2t;
    t.eps1 = eps1; t.mu1 = mu1;
    t.eps2 = eps2; t.mu2 = mu2;
    t.eps3 = {1.0, 0.0}; t.mu3 = {1.0, 0.0};

    Cx<R> e1 = widen<R>(eps1), m1 = widen<R>(mu1);
    Cx<R> e2 = widen<R>(eps2), m2 = widen<R>(mu2);
    Cx<R> e3 = widen<R>(t.eps3), m3 = widen<R>(t.mu3);
    Cx<R> ks1 = e1 * m1, ks2 = e2 * m2, ks3 = e3 * m3;
    R q2 = R(q) * R(q);
    Cx<R> eta1 = cx_sqrt(Cx<R>{ks1.re - q2, ks1.im});
    Cx<R> eta2 = cx_sqrt(Cx<R>{ks2.re - q2, ks2.im});
    Cx<R> eta3 = cx_sqrt(Cx<R>{ks3.re - q2, ks3.im});
    t.eta1 = branch_eta(eta1);
    t.eta2 = branch_eta(eta2);
    t.eta3 = branch_eta(eta3);

    auto arg = [](Cx<R> eta, double at) { return Cx<R>{eta.re * R(at), eta.im * R(at)}; };
    CylPair<R> py1 = cylfun_detail::cyl_pair<R>(n, arg(eta1, a1t));
    CylPair<R> py2 = cylfun_detail::cyl_pair<R>(n, arg(eta2, a1t));
    CylPair<R> px2 = cylfun_detail::cyl_pair<R>(n, arg(eta2, a2t));
    CylPair<R> px3 = cylfun_detail::cyl_pair<R>(n, arg(eta3, a2t));
    t.j1 = py1.j;
    t.h3 = px3.h;
    t.j2o = px2.j;

    // a^{Z_P' W_Q}_{n c} = i etaP etaQ (cP etaQ Z'_P W_Q - cQ etaP Z_P W'_Q)
    auto ablk = [](Cx<R> cP, Cx<R> cQ, Cx<R> etaP, Cx<R> etaQ,
                   const SComplex<R>& ZpP, const SComplex<R>& ZP,
                   const SComplex<R>& WQ, const SComplex<R>& WpQ) {
        Cx<R> base = Cx<R>{R(0.0), R(1.0)} * (etaP * etaQ);
        Cx<R> c1 = base * (cP * etaQ);
        Cx<R> c2 = base * (cQ * etaP);
        return scaled_mul(ZpP * WQ, c1.re, c1.im) - scaled_mul(ZP * WpQ, c2.re, c2.im);
    };
    // b^{Z_P W_Q}_n = (q n / a) Z_P W_Q (k_Q^2 - k_P^2)
    auto bblk = [&](double at, const SComplex<R>& ZP, const SComplex<R>& WQ,
                    Cx<R> ksQ, Cx<R> ksP) {
        R f = R(q) * R(double(n)) / R(at);
        Cx<R> scal = f * (ksQ - ksP);
        return scaled_mul(ZP * WQ, scal.re, scal.im);
    };

    // interface (2,1) at a1
    t.aH2J1_mu = ablk(m2, m1, eta2, eta1, py2.hp, py2.h, py1.j, py1.jp);
    t.aJ2J1_mu = ablk(m2, m1, eta2, eta1, py2.jp, py2.j, py1.j, py1.jp);
    t.aH2J1_eps = ablk(e2, e1, eta2, eta1, py2.hp, py2.h, py1.j, py1.jp);
    t.aJ2J1_eps = ablk(e2, e1, eta2, eta1, py2.jp, py2.j, py1.j, py1.jp);
    t.bH2J1 = bblk(a1t, py2.h, py1.j, ks1, ks2);
    t.bJ2J1 = bblk(a1t, py2.j, py1.j, ks1, ks2);

    // interface (3,2) at a2
    t.aH3J2_mu = ablk(m3, m2, eta3, eta2, px3.hp, px3.h, px2.j, px2.jp);
    t.aJ3J2_mu = ablk(m3, m2, eta3, eta2, px3.jp, px3.j, px2.j, px2.jp);
    t.aH3H2_mu = ablk(m3, m2, eta3, eta2, px3.hp, px3.h, px2.h, px2.hp);
    t.aH3J2_eps = ablk(e3, e2, eta3, eta2, px3.hp, px3.h, px2.j, px2.jp);
    t.aJ3J2_eps = ablk(e3, e2, eta3, eta2, px3.jp, px3.j, px2.j, px2.jp);
    t.aH3H2_eps = ablk(e3, e2, eta3, eta2, px3.hp, px3.h, px2.h, px2.hp);
    t.bH3J2 = bblk(a2t, px3.h, px2.j, ks2, ks3);
    t.bJ3J2 = bblk(a2t, px3.j, px2.j, ks2, ks3);
    t.bH3H2 = bblk(a2t, px3.h, px2.h, ks2, ks3);

    fill_composites(t);
    return t;
}

template <class R>
BlockTableT<R> swap_table(const BlockTableT<R>& in) {
    BlockTableT<R> t = in;
    t.eps1 = -in.mu1; t.mu1 = -in.eps1;
    t.eps2 = -in.mu2; t.mu2 = -in.eps2;
    t.eps3 = -in.mu3; t.mu3 = -in.eps3;
    // a-blocks swap flavor with a sign; b-blocks carry only k^2 and are fixed
    t.aH2J1_mu = -in.aH2J1_eps;  t.aH2J1_eps = -in.aH2J1_mu;
    t.aJ2J1_mu = -in.aJ2J1_eps;  t.aJ2J1_eps = -in.aJ2J1_mu;
    t.aH3J2_mu = -in.aH3J2_eps;  t.aH3J2_eps = -in.aH3J2_mu;
    t.aJ3J2_mu = -in.aJ3J2_eps;  t.aJ3J2_eps = -in.aJ3J2_mu;
    t.aH3H2_mu = -in.aH3H2_eps;  t.aH3H2_eps = -in.aH3H2_mu;
    t.worst_cancellation_log2 = 0.0;
    fill_composites(t);
    return t;
}

template <class R>
struct RawT {
    SComplex<R> r11, r12;
};

template <class R>
RawT<R> raw_assemble(BlockTableT<R>& t) {
    CancelGuard<R> g;
    if (t.d32.is_zero() || t.N.is_zero())
        throw std::runtime_error("reflect: singular denominator (d32 or N) at n=" +
                                 std::to_string(t.n));
    SComplex<R> num11 = g.sum({t.aH3J2_mu * t.aJ3J2_eps, t.bH3J2 * t.bJ3J2});
    // Wronskian-reduced form of a^{H3'J2}_mu b^{J3J2} - a^{J3'J2}_mu b^{H3J2};
    // the raw products cancel deeply in the quasi-static regime.
    SComplex<R> num12;
    {
        Cx<R> eta2 = widen<R>(t.eta2);
        Cx<R> ks23 = widen<R>(t.eps2 * t.mu2 - t.eps3 * t.mu3);
        Cx<R> m3 = widen<R>(t.mu3);
        double c = -(2.0 / std::numbers::pi) * t.q * double(t.n) / (t.a2_scaled * t.a2_scaled);
        Cx<R> f = ((R(c) * m3) * (eta2 * eta2)) * ks23;
        num12 = scaled_mul(t.j2o * t.j2o, f.re, f.im);
    }

    Cx<R> eta2 = widen<R>(t.eta2), eta3 = widen<R>(t.eta3);
    Cx<R> e3 = widen<R>(t.eps3), m3 = widen<R>(t.mu3);
    double c = 2.0 / (std::numbers::pi * t.a2_scaled);
    Cx<R> pref_c = (R(c * c) * (eta3 * eta3)) * (eta2 * eta2);
    SComplex<R> pref(pref_c.re, pref_c.im, 0);
    pref.renorm();

    RawT<R> out;
    out.r11 = g.sum({-(num11 / t.d32), scaled_mul(pref * (t.T11 / t.N), e3.re, e3.im)});
    out.r12 = g.sum({num12 / t.d32, scaled_mul(pref * (t.T / t.N), m3.re, m3.im)});
    t.worst_cancellation_log2 = std::max(t.worst_cancellation_log2, g.worst);
    return out;
}

struct BundleDiag {
    ScaledBundle bundle;
    double worst_cancellation = 0.0;
};

template <class R>
SComplex<double> narrow_sc(const SComplex<R>& a) {
    SComplex<double> out(scaled_detail::to_double(a.re), scaled_detail::to_double(a.im), a.e2);
    out.renorm();
    return out;
}

template <class R>
BundleDiag bundle_impl(int n, double q,
                       std::complex<double> eps1, std::complex<double> mu1,
                       std::complex<double> eps2, std::complex<double> mu2,
                       double a1t, double a2t) {
    BlockTableT<R> direct = build_table<R>(n, q, eps1, mu1, eps2, mu2, a1t, a2t);
    BlockTableT<R> swapped = swap_table(direct);
    RawT<R> rd = raw_assemble(direct);
    RawT<R> rs = raw_assemble(swapped);
    BundleDiag out;
    out.bundle.r11 = narrow_sc(rd.r11);
    out.bundle.r22 = narrow_sc(rs.r11);
    out.bundle.r12_combo = narrow_sc(-rd.r12);     // times (-omega eps3 / k3) = -1
    out.worst_cancellation = std::max(direct.worst_cancellation_log2,
                                      swapped.worst_cancellation_log2);
    return out;
}

ScaledBundle bundle_guarded(int n, double q,
                            std::complex<double> eps1, std::complex<double> mu1,
                            std::complex<double> eps2, std::complex<double> mu2,
                            double a1t, double a2t) {
    BundleDiag d = bundle_impl<double>(n, q, eps1, mu1, eps2, mu2, a1t, a2t);
    if (d.worst_cancellation <= kGuardBitsDouble) return d.bundle;
    BundleDiag dd = bundle_impl<DD>(n, q, eps1, mu1, eps2, mu2, a1t, a2t);
    if (dd.worst_cancellation > kGuardBitsDD) return ScaledBundle{};  // beyond rescue: the
    return dd.bundle;                                                 // regime is negligible
}

} // namespace

Evaluator::Evaluator(const stack::WireStack& stack, const stack::Transition& transition,
                     const stack::PhysicalConstants& constants) {
    constants.validate();
    double k3 = transition.k3(constants);
    double omega = transition.omega();
    a1t_ = k3 * stack.a1();
    a2t_ = k3 * stack.a2();
    eps1_ = stack.core.rel_permittivity_at(omega, constants);
    mu1_ = stack.core.rel_permeability;
    eps2_ = stack.coating.rel_permittivity_at(omega, constants);
    mu2_ = stack.coating.rel_permeability;
}

ScaledBundle Evaluator::bundle_scaled(int n, double q) const {
    return bundle_guarded(n, q, eps1_, mu1_, eps2_, mu2_, a1t_, a2t_);
}

CoeffBundle Evaluator::bundle(int n, double q) const {
    ScaledBundle s = bundle_scaled(n, q);
    return {s.r11.to_complex(), s.r12_combo.to_complex(), s.r22.to_complex()};
}

BlockTable block_table(int n, double q, const stack::WireStack& stack,
                       const stack::Transition& transition,
                       const stack::PhysicalConstants& constants) {
    Evaluator ev(stack, transition, constants);
    double k3 = transition.k3(constants);
    double omega = transition.omega();
    return build_table<double>(n, q,
                               stack.core.rel_permittivity_at(omega, constants),
                               stack.core.rel_permeability,
                               stack.coating.rel_permittivity_at(omega, constants),
                               stack.coating.rel_permeability,
                               k3 * stack.a1(), k3 * stack.a2());
}

BlockTable duality_swap(const BlockTable& table) { return swap_table(table); }

RawReflection raw_coefficients(const BlockTable& table) {
    BlockTable copy = table;
    RawT<double> r = raw_assemble(copy);
    return {r.r11.to_complex(), r.r12.to_complex()};
}

std::complex<double> a12_closed_form(const BlockTable& t) {
    std::complex<double> ks2 = t.eps2 * t.mu2, ks3 = t.eps3 * t.mu3;
    double c = -(2.0 / (std::numbers::pi * t.a2_scaled)) * (t.q * double(t.n) / t.a2_scaled);
    std::complex<double> h3sq = (t.h3 * t.h3).to_complex();
    return c * (t.eta3 * t.eta3) * t.mu2 * h3sq * (ks2 - ks3);
}

std::complex<double> b12_closed_form(const BlockTable& t) {
    std::complex<double> ks1 = t.eps1 * t.mu1, ks2 = t.eps2 * t.mu2;
    double c = -(2.0 / (std::numbers::pi * t.a1_scaled)) * (t.q * double(t.n) / t.a1_scaled);
    std::complex<double> j1sq = (t.j1 * t.j1).to_complex();
    return c * (t.eta1 * t.eta1) * t.mu2 * j1sq * (ks1 - ks2);
}

std::complex<double> a12_product_form(const BlockTable& t) {
    return (t.aH3J2_mu * t.bH3H2 - t.aH3H2_mu * t.bH3J2).to_complex();
}

std::complex<double> b12_product_form(const BlockTable& t) {
    return (t.aH2J1_mu * t.bJ2J1 - t.aJ2J1_mu * t.bH2J1).to_complex();
}

CoeffBundle reflection_bundle(int n, double q, const stack::WireStack& stack,
                              const stack::Transition& transition,
                              const stack::PhysicalConstants& constants) {
    Evaluator ev(stack, transition, constants);
    return ev.bundle(n, q);
}

} // namespace spinflip::reflect
