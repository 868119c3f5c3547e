// Scattering reflection coefficients of the core/coating/vacuum cylinder,
// assembled from interface blocks in scaled arithmetic and returned as the
// three dimensionless combinations the rate integrand consumes.
//
// Everything here works in natural units: omega = 1, lengths multiplied by
// the free-space wavenumber k3, ambient eps = mu = 1, so every block is
// dimensionless before combination.

#pragma once

#include <complex>

#include "spinflip/scaled.hpp"
#include "spinflip/stack.hpp"

namespace spinflip::reflect {

/// The three dimensionless scattering quantities at one (n, q):
/// R^11_n, R^12_n (-omega eps3 / k3), and R^22_n.
struct CoeffBundle {
    std::complex<double> r11{};
    std::complex<double> r12_combo{};
    std::complex<double> r22{};
};

/// Same bundle in scaled form. Near the q = 1 branch point at high mode
/// order the coefficients fall below the double underflow threshold while
/// the Hankel factors they multiply grow correspondingly; the rate
/// integrand must combine the two before leaving the scaled representation.
struct ScaledBundle {
    SComplex<double> r11, r12_combo, r22;
};

/// Every interface block of the two-interface cascade, kept in scaled form.
/// `duality_swap` maps mu_p <-> -eps_p, which exchanges the polarization
/// roles: the swapped table's r11/r12 are the original's r22/r21.
template <class R>
struct BlockTableT {
    using Real = R;

    // context (natural units)
    int n = 0;
    double q = 0.0;
    double a1_scaled = 0.0, a2_scaled = 0.0;     // k3 * radius
    std::complex<double> eps1, mu1, eps2, mu2, eps3, mu3;
    std::complex<double> eta1, eta2, eta3;       // sqrt(eps mu - q^2), Im >= 0
    SComplex<R> j1, h3, j2o;                     // J_n(eta1 a1), H_n(eta3 a2), J_n(eta2 a2)

    // primitive interface blocks
    SComplex<R> aH2J1_mu, aJ2J1_mu, aH2J1_eps, aJ2J1_eps, bH2J1, bJ2J1;
    SComplex<R> aH3J2_mu, aJ3J2_mu, aH3H2_mu, aH3J2_eps, aJ3J2_eps, aH3H2_eps;
    SComplex<R> bH3J2, bJ3J2, bH3H2;

    // composites
    SComplex<R> t21, t32, d21, d32;
    SComplex<R> a11, a12, a21, a22, b11, b12, b21, b22;
    SComplex<R> alpha, beta, gamma, delta;
    SComplex<R> T11, T, N;

    double worst_cancellation_log2 = 0.0;        // bits lost in the worst sum
};

using BlockTable = BlockTableT<double>;

/// R^11 and R^12 read off a table as-is (apply to a swapped table to obtain
/// R^22 and R^21).
struct RawReflection {
    std::complex<double> r11{};
    std::complex<double> r12{};
};

BlockTable block_table(int n, double q, const stack::WireStack& stack,
                       const stack::Transition& transition,
                       const stack::PhysicalConstants& constants = {});

/// mu_p <-> -eps_p on every stored block; an involution.
BlockTable duality_swap(const BlockTable& table);

RawReflection raw_coefficients(const BlockTable& table);

/// The a12/b12 blocks have two published forms: the raw products of
/// interface blocks and the Wronskian-reduced closed forms. Production uses
/// the closed forms (the products cancel deeply near the branch point);
/// both are exposed so tests can check the reduction identity.
std::complex<double> a12_closed_form(const BlockTable& table);
std::complex<double> b12_closed_form(const BlockTable& table);
std::complex<double> a12_product_form(const BlockTable& table);
std::complex<double> b12_product_form(const BlockTable& table);

/// Full bundle with the extended-precision cancellation fallback applied.
CoeffBundle reflection_bundle(int n, double q, const stack::WireStack& stack,
                              const stack::Transition& transition,
                              const stack::PhysicalConstants& constants = {});

/// Precomputes the natural-unit context once and evaluates bundles per
/// (n, q); immutable after construction, safe to share across threads.
class Evaluator {
  public:
    Evaluator(const stack::WireStack& stack, const stack::Transition& transition,
              const stack::PhysicalConstants& constants = {});

    CoeffBundle bundle(int n, double q) const;
    ScaledBundle bundle_scaled(int n, double q) const;

    double a1_scaled() const { return a1t_; }
    double a2_scaled() const { return a2t_; }

  private:
    double a1t_, a2t_;
    std::complex<double> eps1_, mu1_, eps2_, mu2_;
};

} // namespace spinflip::reflect
