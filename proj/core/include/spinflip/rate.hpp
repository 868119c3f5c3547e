// Spin-flip rate assembly: free-space rate, the axial-wavenumber integral
// and azimuthal mode sum for the wire contribution, thermal occupation, and
// the total rate / lifetime.

#pragma once

#include <complex>
#include <stdexcept>

#include "spinflip/stack.hpp"

namespace spinflip::rate {

/// Numerical policy for the q-integral and the mode sum.
struct QuadPolicy {
    double quad_abs_tol = 1e-8;
    double quad_rel_tol = 1e-8;
    /// q_max = tail_cutoff_factor / (k3 (a2 + r)); panels beyond verify the tail.
    double tail_cutoff_factor = 30.0;
    int max_tail_extra_panels = 48;
    double mode_rel_tol = 1e-8;
    int mode_consecutive_below = 3;
    int max_modes = 1000;
    /// Mode integrals for distinct n are independent; batches of this many
    /// run concurrently, reduced deterministically in ascending n so the
    /// result is bit-stable regardless of schedule.
    int mode_workers = 1;
};

/// One azimuthal mode's dimensionless integral (I~_n)_xx + (I~_n)_yy.
struct ModeIntegral {
    int n = 0;
    std::complex<double> value{};
    double abs_error_estimate = 0.0;
    long evaluations = 0;
};

struct WireRate {
    double gamma_wire = 0.0;       // 1/s
    double error_estimate = 0.0;
    int modes_used = 0;
    bool converged = true;
};

struct RateResult {
    double gamma_free = 0.0;       // 1/s
    double gamma_wire = 0.0;       // 1/s
    double n_thermal = 0.0;
    double gamma_total = 0.0;      // 1/s
    double lifetime = 0.0;         // s
    int modes_used = 0;
    bool converged = true;
};

/// q-integral failed to reach tolerance within the evaluation budget.
class ModeConvergenceError : public std::runtime_error {
  public:
    ModeConvergenceError(std::string msg, ModeIntegral partial_)
        : std::runtime_error(std::move(msg)), partial(partial_) {}
    ModeIntegral partial;
};

/// Mode sum hit the hard cap before meeting the truncation rule.
class TruncationError : public std::runtime_error {
  public:
    TruncationError(std::string msg, WireRate partial_)
        : std::runtime_error(std::move(msg)), partial(partial_) {}
    WireRate partial;
};

/// Free-space spontaneous rate mu0 (muB gS)^2 k3^3 S^2 / (3 pi hbar).
double gamma_free(const stack::Transition& transition,
                  const stack::PhysicalConstants& constants = {});

/// Bose-Einstein occupation 1/(exp(hbar omega / kB T) - 1); 0 at T = 0.
double thermal_occupation(const stack::Transition& transition,
                          const stack::PhysicalConstants& constants = {});

/// The q-integrand of (I~_n)_xx + (I~_n)_yy, assembled in scaled arithmetic.
std::complex<double> integrand_xxyy(int n, double q, const stack::WireStack& stack,
                                    const stack::Transition& transition,
                                    const stack::FieldPoint& point,
                                    const stack::PhysicalConstants& constants = {});

/// Integral over q in (-inf, inf), parity-folded to 2 * [0, inf).
ModeIntegral mode_integral(int n, const stack::WireStack& stack,
                           const stack::Transition& transition,
                           const stack::FieldPoint& point, const QuadPolicy& policy = {},
                           const stack::PhysicalConstants& constants = {});

/// Wire contribution (3/8) Gamma0 sum_n (2 - delta_n0) Re[...].
WireRate gamma_wire(const stack::WireStack& stack, const stack::Transition& transition,
                    const stack::FieldPoint& point, const QuadPolicy& policy = {},
                    const stack::PhysicalConstants& constants = {});

/// (Gamma0 + Gamma_wire)(n_th + 1) and the lifetime. Truncation errors from
/// the mode sum propagate; callers that tolerate degraded convergence can
/// rebuild a flagged result from the error payload via compose_total.
RateResult total_rate(const stack::WireStack& stack, const stack::Transition& transition,
                      const stack::FieldPoint& point, const QuadPolicy& policy = {},
                      const stack::PhysicalConstants& constants = {});

RateResult compose_total(double gamma_free_value, const WireRate& wire, double n_thermal);

} // namespace spinflip::rate
