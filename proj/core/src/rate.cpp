#include "spinflip/rate.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

#include "spinflip/detail/cylfun_impl.hpp"
#include "spinflip/quadrature.hpp"
#include "spinflip/reflect.hpp"

namespace spinflip::rate {

namespace {

using std::numbers::pi;

// Shared per-evaluation context: reflection evaluator plus field-point data
// in natural units.
struct Context {
    reflect::Evaluator refl;
    double rho_t;    // k3 (a2 + r)

    Context(const stack::WireStack& s, const stack::Transition& t,
            const stack::FieldPoint& p, const stack::PhysicalConstants& k)
        : refl(s, t, k), rho_t(t.k3(k) * (s.a2() + p.surface_distance)) {}

    std::complex<double> integrand(int n, double q) const {
        std::complex<double> eta3 = stack::eta_tilde({1.0, 0.0}, q);
        reflect::ScaledBundle rb = refl.bundle_scaled(n, q);

        Cx<double> x = cx_of(eta3 * rho_t);
        auto field = cylfun_detail::cyl_pair<double>(n, x, /*want_j=*/false);

        // [R11 + q^2 R22] [H^2 n^2/rho^2 + (eta3 H')^2] + 2iq r12c eta3 (H^2)' n/rho
        SComplex<double> h2 = field.h * field.h;
        SComplex<double> etahp = scaled_mul(field.hp, eta3.real(), eta3.imag());
        SComplex<double> diag_geom =
            scaled_mul(h2, double(n) * double(n) / (rho_t * rho_t), 0.0) + etahp * etahp;
        SComplex<double> rdiag = rb.r11 + scaled_mul(rb.r22, q * q, 0.0);
        SComplex<double> total = diag_geom * rdiag;

        if (n > 0 && q != 0.0 && !rb.r12_combo.is_zero()) {
            std::complex<double> cfac =
                std::complex<double>(0.0, 2.0 * q) * eta3 * (2.0 * double(n) / rho_t);
            SComplex<double> cross =
                scaled_mul((field.h * field.hp) * rb.r12_combo, cfac.real(), cfac.imag());
            total = total + cross;
        }
        std::complex<double> eta3sq = eta3 * eta3;
        return total.to_complex() / eta3sq;
    }
};

ModeIntegral mode_integral_impl(const Context& ctx, int n, const QuadPolicy& policy) {
    ModeIntegral out;
    out.n = n;

    // The eta3 branch point at q = 1 is absorbed by substitutions
    // (q = sin t below, q = cosh u above); nodes stay strictly off q = 1.
    auto f_prop = [&](double t) {                       // q in [0, 1)
        return ctx.integrand(n, std::sin(t)) * std::cos(t);
    };
    const double u2 = std::acosh(2.0);
    auto f_near = [&](double u) {                       // q in (1, 2]
        return ctx.integrand(n, std::cosh(u)) * std::sinh(u);
    };
    auto f = [&](double q) { return ctx.integrand(n, q); };

    struct Panel {
        std::function<std::complex<double>(double)> fn;
        double a, b;
        quad::QuadResult crude;
    };
    std::vector<Panel> panels;
    panels.push_back({f_prop, 0.0, 0.5 * pi, {}});
    panels.push_back({f_near, 0.0, u2, {}});

    // Pass 1: single Kronrod sweep to discover the global scale, extending
    // the logarithmic tail until it stops mattering.
    const double qmax = policy.tail_cutoff_factor / ctx.rho_t;
    const double ratio = std::pow(10.0, 1.0 / 3.0);

    std::complex<double> crude{};
    long evals = 0;
    for (auto& p : panels) {
        p.crude = quad::gk15(p.fn, p.a, p.b);
        crude += p.crude.value;
        evals += p.crude.evaluations;
    }
    double lo = 2.0;
    int extra = 0;
    bool tail_ok = false;
    while (true) {
        double hi = lo * ratio;
        quad::QuadResult r = quad::gk15(f, lo, hi);
        crude += r.value;
        evals += r.evaluations;
        panels.push_back({f, lo, hi, r});
        lo = hi;
        if (hi >= qmax) {
            double target = std::max(policy.quad_abs_tol,
                                     policy.quad_rel_tol * std::abs(crude));
            if (std::abs(r.value) < 0.1 * target) { tail_ok = true; break; }
            if (++extra > policy.max_tail_extra_panels) break;
        }
    }

    if (!tail_ok) {
        out.value = 2.0 * crude;
        out.evaluations = evals;
        throw ModeConvergenceError(
            "mode integral tail did not decay within the panel budget at n=" + std::to_string(n),
            out);
    }

    // Pass 2: refine every panel against the discovered scale, so panels
    // that cannot move the total are not polished needlessly.
    const double scale = std::abs(crude);
    const double rel = 0.125 * policy.quad_rel_tol;
    std::complex<double> acc{};
    double err = 0.0;
    for (auto& p : panels) {
        quad::QuadResult r = quad::integrate_refine(p.fn, p.a, p.b, p.crude,
                                                    0.125 * policy.quad_abs_tol, rel, scale);
        acc += r.value;
        err += r.abs_error;
        evals += r.evaluations - p.crude.evaluations;   // pass-1 evals already counted
    }

    out.value = 2.0 * acc;      // parity fold: integrand is even in q
    out.abs_error_estimate = 2.0 * err;
    out.evaluations = evals;

    double target = std::max(policy.quad_abs_tol, policy.quad_rel_tol * std::abs(out.value));
    if (out.abs_error_estimate > 16.0 * target)
        throw ModeConvergenceError("mode integral error estimate above tolerance at n=" +
                                   std::to_string(n), out);
    return out;
}

WireRate gamma_wire_impl(const Context& ctx, double g0, const QuadPolicy& policy) {
    WireRate out;
    double sum = 0.0;
    double err = 0.0;
    int below = 0;
    bool done = false;

    // Modes are evaluated in batches (concurrently when mode_workers > 1)
    // but always reduced in ascending n, so the sum is schedule-independent.
    const int batch = std::max(1, policy.mode_workers);
    std::vector<ModeIntegral> results(batch);
    std::vector<std::exception_ptr> errors(batch);

    auto reduce_one = [&](int n, ModeIntegral& mi) {
        double w = (n == 0) ? 1.0 : 2.0;
        double contrib = w * mi.value.real();
        sum += contrib;
        err += w * mi.abs_error_estimate;
        out.modes_used = n + 1;
        if (std::abs(contrib) <= policy.mode_rel_tol * std::abs(sum)) {
            if (++below >= policy.mode_consecutive_below) done = true;
        } else {
            below = 0;
        }
    };

    for (int n0 = 0; n0 < policy.max_modes && !done; n0 += batch) {
        int count = std::min(batch, policy.max_modes - n0);
        if (count == 1 || batch == 1) {
            errors[0] = nullptr;
            try {
                results[0] = mode_integral_impl(ctx, n0, policy);
            } catch (...) {
                errors[0] = std::current_exception();
            }
        } else {
            std::vector<std::thread> pool;
            pool.reserve(count);
            for (int i = 0; i < count; ++i)
                pool.emplace_back([&, i] {
                    errors[i] = nullptr;
                    try {
                        results[i] = mode_integral_impl(ctx, n0 + i, policy);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                });
            for (auto& t : pool) t.join();
        }
        for (int i = 0; i < count && !done; ++i) {
            if (errors[i]) {
                out.gamma_wire = 0.375 * g0 * sum;
                out.error_estimate = 0.375 * g0 * err;
                out.modes_used = n0 + i;
                out.converged = false;
                try {
                    std::rethrow_exception(errors[i]);
                } catch (const ModeConvergenceError& e) {
                    throw TruncationError(std::string(e.what()), out);
                }
            }
            reduce_one(n0 + i, results[i]);
        }
    }

    if (!done) {
        out.gamma_wire = 0.375 * g0 * sum;
        out.error_estimate = 0.375 * g0 * err;
        out.converged = false;
        throw TruncationError("mode sum hit the cap of " + std::to_string(policy.max_modes) +
                              " modes before meeting the truncation rule", out);
    }
    out.gamma_wire = 0.375 * g0 * sum;   // (3/8) Gamma0 prefactor
    out.error_estimate = 0.375 * g0 * err;
    out.converged = true;
    return out;
}

} // namespace

double gamma_free(const stack::Transition& t, const stack::PhysicalConstants& k) {
    k.validate();
    double k3 = t.k3(k);
    double m = k.muB * k.gS;
    return k.mu0 * m * m * k3 * k3 * k3 * t.angular_factor_S2 / (3.0 * pi * k.hbar);
}

double thermal_occupation(const stack::Transition& t, const stack::PhysicalConstants& k) {
    if (t.temperature == 0.0) return 0.0;
    double x = k.hbar * t.omega() / (k.kB * t.temperature);
    return 1.0 / std::expm1(x);
}

std::complex<double> integrand_xxyy(int n, double q, const stack::WireStack& s,
                                    const stack::Transition& t, const stack::FieldPoint& p,
                                    const stack::PhysicalConstants& k) {
    return Context(s, t, p, k).integrand(n, q);
}

ModeIntegral mode_integral(int n, const stack::WireStack& s, const stack::Transition& t,
                           const stack::FieldPoint& p, const QuadPolicy& policy,
                           const stack::PhysicalConstants& k) {
    return mode_integral_impl(Context(s, t, p, k), n, policy);
}

WireRate gamma_wire(const stack::WireStack& s, const stack::Transition& t,
                    const stack::FieldPoint& p, const QuadPolicy& policy,
                    const stack::PhysicalConstants& k) {
    return gamma_wire_impl(Context(s, t, p, k), gamma_free(t, k), policy);
}

RateResult compose_total(double gamma_free_value, const WireRate& wire, double n_thermal) {
    RateResult out;
    out.gamma_free = gamma_free_value;
    out.gamma_wire = wire.gamma_wire;
    out.modes_used = wire.modes_used;
    out.converged = wire.converged;
    out.n_thermal = n_thermal;
    out.gamma_total = (out.gamma_free + out.gamma_wire) * (out.n_thermal + 1.0);
    out.lifetime = 1.0 / out.gamma_total;
    return out;
}

RateResult total_rate(const stack::WireStack& s, const stack::Transition& t,
                      const stack::FieldPoint& p, const QuadPolicy& policy,
                      const stack::PhysicalConstants& k) {
    double g0 = gamma_free(t, k);
    WireRate w = gamma_wire_impl(Context(s, t, p, k), g0, policy);
    return compose_total(g0, w, thermal_occupation(t, k));
}

} // namespace spinflip::rate
