#include "spinflip/stack.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinflip::stack {

void PhysicalConstants::validate() const {
    if (!(mu0 > 0 && eps0 > 0 && hbar > 0 && kB > 0 && muB > 0 && c > 0 && gS > 0))
        throw std::invalid_argument("constants: all values must be strictly positive");
    double one = c * c * eps0 * mu0;
    if (std::abs(one - 1.0) > 1e-9)
        throw std::invalid_argument("constants: c^2 eps0 mu0 deviates from 1");
}

Layer Layer::conductor(double outer_radius, double resistivity_ohm_m,
                       std::complex<double> rel_permeability) {
    Layer l;
    l.outer_radius = outer_radius;
    l.resistivity = resistivity_ohm_m;
    l.rel_permeability = rel_permeability;
    l.validate();
    return l;
}

Layer Layer::dielectric(double outer_radius, std::complex<double> eps_rel,
                        std::complex<double> rel_permeability) {
    Layer l;
    l.outer_radius = outer_radius;
    l.rel_permittivity = eps_rel;
    l.rel_permeability = rel_permeability;
    l.validate();
    return l;
}

void Layer::validate() const {
    if (!(outer_radius > 0))
        throw std::invalid_argument("layer: outer radius must be positive");
    if (resistivity.has_value() == rel_permittivity.has_value())
        throw std::invalid_argument(
            "layer: exactly one of resistivity / relative permittivity must be given");
    if (resistivity && !(*resistivity > 0))
        throw std::invalid_argument("layer: resistivity must be positive");
    if (rel_permittivity && rel_permittivity->imag() < 0)
        throw std::invalid_argument("layer: Im(eps_rel) must be >= 0 (passive medium)");
}

std::complex<double> Layer::rel_permittivity_at(double omega, const PhysicalConstants& k) const {
    if (rel_permittivity) return *rel_permittivity;
    return {0.0, 1.0 / (k.eps0 * *resistivity * omega)};
}

WireStack::WireStack(Layer core_, Layer coating_) : core(core_), coating(coating_) {
    core.validate();
    coating.validate();
    if (!(core.outer_radius < coating.outer_radius))
        throw std::invalid_argument("wire stack: requires a1 < a2");
}

Transition::Transition(double frequency_hz, double angular_factor, double temperature_k)
    : frequency(frequency_hz), angular_factor_S2(angular_factor), temperature(temperature_k) {
    if (!(frequency > 0))
        throw std::invalid_argument("transition: frequency must be positive");
    if (!(angular_factor_S2 > 0))
        throw std::invalid_argument("transition: angular factor must be positive");
    if (temperature < 0)
        throw std::invalid_argument("transition: temperature must be >= 0");
}

double Transition::omega() const { return 2.0 * std::numbers::pi * frequency; }

double Transition::k3(const PhysicalConstants& k) const { return omega() / k.c; }

FieldPoint::FieldPoint(double r_m) : surface_distance(r_m) {
    if (!(surface_distance > 0))
        throw std::invalid_argument("field point: the atom must sit strictly outside the wire");
}

double skin_depth(double resistivity, double frequency, const PhysicalConstants& k) {
    if (!(resistivity > 0) || !(frequency > 0))
        throw std::invalid_argument("skin_depth: inputs must be positive");
    double omega = 2.0 * std::numbers::pi * frequency;
    return std::sqrt(2.0 * resistivity / (k.mu0 * omega));
}

std::complex<double> rel_permittivity(double skin_depth_m, double k0) {
    if (!(skin_depth_m > 0) || !(k0 > 0))
        throw std::invalid_argument("rel_permittivity: inputs must be positive");
    double kd = k0 * skin_depth_m;
    return {0.0, 2.0 / (kd * kd)};
}

std::complex<double> eta_tilde(std::complex<double> eps_rel, double q) {
    if (!std::isfinite(q) || !std::isfinite(eps_rel.real()) || !std::isfinite(eps_rel.imag()))
        throw std::invalid_argument("eta_tilde: non-finite input");
    std::complex<double> eta = std::sqrt(eps_rel - q * q);
    if (eta.imag() < 0.0) eta = -eta;
    if (eta.imag() == 0.0 && eta.real() < 0.0) eta = -eta;
    return eta;
}

} // namespace spinflip::stack
