// Physical constants, wire materials and geometry, and the spin-flip
// transition descriptor. All quantities are SI; conversions to the
// dimensionless internal units happen downstream.

#pragma once

#include <complex>
#include <optional>

namespace spinflip::stack {

/// CODATA 2018 values; g_S is taken as exactly 2.
struct PhysicalConstants {
    double mu0 = 1.25663706212e-6;    // vacuum permeability, H/m
    double eps0 = 8.8541878128e-12;   // vacuum permittivity, F/m
    double hbar = 1.054571817e-34;    // reduced Planck constant, J s
    double kB = 1.380649e-23;         // Boltzmann constant, J/K
    double muB = 9.2740100783e-24;    // Bohr magneton, J/T
    double c = 299792458.0;           // speed of light, m/s
    double gS = 2.0;                  // electron spin g-factor

    void validate() const;            // positivity and c^2 eps0 mu0 = 1
};

/// One cylindrical material shell. The material is given either as a
/// resistivity (converted to a purely imaginary permittivity at the
/// transition frequency) or as an explicit complex relative permittivity.
struct Layer {
    double outer_radius = 0.0;                              // m
    std::optional<double> resistivity;                      // Ohm m
    std::optional<std::complex<double>> rel_permittivity;   // dimensionless
    std::complex<double> rel_permeability{1.0, 0.0};

    static Layer conductor(double outer_radius, double resistivity,
                           std::complex<double> rel_permeability = {1.0, 0.0});
    static Layer dielectric(double outer_radius, std::complex<double> rel_permittivity,
                            std::complex<double> rel_permeability = {1.0, 0.0});

    void validate() const;

    /// Relative permittivity at angular frequency omega, resolving a
    /// resistivity through eps = i/(eps0 rho omega).
    std::complex<double> rel_permittivity_at(double omega, const PhysicalConstants& k) const;
};

/// Core + coating + vacuum ambient; radii must satisfy 0 < a1 < a2.
struct WireStack {
    Layer core;
    Layer coating;

    WireStack(Layer core_, Layer coating_);

    double a1() const { return core.outer_radius; }
    double a2() const { return coating.outer_radius; }
};

/// Spin-flip transition: measured frequency, squared transverse spin matrix
/// element (1/8 for the 87Rb |2,2> -> |2,1> flip), and the environment
/// temperature shared by wire and field.
struct Transition {
    double frequency = 0.0;           // Hz
    double angular_factor_S2 = 0.125;
    double temperature = 0.0;         // K

    Transition(double frequency_hz, double angular_factor, double temperature_k);

    double omega() const;
    double k3(const PhysicalConstants& k) const;   // free-space wavenumber, 1/m
};

/// Atom position: distance r from the coating surface, rho = a2 + r.
struct FieldPoint {
    double surface_distance = 0.0;    // m

    explicit FieldPoint(double r_m);
};

/// Skin depth delta = sqrt(2 rho / (mu0 omega)) with omega = 2 pi f.
double skin_depth(double resistivity, double frequency,
                  const PhysicalConstants& k = PhysicalConstants{});

/// Quasi-static relative permittivity i 2/(k0 delta)^2 of a conductor.
std::complex<double> rel_permittivity(double skin_depth_m, double k0);

/// Dimensionless radial propagation constant sqrt(eps - q^2) on the branch
/// with Im >= 0 (Re >= 0 on the real branch cut), so that outgoing Hankel
/// waves decay for evanescent modes.
std::complex<double> eta_tilde(std::complex<double> layer_rel_permittivity, double q);

} // namespace spinflip::stack
