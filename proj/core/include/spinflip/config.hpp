// JSON run configuration: wire geometry and materials, transition, atom
// position, and numerical policy. All quantities SI (meters, Ohm m, Hz, K).

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "spinflip/rate.hpp"
#include "spinflip/stack.hpp"

namespace spinflip::config {

/// Schema violation; the message carries the offending field path.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    stack::PhysicalConstants constants{};
    stack::Layer core;
    stack::Layer coating;
    double frequency_hz = 560e3;
    double angular_factor_S2 = 0.125;
    double temperature_k = 300.0;
    double surface_distance_m = 50e-6;
    rate::QuadPolicy numerics{};
    int workers = 0;                       // 0 = decide from env / hardware

    stack::WireStack wire() const { return {core, coating}; }
    stack::Transition transition() const {
        return {frequency_hz, angular_factor_S2, temperature_k};
    }
    stack::FieldPoint field_point() const { return stack::FieldPoint(surface_distance_m); }
};

/// The two-layer wire of the reference experiment: Cu core a1 = 185 um,
/// Al coating a2 = 240 um, f = 560 kHz, S^2 = 1/8, T = 300 K, r = 50 um.
RunConfig reference_defaults();

/// Parse a JSON document; unknown keys and malformed fields throw
/// ConfigError naming the field path.
RunConfig parse_config(const std::string& json_text);

RunConfig load_config_file(const std::string& path);

} // namespace spinflip::config
