#include "spinflip/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace spinflip::config {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& path, std::set<std::string> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown field '" + path + "." + it.key() + "'");
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("config: missing field '" + path + "." + key + "'");
    }
    if (!j[key].is_number())
        throw ConfigError("config: field '" + path + "." + key + "' must be a number");
    return j[key].get<double>();
}

std::complex<double> get_complex(const json& j, const std::string& path, const std::string& key) {
    const json& v = j[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("config: field '" + path + "." + key + "' must be [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

stack::Layer parse_layer(const json& j, const std::string& path) {
    require_keys(j, path, {"outer_radius_m", "resistivity_ohm_m", "rel_permittivity",
                           "rel_permeability"});
    double radius = get_number(j, path, "outer_radius_m");
    bool has_rho = j.contains("resistivity_ohm_m");
    bool has_eps = j.contains("rel_permittivity");
    if (has_rho == has_eps)
        throw ConfigError("config: '" + path +
                          "' needs exactly one of resistivity_ohm_m / rel_permittivity");
    std::complex<double> mu{1.0, 0.0};
    if (j.contains("rel_permeability")) mu = get_complex(j, path, "rel_permeability");
    try {
        if (has_rho)
            return stack::Layer::conductor(radius, get_number(j, path, "resistivity_ohm_m"), mu);
        return stack::Layer::dielectric(radius, get_complex(j, path, "rel_permittivity"), mu);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: '" + path + "': " + e.what());
    }
}

} // namespace

RunConfig reference_defaults() {
    RunConfig c;
    c.core = stack::Layer::conductor(185e-6, 1.6e-8);     // Cu
    c.coating = stack::Layer::conductor(240e-6, 2.7e-8);  // Al
    return c;
}

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    require_keys(root, "$", {"constants", "wire", "transition", "atom", "numerics"});

    RunConfig c = reference_defaults();

    if (root.contains("constants")) {
        const json& k = root["constants"];
        require_keys(k, "constants", {"mu0", "eps0", "hbar", "kB", "muB", "c", "gS"});
        c.constants.mu0 = get_number(k, "constants", "mu0", c.constants.mu0);
        c.constants.eps0 = get_number(k, "constants", "eps0", c.constants.eps0);
        c.constants.hbar = get_number(k, "constants", "hbar", c.constants.hbar);
        c.constants.kB = get_number(k, "constants", "kB", c.constants.kB);
        c.constants.muB = get_number(k, "constants", "muB", c.constants.muB);
        c.constants.c = get_number(k, "constants", "c", c.constants.c);
        c.constants.gS = get_number(k, "constants", "gS", c.constants.gS);
        try {
            c.constants.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: 'constants': ") + e.what());
        }
    }

    if (root.contains("wire")) {
        const json& w = root["wire"];
        require_keys(w, "wire", {"core", "coating"});
        if (w.contains("core")) c.core = parse_layer(w["core"], "wire.core");
        if (w.contains("coating")) c.coating = parse_layer(w["coating"], "wire.coating");
    }
    if (!(c.core.outer_radius < c.coating.outer_radius))
        throw ConfigError("config: 'wire' requires core radius a1 < coating radius a2");

    if (root.contains("transition")) {
        const json& t = root["transition"];
        require_keys(t, "transition", {"frequency_hz", "angular_factor_s2", "temperature_k"});
        c.frequency_hz = get_number(t, "transition", "frequency_hz", c.frequency_hz);
        c.angular_factor_S2 = get_number(t, "transition", "angular_factor_s2",
                                         c.angular_factor_S2);
        c.temperature_k = get_number(t, "transition", "temperature_k", c.temperature_k);
        if (!(c.frequency_hz > 0))
            throw ConfigError("config: 'transition.frequency_hz' must be positive");
        if (!(c.angular_factor_S2 > 0))
            throw ConfigError("config: 'transition.angular_factor_s2' must be positive");
        if (c.temperature_k < 0)
            throw ConfigError("config: 'transition.temperature_k' must be >= 0");
    }

    if (root.contains("atom")) {
        const json& a = root["atom"];
        require_keys(a, "atom", {"surface_distance_m"});
        c.surface_distance_m = get_number(a, "atom", "surface_distance_m", c.surface_distance_m);
        if (!(c.surface_distance_m > 0))
            throw ConfigError("config: 'atom.surface_distance_m' must be positive");
    }

    if (root.contains("numerics")) {
        const json& n = root["numerics"];
        require_keys(n, "numerics",
                     {"quad_abs_tol", "quad_rel_tol", "tail_cutoff_factor",
                      "max_tail_extra_panels", "mode_rel_tol", "mode_consecutive_below",
                      "max_modes", "workers"});
        rate::QuadPolicy& p = c.numerics;
        p.quad_abs_tol = get_number(n, "numerics", "quad_abs_tol", p.quad_abs_tol);
        p.quad_rel_tol = get_number(n, "numerics", "quad_rel_tol", p.quad_rel_tol);
        p.tail_cutoff_factor = get_number(n, "numerics", "tail_cutoff_factor",
                                          p.tail_cutoff_factor);
        p.max_tail_extra_panels = int(get_number(n, "numerics", "max_tail_extra_panels",
                                                 p.max_tail_extra_panels));
        p.mode_rel_tol = get_number(n, "numerics", "mode_rel_tol", p.mode_rel_tol);
        p.mode_consecutive_below = int(get_number(n, "numerics", "mode_consecutive_below",
                                                  p.mode_consecutive_below));
        p.max_modes = int(get_number(n, "numerics", "max_modes", p.max_modes));
        c.workers = int(get_number(n, "numerics", "workers", c.workers));
        if (!(p.quad_rel_tol > 0) || !(p.quad_abs_tol > 0))
            throw ConfigError("config: 'numerics' tolerances must be positive");
        if (p.max_modes < 1) throw ConfigError("config: 'numerics.max_modes' must be >= 1");
    }

    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace spinflip::config
