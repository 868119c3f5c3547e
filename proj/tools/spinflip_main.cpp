// spinflip: spin-flip lifetimes of a trapped atom near a two-layer wire.
//
//   spinflip rate  --config cfg.json [--json]
//   spinflip sweep --preset fig3 --out fig3.csv
//   spinflip sweep --param distance --from 2e-5 --to 1e-3 --points 40 --log --out r.csv
//   spinflip slope --in fig4.csv --from 3e-4 --to 1e-3
//
// Exit codes: 0 success, 2 configuration error, 3 convergence degradation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinflip/config.hpp"
#include "spinflip/rate.hpp"
#include "spinflip/slope.hpp"
#include "spinflip/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDegraded = 3;

using spinflip::config::RunConfig;

RunConfig load_or_default(const std::string& path) {
    if (path.empty()) return spinflip::config::reference_defaults();
    return spinflip::config::load_config_file(path);
}

void apply_overrides(RunConfig& cfg, std::optional<double> temperature,
                     std::optional<double> distance, int workers) {
    if (temperature) cfg.temperature_k = *temperature;
    if (distance) cfg.surface_distance_m = *distance;
    if (workers > 0) cfg.workers = workers;
}

void print_rate_header(const RunConfig& cfg) {
    std::printf("# wire: a1=%.12g m  a2=%.12g m\n", cfg.core.outer_radius,
                cfg.coating.outer_radius);
    auto material = [](const spinflip::stack::Layer& l) {
        char buf[128];
        if (l.resistivity)
            std::snprintf(buf, sizeof buf, "resistivity %.12g Ohm m", *l.resistivity);
        else
            std::snprintf(buf, sizeof buf, "eps_rel (%.12g, %.12g)", l.rel_permittivity->real(),
                          l.rel_permittivity->imag());
        return std::string(buf);
    };
    std::printf("# core: %s   coating: %s\n", material(cfg.core).c_str(),
                material(cfg.coating).c_str());
    std::printf("# transition: f=%.12g Hz  S2=%.12g  T=%.12g K\n", cfg.frequency_hz,
                cfg.angular_factor_S2, cfg.temperature_k);
    std::printf("# atom: r=%.12g m\n", cfg.surface_distance_m);
}

int run_rate(const std::string& config_path, bool as_json, std::optional<double> temperature,
             std::optional<double> distance, int workers) {
    RunConfig cfg = load_or_default(config_path);
    apply_overrides(cfg, temperature, distance, workers);
    cfg.numerics.mode_workers = spinflip::sweep::decide_workers(cfg.workers);

    spinflip::rate::RateResult r;
    try {
        r = spinflip::rate::total_rate(cfg.wire(), cfg.transition(), cfg.field_point(),
                                       cfg.numerics, cfg.constants);
    } catch (const spinflip::rate::TruncationError& e) {
        r = spinflip::rate::compose_total(
            spinflip::rate::gamma_free(cfg.transition(), cfg.constants), e.partial,
            spinflip::rate::thermal_occupation(cfg.transition(), cfg.constants));
        r.converged = false;
        std::fprintf(stderr, "warning: %s\n", e.what());
    }

    if (as_json) {
        nlohmann::json inputs{{"a1_m", cfg.core.outer_radius},
                              {"a2_m", cfg.coating.outer_radius},
                              {"frequency_hz", cfg.frequency_hz},
                              {"angular_factor_s2", cfg.angular_factor_S2},
                              {"temperature_k", cfg.temperature_k},
                              {"surface_distance_m", cfg.surface_distance_m}};
        nlohmann::json j{{"inputs", inputs},
                         {"gamma_free_per_s", r.gamma_free},
                         {"gamma_wire_per_s", r.gamma_wire},
                         {"n_thermal", r.n_thermal},
                         {"gamma_total_per_s", r.gamma_total},
                         {"lifetime_s", r.lifetime},
                         {"modes_used", r.modes_used},
                         {"converged", r.converged}};
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        print_rate_header(cfg);
        std::printf("gamma_free  = %.12g 1/s\n", r.gamma_free);
        std::printf("gamma_wire  = %.12g 1/s\n", r.gamma_wire);
        std::printf("n_thermal   = %.12g\n", r.n_thermal);
        std::printf("gamma_total = %.12g 1/s\n", r.gamma_total);
        std::printf("lifetime    = %.12g s\n", r.lifetime);
        std::printf("modes_used  = %d  converged = %d\n", r.modes_used, int(r.converged));
    }
    return r.converged ? kExitOk : kExitDegraded;
}

int run_sweep_cmd(const std::string& config_path, const std::string& preset_name,
                  const std::string& param, double from, double to, int points, bool log_spacing,
                  const std::string& out_path, const std::string& overlay_path,
                  std::optional<double> temperature, int workers) {
    RunConfig cfg = load_or_default(config_path);

    spinflip::sweep::SweepSpec spec;
    if (!preset_name.empty()) {
        spinflip::sweep::Preset p = spinflip::sweep::preset(preset_name);
        spec = p.spec;
        cfg.temperature_k = p.temperature_k;
    } else {
        spec.parameter = spinflip::sweep::parameter_from_string(param);
        spec.from = from;
        spec.to = to;
        spec.points = points;
        spec.log_spacing = log_spacing;
        if (spec.parameter == spinflip::sweep::Parameter::outer_radius)
            spec.couple_a1_to_a2 = true;
        if (spec.parameter == spinflip::sweep::Parameter::joint_scale) {
            spec.couple_a1_to_a2 = true;
            spec.couple_a2_to_r = true;
        }
    }
    apply_overrides(cfg, temperature, {}, workers);
    spec.validate();

    spinflip::sweep::SweepResult result = spinflip::sweep::run_sweep(spec, cfg, cfg.workers);

    std::ostringstream csv;
    spinflip::sweep::write_csv(csv, result);
    if (!overlay_path.empty()) {
        std::ifstream overlay(overlay_path);
        if (!overlay)
            throw spinflip::config::ConfigError("cannot open overlay file '" + overlay_path + "'");
        csv << "# overlay: " << overlay_path << "\n";
        std::string line;
        while (std::getline(overlay, line)) csv << "# " << line << "\n";
    }

    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out)
            throw spinflip::config::ConfigError("cannot open output file '" + out_path + "'");
        out << csv.str();
    }
    return result.all_converged ? kExitOk : kExitDegraded;
}

int run_slope(const std::string& in_path, double from, double to) {
    std::ifstream in(in_path);
    if (!in) throw spinflip::config::ConfigError("cannot open '" + in_path + "'");
    spinflip::sweep::CsvTable table = spinflip::sweep::read_csv(in);
    std::vector<double> x, y;
    for (size_t i = 0; i < table.value_si.size(); ++i) {
        if (table.value_si[i] < from || table.value_si[i] > to) continue;
        if (!table.converged[i])
            throw spinflip::config::ConfigError("slope: unconverged row at value " +
                                                std::to_string(table.value_si[i]));
        x.push_back(table.value_si[i]);
        y.push_back(table.lifetime_s[i]);
    }
    spinflip::slope::SlopeFit fit = spinflip::slope::fit_loglog_slope(x, y, from, to);
    std::printf("slope = %.12g +- %.12g   (intercept %.12g, %d points)\n", fit.slope,
                fit.std_error, fit.intercept, fit.points_used);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-flip lifetimes of a trapped atom near a two-layer cylindrical wire"};
    app.require_subcommand(1);

    std::string config_path, preset_name, param, out_path = "-", in_path, overlay_path;
    double from = 0.0, to = 0.0;
    int points = 0, workers = 0;
    bool as_json = false, log_spacing = false;
    std::optional<double> temperature, distance;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("--temperature", temperature, "override temperature [K]");
        cmd->add_option("--workers", workers, "worker threads (default SPINFLIP_WORKERS)");
    };

    CLI::App* rate_cmd = app.add_subcommand("rate", "single-point lifetime");
    add_common(rate_cmd);
    rate_cmd->add_option("--distance", distance, "override atom-surface distance [m]");
    rate_cmd->add_flag("--json", as_json, "emit JSON instead of text");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep to CSV");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--preset", preset_name, "fig2 | fig3 | fig4 | fig5");
    sweep_cmd->add_option("--param", param,
                          "distance | skin_depth_2 | outer_radius | joint_scale");
    sweep_cmd->add_option("--from", from, "sweep start (SI)");
    sweep_cmd->add_option("--to", to, "sweep end (SI)");
    sweep_cmd->add_option("--points", points, "grid points (endpoint-inclusive)");
    sweep_cmd->add_flag("--log", log_spacing, "logarithmic spacing");
    sweep_cmd->add_option("--out", out_path, "output CSV path ('-' for stdout)");
    sweep_cmd->add_option("--overlay", overlay_path,
                          "user CSV appended as comments (plotting convenience)");

    CLI::App* slope_cmd = app.add_subcommand("slope", "log-log slope of a sweep CSV");
    slope_cmd->add_option("--in", in_path, "input CSV")->required();
    slope_cmd->add_option("--from", from, "range start (SI)")->required();
    slope_cmd->add_option("--to", to, "range end (SI)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rate_cmd->parsed())
            return run_rate(config_path, as_json, temperature, distance, workers);
        if (sweep_cmd->parsed()) {
            if (preset_name.empty() == param.empty()) {
                std::fprintf(stderr, "error: give exactly one of --preset / --param\n");
                return kExitConfig;
            }
            return run_sweep_cmd(config_path, preset_name, param, from, to, points, log_spacing,
                                 out_path, overlay_path, temperature, workers);
        }
        if (slope_cmd->parsed()) return run_slope(in_path, from, to);
    } catch (const spinflip::config::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDegraded;
    }
    return kExitConfig;
}
