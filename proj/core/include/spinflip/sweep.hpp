// Parameter sweeps over the rate calculation: the four built-in figure
// presets, custom grids, deterministic parallel evaluation, and CSV output.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spinflip/config.hpp"
#include "spinflip/rate.hpp"

namespace spinflip::sweep {

enum class Parameter { distance, skin_depth_2, outer_radius, joint_scale };

std::string to_string(Parameter p);
Parameter parameter_from_string(const std::string& s);

/// Grid plus coupling rules. Couplings keep dependent lengths tied to the
/// swept one (a1 = ratio * a2 for radius sweeps, a2 = ratio * r for the
/// joint scaling).
struct SweepSpec {
    Parameter parameter = Parameter::distance;
    double from = 0.0;
    double to = 0.0;
    int points = 0;
    bool log_spacing = true;
    bool couple_a1_to_a2 = false;
    double a1_over_a2 = 185.0 / 240.0;
    bool couple_a2_to_r = false;
    double a2_over_r = 5.0;

    void validate() const;
    std::vector<double> grid() const;     // endpoint-inclusive
};

struct SweepRow {
    double value_si = 0.0;
    rate::RateResult rate{};
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;
    bool all_converged = true;

    std::vector<double> values() const;
    std::vector<double> lifetimes() const;
};

/// Built-in sweep presets. fig2 sweeps the atom-surface
/// distance (solid-curve temperature 380 K), fig3 the coating skin depth at
/// r = 50 um, fig4 scales r, a1, a2 jointly (a2 = 5r), fig5 the outer
/// radius at fixed r = 50 um; fig3/4/5 run at 300 K.
struct Preset {
    SweepSpec spec;
    double temperature_k = 300.0;
};
Preset preset(const std::string& name);

/// Applies one grid value to a base configuration (geometry couplings and
/// the skin-depth material override).
config::RunConfig apply_parameter(const config::RunConfig& base, const SweepSpec& spec,
                                  double value);

/// Worker-count resolution: an explicit request wins, then the
/// SPINFLIP_WORKERS environment variable, then hardware concurrency.
int decide_workers(int requested);

/// Evaluates the grid with `workers` threads (0 = SPINFLIP_WORKERS or
/// hardware concurrency); rows are emitted in grid order regardless of
/// schedule. Rows whose mode sum fails to converge are flagged rather than
/// fatal.
SweepResult run_sweep(const SweepSpec& spec, const config::RunConfig& base, int workers = 0);

/// CSV with the fixed header
/// param,value_si,lifetime_s,gamma_free,gamma_wire,n_thermal,gamma_total,modes_used,converged
/// and 12 significant digits.
void write_csv(std::ostream& out, const SweepResult& result);

struct CsvTable {
    std::string param;
    std::vector<double> value_si, lifetime_s;
    std::vector<bool> converged;
};
CsvTable read_csv(std::istream& in);

} // namespace spinflip::sweep
