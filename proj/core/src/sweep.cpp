#include "spinflip/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace spinflip::sweep {

std::string to_string(Parameter p) {
    switch (p) {
        case Parameter::distance: return "distance";
        case Parameter::skin_depth_2: return "skin_depth_2";
        case Parameter::outer_radius: return "outer_radius";
        case Parameter::joint_scale: return "joint_scale";
    }
    return "?";
}

Parameter parameter_from_string(const std::string& s) {
    if (s == "distance") return Parameter::distance;
    if (s == "skin_depth_2") return Parameter::skin_depth_2;
    if (s == "outer_radius") return Parameter::outer_radius;
    if (s == "joint_scale") return Parameter::joint_scale;
    throw std::invalid_argument("sweep: unknown parameter '" + s + "'");
}

void SweepSpec::validate() const {
    if (!(from < to)) throw std::invalid_argument("sweep: requires from < to");
    if (points < 2) throw std::invalid_argument("sweep: requires points >= 2");
    if (log_spacing && !(from > 0))
        throw std::invalid_argument("sweep: log spacing requires from > 0");
}

std::vector<double> SweepSpec::grid() const {
    validate();
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        double t = double(i) / double(points - 1);
        g[i] = log_spacing ? from * std::pow(to / from, t) : from + (to - from) * t;
    }
    g.back() = to;   // endpoint-inclusive, exactly
    return g;
}

std::vector<double> SweepResult::values() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.value_si);
    return v;
}

std::vector<double> SweepResult::lifetimes() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.rate.lifetime);
    return v;
}

Preset preset(const std::string& name) {
    Preset p;
    if (name == "fig2") {
        p.spec.parameter = Parameter::distance;
        p.spec.from = 20e-6;
        p.spec.to = 1000e-6;
        p.spec.points = 40;
        p.temperature_k = 380.0;
    } else if (name == "fig3") {
        p.spec.parameter = Parameter::skin_depth_2;
        p.spec.from = 1e-6;
        p.spec.to = 1e-2;
        p.spec.points = 53;
        p.temperature_k = 300.0;
    } else if (name == "fig4") {
        p.spec.parameter = Parameter::joint_scale;
        p.spec.from = 0.2e-6;
        p.spec.to = 1000e-6;
        p.spec.points = 46;
        p.spec.couple_a2_to_r = true;
        p.spec.couple_a1_to_a2 = true;
        p.temperature_k = 300.0;
    } else if (name == "fig5") {
        p.spec.parameter = Parameter::outer_radius;
        p.spec.from = 0.5e-6;
        p.spec.to = 1e-2;
        p.spec.points = 45;
        p.spec.couple_a1_to_a2 = true;
        p.temperature_k = 300.0;
    } else {
        throw std::invalid_argument("sweep: unknown preset '" + name + "'");
    }
    return p;
}

config::RunConfig apply_parameter(const config::RunConfig& base, const SweepSpec& spec,
                                  double value) {
    config::RunConfig c = base;
    auto scale_radii = [&](double a2) {
        c.coating.outer_radius = a2;
        if (spec.couple_a1_to_a2) c.core.outer_radius = spec.a1_over_a2 * a2;
    };
    switch (spec.parameter) {
        case Parameter::distance:
            c.surface_distance_m = value;
            break;
        case Parameter::skin_depth_2: {
            // override the coating material by its skin depth
            double k0 = c.transition().k3(c.constants);
            c.coating.resistivity.reset();
            c.coating.rel_permittivity = stack::rel_permittivity(value, k0);
            break;
        }
        case Parameter::outer_radius:
            scale_radii(value);
            break;
        case Parameter::joint_scale:
            c.surface_distance_m = value;
            scale_radii(spec.a2_over_r * value);
            break;
    }
    return c;
}

int decide_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPINFLIP_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) return w;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

SweepResult run_sweep(const SweepSpec& spec, const config::RunConfig& base, int workers) {
    SweepResult result;
    result.spec = spec;
    std::vector<double> grid = spec.grid();
    result.rows.resize(grid.size());

    std::atomic<size_t> next{0};
    std::atomic<bool> all_ok{true};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            SweepRow& row = result.rows[i];
            row.value_si = grid[i];
            try {
                config::RunConfig c = apply_parameter(base, spec, grid[i]);
                try {
                    row.rate = rate::total_rate(c.wire(), c.transition(), c.field_point(),
                                                c.numerics, c.constants);
                } catch (const rate::TruncationError& e) {
                    row.rate = rate::compose_total(
                        rate::gamma_free(c.transition(), c.constants), e.partial,
                        rate::thermal_occupation(c.transition(), c.constants));
                    row.rate.converged = false;
                }
                if (!row.rate.converged) all_ok = false;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                all_ok = false;
            }
        }
    };

    int n_workers = std::min<int>(decide_workers(workers), int(grid.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    result.all_converged = all_ok.load();
    return result;
}

void write_csv(std::ostream& out, const SweepResult& result) {
    out << "param,value_si,lifetime_s,gamma_free,gamma_wire,n_thermal,gamma_total,"
           "modes_used,converged\n";
    const std::string name = to_string(result.spec.parameter);
    char buf[360];
    for (const auto& row : result.rows) {
        const rate::RateResult& r = row.rate;
        std::snprintf(buf, sizeof buf,
                      "%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d,%d\n", name.c_str(),
                      row.value_si, r.lifetime, r.gamma_free, r.gamma_wire, r.n_thermal,
                      r.gamma_total, r.modes_used, int(r.converged));
        out << buf;
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("csv: empty input");
    if (line.rfind("param,value_si,lifetime_s", 0) != 0)
        throw std::invalid_argument("csv: unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9)
            throw std::invalid_argument("csv: malformed row '" + line + "'");
        if (t.param.empty()) t.param = fields[0];
        t.value_si.push_back(std::stod(fields[1]));
        t.lifetime_s.push_back(std::stod(fields[2]));
        t.converged.push_back(fields[8] == "1");
    }
    return t;
}

} // namespace spinflip::sweep
