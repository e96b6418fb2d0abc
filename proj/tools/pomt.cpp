// pomt: command-line front end for the transducer model.

#include "pomt/pomt.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef POMT_DATA_DIR
#define POMT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pomt;

namespace {

struct GridSpec {
    std::optional<double> start;
    std::optional<double> stop;
    std::optional<std::size_t> points;

    bool any() const { return start || stop || points; }
};

struct Options {
    std::string params_path;
    std::string preset = "nominal";
    std::string out;
    GridSpec grid;
    GridSpec grid2;
    std::optional<double> pump_offset_hz;

    // rings
    double round_trip_time = 1e-11;
    std::optional<double> ring_coupling_hz;
    double ring_loss = 0.999;
    double ring_bus = 0.1;
    std::optional<double> ring_drop;
    int order_min = 0;
    int order_max = 2;

    // materials
    std::string data_path = std::string(POMT_DATA_DIR) + "/materials.csv";
    std::string rank_by = "em";
    std::vector<std::string> fab;

    // coupling
    std::string em_path;
    std::string mech_path;
    std::string material;
    std::optional<double> em_frequency_hz;
    std::optional<double> mech_frequency_hz;
};

double round12(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

/// Rounds every number in a JSON tree to the 12 digits used in CSV output.
json rounded(json j) {
    if (j.is_number_float()) return round12(j.get<double>());
    if (j.is_object() || j.is_array())
        for (auto& v : j) v = rounded(v);
    return j;
}

std::string dump(const json& j) { return rounded(j).dump(2) + "\n"; }

TransducerParams resolve_params(const Options& o) {
    const auto base = o.params_path.empty() ? TransducerParams::nominal() : load_params(o.params_path);
    return apply_preset(base, o.preset);
}

json params_record(const Options& o, const TransducerParams& p) {
    return json{{"preset", o.preset}, {"params_file", o.params_path}, {"parameters", params_to_json(p)}};
}

fs::path sidecar_path(const std::string& out) {
    fs::path p(out);
    p.replace_extension(".json");
    return p;
}

/// Primary output to --out (or stdout); sidecar next to it when writing a file.
void emit(const Options& o, const std::string& primary, const std::optional<json>& sidecar) {
    if (o.out.empty()) {
        std::cout << primary;
        if (sidecar) std::cout << dump(*sidecar);
        return;
    }
    write_file_atomic(o.out, primary);
    if (sidecar) write_file_atomic(sidecar_path(o.out), dump(*sidecar));
}

std::vector<double> grid_from(const GridSpec& g, double start, double stop, std::size_t points, bool log) {
    const double a = g.start.value_or(start);
    const double b = g.stop.value_or(stop);
    const std::size_t n = g.points.value_or(points);
    if (!(b > a)) throw ValidationError("grid stop must exceed grid start");
    return log ? log_grid(a, b, n) : linear_grid(a, b, n);
}

int run_efficiency_curve(const Options& o) {
    const auto p = resolve_params(o);
    std::optional<double> offset;
    if (o.pump_offset_hz) offset = units::hz_to_rad(*o.pump_offset_hz);
    // Default: three decades either side of the power reaching the critical photon number.
    const double critical_power = critical_photon_number(p) / pump_power_to_photons(p, 1.0, offset);
    const auto powers = grid_from(o.grid, critical_power * 1e-3, critical_power * 1e3, 141, true);
    const auto curve = power_curve(p, powers, offset);
    auto side = params_record(o, p);
    side["peak_power_w"] = curve.peak_power;
    side["peak_efficiency"] = curve.peak_efficiency;
    side["critical_photon_number"] = critical_photon_number(p);
    side["critical_power_w"] = critical_power;
    side["max_efficiency"] = max_efficiency(p);
    emit(o, to_csv(curve.table), side);
    return 0;
}

int run_spectrum(const Options& o) {
    const auto p = resolve_params(o);
    const double fm = units::rad_to_hz(p.mechanical_frequency);
    const auto hz = grid_from(o.grid, fm - 20e6, fm + 20e6, 4001, false);
    std::vector<double> omega;
    for (double f : hz) omega.push_back(units::hz_to_rad(f));
    const auto s = efficiency_spectrum(p, omega);
    auto side = params_record(o, p);
    side["peak_shift_mhz"] = units::rad_to_mhz(s.peak_shift);
    side["fwhm_mhz"] = units::rad_to_mhz(s.fwhm);
    side["broad_peak"] = s.broad_peak;
    side["peak_efficiency"] = s.peak_efficiency;
    side["intra_ring_photons"] = s.intra_ring_photons;
    emit(o, to_csv(to_sweep(s)), side);
    return 0;
}

json optimize_record(const Options& o, const TransducerParams& p) {
    const double n = critical_photon_number(p);
    const auto c = cooperativities(OperatingPoint{p, n, 0.0});
    const auto th = kappa_ex2_threshold(p);
    auto j = params_record(o, p);
    j["critical_photon_number"] = n;
    j["max_efficiency"] = max_efficiency(p);
    j["cooperativities"] = {{"C_OM", c.optomechanical},
                            {"C_12", c.inter_ring},
                            {"F_2", c.bus_extraction},
                            {"F_m", c.mechanical_extraction}};
    j["kappa_ex2_threshold"] = {{"threshold", th.threshold}, {"monotone_increasing", th.monotone_increasing}};
    return j;
}

int run_optimize(const Options& o) {
    const auto p = resolve_params(o);
    const auto j = optimize_record(o, p);
    if (o.out.empty()) std::cout << dump(j);
    else write_file_atomic(o.out, dump(j));
    return 0;
}

int run_contour(const Options& o) {
    const auto p = resolve_params(o);
    // Default axes: two decades either side of the base values, base values exactly on the grid.
    auto axis = [](const GridSpec& g, double base) {
        if (!g.any()) return log_grid_around(base, 2.0, 20);
        if (!g.start || !g.stop) throw ValidationError("contour grids need both start and stop");
        auto hz = grid_from(g, 0.0, 0.0, 41, true);
        for (auto& v : hz) v = units::hz_to_rad(v);
        return hz;
    };
    const auto gem_rad = axis(o.grid, p.electromechanical_coupling);
    const auto kex_rad = axis(o.grid2, p.bus_coupling);
    const auto c = max_efficiency_contour(p, gem_rad, kex_rad);
    auto side = params_record(o, p);
    side["gem_points"] = gem_rad.size();
    side["kex2_points"] = kex_rad.size();
    emit(o, to_csv(to_sweep(c)), side);
    return 0;
}

int run_rings(const Options& o) {
    rings::RingPair rp;
    rp.round_trip_time = o.round_trip_time;
    rp.coupling = o.ring_coupling_hz ? units::hz_to_rad(*o.ring_coupling_hz) : units::pi * 3.285e9;
    rp.loss = o.ring_loss;
    rp.bus_coupling = o.ring_bus;
    rp.drop_coupling = o.ring_drop;
    rings::validate(rp);
    const double fsr_hz = units::rad_to_hz(rp.free_spectral_range());
    const auto hz = grid_from(o.grid, 0.0, 2.0 * fsr_hz, 20001, false);
    std::vector<double> omega;
    for (double f : hz) omega.push_back(units::hz_to_rad(f));
    const auto table = rings::transmission_spectrum(rp, omega);
    json crit = json::array();
    for (const auto& cf : rings::critical_frequencies(rp, o.order_min, o.order_max))
        crit.push_back({{"frequency_hz", units::rad_to_hz(cf.omega)},
                        {"kind", rings::to_string(cf.kind)},
                        {"order", cf.order}});
    json side{{"round_trip_time_s", rp.round_trip_time},
              {"coupling_hz", units::rad_to_hz(rp.coupling)},
              {"loss", rp.loss},
              {"bus_coupling", rp.bus_coupling},
              {"free_spectral_range_hz", fsr_hz},
              {"critical_frequencies", crit}};
    if (rp.drop_coupling) side["drop_coupling"] = *rp.drop_coupling;
    emit(o, to_csv(table), side);
    return 0;
}

int run_materials(const Options& o) {
    const auto records = materials::load_materials(o.data_path);
    materials::FomKind which;
    if (o.rank_by == "em") which = materials::FomKind::em;
    else if (o.rank_by == "om") which = materials::FomKind::om;
    else throw ValidationError("--rank must be em or om");
    std::set<materials::Fab> allowed;
    for (const auto& f : o.fab) allowed.insert(materials::parse_fab(f));
    const auto ranked = materials::rank(records, which, allowed);
    std::ostringstream os;
    os << "rank,name,fom,fab,reason\n";
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        const auto& r = ranked[k];
        os << k + 1 << ',' << materials::detail::quote_if_needed(r.name) << ','
           << (r.fom.defined() ? format_number(*r.fom.value) : "") << ',' << materials::to_string(r.fab) << ','
           << materials::detail::quote_if_needed(r.fom.reason) << '\n';
    }
    emit(o, os.str(), std::nullopt);
    return 0;
}

int run_coupling(const Options& o) {
    using namespace pomt::coupling;
    if (o.em_path.empty() || o.mech_path.empty()) throw ValidationError("--em and --mech are required");
    auto e = load_mode_field(o.em_path, ModeKind::electromagnetic);
    auto w = load_mode_field(o.mech_path, ModeKind::mechanical);
    e.kind = ModeKind::electromagnetic;
    w.kind = ModeKind::mechanical;
    if (o.em_frequency_hz) e.frequency = units::hz_to_rad(*o.em_frequency_hz);
    if (o.mech_frequency_hz) w.frequency = units::hz_to_rad(*o.mech_frequency_hz);
    const auto records = materials::load_materials(o.data_path);
    const materials::MaterialRecord* rec = nullptr;
    for (const auto& r : records)
        if (r.name == o.material) rec = &r;
    if (!rec) throw ValidationError("no material named '" + o.material + "' in " + o.data_path);

    const auto rf = tensor_set_from_record(*rec, Band::rf);
    json out{{"material", rec->name},
             {"em_mode_volume_m3", em_mode_volume(e, rf.eta)},
             {"mech_mode_volume_m3", mech_mode_volume(w)},
             {"effective_mass_kg", effective_mass(normalize_mechanical(w), normalize_mechanical(w), rf.density).real()}};
    auto complex_json = [](Complex z) {
        return json{{"re_hz", units::rad_to_hz(z.real())}, {"im_hz", units::rad_to_hz(z.imag())}};
    };
    try {
        out["piezo_coupling_333"] = complex_json(piezo_coupling(e, w, rf, 3, 3, 3));
    } catch (const ValidationError& err) {
        out["piezo_coupling_333"] = json{{"undefined", err.what()}};
    }
    try {
        const auto ir = tensor_set_from_record(*rec, Band::ir);
        out["optomech_coupling"] = complex_json(optomech_coupling(e, w, ir));
    } catch (const ValidationError& err) {
        out["optomech_coupling"] = json{{"undefined", err.what()}};
    }
    if (o.out.empty()) std::cout << dump(out);
    else write_file_atomic(o.out, dump(out));
    return 0;
}

int exit_code(ErrorCode c) { return c == ErrorCode::singularity ? 3 : 2; }

void add_model_options(CLI::App* sub, Options& o) {
    sub->add_option("--params", o.params_path, "JSON parameter file (Hz units); defaults to the nominal device");
    sub->add_option("--preset", o.preset, "parameter preset")
        ->check(CLI::IsMember({"nominal", "5kex2", "5gem", "5gem-5kex2-10G", "5gem-5kex2-10G-lowloss",
                               "5gem-5kex2-10G-lowloss-k02"}));
}

void add_out(CLI::App* sub, Options& o) { sub->add_option("--out", o.out, "output file (default stdout)"); }

void add_grid(CLI::App* sub, GridSpec& g, const std::string& prefix, const std::string& unit) {
    sub->add_option("--" + prefix + "-start", g.start, "first grid value (" + unit + ")");
    sub->add_option("--" + prefix + "-stop", g.stop, "last grid value (" + unit + ")");
    sub->add_option("--" + prefix + "-points", g.points, "number of grid points")->check(CLI::Range(2, 10000000));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Piezo-optomechanical transducer model"};
    app.require_subcommand(1);
    Options o;

    auto* curve = app.add_subcommand("efficiency-curve", "on-resonance efficiency versus pump power");
    add_model_options(curve, o);
    add_out(curve, o);
    add_grid(curve, o.grid, "grid", "W, log-spaced");
    curve->add_option("--pump-offset-hz", o.pump_offset_hz, "pump position in the rotating frame (Hz)");

    auto* spectrum = app.add_subcommand("spectrum", "efficiency versus microwave frequency");
    add_model_options(spectrum, o);
    add_out(spectrum, o);
    add_grid(spectrum, o.grid, "grid", "Hz");

    auto* optimize = app.add_subcommand("optimize", "critical photon number and maximum efficiency");
    add_model_options(optimize, o);
    add_out(optimize, o);

    auto* contour = app.add_subcommand("contour", "maximum efficiency over (g_EM, kappa_ex2)");
    add_model_options(contour, o);
    add_out(contour, o);
    add_grid(contour, o.grid, "grid", "g_EM in Hz, log-spaced");
    add_grid(contour, o.grid2, "grid2", "kappa_ex2 in Hz, log-spaced");

    auto* ring = app.add_subcommand("rings", "coupled-ring transmission and critical frequencies");
    add_out(ring, o);
    add_grid(ring, o.grid, "grid", "Hz");
    ring->add_option("--round-trip-time", o.round_trip_time, "round-trip time T (s)");
    ring->add_option("--coupling-hz", o.ring_coupling_hz, "inter-ring coupling J (Hz)");
    ring->add_option("--loss", o.ring_loss, "round-trip amplitude transmission");
    ring->add_option("--bus-coupling", o.ring_bus, "bus field cross-coupling");
    ring->add_option("--drop-coupling", o.ring_drop, "drop-port field cross-coupling on ring 1");
    ring->add_option("--order-min", o.order_min, "lowest resonance order");
    ring->add_option("--order-max", o.order_max, "highest resonance order");

    auto* mats = app.add_subcommand("materials", "rank the materials dataset by figure of merit");
    add_out(mats, o);
    mats->add_option("--data", o.data_path, "materials CSV");
    mats->add_option("--rank", o.rank_by, "em or om")->check(CLI::IsMember({"em", "om"}));
    mats->add_option("--fab", o.fab, "keep only these fab markers (yes, fc, no)")
        ->check(CLI::IsMember({"yes", "fc", "no"}));

    auto* coup = app.add_subcommand("coupling", "coupling constants from mode-field CSV files");
    add_out(coup, o);
    coup->add_option("--em", o.em_path, "electromagnetic mode field CSV")->required();
    coup->add_option("--mech", o.mech_path, "mechanical mode field CSV")->required();
    coup->add_option("--material", o.material, "material name in the dataset")->required();
    coup->add_option("--data", o.data_path, "materials CSV");
    coup->add_option("--em-frequency-hz", o.em_frequency_hz, "override the EM mode frequency");
    coup->add_option("--mech-frequency-hz", o.mech_frequency_hz, "override the mechanical mode frequency");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: validation: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*curve) return run_efficiency_curve(o);
        if (*spectrum) return run_spectrum(o);
        if (*optimize) return run_optimize(o);
        if (*contour) return run_contour(o);
        if (*ring) return run_rings(o);
        if (*mats) return run_materials(o);
        if (*coup) return run_coupling(o);
    } catch (const pomt::Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
