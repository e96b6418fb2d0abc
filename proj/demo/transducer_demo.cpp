// Walks the nominal device through the main model entry points.

#include "pomt/pomt.hpp"

#include <cstdio>
#include <string>

int main() {
    using namespace pomt;
    const auto p = TransducerParams::nominal();
    const auto rates = derived_rates(p);
    std::printf("gamma_m / 2pi        = %.4f MHz\n", units::rad_to_mhz(rates.mechanical_linewidth));
    std::printf("gamma_ex / 2pi       = %.4f MHz (derived %.4f MHz)\n",
                units::rad_to_mhz(rates.external_mechanical_coupling), units::rad_to_mhz(rates.external_coupling_derived));

    const auto op = critical_operating_point(p);
    const auto c = cooperativities(op);
    std::printf("critical |a_1|^2     = %.6e\n", op.intra_ring_photons);
    std::printf("C_OM = %.4g  C_12 = %.4g  F_2 = %.4f  F_m = %.4f\n", c.optomechanical, c.inter_ring,
                c.bus_extraction, c.mechanical_extraction);

    const double w = p.mechanical_frequency + units::hz_to_rad(1e6);
    std::printf("G(w_m + 1 MHz): closed form %.12f, Mason %.12f\n", std::abs(transduction_amplitude(op, w)),
                std::abs(transduction_amplitude_mason(op, w)));

    std::printf("\n%-28s %10s\n", "preset", "max eta");
    for (auto preset : all_presets)
        std::printf("%-28s %10.4f\n", std::string(preset_name(preset)).c_str(), max_efficiency(apply_preset(p, preset)));

    const auto split = enhancement_resonances(p);
    std::printf("\nsplit resonances at %.6f and %.6f GHz, peak enhancement %.4e\n", units::rad_to_hz(split.lower) * 1e-9,
                units::rad_to_hz(split.upper) * 1e-9, enhancement_factor_peak(p));
    return 0;
}
