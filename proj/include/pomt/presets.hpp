#pragma once

// Named parameter transforms of a base record: the coupling-enhancement cases
// used for the efficiency curves, spectra and shift/bandwidth table.

#include "pomt/dynamics.hpp"
#include "pomt/error.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace pomt {

enum class Preset {
    nominal,
    bus_x5,                        // 5 kappa_ex,2
    piezo_x5,                      // 5 g_EM
    piezo_bus_x5_om_x10,           // 5 g_EM, 5 kappa_ex,2, 10 G
    piezo_bus_x5_om_x10_lowloss,   // ... and 0.1 gamma_0, 0.1 kappa_1
    piezo_bus_x5_om_x10_lowloss_k02,  // ... and also 0.1 kappa_0,2
};

struct PresetMultipliers {
    double electromechanical_coupling = 1.0;
    double bus_coupling = 1.0;
    double optomechanical_coupling = 1.0;
    double mechanical_intrinsic_loss = 1.0;
    double ring1_linewidth = 1.0;
    double ring2_intrinsic_linewidth = 1.0;
};

inline constexpr std::array<Preset, 6> all_presets{
    Preset::nominal,
    Preset::bus_x5,
    Preset::piezo_x5,
    Preset::piezo_bus_x5_om_x10,
    Preset::piezo_bus_x5_om_x10_lowloss,
    Preset::piezo_bus_x5_om_x10_lowloss_k02,
};

inline constexpr std::string_view preset_name(Preset p) noexcept {
    switch (p) {
    case Preset::nominal: return "nominal";
    case Preset::bus_x5: return "5kex2";
    case Preset::piezo_x5: return "5gem";
    case Preset::piezo_bus_x5_om_x10: return "5gem-5kex2-10G";
    case Preset::piezo_bus_x5_om_x10_lowloss: return "5gem-5kex2-10G-lowloss";
    case Preset::piezo_bus_x5_om_x10_lowloss_k02: return "5gem-5kex2-10G-lowloss-k02";
    }
    return "nominal";
}

inline Preset parse_preset(std::string_view name) {
    for (auto p : all_presets)
        if (preset_name(p) == name) return p;
    throw ValidationError("unknown preset '" + std::string(name) + "'");
}

inline constexpr PresetMultipliers multipliers(Preset p) noexcept {
    PresetMultipliers m;
    switch (p) {
    case Preset::nominal: break;
    case Preset::bus_x5: m.bus_coupling = 5.0; break;
    case Preset::piezo_x5: m.electromechanical_coupling = 5.0; break;
    case Preset::piezo_bus_x5_om_x10_lowloss_k02:
        m.ring2_intrinsic_linewidth = 0.1;
        [[fallthrough]];
    case Preset::piezo_bus_x5_om_x10_lowloss:
        m.mechanical_intrinsic_loss = 0.1;
        m.ring1_linewidth = 0.1;
        [[fallthrough]];
    case Preset::piezo_bus_x5_om_x10:
        m.electromechanical_coupling = 5.0;
        m.bus_coupling = 5.0;
        m.optomechanical_coupling = 10.0;
        break;
    }
    return m;
}

/// Replaces g_EM. A supplied gamma_ex (and gamma_m) was measured for the old
/// g_EM, so any actual change drops them and they are re-derived.
inline TransducerParams with_electromechanical_coupling(TransducerParams p, double g_em) {
    if (g_em != p.electromechanical_coupling) {
        p.external_mechanical_coupling.reset();
        p.mechanical_linewidth.reset();
    }
    p.electromechanical_coupling = g_em;
    return p;
}

inline TransducerParams apply_multipliers(TransducerParams p, const PresetMultipliers& m) {
    p = with_electromechanical_coupling(p, p.electromechanical_coupling * m.electromechanical_coupling);
    if (m.mechanical_intrinsic_loss != 1.0) p.mechanical_linewidth.reset();
    p.bus_coupling *= m.bus_coupling;
    p.optomechanical_coupling *= m.optomechanical_coupling;
    p.mechanical_intrinsic_loss *= m.mechanical_intrinsic_loss;
    p.ring1_linewidth *= m.ring1_linewidth;
    p.ring2_intrinsic_linewidth *= m.ring2_intrinsic_linewidth;
    return p;
}

inline TransducerParams apply_preset(const TransducerParams& base, Preset preset) {
    return apply_multipliers(base, multipliers(preset));
}

inline TransducerParams apply_preset(const TransducerParams& base, std::string_view name) {
    return apply_preset(base, parse_preset(name));
}

} // namespace pomt
