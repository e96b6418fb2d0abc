#pragma once

// Flat JSON parameter files. Frequencies are stored in Hz under `<field>_hz`
// keys and converted to rad/s on load; the pump wavelength is in metres.

#include "pomt/dynamics.hpp"
#include "pomt/error.hpp"
#include "pomt/units.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <string>

namespace pomt {

namespace detail {

struct RateField {
    const char* key;
    double TransducerParams::*member;
};

inline constexpr RateField required_rate_fields[] = {
    {"mechanical_frequency_hz", &TransducerParams::mechanical_frequency},
    {"mechanical_intrinsic_loss_hz", &TransducerParams::mechanical_intrinsic_loss},
    {"microwave_intrinsic_linewidth_hz", &TransducerParams::microwave_intrinsic_linewidth},
    {"microwave_linewidth_hz", &TransducerParams::microwave_linewidth},
    {"electromechanical_coupling_hz", &TransducerParams::electromechanical_coupling},
    {"ring_coupling_hz", &TransducerParams::ring_coupling},
    {"ring1_detuning_hz", &TransducerParams::ring1_detuning},
    {"ring2_detuning_hz", &TransducerParams::ring2_detuning},
    {"ring1_linewidth_hz", &TransducerParams::ring1_linewidth},
    {"ring2_intrinsic_linewidth_hz", &TransducerParams::ring2_intrinsic_linewidth},
    {"bus_coupling_hz", &TransducerParams::bus_coupling},
    {"optomechanical_coupling_hz", &TransducerParams::optomechanical_coupling},
};

inline constexpr const char* external_coupling_key = "external_mechanical_coupling_hz";
inline constexpr const char* mechanical_linewidth_key = "mechanical_linewidth_hz";
inline constexpr const char* pump_wavelength_key = "pump_wavelength_m";

inline double number_at(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ValidationError("parameter '" + key + "' must be a number");
    return v.get<double>();
}

} // namespace detail

inline TransducerParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("parameter file must contain a JSON object");
    std::set<std::string> known{detail::external_coupling_key, detail::mechanical_linewidth_key,
                                detail::pump_wavelength_key};
    for (const auto& f : detail::required_rate_fields) known.insert(f.key);
    for (const auto& item : j.items())
        if (!known.count(item.key())) throw ValidationError("unknown parameter key '" + item.key() + "'");

    TransducerParams p;
    for (const auto& f : detail::required_rate_fields) {
        if (!j.contains(f.key)) throw ValidationError(std::string("missing parameter key '") + f.key + "'");
        p.*f.member = units::hz_to_rad(detail::number_at(j, f.key));
    }
    if (j.contains(detail::external_coupling_key))
        p.external_mechanical_coupling = units::hz_to_rad(detail::number_at(j, detail::external_coupling_key));
    if (j.contains(detail::mechanical_linewidth_key))
        p.mechanical_linewidth = units::hz_to_rad(detail::number_at(j, detail::mechanical_linewidth_key));
    if (j.contains(detail::pump_wavelength_key))
        p.pump_wavelength = detail::number_at(j, detail::pump_wavelength_key);
    validate(p);
    return p;
}

inline nlohmann::json params_to_json(const TransducerParams& p) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : detail::required_rate_fields) j[f.key] = units::rad_to_hz(p.*f.member);
    if (p.external_mechanical_coupling)
        j[detail::external_coupling_key] = units::rad_to_hz(*p.external_mechanical_coupling);
    if (p.mechanical_linewidth)
        j[detail::mechanical_linewidth_key] = units::rad_to_hz(*p.mechanical_linewidth);
    if (p.pump_wavelength) j[detail::pump_wavelength_key] = *p.pump_wavelength;
    return j;
}

inline TransducerParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open parameter file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("parameter file '" + path + "': " + e.what());
    }
    return params_from_json(j);
}

} // namespace pomt
