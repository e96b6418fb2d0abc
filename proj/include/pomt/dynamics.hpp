#pragma once

// Linearized frequency-domain model of the piezo-optomechanical transducer.
//
// Conventions: every rate and frequency is an angular frequency in rad/s,
// expressed in the frame rotating with the pump laser. The pump sits at 0 and
// the transduced signal near omega_m; both ring detunings default to omega_m.

#include "pomt/error.hpp"
#include "pomt/sfg.hpp"
#include "pomt/units.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>

namespace pomt {

using Complex = std::complex<double>;

/// Rate and detuning set of the transducer (rad/s unless noted).
struct TransducerParams {
    double mechanical_frequency = 0.0;            // omega_m
    double mechanical_intrinsic_loss = 0.0;       // gamma_0
    double microwave_intrinsic_linewidth = 0.0;   // Gamma_0
    double microwave_linewidth = 0.0;             // Gamma (total)
    double electromechanical_coupling = 0.0;      // g_EM
    /// gamma_ex: measured microwave-to-mechanics external coupling. When unset
    /// it is derived from g_EM and the microwave linewidths.
    std::optional<double> external_mechanical_coupling;
    double ring_coupling = 0.0;                   // J
    double ring1_detuning = 0.0;                  // Delta_1
    double ring2_detuning = 0.0;                  // Delta_2
    double ring1_linewidth = 0.0;                 // kappa_1 (= kappa_0,1)
    double ring2_intrinsic_linewidth = 0.0;       // kappa_0,2
    double bus_coupling = 0.0;                    // kappa_ex,2
    double optomechanical_coupling = 0.0;         // single-photon G
    std::optional<double> pump_wavelength;        // m, only for power mapping
    /// Optional measured total mechanical linewidth, cross-checked against
    /// gamma_0 + 4 g_EM^2 / Gamma.
    std::optional<double> mechanical_linewidth;

    bool operator==(const TransducerParams&) const = default;

    /// Nominal device parameters (HBAR-based transducer, pump at 1550 nm).
    static TransducerParams nominal() {
        using units::hz_to_rad;
        TransducerParams p;
        p.mechanical_frequency = hz_to_rad(3.285e9);
        p.mechanical_intrinsic_loss = hz_to_rad(2.6e6);
        p.microwave_intrinsic_linewidth = hz_to_rad(500e6);
        p.microwave_linewidth = hz_to_rad(15e9);
        p.electromechanical_coupling = hz_to_rad(100.6e6);
        p.external_mechanical_coupling = hz_to_rad(2.98e6);
        p.ring_coupling = units::pi * 3.285e9;
        p.ring1_detuning = hz_to_rad(3.285e9);
        p.ring2_detuning = hz_to_rad(3.285e9);
        p.ring1_linewidth = hz_to_rad(25e6);
        p.ring2_intrinsic_linewidth = hz_to_rad(25e6);
        p.bus_coupling = hz_to_rad(125e6);
        p.optomechanical_coupling = hz_to_rad(400.0);
        p.pump_wavelength = 1550e-9;
        return p;
    }
};

struct DerivedRates {
    double mechanical_linewidth;          // gamma_m = gamma_0 + 4 g_EM^2 / Gamma
    double ring2_linewidth;               // kappa_2 = kappa_0,2 + kappa_ex,2
    double external_mechanical_coupling;  // gamma_ex actually used
    double external_coupling_derived;     // 4 g_EM^2 (Gamma - Gamma_0) / Gamma^2
    bool external_coupling_supplied;
    /// (supplied - derived) / derived, when gamma_ex was supplied and derived > 0.
    std::optional<double> external_coupling_discrepancy;
};

inline void validate(const TransducerParams& p) {
    auto non_negative = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError(std::string(name) + " must be a finite non-negative rate");
    };
    non_negative(p.mechanical_intrinsic_loss, "mechanical_intrinsic_loss");
    non_negative(p.microwave_intrinsic_linewidth, "microwave_intrinsic_linewidth");
    non_negative(p.microwave_linewidth, "microwave_linewidth");
    non_negative(p.electromechanical_coupling, "electromechanical_coupling");
    non_negative(p.ring_coupling, "ring_coupling");
    non_negative(p.ring1_linewidth, "ring1_linewidth");
    non_negative(p.ring2_intrinsic_linewidth, "ring2_intrinsic_linewidth");
    non_negative(p.bus_coupling, "bus_coupling");
    non_negative(p.optomechanical_coupling, "optomechanical_coupling");
    if (!std::isfinite(p.ring1_detuning) || !std::isfinite(p.ring2_detuning))
        throw ValidationError("ring detunings must be finite");
    if (!(p.mechanical_frequency > 0.0) || !std::isfinite(p.mechanical_frequency))
        throw ValidationError("mechanical_frequency must be positive");
    if (!(p.microwave_linewidth > 0.0))
        throw ValidationError("microwave_linewidth must be positive");
    if (p.microwave_linewidth < p.microwave_intrinsic_linewidth)
        throw ValidationError("microwave_linewidth must be >= microwave_intrinsic_linewidth");
    if (!(p.ring1_linewidth > 0.0)) throw ValidationError("ring1_linewidth must be positive");
    if (!(p.ring2_intrinsic_linewidth + p.bus_coupling > 0.0))
        throw ValidationError("ring 2 total linewidth must be positive");

    const double g = p.electromechanical_coupling;
    const double gamma_m = p.mechanical_intrinsic_loss + 4.0 * g * g / p.microwave_linewidth;
    if (!(gamma_m > 0.0)) throw ValidationError("total mechanical linewidth must be positive");
    if (p.mechanical_linewidth) {
        if (std::abs(*p.mechanical_linewidth - gamma_m) > 0.02 * gamma_m) {
            std::ostringstream os;
            os << "supplied mechanical_linewidth " << *p.mechanical_linewidth
               << " rad/s differs from gamma_0 + 4 g_EM^2/Gamma = " << gamma_m << " rad/s by more than 2%";
            throw ValidationError(os.str());
        }
    }
    if (p.external_mechanical_coupling) {
        non_negative(*p.external_mechanical_coupling, "external_mechanical_coupling");
        if (*p.external_mechanical_coupling > gamma_m)
            throw ValidationError("external_mechanical_coupling exceeds the total mechanical linewidth");
    }
    if (p.pump_wavelength && !(*p.pump_wavelength > 0.0))
        throw ValidationError("pump_wavelength must be positive");
}

inline DerivedRates derived_rates(const TransducerParams& p) {
    validate(p);
    const double g = p.electromechanical_coupling;
    const double big_gamma = p.microwave_linewidth;
    DerivedRates r{};
    r.mechanical_linewidth = p.mechanical_intrinsic_loss + 4.0 * g * g / big_gamma;
    r.ring2_linewidth = p.ring2_intrinsic_linewidth + p.bus_coupling;
    r.external_coupling_derived =
        4.0 * g * g * (big_gamma - p.microwave_intrinsic_linewidth) / (big_gamma * big_gamma);
    r.external_coupling_supplied = p.external_mechanical_coupling.has_value();
    r.external_mechanical_coupling =
        p.external_mechanical_coupling.value_or(r.external_coupling_derived);
    if (r.external_coupling_supplied && r.external_coupling_derived > 0.0)
        r.external_coupling_discrepancy =
            (*p.external_mechanical_coupling - r.external_coupling_derived) / r.external_coupling_derived;
    return r;
}

/// Lorentzian response 1 / (-i (omega - center) + halfwidth).
struct Susceptibility {
    double center;
    double halfwidth;

    Susceptibility(double center_, double halfwidth_) : center(center_), halfwidth(halfwidth_) {
        if (!(halfwidth > 0.0)) throw ValidationError("susceptibility halfwidth must be positive");
    }

    Complex operator()(double omega) const {
        return 1.0 / Complex(halfwidth, -(omega - center));
    }
};

inline Susceptibility mechanical_susceptibility(const TransducerParams& p) {
    return {p.mechanical_frequency, derived_rates(p).mechanical_linewidth / 2.0};
}
inline Susceptibility ring1_susceptibility(const TransducerParams& p) {
    return {p.ring1_detuning, p.ring1_linewidth / 2.0};
}
inline Susceptibility ring2_susceptibility(const TransducerParams& p) {
    return {p.ring2_detuning, derived_rates(p).ring2_linewidth / 2.0};
}
/// Broadband limit of the microwave cavity response, 2 / Gamma.
inline double microwave_susceptibility(const TransducerParams& p) {
    return 2.0 / p.microwave_linewidth;
}

/// Parameters plus the intra-ring pump field.
struct OperatingPoint {
    TransducerParams params;
    double intra_ring_photons = 0.0;  // |a_1|^2
    double pump_phase = 0.0;          // arg(a_1), rad

    Complex pump_amplitude() const { return std::polar(std::sqrt(intra_ring_photons), pump_phase); }
};

inline void validate(const OperatingPoint& op) {
    validate(op.params);
    if (!(op.intra_ring_photons >= 0.0) || !std::isfinite(op.intra_ring_photons))
        throw ValidationError("intra_ring_photons must be finite and non-negative");
    if (!std::isfinite(op.pump_phase)) throw ValidationError("pump_phase must be finite");
}

namespace detail {

struct ModelTerms {
    Complex chi_m, chi_1, chi_2;
    double gamma_ex, kappa_ex2, g_om, j;
    Complex a1;
};

inline ModelTerms model_terms(const OperatingPoint& op, double omega) {
    validate(op);
    const auto& p = op.params;
    const auto rates = derived_rates(p);
    return ModelTerms{
        Susceptibility{p.mechanical_frequency, rates.mechanical_linewidth / 2.0}(omega),
        Susceptibility{p.ring1_detuning, p.ring1_linewidth / 2.0}(omega),
        Susceptibility{p.ring2_detuning, rates.ring2_linewidth / 2.0}(omega),
        rates.external_mechanical_coupling,
        p.bus_coupling,
        p.optomechanical_coupling,
        p.ring_coupling,
        op.pump_amplitude(),
    };
}

inline void check_denominator(Complex denom, double loop_sum, double omega) {
    if (!(std::abs(denom) >= 1e-14 * (1.0 + loop_sum))) {
        std::ostringstream os;
        os << "transducer determinant vanishes at omega = " << omega << " rad/s";
        throw SingularityError(os.str(), omega);
    }
}

} // namespace detail

/// Microwave-in to optical-out amplitude G(omega), closed form.
///
/// The two coupling edges b->a_1 and a_1->a_2 each carry a factor i, so the
/// single forward path picks up i*i = -1 relative to the bare product of
/// rates; the sign is kept so this agrees exactly with the graph route.
inline Complex transduction_amplitude(const OperatingPoint& op, double omega) {
    const auto t = detail::model_terms(op, omega);
    const Complex i{0.0, 1.0};
    const Complex loop_om = t.g_om * t.g_om * std::norm(t.a1) * t.chi_1 * t.chi_m;
    const Complex loop_rings = t.j * t.j * t.chi_1 * t.chi_2;
    const Complex denom = 1.0 + loop_om + loop_rings;
    detail::check_denominator(denom, std::abs(loop_om) + std::abs(loop_rings), omega);
    const Complex numer = std::sqrt(t.kappa_ex2) * std::sqrt(t.gamma_ex) * t.chi_1 * t.chi_2 *
                          t.chi_m * (i * t.g_om * t.a1) * (i * t.j);
    return numer / denom;
}

/// Node ids of the transducer signal flow graph.
namespace node {
inline constexpr const char* microwave_in = "c_in";
inline constexpr const char* mechanical_noise = "f_m";
inline constexpr const char* ring1_noise = "f_0_1";
inline constexpr const char* ring2_noise = "f_0_2";
inline constexpr const char* optical_in = "a_in";
inline constexpr const char* mechanics = "b";
inline constexpr const char* ring1 = "a_1";
inline constexpr const char* ring2 = "a_2";
inline constexpr const char* optical_out = "a_out";
} // namespace node

/// Signal flow graph of the linearized transducer: mechanics, both rings, the
/// microwave and optical ports, and the three intrinsic noise inputs.
inline sfg::SignalFlowGraph transducer_graph(const OperatingPoint& op) {
    validate(op);
    const auto& p = op.params;
    const auto rates = derived_rates(p);
    const Susceptibility chi_m{p.mechanical_frequency, rates.mechanical_linewidth / 2.0};
    const Susceptibility chi_1{p.ring1_detuning, p.ring1_linewidth / 2.0};
    const Susceptibility chi_2{p.ring2_detuning, rates.ring2_linewidth / 2.0};
    const Complex i{0.0, 1.0};
    const Complex a1 = op.pump_amplitude();
    const double g_om = p.optomechanical_coupling;
    const double j = p.ring_coupling;
    const double sqrt_gex = std::sqrt(rates.external_mechanical_coupling);
    const double sqrt_g0 = std::sqrt(p.mechanical_intrinsic_loss);
    const double sqrt_k1 = std::sqrt(p.ring1_linewidth);
    const double sqrt_k02 = std::sqrt(p.ring2_intrinsic_linewidth);
    const double sqrt_kex = std::sqrt(p.bus_coupling);

    using sfg::NodeKind;
    sfg::SignalFlowGraph g;
    g.add_node(node::microwave_in, NodeKind::source)
        .add_node(node::mechanical_noise, NodeKind::source)
        .add_node(node::ring1_noise, NodeKind::source)
        .add_node(node::ring2_noise, NodeKind::source)
        .add_node(node::optical_in, NodeKind::source)
        .add_node(node::mechanics)
        .add_node(node::ring1)
        .add_node(node::ring2)
        .add_node(node::optical_out, NodeKind::sink);

    g.add_edge(node::microwave_in, node::mechanics,
               [=](double w) { return sqrt_gex * chi_m(w); }, "sqrt(gamma_ex) chi_m");
    g.add_edge(node::mechanical_noise, node::mechanics,
               [=](double w) { return sqrt_g0 * chi_m(w); }, "sqrt(gamma_0) chi_m");
    g.add_edge(node::mechanics, node::ring1,
               [=](double w) { return i * g_om * a1 * chi_1(w); }, "i G a_1 chi_01");
    g.add_edge(node::ring1, node::mechanics,
               [=](double w) { return i * g_om * std::conj(a1) * chi_m(w); }, "i G a_1* chi_m");
    g.add_edge(node::ring1_noise, node::ring1,
               [=](double w) { return sqrt_k1 * chi_1(w); }, "sqrt(kappa_0,1) chi_01");
    g.add_edge(node::ring1, node::ring2,
               [=](double w) { return i * j * chi_2(w); }, "i J chi_02");
    g.add_edge(node::ring2, node::ring1,
               [=](double w) { return i * j * chi_1(w); }, "i J chi_01");
    g.add_edge(node::ring2_noise, node::ring2,
               [=](double w) { return sqrt_k02 * chi_2(w); }, "sqrt(kappa_0,2) chi_02");
    g.add_edge(node::optical_in, node::ring2,
               [=](double w) { return sqrt_kex * chi_2(w); }, "sqrt(kappa_ex,2) chi_02");
    g.add_edge(node::ring2, node::optical_out,
               [=](double) { return Complex{sqrt_kex, 0.0}; }, "sqrt(kappa_ex,2)");
    g.add_edge(node::optical_in, node::optical_out,
               [](double) { return Complex{-1.0, 0.0}; }, "-1");
    return g;
}

/// Transduction amplitude computed by Mason's rule on transducer_graph().
inline Complex transduction_amplitude_mason(const OperatingPoint& op, double omega) {
    return sfg::mason_gain(transducer_graph(op), node::microwave_in, node::optical_out, omega);
}

/// Transduction efficiency |G(omega)|^2. Values above unity mean the
/// parameter set is not a passive network and raise ModelViolation.
inline double efficiency(const OperatingPoint& op, double omega) {
    const double eta = std::norm(transduction_amplitude(op, omega));
    if (eta > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "transduction efficiency " << eta << " exceeds unity at omega = " << omega
           << " rad/s; check external_mechanical_coupling against the linewidths";
        throw ModelViolation(os.str());
    }
    return eta;
}

/// Intra-ring pump amplitude per unit input amplitude, a_1 / a_in.
inline Complex intra_ring_gain(const TransducerParams& p, double omega) {
    validate(p);
    const auto rates = derived_rates(p);
    const Complex chi_1 = Susceptibility{p.ring1_detuning, p.ring1_linewidth / 2.0}(omega);
    const Complex chi_2 = Susceptibility{p.ring2_detuning, rates.ring2_linewidth / 2.0}(omega);
    const double j = p.ring_coupling;
    const Complex loop = j * j * chi_1 * chi_2;
    const Complex denom = 1.0 + loop;
    detail::check_denominator(denom, std::abs(loop), omega);
    return Complex{0.0, j} * chi_1 * chi_2 * std::sqrt(p.bus_coupling) / denom;
}

/// Peak value of |a_1 / a_in|^2 at the split resonances.
inline double enhancement_factor_peak(const TransducerParams& p) {
    const auto rates = derived_rates(p);
    const double k1 = p.ring1_linewidth;
    const double k2 = rates.ring2_linewidth;
    const double j = p.ring_coupling;
    const double ks = k1 + k2;
    return 64.0 * j * j * p.bus_coupling / (ks * ks * std::abs((k1 - k2) * (k1 - k2) - 16.0 * j * j));
}

struct ResonancePair {
    double lower;
    double upper;
    /// Splitting not resolved (8 J^2 <= kappa_1^2 + kappa_2^2); lower == upper == Delta_1.
    bool degenerate;
};

/// Stationary points of the cavity enhancement factor,
/// Delta_1 +- J sqrt(1 - (kappa_1^2 + kappa_2^2) / (8 J^2)).
inline ResonancePair enhancement_resonances(const TransducerParams& p) {
    const auto rates = derived_rates(p);
    const double k1 = p.ring1_linewidth;
    const double k2 = rates.ring2_linewidth;
    const double j = p.ring_coupling;
    const double ratio = (k1 * k1 + k2 * k2) / (8.0 * j * j);
    if (!(j > 0.0) || ratio >= 1.0) return {p.ring1_detuning, p.ring1_detuning, true};
    const double offset = j * std::sqrt(1.0 - ratio);
    return {p.ring1_detuning - offset, p.ring1_detuning + offset, false};
}

/// Pump photon flux |a_in|^2 (photons/s) for power P (W) at vacuum wavelength lambda (m).
inline double photon_flux(double power, double wavelength) {
    return power * wavelength / (units::two_pi * units::hbar * units::speed_of_light);
}

/// Intra-ring photon number |a_1|^2 for a bus pump power P (W).
/// `pump_offset` places the pump in the rotating frame; by default it sits on
/// the lower split resonance.
inline double pump_power_to_photons(const TransducerParams& p, double power,
                                    std::optional<double> pump_offset = std::nullopt) {
    validate(p);
    if (!(power >= 0.0) || !std::isfinite(power)) throw ValidationError("pump power must be non-negative");
    if (!p.pump_wavelength) throw ValidationError("pump_wavelength is required for power mapping");
    const double omega = pump_offset.value_or(enhancement_resonances(p).lower);
    return std::norm(intra_ring_gain(p, omega)) * photon_flux(power, *p.pump_wavelength);
}

} // namespace pomt
