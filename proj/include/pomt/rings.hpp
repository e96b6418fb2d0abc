#pragma once

// Coupled micro-ring pair on a bus waveguide: supermodes, transmission
// critical points, an all-pass transfer model, and the coupler beat length.

#include "pomt/error.hpp"
#include "pomt/sweep.hpp"
#include "pomt/units.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pomt::rings {

using Complex = std::complex<double>;

/// Two identical-length rings; ring 2 couples to the bus, ring 1 to ring 2
/// and optionally to a drop waveguide.
struct RingPair {
    double round_trip_time = 0.0;   // T, s
    double coupling = 0.0;          // J, rad/s; inter-ring field transfer sin(JT)
    double loss = 1.0;              // round-trip amplitude transmission, (0, 1]
    double bus_coupling = 0.0;      // bus field cross-coupling, [0, 1]
    std::optional<double> drop_coupling;  // ring-1 drop-port field cross-coupling

    double free_spectral_range() const { return units::two_pi / round_trip_time; }  // rad/s
};

inline void validate(const RingPair& rp) {
    if (!(rp.round_trip_time > 0.0) || !std::isfinite(rp.round_trip_time))
        throw ValidationError("round-trip time must be positive");
    if (!std::isfinite(rp.coupling)) throw ValidationError("inter-ring coupling must be finite");
    if (!(rp.loss > 0.0) || rp.loss > 1.0) throw ValidationError("round-trip amplitude must lie in (0, 1]");
    if (!(rp.bus_coupling >= 0.0) || rp.bus_coupling > 1.0)
        throw ValidationError("bus coupling must lie in [0, 1]");
    if (rp.drop_coupling && (!(*rp.drop_coupling >= 0.0) || *rp.drop_coupling > 1.0))
        throw ValidationError("drop coupling must lie in [0, 1]");
}

enum class CriticalKind { flat_point, split_lower, split_upper };

inline std::string to_string(CriticalKind k) {
    switch (k) {
    case CriticalKind::flat_point: return "flat-point";
    case CriticalKind::split_lower: return "split-resonance-lower";
    case CriticalKind::split_upper: return "split-resonance-upper";
    }
    return "unknown";
}

struct CriticalFrequency {
    double omega;  // rad/s
    CriticalKind kind;
    int order;     // n
};

/// Roots of (cos JT + cos wT) sin wT = 0 for n in [n_min, n_max]:
/// flat points n pi / T and split pairs (pi + 2 pi n)/T -+ J. Sorted by omega.
inline std::vector<CriticalFrequency> critical_frequencies(const RingPair& rp, int n_min, int n_max) {
    validate(rp);
    if (n_max < n_min) throw ValidationError("empty order range");
    const double t = rp.round_trip_time;
    std::vector<CriticalFrequency> out;
    for (int n = n_min; n <= n_max; ++n) {
        out.push_back({n * units::pi / t, CriticalKind::flat_point, n});
        const double centre = (units::pi + units::two_pi * n) / t;
        out.push_back({centre - rp.coupling, CriticalKind::split_lower, n});
        out.push_back({centre + rp.coupling, CriticalKind::split_upper, n});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const CriticalFrequency& a, const CriticalFrequency& b) { return a.omega < b.omega; });
    return out;
}

/// (cos JT + cos wT) sin wT.
inline double critical_residual(const RingPair& rp, double omega) {
    const double t = rp.round_trip_time;
    return (std::cos(rp.coupling * t) + std::cos(omega * t)) * std::sin(omega * t);
}

/// (a1, a2) -> ((a1 + a2)/sqrt2, (a1 - a2)/sqrt2)
inline std::pair<Complex, Complex> supermode_transform(Complex a1, Complex a2) {
    const double s = 1.0 / std::sqrt(2.0);
    return {(a1 + a2) * s, (a1 - a2) * s};
}

/// The transform is its own inverse.
inline std::pair<Complex, Complex> inverse_supermode_transform(Complex a_sym, Complex a_asym) {
    return supermode_transform(a_sym, a_asym);
}

/// Bus through-port field transmission at angular frequency omega.
///
/// Each ring contributes a round-trip factor -a e^{i w T}, placing the
/// uncoupled resonances at (pi + 2 pi n)/T. Ring 1 acts as a reflector
/// (cos JT - x1)/(1 - cos JT x1) inside ring 2; ring 2 is an all-pass
/// filter on the bus with self-coupling sqrt(1 - k_bus^2).
inline Complex field_transmission(const RingPair& rp, double omega) {
    const Complex round_trip = -rp.loss * std::polar(1.0, omega * rp.round_trip_time);
    const double c = std::cos(rp.coupling * rp.round_trip_time);
    Complex x1 = round_trip;
    if (rp.drop_coupling) x1 *= std::sqrt(1.0 - *rp.drop_coupling * *rp.drop_coupling);
    const Complex r1 = (c - x1) / (1.0 - c * x1);
    const Complex x2 = round_trip * r1;
    const double t_bus = std::sqrt(1.0 - rp.bus_coupling * rp.bus_coupling);
    return (t_bus - x2) / (1.0 - t_bus * x2);
}

inline double transmission(const RingPair& rp, double omega) {
    return std::min(1.0, std::norm(field_transmission(rp, omega)));
}

/// Columns: frequency_hz, transmission.
inline SweepResult transmission_spectrum(const RingPair& rp, std::span<const double> omega_grid) {
    validate(rp);
    for (std::size_t k = 1; k < omega_grid.size(); ++k)
        if (!(omega_grid[k] > omega_grid[k - 1])) throw ValidationError("frequency grid must be increasing");
    std::vector<double> hz, tr;
    hz.reserve(omega_grid.size());
    tr.reserve(omega_grid.size());
    for (double w : omega_grid) {
        hz.push_back(units::rad_to_hz(w));
        tr.push_back(transmission(rp, w));
    }
    SweepResult t;
    t.add_column("frequency_hz", std::move(hz)).add_column("transmission", std::move(tr));
    return t;
}

struct CouplerGeometry {
    double wavelength;   // m, vacuum
    double n_eff_sym;
    double n_eff_asym;
    double length;       // interaction length z, m
};

struct BeatLength {
    double length;  // m; +inf when the supermodes are degenerate
    bool infinite;
};

/// L_c = lambda / (2 |n_sym - n_asym|).
inline BeatLength beat_length(const CouplerGeometry& cg) {
    if (!(cg.wavelength > 0.0)) throw ValidationError("wavelength must be positive");
    const double dn = std::abs(cg.n_eff_sym - cg.n_eff_asym);
    if (dn == 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {cg.wavelength / (2.0 * dn), false};
}

/// Fraction of light left in the launch waveguide, cos^2(pi z / (2 L_c)).
inline double coupled_fraction(const CouplerGeometry& cg) {
    if (!(cg.length >= 0.0)) throw ValidationError("interaction length must be non-negative");
    const auto lc = beat_length(cg);
    if (lc.infinite) return 1.0;
    const double c = std::cos(units::pi * cg.length / (2.0 * lc.length));
    return c * c;
}

} // namespace pomt::rings
