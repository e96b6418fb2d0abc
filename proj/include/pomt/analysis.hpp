#pragma once

// Cooperativity form of the transduction efficiency, its pump-power optimum,
// spectra with peak/bandwidth extraction, and the parameter sweeps built on them.

#include "pomt/dynamics.hpp"
#include "pomt/error.hpp"
#include "pomt/presets.hpp"
#include "pomt/sweep.hpp"
#include "pomt/units.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace pomt {

/// On-resonance cooperativities and extraction efficiencies.
struct CooperativitySet {
    double optomechanical;         // C_OM = 4 G^2 |a_1|^2 / (kappa_1 gamma_m)
    double inter_ring;             // C_12 = 4 J^2 / (kappa_1 kappa_2)
    double bus_extraction;         // F_2 = kappa_ex,2 / kappa_2
    double mechanical_extraction;  // F_m = gamma_ex / gamma_m
};

/// Frequency-dependent generalisation; reduces to CooperativitySet at the
/// resonance centres.
struct CooperativityFunctions {
    Complex optomechanical;         // G^2 |a_1|^2 chi_01 chi_m
    Complex inter_ring;             // J^2 chi_01 chi_02
    Complex bus_extraction;         // kappa_ex,2 chi_02 / 2
    Complex mechanical_extraction;  // gamma_ex chi_m / 2
};

namespace detail {

inline void check_mechanical_extraction(double f_m) {
    if (f_m > 1.0) {
        std::ostringstream os;
        os << "mechanical extraction efficiency gamma_ex/gamma_m = " << f_m
           << " exceeds 1; the supplied gamma_ex is inconsistent with gamma_0 + 4 g_EM^2/Gamma";
        throw ModelViolation(os.str());
    }
}

} // namespace detail

inline CooperativitySet cooperativities(const OperatingPoint& op) {
    validate(op);
    const auto& p = op.params;
    const auto r = derived_rates(p);
    const double g = p.optomechanical_coupling;
    const double j = p.ring_coupling;
    CooperativitySet c{
        4.0 * g * g * op.intra_ring_photons / (p.ring1_linewidth * r.mechanical_linewidth),
        4.0 * j * j / (p.ring1_linewidth * r.ring2_linewidth),
        p.bus_coupling / r.ring2_linewidth,
        r.external_mechanical_coupling / r.mechanical_linewidth,
    };
    detail::check_mechanical_extraction(c.mechanical_extraction);
    return c;
}

inline CooperativityFunctions cooperativities(const OperatingPoint& op, double omega) {
    validate(op);
    const auto& p = op.params;
    const auto r = derived_rates(p);
    detail::check_mechanical_extraction(r.external_mechanical_coupling / r.mechanical_linewidth);
    const Complex chi_m = Susceptibility{p.mechanical_frequency, r.mechanical_linewidth / 2.0}(omega);
    const Complex chi_1 = Susceptibility{p.ring1_detuning, p.ring1_linewidth / 2.0}(omega);
    const Complex chi_2 = Susceptibility{p.ring2_detuning, r.ring2_linewidth / 2.0}(omega);
    const double g = p.optomechanical_coupling;
    const double j = p.ring_coupling;
    return {
        g * g * op.intra_ring_photons * chi_1 * chi_m,
        j * j * chi_1 * chi_2,
        p.bus_coupling * chi_2 / 2.0,
        r.external_mechanical_coupling * chi_m / 2.0,
    };
}

/// |F_2(w) F_m(w) 4 C_OM(w) C_12(w) / (1 + C_OM(w) + C_12(w))^2|.
inline double efficiency_via_cooperativities(const OperatingPoint& op, double omega) {
    const auto c = cooperativities(op, omega);
    const Complex denom = 1.0 + c.optomechanical + c.inter_ring;
    return std::abs(c.bus_extraction * c.mechanical_extraction * 4.0 * c.optomechanical * c.inter_ring /
                    (denom * denom));
}

/// Same formula with the on-resonance real cooperativities.
inline double efficiency_on_resonance(const CooperativitySet& c) {
    const double denom = 1.0 + c.optomechanical + c.inter_ring;
    return c.bus_extraction * c.mechanical_extraction * 4.0 * c.optomechanical * c.inter_ring /
           (denom * denom);
}

/// |a_1|^2 at which C_OM = C_12 + 1: (gamma_m / 4G^2) (4 J^2 / kappa_2 + kappa_1).
inline double critical_photon_number(const TransducerParams& p) {
    const auto r = derived_rates(p);
    const double g = p.optomechanical_coupling;
    if (!(g > 0.0))
        throw UndefinedOptimum("optomechanical coupling is zero; no pump power optimizes the efficiency");
    const double j = p.ring_coupling;
    return r.mechanical_linewidth / (4.0 * g * g) * (4.0 * j * j / r.ring2_linewidth + p.ring1_linewidth);
}

inline OperatingPoint critical_operating_point(const TransducerParams& p) {
    return OperatingPoint{p, critical_photon_number(p), 0.0};
}

/// Efficiency at the optimal pump: F_2 F_m C_12 / (C_12 + 1).
inline double max_efficiency(const TransducerParams& p) {
    if (!(p.optomechanical_coupling > 0.0))
        throw UndefinedOptimum("optomechanical coupling is zero; no pump power optimizes the efficiency");
    const auto c = cooperativities(OperatingPoint{p, 0.0, 0.0});
    const double eta = c.bus_extraction * c.mechanical_extraction * c.inter_ring / (c.inter_ring + 1.0);
    if (eta > 1.0 + 1e-9) throw ModelViolation("maximum efficiency exceeds unity");
    return eta;
}

struct BusCouplingThreshold {
    double threshold;          // (1 + C_12) / (2 + C_12)
    double bus_extraction;     // current F_2
    bool monotone_increasing;  // F_2 < threshold: raising kappa_ex,2 still helps
};

inline BusCouplingThreshold kappa_ex2_threshold(const TransducerParams& p) {
    const auto c = cooperativities(OperatingPoint{p, 0.0, 0.0});
    const double threshold = (1.0 + c.inter_ring) / (2.0 + c.inter_ring);
    return {threshold, c.bus_extraction, c.bus_extraction < threshold};
}

/// Location, height and 50%-width of the dominant peak of a sampled curve.
struct PeakFeatures {
    double location;
    double height;
    double fwhm;
    double left;
    double right;
    std::size_t samples_in_band;
    bool broad;  // band reaches the grid edge, or the top is flat
};

/// Peak location by 3-point parabolic interpolation about the largest sample;
/// half-maximum crossings by linear interpolation, independently on each side.
inline PeakFeatures extract_peak(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) throw ValidationError("peak extraction needs >= 3 samples");
    const auto n = x.size();
    const auto imax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());

    PeakFeatures f{x[imax], y[imax], 0.0, x.front(), x.back(), 0, false};
    if (imax == 0 || imax + 1 == n) {
        f.broad = true;
    } else {
        const double x0 = x[imax - 1], x1 = x[imax], x2 = x[imax + 1];
        const double y0 = y[imax - 1], y1 = y[imax], y2 = y[imax + 1];
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double curvature = (d12 - d01) / (x2 - x0);
        if (curvature < 0.0) {
            const double xv = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
            f.location = xv;
            f.height = y1 + d01 * (xv - x1) + curvature * (xv - x0) * (xv - x1);
            f.height = std::max(f.height, y1);
        }
    }

    const double half = 0.5 * f.height;
    std::size_t lo = imax;
    while (lo > 0 && y[lo - 1] >= half) --lo;
    if (lo == 0) {
        f.left = x.front();
        f.broad = true;
    } else {
        f.left = x[lo - 1] + (half - y[lo - 1]) * (x[lo] - x[lo - 1]) / (y[lo] - y[lo - 1]);
    }
    std::size_t hi = imax;
    while (hi + 1 < n && y[hi + 1] >= half) ++hi;
    if (hi + 1 == n) {
        f.right = x.back();
        f.broad = true;
    } else {
        f.right = x[hi] + (y[hi] - half) * (x[hi + 1] - x[hi]) / (y[hi] - y[hi + 1]);
    }
    f.fwhm = f.right - f.left;
    f.samples_in_band = hi - lo + 1;

    // Flat top: samples within 1e-6 of the maximum spanning > 10% of the band.
    const double flat_level = y[imax] * (1.0 - 1e-6);
    std::size_t flo = imax, fhi = imax;
    while (flo > lo && y[flo - 1] >= flat_level) --flo;
    while (fhi < hi && y[fhi + 1] >= flat_level) ++fhi;
    if (f.fwhm > 0.0 && x[fhi] - x[flo] > 0.1 * f.fwhm) f.broad = true;
    return f;
}

struct SpectrumResult {
    std::vector<double> frequencies;   // rad/s, rotating frame
    std::vector<double> efficiencies;
    double peak_shift = 0.0;           // peak location - omega_m, rad/s
    double fwhm = 0.0;                 // rad/s
    double peak_efficiency = 0.0;
    double intra_ring_photons = 0.0;   // pump level used for the whole sweep
    bool broad_peak = false;
};

inline void require_increasing(std::span<const double> grid, const char* what) {
    if (grid.size() < 3) throw ValidationError(std::string(what) + " needs at least 3 points");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ValidationError(std::string(what) + " must be strictly increasing");
}

/// Efficiency versus microwave frequency with the pump held at the
/// on-resonance critical photon number.
inline SpectrumResult efficiency_spectrum(const TransducerParams& p, std::span<const double> omega_grid) {
    require_increasing(omega_grid, "frequency grid");
    const auto op = critical_operating_point(p);
    SpectrumResult s;
    s.frequencies.assign(omega_grid.begin(), omega_grid.end());
    s.efficiencies.reserve(omega_grid.size());
    for (double w : omega_grid) s.efficiencies.push_back(efficiency(op, w));
    s.intra_ring_photons = op.intra_ring_photons;

    const auto f = extract_peak(s.frequencies, s.efficiencies);
    if (f.samples_in_band < 8) {
        std::ostringstream os;
        os << "grid too coarse: only " << f.samples_in_band << " samples inside the 50% band";
        throw ValidationError(os.str());
    }
    s.peak_shift = f.location - p.mechanical_frequency;
    s.fwhm = f.fwhm;
    s.peak_efficiency = f.height;
    s.broad_peak = f.broad;
    return s;
}

inline SweepResult to_sweep(const SpectrumResult& s) {
    std::vector<double> hz;
    hz.reserve(s.frequencies.size());
    for (double w : s.frequencies) hz.push_back(units::rad_to_hz(w));
    SweepResult t;
    t.add_column("frequency_hz", std::move(hz)).add_column("efficiency", s.efficiencies);
    return t;
}

/// Uniform grid of `points` values from start to stop inclusive.
inline std::vector<double> linear_grid(double start, double stop, std::size_t points) {
    if (points < 2) throw ValidationError("grid needs at least 2 points");
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k)
        g[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(points - 1);
    g.back() = stop;
    return g;
}

/// Log-spaced grid from start to stop inclusive (both > 0).
inline std::vector<double> log_grid(double start, double stop, std::size_t points) {
    if (!(start > 0.0) || !(stop > 0.0)) throw ValidationError("log grid bounds must be positive");
    if (points < 2) throw ValidationError("grid needs at least 2 points");
    std::vector<double> g(points);
    const double ratio = std::log10(stop / start);
    for (std::size_t k = 0; k < points; ++k)
        g[k] = start * std::pow(10.0, ratio * static_cast<double>(k) / static_cast<double>(points - 1));
    g.front() = start;
    g.back() = stop;
    return g;
}

/// Log-spaced grid of 2*half_points+1 values spanning +-decades around
/// `center`; the middle entry is exactly `center`.
inline std::vector<double> log_grid_around(double center, double decades, std::size_t half_points) {
    if (!(center > 0.0)) throw ValidationError("log grid center must be positive");
    if (half_points == 0) return {center};
    std::vector<double> g;
    const auto m = static_cast<double>(half_points);
    for (std::size_t k = 0; k <= 2 * half_points; ++k) {
        const double e = decades * (static_cast<double>(k) - m) / m;
        g.push_back(k == half_points ? center : center * std::pow(10.0, e));
    }
    return g;
}

struct ContourResult {
    std::vector<double> electromechanical_grid;  // g_EM, rad/s
    std::vector<double> bus_grid;                // kappa_ex,2, rad/s
    std::vector<double> values;                  // row-major: g_EM outer, kappa_ex,2 inner

    double at(std::size_t gem_index, std::size_t bus_index) const {
        return values.at(gem_index * bus_grid.size() + bus_index);
    }
};

/// Maximum achievable efficiency over a (g_EM, kappa_ex,2) grid. gamma_m and
/// gamma_ex follow g_EM, kappa_2 follows kappa_ex,2.
inline ContourResult max_efficiency_contour(const TransducerParams& base, std::span<const double> gem_grid,
                                            std::span<const double> bus_grid) {
    for (double v : gem_grid)
        if (!(v > 0.0)) throw ValidationError("g_EM grid values must be positive");
    for (double v : bus_grid)
        if (!(v > 0.0)) throw ValidationError("kappa_ex,2 grid values must be positive");
    ContourResult c;
    c.electromechanical_grid.assign(gem_grid.begin(), gem_grid.end());
    c.bus_grid.assign(bus_grid.begin(), bus_grid.end());
    c.values.reserve(gem_grid.size() * bus_grid.size());
    for (double gem : gem_grid) {
        auto p = with_electromechanical_coupling(base, gem);
        for (double kex : bus_grid) {
            p.bus_coupling = kex;
            c.values.push_back(max_efficiency(p));
        }
    }
    return c;
}

/// Triples (log10 g_EM/2pi [Hz], log10 kappa_ex,2/2pi [Hz], max efficiency).
inline SweepResult to_sweep(const ContourResult& c) {
    std::vector<double> lg, lk;
    for (double gem : c.electromechanical_grid)
        for (double kex : c.bus_grid) {
            lg.push_back(std::log10(units::rad_to_hz(gem)));
            lk.push_back(std::log10(units::rad_to_hz(kex)));
        }
    SweepResult t;
    t.add_column("log10_gEM_hz", std::move(lg))
        .add_column("log10_kex2_hz", std::move(lk))
        .add_column("max_efficiency", c.values);
    return t;
}

/// Number of strict interior local maxima of a sampled curve (sign changes
/// of the discrete difference from + to -; plateaus are skipped).
inline std::size_t count_local_maxima(std::span<const double> y) {
    std::size_t count = 0;
    int last_sign = 0;
    for (std::size_t k = 1; k < y.size(); ++k) {
        const double d = y[k] - y[k - 1];
        const int sign = (d > 0.0) - (d < 0.0);
        if (sign == 0) continue;
        if (last_sign > 0 && sign < 0) ++count;
        last_sign = sign;
    }
    return count;
}

struct PowerCurve {
    SweepResult table;  // power_w, intra_ring_photons, efficiency
    std::size_t peak_index = 0;
    double peak_power = 0.0;
    double peak_efficiency = 0.0;
};

/// On-resonance (omega = omega_m) efficiency versus bus pump power.
inline PowerCurve power_curve(const TransducerParams& p, std::span<const double> powers,
                              std::optional<double> pump_offset = std::nullopt) {
    if (powers.empty()) throw ValidationError("power grid is empty");
    std::vector<double> photons, eta;
    photons.reserve(powers.size());
    eta.reserve(powers.size());
    for (double power : powers) {
        const double n = pump_power_to_photons(p, power, pump_offset);
        photons.push_back(n);
        eta.push_back(efficiency(OperatingPoint{p, n, 0.0}, p.mechanical_frequency));
    }
    PowerCurve out;
    out.peak_index = static_cast<std::size_t>(std::max_element(eta.begin(), eta.end()) - eta.begin());
    out.peak_power = powers[out.peak_index];
    out.peak_efficiency = eta[out.peak_index];
    out.table.add_column("power_w", std::vector<double>(powers.begin(), powers.end()))
        .add_column("intra_ring_photons", std::move(photons))
        .add_column("efficiency", std::move(eta));
    return out;
}

} // namespace pomt
