#pragma once

// Shared generators and brute-force oracles for the unit and acceptance tests.

#include "pomt/pomt.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace pomt::testing {

using Complex = std::complex<double>;

inline double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-30); }
inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Log-uniform draw in [lo, hi].
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

/// Random transducer parameters around the nominal device. gamma_ex is left
/// to be derived so the network stays passive.
inline TransducerParams random_params(std::mt19937_64& rng) {
    using units::hz_to_rad;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    TransducerParams p;
    p.mechanical_frequency = hz_to_rad(log_uniform(rng, 0.5e9, 10e9));
    p.mechanical_intrinsic_loss = hz_to_rad(log_uniform(rng, 1e4, 1e7));
    p.microwave_linewidth = hz_to_rad(log_uniform(rng, 1e8, 5e10));
    p.microwave_intrinsic_linewidth = p.microwave_linewidth * u01(rng);
    p.electromechanical_coupling = hz_to_rad(log_uniform(rng, 1e5, 1e9));
    p.ring_coupling = hz_to_rad(log_uniform(rng, 1e7, 1e10));
    p.ring1_detuning = p.mechanical_frequency * (1.0 + 0.01 * (u01(rng) - 0.5));
    p.ring2_detuning = p.mechanical_frequency * (1.0 + 0.01 * (u01(rng) - 0.5));
    p.ring1_linewidth = hz_to_rad(log_uniform(rng, 1e6, 1e9));
    p.ring2_intrinsic_linewidth = hz_to_rad(log_uniform(rng, 1e5, 1e9));
    p.bus_coupling = hz_to_rad(log_uniform(rng, 1e6, 1e9));
    p.optomechanical_coupling = hz_to_rad(log_uniform(rng, 10.0, 1e5));
    p.pump_wavelength = 1550e-9;
    return p;
}

/// Operating point with |a_1|^2 spread around the critical value, random phase.
inline OperatingPoint random_operating_point(std::mt19937_64& rng, const TransducerParams& p) {
    std::uniform_real_distribution<double> phase(-units::pi, units::pi);
    const double n = critical_photon_number(p) * log_uniform(rng, 1e-3, 1e3);
    return OperatingPoint{p, n, phase(rng)};
}

/// Frequency near the mechanical resonance, within a few linewidths or far out.
inline double random_frequency(std::mt19937_64& rng, const TransducerParams& p) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double width = derived_rates(p).mechanical_linewidth + p.ring1_linewidth + p.ring_coupling;
    return p.mechanical_frequency + u(rng) * 3.0 * width;
}

/// Random graph: one source "s", one sink "t", internal nodes n0..n{k-1}.
/// Edge gains are damped Lorentzians or constants; |gain| stays moderate.
inline sfg::SignalFlowGraph random_graph(std::mt19937_64& rng, int internal, double edge_probability) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> usym(-1.0, 1.0);
    sfg::SignalFlowGraph g;
    g.add_node("s", sfg::NodeKind::source).add_node("t", sfg::NodeKind::sink);
    std::vector<std::string> ids;
    for (int k = 0; k < internal; ++k) {
        ids.push_back("n" + std::to_string(k));
        g.add_node(ids.back());
    }
    auto random_gain = [&]() -> sfg::EdgeGain {
        const Complex c{usym(rng), usym(rng)};
        if (u01(rng) < 0.5) return [c](double) { return 0.6 * c; };
        const double centre = usym(rng);
        const double half = 0.5 + u01(rng);
        return [c, centre, half](double w) { return 0.5 * c * half / Complex(half, -(w - centre)); };
    };
    g.add_edge("s", ids.front(), random_gain());
    g.add_edge(ids.back(), "t", random_gain());
    for (const auto& a : ids) {
        if (a != ids.front() && u01(rng) < 0.3) g.add_edge("s", a, random_gain());
        if (a != ids.back() && u01(rng) < 0.3) g.add_edge(a, "t", random_gain());
        for (const auto& b : ids)
            if (a != b && u01(rng) < edge_probability) g.add_edge(a, b, random_gain());
    }
    return g;
}

namespace detail {

inline bool has_edge(const sfg::SignalFlowGraph& g, const std::string& a, const std::string& b) {
    return g.edge_between(g.index_of(a), g.index_of(b)).has_value();
}

} // namespace detail

/// Every simple path src -> dst by trying all orderings of all node subsets.
inline std::set<sfg::NodeSequence> brute_force_paths(const sfg::SignalFlowGraph& g, const std::string& src,
                                                     const std::string& dst) {
    std::vector<std::string> others;
    for (const auto& n : g.nodes())
        if (n.id != src && n.id != dst) others.push_back(n.id);
    std::set<sfg::NodeSequence> out;
    const auto m = others.size();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<std::string> subset;
        for (std::size_t k = 0; k < m; ++k)
            if (mask & (1u << k)) subset.push_back(others[k]);
        std::sort(subset.begin(), subset.end());
        do {
            sfg::NodeSequence seq{src};
            seq.insert(seq.end(), subset.begin(), subset.end());
            seq.push_back(dst);
            bool ok = true;
            for (std::size_t k = 0; k + 1 < seq.size() && ok; ++k) ok = detail::has_edge(g, seq[k], seq[k + 1]);
            if (ok) out.insert(seq);
        } while (std::next_permutation(subset.begin(), subset.end()));
    }
    return out;
}

/// Every simple cycle, rotated to start at its smallest id, by exhaustive search.
inline std::set<sfg::NodeSequence> brute_force_loops(const sfg::SignalFlowGraph& g) {
    std::vector<std::string> ids;
    for (const auto& n : g.nodes()) ids.push_back(n.id);
    std::set<sfg::NodeSequence> out;
    const auto m = ids.size();
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        std::vector<std::string> subset;
        for (std::size_t k = 0; k < m; ++k)
            if (mask & (1u << k)) subset.push_back(ids[k]);
        std::sort(subset.begin(), subset.end());
        const auto head = subset.front();
        std::vector<std::string> rest(subset.begin() + 1, subset.end());
        do {
            sfg::NodeSequence seq{head};
            seq.insert(seq.end(), rest.begin(), rest.end());
            bool ok = true;
            for (std::size_t k = 0; k < seq.size() && ok; ++k)
                ok = detail::has_edge(g, seq[k], seq[(k + 1) % seq.size()]);
            if (ok) out.insert(seq);
        } while (std::next_permutation(rest.begin(), rest.end()));
    }
    return out;
}

/// Golden-section maximization of a unimodal f on [a, b].
template <class F>
double golden_section_max(F f, double a, double b, int iterations = 200) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iterations && (b - a) > 1e-15 * std::abs(b); ++k) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace pomt::testing
