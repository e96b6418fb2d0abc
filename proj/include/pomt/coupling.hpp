#pragma once

// Microscopic coupling constants evaluated on discretized mode fields:
// mode volumes, effective mass, strain, the piezoelectric g_ijk(mn) and the
// single-photon optomechanical G_mn. SI units throughout.

#include "pomt/error.hpp"
#include "pomt/materials.hpp"
#include "pomt/sweep.hpp"
#include "pomt/units.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pomt::coupling {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<Complex, 3>;

/// Uniform rectilinear grid. Point (i, j, k) sits at origin + (i dx, j dy, k dz)
/// and is stored at flat index i + nx (j + ny k).
struct Grid3D {
    Vec3 origin{0.0, 0.0, 0.0};
    Vec3 spacing{1.0, 1.0, 1.0};
    std::array<std::size_t, 3> counts{1, 1, 1};

    bool operator==(const Grid3D&) const = default;

    std::size_t size() const noexcept { return counts[0] * counts[1] * counts[2]; }

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return i + counts[0] * (j + counts[1] * k);
    }

    Vec3 point(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return {origin[0] + spacing[0] * static_cast<double>(i), origin[1] + spacing[1] * static_cast<double>(j),
                origin[2] + spacing[2] * static_cast<double>(k)};
    }

    Vec3 point(std::size_t flat) const noexcept {
        const std::size_t i = flat % counts[0];
        const std::size_t j = (flat / counts[0]) % counts[1];
        const std::size_t k = flat / (counts[0] * counts[1]);
        return point(i, j, k);
    }

    /// Box spanned by the grid; a single-point axis counts as one spacing thick.
    double volume() const noexcept {
        double v = 1.0;
        for (int a = 0; a < 3; ++a)
            v *= counts[a] > 1 ? spacing[a] * static_cast<double>(counts[a] - 1) : spacing[a];
        return v;
    }
};

inline void validate(const Grid3D& g) {
    for (int a = 0; a < 3; ++a) {
        if (!(g.spacing[a] > 0.0) || !std::isfinite(g.spacing[a]))
            throw ValidationError("grid spacing along axis " + std::to_string(a + 1) + " must be positive");
        if (g.counts[a] == 0) throw ValidationError("grid count along axis " + std::to_string(a + 1) + " is zero");
        if (!std::isfinite(g.origin[a])) throw ValidationError("grid origin must be finite");
    }
}

/// Trapezoid weights, product over axes. Single-point axes weigh one spacing.
inline std::vector<double> quadrature_weights(const Grid3D& g) {
    std::array<std::vector<double>, 3> w1;
    for (int a = 0; a < 3; ++a) {
        const auto n = g.counts[a];
        w1[a].assign(n, g.spacing[a]);
        if (n > 1) {
            w1[a].front() *= 0.5;
            w1[a].back() *= 0.5;
        }
    }
    std::vector<double> w(g.size());
    for (std::size_t k = 0; k < g.counts[2]; ++k)
        for (std::size_t j = 0; j < g.counts[1]; ++j)
            for (std::size_t i = 0; i < g.counts[0]; ++i) w[g.index(i, j, k)] = w1[0][i] * w1[1][j] * w1[2][k];
    return w;
}

template <class T>
T integrate(const Grid3D& g, const std::vector<T>& values) {
    if (values.size() != g.size()) throw ValidationError("integrand length does not match the grid");
    const auto w = quadrature_weights(g);
    T sum{};
    for (std::size_t n = 0; n < values.size(); ++n) sum += w[n] * values[n];
    return sum;
}

enum class ModeKind { electromagnetic, mechanical };

inline std::string to_string(ModeKind k) { return k == ModeKind::electromagnetic ? "electromagnetic" : "mechanical"; }

/// Complex vector field on a grid: E_(i,m)(r) or w_(j,n)(r).
struct ModeField {
    Grid3D grid;
    std::array<std::vector<Complex>, 3> components;
    ModeKind kind = ModeKind::mechanical;
    double frequency = 0.0;  // rad/s

    ModeField() = default;
    ModeField(Grid3D g, ModeKind k, double omega) : grid(g), kind(k), frequency(omega) {
        validate(grid);
        for (auto& c : components) c.assign(grid.size(), Complex{});
    }

    CVec3 at(std::size_t flat) const { return {components[0][flat], components[1][flat], components[2][flat]}; }

    void set(std::size_t flat, const CVec3& v) {
        for (int a = 0; a < 3; ++a) components[a][flat] = v[a];
    }

    ModeField scaled(Complex s) const {
        ModeField out = *this;
        for (auto& c : out.components)
            for (auto& v : c) v *= s;
        return out;
    }
};

inline void validate(const ModeField& f) {
    validate(f.grid);
    for (int a = 0; a < 3; ++a) {
        if (f.components[a].size() != f.grid.size())
            throw ValidationError("mode field component " + std::to_string(a + 1) + " length does not match the grid");
        for (const auto& v : f.components[a])
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw ValidationError("mode field contains non-finite values");
    }
    if (!(f.frequency >= 0.0) || !std::isfinite(f.frequency))
        throw ValidationError("mode frequency must be finite and non-negative");
}

inline void require_same_grid(const ModeField& a, const ModeField& b) {
    if (!(a.grid == b.grid)) throw ValidationError("mode fields live on different grids");
}

// ---------------------------------------------------------------- Voigt

/// (i, j) in 1..3 -> Voigt index 1..6.
inline int voigt_index(int i, int j) {
    if (i < 1 || i > 3 || j < 1 || j > 3)
        throw ValidationError("tensor index out of range: (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (i == j) return i;
    const int s = i + j;
    return s == 5 ? 4 : s == 4 ? 5 : 6;
}

/// Voigt index 1..6 -> canonical pair (i <= j).
inline std::pair<int, int> voigt_pair(int voigt) {
    switch (voigt) {
        case 1: return {1, 1};
        case 2: return {2, 2};
        case 3: return {3, 3};
        case 4: return {2, 3};
        case 5: return {1, 3};
        case 6: return {1, 2};
        default: throw ValidationError("Voigt index out of range: " + std::to_string(voigt));
    }
}

// ---------------------------------------------------------------- material

inline double unknown() { return std::numeric_limits<double>::quiet_NaN(); }

/// Constitutive tensors of one material. NaN marks an unknown element.
struct MaterialTensorSet {
    Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();  // stress-voltage piezo, V/m
    std::optional<Eigen::Matrix<double, 3, 6>> e;                          // stress-charge piezo
    Eigen::Matrix<double, 6, 6> p = Eigen::Matrix<double, 6, 6>::Zero();  // photoelastic, not symmetric
    Eigen::Matrix<double, 6, 6> c = Eigen::Matrix<double, 6, 6>::Zero();  // stiffness
    Eigen::Matrix3d eta = Eigen::Matrix3d::Identity();                    // inverse relative permittivity
    double density = 1.0;                                                  // kg/m^3
    double eps_rf = 1.0;
    double eps_ir = 1.0;

    /// h_ijk with 1-based tensor indices.
    double h_ijk(int i, int j, int k) const {
        if (i < 1 || i > 3) throw ValidationError("tensor index out of range: " + std::to_string(i));
        const int col = voigt_index(j, k);
        const double v = h(i - 1, col - 1);
        if (std::isnan(v))
            throw ValidationError("piezoelectric element h_" + std::to_string(i) + std::to_string(col) + " is unknown");
        return v;
    }

    double p_ijkl(int i, int j, int k, int l) const {
        const int row = voigt_index(i, j);
        const int col = voigt_index(k, l);
        const double v = p(row - 1, col - 1);
        if (std::isnan(v))
            throw ValidationError("photoelastic element p_" + std::to_string(row) + std::to_string(col) +
                                  " is unknown");
        return v;
    }
};

inline Eigen::Matrix<double, 3, 6> h_from_e(const Eigen::Matrix3d& eta, const Eigen::Matrix<double, 3, 6>& e) {
    return eta * e;
}

inline void validate(const MaterialTensorSet& m) {
    if (!(m.density > 0.0)) throw ValidationError("density must be positive");
    if (!(m.eps_rf > 0.0) || !(m.eps_ir > 0.0)) throw ValidationError("relative permittivities must be positive");
    if (!m.eta.allFinite()) throw ValidationError("eta contains unknown elements");
    const double scale = m.eta.cwiseAbs().maxCoeff();
    if ((m.eta - m.eta.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ValidationError("eta must be symmetric");
    if (Eigen::LLT<Eigen::Matrix3d>(m.eta).info() != Eigen::Success)
        throw ValidationError("eta must be positive definite");
    for (int r = 0; r < 6; ++r)
        for (int s = r + 1; s < 6; ++s) {
            const double a = m.c(r, s), b = m.c(s, r);
            if (std::isnan(a) && std::isnan(b)) continue;
            if (!(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b))))
                throw ValidationError("stiffness c must be symmetric (c_" + std::to_string(r + 1) +
                                      std::to_string(s + 1) + ")");
        }
    if (m.e) {
        const auto expected = h_from_e(m.eta, *m.e);
        for (int i = 0; i < 3; ++i)
            for (int col = 0; col < 6; ++col) {
                const double hv = m.h(i, col), ev = expected(i, col);
                if (std::isnan(hv) || std::isnan(ev)) continue;
                if (std::abs(hv - ev) > 1e-9 * std::max({std::abs(hv), std::abs(ev), 1e-300}))
                    throw ValidationError("h and eta*e disagree at element h_" + std::to_string(i + 1) +
                                          std::to_string(col + 1));
            }
    }
}

enum class Band { rf, ir };

/// Tensor set carrying only the tabulated 33-components of a dataset record.
/// eta is isotropic 1/eps33 at the chosen band; density converted to kg/m^3.
/// Unknown entries become NaN so any coupling that needs them fails loudly.
inline MaterialTensorSet tensor_set_from_record(const materials::MaterialRecord& r, Band band) {
    using materials::H33Flag;
    MaterialTensorSet m;
    if (r.h33_flag == H33Flag::unknown) m.h(2, 2) = unknown();
    else m.h(2, 2) = r.h33.value_or(0.0);
    m.p(2, 2) = r.p33.value_or(unknown());
    if (!r.rho) throw ValidationError("material '" + r.name + "' has no density");
    m.density = *r.rho * 1000.0;
    if (!r.eps33_rf) throw ValidationError("material '" + r.name + "' has no RF permittivity");
    m.eps_rf = *r.eps33_rf;
    m.eps_ir = r.eps33_ir.value_or(m.eps_rf);
    if (band == Band::ir && !r.eps33_ir)
        throw ValidationError("material '" + r.name + "' has no IR permittivity");
    m.eta = Eigen::Matrix3d::Identity() / (band == Band::rf ? m.eps_rf : m.eps_ir);
    return m;
}

// ---------------------------------------------------------------- strain

namespace detail {

inline std::vector<Complex> derivative(const Grid3D& g, const std::vector<Complex>& f, int axis) {
    const auto n = g.counts[axis];
    std::vector<Complex> d(g.size(), Complex{});
    if (n == 1) return d;  // translation-invariant direction
    if (n < 3)
        throw ValidationError("cannot differentiate along axis " + std::to_string(axis + 1) + ": only " +
                              std::to_string(n) + " points (need >= 3)");
    const double h = g.spacing[axis];
    const std::size_t stride = axis == 0 ? 1 : axis == 1 ? g.counts[0] : g.counts[0] * g.counts[1];
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const std::size_t pos = (flat / stride) % n;
        if (pos == 0)
            d[flat] = (-3.0 * f[flat] + 4.0 * f[flat + stride] - f[flat + 2 * stride]) / (2.0 * h);
        else if (pos == n - 1)
            d[flat] = (3.0 * f[flat] - 4.0 * f[flat - stride] + f[flat - 2 * stride]) / (2.0 * h);
        else
            d[flat] = (f[flat + stride] - f[flat - stride]) / (2.0 * h);
    }
    return d;
}

} // namespace detail

/// dw_j/dr_k for one component pair (1-based). Single-point axes are treated
/// as directions of translation invariance.
inline std::vector<Complex> strain_component(const ModeField& w, int j, int k) {
    if (j < 1 || j > 3 || k < 1 || k > 3) throw ValidationError("strain index out of range");
    return detail::derivative(w.grid, w.components[j - 1], k - 1);
}

/// All nine dw_j/dr_k, stored at [j-1][k-1]. Every axis needs >= 3 points.
inline std::array<std::array<std::vector<Complex>, 3>, 3> strain_field(const ModeField& w) {
    validate(w);
    for (int a = 0; a < 3; ++a)
        if (w.grid.counts[a] < 3)
            throw ValidationError("degenerate axis " + std::to_string(a + 1) + ": " +
                                  std::to_string(w.grid.counts[a]) + " points (need >= 3)");
    std::array<std::array<std::vector<Complex>, 3>, 3> x;
    for (int j = 1; j <= 3; ++j)
        for (int k = 1; k <= 3; ++k) x[j - 1][k - 1] = strain_component(w, j, k);
    return x;
}

// ---------------------------------------------------------------- volumes

namespace detail {

inline double volume_from_density(const Grid3D& g, const std::vector<double>& u) {
    std::vector<double> u2(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) u2[n] = u[n] * u[n];
    const double s1 = integrate(g, u);
    const double s2 = integrate(g, u2);
    if (!(s1 > 0.0) || !(s2 > 0.0)) throw ValidationError("mode field is identically zero");
    return s1 * s1 / s2;
}

inline std::vector<double> mechanical_density(const ModeField& w) {
    std::vector<double> u(w.grid.size());
    for (std::size_t n = 0; n < u.size(); ++n)
        u[n] = std::norm(w.components[0][n]) + std::norm(w.components[1][n]) + std::norm(w.components[2][n]);
    return u;
}

inline std::vector<double> em_density(const ModeField& e, const Eigen::Matrix3d& eta) {
    std::vector<double> u(e.grid.size());
    for (std::size_t n = 0; n < u.size(); ++n) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                s += eta(i, j) * (e.components[j][n] * std::conj(e.components[i][n])).real();
        u[n] = s;
    }
    return u;
}

} // namespace detail

/// V_eff = (int sum_i |w_i|^2)^2 / int (sum_i |w_i|^2)^2.
inline double mech_mode_volume(const ModeField& w) {
    validate(w);
    return detail::volume_from_density(w.grid, detail::mechanical_density(w));
}

/// EM analogue weighted by the inverse permittivity tensor.
inline double em_mode_volume(const ModeField& e, const Eigen::Matrix3d& eta) {
    validate(e);
    return detail::volume_from_density(e.grid, detail::em_density(e, eta));
}

/// Rescales w so that int sum_i |w_i|^2 = V_eff.
inline ModeField normalize_mechanical(const ModeField& w) {
    const double v = mech_mode_volume(w);
    const double s = integrate(w.grid, detail::mechanical_density(w));
    return w.scaled(std::sqrt(v / s));
}

/// Rescales E so that int eta_ij E_j E_i* = eta_eff V_eff^EM.
inline ModeField normalize_em(const ModeField& e, const Eigen::Matrix3d& eta, double eta_eff) {
    if (!(eta_eff > 0.0)) throw ValidationError("eta_eff must be positive");
    const double v = em_mode_volume(e, eta);
    const double s = integrate(e.grid, detail::em_density(e, eta));
    return e.scaled(std::sqrt(eta_eff * v / s));
}

/// int rho sum_i w*_(i,m) w_(i,n): m_eff when m = n, orthogonality defect otherwise.
inline Complex effective_mass(const ModeField& wm, const ModeField& wn, const std::vector<double>& rho) {
    validate(wm);
    validate(wn);
    require_same_grid(wm, wn);
    if (rho.size() != wm.grid.size()) throw ValidationError("density field length does not match the grid");
    std::vector<Complex> f(wm.grid.size());
    for (std::size_t n = 0; n < f.size(); ++n) {
        Complex s{};
        for (int a = 0; a < 3; ++a) s += std::conj(wm.components[a][n]) * wn.components[a][n];
        f[n] = rho[n] * s;
    }
    return integrate(wm.grid, f);
}

inline Complex effective_mass(const ModeField& wm, const ModeField& wn, double rho) {
    return effective_mass(wm, wn, std::vector<double>(wm.grid.size(), rho));
}

// ---------------------------------------------------------------- couplings

/// Effective-medium scalars. Unset values fall back to bulk material values:
/// density for rho_eff, 1/eps_rf (piezo) or 1/eps_ir (optomechanics) for eta_eff.
struct EffectiveMedium {
    std::optional<double> eta_eff;
    std::optional<double> rho_eff;  // kg/m^3
};

/// int E_i dw_j/dr_k over the grid, fields taken as given (1-based indices).
inline Complex piezo_overlap(const ModeField& e, const ModeField& w, int i, int j, int k) {
    validate(e);
    validate(w);
    require_same_grid(e, w);
    if (i < 1 || i > 3) throw ValidationError("tensor index out of range");
    const auto dw = strain_component(w, j, k);
    std::vector<Complex> f(dw.size());
    for (std::size_t n = 0; n < f.size(); ++n) f[n] = e.components[i - 1][n] * dw[n];
    return integrate(e.grid, f);
}

/// int E_i E_j* dw_k/dr_l over the grid (1-based indices).
inline Complex optomech_overlap(const ModeField& e, const ModeField& w, int i, int j, int k, int l) {
    validate(e);
    validate(w);
    require_same_grid(e, w);
    if (i < 1 || i > 3 || j < 1 || j > 3) throw ValidationError("tensor index out of range");
    const auto dw = strain_component(w, k, l);
    std::vector<Complex> f(dw.size());
    for (std::size_t n = 0; n < f.size(); ++n)
        f[n] = e.components[i - 1][n] * std::conj(e.components[j - 1][n]) * dw[n];
    return integrate(e.grid, f);
}

namespace detail {

struct PiezoSetup {
    ModeField e, w;
    double prefactor_magnitude;  // sqrt(w_m/w_n) / (4 V_mn sqrt(eta rho))
};

inline PiezoSetup piezo_setup(const ModeField& e, const ModeField& w, const MaterialTensorSet& mat,
                              const EffectiveMedium& medium) {
    if (e.kind != ModeKind::electromagnetic) throw ValidationError("first field must be electromagnetic");
    if (w.kind != ModeKind::mechanical) throw ValidationError("second field must be mechanical");
    require_same_grid(e, w);
    if (!(e.frequency > 0.0) || !(w.frequency > 0.0)) throw ValidationError("mode frequencies must be positive");
    const double eta_eff = medium.eta_eff.value_or(1.0 / mat.eps_rf);
    const double rho_eff = medium.rho_eff.value_or(mat.density);
    if (!(eta_eff > 0.0) || !(rho_eff > 0.0)) throw ValidationError("eta_eff and rho_eff must be positive");
    PiezoSetup s{normalize_em(e, mat.eta, eta_eff), normalize_mechanical(w), 0.0};
    const double v_mn = std::sqrt(em_mode_volume(e, mat.eta) * mech_mode_volume(w));
    s.prefactor_magnitude = std::sqrt(e.frequency / w.frequency) / (4.0 * v_mn) / std::sqrt(eta_eff * rho_eff);
    return s;
}

} // namespace detail

/// Piezoelectric coupling g_ijk(mn) for one component (rad/s). The sign of
/// h_ijk is kept so component terms add up to the full tensor sum.
inline Complex piezo_coupling(const ModeField& e, const ModeField& w, const MaterialTensorSet& mat, int i, int j,
                              int k, const EffectiveMedium& medium = {}) {
    const double h = mat.h_ijk(i, j, k);
    if (h == 0.0) return Complex{};
    const auto s = detail::piezo_setup(e, w, mat, medium);
    return Complex{0.0, s.prefactor_magnitude * h} * piezo_overlap(s.e, s.w, i, j, k);
}

/// Sum of g_ijk(mn) over all 27 index triples.
inline Complex piezo_coupling(const ModeField& e, const ModeField& w, const MaterialTensorSet& mat,
                              const EffectiveMedium& medium = {}) {
    const auto s = detail::piezo_setup(e, w, mat, medium);
    Complex sum{};
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            for (int k = 1; k <= 3; ++k) {
                const double h = mat.h_ijk(i, j, k);
                if (h != 0.0) sum += h * piezo_overlap(s.e, s.w, i, j, k);
            }
    return Complex{0.0, s.prefactor_magnitude} * sum;
}

/// Single-photon optomechanical coupling G_mn (rad/s), summed over the full
/// photoelastic tensor. Complex in general; real for real strain profiles.
inline Complex optomech_coupling(const ModeField& e, const ModeField& w, const MaterialTensorSet& mat,
                                 const EffectiveMedium& medium = {}) {
    if (e.kind != ModeKind::electromagnetic) throw ValidationError("first field must be electromagnetic");
    if (w.kind != ModeKind::mechanical) throw ValidationError("second field must be mechanical");
    require_same_grid(e, w);
    if (!(w.frequency > 0.0)) throw ValidationError("mechanical frequency must be positive");
    const double eta_eff = medium.eta_eff.value_or(1.0 / mat.eps_ir);
    const double rho_eff = medium.rho_eff.value_or(mat.density);
    if (!(eta_eff > 0.0) || !(rho_eff > 0.0)) throw ValidationError("eta_eff and rho_eff must be positive");
    const double v_em = em_mode_volume(e, mat.eta);
    const double v_mech = mech_mode_volume(w);
    const auto en = normalize_em(e, mat.eta, eta_eff);
    const auto wn = normalize_mechanical(w);
    const double eps0 = units::epsilon_0;
    const double pref = std::sqrt(units::hbar / (32.0 * rho_eff * v_mech * eps0 * eps0 * eta_eff * eta_eff *
                                                 v_em * v_em * w.frequency));
    Complex sum{};
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            for (int k = 1; k <= 3; ++k)
                for (int l = 1; l <= 3; ++l) {
                    const double p = mat.p_ijkl(i, j, k, l);
                    if (p != 0.0) sum += p * optomech_overlap(en, wn, i, j, k, l);
                }
    return pref * sum;
}

/// gamma_ex = 4 g_EM^2 Gamma_ex / Gamma^2.
inline double gamma_ex_from_gEM(double g_em, double big_gamma, double gamma_ex_microwave) {
    if (!(big_gamma > 0.0)) throw ValidationError("total microwave linewidth must be positive");
    if (!(gamma_ex_microwave >= 0.0) || gamma_ex_microwave > big_gamma)
        throw ValidationError("external microwave coupling must lie in [0, Gamma]");
    return 4.0 * g_em * g_em * gamma_ex_microwave / (big_gamma * big_gamma);
}

// ---------------------------------------------------------------- analytic modes

/// amplitude * polarization * exp(i q.r)
inline ModeField plane_wave(const Grid3D& g, ModeKind kind, double omega, const Vec3& wavevector,
                            const CVec3& polarization, Complex amplitude = 1.0) {
    ModeField f(g, kind, omega);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto r = g.point(n);
        const double phase = wavevector[0] * r[0] + wavevector[1] * r[1] + wavevector[2] * r[2];
        const Complex s = amplitude * std::polar(1.0, phase);
        f.set(n, {s * polarization[0], s * polarization[1], s * polarization[2]});
    }
    return f;
}

/// polarization inside the closed box [lo, hi], zero elsewhere.
inline ModeField top_hat(const Grid3D& g, ModeKind kind, double omega, const Vec3& lo, const Vec3& hi,
                         const CVec3& polarization) {
    ModeField f(g, kind, omega);
    const double tol = 1e-12;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto r = g.point(n);
        bool inside = true;
        for (int a = 0; a < 3; ++a) {
            const double slack = tol * std::max(1.0, std::abs(hi[a] - lo[a]));
            inside = inside && r[a] >= lo[a] - slack && r[a] <= hi[a] + slack;
        }
        if (inside) f.set(n, polarization);
    }
    return f;
}

/// polarization * exp(-((r_axis - center) / waist)^2): a Gaussian sheet normal to `axis` (0..2).
inline ModeField gaussian_sheet(const Grid3D& g, ModeKind kind, double omega, int axis, double center,
                                double waist, const CVec3& polarization) {
    if (axis < 0 || axis > 2) throw ValidationError("axis must be 0, 1 or 2");
    if (!(waist > 0.0)) throw ValidationError("waist must be positive");
    ModeField f(g, kind, omega);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double d = (g.point(n)[axis] - center) / waist;
        const double s = std::exp(-d * d);
        f.set(n, {s * polarization[0], s * polarization[1], s * polarization[2]});
    }
    return f;
}

// ---------------------------------------------------------------- CSV

inline void write_mode_field(std::ostream& os, const ModeField& f) {
    const auto& g = f.grid;
    os << "# origin=" << format_number(g.origin[0]) << ',' << format_number(g.origin[1]) << ','
       << format_number(g.origin[2]) << " spacing=" << format_number(g.spacing[0]) << ','
       << format_number(g.spacing[1]) << ',' << format_number(g.spacing[2]) << " counts=" << g.counts[0] << ','
       << g.counts[1] << ',' << g.counts[2] << " kind=" << to_string(f.kind)
       << " frequency_hz=" << format_number(units::rad_to_hz(f.frequency)) << '\n';
    os << "x,y,z,Re_fx,Im_fx,Re_fy,Im_fy,Re_fz,Im_fz\n";
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto r = g.point(n);
        os << format_number(r[0]) << ',' << format_number(r[1]) << ',' << format_number(r[2]);
        for (int a = 0; a < 3; ++a)
            os << ',' << format_number(f.components[a][n].real()) << ',' << format_number(f.components[a][n].imag());
        os << '\n';
    }
}

inline std::string to_csv(const ModeField& f) {
    std::ostringstream os;
    write_mode_field(os, f);
    return os.str();
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(s);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    return out;
}

inline double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError(what + ": not a number: '" + s + "'");
    }
    if (used != s.size()) throw ParseError(what + ": not a number: '" + s + "'");
    return v;
}

} // namespace detail

/// Reads the CSV written by write_mode_field. `kind` and `frequency_hz` in
/// the metadata line are optional; the arguments supply defaults.
inline ModeField read_mode_field(std::istream& is, ModeKind default_kind = ModeKind::mechanical,
                                 double default_frequency = 0.0) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("#", 0) != 0)
        throw ParseError("mode field CSV must start with a '# origin=... spacing=... counts=...' line");
    Grid3D g;
    ModeKind kind = default_kind;
    double omega = default_frequency;
    bool have_origin = false, have_spacing = false, have_counts = false;
    std::istringstream meta(line.substr(1));
    std::string token;
    while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw ParseError("malformed metadata token '" + token + "'");
        const auto key = token.substr(0, eq);
        const auto parts = detail::split(token.substr(eq + 1), ',');
        if (key == "origin" || key == "spacing" || key == "counts") {
            if (parts.size() != 3) throw ParseError("metadata '" + key + "' needs three values");
            for (int a = 0; a < 3; ++a) {
                const double v = detail::parse_number(parts[a], key);
                if (key == "origin") g.origin[a] = v;
                else if (key == "spacing") g.spacing[a] = v;
                else {
                    if (!(v >= 1.0) || v != std::floor(v)) throw ParseError("counts must be positive integers");
                    g.counts[a] = static_cast<std::size_t>(v);
                }
            }
            (key == "origin" ? have_origin : key == "spacing" ? have_spacing : have_counts) = true;
        } else if (key == "kind") {
            if (parts.size() != 1) throw ParseError("metadata 'kind' takes one value");
            if (parts[0] == "electromagnetic") kind = ModeKind::electromagnetic;
            else if (parts[0] == "mechanical") kind = ModeKind::mechanical;
            else throw ParseError("unknown mode kind '" + parts[0] + "'");
        } else if (key == "frequency_hz") {
            omega = units::hz_to_rad(detail::parse_number(token.substr(eq + 1), key));
        } else {
            throw ParseError("unknown metadata key '" + key + "'");
        }
    }
    if (!have_origin || !have_spacing || !have_counts)
        throw ParseError("metadata line must define origin, spacing and counts");

    ModeField f(g, kind, omega);
    if (!std::getline(is, line)) throw ParseError("missing column header");
    if (detail::split(line, ',').size() != 9) throw ParseError("column header must have 9 columns");
    std::size_t n = 0;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = detail::split(line, ',');
        const std::string where = "row " + std::to_string(row);
        if (cells.size() != 9) throw ParseError(where + ": expected 9 cells");
        if (n >= g.size()) throw ParseError(where + ": more rows than grid points");
        const auto r = g.point(n);
        for (int a = 0; a < 3; ++a) {
            const double x = detail::parse_number(cells[a], where);
            if (std::abs(x - r[a]) > 1e-9 * std::max(g.spacing[a], std::abs(r[a])))
                throw ParseError(where + ": coordinate does not match the grid ordering");
        }
        for (int a = 0; a < 3; ++a)
            f.components[a][n] = {detail::parse_number(cells[3 + 2 * a], where),
                                  detail::parse_number(cells[4 + 2 * a], where)};
        ++n;
    }
    if (n != g.size())
        throw ParseError("expected " + std::to_string(g.size()) + " rows, found " + std::to_string(n));
    return f;
}

inline ModeField load_mode_field(const std::filesystem::path& path, ModeKind default_kind = ModeKind::mechanical,
                                 double default_frequency = 0.0) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
    try {
        return read_mode_field(in, default_kind, default_frequency);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace pomt::coupling
