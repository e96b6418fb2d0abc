#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace pomt;
using namespace pomt::coupling;
using pomt::testing::rel_err;

namespace {

constexpr double kL = 1e-5;  // box length along z, m
const double kQ = units::two_pi * 0.75 / kL;

/// Thin column: single points in x and y, n points over [0, L] in z.
Grid3D column(std::size_t n) {
    Grid3D g;
    g.spacing = {1e-6, 1e-6, kL / static_cast<double>(n - 1)};
    g.counts = {1, 1, n};
    return g;
}

Grid3D cube(std::size_t n, double side = kL) {
    Grid3D g;
    const double h = side / static_cast<double>(n - 1);
    g.spacing = {h, h, h};
    g.counts = {n, n, n};
    return g;
}

MaterialTensorSet z_cut_material(double h33) {
    MaterialTensorSet m;
    m.h(2, 2) = h33;
    m.eps_rf = 9.5;
    m.eps_ir = 3.67;
    m.eta = Eigen::Matrix3d::Identity() / m.eps_rf;
    m.density = 3255.0;
    return m;
}

Complex plane_wave_overlap(std::size_t n) {
    const auto g = column(n);
    const auto e = plane_wave(g, ModeKind::electromagnetic, 1e15, {0, 0, -kQ}, {0, 0, 1});
    const auto w = plane_wave(g, ModeKind::mechanical, 2e10, {0, 0, kQ}, {0, 0, 1}, 0.7);
    return piezo_overlap(e, w, 3, 3, 3);
}

} // namespace

TEST(Grid, VolumeAndWeights) {
    const auto g = cube(5, 2.0);
    EXPECT_DOUBLE_EQ(g.volume(), 8.0);
    std::vector<double> ones(g.size(), 1.0);
    EXPECT_NEAR(integrate(g, ones), 8.0, 1e-14);
    Grid3D bad = g;
    bad.spacing[1] = 0.0;
    EXPECT_THROW(validate(bad), ValidationError);
}

TEST(Voigt, IndexMapping) {
    EXPECT_EQ(voigt_index(1, 1), 1);
    EXPECT_EQ(voigt_index(2, 2), 2);
    EXPECT_EQ(voigt_index(3, 3), 3);
    EXPECT_EQ(voigt_index(2, 3), 4);
    EXPECT_EQ(voigt_index(3, 2), 4);
    EXPECT_EQ(voigt_index(1, 3), 5);
    EXPECT_EQ(voigt_index(3, 1), 5);
    EXPECT_EQ(voigt_index(1, 2), 6);
    EXPECT_EQ(voigt_index(2, 1), 6);
    // c_2223 -> c_24
    EXPECT_EQ(std::make_pair(voigt_index(2, 2), voigt_index(2, 3)), std::make_pair(2, 4));
    for (int v = 1; v <= 6; ++v) EXPECT_EQ(voigt_index(voigt_pair(v).first, voigt_pair(v).second), v);
    EXPECT_THROW(voigt_index(0, 1), ValidationError);
    EXPECT_THROW(voigt_pair(7), ValidationError);
}

TEST(Strain, UniformTranslationIsStrainFree) {
    const auto g = cube(5);
    ModeField w(g, ModeKind::mechanical, 1.0);
    for (std::size_t n = 0; n < g.size(); ++n) w.set(n, {1.0, Complex(0.0, 2.0), -3.0});
    const auto x = strain_field(w);
    for (const auto& row : x)
        for (const auto& comp : row)
            for (auto v : comp) EXPECT_EQ(v, Complex(0.0, 0.0));
}

TEST(Strain, AffineFieldIsExact) {
    const auto g = cube(6);
    const double alpha = 3.7e3;
    ModeField w(g, ModeKind::mechanical, 1.0);
    for (std::size_t n = 0; n < g.size(); ++n) w.set(n, {alpha * g.point(n)[0], 0.0, 0.0});
    const auto x11 = strain_component(w, 1, 1);
    for (auto v : x11) EXPECT_NEAR(std::abs(v - alpha), 0.0, 1e-9 * alpha);
    for (auto v : strain_component(w, 1, 2)) EXPECT_LE(std::abs(v), 1e-12 * alpha);
}

TEST(Strain, PlaneWaveDerivativeConvergesSecondOrder) {
    std::vector<double> err;
    for (std::size_t n : {101u, 201u, 401u}) {
        const auto g = column(n);
        const auto w = plane_wave(g, ModeKind::mechanical, 1.0, {0, 0, kQ}, {0, 0, 1});
        const auto d = strain_component(w, 3, 3);
        double worst = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            worst = std::max(worst, std::abs(d[k] - Complex(0.0, kQ) * w.components[2][k]) / kQ);
        err.push_back(worst);
    }
    EXPECT_GE(std::log2(err[0] / err[1]), 1.9);
    EXPECT_GE(std::log2(err[1] / err[2]), 1.9);
}

TEST(Strain, DegenerateAxisIsNamed) {
    Grid3D g = cube(4);
    g.counts[1] = 2;
    const ModeField w(g, ModeKind::mechanical, 1.0);
    try {
        strain_field(w);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("axis 2"), std::string::npos);
    }
    EXPECT_THROW(strain_component(w, 2, 2), ValidationError);
}

TEST(ModeVolume, UniformFieldFillsTheBox) {
    const auto g = cube(7);
    const auto w = plane_wave(g, ModeKind::mechanical, 1.0, {kQ, 0, 0}, {0, 1, 0});
    EXPECT_LE(rel_err(mech_mode_volume(w), g.volume()), 1e-12);
}

TEST(ModeVolume, ScaleInvariance) {
    const auto g = cube(9);
    const auto w = gaussian_sheet(g, ModeKind::mechanical, 1.0, 2, 0.4 * kL, 0.2 * kL, {0, 0, 1});
    const double v = mech_mode_volume(w);
    for (double a : {2.0, 1e-3, 7.5e4}) EXPECT_LE(rel_err(mech_mode_volume(w.scaled(a)), v), 1e-10);
    const Eigen::Matrix3d eta = Eigen::Matrix3d::Identity() / 4.0;
    const double ve = em_mode_volume(w, eta);
    EXPECT_LE(rel_err(em_mode_volume(w.scaled(Complex(0.0, 3.0)), eta), ve), 1e-10);
}

TEST(ModeVolume, HalfBoxTopHat) {
    // even point count: the step sits midway between nodes
    Grid3D g;
    g.counts = {10, 10, 10};
    const double h = kL / 9.0;
    g.spacing = {h, h, h};
    const auto w = top_hat(g, ModeKind::mechanical, 1.0, {-1.0, -1.0, -1.0}, {4.5 * h, 1.0, 1.0}, {1, 0, 0});
    EXPECT_LE(rel_err(mech_mode_volume(w), g.volume() / 2.0), 1e-9);
}

TEST(ModeVolume, ZeroFieldIsRejected) {
    const ModeField w(cube(4), ModeKind::mechanical, 1.0);
    EXPECT_THROW(mech_mode_volume(w), ValidationError);
}

TEST(EffectiveMass, UniformDensityNormalizedMode) {
    const auto g = cube(9);
    const auto w = normalize_mechanical(gaussian_sheet(g, ModeKind::mechanical, 1.0, 0, 0.5 * kL, 0.3 * kL, {1, 0, 0}));
    const double rho = 3255.0;
    EXPECT_LE(rel_err(effective_mass(w, w, rho), Complex(rho * mech_mode_volume(w), 0.0)), 1e-12);
    EXPECT_GT(effective_mass(w, w, rho).real(), 0.0);
}

TEST(EffectiveMass, OrthogonalPlaneWavesOnPeriodicBox) {
    const auto g = cube(17);
    const double q = units::two_pi / kL;
    const auto a = plane_wave(g, ModeKind::mechanical, 1.0, {q, 0, 0}, {0, 0, 1});
    const auto b = plane_wave(g, ModeKind::mechanical, 1.0, {2 * q, 0, q}, {0, 0, 1});
    const double rho = 2200.0;
    const Complex m_eff = effective_mass(a, a, rho);
    EXPECT_LE(std::abs(effective_mass(a, b, rho)), 1e-10 * std::abs(m_eff));
}

TEST(Overlap, PlaneWaveClosedFormAndConvergence) {
    const double a = 0.7;
    std::vector<double> err;
    for (std::size_t n : {1001u, 2001u, 4001u}) {
        const auto g = column(n);
        const Complex exact = g.volume() * Complex(0.0, kQ) * a;
        err.push_back(rel_err(plane_wave_overlap(n), exact));
    }
    EXPECT_LE(err.back(), 1e-6);
    EXPECT_GE(std::log2(err[0] / err[1]), 1.9);
    EXPECT_GE(std::log2(err[1] / err[2]), 1.9);
}

TEST(Overlap, OptomechanicalPlaneWave) {
    std::vector<double> err;
    for (std::size_t n : {1001u, 2001u, 4001u}) {
        const auto g = column(n);
        const auto e = plane_wave(g, ModeKind::electromagnetic, 1e15, {0, 0, 3.0 * kQ}, {1, 0, 0});
        const auto w = plane_wave(g, ModeKind::mechanical, 2e10, {0, 0, kQ}, {0, 0, 1});
        // |E_x|^2 = 1, so the integral is the endpoint difference of w_z across the column
        const Complex exact = g.spacing[0] * g.spacing[1] * (std::polar(1.0, kQ * kL) - 1.0);
        err.push_back(rel_err(optomech_overlap(e, w, 1, 1, 3, 3), exact));
    }
    EXPECT_LE(err.back(), 1e-6);
    EXPECT_GE(std::log2(err[0] / err[1]), 1.9);
}

TEST(PiezoCoupling, HandEvaluatedPrefactor) {
    const auto g = column(4001);
    const auto mat = z_cut_material(0.145);
    const double we = units::hz_to_rad(3.285e9), wm = units::hz_to_rad(3.285e9) * 1.01;
    const auto e = plane_wave(g, ModeKind::electromagnetic, we, {0, 0, -kQ}, {0, 0, 1}, 12.0);
    const auto w = plane_wave(g, ModeKind::mechanical, wm, {0, 0, kQ}, {0, 0, 1}, 3e-9);
    // normalized fields have unit magnitude, so g = -h33 q sqrt(we/wm) / (4 sqrt(eta rho))
    const double eta = 1.0 / mat.eps_rf;
    const double expected = -0.145 * kQ * std::sqrt(we / wm) / (4.0 * std::sqrt(eta * mat.density));
    const Complex got = piezo_coupling(e, w, mat, 3, 3, 3);
    EXPECT_LE(rel_err(got, Complex(expected, 0.0)), 1e-6);
    EXPECT_LE(rel_err(piezo_coupling(e, w, mat), got), 1e-14);
}

TEST(PiezoCoupling, ScaleInvariance) {
    const auto g = cube(9);
    const auto mat = z_cut_material(0.145);
    const auto e = gaussian_sheet(g, ModeKind::electromagnetic, 2e10, 2, 0.5 * kL, 0.3 * kL, {0, 0, 1});
    const auto w = plane_wave(g, ModeKind::mechanical, 2e10, {0, 0, kQ}, {0, 0, 1});
    const Complex base = piezo_coupling(e, w, mat);
    for (double a : {3.0, 1e-4, 2e6}) {
        EXPECT_LE(rel_err(piezo_coupling(e.scaled(a), w, mat), base), 1e-10);
        EXPECT_LE(rel_err(piezo_coupling(e, w.scaled(a), mat), base), 1e-10);
    }
}

TEST(PiezoCoupling, RealFieldsGivePurelyImaginaryCoupling) {
    const auto g = cube(9);
    auto mat = z_cut_material(0.145);
    mat.h(0, 4) = 0.03;
    mat.h(2, 0) = -0.02;
    const auto e = gaussian_sheet(g, ModeKind::electromagnetic, 2e10, 2, 0.5 * kL, 0.3 * kL, {0.3, 0, 1});
    const auto w = gaussian_sheet(g, ModeKind::mechanical, 2e10, 2, 0.4 * kL, 0.2 * kL, {0.5, 0, 1});
    const Complex gval = piezo_coupling(e, w, mat);
    EXPECT_EQ(gval.real(), 0.0);
    EXPECT_NE(gval.imag(), 0.0);
}

TEST(PiezoCoupling, OrthogonalPolarizationGivesZero) {
    const auto g = column(101);
    MaterialTensorSet mat = z_cut_material(0.0);
    mat.h(0, 4) = 0.05;   // h_15
    mat.h(2, 0) = -0.04;  // h_31
    const auto e = plane_wave(g, ModeKind::electromagnetic, 1e10, {0, 0, 0}, {1, 0, 0});
    const auto w = plane_wave(g, ModeKind::mechanical, 1e10, {0, 0, kQ}, {0, 0, 1});
    EXPECT_EQ(piezo_coupling(e, w, mat), Complex(0.0, 0.0));
}

TEST(PiezoCoupling, ZeroTensorGivesZero) {
    const auto g = column(101);
    const auto e = plane_wave(g, ModeKind::electromagnetic, 1e10, {0, 0, -kQ}, {0, 0, 1});
    const auto w = plane_wave(g, ModeKind::mechanical, 1e10, {0, 0, kQ}, {0, 0, 1});
    EXPECT_EQ(piezo_coupling(e, w, z_cut_material(0.0)), Complex(0.0, 0.0));
    EXPECT_EQ(piezo_coupling(e, w, z_cut_material(0.0), 3, 3, 3), Complex(0.0, 0.0));
}

TEST(PiezoCoupling, DisjointSupportsGiveExactZero) {
    const auto g = column(201);
    const auto mat = z_cut_material(0.145);
    const auto e = top_hat(g, ModeKind::electromagnetic, 1e10, {-1, -1, 0.0}, {1, 1, 0.3 * kL}, {0, 0, 1});
    const auto w = top_hat(g, ModeKind::mechanical, 1e10, {-1, -1, 0.6 * kL}, {1, 1, kL}, {0, 0, 1});
    EXPECT_EQ(piezo_coupling(e, w, mat), Complex(0.0, 0.0));
    EXPECT_EQ(optomech_coupling(e, w, mat), Complex(0.0, 0.0));
}

TEST(PiezoCoupling, UnknownElementIsNamed) {
    const auto g = column(101);
    const auto e = plane_wave(g, ModeKind::electromagnetic, 1e10, {0, 0, -kQ}, {0, 0, 1});
    const auto w = plane_wave(g, ModeKind::mechanical, 1e10, {0, 0, kQ}, {0, 0, 1});
    try {
        piezo_coupling(e, w, z_cut_material(unknown()));
        FAIL();
    } catch (const ValidationError& err) {
        EXPECT_NE(std::string(err.what()).find("h_33"), std::string::npos);
    }
}

TEST(PiezoCoupling, FieldKindsAreChecked) {
    const auto g = column(101);
    const auto w = plane_wave(g, ModeKind::mechanical, 1e10, {0, 0, kQ}, {0, 0, 1});
    EXPECT_THROW(piezo_coupling(w, w, z_cut_material(0.1)), ValidationError);
}

TEST(OptomechCoupling, LinearInPhotoelasticElement) {
    const auto g = column(401);
    MaterialTensorSet mat = z_cut_material(0.0);
    mat.p(0, 2) = 0.1;  // p_13
    const auto e = gaussian_sheet(g, ModeKind::electromagnetic, 1.2e15, 2, 0.5 * kL, 0.3 * kL, {1, 0, 0});
    const auto w = plane_wave(g, ModeKind::mechanical, 2e10, {0, 0, kQ}, {0, 0, 1});
    const Complex g1 = optomech_coupling(e, w, mat);
    EXPECT_NE(g1, Complex(0.0, 0.0));
    mat.p(0, 2) = 0.2;
    EXPECT_LE(rel_err(optomech_coupling(e, w, mat), 2.0 * g1), 1e-14);

    // direct quadrature of the same expression
    const double eta_eff = 1.0 / mat.eps_ir;
    const double v_em = em_mode_volume(e, mat.eta), v_m = mech_mode_volume(w);
    const auto en = normalize_em(e, mat.eta, eta_eff);
    const auto wn = normalize_mechanical(w);
    const auto dw = strain_component(wn, 3, 3);
    std::vector<Complex> f(g.size());
    for (std::size_t n = 0; n < f.size(); ++n) f[n] = std::norm(en.components[0][n]) * dw[n];
    const double eps0 = units::epsilon_0;
    const double pref = std::sqrt(units::hbar / (32.0 * mat.density * v_m * eps0 * eps0 * eta_eff * eta_eff * v_em *
                                                 v_em * w.frequency));
    EXPECT_LE(rel_err(optomech_coupling(e, w, mat), pref * 0.2 * integrate(g, f)), 1e-12);
}

TEST(OptomechCoupling, ScaleInvariance) {
    const auto g = cube(9);
    MaterialTensorSet mat = z_cut_material(0.0);
    mat.p(2, 2) = -0.107;
    const auto e = gaussian_sheet(g, ModeKind::electromagnetic, 1.2e15, 2, 0.5 * kL, 0.3 * kL, {0, 0, 1});
    const auto w = gaussian_sheet(g, ModeKind::mechanical, 2e10, 2, 0.3 * kL, 0.2 * kL, {0, 0, 1});
    const Complex base = optomech_coupling(e, w, mat);
    EXPECT_LE(rel_err(optomech_coupling(e.scaled(5.0), w.scaled(1e-6), mat), base), 1e-10);
}

TEST(Materials, TensorSetFromRecord) {
    const auto records = materials::load_materials(POMT_DATA_DIR "/materials.csv");
    const auto aln = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.name == "AlN"; });
    ASSERT_NE(aln, records.end());
    const auto rf = tensor_set_from_record(*aln, Band::rf);
    EXPECT_EQ(rf.h(2, 2), 0.145);
    EXPECT_EQ(rf.p(2, 2), -0.107);
    EXPECT_DOUBLE_EQ(rf.density, 3255.0);
    EXPECT_DOUBLE_EQ(rf.eta(0, 0), 1.0 / 9.5);
    EXPECT_NO_THROW(validate(rf));
    const auto ir = tensor_set_from_record(*aln, Band::ir);
    EXPECT_DOUBLE_EQ(ir.eta(2, 2), 1.0 / 3.67);

    const auto sto = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.name.starts_with("SrTiO3"); });
    ASSERT_NE(sto, records.end());
    EXPECT_THROW(tensor_set_from_record(*sto, Band::rf), ValidationError);

    const auto ta = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.name == "beta-Ta2O5"; });
    ASSERT_NE(ta, records.end());
    EXPECT_THROW(tensor_set_from_record(*ta, Band::rf).h_ijk(3, 3, 3), ValidationError);
}

TEST(Materials, TensorSetValidation) {
    auto m = z_cut_material(0.1);
    EXPECT_NO_THROW(validate(m));
    m.eta(0, 1) = 0.5;
    EXPECT_THROW(validate(m), ValidationError);
    m = z_cut_material(0.1);
    m.eta(1, 1) = -1.0;
    EXPECT_THROW(validate(m), ValidationError);
    m = z_cut_material(0.1);
    Eigen::Matrix<double, 3, 6> e = Eigen::Matrix<double, 3, 6>::Zero();
    e(2, 2) = 0.1 * m.eps_rf;
    m.e = e;
    EXPECT_NO_THROW(validate(m));
    m.h(2, 2) = 0.2;
    EXPECT_THROW(validate(m), ValidationError);
    m = z_cut_material(0.1);
    m.c(0, 1) = 1.0;
    EXPECT_THROW(validate(m), ValidationError);
    EXPECT_DOUBLE_EQ(h_from_e(m.eta, e)(2, 2), 0.1);
}

TEST(ExternalCoupling, FromElectromechanicalCoupling) {
    const auto p = TransducerParams::nominal();
    const double g = p.electromechanical_coupling, big = p.microwave_linewidth;
    EXPECT_DOUBLE_EQ(gamma_ex_from_gEM(g, big, big), 4.0 * g * g / big);
    EXPECT_EQ(gamma_ex_from_gEM(0.0, big, big), 0.0);
    const double nominal = gamma_ex_from_gEM(g, big, big - p.microwave_intrinsic_linewidth);
    EXPECT_NEAR(units::rad_to_hz(nominal) / 1e6, 2.61, 0.005);
    EXPECT_THROW(gamma_ex_from_gEM(g, big, 2.0 * big), ValidationError);
}

TEST(ModeFieldIo, CsvRoundTrip) {
    Grid3D g = cube(4);
    g.origin = {-1e-6, 0.0, 2e-6};
    const auto w = plane_wave(g, ModeKind::mechanical, 1.234e10, {kQ, 0, 0.3 * kQ}, {0.1, Complex(0, 1), -2.0}, 0.3);
    const std::string text = to_csv(w);
    std::istringstream in(text);
    const auto back = read_mode_field(in);
    // 12 significant digits on disk
    EXPECT_EQ(back.grid.counts, w.grid.counts);
    for (int a = 0; a < 3; ++a) {
        EXPECT_LE(rel_err(back.grid.spacing[a], w.grid.spacing[a]), 1e-11);
        EXPECT_NEAR(back.grid.origin[a], w.grid.origin[a], 1e-17);
    }
    EXPECT_EQ(back.kind, w.kind);
    EXPECT_LE(rel_err(back.frequency, w.frequency), 1e-11);
    for (int a = 0; a < 3; ++a)
        for (std::size_t n = 0; n < g.size(); ++n)
            EXPECT_LE(std::abs(back.components[a][n] - w.components[a][n]), 1e-11 * std::abs(w.components[a][n]) + 1e-300);
}

TEST(ModeFieldIo, MalformedInputIsRejected) {
    std::istringstream in("# origin=0,0,0 spacing=1,1,1 counts=2,1,1 kind=mechanical frequency_hz=1\n"
                          "x,y,z,Re_fx,Im_fx,Re_fy,Im_fy,Re_fz,Im_fz\n0,0,0,1,0,0,0,0,0\n");
    EXPECT_THROW(read_mode_field(in), Error);
}
