#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace pomt;
using pomt::testing::rel_err;

TEST(Params, JsonRoundTrip) {
    const auto p = TransducerParams::nominal();
    const auto back = params_from_json(params_to_json(p));
    EXPECT_LE(rel_err(back.mechanical_frequency, p.mechanical_frequency), 1e-15);
    EXPECT_LE(rel_err(*back.external_mechanical_coupling, *p.external_mechanical_coupling), 1e-15);
    EXPECT_EQ(back.pump_wavelength, p.pump_wavelength);
    EXPECT_FALSE(back.mechanical_linewidth);
    EXPECT_EQ(params_to_json(back).dump(), params_to_json(p).dump());
}

TEST(Params, HzOnDisk) {
    const auto j = params_to_json(TransducerParams::nominal());
    EXPECT_NEAR(j.at("mechanical_frequency_hz").get<double>(), 3.285e9, 1e-3);
    EXPECT_NEAR(j.at("ring_coupling_hz").get<double>(), 1.6425e9, 1e-3);
}

TEST(Params, UnknownAndMissingKeys) {
    auto j = params_to_json(TransducerParams::nominal());
    j["bogus_hz"] = 1.0;
    EXPECT_THROW(params_from_json(j), ValidationError);
    j = params_to_json(TransducerParams::nominal());
    j.erase("bus_coupling_hz");
    EXPECT_THROW(params_from_json(j), ValidationError);
    j = params_to_json(TransducerParams::nominal());
    j["bus_coupling_hz"] = "fast";
    EXPECT_THROW(params_from_json(j), ValidationError);
    EXPECT_THROW(params_from_json(nlohmann::json::array()), ValidationError);
}

TEST(Params, InvalidValuesAreRejectedOnLoad) {
    auto j = params_to_json(TransducerParams::nominal());
    j["ring1_linewidth_hz"] = -5.0;
    EXPECT_THROW(params_from_json(j), ValidationError);
}

TEST(Params, LoadFromFile) {
    const auto dir = std::filesystem::temp_directory_path() / "pomt_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "p.json";
    {
        std::ofstream out(path);
        out << params_to_json(TransducerParams::nominal()).dump(2);
    }
    EXPECT_NO_THROW(load_params(path.string()));
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    EXPECT_THROW(load_params(path.string()), ParseError);
    EXPECT_THROW(load_params((dir / "missing.json").string()), Error);
    std::filesystem::remove_all(dir);
}

TEST(Sweep, FormatIsTwelveDigitScientific) {
    EXPECT_EQ(format_number(1.0), "1.00000000000e+00");
    EXPECT_EQ(format_number(-3.285e9), "-3.28500000000e+09");
    EXPECT_EQ(format_number(0.0), "0.00000000000e+00");
}

TEST(Sweep, CsvRoundTrip) {
    SweepResult t;
    t.add_column("a", {1.0, 2.5e-7, -3.0}).add_column("b", {0.0, 1e300, 7.0});
    const auto text = to_csv(t);
    const auto back = read_csv(text);
    EXPECT_EQ(back, t);
    EXPECT_EQ(to_csv(back), text);
}

TEST(Sweep, ColumnChecks) {
    SweepResult t;
    t.add_column("a", {1.0, 2.0});
    EXPECT_THROW(t.add_column("b", {1.0}), ValidationError);
    EXPECT_THROW(t.add_column("a", {1.0, 2.0}), ValidationError);
    EXPECT_THROW(t.column("zz"), ValidationError);
}

TEST(Sweep, MalformedCsv) {
    EXPECT_THROW(read_csv(std::string_view("a,b\n1,2\n3\n")), ParseError);
    EXPECT_THROW(read_csv(std::string_view("a\nx\n")), ParseError);
    EXPECT_THROW(read_csv(std::string_view("")), ParseError);
}

TEST(Sweep, AtomicWrite) {
    const auto dir = std::filesystem::temp_directory_path() / "pomt_atomic_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.csv";
    write_file_atomic(path, "hello\n");
    write_file_atomic(path, "world\n");
    std::ifstream in(path);
    std::string s;
    std::getline(in, s);
    EXPECT_EQ(s, "world");
    EXPECT_FALSE(std::filesystem::exists(dir / "out.csv.tmp"));
    std::filesystem::remove_all(dir);
}
