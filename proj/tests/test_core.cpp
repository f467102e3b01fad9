#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fepool/csv.hpp"
#include "fepool/error.hpp"
#include "fepool/series.hpp"
#include "fepool/standardize.hpp"

using namespace fepool;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

} // namespace

TEST_CASE("load_series parses a plain value column") {
    const auto path = write_temp("fepool_core_basic.csv", "v\n1\n2\n3\n");
    const LoadResult r = load_series(path, "v");
    CHECK(r.series.values == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(r.skipped_rows == 0);
}

TEST_CASE("load_series rejects degenerate input") {
    const auto header_only = write_temp("fepool_core_empty.csv", "v\n");
    CHECK_THROWS_AS(load_series(header_only, "v"), DataError);

    const auto bad_cell = write_temp("fepool_core_bad.csv", "v\n1\nx\n3\n");
    CHECK_THROWS_WITH_AS(load_series(bad_cell, "v"), doctest::Contains("row 2"), DataError);

    // with the skip flag the bad row is dropped and counted
    const LoadResult r = load_series(bad_cell, "v", true);
    CHECK(r.series.values == std::vector<double>{1.0, 3.0});
    CHECK(r.skipped_rows == 1);

    CHECK_THROWS_AS(load_series(bad_cell, "missing"), DataError);
    CHECK_THROWS_AS(load_series("/nonexistent/fepool.csv", "v"), DataError);
}

TEST_CASE("load_series_file splits long format by id") {
    const auto path = write_temp("fepool_core_long.csv", "id,v\nb,1\nb,2\na,9\nb,3\na,8\n");
    const auto all = load_series_file(path, "v", "id");
    REQUIRE(all.size() == 2);
    CHECK(all[0].series.id == "b"); // order of first appearance
    CHECK(all[0].series.values == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(all[1].series.id == "a");
    CHECK(all[1].series.values == std::vector<double>{9.0, 8.0});
}

TEST_CASE("history_slices yields one slice per target with no look-ahead") {
    TimeSeries s;
    s.id = "t";
    for (int i = 1; i <= 30; ++i) s.values.push_back(i);

    WindowSpec spec;
    spec.min_length = 25;

    const auto slices = history_slices(s, spec);
    REQUIRE(slices.size() == 5);
    for (std::size_t k = 0; k < slices.size(); ++k) {
        CHECK(slices[k].target == 26 + k);
        CHECK(slices[k].history.size() == 25 + k);
        // strictly earlier values only
        CHECK(slices[k].history.back() == doctest::Approx(slices[k].target - 1.0));
    }

    spec.feature_window = 10;
    const auto windowed = history_slices(s, spec);
    for (const auto& sl : windowed) {
        CHECK(sl.history.size() == 10);
        CHECK(sl.history.back() == doctest::Approx(sl.target - 1.0));
    }
}

TEST_CASE("history_slices boundary") {
    TimeSeries s;
    s.id = "t";
    for (int i = 0; i < 25; ++i) s.values.push_back(i);
    WindowSpec spec;
    spec.min_length = 25;
    CHECK_THROWS_WITH_AS(history_slices(s, spec), doctest::Contains("InsufficientHistory"),
                         DataError);
}

TEST_CASE("window spec validation") {
    WindowSpec spec;
    spec.min_length = 25;
    spec.feature_window = 30; // larger than min_length
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("standardize basics") {
    Matrix m(3, 1);
    m.at(0, 0) = 1;
    m.at(1, 0) = 2;
    m.at(2, 0) = 3;
    const Standardized s = standardize(m);
    CHECK(s.matrix.at(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s.matrix.at(1, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s.matrix.at(2, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.stats.mean[0] == doctest::Approx(2.0));
    CHECK(s.stats.sd[0] == doctest::Approx(1.0));
}

TEST_CASE("standardize handles constant columns and two-point columns") {
    Matrix m(3, 1, 5.0);
    const Standardized s = standardize(m);
    CHECK(s.stats.constant[0] == 1);
    for (std::size_t r = 0; r < 3; ++r) CHECK(s.matrix.at(r, 0) == 0.0);

    Matrix two(2, 1);
    two.at(0, 0) = 0;
    two.at(1, 0) = 4;
    const Standardized s2 = standardize(two);
    CHECK(s2.matrix.at(0, 0) == doctest::Approx(-0.70710678).epsilon(1e-8));
    CHECK(s2.matrix.at(1, 0) == doctest::Approx(0.70710678).epsilon(1e-8));

    Matrix one(1, 1, 3.0);
    CHECK_THROWS_AS(standardize(one), DataError);
}

TEST_CASE("standardize is idempotent and stats reproduce the training matrix") {
    Matrix m(5, 2);
    const double vals[5][2] = {{1, 10}, {4, 12}, {2, 18}, {8, 11}, {5, 13}};
    for (std::size_t r = 0; r < 5; ++r) {
        for (std::size_t c = 0; c < 2; ++c) m.at(r, c) = vals[r][c];
    }
    const Standardized s1 = standardize(m);
    const Standardized s2 = standardize(s1.matrix);
    for (std::size_t i = 0; i < s1.matrix.data.size(); ++i) {
        CHECK(s2.matrix.data[i] == doctest::Approx(s1.matrix.data[i]).epsilon(1e-12));
    }

    // applying stored stats must reproduce the standardized training matrix exactly
    const Matrix replay = apply_standardization(s1.stats, m);
    CHECK(replay.data == s1.matrix.data);

    // row variant agrees with the matrix variant
    const auto row = apply_standardization(s1.stats, m.row(3));
    CHECK(row[0] == s1.matrix.at(3, 0));
    CHECK(row[1] == s1.matrix.at(3, 1));
}

TEST_CASE("series validation rejects non-finite values") {
    TimeSeries s;
    s.id = "x";
    s.values = {1.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(s.validate(), DataError);
}
