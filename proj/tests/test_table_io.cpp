#include "balmetric/table_io.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "balmetric/reproduce.hpp"

using namespace balmetric;

TEST(Csv, RoundTripIsExact) {
    const auto t = cp1_trajectory(OperatorKind::TK, DiagonalMetric{1, 17, 36}, 5,
                                  NormalizationMode::balanced_first_entry_one);
    const auto rows = table_rows(t);
    std::stringstream ss;
    write_csv(ss, rows);
    const auto back = read_csv(ss);
    ASSERT_EQ(back.size(), rows.size());
    EXPECT_EQ(back, rows);
    EXPECT_FALSE(back[0].sigma_tilde.has_value());
    EXPECT_TRUE(back[1].sigma_tilde.has_value());
}

TEST(Csv, HeaderAndBlankCells) {
    std::vector<TableRow> rows{{0, {1.0, 0.1}, 0.5, std::nullopt, 2.0}, {1, {1.0, 1.0 / 3.0}, 0.25, 0.5, std::nullopt}};
    std::stringstream ss;
    write_csv(ss, rows);
    std::string header, first, second;
    std::getline(ss, header);
    std::getline(ss, first);
    std::getline(ss, second);
    EXPECT_EQ(header, "r,a_0,a_1,err,sigma_tilde,bnd");
    EXPECT_EQ(first, "0,1,0.10000000000000001,0.5,,2");
    EXPECT_EQ(second, "1,1,0.33333333333333331,0.25,0.5,");
}

TEST(Csv, RejectsMalformedInput) {
    std::stringstream empty;
    EXPECT_THROW(read_csv(empty), ValidationError);
    std::stringstream bad_header("x,y\n");
    EXPECT_THROW(read_csv(bad_header), ValidationError);
    std::stringstream bad_cell("r,a_0,err,sigma_tilde,bnd\n0,abc,1,,\n");
    EXPECT_THROW(read_csv(bad_cell), ValidationError);
    std::stringstream short_row("r,a_0,err,sigma_tilde,bnd\n0,1\n");
    EXPECT_THROW(read_csv(short_row), ValidationError);
}

TEST(NumberList, Parses) {
    EXPECT_EQ(parse_number_list("1,17,36"), (std::vector<double>{1, 17, 36}));
    EXPECT_EQ(parse_number_list(" 2e10 , 0.5"), (std::vector<double>{2e10, 0.5}));
    EXPECT_THROW(parse_number_list("1,,2"), ValidationError);
    EXPECT_THROW(parse_number_list("1;2"), ValidationError);
}

TEST(Json, SchemaAndRoundTrip) {
    const auto t = cp1_trajectory(OperatorKind::Tnu, DiagonalMetric{1, 25, 0.07, 13}, 3,
                                  NormalizationMode::balanced_first_entry_one);
    const auto rows = table_rows(t);
    TableMeta meta{"Tnu", 1, 3, "balanced", 1e-11, 1e-13};
    const auto j = to_json(meta, rows);
    EXPECT_EQ(j["meta"]["operator"], "Tnu");
    EXPECT_EQ(j["meta"]["k"], 3);
    EXPECT_EQ(j["meta"]["normalization"], "balanced");
    EXPECT_TRUE(j["meta"]["tolerances"].contains("conv_tol"));
    ASSERT_EQ(j["rows"].size(), 4u);
    EXPECT_TRUE(j["rows"][0]["sigma_tilde"].is_null());
    EXPECT_EQ(rows_from_json(j), rows);
    std::stringstream ss;
    write_json(ss, meta, rows);
    EXPECT_EQ(rows_from_json(nlohmann::json::parse(ss.str())), rows);
}

TEST(Reproduce, UnknownTable) {
    EXPECT_THROW(reproduce("nope"), ValidationError);
    EXPECT_THROW(example_metric("nope"), ValidationError);
}

TEST(Reproduce, SmallTablesPass) {
    for (const char* id : {"tk-k2", "tnu-k3"}) {
        const auto report = reproduce(id);
        EXPECT_TRUE(report.passed()) << id;
        EXPECT_EQ(report.bound_violations, 0u);
        EXPECT_EQ(report.computed.size(), report.rows.size());
    }
}

TEST(Reproduce, ComparisonFlagsPerturbedCells) {
    auto report = reproduce("tk-k2");
    report.computed[2][1] += 1e-3;
    report.failures.clear();
    detail::compare(golden_table("tk-k2"), report);
    ASSERT_EQ(report.failures.size(), 1u);
    EXPECT_EQ(report.failures[0].r, 2);
    EXPECT_EQ(report.failures[0].column, "a_1");
}
