#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "hfmargin/report.hpp"
#include "hfmargin/rng.hpp"

using namespace hfmargin;

namespace {

std::vector<double> student(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.student_t(4.0);
    return v;
}

MarginReport small_report() {
    static const auto a = student(300, 1);
    static const auto b = student(300, 2);
    const std::vector<LabelledSeries> data{{"09:00", a}, {"10:00", b}};
    const std::vector<double> cov{0.95, 0.998};
    const std::vector<Model> models{Model::Gaussian, Model::Historical};
    return margin_table(data, full_grid(cov, models));
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Fnv1a, KnownVectors) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(FmtNum, FixedAndSpecial) {
    EXPECT_EQ(fmt_num(1.23456789, 4), "1.2346");
    EXPECT_EQ(fmt_num(-0.00001, 4), "0.0000");
    EXPECT_EQ(fmt_num(2.0, 0), "2");
    EXPECT_EQ(fmt_num(std::numeric_limits<double>::quiet_NaN()), "na");
    EXPECT_EQ(fmt_num(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(fmt_num(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Header, FirstLineDeclaresHashAndPreset) {
    std::ostringstream out;
    write_margins_csv(out, {"0123456789abcdef", "calendar"}, small_report());
    EXPECT_EQ(first_line(out.str()), "# hfmargin config_hash=0123456789abcdef scaling=calendar");
}

TEST(MarginsCsv, ColumnsAndAvailability) {
    std::ostringstream out;
    write_margins_csv(out, {"h", "calendar"}, small_report());
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    EXPECT_EQ(line, "series,model,coverage,waiting_days,side,margin,available,scaling_preset");
    std::size_t rows = 0;
    std::size_t na = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.find(",na,false,") != std::string::npos) ++na;
    }
    EXPECT_EQ(rows, 16U);
    // Historical at 99.8% on 300 observations: both series, both sides.
    EXPECT_EQ(na, 4U);
}

TEST(MarginsJson, ParsesAndCarriesHeader) {
    std::ostringstream out;
    write_margins_json(out, {"abc", "session"}, small_report());
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_EQ(j.at("config_hash"), "abc");
    EXPECT_EQ(j.at("scaling"), "session");
    ASSERT_EQ(j.at("rows").size(), 16U);
    bool saw_null = false;
    for (const auto& row : j.at("rows")) {
        if (row.at("margin").is_null()) {
            saw_null = true;
            EXPECT_FALSE(row.at("available").get<bool>());
        }
    }
    EXPECT_TRUE(saw_null);
}

TEST(Reports, ByteIdentical) {
    std::ostringstream a;
    std::ostringstream b;
    write_margins_csv(a, {"h", "calendar"}, small_report());
    write_margins_csv(b, {"h", "calendar"}, small_report());
    EXPECT_EQ(a.str(), b.str());

    const auto v = student(500, 3);
    std::vector<TailRow> rows{{"x", estimate_tail(v, Side::Long)}, {"x", estimate_tail(v, Side::Short)}};
    std::ostringstream c;
    std::ostringstream d;
    write_tails_csv(c, {"h", "calendar"}, rows);
    write_tails_csv(d, {"h", "calendar"}, rows);
    EXPECT_EQ(c.str(), d.str());
}

TEST(StatsCsv, OneRowPerSeries) {
    const auto v = student(200, 4);
    std::vector<StatsRow> rows{{"price_changes", "09:00", moment_summary(v), ks_normality(v, 100, 1), ljung_box(v)}};
    std::ostringstream out;
    write_stats_csv(out, {"h", "calendar"}, rows);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    EXPECT_EQ(line, "panel,series,n,mean,std_dev,skewness,excess_kurtosis,min,q25,median,q75,max,ks_d,ks_p,lb_q,lb_p");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("price_changes,09:00,200,", 0), 0U);
}
