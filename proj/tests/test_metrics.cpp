#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "uavsig/metrics.hpp"

using namespace uavsig;

namespace {

VehicleRecord rec(long depart, long arrive, double km = 1.0, double fuel = 0.2) {
    return {"v", depart, arrive, km * 1000.0, fuel, 0};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(TravelTime, FiveValues) {
    const auto s = travel_time_stats(std::vector<double>{3, 1, 5, 2, 4});
    EXPECT_DOUBLE_EQ(s.mean, 3.0);
    EXPECT_DOUBLE_EQ(s.median, 3.0);
    EXPECT_DOUBLE_EQ(s.min, 1.0);
    EXPECT_DOUBLE_EQ(s.max, 5.0);
    EXPECT_DOUBLE_EQ(s.p25, 2.0);
    EXPECT_DOUBLE_EQ(s.p75, 4.0);
}

TEST(TravelTime, Singleton) {
    const auto s = travel_time_stats(std::vector<VehicleRecord>{rec(8, 50)});
    for (double v : {s.mean, s.min, s.p25, s.median, s.p75, s.max}) EXPECT_DOUBLE_EQ(v, 42.0);
    EXPECT_DOUBLE_EQ(s.std, 0.0);
}

TEST(TravelTime, PopulationStd) {
    EXPECT_DOUBLE_EQ(travel_time_stats(std::vector<double>{2, 4}).std, 1.0);
}

TEST(TravelTime, EmptyIsAnError) {
    EXPECT_THROW(travel_time_stats(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(travel_time_stats(std::vector<VehicleRecord>{}), std::invalid_argument);
}

TEST(Percentile, LinearInterpolation) {
    const std::vector<double> v{10, 20, 30, 40};
    EXPECT_DOUBLE_EQ(percentile(v, 0.0), 10.0);
    EXPECT_DOUBLE_EQ(percentile(v, 0.25), 17.5);
    EXPECT_DOUBLE_EQ(percentile(v, 0.5), 25.0);
    EXPECT_DOUBLE_EQ(percentile(v, 1.0), 40.0);
    EXPECT_THROW(percentile(v, 1.5), std::invalid_argument);
    EXPECT_THROW(percentile({}, 0.5), std::invalid_argument);
}

TEST(Emissions, TenKilometresOnTwoLitres) {
    const EmissionModel model;
    const auto e = aggregate_emissions({rec(0, 100, 10.0, 2.014)}, model);
    EXPECT_NEAR(e.fuel_l_per_100km, 20.14, 1e-12);
    EXPECT_NEAR(e.co2_g_per_km, 468.62, 0.005);
    EXPECT_THROW(aggregate_emissions({rec(0, 1, 0.0, 0.1)}, model), std::invalid_argument);
}

TEST(Reduction, PaperExamples) {
    EXPECT_NEAR(percent_reduction(195.42, 597.31), -67.28, 0.005);
    EXPECT_NEAR(percent_reduction(429.61, 597.31), -28.08, 0.005);
    EXPECT_EQ(percent_reduction(597.31, 597.31), 0.0);
    EXPECT_THROW(percent_reduction(1.0, 0.0), std::invalid_argument);
}

TEST(Reduction, FuelAndCo2AreBitIdentical) {
    const EmissionModel model;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int k = 0; k < 200; ++k) {
        EpisodeReport a, b;
        a.travel_time.mean = 100.0 * u(rng);
        b.travel_time.mean = 100.0 * u(rng);
        a.emissions = emissions_from_rate(u(rng) / 10.0, model);
        b.emissions = emissions_from_rate(u(rng) / 10.0, model);
        const auto r = percent_reductions(a, b);
        EXPECT_EQ(std::memcmp(&r.fuel, &r.co2, sizeof(double)), 0);
    }
}

TEST(Average, StatisticsAndSeries) {
    const EmissionModel model;
    EpisodeReport a, b;
    a.travel_time = travel_time_stats(std::vector<double>{10, 20});
    b.travel_time = travel_time_stats(std::vector<double>{30, 50});
    a.emissions = emissions_from_rate(0.1, model);
    b.emissions = emissions_from_rate(0.3, model);
    a.running = {1, 2, 3};
    b.running = {3, 4};
    a.vehicles = b.vehicles = 2;
    const auto m = average_reports({a, b}, model);
    EXPECT_EQ(m.episodes, 2);
    EXPECT_DOUBLE_EQ(m.travel_time.mean, 27.5);
    EXPECT_DOUBLE_EQ(m.travel_time.max, 35.0);
    EXPECT_DOUBLE_EQ(m.emissions.fuel_l_per_100km, 20.0);
    EXPECT_EQ(m.running, (std::vector<double>{2.0, 3.0, 1.5}));
}

TEST(Csv, ReportAndSeriesFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "uavsig_metrics_test";
    std::filesystem::create_directories(dir);
    const EmissionModel model;
    EpisodeReport base;
    base.method = "congestion";
    base.travel_time = travel_time_stats(std::vector<double>{100, 300});
    base.emissions = emissions_from_rate(0.2, model);
    EpisodeReport cand = base;
    cand.method = "avars";
    cand.travel_time = travel_time_stats(std::vector<double>{100, 100});
    write_report_csv((dir / "report.csv").string(), {{"grid", base, nullptr}, {"grid", cand, &base}});
    std::istringstream lines(slurp(dir / "report.csv"));
    std::string header, first, second;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    EXPECT_EQ(header.rfind("scenario,method,episodes,mean_travel_time", 0), 0u);
    EXPECT_NE(second.find("avars"), std::string::npos);
    EXPECT_NE(second.find(",-50,"), std::string::npos);

    write_series_csv((dir / "series.csv").string(), {0, 3, 1});
    EXPECT_EQ(slurp(dir / "series.csv"), "tick,running\n0,0\n1,3\n2,1\n");
    std::filesystem::remove_all(dir);
}
