#pragma once

#include <string>
#include <vector>

#include "uavsig/simulator.hpp"

namespace uavsig {

struct TravelTimeStats {
    double mean = 0.0;
    double std = 0.0;  // population
    double min = 0.0;
    double p25 = 0.0;
    double median = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

/// Linear interpolation between closest ranks; `q` in [0, 1]; `sorted` ascending and non-empty.
double percentile(const std::vector<double>& sorted, double q);

TravelTimeStats travel_time_stats(std::vector<double> times);
TravelTimeStats travel_time_stats(const std::vector<VehicleRecord>& ledger);

struct Emissions {
    double liters_per_km = 0.0;
    double fuel_l_per_100km = 0.0;
    double co2_g_per_km = 0.0;
};

Emissions aggregate_emissions(const std::vector<VehicleRecord>& ledger, const EmissionModel& model);
Emissions emissions_from_rate(double liters_per_km, const EmissionModel& model);

/// 100 * (candidate - baseline) / baseline; negative means the candidate is lower.
double percent_reduction(double candidate, double baseline);

struct EpisodeReport {
    std::string method;
    int episodes = 1;
    TravelTimeStats travel_time;
    Emissions emissions;
    std::vector<double> running;  // running vehicles per tick
    std::size_t vehicles = 0;
};

EpisodeReport episode_report(const std::string& method, const WorldState& world, std::vector<double> running);
/// Every statistic is averaged across the reports; running series are averaged per tick
/// with shorter series counting zero past their end.
EpisodeReport average_reports(const std::vector<EpisodeReport>& reports, const EmissionModel& model);

struct Reductions {
    double mean_travel_time = 0.0;
    double fuel = 0.0;
    double co2 = 0.0;
};
/// Fuel and CO2 are both proportional to litres per km, so they share one ratio.
Reductions percent_reductions(const EpisodeReport& candidate, const EpisodeReport& baseline);

struct ReportRow {
    std::string scenario;
    EpisodeReport report;
    const EpisodeReport* baseline = nullptr;
};

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);
void write_series_csv(const std::string& path, const std::vector<double>& running);

}  // namespace uavsig
