#include "uavsig/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "uavsig/csv.hpp"

namespace uavsig {

double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("percentile rank outside [0, 1]");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

TravelTimeStats travel_time_stats(std::vector<double> times) {
    if (times.empty()) throw std::invalid_argument("travel time statistics need at least one vehicle");
    std::sort(times.begin(), times.end());
    TravelTimeStats s;
    const double n = static_cast<double>(times.size());
    s.mean = std::accumulate(times.begin(), times.end(), 0.0) / n;
    double ss = 0.0;
    for (double t : times) ss += (t - s.mean) * (t - s.mean);
    s.std = std::sqrt(ss / n);
    s.min = times.front();
    s.max = times.back();
    s.p25 = percentile(times, 0.25);
    s.median = percentile(times, 0.5);
    s.p75 = percentile(times, 0.75);
    return s;
}

TravelTimeStats travel_time_stats(const std::vector<VehicleRecord>& ledger) {
    std::vector<double> times;
    times.reserve(ledger.size());
    for (const auto& r : ledger) times.push_back(static_cast<double>(r.travel_time()));
    return travel_time_stats(std::move(times));
}

Emissions emissions_from_rate(double liters_per_km, const EmissionModel& model) {
    return {liters_per_km, 100.0 * liters_per_km, model.co2_per_liter * liters_per_km};
}

Emissions aggregate_emissions(const std::vector<VehicleRecord>& ledger, const EmissionModel& model) {
    double fuel = 0.0;
    double meters = 0.0;
    for (const auto& r : ledger) {
        fuel += r.fuel_l;
        meters += r.distance_m;
    }
    if (meters <= 0.0) throw std::invalid_argument("emissions need a positive total distance");
    return emissions_from_rate(fuel / (meters / 1000.0), model);
}

double percent_reduction(double candidate, double baseline) {
    if (baseline == 0.0) throw std::invalid_argument("percent reduction against a zero baseline");
    return 100.0 * (candidate - baseline) / baseline;
}

EpisodeReport episode_report(const std::string& method, const WorldState& world, std::vector<double> running) {
    if (!world.all_arrived()) throw std::invalid_argument("episode report before every vehicle arrived");
    const auto ledger = world.ledger();
    EpisodeReport r;
    r.method = method;
    r.travel_time = travel_time_stats(ledger);
    r.emissions = aggregate_emissions(ledger, world.config().emissions);
    r.running = std::move(running);
    r.vehicles = ledger.size();
    return r;
}

EpisodeReport average_reports(const std::vector<EpisodeReport>& reports, const EmissionModel& model) {
    if (reports.empty()) throw std::invalid_argument("nothing to average");
    EpisodeReport out;
    out.method = reports.front().method;
    out.episodes = static_cast<int>(reports.size());
    const double n = static_cast<double>(reports.size());
    std::size_t longest = 0;
    double rate = 0.0;
    double vehicles = 0.0;
    for (const auto& r : reports) {
        out.travel_time.mean += r.travel_time.mean / n;
        out.travel_time.std += r.travel_time.std / n;
        out.travel_time.min += r.travel_time.min / n;
        out.travel_time.p25 += r.travel_time.p25 / n;
        out.travel_time.median += r.travel_time.median / n;
        out.travel_time.p75 += r.travel_time.p75 / n;
        out.travel_time.max += r.travel_time.max / n;
        rate += r.emissions.liters_per_km / n;
        vehicles += static_cast<double>(r.vehicles) / n;
        longest = std::max(longest, r.running.size());
    }
    out.emissions = emissions_from_rate(rate, model);
    out.vehicles = static_cast<std::size_t>(std::lround(vehicles));
    out.running.assign(longest, 0.0);
    for (const auto& r : reports) {
        for (std::size_t t = 0; t < r.running.size(); ++t) out.running[t] += r.running[t] / n;
    }
    return out;
}

Reductions percent_reductions(const EpisodeReport& candidate, const EpisodeReport& baseline) {
    Reductions r;
    r.mean_travel_time = percent_reduction(candidate.travel_time.mean, baseline.travel_time.mean);
    r.fuel = percent_reduction(candidate.emissions.liters_per_km, baseline.emissions.liters_per_km);
    r.co2 = r.fuel;
    return r;
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
    CsvWriter csv(path);
    csv.row({"scenario", "method", "episodes", "mean_travel_time", "std_travel_time", "min_travel_time",
             "p25_travel_time", "median_travel_time", "p75_travel_time", "max_travel_time", "fuel_l_per_100km",
             "co2_g_per_km", "travel_time_change_pct", "fuel_change_pct", "co2_change_pct"});
    for (const auto& row : rows) {
        const auto& r = row.report;
        std::vector<std::string> cells = {row.scenario,
                                          r.method,
                                          std::to_string(r.episodes),
                                          format_real(r.travel_time.mean),
                                          format_real(r.travel_time.std),
                                          format_real(r.travel_time.min),
                                          format_real(r.travel_time.p25),
                                          format_real(r.travel_time.median),
                                          format_real(r.travel_time.p75),
                                          format_real(r.travel_time.max),
                                          format_real(r.emissions.fuel_l_per_100km),
                                          format_real(r.emissions.co2_g_per_km)};
        if (row.baseline) {
            const auto red = percent_reductions(r, *row.baseline);
            cells.push_back(format_real(red.mean_travel_time));
            cells.push_back(format_real(red.fuel));
            cells.push_back(format_real(red.co2));
        } else {
            cells.insert(cells.end(), {"", "", ""});
        }
        csv.row(cells);
    }
    csv.close();
}

void write_series_csv(const std::string& path, const std::vector<double>& running) {
    CsvWriter csv(path);
    csv.row({"tick", "running"});
    for (std::size_t t = 0; t < running.size(); ++t) csv.row({std::to_string(t), format_real(running[t])});
    csv.close();
}

}  // namespace uavsig
