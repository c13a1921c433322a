#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavsig/network.hpp"
#include "uavsig/simulator.hpp"

namespace uavsig {

struct UavConfig {
    double max_speed_kmh = 80.0;
    double battery_life = 2400.0;        // s
    double monitoring_range = 220.0;     // m, camera coverage along a road from the stop line
    double tmc_radius = 5000.0;          // m
    double operation_duration = 1800.0;  // s, requested; capped by battery_life at dispatch
    double arrival_delay = 300.0;        // s after the closure starts

    void validate() const;
};

class DispatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ImpactScore {
    std::size_t intersection = 0;
    double score = 0.0;
};

/// Increase in the time-averaged maximum incoming occupancy over the closure window,
/// for every signalized intersection, from two fixed-signal runs (with and without the
/// closure) that share `seed`. Returned in intersection index order.
std::vector<ImpactScore> impact_scores(const std::shared_ptr<const Scenario>& scenario, const ClosureEvent& closure,
                                       std::uint64_t seed = 0);

/// Top-k intersections by impact score; ties go to the lexicographically smaller node id.
std::vector<ImpactScore> select_intersections(const std::shared_ptr<const Scenario>& scenario,
                                              const ClosureEvent& closure, int k, std::uint64_t seed = 0);

struct RoadCoverage {
    SegmentIndex segment = -1;
    double length = 0.0;
    double sensed_length = 0.0;
    bool full = false;
};

struct CoverageReport {
    std::size_t intersection = 0;
    std::vector<RoadCoverage> roads;     // every directly connected road
    std::vector<SegmentIndex> partial;   // roads longer than the monitoring range
    [[nodiscard]] bool fully_covered() const { return partial.empty(); }
};

CoverageReport coverage_check(const RoadNetwork& net, std::size_t intersection, const UavConfig& cfg);

struct Dispatch {
    std::map<std::size_t, int> assignments;  // intersection -> UAV number
    double control_start = 0.0;
    double control_end = 0.0;
    [[nodiscard]] bool active(double t) const { return t >= control_start && t < control_end; }
};

/// Schedules one UAV per intersection. Every intersection must lie within the TMC
/// radius; the scenario needs node coordinates and a TMC position for that check.
Dispatch dispatch(const UavConfig& cfg, const ClosureEvent& closure, const std::vector<std::size_t>& intersections,
                  const Scenario& scenario);

}  // namespace uavsig
