#pragma once

#include <cstdint>
#include <string>

namespace uavsig {

struct GridOptions {
    int rows = 4;
    int cols = 4;
    int demand_count = 1168;
    double horizon = 2700.0;       // demand is spread over [0, horizon)
    /// Departure times follow a symmetric triangular profile peaking at horizon/2
    /// instead of a flat one.
    bool peaked_demand = true;
    double block_length = 100.0;   // m; kept <= 220 so every approach is camera-coverable
    double speed_limit = 12.5;     // m/s
    int lanes = 1;
    /// North/south links between the two middle rows exist only at the central
    /// columns, like bridges over a river. Bridgehead plans give the bridge the
    /// shortest green and the bank roads the longest.
    bool river = true;
    double arterial_speed = 16.0;  // m/s
    int arterial_lanes = 2;
    bool close_center = true;
    double closure_start = 600.0;
    double closure_end = 2400.0;
    std::uint64_t seed = 7;
};

/// Builds a signalized rows x cols lattice with one fringe node per boundary
/// approach, heterogeneous two-phase fixed plans, uniformly random fringe-to-fringe
/// demand and (optionally) a two-way closure of the busiest link nearest the centre.
/// Throws std::invalid_argument when the lattice has no interior intersection.
std::string generate_grid(const GridOptions& options);

}  // namespace uavsig
