#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uavsig/network.hpp"
#include "uavsig/signals.hpp"

namespace uavsig {

struct EmissionModel {
    double idle_rate = 3e-4;        // l/s
    double moving_rate = 2.014e-4;  // l/m
    double co2_per_liter = 2326.8;  // g/l
};

enum class VehicleStatus : std::uint8_t { pending, running, arrived };

struct Vehicle {
    std::size_t demand_index = 0;
    double length = 5.0;
    std::vector<SegmentIndex> route;
    std::size_t route_index = 0;
    NodeIndex destination = -1;
    VehicleStatus status = VehicleStatus::pending;

    double scheduled_depart = 0.0;
    long depart_time = -1;   // tick the vehicle was actually inserted
    long arrival_time = -1;
    long segment_enter_time = 0;
    double earliest_exit = 0.0;
    double progress = 0.0;   // m from the upstream end of the current segment

    double distance_traveled = 0.0;
    double fuel_used = 0.0;
    long time_idling = 0;
    long waiting_on_segment = 0;  // idle seconds since entering the current segment
    bool moving = false;          // moved during the last simulated second

    [[nodiscard]] SegmentIndex current_segment() const { return route[route_index]; }
};

struct SegmentState {
    std::deque<std::int32_t> queue;  // vehicle indices, FIFO from the stop line
    double occupied_length = 0.0;
    double green_credit = 0.0;       // discharges currently allowed at the stop line
};

/// Fuel update for one second of travel. CO2 is derived from fuel at reporting time.
void accrue_emissions(Vehicle& vehicle, double moved, bool idled, const EmissionModel& model);

/// Signal instruction for one intersection for the coming second.
struct SignalCommand {
    enum class Mode : std::uint8_t { fixed, drl, hand_back };
    Mode mode = Mode::fixed;
    bool switch_phase = false;
};

struct SimConfig {
    double vehicle_length = 5.0;
    double saturation_headway = 2.0;  // s of green per discharged vehicle per lane
    EmissionModel emissions;
    bool apply_closures = true;
    int min_green = kDefaultMinGreen;
    /// Departures are shifted by a seeded uniform integer in [-jitter, +jitter] s.
    int depart_jitter = 0;
    std::uint64_t seed = 0;
};

struct VehicleRecord {
    std::string vehicle_id;
    long depart = 0;
    long arrive = 0;
    double distance_m = 0.0;
    double fuel_l = 0.0;
    long idle_s = 0;
    [[nodiscard]] long travel_time() const { return arrive - depart; }
};

struct TickMetrics {
    long t = 0;
    std::size_t running = 0;
    std::size_t arrived = 0;
    double mean_occupancy = 0.0;
    double max_occupancy = 0.0;
};

/// Full state of one episode. Single writer; the scenario is shared read-only.
class WorldState {
public:
    WorldState(std::shared_ptr<const Scenario> scenario, SimConfig config);

    /// Simulates second `clock()` and advances the clock by one.
    void step(std::span<const SignalCommand> controls);
    void step_fixed();

    [[nodiscard]] long clock() const { return clock_; }
    [[nodiscard]] const Scenario& scenario() const { return *scenario_; }
    [[nodiscard]] const RoadNetwork& net() const { return scenario_->net; }
    [[nodiscard]] const SimConfig& config() const { return config_; }

    [[nodiscard]] const std::vector<Vehicle>& vehicles() const { return vehicles_; }
    [[nodiscard]] const SegmentState& segment_state(SegmentIndex s) const { return segments_.at(s); }
    [[nodiscard]] const PhaseMachine& machine(std::size_t intersection) const { return machines_.at(intersection); }
    [[nodiscard]] PhaseMachine& machine(std::size_t intersection) { return machines_.at(intersection); }
    [[nodiscard]] std::size_t machine_count() const { return machines_.size(); }

    [[nodiscard]] std::size_t pending_count() const { return pending_count_; }
    [[nodiscard]] std::size_t running_count() const { return running_count_; }
    [[nodiscard]] std::size_t arrived_count() const { return arrived_count_; }
    [[nodiscard]] std::size_t total_vehicles() const { return vehicles_.size(); }
    [[nodiscard]] bool all_arrived() const { return arrived_count_ == vehicles_.size(); }
    [[nodiscard]] bool is_closed(SegmentIndex s) const { return closed_.at(s); }

    [[nodiscard]] TickMetrics tick_metrics() const;
    /// Ledger rows for every arrived vehicle, in demand order.
    [[nodiscard]] std::vector<VehicleRecord> ledger() const;

    // Test hooks: place a running vehicle directly on a segment.
    std::int32_t spawn_on_segment(std::vector<SegmentIndex> route, long enter_time, double progress = 0.0);

private:
    void refresh_closures();
    bool route_blocked(const Vehicle& v) const;
    void reroute(Vehicle& v, NodeIndex from_node, std::size_t keep_prefix);
    void discharge();
    void inject();
    void accrue();
    void enter_segment(std::int32_t vi, SegmentIndex s);

    std::shared_ptr<const Scenario> scenario_;
    SimConfig config_;
    long clock_ = 0;
    std::vector<Vehicle> vehicles_;
    std::vector<SegmentState> segments_;
    std::vector<PhaseMachine> machines_;
    std::vector<bool> closed_;
    std::vector<std::int32_t> schedule_;  // vehicle indices sorted by departure
    std::size_t schedule_cursor_ = 0;
    std::vector<std::int32_t> waiting_;   // due but not yet inserted
    std::size_t pending_count_ = 0;
    std::size_t running_count_ = 0;
    std::size_t arrived_count_ = 0;
    std::map<std::pair<NodeIndex, NodeIndex>, std::vector<SegmentIndex>> reroute_cache_;
};

double occupancy(const SegmentState& seg, const RoadSegment& road);
/// Mean speed of vehicles on the segment; an empty segment reports its speed limit.
double mean_speed(const SegmentState& seg, const RoadSegment& road, const std::vector<Vehicle>& vehicles);

/// Occupancy and speed restricted to the `window` metres nearest the stop line.
struct WindowReading {
    double occupancy = 0.0;
    double mean_speed = 0.0;
    std::size_t vehicles = 0;
};
WindowReading sense_window(const WorldState& world, SegmentIndex s, double window);

std::size_t running_vehicle_count(const WorldState& world);

}  // namespace uavsig
