#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "uavsig/rl.hpp"
#include "uavsig/simulator.hpp"
#include "uavsig/uav.hpp"

namespace uavsig {

struct ObservationLayout {
    int max_phases = 2;
    int max_roads = 4;
    double monitoring_range = 220.0;  // m sensed from each stop line
};

/// Phase one-hot followed by (occupancy, speed / limit) per incoming road, zero padded.
int observation_size(const ObservationLayout& layout);
Eigen::VectorXd observe(const WorldState& world, std::size_t intersection, const ObservationLayout& layout);
/// Negative maximum sensed occupancy over the incoming roads.
double reward(const WorldState& world, std::size_t intersection, const ObservationLayout& layout);

struct IntelliLightConfig {
    int cells = 5;
    double queue_cap = 40.0;        // vehicles
    double vehicle_cap = 40.0;      // vehicles
    double waiting_cap = 2000.0;    // vehicle-seconds
    double w_queue = 1.0;
    double w_waiting = 0.1;
    double w_switch = 1.0;
    /// Multiplies the reward handed to the learner; intellilight_reward itself is unscaled.
    double reward_scale = 0.01;
};

struct RoadSnapshot {
    int queue = 0;            // stopped vehicles
    int vehicles = 0;
    double waiting = 0.0;     // summed idle seconds on this road
    std::vector<double> cells;
};
RoadSnapshot road_snapshot(const WorldState& world, SegmentIndex s, int cells);

/// Per road: queue, count and waiting (each over its cap, clipped to 1), then the
/// phase one-hot, then `cells` occupancy cells per road from the upstream end.
int intellilight_observation_size(const ObservationLayout& layout, const IntelliLightConfig& cfg);
Eigen::VectorXd intellilight_observe(const WorldState& world, std::size_t intersection, const ObservationLayout& layout,
                                     const IntelliLightConfig& cfg);
double intellilight_reward(const WorldState& world, std::size_t intersection, bool switched,
                           const IntelliLightConfig& cfg);

enum class ObservationKind : std::uint8_t { avars, intellilight };

struct TrafficEnvConfig {
    ObservationKind kind = ObservationKind::avars;
    std::vector<std::size_t> controlled;
    double control_start = 900.0;
    double control_end = 2700.0;
    ObservationLayout layout;
    IntelliLightConfig intellilight;
    SimConfig sim;  // seed is replaced per episode
};

/// The closure scenario seen by the controlled intersections: fixed plans until
/// control_start, then one agent step per simulated second until control_end.
class TrafficEnv : public Environment {
public:
    TrafficEnv(std::shared_ptr<const Scenario> scenario, TrafficEnvConfig config);

    [[nodiscard]] int observation_size() const override;
    [[nodiscard]] std::size_t agent_count() const override { return config_.controlled.size(); }
    void reset(std::uint64_t seed) override;
    [[nodiscard]] bool done() const override;
    [[nodiscard]] std::vector<std::size_t> deciders() const override;
    [[nodiscard]] Eigen::VectorXd observe(std::size_t agent) const override;
    std::vector<double> step(const std::vector<int>& actions) override;

    [[nodiscard]] const WorldState& world() const { return *world_; }
    [[nodiscard]] const TrafficEnvConfig& config() const { return config_; }

private:
    std::shared_ptr<const Scenario> scenario_;
    TrafficEnvConfig config_;
    std::unique_ptr<WorldState> world_;
    std::vector<SignalCommand> commands_;
};

/// True when the machine is showing green long enough for a switch request to act.
bool can_switch(const PhaseMachine& machine);

}  // namespace uavsig
