#include "uavsig/traffic_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsig {

namespace {

void check_layout(const WorldState& world, std::size_t intersection, const ObservationLayout& layout) {
    const auto& ix = world.net().intersection(intersection);
    if (static_cast<int>(ix.incoming.size()) > layout.max_roads) {
        throw std::invalid_argument("intersection " + world.net().node_id(ix.node) + " has more incoming roads than the " +
                                    std::to_string(layout.max_roads) + " the observation holds");
    }
    if (static_cast<int>(world.machine(intersection).plan().phases.size()) > layout.max_phases) {
        throw std::invalid_argument("intersection " + world.net().node_id(ix.node) + " has more phases than the " +
                                    std::to_string(layout.max_phases) + " the observation holds");
    }
}

}  // namespace

int observation_size(const ObservationLayout& layout) { return layout.max_phases + 2 * layout.max_roads; }

Eigen::VectorXd observe(const WorldState& world, std::size_t intersection, const ObservationLayout& layout) {
    check_layout(world, intersection, layout);
    Eigen::VectorXd obs = Eigen::VectorXd::Zero(observation_size(layout));
    obs[static_cast<Eigen::Index>(world.machine(intersection).phase_index())] = 1.0;
    const auto& incoming = world.net().intersection(intersection).incoming;
    for (std::size_t k = 0; k < incoming.size(); ++k) {
        const auto reading = sense_window(world, incoming[k], layout.monitoring_range);
        const double limit = world.net().segment(incoming[k]).speed_limit;
        const auto base = static_cast<Eigen::Index>(layout.max_phases + 2 * k);
        obs[base] = reading.occupancy;
        obs[base + 1] = std::clamp(reading.mean_speed / limit, 0.0, 1.0);
    }
    return obs;
}

double reward(const WorldState& world, std::size_t intersection, const ObservationLayout& layout) {
    double worst = 0.0;
    for (SegmentIndex s : world.net().intersection(intersection).incoming) {
        worst = std::max(worst, sense_window(world, s, layout.monitoring_range).occupancy);
    }
    return -worst;
}

RoadSnapshot road_snapshot(const WorldState& world, SegmentIndex s, int cells) {
    const auto& road = world.net().segment(s);
    const auto& seg = world.segment_state(s);
    RoadSnapshot snap;
    snap.cells.assign(static_cast<std::size_t>(cells), 0.0);
    const double cell_length = road.length / cells;
    for (std::int32_t vi : seg.queue) {
        const auto& v = world.vehicles()[vi];
        ++snap.vehicles;
        if (!v.moving) ++snap.queue;
        snap.waiting += static_cast<double>(v.waiting_on_segment);
        const int cell = std::clamp(static_cast<int>(std::floor(v.progress / cell_length)), 0, cells - 1);
        snap.cells[static_cast<std::size_t>(cell)] += v.length / (road.lanes * cell_length);
    }
    for (double& c : snap.cells) c = std::min(c, 1.0);
    return snap;
}

int intellilight_observation_size(const ObservationLayout& layout, const IntelliLightConfig& cfg) {
    return layout.max_roads * 3 + layout.max_phases + layout.max_roads * cfg.cells;
}

Eigen::VectorXd intellilight_observe(const WorldState& world, std::size_t intersection, const ObservationLayout& layout,
                                     const IntelliLightConfig& cfg) {
    check_layout(world, intersection, layout);
    Eigen::VectorXd obs = Eigen::VectorXd::Zero(intellilight_observation_size(layout, cfg));
    const auto& incoming = world.net().intersection(intersection).incoming;
    const Eigen::Index phase_base = layout.max_roads * 3;
    const Eigen::Index cell_base = phase_base + layout.max_phases;
    obs[phase_base + static_cast<Eigen::Index>(world.machine(intersection).phase_index())] = 1.0;
    for (std::size_t k = 0; k < incoming.size(); ++k) {
        const auto snap = road_snapshot(world, incoming[k], cfg.cells);
        const auto i = static_cast<Eigen::Index>(3 * k);
        obs[i] = std::min(1.0, snap.queue / cfg.queue_cap);
        obs[i + 1] = std::min(1.0, snap.vehicles / cfg.vehicle_cap);
        obs[i + 2] = std::min(1.0, snap.waiting / cfg.waiting_cap);
        for (int c = 0; c < cfg.cells; ++c) {
            obs[cell_base + static_cast<Eigen::Index>(k) * cfg.cells + c] = snap.cells[static_cast<std::size_t>(c)];
        }
    }
    return obs;
}

double intellilight_reward(const WorldState& world, std::size_t intersection, bool switched,
                           const IntelliLightConfig& cfg) {
    double queue = 0.0;
    double waiting = 0.0;
    for (SegmentIndex s : world.net().intersection(intersection).incoming) {
        const auto snap = road_snapshot(world, s, cfg.cells);
        queue += snap.queue;
        waiting += snap.waiting;
    }
    return -(cfg.w_queue * queue + cfg.w_waiting * waiting + cfg.w_switch * (switched ? 1.0 : 0.0));
}

bool can_switch(const PhaseMachine& machine) {
    return machine.sub_state() == LightState::green && machine.elapsed() >= machine.min_green();
}

TrafficEnv::TrafficEnv(std::shared_ptr<const Scenario> scenario, TrafficEnvConfig config)
    : scenario_(std::move(scenario)), config_(std::move(config)) {
    if (!scenario_) throw std::invalid_argument("TrafficEnv needs a scenario");
    if (config_.controlled.empty()) throw std::invalid_argument("TrafficEnv needs at least one controlled intersection");
    for (std::size_t i : config_.controlled) {
        if (i >= scenario_->net.intersection_count()) throw std::invalid_argument("controlled intersection out of range");
    }
    if (config_.control_end < config_.control_start) throw std::invalid_argument("control window ends before it starts");
}

int TrafficEnv::observation_size() const {
    return config_.kind == ObservationKind::avars ? uavsig::observation_size(config_.layout)
                                                  : intellilight_observation_size(config_.layout, config_.intellilight);
}

void TrafficEnv::reset(std::uint64_t seed) {
    SimConfig sim = config_.sim;
    sim.seed = seed;
    world_ = std::make_unique<WorldState>(scenario_, sim);
    commands_.assign(world_->machine_count(), SignalCommand{});
    const auto start = static_cast<long>(std::ceil(config_.control_start));
    while (world_->clock() < start) world_->step_fixed();
    for (std::size_t i : config_.controlled) commands_[i].mode = SignalCommand::Mode::drl;
}

bool TrafficEnv::done() const {
    return !world_ || static_cast<double>(world_->clock()) >= config_.control_end;
}

std::vector<std::size_t> TrafficEnv::deciders() const {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < config_.controlled.size(); ++a) {
        if (can_switch(world_->machine(config_.controlled[a]))) out.push_back(a);
    }
    return out;
}

Eigen::VectorXd TrafficEnv::observe(std::size_t agent) const {
    const std::size_t i = config_.controlled.at(agent);
    if (config_.kind == ObservationKind::avars) return uavsig::observe(*world_, i, config_.layout);
    return intellilight_observe(*world_, i, config_.layout, config_.intellilight);
}

std::vector<double> TrafficEnv::step(const std::vector<int>& actions) {
    if (actions.size() != config_.controlled.size()) throw std::invalid_argument("TrafficEnv: one action per agent");
    std::vector<bool> switched(actions.size(), false);
    for (std::size_t a = 0; a < actions.size(); ++a) {
        const std::size_t i = config_.controlled[a];
        switched[a] = actions[a] == 1 && can_switch(world_->machine(i));
        commands_[i].switch_phase = actions[a] == 1;
    }
    world_->step(commands_);
    std::vector<double> rewards(actions.size());
    for (std::size_t a = 0; a < actions.size(); ++a) {
        const std::size_t i = config_.controlled[a];
        rewards[a] = config_.kind == ObservationKind::avars
                         ? reward(*world_, i, config_.layout)
                         : config_.intellilight.reward_scale *
                                 intellilight_reward(*world_, i, switched[a], config_.intellilight);
    }
    return rewards;
}

}  // namespace uavsig
