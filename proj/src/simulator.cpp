#include "uavsig/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace uavsig {

namespace {
constexpr double kEps = 1e-9;
}

void accrue_emissions(Vehicle& vehicle, double moved, bool idled, const EmissionModel& model) {
    if (moved < 0.0) throw std::invalid_argument("accrue_emissions: negative distance");
    vehicle.distance_traveled += moved;
    vehicle.fuel_used += model.moving_rate * moved + (idled ? model.idle_rate : 0.0);
    if (idled) ++vehicle.time_idling;
}

WorldState::WorldState(std::shared_ptr<const Scenario> scenario, SimConfig config)
    : scenario_(std::move(scenario)), config_(config) {
    if (!scenario_) throw std::invalid_argument("WorldState needs a scenario");
    const auto& net = scenario_->net;
    segments_.resize(net.segment_count());
    closed_.assign(net.segment_count(), false);
    machines_.reserve(net.intersection_count());
    for (std::size_t i = 0; i < net.intersection_count(); ++i) {
        machines_.emplace_back(scenario_->plan_for(i), config_.min_green);
    }

    std::mt19937_64 rng(config_.seed);
    std::uniform_int_distribution<int> jitter(-config_.depart_jitter, config_.depart_jitter);
    std::map<std::pair<NodeIndex, NodeIndex>, std::vector<SegmentIndex>> base_routes;
    vehicles_.reserve(scenario_->demand.size());
    for (std::size_t k = 0; k < scenario_->demand.size(); ++k) {
        const auto& d = scenario_->demand[k];
        Vehicle v;
        v.demand_index = k;
        v.length = config_.vehicle_length;
        v.destination = d.destination;
        double depart = d.depart_time;
        if (config_.depart_jitter > 0) depart = std::max(0.0, depart + jitter(rng));
        v.scheduled_depart = depart;
        auto key = std::make_pair(d.origin, d.destination);
        auto it = base_routes.find(key);
        if (it == base_routes.end()) {
            it = base_routes.emplace(key, shortest_path(net, d.origin, d.destination).segments).first;
        }
        v.route = it->second;
        vehicles_.push_back(std::move(v));
    }
    schedule_.resize(vehicles_.size());
    for (std::size_t k = 0; k < schedule_.size(); ++k) schedule_[k] = static_cast<std::int32_t>(k);
    std::stable_sort(schedule_.begin(), schedule_.end(), [&](std::int32_t a, std::int32_t b) {
        return vehicles_[a].scheduled_depart < vehicles_[b].scheduled_depart;
    });
    pending_count_ = vehicles_.size();
}

void WorldState::refresh_closures() {
    if (!config_.apply_closures || scenario_->closures.empty()) return;
    const auto active = active_closures(scenario_->closures, static_cast<double>(clock_));
    std::vector<bool> now(closed_.size(), false);
    for (SegmentIndex s : active) now[s] = true;
    if (now != closed_) {
        closed_ = std::move(now);
        reroute_cache_.clear();
    }
}

bool WorldState::route_blocked(const Vehicle& v) const {
    for (std::size_t i = v.route_index; i < v.route.size(); ++i) {
        if (closed_[v.route[i]]) return true;
    }
    return false;
}

void WorldState::reroute(Vehicle& v, NodeIndex from_node, std::size_t keep_prefix) {
    auto key = std::make_pair(from_node, v.destination);
    auto it = reroute_cache_.find(key);
    if (it == reroute_cache_.end()) {
        it = reroute_cache_.emplace(key, shortest_path_masked(net(), from_node, v.destination, closed_).segments).first;
    }
    v.route.resize(keep_prefix);
    v.route.insert(v.route.end(), it->second.begin(), it->second.end());
}

void WorldState::enter_segment(std::int32_t vi, SegmentIndex s) {
    auto& v = vehicles_[vi];
    const auto& road = net().segment(s);
    v.segment_enter_time = clock_;
    v.earliest_exit = static_cast<double>(clock_) + road.free_flow_time();
    v.progress = 0.0;
    v.waiting_on_segment = 0;
    segments_[s].queue.push_back(vi);
    segments_[s].occupied_length += v.length;
}

void WorldState::discharge() {
    const auto& net = this->net();
    const double now = static_cast<double>(clock_);
    for (std::size_t si = 0; si < segments_.size(); ++si) {
        auto& seg = segments_[si];
        const auto& road = net.segment(static_cast<SegmentIndex>(si));
        const auto stop = net.stop_line(static_cast<SegmentIndex>(si));
        const bool green = !stop || machines_[stop->intersection].is_green_for(stop->slot);
        if (green) {
            seg.green_credit = std::min(seg.green_credit + road.lanes / config_.saturation_headway,
                                        static_cast<double>(road.lanes));
        } else {
            seg.green_credit = 0.0;
        }
        while (!seg.queue.empty() && seg.green_credit >= 1.0 - kEps) {
            const std::int32_t vi = seg.queue.front();
            auto& v = vehicles_[vi];
            if (v.earliest_exit > now + kEps) break;
            const bool last = v.route_index + 1 == v.route.size();
            SegmentIndex next = -1;
            if (!last) {
                next = v.route[v.route_index + 1];
                if (closed_[next]) {
                    reroute(v, road.to, v.route_index + 1);
                    next = v.route[v.route_index + 1];
                }
                const auto& next_road = net.segment(next);
                if (segments_[next].occupied_length + v.length > next_road.storage() + kEps) break;
            }
            seg.queue.pop_front();
            seg.occupied_length -= v.length;
            if (seg.queue.empty()) seg.occupied_length = 0.0;
            seg.green_credit -= 1.0;
            if (stop) machines_[stop->intersection].record_discharge(stop->slot, config_.saturation_headway / road.lanes);
            if (v.progress < road.length) accrue_emissions(v, road.length - v.progress, false, config_.emissions);
            v.progress = road.length;
            if (last) {
                v.status = VehicleStatus::arrived;
                v.arrival_time = clock_;
                v.moving = false;
                --running_count_;
                ++arrived_count_;
            } else {
                ++v.route_index;
                enter_segment(vi, next);
            }
        }
    }
}

void WorldState::inject() {
    const double now = static_cast<double>(clock_);
    while (schedule_cursor_ < schedule_.size() && vehicles_[schedule_[schedule_cursor_]].scheduled_depart <= now + kEps) {
        waiting_.push_back(schedule_[schedule_cursor_++]);
    }
    std::size_t keep = 0;
    for (std::size_t k = 0; k < waiting_.size(); ++k) {
        const std::int32_t vi = waiting_[k];
        auto& v = vehicles_[vi];
        if (route_blocked(v)) reroute(v, net().segment(v.route.front()).from, 0);
        const SegmentIndex first = v.route.front();
        if (segments_[first].occupied_length + v.length > net().segment(first).storage() + kEps) {
            waiting_[keep++] = vi;
            continue;
        }
        v.status = VehicleStatus::running;
        v.depart_time = clock_;
        v.route_index = 0;
        enter_segment(vi, first);
        --pending_count_;
        ++running_count_;
    }
    waiting_.resize(keep);
}

void WorldState::accrue() {
    const auto& net = this->net();
    for (std::size_t si = 0; si < segments_.size(); ++si) {
        auto& seg = segments_[si];
        if (seg.queue.empty()) continue;
        const auto& road = net.segment(static_cast<SegmentIndex>(si));
        double queued = 0.0;  // metres of stopped vehicles ahead, per lane
        for (std::int32_t vi : seg.queue) {
            auto& v = vehicles_[vi];
            const double stop_at = std::max(0.0, road.length - queued);
            double moved = 0.0;
            if (v.progress < stop_at - kEps) {
                moved = std::min(road.speed_limit, stop_at - v.progress);
                v.progress += moved;
            }
            const bool idled = moved <= 0.0;
            accrue_emissions(v, moved, idled, config_.emissions);
            if (idled) ++v.waiting_on_segment;
            v.moving = !idled;
            if (v.progress >= stop_at - kEps) queued += v.length / road.lanes;
        }
    }
}

void WorldState::step(std::span<const SignalCommand> controls) {
    if (controls.size() != machines_.size()) {
        throw std::invalid_argument("step: expected " + std::to_string(machines_.size()) + " signal commands, got " +
                                    std::to_string(controls.size()));
    }
    refresh_closures();
    for (std::size_t i = 0; i < machines_.size(); ++i) {
        switch (controls[i].mode) {
            case SignalCommand::Mode::fixed: machines_[i].tick_fixed(); break;
            case SignalCommand::Mode::drl: machines_[i].apply_action(controls[i].switch_phase); break;
            case SignalCommand::Mode::hand_back: machines_[i].hand_back(); break;
        }
    }
    discharge();
    inject();
    accrue();
    ++clock_;
}

void WorldState::step_fixed() {
    std::vector<SignalCommand> controls(machines_.size());
    step(controls);
}

TickMetrics WorldState::tick_metrics() const {
    TickMetrics m;
    m.t = clock_ - 1;
    m.running = running_count_;
    m.arrived = arrived_count_;
    double sum = 0.0;
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const double o = occupancy(segments_[s], net().segment(static_cast<SegmentIndex>(s)));
        sum += o;
        m.max_occupancy = std::max(m.max_occupancy, o);
    }
    m.mean_occupancy = segments_.empty() ? 0.0 : sum / static_cast<double>(segments_.size());
    return m;
}

std::vector<VehicleRecord> WorldState::ledger() const {
    std::vector<VehicleRecord> out;
    out.reserve(arrived_count_);
    for (const auto& v : vehicles_) {
        if (v.status != VehicleStatus::arrived) continue;
        out.push_back(VehicleRecord{scenario_->demand[v.demand_index].vehicle_id, v.depart_time, v.arrival_time,
                                    v.distance_traveled, v.fuel_used, v.time_idling});
    }
    return out;
}

std::int32_t WorldState::spawn_on_segment(std::vector<SegmentIndex> route, long enter_time, double progress) {
    if (route.empty()) throw std::invalid_argument("spawn_on_segment: empty route");
    Vehicle v;
    v.demand_index = 0;
    v.length = config_.vehicle_length;
    v.destination = net().segment(route.back()).to;
    v.route = std::move(route);
    v.status = VehicleStatus::running;
    v.depart_time = enter_time;
    v.scheduled_depart = static_cast<double>(enter_time);
    const auto vi = static_cast<std::int32_t>(vehicles_.size());
    vehicles_.push_back(std::move(v));
    const long saved = clock_;
    clock_ = enter_time;
    enter_segment(vi, vehicles_[vi].route.front());
    clock_ = saved;
    vehicles_[vi].progress = progress;
    ++running_count_;
    return vi;
}

double occupancy(const SegmentState& seg, const RoadSegment& road) {
    return std::clamp(seg.occupied_length / road.storage(), 0.0, 1.0);
}

double mean_speed(const SegmentState& seg, const RoadSegment& road, const std::vector<Vehicle>& vehicles) {
    if (seg.queue.empty()) return road.speed_limit;
    double sum = 0.0;
    for (std::int32_t vi : seg.queue) sum += vehicles[vi].moving ? road.speed_limit : 0.0;
    return sum / static_cast<double>(seg.queue.size());
}

WindowReading sense_window(const WorldState& world, SegmentIndex s, double window) {
    const auto& road = world.net().segment(s);
    const auto& seg = world.segment_state(s);
    const double span = std::min(window, road.length);
    const double from = road.length - span;
    WindowReading r;
    double len = 0.0;
    double speed_sum = 0.0;
    for (std::int32_t vi : seg.queue) {
        const auto& v = world.vehicles()[vi];
        if (v.progress < from) continue;
        ++r.vehicles;
        len += v.length;
        speed_sum += v.moving ? road.speed_limit : 0.0;
    }
    r.occupancy = span > 0.0 ? std::clamp(len / (road.lanes * span), 0.0, 1.0) : 0.0;
    r.mean_speed = r.vehicles == 0 ? road.speed_limit : speed_sum / static_cast<double>(r.vehicles);
    return r;
}

std::size_t running_vehicle_count(const WorldState& world) { return world.running_count(); }

}  // namespace uavsig
