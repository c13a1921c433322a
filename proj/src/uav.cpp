#include "uavsig/uav.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uavsig {

void UavConfig::validate() const {
    if (!(monitoring_range > 0.0)) throw std::invalid_argument("monitoring range must be positive");
    if (!(battery_life > 0.0)) throw std::invalid_argument("battery life must be positive");
    if (operation_duration < 0.0) throw std::invalid_argument("operation duration must be non-negative");
    if (arrival_delay < 0.0) throw std::invalid_argument("arrival delay must be non-negative");
    if (!(tmc_radius > 0.0)) throw std::invalid_argument("TMC radius must be positive");
    if (!(max_speed_kmh > 0.0)) throw std::invalid_argument("UAV speed must be positive");
}

namespace {

std::vector<double> mean_max_occupancy(const std::shared_ptr<const Scenario>& scenario, bool with_closure,
                                       const ClosureEvent& closure, std::uint64_t seed) {
    auto copy = std::make_shared<Scenario>(*scenario);
    copy->closures.clear();
    if (with_closure) {
        // The other direction of a two-way closure shares the event's window.
        copy->closures.push_back(closure);
        for (const auto& c : scenario->closures) {
            if (c.segment != closure.segment && c.start == closure.start && c.end == closure.end) {
                copy->closures.push_back(c);
            }
        }
    }
    SimConfig cfg;
    cfg.seed = seed;
    WorldState world(copy, cfg);
    const auto& net = world.net();
    std::vector<double> sum(net.intersection_count(), 0.0);
    const long from = static_cast<long>(std::ceil(closure.start));
    const long to = static_cast<long>(std::ceil(closure.end));
    while (world.clock() < to) {
        world.step_fixed();
        const long t = world.clock() - 1;
        if (t < from) continue;
        for (std::size_t i = 0; i < net.intersection_count(); ++i) {
            double worst = 0.0;
            for (SegmentIndex s : net.intersection(i).incoming) {
                worst = std::max(worst, occupancy(world.segment_state(s), net.segment(s)));
            }
            sum[i] += worst;
        }
    }
    const double ticks = static_cast<double>(std::max(0L, to - from));
    if (ticks > 0.0) {
        for (double& v : sum) v /= ticks;
    }
    return sum;
}

}  // namespace

std::vector<ImpactScore> impact_scores(const std::shared_ptr<const Scenario>& scenario, const ClosureEvent& closure,
                                       std::uint64_t seed) {
    if (!scenario) throw std::invalid_argument("impact_scores: null scenario");
    if (closure.segment < 0 || static_cast<std::size_t>(closure.segment) >= scenario->net.segment_count()) {
        throw std::invalid_argument("impact_scores: closure refers to an unknown segment");
    }
    const auto base = mean_max_occupancy(scenario, false, closure, seed);
    const auto closed = mean_max_occupancy(scenario, true, closure, seed);
    std::vector<ImpactScore> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = {i, closed[i] - base[i]};
    return out;
}

std::vector<ImpactScore> select_intersections(const std::shared_ptr<const Scenario>& scenario,
                                              const ClosureEvent& closure, int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("select_intersections: k must be at least 1");
    if (static_cast<std::size_t>(k) > scenario->net.intersection_count()) {
        throw std::invalid_argument("select_intersections: k = " + std::to_string(k) + " exceeds the " +
                                    std::to_string(scenario->net.intersection_count()) +
                                    " signalized intersections");
    }
    auto scores = impact_scores(scenario, closure, seed);
    const auto& net = scenario->net;
    std::sort(scores.begin(), scores.end(), [&](const ImpactScore& a, const ImpactScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return net.node_id(net.intersection(a.intersection).node) < net.node_id(net.intersection(b.intersection).node);
    });
    scores.resize(static_cast<std::size_t>(k));
    return scores;
}

CoverageReport coverage_check(const RoadNetwork& net, std::size_t intersection, const UavConfig& cfg) {
    CoverageReport report;
    report.intersection = intersection;
    for (SegmentIndex s : net.connected_segments(intersection)) {
        const auto& road = net.segment(s);
        RoadCoverage c;
        c.segment = s;
        c.length = road.length;
        c.full = road.length <= cfg.monitoring_range;
        c.sensed_length = c.full ? road.length : cfg.monitoring_range;
        if (!c.full) report.partial.push_back(s);
        report.roads.push_back(c);
    }
    return report;
}

Dispatch dispatch(const UavConfig& cfg, const ClosureEvent& closure, const std::vector<std::size_t>& intersections,
                  const Scenario& scenario) {
    cfg.validate();
    const auto& net = scenario.net;
    if (!intersections.empty() && !scenario.tmc) {
        throw DispatchError("dispatch needs a TMC position (`tmc <x> <y>` in the scenario)");
    }
    Dispatch d;
    int uav = 0;
    for (std::size_t i : intersections) {
        if (i >= net.intersection_count()) throw DispatchError("dispatch: unknown intersection index");
        const NodeIndex node = net.intersection(i).node;
        const auto& pos = net.node_position(node);
        if (!pos) throw DispatchError("dispatch: node " + net.node_id(node) + " has no coordinates");
        const double dist = distance(*pos, *scenario.tmc);
        if (dist > cfg.tmc_radius) {
            throw DispatchError("intersection " + net.node_id(node) + " is " + std::to_string(dist) +
                                " m from the TMC, outside the " + std::to_string(cfg.tmc_radius) + " m radius");
        }
        if (!d.assignments.emplace(i, uav).second) throw DispatchError("dispatch: intersection listed twice");
        ++uav;
    }
    d.control_start = closure.start + cfg.arrival_delay;
    d.control_end = d.control_start + std::min(cfg.operation_duration, cfg.battery_life);
    return d;
}

}  // namespace uavsig
