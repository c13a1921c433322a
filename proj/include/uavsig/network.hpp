#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "uavsig/signals.hpp"

namespace uavsig {

using NodeIndex = std::int32_t;
using SegmentIndex = std::int32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

struct RoadSegment {
    std::string id;
    NodeIndex from = -1;
    NodeIndex to = -1;
    double length = 0.0;       // m
    double speed_limit = 0.0;  // m/s
    int lanes = 1;

    [[nodiscard]] double free_flow_time() const { return length / speed_limit; }
    /// Lane-weighted storage length; the denominator of occupancy.
    [[nodiscard]] double storage() const { return lanes * length; }
};

struct Intersection {
    NodeIndex node = -1;
    std::string plan_id;
    std::vector<SegmentIndex> incoming;  // declared order = movement-mask slot order
};

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoPathError : public NetworkError {
public:
    using NetworkError::NetworkError;
};

/// Directed road graph. Read-only once a scenario has been loaded.
class RoadNetwork {
public:
    NodeIndex add_node(const std::string& id, std::optional<Point> position = std::nullopt);
    SegmentIndex add_segment(const std::string& id, NodeIndex from, NodeIndex to, double length,
                             double speed_limit, int lanes);
    std::size_t add_intersection(NodeIndex node, std::string plan_id, std::vector<SegmentIndex> incoming);

    [[nodiscard]] std::size_t node_count() const { return node_ids_.size(); }
    [[nodiscard]] std::size_t segment_count() const { return segments_.size(); }
    [[nodiscard]] std::size_t intersection_count() const { return intersections_.size(); }

    [[nodiscard]] const std::string& node_id(NodeIndex n) const { return node_ids_.at(n); }
    [[nodiscard]] const std::optional<Point>& node_position(NodeIndex n) const { return positions_.at(n); }
    [[nodiscard]] const RoadSegment& segment(SegmentIndex s) const { return segments_.at(s); }
    [[nodiscard]] const std::vector<RoadSegment>& segments() const { return segments_; }
    [[nodiscard]] const Intersection& intersection(std::size_t i) const { return intersections_.at(i); }
    [[nodiscard]] const std::vector<Intersection>& intersections() const { return intersections_; }

    [[nodiscard]] std::optional<NodeIndex> find_node(const std::string& id) const;
    [[nodiscard]] std::optional<SegmentIndex> find_segment(const std::string& id) const;
    /// Index of the signalized intersection located at `node`, if any.
    [[nodiscard]] std::optional<std::size_t> intersection_at(NodeIndex node) const;

    [[nodiscard]] const std::vector<SegmentIndex>& outgoing(NodeIndex n) const { return out_.at(n); }
    [[nodiscard]] const std::vector<SegmentIndex>& incoming(NodeIndex n) const { return in_.at(n); }

    /// For a segment ending at a signalized intersection: (intersection, slot).
    struct StopLine {
        std::size_t intersection;
        std::size_t slot;
    };
    [[nodiscard]] std::optional<StopLine> stop_line(SegmentIndex s) const { return stop_lines_.at(s); }

    /// All segments touching the intersection node, incoming first, then outgoing.
    [[nodiscard]] std::vector<SegmentIndex> connected_segments(std::size_t intersection) const;

private:
    std::vector<std::string> node_ids_;
    std::vector<std::optional<Point>> positions_;
    std::unordered_map<std::string, NodeIndex> node_lookup_;
    std::vector<RoadSegment> segments_;
    std::unordered_map<std::string, SegmentIndex> segment_lookup_;
    std::vector<std::vector<SegmentIndex>> out_, in_;
    std::vector<Intersection> intersections_;
    std::vector<std::optional<std::size_t>> intersection_of_node_;
    std::vector<std::optional<StopLine>> stop_lines_;
};

struct DemandEntry {
    std::string vehicle_id;
    double depart_time = 0.0;
    NodeIndex origin = -1;
    NodeIndex destination = -1;
};

struct ClosureEvent {
    SegmentIndex segment = -1;
    double start = 0.0;
    double end = 0.0;
};

struct Scenario {
    RoadNetwork net;
    std::vector<DemandEntry> demand;
    std::vector<ClosureEvent> closures;
    PlanTable plans;
    std::optional<Point> tmc;

    [[nodiscard]] const SignalPlan& plan_for(std::size_t intersection) const;
};

/// Parse failure or validation failure, with the 1-based source line when known.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& what, int line = 0);
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);
/// Structural equality over every scenario field (ids, numbers, plans, demand, closures).
bool same_scenario(const Scenario& a, const Scenario& b);

using ClosedSet = std::set<SegmentIndex>;

struct Route {
    std::vector<SegmentIndex> segments;
    double cost = 0.0;  // free-flow seconds
};

/// Minimum free-flow-time path avoiding `closed`. Equal-cost paths resolve to the
/// lexicographically smallest sequence of segment ids. Throws NoPathError.
Route shortest_path(const RoadNetwork& net, NodeIndex origin, NodeIndex destination,
                    const ClosedSet& closed = {});
/// Same as shortest_path with the closed set given as a per-segment flag vector.
Route shortest_path_masked(const RoadNetwork& net, NodeIndex origin, NodeIndex destination,
                           const std::vector<bool>& closed);

/// Segments whose [start, end) interval contains t.
ClosedSet active_closures(const std::vector<ClosureEvent>& events, double t);

}  // namespace uavsig
