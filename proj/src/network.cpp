#include "uavsig/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

namespace uavsig {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// ---------------------------------------------------------------------------
// RoadNetwork

NodeIndex RoadNetwork::add_node(const std::string& id, std::optional<Point> position) {
    if (id.empty()) throw NetworkError("empty node id");
    if (node_lookup_.count(id) != 0) throw NetworkError("duplicate node id '" + id + "'");
    const auto idx = static_cast<NodeIndex>(node_ids_.size());
    node_ids_.push_back(id);
    positions_.push_back(position);
    node_lookup_.emplace(id, idx);
    out_.emplace_back();
    in_.emplace_back();
    intersection_of_node_.emplace_back();
    return idx;
}

SegmentIndex RoadNetwork::add_segment(const std::string& id, NodeIndex from, NodeIndex to, double length,
                                      double speed_limit, int lanes) {
    if (id.empty()) throw NetworkError("empty segment id");
    if (segment_lookup_.count(id) != 0) throw NetworkError("duplicate segment id '" + id + "'");
    const auto nodes = static_cast<NodeIndex>(node_ids_.size());
    if (from < 0 || from >= nodes || to < 0 || to >= nodes) {
        throw NetworkError("segment '" + id + "' references an undeclared node");
    }
    if (!(length > 0.0) || !std::isfinite(length)) throw NetworkError("segment '" + id + "' needs length > 0");
    if (!(speed_limit > 0.0) || !std::isfinite(speed_limit)) {
        throw NetworkError("segment '" + id + "' needs speed_limit > 0");
    }
    if (lanes < 1) throw NetworkError("segment '" + id + "' needs at least one lane");
    const auto idx = static_cast<SegmentIndex>(segments_.size());
    segments_.push_back(RoadSegment{id, from, to, length, speed_limit, lanes});
    segment_lookup_.emplace(id, idx);
    out_[from].push_back(idx);
    in_[to].push_back(idx);
    stop_lines_.emplace_back();
    return idx;
}

std::size_t RoadNetwork::add_intersection(NodeIndex node, std::string plan_id, std::vector<SegmentIndex> incoming) {
    if (node < 0 || node >= static_cast<NodeIndex>(node_ids_.size())) {
        throw NetworkError("signalized intersection at undeclared node");
    }
    if (intersection_of_node_[node]) throw NetworkError("node '" + node_ids_[node] + "' is already signalized");
    if (incoming.size() < 2) {
        throw NetworkError("signalized intersection '" + node_ids_[node] + "' needs at least 2 incoming segments");
    }
    for (std::size_t slot = 0; slot < incoming.size(); ++slot) {
        const SegmentIndex s = incoming[slot];
        if (s < 0 || s >= static_cast<SegmentIndex>(segments_.size())) {
            throw NetworkError("intersection '" + node_ids_[node] + "' lists an unknown segment");
        }
        if (segments_[s].to != node) {
            throw NetworkError("segment '" + segments_[s].id + "' does not end at intersection '" +
                               node_ids_[node] + "'");
        }
        if (stop_lines_[s]) throw NetworkError("segment '" + segments_[s].id + "' listed twice");
    }
    const std::size_t idx = intersections_.size();
    for (std::size_t slot = 0; slot < incoming.size(); ++slot) stop_lines_[incoming[slot]] = StopLine{idx, slot};
    intersections_.push_back(Intersection{node, std::move(plan_id), std::move(incoming)});
    intersection_of_node_[node] = idx;
    return idx;
}

std::optional<NodeIndex> RoadNetwork::find_node(const std::string& id) const {
    auto it = node_lookup_.find(id);
    if (it == node_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<SegmentIndex> RoadNetwork::find_segment(const std::string& id) const {
    auto it = segment_lookup_.find(id);
    if (it == segment_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> RoadNetwork::intersection_at(NodeIndex node) const {
    return intersection_of_node_.at(node);
}

std::vector<SegmentIndex> RoadNetwork::connected_segments(std::size_t intersection) const {
    const auto& ix = intersections_.at(intersection);
    std::vector<SegmentIndex> out = ix.incoming;
    for (SegmentIndex s : out_[ix.node]) out.push_back(s);
    return out;
}

const SignalPlan& Scenario::plan_for(std::size_t intersection) const {
    return plans.at(net.intersection(intersection).plan_id);
}

// ---------------------------------------------------------------------------
// Scenario document

ScenarioError::ScenarioError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

struct Record {
    int line;
    std::vector<std::string> tokens;
};

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& tok, const char* field, int line) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ScenarioError(std::string("field '") + field + "': expected a number, got '" + tok + "'", line);
    }
    return v;
}

int parse_int(const std::string& tok, const char* field, int line) {
    int v = 0;
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ScenarioError(std::string("field '") + field + "': expected an integer, got '" + tok + "'", line);
    }
    return v;
}

void expect_arity(const Record& r, std::size_t n, const char* usage) {
    if (r.tokens.size() != n) {
        throw ScenarioError(std::string("malformed '") + r.tokens[0] + "' line, expected: " + usage, r.line);
    }
}

std::string value_of(const std::string& tok, const std::string& key, int line) {
    if (tok.rfind(key + "=", 0) != 0) throw ScenarioError("expected '" + key + "=...', got '" + tok + "'", line);
    return tok.substr(key.size() + 1);
}

NodeIndex node_ref(const RoadNetwork& net, const std::string& id, const char* field, int line) {
    auto n = net.find_node(id);
    if (!n) throw ScenarioError(std::string("field '") + field + "': dangling node reference '" + id + "'", line);
    return *n;
}

SegmentIndex segment_ref(const RoadNetwork& net, const std::string& id, const char* field, int line) {
    auto s = net.find_segment(id);
    if (!s) throw ScenarioError(std::string("field '") + field + "': dangling edge reference '" + id + "'", line);
    return *s;
}

SignalPlan parse_plan(const Record& r) {
    if (r.tokens.size() < 3) throw ScenarioError("plan needs an id and at least one phase", r.line);
    SignalPlan plan;
    plan.id = r.tokens[1];
    for (std::size_t i = 2; i < r.tokens.size(); ++i) {
        std::string spec = value_of(r.tokens[i], "phase", r.line);
        Phase ph;
        constexpr std::string_view kAllRed = "+allred";
        if (spec.size() > kAllRed.size() && spec.compare(spec.size() - kAllRed.size(), kAllRed.size(), kAllRed) == 0) {
            ph.allred_after = true;
            spec.resize(spec.size() - kAllRed.size());
        }
        const auto colon = spec.find(':');
        if (colon == std::string::npos) throw ScenarioError("phase must be <green_s>:<mask>[+allred]", r.line);
        ph.green = parse_int(spec.substr(0, colon), "green_s", r.line);
        if (ph.green <= 0) throw ScenarioError("phase green must be positive", r.line);
        try {
            ph.movements = parse_movement_mask(spec.substr(colon + 1));
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(e.what(), r.line);
        }
        plan.phases.push_back(std::move(ph));
    }
    return plan;
}

void check_number_format(double v, const char* what, int line) {
    if (v < 0.0) throw ScenarioError(std::string(what) + " must be >= 0", line);
}

}  // namespace

Scenario load_scenario(const std::string& text) {
    std::vector<Record> nodes, edges, tls, plans, vehs, closes, tmcs;
    {
        std::istringstream in(text);
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            auto first = raw.find_first_not_of(" \t");
            if (first == std::string::npos || raw[first] == '#') continue;
            Record r{line_no, split_ws(raw)};
            const std::string& kw = r.tokens[0];
            if (kw == "node") nodes.push_back(std::move(r));
            else if (kw == "edge") edges.push_back(std::move(r));
            else if (kw == "tls") tls.push_back(std::move(r));
            else if (kw == "plan") plans.push_back(std::move(r));
            else if (kw == "veh") vehs.push_back(std::move(r));
            else if (kw == "close") closes.push_back(std::move(r));
            else if (kw == "tmc") tmcs.push_back(std::move(r));
            else throw ScenarioError("unknown record type '" + kw + "'", line_no);
        }
    }

    Scenario sc;
    auto& net = sc.net;
    for (const auto& r : nodes) {
        std::optional<Point> pos;
        if (r.tokens.size() == 4) {
            pos = Point{parse_number(r.tokens[2], "x", r.line), parse_number(r.tokens[3], "y", r.line)};
        } else {
            expect_arity(r, 2, "node <id> [<x> <y>]");
        }
        try {
            net.add_node(r.tokens[1], pos);
        } catch (const NetworkError& e) {
            throw ScenarioError(e.what(), r.line);
        }
    }
    for (const auto& r : edges) {
        expect_arity(r, 7, "edge <id> <from> <to> <length_m> <speed_mps> <lanes>");
        const NodeIndex from = node_ref(net, r.tokens[2], "from", r.line);
        const NodeIndex to = node_ref(net, r.tokens[3], "to", r.line);
        const double length = parse_number(r.tokens[4], "length_m", r.line);
        const double speed = parse_number(r.tokens[5], "speed_mps", r.line);
        const int lanes = parse_int(r.tokens[6], "lanes", r.line);
        if (!(length > 0.0)) throw ScenarioError("field 'length_m': non-positive length", r.line);
        if (!(speed > 0.0)) throw ScenarioError("field 'speed_mps': non-positive speed limit", r.line);
        if (lanes < 1) throw ScenarioError("field 'lanes': at least one lane required", r.line);
        try {
            net.add_segment(r.tokens[1], from, to, length, speed, lanes);
        } catch (const NetworkError& e) {
            throw ScenarioError(e.what(), r.line);
        }
    }
    for (const auto& r : plans) {
        SignalPlan p = parse_plan(r);
        if (sc.plans.count(p.id) != 0) throw ScenarioError("duplicate plan id '" + p.id + "'", r.line);
        const std::size_t width = p.slot_count();
        for (const auto& ph : p.phases) {
            if (ph.movements.size() != width) throw ScenarioError("phase masks of plan '" + p.id + "' differ in width", r.line);
        }
        if (!p.serves_every_slot()) {
            throw ScenarioError("plan '" + p.id + "' never gives green to some incoming slot", r.line);
        }
        sc.plans.emplace(p.id, std::move(p));
    }
    for (const auto& r : tls) {
        expect_arity(r, 4, "tls <node_id> plan=<plan_id> incoming=<edge,...>");
        const NodeIndex node = node_ref(net, r.tokens[1], "node_id", r.line);
        std::string plan_id = value_of(r.tokens[2], "plan", r.line);
        auto plan_it = sc.plans.find(plan_id);
        if (plan_it == sc.plans.end()) throw ScenarioError("field 'plan': unknown plan '" + plan_id + "'", r.line);
        std::vector<SegmentIndex> incoming;
        for (const auto& e : split_on(value_of(r.tokens[3], "incoming", r.line), ',')) {
            incoming.push_back(segment_ref(net, e, "incoming", r.line));
        }
        if (plan_it->second.slot_count() != incoming.size()) {
            throw ScenarioError("plan '" + plan_id + "' mask width " + std::to_string(plan_it->second.slot_count()) +
                                    " does not match " + std::to_string(incoming.size()) + " incoming segments",
                                r.line);
        }
        try {
            net.add_intersection(node, std::move(plan_id), std::move(incoming));
        } catch (const NetworkError& e) {
            throw ScenarioError(e.what(), r.line);
        }
    }
    std::map<std::pair<NodeIndex, NodeIndex>, bool> reachable;
    std::set<std::string> vehicle_ids;
    for (const auto& r : vehs) {
        expect_arity(r, 5, "veh <id> <depart_s> <origin> <dest>");
        DemandEntry d;
        d.vehicle_id = r.tokens[1];
        if (!vehicle_ids.insert(d.vehicle_id).second) {
            throw ScenarioError("duplicate vehicle id '" + d.vehicle_id + "'", r.line);
        }
        d.depart_time = parse_number(r.tokens[2], "depart_s", r.line);
        check_number_format(d.depart_time, "depart_s", r.line);
        d.origin = node_ref(net, r.tokens[3], "origin", r.line);
        d.destination = node_ref(net, r.tokens[4], "dest", r.line);
        if (d.origin == d.destination) throw ScenarioError("origin equals destination", r.line);
        auto key = std::make_pair(d.origin, d.destination);
        auto it = reachable.find(key);
        if (it == reachable.end()) {
            bool ok = true;
            try {
                (void)shortest_path(net, d.origin, d.destination);
            } catch (const NoPathError&) {
                ok = false;
            }
            it = reachable.emplace(key, ok).first;
        }
        if (!it->second) {
            throw ScenarioError("unreachable OD pair " + r.tokens[3] + " -> " + r.tokens[4], r.line);
        }
        sc.demand.push_back(std::move(d));
    }
    for (const auto& r : closes) {
        expect_arity(r, 4, "close <edge_id> <start_s> <end_s>");
        ClosureEvent c;
        c.segment = segment_ref(net, r.tokens[1], "edge_id", r.line);
        c.start = parse_number(r.tokens[2], "start_s", r.line);
        c.end = parse_number(r.tokens[3], "end_s", r.line);
        if (c.start < 0.0 || !(c.start < c.end)) throw ScenarioError("closure needs 0 <= start < end", r.line);
        sc.closures.push_back(c);
    }
    if (tmcs.size() > 1) throw ScenarioError("more than one tmc record", tmcs[1].line);
    for (const auto& r : tmcs) {
        expect_arity(r, 3, "tmc <x> <y>");
        sc.tmc = Point{parse_number(r.tokens[1], "x", r.line), parse_number(r.tokens[2], "y", r.line)};
    }
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

namespace {

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::string serialize_scenario(const Scenario& sc) {
    const auto& net = sc.net;
    std::ostringstream out;
    for (std::size_t n = 0; n < net.node_count(); ++n) {
        const auto node = static_cast<NodeIndex>(n);
        out << "node " << net.node_id(node);
        if (const auto& p = net.node_position(node)) out << ' ' << num(p->x) << ' ' << num(p->y);
        out << '\n';
    }
    for (const auto& s : net.segments()) {
        out << "edge " << s.id << ' ' << net.node_id(s.from) << ' ' << net.node_id(s.to) << ' ' << num(s.length)
            << ' ' << num(s.speed_limit) << ' ' << s.lanes << '\n';
    }
    for (const auto& [id, plan] : sc.plans) {
        out << "plan " << id;
        for (const auto& ph : plan.phases) {
            out << " phase=" << ph.green << ':' << format_movement_mask(ph.movements) << (ph.allred_after ? "+allred" : "");
        }
        out << '\n';
    }
    for (const auto& ix : net.intersections()) {
        out << "tls " << net.node_id(ix.node) << " plan=" << ix.plan_id << " incoming=";
        for (std::size_t i = 0; i < ix.incoming.size(); ++i) {
            out << (i ? "," : "") << net.segment(ix.incoming[i]).id;
        }
        out << '\n';
    }
    if (sc.tmc) out << "tmc " << num(sc.tmc->x) << ' ' << num(sc.tmc->y) << '\n';
    for (const auto& d : sc.demand) {
        out << "veh " << d.vehicle_id << ' ' << num(d.depart_time) << ' ' << net.node_id(d.origin) << ' '
            << net.node_id(d.destination) << '\n';
    }
    for (const auto& c : sc.closures) {
        out << "close " << net.segment(c.segment).id << ' ' << num(c.start) << ' ' << num(c.end) << '\n';
    }
    return out.str();
}

bool same_scenario(const Scenario& a, const Scenario& b) {
    const auto& na = a.net;
    const auto& nb = b.net;
    if (na.node_count() != nb.node_count() || na.segment_count() != nb.segment_count() ||
        na.intersection_count() != nb.intersection_count()) {
        return false;
    }
    for (std::size_t n = 0; n < na.node_count(); ++n) {
        const auto i = static_cast<NodeIndex>(n);
        if (na.node_id(i) != nb.node_id(i) || na.node_position(i) != nb.node_position(i)) return false;
    }
    for (std::size_t s = 0; s < na.segment_count(); ++s) {
        const auto& x = na.segments()[s];
        const auto& y = nb.segments()[s];
        if (x.id != y.id || x.from != y.from || x.to != y.to || x.length != y.length ||
            x.speed_limit != y.speed_limit || x.lanes != y.lanes) {
            return false;
        }
    }
    for (std::size_t i = 0; i < na.intersection_count(); ++i) {
        const auto& x = na.intersection(i);
        const auto& y = nb.intersection(i);
        if (x.node != y.node || x.plan_id != y.plan_id || x.incoming != y.incoming) return false;
    }
    if (a.plans.size() != b.plans.size()) return false;
    for (const auto& [id, p] : a.plans) {
        auto it = b.plans.find(id);
        if (it == b.plans.end() || p.phases.size() != it->second.phases.size()) return false;
        for (std::size_t k = 0; k < p.phases.size(); ++k) {
            const auto& x = p.phases[k];
            const auto& y = it->second.phases[k];
            if (x.green != y.green || x.movements != y.movements || x.allred_after != y.allred_after) return false;
        }
    }
    if (a.demand.size() != b.demand.size() || a.closures.size() != b.closures.size() || a.tmc != b.tmc) return false;
    for (std::size_t k = 0; k < a.demand.size(); ++k) {
        const auto& x = a.demand[k];
        const auto& y = b.demand[k];
        if (x.vehicle_id != y.vehicle_id || x.depart_time != y.depart_time || x.origin != y.origin ||
            x.destination != y.destination) {
            return false;
        }
    }
    for (std::size_t k = 0; k < a.closures.size(); ++k) {
        const auto& x = a.closures[k];
        const auto& y = b.closures[k];
        if (x.segment != y.segment || x.start != y.start || x.end != y.end) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Routing

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_cost(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

Route shortest_path_masked(const RoadNetwork& net, NodeIndex origin, NodeIndex destination,
                           const std::vector<bool>& closed) {
    const auto n = static_cast<NodeIndex>(net.node_count());
    if (origin < 0 || origin >= n || destination < 0 || destination >= n) {
        throw NetworkError("shortest_path: node index out of range");
    }
    auto is_closed = [&](SegmentIndex s) { return static_cast<std::size_t>(s) < closed.size() && closed[s]; };

    // Reverse Dijkstra: cost-to-go from every node to the destination.
    std::vector<double> to_go(net.node_count(), kInf);
    using Item = std::pair<double, NodeIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    to_go[destination] = 0.0;
    pq.emplace(0.0, destination);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > to_go[v]) continue;
        for (SegmentIndex s : net.incoming(v)) {
            if (is_closed(s)) continue;
            const auto& seg = net.segment(s);
            const double nd = d + seg.free_flow_time();
            if (nd < to_go[seg.from]) {
                to_go[seg.from] = nd;
                pq.emplace(nd, seg.from);
            }
        }
    }
    if (to_go[origin] == kInf) {
        throw NoPathError("no path from '" + net.node_id(origin) + "' to '" + net.node_id(destination) + "'");
    }

    // Walk forward, always taking the smallest-id segment that stays on a shortest path.
    Route route;
    NodeIndex at = origin;
    double spent = 0.0;
    while (at != destination) {
        const SegmentIndex* best = nullptr;
        for (const SegmentIndex& s : net.outgoing(at)) {
            if (is_closed(s)) continue;
            const auto& seg = net.segment(s);
            if (to_go[seg.to] == kInf) continue;
            if (!same_cost(seg.free_flow_time() + to_go[seg.to], to_go[at])) continue;
            if (best == nullptr || seg.id < net.segment(*best).id) best = &s;
        }
        if (best == nullptr || route.segments.size() > net.segment_count()) {
            throw NoPathError("route reconstruction failed between '" + net.node_id(origin) + "' and '" +
                              net.node_id(destination) + "'");
        }
        route.segments.push_back(*best);
        spent += net.segment(*best).free_flow_time();
        at = net.segment(*best).to;
    }
    route.cost = spent;
    return route;
}

Route shortest_path(const RoadNetwork& net, NodeIndex origin, NodeIndex destination, const ClosedSet& closed) {
    std::vector<bool> mask(net.segment_count(), false);
    for (SegmentIndex s : closed) {
        if (s >= 0 && static_cast<std::size_t>(s) < mask.size()) mask[s] = true;
    }
    return shortest_path_masked(net, origin, destination, mask);
}

ClosedSet active_closures(const std::vector<ClosureEvent>& events, double t) {
    ClosedSet out;
    for (const auto& e : events) {
        if (e.start <= t && t < e.end) out.insert(e.segment);
    }
    return out;
}

}  // namespace uavsig
