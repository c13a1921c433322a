#include "uavsig/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "uavsig/network.hpp"

namespace uavsig {

namespace {

std::string lattice(int r, int c) { return "n" + std::to_string(r) + "_" + std::to_string(c); }
std::string edge_id(const std::string& from, const std::string& to) { return "e_" + from + "_" + to; }

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct Link {
    std::string a, b;
};

}  // namespace

std::string generate_grid(const GridOptions& o) {
    if (o.rows < 2 || o.cols < 2) throw std::invalid_argument("grid needs at least 2 rows and 2 columns");
    if ((o.rows - 2) * (o.cols - 2) <= 0) {
        throw std::invalid_argument("a " + std::to_string(o.rows) + "x" + std::to_string(o.cols) +
                                    " grid has 0 internal intersections; the central closure needs at least 3x3");
    }
    if (o.demand_count < 0) throw std::invalid_argument("demand count must be non-negative");
    if (!(o.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (!(o.block_length > 0.0) || o.block_length > 220.0) {
        throw std::invalid_argument("block length must be in (0, 220] m to stay camera-coverable");
    }

    std::mt19937_64 rng(o.seed);
    std::ostringstream doc;
    doc << "# synthetic " << o.rows << "x" << o.cols << " signalized grid, seed " << o.seed << "\n";

    const double L = o.block_length;
    const int river_above = o.river ? o.rows / 2 - 1 : -1;  // gap lies between this row and the next
    auto vertical_link = [&](int r, int c) {
        return r != river_above || c == (o.cols - 1) / 2 || c == (o.cols - 1) / 2 + 1;
    };
    std::vector<std::string> fringe;
    std::vector<Link> links;
    for (int r = 0; r < o.rows; ++r) {
        for (int c = 0; c < o.cols; ++c) doc << "node " << lattice(r, c) << ' ' << num(c * L) << ' ' << num(-r * L) << '\n';
    }
    auto add_fringe = [&](const std::string& id, double x, double y, const std::string& to) {
        doc << "node " << id << ' ' << num(x) << ' ' << num(y) << '\n';
        fringe.push_back(id);
        links.push_back({id, to});
    };
    for (int c = 0; c < o.cols; ++c) add_fringe("fN" + std::to_string(c), c * L, L, lattice(0, c));
    for (int r = 0; r < o.rows; ++r) add_fringe("fE" + std::to_string(r), o.cols * L, -r * L, lattice(r, o.cols - 1));
    for (int c = 0; c < o.cols; ++c) add_fringe("fS" + std::to_string(c), c * L, -o.rows * L, lattice(o.rows - 1, c));
    for (int r = 0; r < o.rows; ++r) add_fringe("fW" + std::to_string(r), -L, -r * L, lattice(r, 0));
    for (int r = 0; r < o.rows; ++r) {
        for (int c = 0; c < o.cols; ++c) {
            if (c + 1 < o.cols) links.push_back({lattice(r, c), lattice(r, c + 1)});
            if (r + 1 < o.rows && vertical_link(r, c)) links.push_back({lattice(r, c), lattice(r + 1, c)});
        }
    }
    for (const auto& l : links) {
        for (const auto& [from, to] : {std::pair{l.a, l.b}, std::pair{l.b, l.a}}) {
            doc << "edge " << edge_id(from, to) << ' ' << from << ' ' << to << ' ' << num(L) << ' ' << num(o.speed_limit)
                << ' ' << o.lanes << '\n';
        }
    }

    // Incoming order at every lattice node is north, east, south, west; phase 0 serves
    // the north/south approaches and phase 1 the east/west ones.
    std::uniform_int_distribution<int> green(27, 50);
    std::bernoulli_distribution allred(0.5);
    for (int r = 0; r < o.rows; ++r) {
        for (int c = 0; c < o.cols; ++c) {
            bool with_allred = allred(rng);
            const int interphase = 2 * (3 + (with_allred ? 5 : 0));
            int g0 = 0;
            int g1 = 0;
            do {
                g0 = green(rng);
                g1 = green(rng);
            } while (g0 + g1 + interphase < 90 || g0 + g1 + interphase > 113);
            const bool bridgehead = o.river && (r == river_above || r == river_above + 1) && vertical_link(river_above, c);
            if (bridgehead) {
                g0 = 27;
                g1 = 50;
                with_allred = true;
            }
            const bool has_north = r == 0 || vertical_link(r - 1, c);
            const bool has_south = r + 1 == o.rows || vertical_link(r, c);
            std::string ns = std::string(has_north ? "1" : "") + "0" + (has_south ? "1" : "") + "0";
            std::string ew = std::string(has_north ? "0" : "") + "1" + (has_south ? "0" : "") + "1";
            const std::string tail = with_allred ? "+allred" : "";
            doc << "plan p_" << lattice(r, c) << " phase=" << g0 << ':' << ns << tail << " phase=" << g1 << ':' << ew << tail
                << '\n';
        }
    }
    for (int r = 0; r < o.rows; ++r) {
        for (int c = 0; c < o.cols; ++c) {
            const std::string here = lattice(r, c);
            const std::string north = r == 0 ? "fN" + std::to_string(c) : lattice(r - 1, c);
            const std::string east = c + 1 == o.cols ? "fE" + std::to_string(r) : lattice(r, c + 1);
            const std::string south = r + 1 == o.rows ? "fS" + std::to_string(c) : lattice(r + 1, c);
            const std::string west = c == 0 ? "fW" + std::to_string(r) : lattice(r, c - 1);
            std::vector<std::string> incoming;
            if (r == 0 || vertical_link(r - 1, c)) incoming.push_back(edge_id(north, here));
            incoming.push_back(edge_id(east, here));
            if (r + 1 == o.rows || vertical_link(r, c)) incoming.push_back(edge_id(south, here));
            incoming.push_back(edge_id(west, here));
            doc << "tls " << here << " plan=p_" << here << " incoming=";
            for (std::size_t k = 0; k < incoming.size(); ++k) doc << (k ? "," : "") << incoming[k];
            doc << '\n';
        }
    }
    doc << "tmc " << num((o.cols - 1) * L / 2.0) << ' ' << num(-(o.rows - 1) * L / 2.0) << '\n';

    std::uniform_int_distribution<std::size_t> pick(0, fringe.size() - 1);
    std::uniform_real_distribution<double> when(0.0, o.horizon);
    std::vector<std::pair<long, std::pair<std::size_t, std::size_t>>> trips;
    for (int k = 0; k < o.demand_count; ++k) {
        const std::size_t from = pick(rng);
        std::size_t to = pick(rng);
        while (to == from) to = pick(rng);
        double t = when(rng);
        if (o.peaked_demand) t = 0.5 * (t + when(rng));
        trips.push_back({static_cast<long>(std::floor(t)), {from, to}});
    }
    std::stable_sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    const int width = std::max<int>(4, static_cast<int>(std::to_string(o.demand_count).size()));
    for (std::size_t k = 0; k < trips.size(); ++k) {
        std::string id = std::to_string(k);
        id.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(id.size()))), '0');
        doc << "veh v" << id << ' ' << trips[k].first << ' ' << fringe[trips[k].second.first] << ' '
            << fringe[trips[k].second.second] << '\n';
    }

    if (o.close_center) {
        // Among the links nearest the grid centre, close the one carrying the most
        // free-flow routes, in both directions.
        const Scenario base = load_scenario(doc.str());
        std::map<std::string, int> usage;
        std::map<std::pair<NodeIndex, NodeIndex>, Route> cache;
        for (const auto& d : base.demand) {
            auto key = std::make_pair(d.origin, d.destination);
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, shortest_path(base.net, d.origin, d.destination)).first;
            for (SegmentIndex s : it->second.segments) ++usage[base.net.segment(s).id];
        }
        const double cx = (o.cols - 1) / 2.0;
        const double cy = (o.rows - 1) / 2.0;
        double best_dist = 0.0;
        int best_use = -1;
        std::pair<std::string, std::string> best;
        for (int r = 0; r < o.rows; ++r) {
            for (int c = 0; c < o.cols; ++c) {
                for (const auto& [dr, dc] : {std::pair{0, 1}, std::pair{1, 0}}) {
                    const int r2 = r + dr;
                    const int c2 = c + dc;
                    if (r2 >= o.rows || c2 >= o.cols) continue;
                    if (dr == 1 && !vertical_link(r, c)) continue;
                    const double mx = (c + c2) / 2.0 - cx;
                    const double my = (r + r2) / 2.0 - cy;
                    const double dist = std::hypot(mx, my);
                    const std::string a = lattice(r, c);
                    const std::string b = lattice(r2, c2);
                    const int use = usage[edge_id(a, b)] + usage[edge_id(b, a)];
                    const bool closer = best_use < 0 || dist < best_dist - 1e-9;
                    const bool same = std::abs(dist - best_dist) <= 1e-9;
                    if (closer || (same && use > best_use)) {
                        best_dist = dist;
                        best_use = use;
                        best = {a, b};
                    }
                }
            }
        }
        doc << "close " << edge_id(best.first, best.second) << ' ' << num(o.closure_start) << ' ' << num(o.closure_end)
            << '\n';
        doc << "close " << edge_id(best.second, best.first) << ' ' << num(o.closure_start) << ' ' << num(o.closure_end)
            << '\n';
    }
    return doc.str();
}

}  // namespace uavsig
