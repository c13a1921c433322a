#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "uavsig/grid.hpp"
#include "uavsig/uav.hpp"

using namespace uavsig;

namespace {

// One signalized junction j with four approaches of the given lengths.
Scenario star(double north, double east, double south, double west, const std::string& extra = "") {
    std::ostringstream doc;
    doc << "node j 0 0\nnode n 0 " << north << "\nnode e " << east << " 0\nnode s 0 -" << south << "\nnode w -" << west
        << " 0\n"
        << "edge nj n j " << north << " 10 1\nedge ej e j " << east << " 10 1\n"
        << "edge sj s j " << south << " 10 1\nedge wj w j " << west << " 10 1\n"
        << "edge jn j n " << north << " 10 1\n"
        << "plan p phase=30:1010 phase=30:0101+allred\n"
        << "tls j plan=p incoming=nj,ej,sj,wj\n"
        << extra;
    return load_scenario(doc.str());
}

}  // namespace

TEST(Coverage, ShortRoadsAreFullyCovered) {
    const auto sc = star(150, 150, 150, 150);
    const auto report = coverage_check(sc.net, 0, UavConfig{});
    EXPECT_TRUE(report.fully_covered());
    EXPECT_EQ(report.roads.size(), 5u);
    for (const auto& r : report.roads) EXPECT_DOUBLE_EQ(r.sensed_length, 150.0);
}

TEST(Coverage, LongRoadIsSensedOnlyNearTheStopLine) {
    const auto sc = star(150, 300, 150, 150);
    const auto report = coverage_check(sc.net, 0, UavConfig{});
    ASSERT_EQ(report.partial.size(), 1u);
    EXPECT_EQ(sc.net.segment(report.partial[0]).id, "ej");
    for (const auto& r : report.roads) {
        if (r.segment == report.partial[0]) {
            EXPECT_FALSE(r.full);
            EXPECT_DOUBLE_EQ(r.sensed_length, 220.0);
        }
    }
}

TEST(Coverage, ExactlyTheRangeIsFullyCovered) {
    const auto sc = star(220, 150, 150, 150);
    EXPECT_TRUE(coverage_check(sc.net, 0, UavConfig{}).fully_covered());
}

TEST(Coverage, WindowIgnoresVehiclesBeyondItAndNeverExceedsOne) {
    const auto sc = std::make_shared<const Scenario>(star(150, 300, 150, 150));
    WorldState w(sc, SimConfig{});
    const SegmentIndex ej = *sc->net.find_segment("ej");
    w.spawn_on_segment({ej}, 0, 10.0);  // 290 m from the stop line
    EXPECT_EQ(sense_window(w, ej, 220.0).vehicles, 0u);
    EXPECT_DOUBLE_EQ(sense_window(w, ej, 220.0).occupancy, 0.0);
    w.spawn_on_segment({ej}, 0, 200.0);
    EXPECT_EQ(sense_window(w, ej, 220.0).vehicles, 1u);
    EXPECT_DOUBLE_EQ(sense_window(w, ej, 220.0).occupancy, 5.0 / 220.0);
    for (int k = 0; k < 80; ++k) w.spawn_on_segment({ej}, 0, 295.0 - 3.0 * k);
    EXPECT_LE(sense_window(w, ej, 220.0).occupancy, 1.0);
}

TEST(Dispatch, TimelineFollowsTheClosure) {
    const auto sc = star(150, 150, 150, 150, "tmc 1000 0\n");
    const ClosureEvent closure{0, 600.0, 2400.0};
    const auto d = dispatch(UavConfig{}, closure, {0}, sc);
    EXPECT_DOUBLE_EQ(d.control_start, 900.0);
    EXPECT_DOUBLE_EQ(d.control_end, 2700.0);
    EXPECT_EQ(d.assignments.size(), 1u);
    EXPECT_TRUE(d.active(900.0));
    EXPECT_TRUE(d.active(2699.0));
    EXPECT_FALSE(d.active(2700.0));
}

TEST(Dispatch, BatteryCapsTheWindow) {
    const auto sc = star(150, 150, 150, 150, "tmc 0 0\n");
    UavConfig cfg;
    cfg.operation_duration = 3000.0;
    const auto d = dispatch(cfg, ClosureEvent{0, 600.0, 2400.0}, {0}, sc);
    EXPECT_DOUBLE_EQ(d.control_end - d.control_start, 2400.0);
}

TEST(Dispatch, IntersectionOutsideTheRadiusIsRejected) {
    const auto sc = star(150, 150, 150, 150, "tmc 6000 0\n");
    EXPECT_THROW(dispatch(UavConfig{}, ClosureEvent{0, 600.0, 2400.0}, {0}, sc), DispatchError);
    const auto no_tmc = star(150, 150, 150, 150);
    EXPECT_THROW(dispatch(UavConfig{}, ClosureEvent{0, 600.0, 2400.0}, {0}, no_tmc), DispatchError);
}

TEST(Select, ZeroDemandScoresZeroAndRanksById) {
    GridOptions o;
    o.rows = 3;
    o.cols = 3;
    o.demand_count = 0;
    const auto sc = std::make_shared<const Scenario>(load_scenario(generate_grid(o)));
    ASSERT_FALSE(sc->closures.empty());
    const auto top = select_intersections(sc, sc->closures.front(), 9);
    ASSERT_EQ(top.size(), 9u);
    std::vector<std::string> ids;
    for (const auto& s : top) {
        EXPECT_EQ(s.score, 0.0);
        ids.push_back(sc->net.node_id(sc->net.intersection(s.intersection).node));
    }
    EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
}

namespace {

// 3x3 lattice with identical plans, one fringe node per boundary approach and one
// vehicle for every ordered fringe pair in each of `waves` waves.
std::string symmetric_grid(int waves) {
    std::ostringstream doc;
    auto id = [](int r, int c) { return "x" + std::to_string(r) + std::to_string(c); };
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) doc << "node " << id(r, c) << ' ' << c * 100 << ' ' << -r * 100 << '\n';
    }
    std::vector<std::string> fringe;
    std::map<std::string, std::array<std::string, 4>> incoming;  // N, E, S, W
    auto edge = [&](const std::string& a, const std::string& b) {
        doc << "edge " << a << "_" << b << ' ' << a << ' ' << b << " 100 10 1\n";
        return a + "_" + b;
    };
    const int dr[4] = {-1, 0, 1, 0};
    const int dc[4] = {0, 1, 0, -1};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            for (int d = 0; d < 4; ++d) {
                const int nr = r + dr[d], nc = c + dc[d];
                std::string other;
                if (nr < 0 || nr > 2 || nc < 0 || nc > 2) {
                    other = "f" + id(r, c).substr(1) + "NESW"[d];
                    doc << "node " << other << ' ' << c * 100 + dc[d] * 100 << ' ' << -(r * 100 + dr[d] * 100) << '\n';
                    fringe.push_back(other);
                    edge(id(r, c), other);
                } else {
                    other = id(nr, nc);
                }
                incoming[id(r, c)][d] = edge(other, id(r, c));
            }
        }
    }
    doc << "plan p phase=30:1010 phase=30:0101\n";
    for (const auto& [node, in] : incoming) {
        doc << "tls " << node << " plan=p incoming=" << in[0] << ',' << in[1] << ',' << in[2] << ',' << in[3] << '\n';
    }
    int n = 0;
    for (int wave = 0; wave < waves; ++wave) {
        for (const auto& a : fringe) {
            for (const auto& b : fringe) {
                if (a != b) doc << "veh v" << n++ << ' ' << wave * 100 << ' ' << a << ' ' << b << '\n';
            }
        }
    }
    doc << "close x11_x12 300 1500\nclose x12_x11 300 1500\n";
    return doc.str();
}

}  // namespace

// Time-averaged worst incoming occupancy over the closure window, simulated directly.
std::vector<double> worst_occupancy(const Scenario& base, bool closed, double start, double end) {
    auto sc = std::make_shared<Scenario>(base);
    if (!closed) sc->closures.clear();
    WorldState w(sc, SimConfig{.seed = 7});
    std::vector<double> sum(sc->net.intersection_count(), 0.0);
    while (w.clock() < end) {
        const long t = w.clock();
        w.step_fixed();
        if (t < start) continue;
        for (std::size_t i = 0; i < sum.size(); ++i) {
            double worst = 0.0;
            for (SegmentIndex s : sc->net.intersection(i).incoming) {
                worst = std::max(worst, occupancy(w.segment_state(s), sc->net.segment(s)));
            }
            sum[i] += worst / (end - start);
        }
    }
    return sum;
}

TEST(Select, SymmetricGridMatchesDirectImpactSimulation) {
    const auto sc = std::make_shared<const Scenario>(load_scenario(symmetric_grid(15)));
    const auto& closure = sc->closures.front();
    const auto with = worst_occupancy(*sc, true, closure.start, closure.end);
    const auto without = worst_occupancy(*sc, false, closure.start, closure.end);
    const auto scores = impact_scores(sc, closure, 7);
    for (std::size_t i = 0; i < scores.size(); ++i) EXPECT_NEAR(scores[i].score, with[i] - without[i], 1e-12);

    // Traffic from the closed link detours over the parallel northern link (routing
    // ties go to the smaller id), so its two ends rank first.
    const auto top = select_intersections(sc, closure, 2, 7);
    std::vector<std::string> ids;
    for (const auto& s : top) ids.push_back(sc->net.node_id(sc->net.intersection(s.intersection).node));
    EXPECT_EQ(ids, (std::vector<std::string>{"x01", "x02"}));
}

TEST(Select, BundledGridGivesSixDeterministically) {
    const auto sc = std::make_shared<const Scenario>(load_scenario(generate_grid(GridOptions{})));
    const auto a = select_intersections(sc, sc->closures.front(), 6, 7);
    const auto b = select_intersections(sc, sc->closures.front(), 6, 7);
    ASSERT_EQ(a.size(), 6u);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].intersection, b[k].intersection);
        EXPECT_EQ(a[k].score, b[k].score);
    }
    EXPECT_THROW(select_intersections(sc, sc->closures.front(), 17, 7), std::invalid_argument);
    EXPECT_THROW(select_intersections(sc, sc->closures.front(), 0, 7), std::invalid_argument);
}

TEST(Select, InvariantToIntersectionEnumerationOrder) {
    const auto text = generate_grid(GridOptions{});
    std::istringstream in(text);
    std::vector<std::string> tls, rest;
    for (std::string line; std::getline(in, line);) (line.rfind("tls ", 0) == 0 ? tls : rest).push_back(line);
    std::reverse(tls.begin(), tls.end());
    std::string shuffled;
    for (const auto& l : rest) shuffled += l + "\n";
    for (const auto& l : tls) shuffled += l + "\n";

    auto names = [](const std::shared_ptr<const Scenario>& sc) {
        const auto top = select_intersections(sc, sc->closures.front(), 6, 7);
        std::vector<std::string> out;
        for (const auto& s : top) out.push_back(sc->net.node_id(sc->net.intersection(s.intersection).node));
        return out;
    };
    const auto a = std::make_shared<const Scenario>(load_scenario(text));
    const auto b = std::make_shared<const Scenario>(load_scenario(shuffled));
    EXPECT_NE(a->net.intersection(0).node, b->net.intersection(0).node);
    EXPECT_EQ(names(a), names(b));
}

TEST(UavConfig, Validation) {
    UavConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.monitoring_range = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
