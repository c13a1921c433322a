#include <gtest/gtest.h>

#include <cmath>

#include "uavsig/experiment.hpp"
#include "uavsig/grid.hpp"
#include "uavsig/traffic_env.hpp"

using namespace uavsig;

namespace {

// Junction j fed by three 100 m roads; phase 0 serves a and c, phase 1 serves b.
std::shared_ptr<const Scenario> tee() {
    return std::make_shared<const Scenario>(load_scenario(
        "node j\nnode a\nnode b\nnode c\nnode out\n"
        "edge aj a j 100 10 1\nedge bj b j 100 10 1\nedge cj c j 100 10 1\n"
        "edge jo j out 100 10 1\n"
        "plan p phase=30:101 phase=30:010\n"
        "tls j plan=p incoming=aj,bj,cj\n"));
}

SegmentIndex seg(const WorldState& w, const std::string& id) { return *w.net().find_segment(id); }

std::vector<SignalCommand> hold(const WorldState& w) {
    return std::vector<SignalCommand>(w.machine_count(), SignalCommand{SignalCommand::Mode::drl, false});
}

// Places `n` vehicles nose to tail at the stop line of `road`.
void queue_up(WorldState& w, const std::string& road, int n) {
    for (int k = 0; k < n; ++k) w.spawn_on_segment({seg(w, road), seg(w, "jo")}, -100, 100.0 - 5.0 * k);
}

}  // namespace

TEST(Observe, EmptyNetworkInPhaseZero) {
    WorldState w(tee(), SimConfig{});
    const auto obs = observe(w, 0, ObservationLayout{});
    ASSERT_EQ(obs.size(), 10);
    Eigen::VectorXd expected(10);
    expected << 1, 0, 0, 1, 0, 1, 0, 1, 0, 0;
    EXPECT_EQ(obs, expected);
    EXPECT_DOUBLE_EQ(reward(w, 0, ObservationLayout{}), 0.0);
}

TEST(Observe, OccupancyPassesThrough) {
    WorldState w(tee(), SimConfig{});
    w.machine(0).force_state(1, LightState::green, 0);
    queue_up(w, "aj", 2);
    w.step(hold(w));
    const auto obs = observe(w, 0, ObservationLayout{});
    EXPECT_DOUBLE_EQ(obs[0], 0.0);
    EXPECT_DOUBLE_EQ(obs[1], 1.0);
    EXPECT_DOUBLE_EQ(obs[2], 0.10);
    EXPECT_DOUBLE_EQ(obs[3], 0.0);  // held at red
    for (Eigen::Index k = 0; k < obs.size(); ++k) {
        EXPECT_GE(obs[k], 0.0);
        EXPECT_LE(obs[k], 1.0);
    }
}

TEST(Observe, TooManyRoadsOrPhasesIsRejected) {
    WorldState w(tee(), SimConfig{});
    ObservationLayout narrow;
    narrow.max_roads = 2;
    EXPECT_THROW(observe(w, 0, narrow), std::invalid_argument);
    ObservationLayout one_phase;
    one_phase.max_phases = 1;
    EXPECT_THROW(observe(w, 0, one_phase), std::invalid_argument);
}

TEST(Reward, NegativeMaximumOccupancy) {
    WorldState w(tee(), SimConfig{});
    w.machine(0).force_state(1, LightState::green, 0);
    queue_up(w, "aj", 4);   // 0.2
    queue_up(w, "cj", 2);   // 0.1
    w.step(hold(w));
    EXPECT_DOUBLE_EQ(reward(w, 0, ObservationLayout{}), -0.2);

    WorldState v(tee(), SimConfig{});
    v.machine(0).force_state(1, LightState::green, 0);
    queue_up(v, "aj", 4);
    queue_up(v, "cj", 2);
    v.spawn_on_segment({seg(v, "bj"), seg(v, "jo")}, 0, 10.0);
    for (int k = 1; k < 10; ++k) v.spawn_on_segment({seg(v, "bj"), seg(v, "jo")}, 0, 10.0 + 5.0 * k);
    // bj holds 10 vehicles (0.5) while a and c hold 0.2 and 0.1.
    EXPECT_DOUBLE_EQ(reward(v, 0, ObservationLayout{}), -0.5);
}

TEST(Reward, SpillbackSaturates) {
    WorldState w(tee(), SimConfig{});
    w.machine(0).force_state(1, LightState::green, 0);
    queue_up(w, "aj", 20);
    w.step(hold(w));
    EXPECT_DOUBLE_EQ(reward(w, 0, ObservationLayout{}), -1.0);
}

TEST(Reward, MatchesTheOccupancySlotsOfTheObservation) {
    GridOptions o;
    o.demand_count = 500;
    o.horizon = 900;
    o.closure_start = 100;
    o.closure_end = 700;
    const auto sc = std::make_shared<const Scenario>(load_scenario(generate_grid(o)));
    WorldState w(sc, SimConfig{.seed = 3});
    const ObservationLayout layout;
    while (w.clock() < 900) {
        w.step_fixed();
        if (w.clock() % 50 != 0) continue;
        for (std::size_t i = 0; i < w.machine_count(); ++i) {
            const auto obs = observe(w, i, layout);
            double worst = 0.0;
            const auto roads = sc->net.intersection(i).incoming.size();
            for (std::size_t k = 0; k < roads; ++k) worst = std::max(worst, obs[static_cast<Eigen::Index>(2 + 2 * k)]);
            EXPECT_EQ(reward(w, i, layout), -worst);
        }
    }
}

TEST(IntelliLight, EmptyWorldHasOnlyThePhaseBit) {
    WorldState w(tee(), SimConfig{});
    const IntelliLightConfig cfg;
    const auto obs = intellilight_observe(w, 0, ObservationLayout{}, cfg);
    ASSERT_EQ(obs.size(), 4 * 3 + 2 + 4 * 5);
    EXPECT_EQ(obs.sum(), 1.0);
    EXPECT_EQ(obs[12], 1.0);
    EXPECT_DOUBLE_EQ(intellilight_reward(w, 0, false, cfg), 0.0);
}

TEST(IntelliLight, QueueSlotCountsStoppedVehicles) {
    WorldState w(tee(), SimConfig{});
    w.machine(0).force_state(1, LightState::green, 0);
    queue_up(w, "aj", 3);
    w.step(hold(w));
    const IntelliLightConfig cfg;
    const auto obs = intellilight_observe(w, 0, ObservationLayout{}, cfg);
    EXPECT_DOUBLE_EQ(obs[0], 3.0 / cfg.queue_cap);
    EXPECT_DOUBLE_EQ(obs[1], 3.0 / cfg.vehicle_cap);
    EXPECT_DOUBLE_EQ(obs[2], 3.0 / cfg.waiting_cap);
}

TEST(IntelliLight, MidSegmentVehicleLandsInTheThirdCell) {
    WorldState w(tee(), SimConfig{});
    w.spawn_on_segment({seg(w, "bj"), seg(w, "jo")}, 0, 50.0);
    const IntelliLightConfig cfg;
    const auto obs = intellilight_observe(w, 0, ObservationLayout{}, cfg);
    const Eigen::Index base = 4 * 3 + 2 + 1 * cfg.cells;  // road bj
    for (int c = 0; c < cfg.cells; ++c) {
        if (c == 2) {
            EXPECT_DOUBLE_EQ(obs[base + c], 5.0 / 20.0);
        } else {
            EXPECT_EQ(obs[base + c], 0.0) << "cell " << c;
        }
    }
}

TEST(IntelliLight, WeightedRewardArithmetic) {
    WorldState w(tee(), SimConfig{});
    w.machine(0).force_state(1, LightState::green, 0);
    queue_up(w, "aj", 4);
    for (int t = 0; t < 5; ++t) w.step(hold(w));
    // Four vehicles idle for five seconds each: queue 4, waiting 20 s.
    EXPECT_DOUBLE_EQ(intellilight_reward(w, 0, true, IntelliLightConfig{}), -(4.0 + 2.0 + 1.0));
    EXPECT_DOUBLE_EQ(intellilight_reward(w, 0, false, IntelliLightConfig{}), -(4.0 + 2.0));
}

TEST(IntelliLight, CongestedRewardsDwarfOccupancyRewards) {
    const auto sc = std::make_shared<const Scenario>(load_scenario(generate_grid(GridOptions{})));
    WorldState w(sc, SimConfig{.depart_jitter = 30, .seed = 1});
    while (w.clock() < 1800) w.step_fixed();
    double avars = 0.0, rich = 0.0;
    for (std::size_t i = 0; i < w.machine_count(); ++i) {
        avars += std::abs(reward(w, i, ObservationLayout{}));
        rich += std::abs(intellilight_reward(w, i, false, IntelliLightConfig{}));
    }
    ASSERT_GT(avars, 0.0);
    EXPECT_GE(rich, 10.0 * avars);
}

TEST(TrafficEnv, TimelineAndDeciders) {
    const auto sc = std::make_shared<const Scenario>(load_scenario(generate_grid(GridOptions{})));
    TrafficEnvConfig cfg;
    cfg.controlled = {0, 5};
    cfg.control_start = 900;
    cfg.control_end = 960;
    TrafficEnv env(sc, cfg);
    EXPECT_EQ(env.observation_size(), 10);
    env.reset(4);
    EXPECT_EQ(env.world().clock(), 900);
    int steps = 0;
    while (!env.done()) {
        for (std::size_t a : env.deciders()) EXPECT_TRUE(can_switch(env.world().machine(cfg.controlled[a])));
        const auto r = env.step({1, 1});
        ASSERT_EQ(r.size(), 2u);
        for (double x : r) {
            EXPECT_LE(x, 0.0);
            EXPECT_GE(x, -1.0);
        }
        ++steps;
    }
    EXPECT_EQ(steps, 60);

    cfg.kind = ObservationKind::intellilight;
    TrafficEnv rich(sc, cfg);
    EXPECT_EQ(rich.observation_size(), 4 * 3 + 2 + 4 * 5);
    EXPECT_THROW(TrafficEnv(sc, TrafficEnvConfig{}), std::invalid_argument);
}
