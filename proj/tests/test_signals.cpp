#include <gtest/gtest.h>

#include <random>

#include "uavsig/signals.hpp"

using namespace uavsig;

namespace {

SignalPlan two_phase(int g0, int g1, bool allred0 = false, bool allred1 = true) {
    SignalPlan p;
    p.id = "p";
    p.phases = {{g0, {true, false, true, false}, allred0}, {g1, {false, true, false, true}, allred1}};
    return p;
}

}  // namespace

TEST(PhaseMachine, GreenRollsToYellowAtDuration) {
    PhaseMachine m(two_phase(27, 40));
    m.force_state(0, LightState::green, 26);
    m.tick_fixed();
    EXPECT_EQ(m.sub_state(), LightState::yellow);
    EXPECT_EQ(m.elapsed(), 0);
}

TEST(PhaseMachine, YellowRollsToAllRedWhenConfigured) {
    PhaseMachine m(two_phase(27, 40, true));
    m.force_state(0, LightState::yellow, 2);
    m.tick_fixed();
    EXPECT_EQ(m.sub_state(), LightState::allred);
    EXPECT_EQ(m.elapsed(), 0);
}

TEST(PhaseMachine, LastAllRedWrapsToPhaseZero) {
    PhaseMachine m(two_phase(27, 40));
    m.force_state(1, LightState::allred, 4);
    m.tick_fixed();
    EXPECT_EQ(m.phase_index(), 0u);
    EXPECT_EQ(m.sub_state(), LightState::green);
    EXPECT_TRUE(m.cycle_completed());
}

TEST(PhaseMachine, FixedPlanRepeatsItsCycleLength) {
    const auto plan = two_phase(33, 45, true, true);
    PhaseMachine m(plan);
    std::vector<int> wraps;
    for (int t = 1; t <= 5 * plan.cycle_length(); ++t) {
        m.tick_fixed();
        if (m.cycle_completed()) wraps.push_back(t);
    }
    ASSERT_EQ(wraps.size(), 5u);
    for (std::size_t k = 1; k < wraps.size(); ++k) EXPECT_EQ(wraps[k] - wraps[k - 1], plan.cycle_length());
    EXPECT_EQ(plan.cycle_length(), 33 + 45 + 2 * 3 + 2 * 5);
}

TEST(PhaseMachine, SwitchAfterMinGreenStartsYellow) {
    PhaseMachine m(two_phase(27, 40), 10);
    m.force_state(0, LightState::green, 12);
    m.apply_action(true);
    EXPECT_EQ(m.sub_state(), LightState::yellow);
}

TEST(PhaseMachine, SwitchBeforeMinGreenIsIgnored) {
    PhaseMachine m(two_phase(27, 40), 10);
    m.force_state(0, LightState::green, 4);
    m.apply_action(true);
    EXPECT_EQ(m.sub_state(), LightState::green);
    EXPECT_EQ(m.elapsed(), 5);
}

TEST(PhaseMachine, YellowCannotBeSkipped) {
    PhaseMachine m(two_phase(27, 40), 10);
    m.force_state(0, LightState::yellow, 0);
    m.apply_action(true);
    EXPECT_EQ(m.sub_state(), LightState::yellow);
    EXPECT_EQ(m.elapsed(), 1);
}

TEST(PhaseMachine, KeepHoldsGreenPastItsPlannedDuration) {
    PhaseMachine m(two_phase(27, 40));
    for (int t = 0; t < 200; ++t) m.apply_action(false);
    EXPECT_EQ(m.sub_state(), LightState::green);
    EXPECT_EQ(m.elapsed(), 200);
}

TEST(PhaseMachine, RandomActionsKeepInterphasesAndMinGreen) {
    std::mt19937_64 rng(11);
    PhaseMachine m(two_phase(30, 40, true, false), kDefaultMinGreen);
    LightState prev = m.sub_state();
    std::size_t prev_phase = m.phase_index();
    int green_run = 0, yellow_run = 0, allred_run = 0;
    for (int t = 0; t < 20000; ++t) {
        m.apply_action(std::bernoulli_distribution(0.3)(rng));
        const LightState s = m.sub_state();
        if (s == LightState::green) {
            if (prev != LightState::green) {
                // Every green is entered from a complete interphase.
                const bool allred = m.plan().phases[prev_phase].allred_after;
                EXPECT_EQ(yellow_run, kYellowSeconds);
                EXPECT_EQ(allred_run, allred ? kAllRedSeconds : 0);
                EXPECT_NE(m.phase_index(), prev_phase);
                yellow_run = allred_run = 0;
                green_run = 0;
            }
            ++green_run;
        } else {
            if (prev == LightState::green) EXPECT_GE(green_run, kDefaultMinGreen);
            if (s == LightState::yellow) ++yellow_run;
            if (s == LightState::allred) ++allred_run;
        }
        prev = s;
        prev_phase = m.phase_index();
    }
}

TEST(PhaseMachine, HandBackFromOtherGreenGoesToPhaseZeroViaInterphase) {
    PhaseMachine m(two_phase(27, 40));
    m.force_state(1, LightState::green, 60);
    m.hand_back();
    EXPECT_EQ(m.sub_state(), LightState::yellow);
    for (int k = 0; k < kYellowSeconds + kAllRedSeconds; ++k) m.tick_fixed();
    EXPECT_EQ(m.phase_index(), 0u);
    EXPECT_EQ(m.sub_state(), LightState::green);
    EXPECT_EQ(m.elapsed(), 0);
}

TEST(PhaseMachine, HandBackInPhaseZeroRestartsItsGreen) {
    PhaseMachine m(two_phase(27, 40));
    m.force_state(0, LightState::green, 80);
    m.hand_back();
    EXPECT_EQ(m.phase_index(), 0u);
    EXPECT_EQ(m.sub_state(), LightState::green);
    EXPECT_EQ(m.elapsed(), 0);
}

TEST(PhaseMachine, PendingPlanWaitsForTheCycleBoundary) {
    auto plan = two_phase(30, 40);
    PhaseMachine m(plan);
    auto other = plan;
    other.id = "q";
    other.phases[0].green = 36;
    other.phases[1].green = 34;
    m.tick_fixed();
    m.set_pending_plan(other);
    int t = 1;
    while (!m.cycle_completed()) {
        EXPECT_EQ(m.plan().id, "p");
        m.tick_fixed();
        ++t;
    }
    EXPECT_EQ(t, plan.cycle_length());
    EXPECT_EQ(m.plan().id, "q");
    EXPECT_FALSE(m.has_pending_plan());
}

TEST(DegreeOfSaturation, Examples) {
    const auto plan = two_phase(30, 40);
    EXPECT_DOUBLE_EQ(degree_of_saturation({0, {15.0, 10.0}, 0}, plan), 0.75);
    EXPECT_DOUBLE_EQ(degree_of_saturation({0, {0.0, 0.0}, 0}, plan), 0.0);
    EXPECT_DOUBLE_EQ(degree_of_saturation({0, {30.0, 40.0}, 0}, plan), 2.0);
    EXPECT_THROW(degree_of_saturation({0, {1.0}, 0}, plan), std::invalid_argument);
}

TEST(DegreeOfSaturation, MonotoneInEachComponent) {
    std::mt19937_64 rng(5);
    const auto plan = two_phase(30, 40);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    for (int k = 0; k < 500; ++k) {
        LoopMeasurement m{0, {u(rng), u(rng)}, 0};
        const double base = degree_of_saturation(m, plan);
        for (std::size_t p = 0; p < 2; ++p) {
            auto more = m;
            more.effective_green[p] += u(rng) / 3.0;
            EXPECT_GE(degree_of_saturation(more, plan), base);
        }
    }
}

TEST(ScatsSelect, PicksLowestSaturation) {
    auto a = two_phase(30, 40);
    a.id = "A";
    auto b = two_phase(40, 30);
    b.id = "B";
    // A: 15/30 + 10/40 = 0.75; B: 15/40 + 10/30 = 0.7083
    EXPECT_EQ(scats_select({a, b}, {0, {15.0, 10.0}, 0}).id, "B");
}

TEST(ScatsSelect, TieGoesToLowestId) {
    auto p1 = two_phase(30, 40);
    p1.id = "plan1";
    auto p2 = p1;
    p2.id = "plan2";
    EXPECT_EQ(scats_select({p2, p1}, {0, {15.0, 0.0}, 0}).id, "plan1");
}

TEST(ScatsSelect, SingleCandidate) {
    auto p = two_phase(30, 40);
    EXPECT_EQ(scats_select({p}, {0, {3.0, 4.0}, 0}).id, "p");
    EXPECT_THROW(scats_select({}, {0, {}, 0}), std::invalid_argument);
}

TEST(ScatsVariants, ShiftTwentyPercentAndKeepTheCycle) {
    const auto base = two_phase(30, 40);
    const auto v = scats_variants(base);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].id, "p");
    EXPECT_EQ(v[1].phases[0].green, 36);
    EXPECT_EQ(v[1].phases[1].green, 34);
    EXPECT_EQ(v[2].phases[0].green, 24);
    EXPECT_EQ(v[2].phases[1].green, 46);
    for (const auto& p : v) EXPECT_EQ(p.cycle_length(), base.cycle_length());
    EXPECT_LT(v[0].id, v[1].id);
    EXPECT_LT(v[0].id, v[2].id);
}

TEST(MovementMask, RoundTrip) {
    EXPECT_EQ(format_movement_mask(parse_movement_mask("1010")), "1010");
    EXPECT_THROW(parse_movement_mask("10x0"), std::invalid_argument);
    EXPECT_THROW(parse_movement_mask(""), std::invalid_argument);
}
