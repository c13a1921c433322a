#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace uavsig {

inline constexpr int kYellowSeconds = 3;
inline constexpr int kAllRedSeconds = 5;
/// Minimum green enforced while a machine is under DRL control.
inline constexpr int kDefaultMinGreen = 5;

struct Phase {
    int green = 0;                 // seconds
    std::vector<bool> movements;   // green permission per incoming slot
    bool allred_after = false;
};

struct SignalPlan {
    std::string id;
    std::vector<Phase> phases;
    int yellow = kYellowSeconds;
    int allred = kAllRedSeconds;

    [[nodiscard]] int interphase_after(std::size_t phase) const;
    /// Sum of green + yellow (+ all-red where configured) over every phase.
    [[nodiscard]] int cycle_length() const;
    [[nodiscard]] std::size_t slot_count() const;
    /// Every incoming slot gets green in at least one phase and all phases agree on width.
    [[nodiscard]] bool serves_every_slot() const;
};

using PlanTable = std::map<std::string, SignalPlan>;

/// Parses a movement mask such as "1010" (one character per incoming slot).
std::vector<bool> parse_movement_mask(const std::string& text);
std::string format_movement_mask(const std::vector<bool>& mask);

enum class LightState : std::uint8_t { green, yellow, allred };

const char* to_string(LightState s);

/// Per-phase effective green gathered by stop-line loops over one cycle.
struct LoopMeasurement {
    std::size_t intersection = 0;
    std::vector<double> effective_green;
    long cycle_end_time = 0;
};

/// Runtime position of one intersection inside its signal plan.
///
/// `elapsed` counts the seconds the current sub-state has already been shown.
/// Every call to tick_fixed()/apply_action() represents one simulated second.
class PhaseMachine {
public:
    PhaseMachine() = default;
    explicit PhaseMachine(SignalPlan plan, int min_green = kDefaultMinGreen);

    void tick_fixed();
    /// `switch_phase` false keeps the current green; true ends it once min_green is met.
    void apply_action(bool switch_phase);
    /// Leaves DRL control: the static plan resumes at phase 0 through a normal interphase.
    void hand_back();

    /// Queue a plan to replace the current one at the next cycle boundary.
    void set_pending_plan(SignalPlan plan);
    [[nodiscard]] bool has_pending_plan() const { return has_pending_; }

    [[nodiscard]] const SignalPlan& plan() const { return plan_; }
    [[nodiscard]] std::size_t phase_index() const { return phase_; }
    [[nodiscard]] LightState sub_state() const { return state_; }
    [[nodiscard]] int elapsed() const { return elapsed_; }
    [[nodiscard]] int min_green() const { return min_green_; }
    [[nodiscard]] bool is_green_for(std::size_t slot) const;

    /// Stop-line loop input: a vehicle discharged from `slot` occupying `seconds` of green.
    void record_discharge(std::size_t slot, double seconds);
    /// True right after a tick that wrapped the machine back into phase 0 green.
    [[nodiscard]] bool cycle_completed() const { return cycle_completed_; }
    [[nodiscard]] const std::vector<double>& last_cycle_effective_green() const {
        return last_effective_;
    }
    /// Green actually shown per phase during the last completed cycle.
    [[nodiscard]] const std::vector<int>& last_cycle_green_shown() const { return last_green_shown_; }

    // Direct state injection, used by tests and checkpoint-free replays.
    void force_state(std::size_t phase, LightState state, int elapsed);

private:
    void enter_next_substate();
    void begin_green(std::size_t phase);
    void finish_cycle();
    void note_green_second();
    void reset_cycle_counters();

    SignalPlan plan_;
    SignalPlan pending_;
    bool has_pending_ = false;
    std::size_t phase_ = 0;
    std::size_t next_phase_ = 1;
    LightState state_ = LightState::green;
    int elapsed_ = 0;
    int min_green_ = kDefaultMinGreen;

    std::vector<std::vector<double>> occupied_;   // [phase][slot] seconds this cycle
    std::vector<int> green_shown_;                 // [phase] seconds this cycle
    std::vector<double> last_effective_;
    std::vector<int> last_green_shown_;
    bool cycle_completed_ = false;
};

/// Sum over phases of effective_green / green_duration.
double degree_of_saturation(const LoopMeasurement& m, const SignalPlan& plan);

/// Plan with the lowest degree of saturation; ties go to the lowest plan id.
const SignalPlan& scats_select(const std::vector<SignalPlan>& plans, const LoopMeasurement& m);

/// The base plan plus two variants that move 20% of phase 0's green to or from the
/// other phases while preserving the cycle length. Variant ids sort after the base id.
std::vector<SignalPlan> scats_variants(const SignalPlan& base);

}  // namespace uavsig
