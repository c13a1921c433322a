#include "uavsig/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uavsig {

int SignalPlan::interphase_after(std::size_t phase) const {
    return yellow + (phases.at(phase).allred_after ? allred : 0);
}

int SignalPlan::cycle_length() const {
    int total = 0;
    for (std::size_t i = 0; i < phases.size(); ++i) total += phases[i].green + interphase_after(i);
    return total;
}

std::size_t SignalPlan::slot_count() const {
    return phases.empty() ? 0 : phases.front().movements.size();
}

bool SignalPlan::serves_every_slot() const {
    const std::size_t width = slot_count();
    if (width == 0) return false;
    std::vector<bool> served(width, false);
    for (const auto& p : phases) {
        if (p.movements.size() != width) return false;
        for (std::size_t s = 0; s < width; ++s) served[s] = served[s] || p.movements[s];
    }
    return std::all_of(served.begin(), served.end(), [](bool b) { return b; });
}

std::vector<bool> parse_movement_mask(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty movement mask");
    std::vector<bool> mask;
    mask.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("movement mask must contain only 0/1: '" + text + "'");
        }
        mask.push_back(c == '1');
    }
    return mask;
}

std::string format_movement_mask(const std::vector<bool>& mask) {
    std::string out;
    out.reserve(mask.size());
    for (bool b : mask) out.push_back(b ? '1' : '0');
    return out;
}

const char* to_string(LightState s) {
    switch (s) {
        case LightState::green: return "green";
        case LightState::yellow: return "yellow";
        case LightState::allred: return "allred";
    }
    return "?";
}

PhaseMachine::PhaseMachine(SignalPlan plan, int min_green)
    : plan_(std::move(plan)), min_green_(min_green) {
    if (plan_.phases.empty()) throw std::invalid_argument("signal plan '" + plan_.id + "' has no phases");
    next_phase_ = plan_.phases.size() > 1 ? 1 : 0;
    reset_cycle_counters();
}

void PhaseMachine::reset_cycle_counters() {
    occupied_.assign(plan_.phases.size(), std::vector<double>(plan_.slot_count(), 0.0));
    green_shown_.assign(plan_.phases.size(), 0);
}

bool PhaseMachine::is_green_for(std::size_t slot) const {
    if (state_ != LightState::green) return false;
    const auto& mv = plan_.phases[phase_].movements;
    return slot < mv.size() && mv[slot];
}

void PhaseMachine::finish_cycle() {
    const std::size_t n = plan_.phases.size();
    last_effective_.assign(n, 0.0);
    last_green_shown_ = green_shown_;
    for (std::size_t p = 0; p < n; ++p) {
        double occupied = 0.0;
        for (double s : occupied_[p]) occupied = std::max(occupied, s);
        const double cap = std::min<double>(green_shown_[p], plan_.phases[p].green);
        last_effective_[p] = std::clamp(occupied, 0.0, cap);
    }
    cycle_completed_ = true;
    if (has_pending_) {
        plan_ = std::move(pending_);
        has_pending_ = false;
    }
    reset_cycle_counters();
}

void PhaseMachine::begin_green(std::size_t phase) {
    if (phase == 0) finish_cycle();
    phase_ = phase;
    next_phase_ = (phase + 1) % plan_.phases.size();
    state_ = LightState::green;
    elapsed_ = 0;
}

void PhaseMachine::enter_next_substate() {
    switch (state_) {
        case LightState::green:
            state_ = LightState::yellow;
            elapsed_ = 0;
            break;
        case LightState::yellow:
            if (plan_.phases[phase_].allred_after) {
                state_ = LightState::allred;
                elapsed_ = 0;
            } else {
                begin_green(next_phase_);
            }
            break;
        case LightState::allred:
            begin_green(next_phase_);
            break;
    }
}

void PhaseMachine::note_green_second() {
    if (state_ == LightState::green) ++green_shown_[phase_];
}

void PhaseMachine::tick_fixed() {
    cycle_completed_ = false;
    ++elapsed_;
    int duration = 0;
    switch (state_) {
        case LightState::green: duration = plan_.phases[phase_].green; break;
        case LightState::yellow: duration = plan_.yellow; break;
        case LightState::allred: duration = plan_.allred; break;
    }
    if (elapsed_ >= duration) enter_next_substate();
    note_green_second();
}

void PhaseMachine::apply_action(bool switch_phase) {
    if (state_ != LightState::green) {
        tick_fixed();
        return;
    }
    cycle_completed_ = false;
    if (switch_phase && elapsed_ >= min_green_) {
        state_ = LightState::yellow;
        elapsed_ = 0;
    } else {
        ++elapsed_;
    }
    note_green_second();
}

void PhaseMachine::hand_back() {
    if (state_ == LightState::green) {
        cycle_completed_ = false;
        if (phase_ == 0) {
            elapsed_ = 0;
        } else {
            next_phase_ = 0;
            state_ = LightState::yellow;
            elapsed_ = 0;
        }
        note_green_second();
        return;
    }
    next_phase_ = 0;
    tick_fixed();
}

void PhaseMachine::set_pending_plan(SignalPlan plan) {
    if (plan.phases.size() != plan_.phases.size() || plan.slot_count() != plan_.slot_count()) {
        throw std::invalid_argument("pending plan '" + plan.id + "' does not match phase layout of '" +
                                    plan_.id + "'");
    }
    pending_ = std::move(plan);
    has_pending_ = true;
}

void PhaseMachine::record_discharge(std::size_t slot, double seconds) {
    if (state_ != LightState::green || slot >= occupied_[phase_].size()) return;
    occupied_[phase_][slot] += seconds;
}

void PhaseMachine::force_state(std::size_t phase, LightState state, int elapsed) {
    if (phase >= plan_.phases.size()) throw std::out_of_range("phase index out of range");
    phase_ = phase;
    next_phase_ = (phase + 1) % plan_.phases.size();
    state_ = state;
    elapsed_ = elapsed;
}

double degree_of_saturation(const LoopMeasurement& m, const SignalPlan& plan) {
    if (m.effective_green.size() != plan.phases.size()) {
        throw std::invalid_argument("loop measurement covers " + std::to_string(m.effective_green.size()) +
                                    " phases but plan '" + plan.id + "' has " +
                                    std::to_string(plan.phases.size()));
    }
    double ds = 0.0;
    for (std::size_t p = 0; p < plan.phases.size(); ++p) {
        ds += m.effective_green[p] / static_cast<double>(plan.phases[p].green);
    }
    return ds;
}

const SignalPlan& scats_select(const std::vector<SignalPlan>& plans, const LoopMeasurement& m) {
    if (plans.empty()) throw std::invalid_argument("scats_select needs at least one candidate plan");
    const SignalPlan* best = nullptr;
    double best_ds = 0.0;
    for (const auto& p : plans) {
        const double ds = degree_of_saturation(m, p);
        if (best == nullptr || ds < best_ds || (ds == best_ds && p.id < best->id)) {
            best = &p;
            best_ds = ds;
        }
    }
    return *best;
}

namespace {

// Moves `delta` seconds onto phase 0 (negative takes them away), spreading the
// opposite change over the other phases in proportion to their green.
SignalPlan shift_split(const SignalPlan& base, int delta, const std::string& suffix) {
    SignalPlan out = base;
    out.id = base.id + suffix;
    int others = 0;
    for (std::size_t i = 1; i < base.phases.size(); ++i) others += base.phases[i].green;
    int remaining = delta;
    for (std::size_t i = 1; i < base.phases.size(); ++i) {
        const int share = static_cast<int>(std::trunc(static_cast<double>(delta) * base.phases[i].green / others));
        out.phases[i].green -= share;
        remaining -= share;
    }
    out.phases[1].green -= remaining;
    out.phases[0].green += delta;
    for (const auto& p : out.phases) {
        if (p.green < 1) throw std::invalid_argument("split shift leaves a non-positive green in " + out.id);
    }
    return out;
}

}  // namespace

std::vector<SignalPlan> scats_variants(const SignalPlan& base) {
    std::vector<SignalPlan> out{base};
    if (base.phases.size() < 2) return out;
    const int delta = static_cast<int>(std::lround(0.2 * base.phases[0].green));
    if (delta == 0) return out;
    out.push_back(shift_split(base, delta, "~a"));
    out.push_back(shift_split(base, -delta, "~b"));
    return out;
}

}  // namespace uavsig
