#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uavsig/metrics.hpp"
#include "uavsig/rl.hpp"
#include "uavsig/traffic_env.hpp"
#include "uavsig/uav.hpp"

namespace uavsig {

enum class Method : std::uint8_t { original, congestion, scats, intellilight, avars };
const char* to_string(Method method);
Method parse_method(const std::string& text);
bool is_learned(Method method);

struct ExperimentConfig {
    std::string scenario_path;
    Method method = Method::avars;
    std::optional<Algo> algo;  // unset: PPO for avars, DQN for intellilight
    std::uint64_t seed = 7;
    UavConfig uav;
    int uav_count = 6;
    Hyperparams hyper;
    bool hyper_set = false;  // when false the algorithm defaults are used
    int eval_episodes = 10;
    int depart_jitter = 30;
    long max_ticks = 20000;
    bool log_signals = false;
    std::string output_dir = ".";

    [[nodiscard]] Algo resolved_algo() const;
    [[nodiscard]] Hyperparams resolved_hyper() const;
    void validate() const;
};

/// The closure the experiment reacts to: the scenario's first closure event.
const ClosureEvent& primary_closure(const Scenario& scenario);

struct ControlPlan {
    std::vector<ImpactScore> selected;
    Dispatch dispatch;
    [[nodiscard]] std::vector<std::size_t> intersections() const;
};

ControlPlan plan_control(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config);

TrafficEnvConfig env_config(const ExperimentConfig& config, const ControlPlan& plan);

/// Trains from scratch, or continues `resume` when given. `on_iteration` sees every iteration.
Trainer train(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config,
              const ControlPlan& plan, int iterations, std::optional<Trainer> resume = std::nullopt,
              const std::function<void(const IterationStats&)>& on_iteration = {});

enum class SignalMode : std::uint8_t { fixed, drl, scats };
const char* to_string(SignalMode mode);

struct SignalLogRow {
    long t = 0;
    std::size_t intersection = 0;
    SignalMode mode = SignalMode::fixed;
    std::string plan;
    std::size_t phase = 0;
    LightState state = LightState::green;
};

struct PlanChange {
    long t = 0;
    std::size_t intersection = 0;
    std::string from;
    std::string to;
    bool at_cycle_boundary = false;
};

struct EpisodeResult {
    EpisodeReport report;
    long end_tick = 0;
    std::vector<SignalLogRow> signals;
    std::vector<PlanChange> plan_changes;
};

/// One open-horizon evaluation run; learned methods act greedily with `policy`.
EpisodeResult run_evaluation_episode(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config,
                                     const ControlPlan& plan, const Trainer* policy, std::uint64_t episode_seed);

std::uint64_t evaluation_seed(std::uint64_t seed, int episode);

struct Evaluation {
    EpisodeReport mean;
    std::vector<EpisodeResult> episodes;
};
Evaluation evaluate(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config,
                    const ControlPlan& plan, const Trainer* policy);

struct SweepEntry {
    std::string label;
    double duration = 0.0;
    double control_end = 0.0;
    EpisodeReport report;
};
/// Original and Congestion references, then one AVARS evaluation per duration.
std::vector<SweepEntry> sweep_duration(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config,
                                       const Trainer& policy, const std::vector<double>& durations);

void write_signal_log(const std::string& path, const std::vector<SignalLogRow>& rows, const Scenario& scenario);
void write_dispatch_csv(const std::string& path, const ControlPlan& plan, const Scenario& scenario);

}  // namespace uavsig
