#include "uavsig/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uavsig/csv.hpp"

namespace uavsig {

const char* to_string(Method method) {
    switch (method) {
        case Method::original: return "original";
        case Method::congestion: return "congestion";
        case Method::scats: return "scats";
        case Method::intellilight: return "intellilight";
        case Method::avars: return "avars";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    for (Method m : {Method::original, Method::congestion, Method::scats, Method::intellilight, Method::avars}) {
        if (text == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown method '" + text + "' (original, congestion, scats, intellilight, avars)");
}

bool is_learned(Method method) { return method == Method::intellilight || method == Method::avars; }

const char* to_string(SignalMode mode) {
    switch (mode) {
        case SignalMode::fixed: return "fixed";
        case SignalMode::drl: return "drl";
        case SignalMode::scats: return "scats";
    }
    return "?";
}

Algo ExperimentConfig::resolved_algo() const {
    if (algo) return *algo;
    return method == Method::intellilight ? Algo::dqn : Algo::ppo;
}

Hyperparams ExperimentConfig::resolved_hyper() const {
    return hyper_set ? hyper : Hyperparams::defaults_for(resolved_algo());
}

void ExperimentConfig::validate() const {
    uav.validate();
    if (uav_count < 1) throw std::invalid_argument("uav count must be at least 1");
    if (eval_episodes < 1) throw std::invalid_argument("evaluation needs at least one episode");
    if (depart_jitter < 0) throw std::invalid_argument("departure jitter must be non-negative");
    if (max_ticks < 1) throw std::invalid_argument("max ticks must be positive");
    resolved_hyper().validate();
}

const ClosureEvent& primary_closure(const Scenario& scenario) {
    if (scenario.closures.empty()) throw std::invalid_argument("the scenario declares no closure event");
    return scenario.closures.front();
}

std::vector<std::size_t> ControlPlan::intersections() const {
    std::vector<std::size_t> out;
    for (const auto& s : selected) out.push_back(s.intersection);
    return out;
}

ControlPlan plan_control(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config) {
    config.uav.validate();
    const auto& closure = primary_closure(*scenario);
    ControlPlan plan;
    plan.selected = select_intersections(scenario, closure, config.uav_count, config.seed);
    plan.dispatch = dispatch(config.uav, closure, plan.intersections(), *scenario);
    return plan;
}

TrafficEnvConfig env_config(const ExperimentConfig& config, const ControlPlan& plan) {
    TrafficEnvConfig ec;
    ec.kind = config.method == Method::intellilight ? ObservationKind::intellilight : ObservationKind::avars;
    ec.controlled = plan.intersections();
    ec.control_start = plan.dispatch.control_start;
    ec.control_end = plan.dispatch.control_end;
    ec.layout.monitoring_range = config.uav.monitoring_range;
    ec.sim.depart_jitter = config.depart_jitter;
    return ec;
}

Trainer train(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config,
              const ControlPlan& plan, int iterations, std::optional<Trainer> resume,
              const std::function<void(const IterationStats&)>& on_iteration) {
    if (!is_learned(config.method)) {
        throw std::invalid_argument(std::string("method ") + to_string(config.method) + " has nothing to train");
    }
    config.validate();
    TrafficEnv env(scenario, env_config(config, plan));
    Trainer trainer = resume ? std::move(*resume)
                             : Trainer(config.resolved_algo(), config.resolved_hyper(), env.observation_size(),
                                       config.seed);
    if (trainer.model().input_size() != env.observation_size()) {
        throw std::invalid_argument("checkpoint observation size does not match the method's observation");
    }
    for (int i = 0; i < iterations; ++i) {
        const auto stats = trainer.train_iteration(env);
        if (on_iteration) on_iteration(stats);
    }
    return trainer;
}

std::uint64_t evaluation_seed(std::uint64_t seed, int episode) {
    return derive_seed(seed, 0xe7a1'0000'0000ULL, static_cast<std::uint64_t>(episode));
}

EpisodeResult run_evaluation_episode(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config,
                                     const ControlPlan& plan, const Trainer* policy, std::uint64_t episode_seed) {
    const bool learned = is_learned(config.method);
    if (learned && !policy) throw std::invalid_argument("a trained checkpoint is required for learned methods");

    SimConfig sim;
    sim.seed = episode_seed;
    sim.depart_jitter = config.depart_jitter;
    sim.apply_closures = config.method != Method::original;
    WorldState world(scenario, sim);

    const auto controlled = plan.intersections();
    const TrafficEnvConfig ec = env_config(config, plan);
    const long start = static_cast<long>(std::ceil(plan.dispatch.control_start));
    const long end = static_cast<long>(std::ceil(plan.dispatch.control_end));
    const bool window = learned && end > start;

    std::vector<std::vector<SignalPlan>> variants;
    if (config.method == Method::scats) {
        for (std::size_t i = 0; i < world.machine_count(); ++i) variants.push_back(scats_variants(scenario->plan_for(i)));
    }

    EpisodeResult result;
    std::vector<double> running;
    std::vector<SignalCommand> commands(world.machine_count());
    std::vector<SignalMode> modes(world.machine_count());
    std::vector<std::string> plan_ids(world.machine_count());
    for (std::size_t i = 0; i < world.machine_count(); ++i) plan_ids[i] = world.machine(i).plan().id;

    while (!world.all_arrived()) {
        const long t = world.clock();
        if (t >= config.max_ticks) {
            throw std::runtime_error("evaluation stopped at tick " + std::to_string(t) + " with " +
                                     std::to_string(world.total_vehicles() - world.arrived_count()) +
                                     " vehicles still travelling");
        }
        std::fill(commands.begin(), commands.end(), SignalCommand{});
        std::fill(modes.begin(), modes.end(), config.method == Method::scats ? SignalMode::scats : SignalMode::fixed);
        if (window && t >= start && t < end) {
            for (std::size_t i : controlled) {
                commands[i].mode = SignalCommand::Mode::drl;
                modes[i] = SignalMode::drl;
                if (can_switch(world.machine(i))) {
                    const auto obs = ec.kind == ObservationKind::avars
                                         ? observe(world, i, ec.layout)
                                         : intellilight_observe(world, i, ec.layout, ec.intellilight);
                    commands[i].switch_phase = policy->act_greedy(obs) == 1;
                }
            }
        } else if (window && t == end) {
            for (std::size_t i : controlled) commands[i].mode = SignalCommand::Mode::hand_back;
        }
        world.step(commands);
        running.push_back(static_cast<double>(world.running_count()));

        for (std::size_t i = 0; i < world.machine_count(); ++i) {
            const auto& m = world.machine(i);
            if (m.plan().id != plan_ids[i]) {
                result.plan_changes.push_back({t, i, plan_ids[i], m.plan().id, m.cycle_completed()});
                plan_ids[i] = m.plan().id;
            }
            if (config.method == Method::scats && m.cycle_completed()) {
                LoopMeasurement lm{i, m.last_cycle_effective_green(), t};
                const auto& chosen = scats_select(variants[i], lm);
                if (chosen.id != m.plan().id) world.machine(i).set_pending_plan(chosen);
            }
            if (config.log_signals) {
                result.signals.push_back({t, i, modes[i], m.plan().id, m.phase_index(), m.sub_state()});
            }
        }
    }
    result.end_tick = world.clock();
    result.report = episode_report(to_string(config.method), world, std::move(running));
    return result;
}

Evaluation evaluate(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config,
                    const ControlPlan& plan, const Trainer* policy) {
    config.validate();
    Evaluation ev;
    std::vector<EpisodeReport> reports;
    for (int e = 0; e < config.eval_episodes; ++e) {
        ev.episodes.push_back(run_evaluation_episode(scenario, config, plan, policy, evaluation_seed(config.seed, e)));
        reports.push_back(ev.episodes.back().report);
    }
    ev.mean = average_reports(reports, SimConfig{}.emissions);
    return ev;
}

std::vector<SweepEntry> sweep_duration(const std::shared_ptr<const Scenario>& scenario, const ExperimentConfig& config,
                                       const Trainer& policy, const std::vector<double>& durations) {
    std::vector<SweepEntry> out;
    const ControlPlan base = plan_control(scenario, config);
    for (Method m : {Method::original, Method::congestion}) {
        ExperimentConfig c = config;
        c.method = m;
        auto ev = evaluate(scenario, c, base, nullptr);
        out.push_back({to_string(m), 0.0, 0.0, std::move(ev.mean)});
    }
    for (double d : durations) {
        ExperimentConfig c = config;
        c.method = Method::avars;
        c.uav.operation_duration = d;
        ControlPlan plan = base;
        plan.dispatch = dispatch(c.uav, primary_closure(*scenario), plan.intersections(), *scenario);
        auto ev = evaluate(scenario, c, plan, &policy);
        out.push_back({"avars_" + std::to_string(static_cast<long>(std::lround(d))) + "s", d,
                       plan.dispatch.control_end, std::move(ev.mean)});
    }
    return out;
}

void write_signal_log(const std::string& path, const std::vector<SignalLogRow>& rows, const Scenario& scenario) {
    CsvWriter csv(path);
    csv.row({"tick", "intersection", "mode", "plan", "phase", "state"});
    for (const auto& r : rows) {
        csv.row({std::to_string(r.t), scenario.net.node_id(scenario.net.intersection(r.intersection).node),
                 to_string(r.mode), r.plan, std::to_string(r.phase), to_string(r.state)});
    }
    csv.close();
}

void write_dispatch_csv(const std::string& path, const ControlPlan& plan, const Scenario& scenario) {
    CsvWriter csv(path);
    csv.row({"intersection", "impact_score", "control_start", "control_end"});
    for (const auto& s : plan.selected) {
        csv.row({scenario.net.node_id(scenario.net.intersection(s.intersection).node), format_real(s.score),
                 format_real(plan.dispatch.control_start), format_real(plan.dispatch.control_end)});
    }
    csv.close();
}

}  // namespace uavsig
