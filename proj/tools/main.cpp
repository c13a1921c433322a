#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "uavsig/csv.hpp"
#include "uavsig/experiment.hpp"
#include "uavsig/grid.hpp"

namespace fs = std::filesystem;
using namespace uavsig;

namespace {

struct Options {
    ExperimentConfig exp;
    std::string method = "avars";
    std::string algo;
    std::vector<std::string> methods;
    std::vector<std::string> checkpoints;
    std::string checkpoint_out;
    std::string resume;
    int iterations = -1;
    int parallel_episodes = -1;
    double learning_rate = -1.0;
    double entropy_coef = -1.0;
    std::vector<double> durations = {600.0, 1200.0, 1800.0};

    GridOptions grid;
    std::string grid_out;
};

void add_uav_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--uav-duration", o.exp.uav.operation_duration, "Requested UAV operation (s)")->capture_default_str();
    cmd->add_option("--uav-count", o.exp.uav_count, "Number of UAV-controlled intersections")->capture_default_str();
    cmd->add_option("--uav-range", o.exp.uav.monitoring_range, "Camera monitoring range (m)")->capture_default_str();
    cmd->add_option("--uav-delay", o.exp.uav.arrival_delay, "UAV arrival after the closure starts (s)")
        ->capture_default_str();
}

void add_common_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--scenario", o.exp.scenario_path, "Scenario document")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.exp.seed, "Experiment seed")->capture_default_str();
    cmd->add_option("--output-dir,-o", o.exp.output_dir, "Directory for CSVs and the manifest")->capture_default_str();
    add_uav_flags(cmd, o);
}

std::shared_ptr<const Scenario> load(const Options& o) {
    return std::make_shared<const Scenario>(load_scenario_file(o.exp.scenario_path));
}

void finish_hyper(Options& o) {
    o.exp.method = parse_method(o.method);
    if (!o.algo.empty()) o.exp.algo = parse_algo(o.algo);
    Hyperparams hp = Hyperparams::defaults_for(o.exp.resolved_algo());
    if (o.iterations >= 0) hp.iterations = o.iterations;
    if (o.parallel_episodes > 0) hp.parallel_episodes = o.parallel_episodes;
    if (o.learning_rate >= 0.0) hp.learning_rate = o.learning_rate;
    if (o.entropy_coef >= 0.0) hp.entropy_coef = o.entropy_coef;
    o.exp.hyper = hp;
    o.exp.hyper_set = true;
}

std::string out_path(const Options& o, const std::string& name) { return (fs::path(o.exp.output_dir) / name).string(); }

class Manifest {
public:
    Manifest(const Options& o, const std::string& command) : path_(out_path(o, "manifest.txt")) {
        set("command", command);
        set("scenario", o.exp.scenario_path);
        set("seed", std::to_string(o.exp.seed));
        set("uav_count", std::to_string(o.exp.uav_count));
        set("uav_duration", format_real(o.exp.uav.operation_duration));
        set("uav_range", format_real(o.exp.uav.monitoring_range));
        set("uav_delay", format_real(o.exp.uav.arrival_delay));
        set("uav_battery", format_real(o.exp.uav.battery_life));
        set("depart_jitter", std::to_string(o.exp.depart_jitter));
    }
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    void hyper(const Hyperparams& hp) {
        std::string hidden;
        for (int h : hp.hidden) hidden += (hidden.empty() ? "" : ",") + std::to_string(h);
        set("iterations", std::to_string(hp.iterations));
        set("parallel_episodes", std::to_string(hp.parallel_episodes));
        set("learning_rate", format_real(hp.learning_rate));
        set("gamma", format_real(hp.gamma));
        set("hidden", hidden);
        set("clip", format_real(hp.clip));
        set("gae_lambda", format_real(hp.gae_lambda));
        set("epochs", std::to_string(hp.epochs));
        set("minibatch", std::to_string(hp.minibatch));
        set("value_coef", format_real(hp.value_coef));
        set("entropy_coef", format_real(hp.entropy_coef));
        set("batch", std::to_string(hp.batch));
        set("replay_capacity", std::to_string(hp.replay_capacity));
        set("target_sync", std::to_string(hp.target_sync));
        set("updates_per_iteration", std::to_string(hp.updates_per_iteration));
        set("epsilon", format_real(hp.epsilon_start) + "->" + format_real(hp.epsilon_end) + " over " +
                           format_real(hp.epsilon_fraction));
    }
    void write() const {
        std::ofstream out(path_);
        for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
        if (!out) throw std::runtime_error("cannot write " + path_);
    }

private:
    std::string path_;
    std::map<std::string, std::string> entries_;
};

std::string eval_seeds(const ExperimentConfig& c) {
    std::string s;
    for (int e = 0; e < c.eval_episodes; ++e) s += (e ? "," : "") + std::to_string(evaluation_seed(c.seed, e));
    return s;
}

int cmd_generate(Options& o) {
    const std::string doc = generate_grid(o.grid);
    if (o.grid_out.empty() || o.grid_out == "-") {
        std::cout << doc;
    } else {
        std::ofstream out(o.grid_out, std::ios::binary);
        out << doc;
        if (!out) throw std::runtime_error("cannot write " + o.grid_out);
    }
    load_scenario(doc);
    return 0;
}

int cmd_select(Options& o) {
    fs::create_directories(o.exp.output_dir);
    const auto scenario = load(o);
    const auto plan = plan_control(scenario, o.exp);
    write_dispatch_csv(out_path(o, "dispatch.csv"), plan, *scenario);
    for (std::size_t i : plan.intersections()) {
        const auto cov = coverage_check(scenario->net, i, o.exp.uav);
        for (const auto& road : cov.roads) {
            if (road.full) continue;
            std::cerr << "note: " << scenario->net.segment(road.segment).id << " is " << road.length
                      << " m long; only the " << road.sensed_length << " m nearest the stop line are sensed\n";
        }
    }
    Manifest m(o, "select-intersections");
    m.write();
    std::cout << "wrote " << out_path(o, "dispatch.csv") << '\n';
    return 0;
}

int cmd_train(Options& o) {
    finish_hyper(o);
    if (!is_learned(o.exp.method)) throw std::invalid_argument("train needs --method avars or intellilight");
    fs::create_directories(o.exp.output_dir);
    const auto scenario = load(o);
    const auto plan = plan_control(scenario, o.exp);
    write_dispatch_csv(out_path(o, "dispatch.csv"), plan, *scenario);
    std::optional<Trainer> resume;
    if (!o.resume.empty()) {
        resume = Trainer::load(o.resume);
        resume->set_planned_iterations(o.exp.hyper.iterations);
    }
    const int iterations = o.exp.hyper.iterations - static_cast<int>(resume ? resume->iteration() : 0);

    const std::string log_path = out_path(o, "training_log.csv");
    std::ofstream log(log_path, resume ? std::ios::app : std::ios::trunc);
    if (!resume) log << "iteration,mean_episode_reward,std_episode_reward,wall_seconds\n";
    const auto trainer = train(scenario, o.exp, plan, std::max(0, iterations), std::move(resume),
                               [&](const IterationStats& s) {
                                   log << s.iteration << ',' << format_real(s.mean_reward) << ','
                                       << format_real(s.std_reward) << ',' << format_real(s.wall_seconds) << '\n'
                                       << std::flush;
                                   std::cerr << "iteration " << s.iteration << " mean " << s.mean_reward << " std "
                                             << s.std_reward << '\n';
                               });
    if (!log) throw std::runtime_error("cannot write " + log_path);
    const std::string ckpt = o.checkpoint_out.empty() ? out_path(o, std::string(to_string(o.exp.method)) + ".ckpt")
                                                      : o.checkpoint_out;
    trainer.save(ckpt);

    Manifest m(o, "train");
    m.set("method", to_string(o.exp.method));
    m.set("algo", to_string(o.exp.resolved_algo()));
    m.set("checkpoint", ckpt);
    if (!o.resume.empty()) m.set("resumed_from", o.resume);
    m.hyper(o.exp.hyper);
    m.write();
    std::cout << "wrote " << ckpt << " and " << log_path << '\n';
    return 0;
}

std::map<Method, Trainer> load_checkpoints(const Options& o, const std::vector<Method>& methods) {
    std::map<Method, Trainer> out;
    std::vector<Method> learned;
    for (Method m : methods) {
        if (is_learned(m)) learned.push_back(m);
    }
    for (const auto& spec : o.checkpoints) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            if (learned.size() != 1) {
                throw std::invalid_argument("with several learned methods, give checkpoints as method=path");
            }
            out.emplace(learned.front(), Trainer::load(spec));
        } else {
            out.emplace(parse_method(spec.substr(0, eq)), Trainer::load(spec.substr(eq + 1)));
        }
    }
    for (Method m : learned) {
        if (!out.count(m)) throw std::invalid_argument(std::string("missing checkpoint for ") + to_string(m));
    }
    return out;
}

int cmd_evaluate(Options& o) {
    finish_hyper(o);
    std::vector<Method> methods;
    for (const auto& m : o.methods) methods.push_back(parse_method(m));
    if (methods.empty()) methods.push_back(o.exp.method);
    const auto trainers = load_checkpoints(o, methods);
    fs::create_directories(o.exp.output_dir);
    const auto scenario = load(o);
    const auto plan = plan_control(scenario, o.exp);
    write_dispatch_csv(out_path(o, "dispatch.csv"), plan, *scenario);

    ExperimentConfig base = o.exp;
    base.method = Method::congestion;
    const EpisodeReport congestion = evaluate(scenario, base, plan, nullptr).mean;

    std::vector<ReportRow> rows;
    for (Method m : methods) {
        ExperimentConfig c = o.exp;
        c.method = m;
        const Trainer* policy = is_learned(m) ? &trainers.at(m) : nullptr;
        auto ev = evaluate(scenario, c, plan, policy);
        write_series_csv(out_path(o, std::string("series_") + to_string(m) + ".csv"), ev.mean.running);
        if (o.exp.log_signals) {
            write_signal_log(out_path(o, std::string("signals_") + to_string(m) + ".csv"), ev.episodes.front().signals,
                             *scenario);
        }
        rows.push_back({fs::path(o.exp.scenario_path).stem().string(), ev.mean, &congestion});
        std::cout << to_string(m) << ": mean travel time " << ev.mean.travel_time.mean << " s\n";
    }
    write_report_csv(out_path(o, "report.csv"), rows);

    Manifest man(o, "evaluate");
    std::string names;
    for (Method m : methods) names += (names.empty() ? "" : ",") + std::string(to_string(m));
    man.set("methods", names);
    man.set("episodes", std::to_string(o.exp.eval_episodes));
    man.set("evaluation_seeds", eval_seeds(o.exp));
    man.set("baseline", "congestion");
    for (const auto& c : o.checkpoints) man.set("checkpoint", c);
    man.write();
    return 0;
}

int cmd_sweep(Options& o) {
    o.method = "avars";
    finish_hyper(o);
    const auto trainers = load_checkpoints(o, {Method::avars});
    fs::create_directories(o.exp.output_dir);
    const auto scenario = load(o);
    const auto entries = sweep_duration(scenario, o.exp, trainers.at(Method::avars), o.durations);

    const EpisodeReport* congestion = nullptr;
    for (const auto& e : entries) {
        if (e.label == "congestion") congestion = &e.report;
    }
    CsvWriter csv(out_path(o, "sweep.csv"));
    csv.row({"label", "duration", "control_end", "mean_travel_time", "travel_time_change_pct"});
    for (const auto& e : entries) {
        csv.row({e.label, format_real(e.duration), format_real(e.control_end), format_real(e.report.travel_time.mean),
                 format_real(percent_reduction(e.report.travel_time.mean, congestion->travel_time.mean))});
    }
    csv.close();

    std::size_t longest = 0;
    for (const auto& e : entries) longest = std::max(longest, e.report.running.size());
    CsvWriter series(out_path(o, "series_sweep.csv"));
    std::vector<std::string> header = {"tick"};
    for (const auto& e : entries) header.push_back(e.label);
    series.row(header);
    for (std::size_t t = 0; t < longest; ++t) {
        std::vector<std::string> row = {std::to_string(t)};
        for (const auto& e : entries) row.push_back(format_real(t < e.report.running.size() ? e.report.running[t] : 0.0));
        series.row(row);
    }
    series.close();

    Manifest man(o, "sweep-duration");
    std::string d;
    for (double x : o.durations) d += (d.empty() ? "" : ",") + format_real(x);
    man.set("durations", d);
    man.set("episodes", std::to_string(o.exp.eval_episodes));
    man.set("evaluation_seeds", eval_seeds(o.exp));
    for (const auto& c : o.checkpoints) man.set("checkpoint", c);
    man.write();
    for (const auto& e : entries) std::cout << e.label << ": mean travel time " << e.report.travel_time.mean << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV-assisted adaptive signal control experiments"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate-grid", "Write the synthetic grid scenario");
    gen->add_option("--rows", o.grid.rows)->capture_default_str();
    gen->add_option("--cols", o.grid.cols)->capture_default_str();
    gen->add_option("--demand", o.grid.demand_count, "Vehicle count")->capture_default_str();
    gen->add_option("--horizon", o.grid.horizon, "Demand horizon (s)")->capture_default_str();
    gen->add_option("--seed", o.grid.seed)->capture_default_str();
    gen->add_option("--out,-o", o.grid_out, "Output file (stdout when omitted)");

    auto* sel = app.add_subcommand("select-intersections", "Rank intersections by closure impact and dispatch UAVs");
    add_common_flags(sel, o);

    auto* tr = app.add_subcommand("train", "Train a signal-control policy");
    add_common_flags(tr, o);
    tr->add_option("--method", o.method, "avars or intellilight")->capture_default_str();
    tr->add_option("--algo", o.algo, "ppo or dqn (default: ppo for avars, dqn for intellilight)");
    tr->add_option("--iterations", o.iterations, "Training iterations (default 150)");
    tr->add_option("--parallel-episodes", o.parallel_episodes, "Episodes per iteration (default 18)");
    tr->add_option("--learning-rate", o.learning_rate);
    tr->add_option("--entropy-coef", o.entropy_coef);
    tr->add_option("--checkpoint", o.checkpoint_out, "Checkpoint to write");
    tr->add_option("--resume", o.resume, "Continue from this checkpoint")->check(CLI::ExistingFile);

    auto* ev = app.add_subcommand("evaluate", "Evaluate methods over fresh episodes");
    add_common_flags(ev, o);
    ev->add_option("--method", o.methods, "original, congestion, scats, intellilight, avars (repeatable)");
    ev->add_option("--checkpoint", o.checkpoints, "Checkpoint path, or method=path (repeatable)");
    ev->add_option("--episodes", o.exp.eval_episodes)->capture_default_str();
    ev->add_flag("--log-signals", o.exp.log_signals, "Write per-tick signal logs of the first episode");

    auto* sw = app.add_subcommand("sweep-duration", "Evaluate AVARS over several UAV operation durations");
    add_common_flags(sw, o);
    sw->add_option("--checkpoint", o.checkpoints, "AVARS checkpoint")->required();
    sw->add_option("--durations", o.durations, "Operation durations (s)")->delimiter(',')->capture_default_str();
    sw->add_option("--episodes", o.exp.eval_episodes)->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (gen->parsed()) return cmd_generate(o);
        if (sel->parsed()) return cmd_select(o);
        if (tr->parsed()) return cmd_train(o);
        if (ev->parsed()) return cmd_evaluate(o);
        if (sw->parsed()) return cmd_sweep(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
