#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "uavsig/mlp.hpp"

namespace uavsig {

enum class Algo : std::uint8_t { dqn, ppo };
const char* to_string(Algo algo);
Algo parse_algo(const std::string& text);

struct Hyperparams {
    double learning_rate = 3e-4;
    double gamma = 0.99;
    std::vector<int> hidden = {64, 64};
    int iterations = 150;
    int parallel_episodes = 18;
    double max_grad_norm = 0.5;

    // PPO
    double clip = 0.2;
    double gae_lambda = 0.95;
    int epochs = 4;
    int minibatch = 256;
    double value_coef = 0.5;
    double entropy_coef = 0.0;

    // DQN
    int batch = 64;
    int replay_capacity = 50000;
    int target_sync = 500;
    int updates_per_iteration = 5000;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_fraction = 0.3;  // of `iterations`

    void validate() const;
    static Hyperparams defaults_for(Algo algo);
};

/// One decision of one agent. Rewards earned until the agent's next decision are
/// folded into `reward`, and `discount` is gamma raised to the elapsed steps.
struct Transition {
    Eigen::VectorXd state;
    int action = 0;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    double discount = 1.0;
    bool done = false;
    // PPO only
    double log_prob = 0.0;
    double value = 0.0;
};

/// FIFO store with a fixed capacity.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 50000);
    void push(Transition t);
    [[nodiscard]] std::size_t size() const { return items_.size(); }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] const Transition& operator[](std::size_t i) const { return items_[i]; }
    [[nodiscard]] const std::deque<Transition>& items() const { return items_; }
    void clear() { items_.clear(); }

private:
    std::size_t capacity_;
    std::deque<Transition> items_;
};

// ---- DQN -------------------------------------------------------------------

int argmax_action(const Eigen::VectorXd& values);
int dqn_act(const Mlp& q, const Eigen::VectorXd& obs, double epsilon, std::mt19937_64& rng);
double td_target(double reward, double discount, double max_next_q, bool done);
/// Mean squared TD error over `batch`; gradients w.r.t. `q` if requested.
double dqn_loss(const Mlp& q, const Mlp& target, const std::vector<const Transition*>& batch, Gradients* grads);
/// One gradient step on a random batch. Throws when the buffer holds fewer than hp.batch items.
double dqn_update(const ReplayBuffer& buffer, Mlp& q, const Mlp& target, AdamState& adam, const Hyperparams& hp,
                  std::mt19937_64& rng);
double epsilon_at(const Hyperparams& hp, long iteration);

// ---- PPO -------------------------------------------------------------------

struct PolicyOutput {
    Eigen::Vector2d probs;
    double value = 0.0;
};
PolicyOutput policy_output(const Mlp& net, const Eigen::VectorXd& obs);
double clipped_surrogate(double ratio, double advantage, double clip);

/// Generalized advantage estimates for one trajectory. `discounts[t]` multiplies the
/// value of step t + 1 (0 at a terminal step); `bootstrap` is V after the last step.
std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values,
                        const std::vector<double>& discounts, double lambda, double bootstrap = 0.0);
/// Constant-gamma form for a trajectory that terminates after its last step.
std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values, double gamma,
                        double lambda);

struct PpoSample {
    Eigen::VectorXd state;
    int action = 0;
    double log_prob = 0.0;
    double advantage = 0.0;
    double ret = 0.0;
};

/// Clipped-surrogate loss to minimise: -surrogate + value_coef * (V - R)^2 - entropy_coef * H.
double ppo_loss(const Mlp& net, const std::vector<const PpoSample*>& batch, const Hyperparams& hp, Gradients* grads);
/// GAE over each trajectory, then advantages normalised across the whole batch.
std::vector<PpoSample> ppo_prepare(const std::vector<std::vector<Transition>>& trajectories, const Hyperparams& hp);
void ppo_update(std::vector<PpoSample> samples, Mlp& net, AdamState& adam, const Hyperparams& hp,
                std::mt19937_64& rng);

// ---- environments and training ----------------------------------------------

/// Episodic environment with one or more agents that share a policy. At each step
/// only the agents listed by deciders() choose an action; the others are passive.
class Environment {
public:
    virtual ~Environment() = default;
    [[nodiscard]] virtual int observation_size() const = 0;
    [[nodiscard]] virtual std::size_t agent_count() const = 0;
    virtual void reset(std::uint64_t seed) = 0;
    [[nodiscard]] virtual bool done() const = 0;
    [[nodiscard]] virtual std::vector<std::size_t> deciders() const = 0;
    [[nodiscard]] virtual Eigen::VectorXd observe(std::size_t agent) const = 0;
    /// Advances one step. `actions` has one entry per agent; passive agents' entries are ignored.
    /// Returns the reward of every agent for this step.
    virtual std::vector<double> step(const std::vector<int>& actions) = 0;
};

struct IterationStats {
    long iteration = 0;
    double mean_reward = 0.0;
    double std_reward = 0.0;
    std::vector<double> episode_rewards;
    std::size_t transitions = 0;
    double wall_seconds = 0.0;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Owns the learner state for one algorithm. Everything random inside an iteration is
/// derived from (seed, iteration), so a checkpoint resumes bit-exactly.
class Trainer {
public:
    Trainer(Algo algo, Hyperparams hp, int observation_size, std::uint64_t seed);

    /// One training iteration: parallel_episodes rollouts with a frozen policy, then one update.
    IterationStats train_iteration(Environment& env);

    [[nodiscard]] int act(const Eigen::VectorXd& obs, bool greedy, std::mt19937_64& rng) const;
    [[nodiscard]] int act_greedy(const Eigen::VectorXd& obs) const;

    [[nodiscard]] Algo algo() const { return algo_; }
    [[nodiscard]] const Hyperparams& hyperparams() const { return hp_; }
    /// Changes the planned run length, which the exploration schedule is scaled to.
    void set_planned_iterations(int iterations);
    [[nodiscard]] const Mlp& model() const { return net_; }
    [[nodiscard]] Mlp& model() { return net_; }
    [[nodiscard]] const Mlp& target_model() const { return target_; }
    [[nodiscard]] long iteration() const { return iteration_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] const ReplayBuffer& replay() const { return replay_; }

    void save(const std::string& path) const;
    [[nodiscard]] std::string serialize() const;
    static Trainer deserialize(const std::string& text);
    static Trainer load(const std::string& path);

private:
    Trainer() = default;
    double run_episode(Environment& env, std::uint64_t episode_seed, double epsilon,
                       std::vector<std::vector<Transition>>& trajectories);

    Algo algo_ = Algo::ppo;
    Hyperparams hp_;
    std::uint64_t seed_ = 0;
    long iteration_ = 0;
    long updates_ = 0;
    Mlp net_;
    Mlp target_;
    AdamState adam_;
    ReplayBuffer replay_{0};
};

}  // namespace uavsig
