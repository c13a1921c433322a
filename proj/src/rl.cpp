#include "uavsig/rl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace uavsig {

const char* to_string(Algo algo) { return algo == Algo::dqn ? "dqn" : "ppo"; }

Algo parse_algo(const std::string& text) {
    if (text == "dqn") return Algo::dqn;
    if (text == "ppo") return Algo::ppo;
    throw std::invalid_argument("unknown algorithm '" + text + "' (expected dqn or ppo)");
}

void Hyperparams::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
    if (!(clip > 0.0)) throw std::invalid_argument("PPO clip must be positive");
    if (parallel_episodes < 1) throw std::invalid_argument("parallel episode count must be at least 1");
    if (learning_rate < 0.0) throw std::invalid_argument("learning rate must be non-negative");
    if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
    if (epochs < 1 || minibatch < 1) throw std::invalid_argument("PPO epochs and minibatch must be positive");
    if (batch < 1 || replay_capacity < 1 || target_sync < 1 || updates_per_iteration < 0) {
        throw std::invalid_argument("DQN batch, replay capacity and target sync must be positive");
    }
    if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw std::invalid_argument("GAE lambda must lie in [0, 1]");
    if (hidden.empty()) throw std::invalid_argument("at least one hidden layer is required");
}

Hyperparams Hyperparams::defaults_for(Algo algo) {
    Hyperparams hp;
    if (algo == Algo::dqn) hp.learning_rate = 1e-3;
    return hp;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

void ReplayBuffer::push(Transition t) {
    if (capacity_ == 0) return;
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(t));
}

// ---- DQN -------------------------------------------------------------------

int argmax_action(const Eigen::VectorXd& values) {
    int best = 0;
    for (int a = 1; a < values.size(); ++a) {
        if (values[a] > values[best]) best = a;
    }
    return best;
}

int dqn_act(const Mlp& q, const Eigen::VectorXd& obs, double epsilon, std::mt19937_64& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (epsilon > 0.0) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (u(rng) < epsilon) return std::uniform_int_distribution<int>(0, q.output_size() - 1)(rng);
    }
    return argmax_action(q.forward(obs));
}

double td_target(double reward, double discount, double max_next_q, bool done) {
    return done ? reward : reward + discount * max_next_q;
}

double dqn_loss(const Mlp& q, const Mlp& target, const std::vector<const Transition*>& batch, Gradients* grads) {
    const auto n = static_cast<Eigen::Index>(batch.size());
    if (n == 0) throw std::invalid_argument("dqn_loss: empty batch");
    const int dim = q.input_size();
    Eigen::MatrixXd s(dim, n);
    Eigen::MatrixXd s2(dim, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s.col(i) = batch[i]->state;
        s2.col(i) = batch[i]->next_state;
    }
    Mlp::Cache cache;
    const Eigen::MatrixXd qs = q.forward(s, grads ? &cache : nullptr);
    const Eigen::MatrixXd next = target.forward(s2);
    Eigen::MatrixXd dout = Eigen::MatrixXd::Zero(qs.rows(), n);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& t = *batch[i];
        const double y = td_target(t.reward, t.discount, next.col(i).maxCoeff(), t.done);
        const double err = qs(t.action, i) - y;
        loss += err * err;
        dout(t.action, i) = 2.0 * err / static_cast<double>(n);
    }
    if (grads) *grads = q.backward(cache, dout);
    return loss / static_cast<double>(n);
}

double dqn_update(const ReplayBuffer& buffer, Mlp& q, const Mlp& target, AdamState& adam, const Hyperparams& hp,
                  std::mt19937_64& rng) {
    if (buffer.size() < static_cast<std::size_t>(hp.batch)) {
        throw std::runtime_error("dqn_update: replay buffer holds " + std::to_string(buffer.size()) +
                                 " transitions, batch needs " + std::to_string(hp.batch));
    }
    std::uniform_int_distribution<std::size_t> pick(0, buffer.size() - 1);
    std::vector<const Transition*> batch(static_cast<std::size_t>(hp.batch));
    for (auto& b : batch) b = &buffer[pick(rng)];
    Gradients grads;
    const double loss = dqn_loss(q, target, batch, &grads);
    adam.learning_rate = hp.learning_rate;
    adam.apply(q, grads, hp.max_grad_norm);
    return loss;
}

double epsilon_at(const Hyperparams& hp, long iteration) {
    const double span = hp.epsilon_fraction * hp.iterations;
    if (span <= 0.0) return hp.epsilon_end;
    const double frac = std::min(1.0, static_cast<double>(iteration) / span);
    return hp.epsilon_start + frac * (hp.epsilon_end - hp.epsilon_start);
}

// ---- PPO -------------------------------------------------------------------

namespace {

Eigen::Vector2d softmax2(double a, double b) {
    const double m = std::max(a, b);
    const double ea = std::exp(a - m);
    const double eb = std::exp(b - m);
    return Eigen::Vector2d(ea, eb) / (ea + eb);
}

}  // namespace

PolicyOutput policy_output(const Mlp& net, const Eigen::VectorXd& obs) {
    const Eigen::VectorXd out = net.forward(obs);
    if (out.size() != 3) throw std::invalid_argument("policy network must output 2 logits and 1 value");
    return {softmax2(out[0], out[1]), out[2]};
}

double clipped_surrogate(double ratio, double advantage, double clip) {
    return std::min(ratio * advantage, std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage);
}

std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values,
                        const std::vector<double>& discounts, double lambda, double bootstrap) {
    const std::size_t n = rewards.size();
    if (values.size() != n || discounts.size() != n) throw std::invalid_argument("gae: length mismatch");
    std::vector<double> adv(n, 0.0);
    double next_adv = 0.0;
    double next_value = bootstrap;
    for (std::size_t t = n; t-- > 0;) {
        const double delta = rewards[t] + discounts[t] * next_value - values[t];
        next_adv = delta + discounts[t] * lambda * next_adv;
        adv[t] = next_adv;
        next_value = values[t];
    }
    return adv;
}

std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values, double gamma,
                        double lambda) {
    std::vector<double> discounts(rewards.size(), gamma);
    if (!discounts.empty()) discounts.back() = 0.0;
    return gae(rewards, values, discounts, lambda, 0.0);
}

double ppo_loss(const Mlp& net, const std::vector<const PpoSample*>& batch, const Hyperparams& hp, Gradients* grads) {
    const auto n = static_cast<Eigen::Index>(batch.size());
    if (n == 0) throw std::invalid_argument("ppo_loss: empty batch");
    Eigen::MatrixXd s(net.input_size(), n);
    for (Eigen::Index i = 0; i < n; ++i) s.col(i) = batch[i]->state;
    Mlp::Cache cache;
    const Eigen::MatrixXd out = net.forward(s, grads ? &cache : nullptr);
    Eigen::MatrixXd dout = Eigen::MatrixXd::Zero(3, n);
    const double inv = 1.0 / static_cast<double>(n);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& b = *batch[i];
        const Eigen::Vector2d p = softmax2(out(0, i), out(1, i));
        const double logp = std::log(std::max(p[b.action], 1e-300));
        const double ratio = std::exp(logp - b.log_prob);
        const double surrogate = clipped_surrogate(ratio, b.advantage, hp.clip);
        const double verr = out(2, i) - b.ret;
        double entropy = 0.0;
        for (int a = 0; a < 2; ++a) entropy -= p[a] * std::log(std::max(p[a], 1e-300));
        loss += -surrogate + hp.value_coef * verr * verr - hp.entropy_coef * entropy;

        const bool clipped = (b.advantage > 0.0 && ratio > 1.0 + hp.clip) || (b.advantage < 0.0 && ratio < 1.0 - hp.clip);
        const double dlogp = clipped ? 0.0 : -ratio * b.advantage;
        for (int a = 0; a < 2; ++a) {
            const double onehot = a == b.action ? 1.0 : 0.0;
            const double dent = -p[a] * (std::log(std::max(p[a], 1e-300)) + entropy);
            dout(a, i) = inv * (dlogp * (onehot - p[a]) - hp.entropy_coef * dent);
        }
        dout(2, i) = inv * 2.0 * hp.value_coef * verr;
    }
    if (grads) *grads = net.backward(cache, dout);
    return loss * inv;
}

std::vector<PpoSample> ppo_prepare(const std::vector<std::vector<Transition>>& trajectories, const Hyperparams& hp) {
    std::vector<PpoSample> samples;
    for (const auto& traj : trajectories) {
        if (traj.empty()) continue;
        std::vector<double> r, v, d;
        for (const auto& t : traj) {
            r.push_back(t.reward);
            v.push_back(t.value);
            d.push_back(t.done ? 0.0 : t.discount);
        }
        const auto adv = gae(r, v, d, hp.gae_lambda, 0.0);
        for (std::size_t k = 0; k < traj.size(); ++k) {
            samples.push_back({traj[k].state, traj[k].action, traj[k].log_prob, adv[k], adv[k] + v[k]});
        }
    }
    if (samples.empty()) return samples;
    double mean = 0.0;
    for (const auto& s : samples) mean += s.advantage;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const auto& s : samples) var += (s.advantage - mean) * (s.advantage - mean);
    const double sd = std::sqrt(var / static_cast<double>(samples.size()));
    for (auto& s : samples) s.advantage = (s.advantage - mean) / (sd + 1e-8);
    return samples;
}

void ppo_update(std::vector<PpoSample> samples, Mlp& net, AdamState& adam, const Hyperparams& hp,
                std::mt19937_64& rng) {
    if (samples.empty()) return;
    adam.learning_rate = hp.learning_rate;
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    const auto mb = static_cast<std::size_t>(hp.minibatch);
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += mb) {
            const std::size_t stop = std::min(order.size(), start + mb);
            std::vector<const PpoSample*> batch;
            batch.reserve(stop - start);
            for (std::size_t k = start; k < stop; ++k) batch.push_back(&samples[order[k]]);
            Gradients grads;
            ppo_loss(net, batch, hp, &grads);
            adam.apply(net, grads, hp.max_grad_norm);
        }
    }
}

// ---- trainer -----------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ b);
}

Trainer::Trainer(Algo algo, Hyperparams hp, int observation_size, std::uint64_t seed)
    : algo_(algo), hp_(std::move(hp)), seed_(seed), replay_(0) {
    hp_.validate();
    if (observation_size < 1) throw std::invalid_argument("observation size must be positive");
    std::vector<int> sizes{observation_size};
    sizes.insert(sizes.end(), hp_.hidden.begin(), hp_.hidden.end());
    sizes.push_back(algo_ == Algo::dqn ? 2 : 3);
    std::mt19937_64 rng(derive_seed(seed_, 0x1a17));
    net_ = Mlp::random(sizes, algo_ == Algo::dqn ? NetRole::q_network : NetRole::policy_and_value, rng);
    if (algo_ == Algo::ppo) {
        // Small output layer so the initial policy is close to uniform.
        net_.layers.back().weight *= 0.01;
    }
    target_ = net_;
    adam_.learning_rate = hp_.learning_rate;
    replay_ = ReplayBuffer(algo_ == Algo::dqn ? static_cast<std::size_t>(hp_.replay_capacity) : 0);
}

int Trainer::act(const Eigen::VectorXd& obs, bool greedy, std::mt19937_64& rng) const {
    if (algo_ == Algo::dqn) return greedy ? argmax_action(net_.forward(obs)) : dqn_act(net_, obs, 0.0, rng);
    const auto out = policy_output(net_, obs);
    if (greedy) return out.probs[1] > out.probs[0] ? 1 : 0;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < out.probs[1] ? 1 : 0;
}

int Trainer::act_greedy(const Eigen::VectorXd& obs) const {
    if (algo_ == Algo::dqn) return argmax_action(net_.forward(obs));
    const auto out = policy_output(net_, obs);
    return out.probs[1] > out.probs[0] ? 1 : 0;
}

double Trainer::run_episode(Environment& env, std::uint64_t episode_seed, double epsilon,
                            std::vector<std::vector<Transition>>& trajectories) {
    env.reset(episode_seed);
    std::mt19937_64 rng(derive_seed(episode_seed, 0xac7));
    const std::size_t n = env.agent_count();
    struct Open {
        bool active = false;
        Transition t;
        double discount = 1.0;
    };
    std::vector<Open> open(n);
    std::vector<std::vector<Transition>> local(n);
    std::vector<int> actions(n, 0);
    double total = 0.0;
    while (!env.done()) {
        std::fill(actions.begin(), actions.end(), 0);
        for (std::size_t a : env.deciders()) {
            Eigen::VectorXd obs = env.observe(a);
            if (open[a].active) {
                open[a].t.next_state = obs;
                open[a].t.discount = open[a].discount;
                local[a].push_back(std::move(open[a].t));
            }
            Transition t;
            t.state = std::move(obs);
            if (algo_ == Algo::dqn) {
                t.action = dqn_act(net_, t.state, epsilon, rng);
            } else {
                const auto out = policy_output(net_, t.state);
                t.action = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < out.probs[1] ? 1 : 0;
                t.log_prob = std::log(std::max(out.probs[t.action], 1e-300));
                t.value = out.value;
            }
            actions[a] = t.action;
            open[a] = {true, std::move(t), 1.0};
        }
        const auto rewards = env.step(actions);
        for (std::size_t a = 0; a < n; ++a) {
            total += rewards[a];
            if (open[a].active) {
                open[a].t.reward += open[a].discount * rewards[a];
                open[a].discount *= hp_.gamma;
            }
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        if (!open[a].active) continue;
        open[a].t.next_state = env.observe(a);
        open[a].t.discount = open[a].discount;
        open[a].t.done = true;
        local[a].push_back(std::move(open[a].t));
    }
    for (auto& traj : local) trajectories.push_back(std::move(traj));
    return total;
}

IterationStats Trainer::train_iteration(Environment& env) {
    if (env.observation_size() != net_.input_size()) {
        throw std::invalid_argument("environment observation size does not match the network input");
    }
    const auto t0 = std::chrono::steady_clock::now();
    IterationStats stats;
    stats.iteration = iteration_;
    const double epsilon = algo_ == Algo::dqn ? epsilon_at(hp_, iteration_) : 0.0;
    std::vector<std::vector<Transition>> trajectories;
    for (int e = 0; e < hp_.parallel_episodes; ++e) {
        const auto episode_seed = derive_seed(seed_, static_cast<std::uint64_t>(iteration_), static_cast<std::uint64_t>(e));
        stats.episode_rewards.push_back(run_episode(env, episode_seed, epsilon, trajectories));
    }
    for (const auto& t : trajectories) stats.transitions += t.size();
    if (stats.transitions == 0) throw std::runtime_error("empty iteration");

    std::mt19937_64 rng(derive_seed(seed_, static_cast<std::uint64_t>(iteration_), 0xfeed));
    if (algo_ == Algo::ppo) {
        ppo_update(ppo_prepare(trajectories, hp_), net_, adam_, hp_, rng);
    } else {
        for (auto& traj : trajectories) {
            for (auto& t : traj) replay_.push(std::move(t));
        }
        if (replay_.size() >= static_cast<std::size_t>(hp_.batch)) {
            for (int u = 0; u < hp_.updates_per_iteration; ++u) {
                dqn_update(replay_, net_, target_, adam_, hp_, rng);
                if (++updates_ % hp_.target_sync == 0) target_ = net_;
            }
        }
    }
    ++iteration_;

    const double n = static_cast<double>(stats.episode_rewards.size());
    stats.mean_reward = std::accumulate(stats.episode_rewards.begin(), stats.episode_rewards.end(), 0.0) / n;
    double var = 0.0;
    for (double r : stats.episode_rewards) var += (r - stats.mean_reward) * (r - stats.mean_reward);
    stats.std_reward = std::sqrt(var / n);
    stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats;
}

// ---- checkpoint ----------------------------------------------------------------

namespace {

constexpr const char* kMagic = "uavsig-checkpoint";
constexpr int kVersion = 1;

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
    out << v.size();
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << hex(v[i]);
    out << '\n';
}

void put_net(std::ostream& out, const Mlp& net) {
    out << to_string(net.role()) << ' ' << net.sizes().size();
    for (int s : net.sizes()) out << ' ' << s;
    out << '\n';
    put_vector(out, net.flatten());
}

class Reader {
public:
    explicit Reader(const std::string& text) : in_(text) {}
    std::string word() {
        std::string w;
        if (!(in_ >> w)) throw std::runtime_error("checkpoint truncated");
        return w;
    }
    void expect(const std::string& w) {
        const auto got = word();
        if (got != w) throw std::runtime_error("checkpoint: expected '" + w + "', found '" + got + "'");
    }
    double real() {
        const auto w = word();
        char* end = nullptr;
        const double v = std::strtod(w.c_str(), &end);
        if (end == w.c_str() || *end != '\0') throw std::runtime_error("checkpoint: bad number '" + w + "'");
        return v;
    }
    long integer() {
        const auto w = word();
        std::size_t pos = 0;
        const long v = std::stol(w, &pos);
        if (pos != w.size()) throw std::runtime_error("checkpoint: bad integer '" + w + "'");
        return v;
    }
    Eigen::VectorXd vector() {
        const long n = integer();
        if (n < 0) throw std::runtime_error("checkpoint: negative length");
        Eigen::VectorXd v(n);
        for (long i = 0; i < n; ++i) v[i] = real();
        return v;
    }
    Mlp net() {
        const NetRole role = parse_net_role(word());
        const long layers = integer();
        std::vector<int> sizes;
        for (long i = 0; i < layers; ++i) sizes.push_back(static_cast<int>(integer()));
        Mlp m(sizes, role);
        m.assign(vector());
        return m;
    }

private:
    std::istringstream in_;
};

}  // namespace

std::string Trainer::serialize() const {
    std::ostringstream out;
    out << kMagic << ' ' << kVersion << '\n';
    out << "algo " << to_string(algo_) << '\n';
    out << "seed " << seed_ << '\n';
    out << "iteration " << iteration_ << '\n';
    out << "updates " << updates_ << '\n';
    out << "hp " << hex(hp_.learning_rate) << ' ' << hex(hp_.gamma) << ' ' << hp_.iterations << ' '
        << hp_.parallel_episodes << ' ' << hex(hp_.max_grad_norm) << ' ' << hex(hp_.clip) << ' ' << hex(hp_.gae_lambda)
        << ' ' << hp_.epochs << ' ' << hp_.minibatch << ' ' << hex(hp_.value_coef) << ' ' << hex(hp_.entropy_coef) << ' '
        << hp_.batch << ' ' << hp_.replay_capacity << ' ' << hp_.target_sync << ' ' << hp_.updates_per_iteration << ' '
        << hex(hp_.epsilon_start) << ' ' << hex(hp_.epsilon_end) << ' ' << hex(hp_.epsilon_fraction) << '\n';
    out << "hidden " << hp_.hidden.size();
    for (int h : hp_.hidden) out << ' ' << h;
    out << '\n';
    out << "net ";
    put_net(out, net_);
    out << "target ";
    put_net(out, target_);
    out << "adam " << hex(adam_.beta1) << ' ' << hex(adam_.beta2) << ' ' << hex(adam_.epsilon) << ' ' << adam_.steps
        << '\n';
    put_vector(out, adam_.m);
    put_vector(out, adam_.v);
    out << "replay " << replay_.capacity() << ' ' << replay_.size() << '\n';
    for (const auto& t : replay_.items()) {
        out << t.action << ' ' << hex(t.reward) << ' ' << hex(t.discount) << ' ' << (t.done ? 1 : 0) << ' '
            << hex(t.log_prob) << ' ' << hex(t.value) << '\n';
        put_vector(out, t.state);
        put_vector(out, t.next_state);
    }
    out << "end\n";
    return out.str();
}

Trainer Trainer::deserialize(const std::string& text) {
    Reader in(text);
    in.expect(kMagic);
    if (in.integer() != kVersion) throw std::runtime_error("checkpoint: unsupported version");
    Trainer t;
    in.expect("algo");
    t.algo_ = parse_algo(in.word());
    in.expect("seed");
    t.seed_ = std::stoull(in.word());
    in.expect("iteration");
    t.iteration_ = in.integer();
    in.expect("updates");
    t.updates_ = in.integer();
    in.expect("hp");
    auto& hp = t.hp_;
    hp.learning_rate = in.real();
    hp.gamma = in.real();
    hp.iterations = static_cast<int>(in.integer());
    hp.parallel_episodes = static_cast<int>(in.integer());
    hp.max_grad_norm = in.real();
    hp.clip = in.real();
    hp.gae_lambda = in.real();
    hp.epochs = static_cast<int>(in.integer());
    hp.minibatch = static_cast<int>(in.integer());
    hp.value_coef = in.real();
    hp.entropy_coef = in.real();
    hp.batch = static_cast<int>(in.integer());
    hp.replay_capacity = static_cast<int>(in.integer());
    hp.target_sync = static_cast<int>(in.integer());
    hp.updates_per_iteration = static_cast<int>(in.integer());
    hp.epsilon_start = in.real();
    hp.epsilon_end = in.real();
    hp.epsilon_fraction = in.real();
    in.expect("hidden");
    hp.hidden.clear();
    const long layers = in.integer();
    for (long i = 0; i < layers; ++i) hp.hidden.push_back(static_cast<int>(in.integer()));
    hp.validate();
    in.expect("net");
    t.net_ = in.net();
    in.expect("target");
    t.target_ = in.net();
    in.expect("adam");
    t.adam_.beta1 = in.real();
    t.adam_.beta2 = in.real();
    t.adam_.epsilon = in.real();
    t.adam_.steps = in.integer();
    t.adam_.m = in.vector();
    t.adam_.v = in.vector();
    t.adam_.learning_rate = hp.learning_rate;
    in.expect("replay");
    t.replay_ = ReplayBuffer(static_cast<std::size_t>(in.integer()));
    const long stored = in.integer();
    for (long i = 0; i < stored; ++i) {
        Transition tr;
        tr.action = static_cast<int>(in.integer());
        tr.reward = in.real();
        tr.discount = in.real();
        tr.done = in.integer() != 0;
        tr.log_prob = in.real();
        tr.value = in.real();
        tr.state = in.vector();
        tr.next_state = in.vector();
        t.replay_.push(std::move(tr));
    }
    in.expect("end");
    return t;
}

void Trainer::set_planned_iterations(int iterations) {
    if (iterations < iteration_) throw std::invalid_argument("the checkpoint is already past the requested iterations");
    hp_.iterations = iterations;
}

void Trainer::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    out << serialize();
    if (!out) throw std::runtime_error("failed writing checkpoint " + path);
}

Trainer Trainer::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

}  // namespace uavsig
