#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace uavsig {

enum class NetRole : std::uint8_t { q_network, policy_and_value };

const char* to_string(NetRole role);
NetRole parse_net_role(const std::string& text);

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out
};

using Gradients = std::vector<DenseLayer>;

/// Fully connected network: tanh on hidden layers, linear output. Samples are columns.
class Mlp {
public:
    struct Cache {
        std::vector<Eigen::MatrixXd> activations;  // [0] = input, [l + 1] = output of layer l
    };

    Mlp() = default;
    /// Zero-initialised network with the given layer widths (input first, output last).
    explicit Mlp(std::vector<int> sizes, NetRole role = NetRole::q_network);
    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
    static Mlp random(std::vector<int> sizes, NetRole role, std::mt19937_64& rng);

    [[nodiscard]] int input_size() const { return sizes_.front(); }
    [[nodiscard]] int output_size() const { return sizes_.back(); }
    [[nodiscard]] const std::vector<int>& sizes() const { return sizes_; }
    [[nodiscard]] NetRole role() const { return role_; }
    [[nodiscard]] std::size_t parameter_count() const;

    [[nodiscard]] Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs, Cache* cache = nullptr) const;
    [[nodiscard]] Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
    /// Gradients of a loss whose derivative w.r.t. the outputs is `output_grad`.
    [[nodiscard]] Gradients backward(const Cache& cache, const Eigen::MatrixXd& output_grad) const;

    [[nodiscard]] Eigen::VectorXd flatten() const;
    void assign(const Eigen::VectorXd& flat);
    [[nodiscard]] static Eigen::VectorXd flatten(const Gradients& grads);

    std::vector<DenseLayer> layers;

private:
    std::vector<int> sizes_;
    NetRole role_ = NetRole::q_network;
};

struct AdamState {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long steps = 0;
    Eigen::VectorXd m;
    Eigen::VectorXd v;

    /// One Adam step; `max_grad_norm` > 0 rescales the gradient to that global norm first.
    void apply(Mlp& net, const Gradients& grads, double max_grad_norm = 0.0);
};

}  // namespace uavsig
