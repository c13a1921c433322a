#include "uavsig/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace uavsig {

const char* to_string(NetRole role) {
    return role == NetRole::q_network ? "q_network" : "policy_and_value";
}

NetRole parse_net_role(const std::string& text) {
    if (text == "q_network") return NetRole::q_network;
    if (text == "policy_and_value") return NetRole::policy_and_value;
    throw std::invalid_argument("unknown network role '" + text + "'");
}

Mlp::Mlp(std::vector<int> sizes, NetRole role) : sizes_(std::move(sizes)), role_(role) {
    if (sizes_.size() < 2) throw std::invalid_argument("an MLP needs at least an input and an output width");
    for (int s : sizes_) {
        if (s < 1) throw std::invalid_argument("MLP layer widths must be positive");
    }
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        layers.push_back({Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]), Eigen::VectorXd::Zero(sizes_[l + 1])});
    }
}

Mlp Mlp::random(std::vector<int> sizes, NetRole role, std::mt19937_64& rng) {
    Mlp net(std::move(sizes), role);
    for (auto& layer : net.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = u(rng);
    }
    return net;
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& inputs, Cache* cache) const {
    if (inputs.rows() != input_size()) {
        throw std::invalid_argument("MLP input has " + std::to_string(inputs.rows()) + " features, expected " +
                                    std::to_string(input_size()));
    }
    if (cache) {
        cache->activations.clear();
        cache->activations.push_back(inputs);
    }
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::MatrixXd z = layers[l].weight * a;
        z.colwise() += layers[l].bias;
        if (l + 1 < layers.size()) z = z.array().tanh().matrix();
        a = std::move(z);
        if (cache) cache->activations.push_back(a);
    }
    return a;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
    return forward(Eigen::MatrixXd(input)).col(0);
}

Gradients Mlp::backward(const Cache& cache, const Eigen::MatrixXd& output_grad) const {
    if (cache.activations.size() != layers.size() + 1) throw std::invalid_argument("MLP backward: stale cache");
    Gradients grads(layers.size());
    Eigen::MatrixXd delta = output_grad;
    for (std::size_t l = layers.size(); l-- > 0;) {
        if (l + 1 < layers.size()) {
            const auto& out = cache.activations[l + 1];
            delta = (delta.array() * (1.0 - out.array().square())).matrix();
        }
        const auto& in = cache.activations[l];
        grads[l].weight = delta * in.transpose();
        grads[l].bias = delta.rowwise().sum();
        if (l > 0) delta = layers[l].weight.transpose() * delta;
    }
    return grads;
}

Eigen::VectorXd Mlp::flatten() const {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    for (const auto& l : layers) {
        flat.segment(k, l.weight.size()) = Eigen::Map<const Eigen::VectorXd>(l.weight.data(), l.weight.size());
        k += l.weight.size();
        flat.segment(k, l.bias.size()) = l.bias;
        k += l.bias.size();
    }
    return flat;
}

void Mlp::assign(const Eigen::VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
        throw std::invalid_argument("MLP assign: expected " + std::to_string(parameter_count()) + " parameters, got " +
                                    std::to_string(flat.size()));
    }
    Eigen::Index k = 0;
    for (auto& l : layers) {
        Eigen::Map<Eigen::VectorXd>(l.weight.data(), l.weight.size()) = flat.segment(k, l.weight.size());
        k += l.weight.size();
        l.bias = flat.segment(k, l.bias.size());
        k += l.bias.size();
    }
}

Eigen::VectorXd Mlp::flatten(const Gradients& grads) {
    Eigen::Index n = 0;
    for (const auto& g : grads) n += g.weight.size() + g.bias.size();
    Eigen::VectorXd flat(n);
    Eigen::Index k = 0;
    for (const auto& g : grads) {
        flat.segment(k, g.weight.size()) = Eigen::Map<const Eigen::VectorXd>(g.weight.data(), g.weight.size());
        k += g.weight.size();
        flat.segment(k, g.bias.size()) = g.bias;
        k += g.bias.size();
    }
    return flat;
}

void AdamState::apply(Mlp& net, const Gradients& grads, double max_grad_norm) {
    Eigen::VectorXd g = Mlp::flatten(grads);
    if (m.size() != g.size()) {
        m = Eigen::VectorXd::Zero(g.size());
        v = Eigen::VectorXd::Zero(g.size());
    }
    if (max_grad_norm > 0.0) {
        const double norm = g.norm();
        if (norm > max_grad_norm) g *= max_grad_norm / norm;
    }
    ++steps;
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
    Eigen::VectorXd step = (m / c1).array() / ((v / c2).array().sqrt() + epsilon);
    net.assign(net.flatten() - learning_rate * step);
}

}  // namespace uavsig
