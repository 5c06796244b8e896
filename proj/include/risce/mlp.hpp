// SPDX-License-Identifier: Apache-2.0
//
// risce - RIS-assisted mmWave uplink channel estimation toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISCE_MLP_HPP
#define RISCE_MLP_HPP

#include "risce/numerics.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace risce {

enum class Activation : std::uint32_t { ReLU = 0, Sigmoid = 1, Tanh = 2, Linear = 3 };

// Plain feed-forward network: affine layers with ReLU hidden activations and
// a configurable output activation. Weights are double precision throughout.
struct MlpModel {
    std::vector<std::size_t> layer_sizes; // input, hidden..., output
    std::vector<RMatrix> weights;         // layer l: (n_{l+1} x n_l)
    std::vector<RVector> biases;
    Activation output_activation = Activation::Linear;

    std::size_t num_layers() const { return weights.size(); }
    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }

    // Glorot-uniform weights, zero biases.
    static MlpModel init(std::vector<std::size_t> sizes, Activation output, Rng& rng) {
        if (sizes.size() < 2)
            throw std::invalid_argument("MlpModel: need at least input and output layers");
        MlpModel m;
        m.layer_sizes = std::move(sizes);
        m.output_activation = output;
        for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
            const auto in = static_cast<Eigen::Index>(m.layer_sizes[l]);
            const auto out = static_cast<Eigen::Index>(m.layer_sizes[l + 1]);
            const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
            RMatrix w(out, in);
            for (Eigen::Index r = 0; r < out; ++r)
                for (Eigen::Index c = 0; c < in; ++c)
                    w(r, c) = uniform_in(rng, -limit, limit);
            m.weights.push_back(std::move(w));
            m.biases.push_back(RVector::Zero(out));
        }
        return m;
    }

    void validate() const {
        if (weights.size() + 1 != layer_sizes.size() || biases.size() != weights.size())
            throw std::invalid_argument("MlpModel: layer bookkeeping inconsistent");
        for (std::size_t l = 0; l < weights.size(); ++l) {
            if (weights[l].rows() != static_cast<Eigen::Index>(layer_sizes[l + 1]) ||
                weights[l].cols() != static_cast<Eigen::Index>(layer_sizes[l]) ||
                biases[l].size() != weights[l].rows())
                throw std::invalid_argument("MlpModel: layer dimension mismatch");
            if (!weights[l].allFinite() || !biases[l].allFinite())
                throw std::invalid_argument("MlpModel: non-finite parameters");
        }
    }
};

namespace detail {

inline RMatrix apply_activation(const RMatrix& z, Activation act) {
    switch (act) {
    case Activation::ReLU:
        return z.cwiseMax(0.0);
    case Activation::Sigmoid:
        return z.unaryExpr([](double v) {
            return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
        });
    case Activation::Tanh:
        return z.array().tanh().matrix();
    case Activation::Linear:
        return z;
    }
    throw std::logic_error("unknown activation");
}

} // namespace detail

// Batch forward pass; x holds one example per column.
inline RMatrix mlp_forward_batch(const MlpModel& model, const RMatrix& x) {
    if (x.rows() != static_cast<Eigen::Index>(model.input_dim()))
        throw std::invalid_argument("mlp_forward: feature dimension mismatch");
    RMatrix a = x;
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        RMatrix z = model.weights[l] * a;
        z.colwise() += model.biases[l];
        a = detail::apply_activation(z, l + 1 == model.num_layers() ? model.output_activation
                                                                    : Activation::ReLU);
    }
    return a;
}

inline RVector mlp_forward(const MlpModel& model, const RVector& features) {
    return mlp_forward_batch(model, features);
}

enum class Loss { BinaryCrossEntropy, MaskedMse };

struct Gradients {
    std::vector<RMatrix> d_weights;
    std::vector<RVector> d_biases;
};

// Loss and analytic parameter gradients for one batch (examples in columns).
// BinaryCrossEntropy requires a sigmoid head and is computed from the logits
// for numerical stability; MaskedMse averages squared error over the
// unmasked entries only (an empty mask means all entries count).
inline double loss_and_gradients(const MlpModel& model, const RMatrix& x, const RMatrix& targets,
                                 const RMatrix& mask, Loss loss, Gradients& grads) {
    const auto batch = x.cols();
    if (targets.cols() != batch || targets.rows() != static_cast<Eigen::Index>(model.output_dim()))
        throw std::invalid_argument("loss_and_gradients: target shape mismatch");
    if (mask.size() != 0 && (mask.rows() != targets.rows() || mask.cols() != targets.cols()))
        throw std::invalid_argument("loss_and_gradients: mask shape mismatch");
    if (loss == Loss::BinaryCrossEntropy && model.output_activation != Activation::Sigmoid)
        throw std::invalid_argument("loss_and_gradients: BCE needs a sigmoid head");

    const std::size_t layers = model.num_layers();
    std::vector<RMatrix> acts(layers + 1);
    std::vector<RMatrix> pre(layers);
    acts[0] = x;
    for (std::size_t l = 0; l < layers; ++l) {
        pre[l] = model.weights[l] * acts[l];
        pre[l].colwise() += model.biases[l];
        acts[l + 1] = detail::apply_activation(pre[l], l + 1 == layers ? model.output_activation
                                                                       : Activation::ReLU);
    }

    double loss_value = 0.0;
    RMatrix delta; // dLoss/dPreactivation at the output layer
    if (loss == Loss::BinaryCrossEntropy) {
        const RMatrix& z = pre[layers - 1];
        const double n = static_cast<double>(z.size());
        loss_value = (z.cwiseMax(0.0) - z.cwiseProduct(targets) +
                      (-z.array().abs()).exp().log1p().matrix())
                         .sum() /
                     n;
        delta = (acts[layers] - targets) / n;
    } else {
        RMatrix diff = acts[layers] - targets;
        double count = static_cast<double>(diff.size());
        if (mask.size() != 0) {
            diff = diff.cwiseProduct(mask);
            count = mask.sum();
        }
        if (count == 0.0) {
            loss_value = 0.0;
            delta = RMatrix::Zero(diff.rows(), diff.cols());
        } else {
            loss_value = diff.squaredNorm() / count;
            RMatrix d_act = 2.0 * diff / count;
            switch (model.output_activation) {
            case Activation::Tanh:
                delta = d_act.cwiseProduct(
                    (1.0 - acts[layers].array().square()).matrix());
                break;
            case Activation::Linear:
                delta = d_act;
                break;
            case Activation::Sigmoid:
                delta = d_act.cwiseProduct(
                    acts[layers].cwiseProduct((1.0 - acts[layers].array()).matrix()));
                break;
            case Activation::ReLU:
                delta = d_act.cwiseProduct(
                    (pre[layers - 1].array() > 0.0).cast<double>().matrix());
                break;
            }
        }
    }

    grads.d_weights.resize(layers);
    grads.d_biases.resize(layers);
    for (std::size_t l = layers; l-- > 0;) {
        grads.d_weights[l] = delta * acts[l].transpose();
        grads.d_biases[l] = delta.rowwise().sum();
        if (l > 0)
            delta = (model.weights[l].transpose() * delta)
                        .cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
    return loss_value;
}

struct TrainOptions {
    std::size_t epochs = 30;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainingData {
    RMatrix features; // in x n
    RMatrix targets;  // out x n
    RMatrix mask;     // out x n for MaskedMse, or empty

    Eigen::Index size() const { return features.cols(); }
};

// Mini-batch Adam. Returns the per-epoch loss curve (example-weighted mean
// of batch losses). Aborts on a non-finite loss.
inline std::vector<double> train(MlpModel& model, const TrainingData& data, Loss loss,
                                 const TrainOptions& opts, Rng& rng) {
    const Eigen::Index n = data.size();
    if (n == 0)
        throw std::invalid_argument("train: empty dataset");
    if (data.targets.cols() != n)
        throw std::invalid_argument("train: feature/target count mismatch");
    model.validate();

    const std::size_t layers = model.num_layers();
    std::vector<RMatrix> m_w(layers), v_w(layers);
    std::vector<RVector> m_b(layers), v_b(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        m_w[l] = RMatrix::Zero(model.weights[l].rows(), model.weights[l].cols());
        v_w[l] = m_w[l];
        m_b[l] = RVector::Zero(model.biases[l].size());
        v_b[l] = m_b[l];
    }

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);

    std::vector<double> curve;
    curve.reserve(opts.epochs);
    Gradients grads;
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        for (std::size_t i = static_cast<std::size_t>(n); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
            std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
        }

        double epoch_loss = 0.0;
        for (Eigen::Index start = 0; start < n; start += static_cast<Eigen::Index>(opts.batch_size)) {
            const Eigen::Index b =
                std::min<Eigen::Index>(static_cast<Eigen::Index>(opts.batch_size), n - start);
            RMatrix xb(data.features.rows(), b);
            RMatrix tb(data.targets.rows(), b);
            RMatrix mb(data.mask.size() != 0 ? data.mask.rows() : 0, data.mask.size() != 0 ? b : 0);
            for (Eigen::Index c = 0; c < b; ++c) {
                const Eigen::Index idx = perm[static_cast<std::size_t>(start + c)];
                xb.col(c) = data.features.col(idx);
                tb.col(c) = data.targets.col(idx);
                if (data.mask.size() != 0)
                    mb.col(c) = data.mask.col(idx);
            }

            const double batch_loss = loss_and_gradients(model, xb, tb, mb, loss, grads);
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch offset " +
                                         std::to_string(start));
            epoch_loss += batch_loss * static_cast<double>(b);

            ++step;
            const double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(step));
            for (std::size_t l = 0; l < layers; ++l) {
                m_w[l] = opts.beta1 * m_w[l] + (1.0 - opts.beta1) * grads.d_weights[l];
                v_w[l] = opts.beta2 * v_w[l] +
                         (1.0 - opts.beta2) * grads.d_weights[l].array().square().matrix();
                m_b[l] = opts.beta1 * m_b[l] + (1.0 - opts.beta1) * grads.d_biases[l];
                v_b[l] = opts.beta2 * v_b[l] +
                         (1.0 - opts.beta2) * grads.d_biases[l].array().square().matrix();
                model.weights[l].array() -=
                    opts.learning_rate * (m_w[l].array() / bc1) /
                    ((v_w[l].array() / bc2).sqrt() + opts.epsilon);
                model.biases[l].array() -= opts.learning_rate * (m_b[l].array() / bc1) /
                                           ((v_b[l].array() / bc2).sqrt() + opts.epsilon);
            }
        }
        curve.push_back(epoch_loss / static_cast<double>(n));
    }
    return curve;
}

// Checkpoint layout: magic "RISNN1", u32 layer count, u32 sizes, u32
// activation codes per layer (hidden layers are ReLU), then per layer the
// row-major weight block and the bias block as little-endian 64-bit floats.
inline void save_model(const MlpModel& model, const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");
    model.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("save_model: cannot open " + path);
    out.write("RISNN1", 6);
    auto write_u32 = [&out](std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    write_u32(static_cast<std::uint32_t>(model.num_layers()));
    for (std::size_t s : model.layer_sizes)
        write_u32(static_cast<std::uint32_t>(s));
    for (std::size_t l = 0; l < model.num_layers(); ++l)
        write_u32(static_cast<std::uint32_t>(l + 1 == model.num_layers()
                                                 ? model.output_activation
                                                 : Activation::ReLU));
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        const RMatrix& w = model.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                const double v = w(r, c);
                out.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
        out.write(reinterpret_cast<const char*>(model.biases[l].data()),
                  static_cast<std::streamsize>(sizeof(double) *
                                               static_cast<std::size_t>(model.biases[l].size())));
    }
    if (!out)
        throw std::runtime_error("save_model: write failed for " + path);
}

inline MlpModel load_model(const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_model: cannot open " + path);
    char magic[6];
    in.read(magic, 6);
    if (!in || std::memcmp(magic, "RISNN1", 6) != 0)
        throw std::runtime_error("load_model: bad magic in " + path);
    auto read_u32 = [&in, &path]() {
        std::uint32_t v{};
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        if (!in)
            throw std::runtime_error("load_model: truncated file " + path);
        return v;
    };
    const std::uint32_t layers = read_u32();
    if (layers == 0 || layers > 64)
        throw std::runtime_error("load_model: implausible layer count in " + path);
    MlpModel m;
    m.layer_sizes.resize(layers + 1);
    for (auto& s : m.layer_sizes)
        s = read_u32();
    std::vector<Activation> acts(layers);
    for (auto& a : acts) {
        const std::uint32_t code = read_u32();
        if (code > 3)
            throw std::runtime_error("load_model: unknown activation code in " + path);
        a = static_cast<Activation>(code);
    }
    m.output_activation = acts.back();
    for (std::size_t l = 0; l < layers; ++l) {
        const auto rows = static_cast<Eigen::Index>(m.layer_sizes[l + 1]);
        const auto cols = static_cast<Eigen::Index>(m.layer_sizes[l]);
        RMatrix w(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) {
                double v{};
                in.read(reinterpret_cast<char*>(&v), sizeof(v));
                w(r, c) = v;
            }
        RVector b(rows);
        in.read(reinterpret_cast<char*>(b.data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rows)));
        if (!in)
            throw std::runtime_error("load_model: truncated file " + path);
        m.weights.push_back(std::move(w));
        m.biases.push_back(std::move(b));
    }
    m.validate();
    return m;
}

} // namespace risce

#endif
