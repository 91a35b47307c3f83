// Copyright 2026 The gadgetrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gadgetrl {

/// Uniform double in [0, 1) from the top 53 bits; identical on every
/// platform, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Fully connected ReLU network. Samples are columns.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Layer {
    Matrix w;  ///< out x in
    Vector b;
  };

  /// Per-layer gradient buffers with the same shapes as the parameters.
  using Gradients = std::vector<Layer>;

  struct Cache {
    std::vector<Matrix> inputs;  ///< input to each layer
    std::vector<Matrix> pre;     ///< pre-activation of each hidden layer
  };

  Mlp() = default;

  /// Uniform fan-in initialisation; the last layer is scaled by output_gain.
  Mlp(std::vector<size_t> sizes, std::mt19937_64& rng, double output_gain = 1.0) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("MLP needs at least input and output sizes");
    for (size_t s : sizes_) {
      if (s == 0) throw std::invalid_argument("MLP layer sizes must be positive");
    }
    for (size_t l = 0; l + 1 < sizes_.size(); l++) {
      Layer layer{Matrix(sizes_[l + 1], sizes_[l]), Vector::Zero(sizes_[l + 1])};
      double bound = std::sqrt(6.0 / static_cast<double>(sizes_[l]));
      if (l + 2 == sizes_.size()) bound *= output_gain;
      for (Eigen::Index j = 0; j < layer.w.cols(); j++) {
        for (Eigen::Index i = 0; i < layer.w.rows(); i++) {
          layer.w(i, j) = static_cast<Scalar>((2 * uniform01(rng) - 1) * bound);
        }
      }
      layers_.push_back(std::move(layer));
    }
  }

  const std::vector<size_t>& sizes() const { return sizes_; }
  size_t input_size() const { return sizes_.front(); }
  size_t output_size() const { return sizes_.back(); }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const {
    if (static_cast<size_t>(x.rows()) != input_size()) {
      throw std::invalid_argument("MLP input has " + std::to_string(x.rows()) + " rows, expected " +
                                  std::to_string(input_size()));
    }
    if (cache) {
      cache->inputs.clear();
      cache->pre.clear();
    }
    Matrix h = x;
    for (size_t l = 0; l < layers_.size(); l++) {
      Matrix z = layers_[l].w * h;
      z.colwise() += layers_[l].b;
      if (cache) cache->inputs.push_back(std::move(h));
      if (l + 1 == layers_.size()) return z;
      if (cache) cache->pre.push_back(z);
      h = z.cwiseMax(Scalar(0));
    }
    return h;
  }

  Gradients zero_gradients() const {
    Gradients g;
    for (const auto& layer : layers_) {
      g.push_back({Matrix::Zero(layer.w.rows(), layer.w.cols()), Vector::Zero(layer.b.size())});
    }
    return g;
  }

  /// Accumulates dLoss/dParams into grads given dLoss/dOutput.
  void backward(const Cache& cache, Matrix grad_out, Gradients& grads) const {
    for (size_t l = layers_.size(); l-- > 0;) {
      grads[l].w.noalias() += grad_out * cache.inputs[l].transpose();
      grads[l].b += grad_out.rowwise().sum();
      if (l == 0) break;
      Matrix g = layers_[l].w.transpose() * grad_out;
      grad_out = g.cwiseProduct((cache.pre[l - 1].array() > Scalar(0)).matrix().template cast<Scalar>());
    }
  }

  size_t num_parameters() const {
    size_t total = 0;
    for (const auto& layer : layers_) total += layer.w.size() + layer.b.size();
    return total;
  }

  /// Flat parameter view: layer by layer, weights (column-major) then bias.
  Scalar& parameter(size_t i) { return locate(layers_, i); }
  Scalar parameter(size_t i) const { return locate(const_cast<std::vector<Layer>&>(layers_), i); }
  static Scalar& gradient(Gradients& g, size_t i) { return locate(g, i); }

 private:
  static Scalar& locate(std::vector<Layer>& layers, size_t i) {
    for (auto& layer : layers) {
      size_t nw = static_cast<size_t>(layer.w.size());
      if (i < nw) return layer.w.data()[i];
      i -= nw;
      size_t nb = static_cast<size_t>(layer.b.size());
      if (i < nb) return layer.b.data()[i];
      i -= nb;
    }
    throw std::out_of_range("parameter index out of range");
  }

  std::vector<size_t> sizes_;
  std::vector<Layer> layers_;
};

template <typename Scalar>
double gradient_norm(const typename Mlp<Scalar>::Gradients& g) {
  double sq = 0;
  for (const auto& layer : g) sq += static_cast<double>(layer.w.squaredNorm() + layer.b.squaredNorm());
  return std::sqrt(sq);
}

template <typename Scalar>
void scale_gradients(typename Mlp<Scalar>::Gradients& g, Scalar factor) {
  for (auto& layer : g) {
    layer.w *= factor;
    layer.b *= factor;
  }
}

/// RMSProp: per-parameter step lr * g / (sqrt(E[g^2]) + eps), no momentum.
template <typename Scalar>
class RmsProp {
 public:
  RmsProp() = default;
  RmsProp(const Mlp<Scalar>& net, double lr, double decay = 0.99, double eps = 1e-5)
      : lr_(lr), decay_(decay), eps_(eps), square_avg_(net.zero_gradients()) {}

  void step(Mlp<Scalar>& net, const typename Mlp<Scalar>::Gradients& grads) {
    auto& layers = net.layers();
    const Scalar a = static_cast<Scalar>(decay_), lr = static_cast<Scalar>(lr_), eps = static_cast<Scalar>(eps_);
    for (size_t l = 0; l < layers.size(); l++) {
      auto& sw = square_avg_[l].w;
      auto& sb = square_avg_[l].b;
      sw = a * sw + (1 - a) * grads[l].w.cwiseAbs2();
      sb = a * sb + (1 - a) * grads[l].b.cwiseAbs2();
      layers[l].w.array() -= lr * grads[l].w.array() / (sw.array().sqrt() + eps);
      layers[l].b.array() -= lr * grads[l].b.array() / (sb.array().sqrt() + eps);
    }
  }

  double learning_rate() const { return lr_; }

 private:
  double lr_ = 3e-4;
  double decay_ = 0.99;
  double eps_ = 1e-5;
  typename Mlp<Scalar>::Gradients square_avg_;
};

/// Column-wise log-softmax.
template <typename Matrix>
Matrix log_softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); j++) {
    auto col = logits.col(j);
    auto m = col.maxCoeff();
    auto lse = m + std::log((col.array() - m).exp().sum());
    out.col(j) = col.array() - lse;
  }
  return out;
}

}  // namespace gadgetrl
