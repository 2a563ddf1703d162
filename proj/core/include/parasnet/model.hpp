// Copyright 2026 The ParasNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "parasnet/classes.hpp"
#include "parasnet/layers.hpp"
#include "parasnet/rng.hpp"
#include "parasnet/tensor.hpp"

namespace parasnet {

inline constexpr std::size_t kInputHeight = 244;
inline constexpr std::size_t kInputWidth = 324;
inline constexpr std::size_t kConvLayers = 5;
inline constexpr std::size_t kHiddenUnits = 128;
inline constexpr double kDropoutRate = 0.5;
// Spatial extent after the last pooling stage (5 x 8), independent of F.
inline constexpr std::size_t kFinalHeight = 5;
inline constexpr std::size_t kFinalWidth = 8;

/// Half-width of the Glorot uniform interval, sqrt(6 / (fan_in + fan_out)).
double glorot_bound(std::size_t fan_in, std::size_t fan_out);

/// Closed-form parameter count for filter count F.
std::size_t parasnet_parameter_count(std::size_t filters);

/// Five valid-conv/ReLU/max-pool stages, dense(40F -> 128)/ReLU/dropout,
/// dense(128 -> 3), softmax.
///
/// Parameters are held as 14 tensors in layer order: conv1 kernels, conv1 bias,
/// ..., conv5 bias, dense1 weights, dense1 bias, dense2 weights, dense2 bias.
template <typename T>
class BasicParasNet {
 public:
  static constexpr std::size_t kNumTensors = 2 * kConvLayers + 4;

  /// All-zero parameters with the right shapes.
  explicit BasicParasNet(std::size_t filters);

  std::size_t filters() const noexcept { return filters_; }
  std::uint64_t init_seed() const noexcept { return init_seed_; }
  void set_init_seed(std::uint64_t seed) noexcept { init_seed_ = seed; }

  const BasicTensor<T>& conv_kernels(std::size_t layer) const { return params_.at(2 * layer); }
  const BasicTensor<T>& conv_bias(std::size_t layer) const { return params_.at(2 * layer + 1); }
  const BasicTensor<T>& dense1_weights() const { return params_[2 * kConvLayers]; }
  const BasicTensor<T>& dense1_bias() const { return params_[2 * kConvLayers + 1]; }
  const BasicTensor<T>& dense2_weights() const { return params_[2 * kConvLayers + 2]; }
  const BasicTensor<T>& dense2_bias() const { return params_[2 * kConvLayers + 3]; }

  std::vector<BasicTensor<T>>& params() noexcept { return params_; }
  const std::vector<BasicTensor<T>>& params() const noexcept { return params_; }

  std::size_t parameter_count() const;

  /// conv1..conv5, dense1, dense2.
  std::array<std::size_t, kConvLayers + 2> layer_parameter_counts() const;

  template <typename U>
  BasicParasNet<U> cast() const {
    BasicParasNet<U> out(filters_);
    for (std::size_t i = 0; i < params_.size(); ++i) out.params()[i] = params_[i].template cast<U>();
    out.set_init_seed(init_seed_);
    return out;
  }

  friend bool operator==(const BasicParasNet& a, const BasicParasNet& b) {
    return a.filters_ == b.filters_ && a.params_ == b.params_;
  }

 private:
  std::size_t filters_;
  std::uint64_t init_seed_ = 0;
  std::vector<BasicTensor<T>> params_;
};

using ParasNet = BasicParasNet<float>;
using ParasNetD = BasicParasNet<double>;

/// Glorot-uniform weights, zero biases.
ParasNet build_model(std::size_t filters, std::uint64_t seed);

/// Every activation needed by the backward pass.
template <typename T>
struct ForwardTrace {
  std::array<BasicTensor<T>, kConvLayers> conv_input;  // [0] is the image
  std::array<BasicTensor<T>, kConvLayers> conv_relu;   // conv output after ReLU
  std::array<BasicTensor<T>, kConvLayers> pooled;
  BasicTensor<T> flat;     // 40F
  BasicTensor<T> hidden;   // dense1 after ReLU, before dropout
  BasicTensor<T> dropped;  // after dropout
  std::vector<std::uint8_t> dropout_mask;
  BasicTensor<T> logits;
  BasicTensor<T> probs;

  /// Output shapes in network order: conv1, pool1, ..., conv5, pool5, dense1, dense2.
  std::vector<Shape> shape_trace() const;
};

template <typename T>
struct ForwardResult {
  BasicTensor<T> probs;   // 3
  BasicTensor<T> hidden;  // 128, pre-dropout
};

template <typename T>
ForwardTrace<T> forward_trace(const BasicParasNet<T>& model, const BasicTensor<T>& image,
                              nn::Mode mode, Rng& rng);

template <typename T>
ForwardResult<T> forward(const BasicParasNet<T>& model, const BasicTensor<T>& image,
                         nn::Mode mode, Rng& rng);

/// Inference-mode forward pass; no randomness is consumed.
template <typename T>
ForwardResult<T> infer(const BasicParasNet<T>& model, const BasicTensor<T>& image);

/// Parameter gradients (layer order) given dLoss/dprobs.
template <typename T>
std::vector<BasicTensor<T>> backward(const BasicParasNet<T>& model, const ForwardTrace<T>& trace,
                                     const BasicTensor<T>& d_probs);

}  // namespace parasnet
