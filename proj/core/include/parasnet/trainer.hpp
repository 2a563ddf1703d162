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

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "parasnet/dataset.hpp"
#include "parasnet/eval.hpp"
#include "parasnet/model.hpp"

namespace parasnet::train {

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before logs.
inline constexpr double kProbClamp = 1e-7;

template <typename T>
struct LossResult {
  double loss = 0.0;
  BasicTensor<T> d_probs;
};

/// Unweighted per-class binary cross-entropy over softmax outputs:
///   L = sum_c [ -y_c log p_c - (1 - y_c) log(1 - p_c) ]
/// The gradient is evaluated at the clamped probabilities.
template <typename T>
LossResult<T> bce_loss(const BasicTensor<T>& probs, const BasicTensor<T>& one_hot);

template <typename T = float>
BasicTensor<T> one_hot(ClassLabel label) {
  BasicTensor<T> y({kNumClasses});
  y[class_index(label)] = T{1};
  return y;
}

template <typename T>
struct SampleGradient {
  double loss = 0.0;
  std::vector<BasicTensor<T>> grads;  // model parameter order
};

/// Forward + loss + backward for one image.
template <typename T>
SampleGradient<T> loss_and_gradients(const BasicParasNet<T>& model, const BasicTensor<T>& image,
                                     ClassLabel label, nn::Mode mode, Rng& rng);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double decay = 0.9999;  // learning rate at step t is learning_rate * decay^t; 1 disables
};

struct AdamState {
  AdamConfig config;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t step = 0;

  static AdamState for_params(const std::vector<Tensor>& params, const AdamConfig& config);
};

/// One bias-corrected Adam update. Throws ShapeError on any shape mismatch.
void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state);

struct AugmentConfig {
  bool enabled = true;
  double max_translation = 0.10;  // fraction of each axis
  double hflip_probability = 0.5;
  double vflip_probability = 0.5;
  double max_rotation_degrees = 15.0;
  double zoom_lo = 0.9;
  double zoom_hi = 1.1;

  static AugmentConfig disabled() {
    AugmentConfig c;
    c.enabled = false;
    return c;
  }
  void validate() const;
};

Tensor flip_horizontal(const Tensor& image);
Tensor flip_vertical(const Tensor& image);
Tensor translate(const Tensor& image, long dy, long dx, float fill);
Tensor rotate_nearest(const Tensor& image, double radians, float fill);
Tensor zoom_nearest(const Tensor& image, double factor, float fill);
float median_intensity(const Tensor& image);

/// Translation, flips, rotation and zoom in that order; revealed pixels take
/// the input's median intensity.
Tensor augment(const Tensor& image, const AugmentConfig& cfg, Rng& rng);

struct FitConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::size_t eval_batch_size = 32;
  std::uint64_t seed = 7;
  std::size_t threads = 1;
  AugmentConfig augment;
  AdamConfig adam;
  /// Stop after the first epoch whose test accuracy reaches this value.
  std::optional<double> stop_at_accuracy;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  eval::ConfusionMatrix final_confusion;

  double best_accuracy() const;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Mini-batch training with the mean batch gradient and one Adam step per
/// batch. Sample order, augmentation and dropout draw from streams derived
/// from `cfg.seed`, so the result is independent of `cfg.threads`.
TrainReport fit(ParasNet& model, const Dataset& train_set, const Dataset& test_set,
                const FitConfig& cfg, const EpochCallback& on_epoch = {});

/// Header "epoch,train_loss,test_accuracy,seconds".
void write_report_csv(const TrainReport& report, std::ostream& out);

}  // namespace parasnet::train
