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

#include "parasnet/model.hpp"

#include <cmath>
#include <stdexcept>

namespace parasnet {

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  if (fan_in == 0 || fan_out == 0) {
    throw std::invalid_argument("glorot_bound: fan_in and fan_out must be positive");
  }
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

std::size_t parasnet_parameter_count(std::size_t filters) {
  const std::size_t f = filters;
  return 10 * f + 4 * (9 * f * f + f) + (kFinalHeight * kFinalWidth * f * kHiddenUnits + kHiddenUnits) +
         (kHiddenUnits * kNumClasses + kNumClasses);
}

template <typename T>
BasicParasNet<T>::BasicParasNet(std::size_t filters) : filters_(filters) {
  if (filters == 0) throw std::invalid_argument("ParasNet: filter count must be at least 1");
  params_.reserve(kNumTensors);
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    const std::size_t cin = l == 0 ? 1 : filters;
    params_.emplace_back(Shape{3, 3, cin, filters});
    params_.emplace_back(Shape{filters});
  }
  params_.emplace_back(Shape{kFinalHeight * kFinalWidth * filters, kHiddenUnits});
  params_.emplace_back(Shape{kHiddenUnits});
  params_.emplace_back(Shape{kHiddenUnits, kNumClasses});
  params_.emplace_back(Shape{kNumClasses});
}

template <typename T>
std::size_t BasicParasNet<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

template <typename T>
std::array<std::size_t, kConvLayers + 2> BasicParasNet<T>::layer_parameter_counts() const {
  std::array<std::size_t, kConvLayers + 2> counts{};
  for (std::size_t l = 0; l < kConvLayers + 2; ++l) {
    counts[l] = params_[2 * l].size() + params_[2 * l + 1].size();
  }
  return counts;
}

ParasNet build_model(std::size_t filters, std::uint64_t seed) {
  ParasNet model(filters);
  model.set_init_seed(seed);
  Rng rng(seed);
  auto init = [&rng](Tensor& t, std::size_t fan_in, std::size_t fan_out) {
    const double bound = glorot_bound(fan_in, fan_out);
    for (float& v : t.data()) {
      float x;
      do {
        x = static_cast<float>(rng.uniform(-bound, bound));
      } while (!(std::abs(x) < bound));
      v = x;
    }
  };
  auto& p = model.params();
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    const std::size_t cin = l == 0 ? 1 : filters;
    init(p[2 * l], 9 * cin, 9 * filters);
  }
  init(p[2 * kConvLayers], kFinalHeight * kFinalWidth * filters, kHiddenUnits);
  init(p[2 * kConvLayers + 2], kHiddenUnits, kNumClasses);
  return model;
}

template <typename T>
std::vector<Shape> ForwardTrace<T>::shape_trace() const {
  std::vector<Shape> shapes;
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    shapes.push_back(conv_relu[l].shape());
    shapes.push_back(pooled[l].shape());
  }
  shapes.push_back(hidden.shape());
  shapes.push_back(logits.shape());
  return shapes;
}

template <typename T>
ForwardTrace<T> forward_trace(const BasicParasNet<T>& model, const BasicTensor<T>& image,
                              nn::Mode mode, Rng& rng) {
  require_shape(image, {kInputHeight, kInputWidth, 1}, "ParasNet input image");
  ForwardTrace<T> tr;
  tr.conv_input[0] = image;
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    tr.conv_relu[l] =
        nn::relu(nn::conv2d_valid(tr.conv_input[l], model.conv_kernels(l), model.conv_bias(l)));
    tr.pooled[l] = nn::maxpool_2x2(tr.conv_relu[l]);
    if (l + 1 < kConvLayers) tr.conv_input[l + 1] = tr.pooled[l];
  }
  tr.flat = tr.pooled[kConvLayers - 1];
  tr.flat.reshape({tr.flat.size()});
  tr.hidden = nn::relu(nn::dense(tr.flat, model.dense1_weights(), model.dense1_bias()));
  auto dropped = nn::dropout(tr.hidden, kDropoutRate, mode, rng);
  tr.dropped = std::move(dropped.output);
  tr.dropout_mask = std::move(dropped.mask);
  tr.logits = nn::dense(tr.dropped, model.dense2_weights(), model.dense2_bias());
  tr.probs = nn::softmax(tr.logits);
  return tr;
}

template <typename T>
ForwardResult<T> forward(const BasicParasNet<T>& model, const BasicTensor<T>& image,
                         nn::Mode mode, Rng& rng) {
  require_shape(image, {kInputHeight, kInputWidth, 1}, "ParasNet input image");
  BasicTensor<T> x = image;
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    x = nn::maxpool_2x2(nn::relu(nn::conv2d_valid(x, model.conv_kernels(l), model.conv_bias(l))));
  }
  x.reshape({x.size()});
  ForwardResult<T> r;
  r.hidden = nn::relu(nn::dense(x, model.dense1_weights(), model.dense1_bias()));
  auto dropped = nn::dropout(r.hidden, kDropoutRate, mode, rng);
  r.probs = nn::softmax(nn::dense(dropped.output, model.dense2_weights(), model.dense2_bias()));
  return r;
}

template <typename T>
ForwardResult<T> infer(const BasicParasNet<T>& model, const BasicTensor<T>& image) {
  Rng unused(0);
  return forward(model, image, nn::Mode::kInfer, unused);
}

template <typename T>
std::vector<BasicTensor<T>> backward(const BasicParasNet<T>& model, const ForwardTrace<T>& tr,
                                     const BasicTensor<T>& d_probs) {
  std::vector<BasicTensor<T>> grads(BasicParasNet<T>::kNumTensors);
  const std::size_t dense_at = 2 * kConvLayers;

  BasicTensor<T> d_logits = nn::softmax_backward(tr.probs, d_probs);
  auto g2 = nn::dense_backward(tr.dropped, model.dense2_weights(), d_logits);
  grads[dense_at + 2] = std::move(g2.d_params[0]);
  grads[dense_at + 3] = std::move(g2.d_params[1]);

  BasicTensor<T> d_hidden = nn::dropout_backward(tr.dropout_mask, kDropoutRate, g2.d_input);
  d_hidden = nn::relu_backward(tr.hidden, d_hidden);
  auto g1 = nn::dense_backward(tr.flat, model.dense1_weights(), d_hidden);
  grads[dense_at] = std::move(g1.d_params[0]);
  grads[dense_at + 1] = std::move(g1.d_params[1]);

  BasicTensor<T> d = std::move(g1.d_input);
  d.reshape(tr.pooled[kConvLayers - 1].shape());
  for (std::size_t l = kConvLayers; l-- > 0;) {
    d = nn::maxpool_2x2_backward(tr.conv_relu[l], d);
    // ReLU output is positive exactly where its input is.
    d = nn::relu_backward(tr.conv_relu[l], d);
    auto gc = nn::conv2d_backward(tr.conv_input[l], model.conv_kernels(l), d, l > 0);
    grads[2 * l] = std::move(gc.d_params[0]);
    grads[2 * l + 1] = std::move(gc.d_params[1]);
    d = std::move(gc.d_input);
  }
  return grads;
}

template class BasicParasNet<float>;
template class BasicParasNet<double>;
template struct ForwardTrace<float>;
template struct ForwardTrace<double>;

#define PARASNET_INSTANTIATE_MODEL(T)                                                            \
  template ForwardTrace<T> forward_trace(const BasicParasNet<T>&, const BasicTensor<T>&,        \
                                         nn::Mode, Rng&);                                       \
  template ForwardResult<T> forward(const BasicParasNet<T>&, const BasicTensor<T>&, nn::Mode,   \
                                    Rng&);                                                      \
  template ForwardResult<T> infer(const BasicParasNet<T>&, const BasicTensor<T>&);              \
  template std::vector<BasicTensor<T>> backward(const BasicParasNet<T>&, const ForwardTrace<T>&, \
                                                const BasicTensor<T>&);

PARASNET_INSTANTIATE_MODEL(float)
PARASNET_INSTANTIATE_MODEL(double)

#undef PARASNET_INSTANTIATE_MODEL

}  // namespace parasnet
