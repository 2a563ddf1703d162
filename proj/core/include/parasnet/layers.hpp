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

// Layer primitives with hand-written backward passes. Every function is a pure
// function of its arguments (dropout additionally consumes the passed Rng).
// Instantiated for float (training/inference) and double (gradient checks).

#pragma once

#include <cstdint>
#include <vector>

#include "parasnet/rng.hpp"
#include "parasnet/tensor.hpp"

namespace parasnet::nn {

enum class Mode { kTrain, kInfer };

template <typename T>
struct LayerGradients {
  BasicTensor<T> d_input;
  std::vector<BasicTensor<T>> d_params;  // same order as the layer's parameters
};

/// Valid 3x3 convolution, stride 1, no padding.
///
/// input is h x w x c_in, kernels 3 x 3 x c_in x F (F fastest), bias F.
/// out[i,j,f] = bias[f] + sum over (di, dj, c) in row-major order of
/// input[i+di, j+dj, c] * kernels[di, dj, c, f]. The accumulation order is part
/// of the contract so that results are reproducible bit-for-bit.
template <typename T>
BasicTensor<T> conv2d_valid(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                            const BasicTensor<T>& bias);

/// Gradients of conv2d_valid. d_params = {d_kernels, d_bias}. When
/// `want_input_grad` is false d_input is left empty (first layer).
template <typename T>
LayerGradients<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                                  const BasicTensor<T>& upstream, bool want_input_grad = true);

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& input);

/// Passes upstream where input > 0; the subgradient at 0 is 0.
template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& input, const BasicTensor<T>& upstream);

/// 2x2 max pooling with stride 2. Odd trailing rows/columns are dropped.
template <typename T>
BasicTensor<T> maxpool_2x2(const BasicTensor<T>& input);

/// Routes each upstream value to the first maximal cell (row-major) of its window.
template <typename T>
BasicTensor<T> maxpool_2x2_backward(const BasicTensor<T>& input, const BasicTensor<T>& upstream);

/// out = input^T W + b with W stored n x m row-major.
template <typename T>
BasicTensor<T> dense(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                     const BasicTensor<T>& bias);

/// d_params = {d_weights, d_bias}.
template <typename T>
LayerGradients<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                                 const BasicTensor<T>& upstream);

template <typename T>
struct DropoutResult {
  BasicTensor<T> output;
  std::vector<std::uint8_t> mask;  // 1 = kept; empty in inference mode
};

/// Inverted dropout: kept elements are scaled by 1/(1 - rate).
template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double rate, Mode mode, Rng& rng);

template <typename T>
BasicTensor<T> dropout_backward(const std::vector<std::uint8_t>& mask, double rate,
                                const BasicTensor<T>& upstream);

/// Max-subtracted softmax over a rank-1 tensor.
template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& logits);

/// Vector-Jacobian product of softmax given its output.
template <typename T>
BasicTensor<T> softmax_backward(const BasicTensor<T>& probs, const BasicTensor<T>& upstream);

}  // namespace parasnet::nn
