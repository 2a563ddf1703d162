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

#include "parasnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "simd.hpp"

namespace parasnet {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << " x ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace nn {
namespace {

template <typename T>
void check_conv_args(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                     const BasicTensor<T>& bias) {
  if (input.rank() != 3) {
    throw ShapeError("conv2d: input must be h x w x c, got " + shape_to_string(input.shape()));
  }
  if (input.dim(0) < 3 || input.dim(1) < 3) {
    throw ShapeError("conv2d: input spatial extent must be at least 3x3, got " +
                     shape_to_string(input.shape()));
  }
  if (kernels.rank() != 4 || kernels.dim(0) != 3 || kernels.dim(1) != 3 ||
      kernels.dim(2) != input.dim(2)) {
    throw ShapeError("conv2d: kernels must be 3 x 3 x " + std::to_string(input.dim(2)) +
                     " x F, got " + shape_to_string(kernels.shape()));
  }
  if (bias.rank() != 1 || bias.dim(0) != kernels.dim(3)) {
    throw ShapeError("conv2d: bias must have " + std::to_string(kernels.dim(3)) +
                     " entries, got " + shape_to_string(bias.shape()));
  }
}

// FN > 1 fixes the filter count at compile time and keeps the F outputs of a
// pixel in one lane vector; FN <= 1 is the generic scalar path.
template <typename T, std::size_t FN>
void conv_forward_kernel(const T* in, std::size_t w, std::size_t cin, const T* k, const T* b,
                         std::size_t nf_runtime, T* out, std::size_t oh, std::size_t ow) {
  const std::size_t span = 3 * cin;
  if constexpr (FN > 1) {
    using V = simd::lanes_t<T, FN>;
    // JB neighbouring pixels give JB independent accumulation chains.
    constexpr std::size_t JB = FN * sizeof(T) >= 64 ? 4 : 8;
    const V bias = simd::load<T, FN>(b);
    for (std::size_t i = 0; i < oh; ++i) {
      std::size_t j = 0;
      for (; j + JB <= ow; j += JB) {
        V acc[JB];
        for (std::size_t p = 0; p < JB; ++p) acc[p] = bias;
        for (std::size_t di = 0; di < 3; ++di) {
          const T* row = in + ((i + di) * w + j) * cin;
          const T* krow = k + di * span * FN;
          for (std::size_t q = 0; q < span; ++q) {
            const V kq = simd::load<T, FN>(krow + q * FN);
            for (std::size_t p = 0; p < JB; ++p) acc[p] += row[p * cin + q] * kq;
          }
        }
        T* o = out + (i * ow + j) * FN;
        for (std::size_t p = 0; p < JB; ++p) simd::store<T, FN>(o + p * FN, acc[p]);
      }
      for (; j < ow; ++j) {
        V acc = bias;
        for (std::size_t di = 0; di < 3; ++di) {
          const T* row = in + ((i + di) * w + j) * cin;
          const T* krow = k + di * span * FN;
          for (std::size_t q = 0; q < span; ++q) acc += row[q] * simd::load<T, FN>(krow + q * FN);
        }
        simd::store<T, FN>(out + (i * ow + j) * FN, acc);
      }
    }
  } else {
    const std::size_t nf = nf_runtime;
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        T* o = out + (i * ow + j) * nf;
        for (std::size_t f = 0; f < nf; ++f) o[f] = b[f];
        for (std::size_t di = 0; di < 3; ++di) {
          const T* row = in + ((i + di) * w + j) * cin;
          const T* krow = k + di * span * nf;
          for (std::size_t q = 0; q < span; ++q) {
            const T v = row[q];
            const T* kq = krow + q * nf;
            for (std::size_t f = 0; f < nf; ++f) o[f] += v * kq[f];
          }
        }
      }
    }
  }
}

// kt holds the kernels laid out [di][f][dj * cin + c] so that the input
// gradient of one kernel row is a contiguous update.
template <typename T, std::size_t FN>
void conv_backward_kernel(const T* in, std::size_t w, std::size_t cin, const T* kt,
                          const T* up, std::size_t nf_runtime, std::size_t oh,
                          std::size_t ow, T* dk, T* db, T* din) {
  const std::size_t span = 3 * cin;
  if constexpr (FN > 1) {
    using V = simd::lanes_t<T, FN>;
    std::vector<V> dkv(3 * span, V{});
    V dbv{};
    const bool vector_din = din != nullptr && cin == FN;
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        const T* up_px = up + (i * ow + j) * FN;
        const V u = simd::load<T, FN>(up_px);
        dbv += u;
        for (std::size_t di = 0; di < 3; ++di) {
          const T* row = in + ((i + di) * w + j) * cin;
          V* dkrow = dkv.data() + di * span;
          for (std::size_t q = 0; q < span; ++q) dkrow[q] += row[q] * u;
          if (vector_din) {
            T* drow = din + ((i + di) * w + j) * cin;
            V d0 = simd::load<T, FN>(drow), d1 = simd::load<T, FN>(drow + FN),
              d2 = simd::load<T, FN>(drow + 2 * FN);
            const T* ktrow = kt + di * FN * span;
            for (std::size_t f = 0; f < FN; ++f) {
              const T uf = up_px[f];
              const T* kf = ktrow + f * span;
              d0 += uf * simd::load<T, FN>(kf);
              d1 += uf * simd::load<T, FN>(kf + FN);
              d2 += uf * simd::load<T, FN>(kf + 2 * FN);
            }
            simd::store<T, FN>(drow, d0);
            simd::store<T, FN>(drow + FN, d1);
            simd::store<T, FN>(drow + 2 * FN, d2);
          } else if (din) {
            T* drow = din + ((i + di) * w + j) * cin;
            const T* ktrow = kt + di * FN * span;
            for (std::size_t f = 0; f < FN; ++f) {
              const T uf = up_px[f];
              const T* kf = ktrow + f * span;
              for (std::size_t q = 0; q < span; ++q) drow[q] += uf * kf[q];
            }
          }
        }
      }
    }
    for (std::size_t r = 0; r < 3 * span; ++r) simd::store<T, FN>(dk + r * FN, dkv[r]);
    simd::store<T, FN>(db, dbv);
  } else {
    const std::size_t nf = nf_runtime;
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        const T* u = up + (i * ow + j) * nf;
        for (std::size_t f = 0; f < nf; ++f) db[f] += u[f];
        for (std::size_t di = 0; di < 3; ++di) {
          const T* row = in + ((i + di) * w + j) * cin;
          T* dkrow = dk + di * span * nf;
          for (std::size_t q = 0; q < span; ++q) {
            const T v = row[q];
            T* dkq = dkrow + q * nf;
            for (std::size_t f = 0; f < nf; ++f) dkq[f] += v * u[f];
          }
          if (din) {
            T* drow = din + ((i + di) * w + j) * cin;
            const T* ktrow = kt + di * nf * span;
            for (std::size_t f = 0; f < nf; ++f) {
              const T uf = u[f];
              const T* kf = ktrow + f * span;
              for (std::size_t q = 0; q < span; ++q) drow[q] += uf * kf[q];
            }
          }
        }
      }
    }
  }
}

template <typename T, typename Fn>
void dispatch_filters(std::size_t nf, Fn&& fn) {
  switch (nf) {
    case 1: fn(std::integral_constant<std::size_t, 1>{}); break;
    case 2: fn(std::integral_constant<std::size_t, 2>{}); break;
    case 4: fn(std::integral_constant<std::size_t, 4>{}); break;
    case 8: fn(std::integral_constant<std::size_t, 8>{}); break;
    case 16: fn(std::integral_constant<std::size_t, 16>{}); break;
    default: fn(std::integral_constant<std::size_t, 0>{}); break;
  }
}

template <typename T>
void check_same_shape(const BasicTensor<T>& a, const BasicTensor<T>& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": upstream shape " + shape_to_string(b.shape()) +
                     " does not match " + shape_to_string(a.shape()));
  }
}

}  // namespace

template <typename T>
BasicTensor<T> conv2d_valid(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                            const BasicTensor<T>& bias) {
  check_conv_args(input, kernels, bias);
  const std::size_t h = input.dim(0), w = input.dim(1), cin = input.dim(2);
  const std::size_t nf = kernels.dim(3);
  const std::size_t oh = h - 2, ow = w - 2;
  BasicTensor<T> out({oh, ow, nf});
  dispatch_filters<T>(nf, [&](auto fn) {
    conv_forward_kernel<T, decltype(fn)::value>(input.raw(), w, cin, kernels.raw(), bias.raw(),
                                                nf, out.raw(), oh, ow);
  });
  return out;
}

template <typename T>
LayerGradients<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                                  const BasicTensor<T>& upstream, bool want_input_grad) {
  if (kernels.rank() != 4) {
    throw ShapeError("conv2d_backward: kernels must be rank 4, got " +
                     shape_to_string(kernels.shape()));
  }
  const std::size_t nf = kernels.dim(3);
  check_conv_args(input, kernels, BasicTensor<T>({nf}));
  const std::size_t h = input.dim(0), w = input.dim(1), cin = input.dim(2);
  const std::size_t oh = h - 2, ow = w - 2;
  require_shape(upstream, {oh, ow, nf}, "conv2d_backward upstream");

  LayerGradients<T> g;
  g.d_params.emplace_back(kernels.shape());
  g.d_params.emplace_back(Shape{nf});
  const std::size_t span = 3 * cin;
  BasicTensor<T> kt;
  if (want_input_grad) {
    g.d_input = BasicTensor<T>(input.shape());
    kt = BasicTensor<T>({3, nf, span});
    for (std::size_t di = 0; di < 3; ++di)
      for (std::size_t q = 0; q < span; ++q)
        for (std::size_t f = 0; f < nf; ++f)
          kt[(di * nf + f) * span + q] = kernels[(di * span + q) * nf + f];
  }
  dispatch_filters<T>(nf, [&](auto fn) {
    conv_backward_kernel<T, decltype(fn)::value>(
        input.raw(), w, cin, kt.raw(), upstream.raw(), nf, oh, ow,
        g.d_params[0].raw(), g.d_params[1].raw(), want_input_grad ? g.d_input.raw() : nullptr);
  });
  return g;
}

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& input) {
  BasicTensor<T> out = input;
  for (T& v : out.data()) v = v > T{0} ? v : T{0};
  return out;
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& input, const BasicTensor<T>& upstream) {
  check_same_shape(input, upstream, "relu_backward");
  BasicTensor<T> out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > T{0} ? upstream[i] : T{0};
  return out;
}

namespace {

template <typename T>
void check_pool_input(const BasicTensor<T>& input) {
  if (input.rank() != 3) {
    throw ShapeError("maxpool_2x2: input must be h x w x c, got " +
                     shape_to_string(input.shape()));
  }
  if (input.dim(0) < 2 || input.dim(1) < 2) {
    throw ShapeError("maxpool_2x2: input spatial extent must be at least 2x2, got " +
                     shape_to_string(input.shape()));
  }
}

// Offset (into input) of the first maximal cell of window (oy, ox, c).
template <typename T>
std::size_t pool_argmax(const BasicTensor<T>& input, std::size_t oy, std::size_t ox,
                        std::size_t c) {
  const std::size_t w = input.dim(1), ch = input.dim(2);
  const std::size_t y0 = 2 * oy, x0 = 2 * ox;
  const std::size_t cand[4] = {(y0 * w + x0) * ch + c, (y0 * w + x0 + 1) * ch + c,
                               ((y0 + 1) * w + x0) * ch + c, ((y0 + 1) * w + x0 + 1) * ch + c};
  std::size_t best = cand[0];
  for (int t = 1; t < 4; ++t) {
    if (input[cand[t]] > input[best]) best = cand[t];
  }
  return best;
}

}  // namespace

template <typename T>
BasicTensor<T> maxpool_2x2(const BasicTensor<T>& input) {
  check_pool_input(input);
  const std::size_t oh = input.dim(0) / 2, ow = input.dim(1) / 2, ch = input.dim(2);
  BasicTensor<T> out({oh, ow, ch});
  const std::size_t w = input.dim(1);
  const T* in = input.raw();
  for (std::size_t i = 0; i < oh; ++i) {
    const T* r0 = in + (2 * i) * w * ch;
    const T* r1 = r0 + w * ch;
    T* o = out.raw() + i * ow * ch;
    for (std::size_t j = 0; j < ow; ++j) {
      const std::size_t a = 2 * j * ch, b = a + ch;
      for (std::size_t c = 0; c < ch; ++c) {
        o[j * ch + c] = std::max(std::max(r0[a + c], r0[b + c]), std::max(r1[a + c], r1[b + c]));
      }
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> maxpool_2x2_backward(const BasicTensor<T>& input, const BasicTensor<T>& upstream) {
  check_pool_input(input);
  const std::size_t oh = input.dim(0) / 2, ow = input.dim(1) / 2, ch = input.dim(2);
  require_shape(upstream, {oh, ow, ch}, "maxpool_2x2_backward upstream");
  BasicTensor<T> d(input.shape());
  for (std::size_t i = 0; i < oh; ++i)
    for (std::size_t j = 0; j < ow; ++j)
      for (std::size_t c = 0; c < ch; ++c) d[pool_argmax(input, i, j, c)] += upstream.at(i, j, c);
  return d;
}

template <typename T>
BasicTensor<T> dense(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                     const BasicTensor<T>& bias) {
  if (weights.rank() != 2 || weights.dim(0) != input.size()) {
    throw ShapeError("dense: weights must be " + std::to_string(input.size()) + " x m, got " +
                     shape_to_string(weights.shape()));
  }
  const std::size_t n = weights.dim(0), m = weights.dim(1);
  require_shape(bias, {m}, "dense bias");
  BasicTensor<T> out = bias;
  T* o = out.raw();
  for (std::size_t i = 0; i < n; ++i) {
    const T v = input[i];
    const T* wr = weights.raw() + i * m;
    for (std::size_t j = 0; j < m; ++j) o[j] += v * wr[j];
  }
  return out;
}

template <typename T>
LayerGradients<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                                 const BasicTensor<T>& upstream) {
  if (weights.rank() != 2 || weights.dim(0) != input.size()) {
    throw ShapeError("dense_backward: weights must be " + std::to_string(input.size()) +
                     " x m, got " + shape_to_string(weights.shape()));
  }
  const std::size_t n = weights.dim(0), m = weights.dim(1);
  require_shape(upstream, {m}, "dense_backward upstream");
  LayerGradients<T> g;
  g.d_input = BasicTensor<T>(input.shape());
  BasicTensor<T> dw({n, m});
  for (std::size_t i = 0; i < n; ++i) {
    const T v = input[i];
    const T* wr = weights.raw() + i * m;
    T* dwr = dw.raw() + i * m;
    T acc{0};
    for (std::size_t j = 0; j < m; ++j) {
      dwr[j] = v * upstream[j];
      acc += wr[j] * upstream[j];
    }
    g.d_input[i] = acc;
  }
  g.d_params.push_back(std::move(dw));
  g.d_params.push_back(upstream);
  return g;
}

template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout: rate must lie in [0, 1), got " + std::to_string(rate));
  }
  DropoutResult<T> r{input, {}};
  if (mode == Mode::kInfer) return r;
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  r.mask.resize(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const bool keep = rng.uniform() >= rate;
    r.mask[i] = keep ? 1 : 0;
    r.output[i] = keep ? input[i] * scale : T{0};
  }
  return r;
}

template <typename T>
BasicTensor<T> dropout_backward(const std::vector<std::uint8_t>& mask, double rate,
                                const BasicTensor<T>& upstream) {
  if (mask.empty()) return upstream;
  if (mask.size() != upstream.size()) {
    throw ShapeError("dropout_backward: mask length " + std::to_string(mask.size()) +
                     " does not match upstream " + shape_to_string(upstream.shape()));
  }
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  BasicTensor<T> d(upstream.shape());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = mask[i] ? upstream[i] * scale : T{0};
  return d;
}

template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& logits) {
  if (logits.rank() != 1 || logits.size() == 0) {
    throw ShapeError("softmax: expected a non-empty vector, got " +
                     shape_to_string(logits.shape()));
  }
  if (!logits.all_finite()) throw std::invalid_argument("softmax: non-finite logit");
  const T mx = *std::max_element(logits.data().begin(), logits.data().end());
  BasicTensor<T> p(logits.shape());
  T total{0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    total += p[i];
  }
  for (T& v : p.data()) v /= total;
  return p;
}

template <typename T>
BasicTensor<T> softmax_backward(const BasicTensor<T>& probs, const BasicTensor<T>& upstream) {
  check_same_shape(probs, upstream, "softmax_backward");
  T dot{0};
  for (std::size_t i = 0; i < probs.size(); ++i) dot += probs[i] * upstream[i];
  BasicTensor<T> d(probs.shape());
  for (std::size_t i = 0; i < probs.size(); ++i) d[i] = probs[i] * (upstream[i] - dot);
  return d;
}

#define PARASNET_INSTANTIATE_LAYERS(T)                                                          \
  template BasicTensor<T> conv2d_valid(const BasicTensor<T>&, const BasicTensor<T>&,           \
                                       const BasicTensor<T>&);                                 \
  template LayerGradients<T> conv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,     \
                                             const BasicTensor<T>&, bool);                     \
  template BasicTensor<T> relu(const BasicTensor<T>&);                                         \
  template BasicTensor<T> relu_backward(const BasicTensor<T>&, const BasicTensor<T>&);         \
  template BasicTensor<T> maxpool_2x2(const BasicTensor<T>&);                                  \
  template BasicTensor<T> maxpool_2x2_backward(const BasicTensor<T>&, const BasicTensor<T>&);  \
  template BasicTensor<T> dense(const BasicTensor<T>&, const BasicTensor<T>&,                  \
                                const BasicTensor<T>&);                                        \
  template LayerGradients<T> dense_backward(const BasicTensor<T>&, const BasicTensor<T>&,      \
                                            const BasicTensor<T>&);                            \
  template DropoutResult<T> dropout(const BasicTensor<T>&, double, Mode, Rng&);                \
  template BasicTensor<T> dropout_backward(const std::vector<std::uint8_t>&, double,           \
                                           const BasicTensor<T>&);                             \
  template BasicTensor<T> softmax(const BasicTensor<T>&);                                      \
  template BasicTensor<T> softmax_backward(const BasicTensor<T>&, const BasicTensor<T>&);

PARASNET_INSTANTIATE_LAYERS(float)
PARASNET_INSTANTIATE_LAYERS(double)

#undef PARASNET_INSTANTIATE_LAYERS

}  // namespace nn
}  // namespace parasnet
