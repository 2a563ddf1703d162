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

#include "parasnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "parasnet/classifier.hpp"
#include "parasnet/parallel.hpp"

namespace parasnet::train {

template <typename T>
LossResult<T> bce_loss(const BasicTensor<T>& probs, const BasicTensor<T>& one_hot) {
  require_shape(probs, {kNumClasses}, "bce_loss probs");
  require_shape(one_hot, {kNumClasses}, "bce_loss label");
  int ones = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (one_hot[c] == T{1}) {
      ++ones;
    } else if (one_hot[c] != T{0}) {
      throw std::invalid_argument("bce_loss: label is not one-hot");
    }
  }
  if (ones != 1) throw std::invalid_argument("bce_loss: label is not one-hot");

  LossResult<T> r;
  r.d_probs = BasicTensor<T>({kNumClasses});
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double p = std::clamp(static_cast<double>(probs[c]), kProbClamp, 1.0 - kProbClamp);
    const double y = static_cast<double>(one_hot[c]);
    r.loss += -y * std::log(p) - (1.0 - y) * std::log(1.0 - p);
    r.d_probs[c] = static_cast<T>(-y / p + (1.0 - y) / (1.0 - p));
  }
  return r;
}

template LossResult<float> bce_loss(const Tensor&, const Tensor&);
template LossResult<double> bce_loss(const TensorD&, const TensorD&);

template <typename T>
SampleGradient<T> loss_and_gradients(const BasicParasNet<T>& model, const BasicTensor<T>& image,
                                     ClassLabel label, nn::Mode mode, Rng& rng) {
  const auto trace = forward_trace(model, image, mode, rng);
  const auto loss = bce_loss(trace.probs, one_hot<T>(label));
  return {loss.loss, backward(model, trace, loss.d_probs)};
}

template SampleGradient<float> loss_and_gradients(const ParasNet&, const Tensor&, ClassLabel,
                                                  nn::Mode, Rng&);
template SampleGradient<double> loss_and_gradients(const ParasNetD&, const TensorD&, ClassLabel,
                                                   nn::Mode, Rng&);

AdamState AdamState::for_params(const std::vector<Tensor>& params, const AdamConfig& config) {
  AdamState s;
  s.config = config;
  for (const auto& p : params) {
    s.m.emplace_back(p.shape());
    s.v.emplace_back(p.shape());
  }
  return s;
}

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ShapeError("adam_step: parameter, gradient and state tensor counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_shape(grads[i], params[i].shape(), "adam_step gradient");
    require_shape(state.m[i], params[i].shape(), "adam_step first moment");
    require_shape(state.v[i], params[i].shape(), "adam_step second moment");
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  const double lr = c.learning_rate * std::pow(c.decay, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    float* p = params[i].raw();
    float* m = state.m[i].raw();
    float* v = state.v[i].raw();
    const float* g = grads[i].raw();
    for (std::size_t e = 0; e < params[i].size(); ++e) {
      const double ge = g[e];
      const double me = c.beta1 * m[e] + (1.0 - c.beta1) * ge;
      const double ve = c.beta2 * v[e] + (1.0 - c.beta2) * ge * ge;
      m[e] = static_cast<float>(me);
      v[e] = static_cast<float>(ve);
      const double m_hat = me / bc1;
      const double v_hat = ve / bc2;
      p[e] = static_cast<float>(p[e] - lr * m_hat / (std::sqrt(v_hat) + c.epsilon));
    }
  }
}

void AugmentConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!(max_translation >= 0.0 && max_translation <= 0.5)) {
    throw std::invalid_argument("AugmentConfig: max_translation must lie in [0, 0.5]");
  }
  if (!prob(hflip_probability) || !prob(vflip_probability)) {
    throw std::invalid_argument("AugmentConfig: flip probabilities must lie in [0, 1]");
  }
  if (!(max_rotation_degrees >= 0.0 && max_rotation_degrees <= 180.0)) {
    throw std::invalid_argument("AugmentConfig: max_rotation_degrees must lie in [0, 180]");
  }
  if (!(zoom_lo > 0.0 && zoom_lo <= 1.0 && zoom_hi >= 1.0)) {
    throw std::invalid_argument("AugmentConfig: zoom range must contain 1.0");
  }
}

namespace {

void require_image(const Tensor& image, const char* what) {
  if (image.rank() != 3 || image.dim(2) != 1) {
    throw ShapeError(std::string(what) + ": expected h x w x 1 image, got " +
                     shape_to_string(image.shape()));
  }
}

// Nearest-neighbour resampling through an output -> source map about the centre.
template <typename Map>
Tensor resample(const Tensor& image, float fill, Map&& map) {
  const long h = static_cast<long>(image.dim(0)), w = static_cast<long>(image.dim(1));
  const double cy = 0.5 * (h - 1), cx = 0.5 * (w - 1);
  Tensor out(image.shape(), fill);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const auto [sy, sx] = map(y - cy, x - cx);
      const long iy = std::lround(sy + cy), ix = std::lround(sx + cx);
      if (iy >= 0 && iy < h && ix >= 0 && ix < w) out.at(y, x, 0) = image.at(iy, ix, 0);
    }
  }
  return out;
}

}  // namespace

Tensor flip_horizontal(const Tensor& image) {
  require_image(image, "flip_horizontal");
  const std::size_t h = image.dim(0), w = image.dim(1);
  Tensor out(image.shape());
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) out.at(y, x, 0) = image.at(y, w - 1 - x, 0);
  return out;
}

Tensor flip_vertical(const Tensor& image) {
  require_image(image, "flip_vertical");
  const std::size_t h = image.dim(0), w = image.dim(1);
  Tensor out(image.shape());
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) out.at(y, x, 0) = image.at(h - 1 - y, x, 0);
  return out;
}

Tensor translate(const Tensor& image, long dy, long dx, float fill) {
  require_image(image, "translate");
  const long h = static_cast<long>(image.dim(0)), w = static_cast<long>(image.dim(1));
  Tensor out(image.shape(), fill);
  for (long y = 0; y < h; ++y) {
    const long sy = y - dy;
    if (sy < 0 || sy >= h) continue;
    for (long x = 0; x < w; ++x) {
      const long sx = x - dx;
      if (sx >= 0 && sx < w) out.at(y, x, 0) = image.at(sy, sx, 0);
    }
  }
  return out;
}

Tensor rotate_nearest(const Tensor& image, double radians, float fill) {
  require_image(image, "rotate_nearest");
  const double c = std::cos(radians), s = std::sin(radians);
  return resample(image, fill, [c, s](double y, double x) {
    return std::pair{-s * x + c * y, c * x + s * y};
  });
}

Tensor zoom_nearest(const Tensor& image, double factor, float fill) {
  require_image(image, "zoom_nearest");
  if (!(factor > 0.0)) throw std::invalid_argument("zoom_nearest: factor must be positive");
  const double inv = 1.0 / factor;
  return resample(image, fill, [inv](double y, double x) { return std::pair{y * inv, x * inv}; });
}

float median_intensity(const Tensor& image) {
  std::vector<float> v(image.data().begin(), image.data().end());
  if (v.empty()) return 0.0f;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

Tensor augment(const Tensor& image, const AugmentConfig& cfg, Rng& rng) {
  require_image(image, "augment");
  if (!cfg.enabled) return image;
  cfg.validate();
  const double h = static_cast<double>(image.dim(0)), w = static_cast<double>(image.dim(1));
  const long dy = std::lround(rng.uniform(-cfg.max_translation, cfg.max_translation) * h);
  const long dx = std::lround(rng.uniform(-cfg.max_translation, cfg.max_translation) * w);
  const bool hflip = rng.bernoulli(cfg.hflip_probability);
  const bool vflip = rng.bernoulli(cfg.vflip_probability);
  const double angle = rng.uniform(-cfg.max_rotation_degrees, cfg.max_rotation_degrees) *
                       std::numbers::pi / 180.0;
  const double zoom = rng.uniform(cfg.zoom_lo, cfg.zoom_hi);

  const float fill = median_intensity(image);
  Tensor out = (dy != 0 || dx != 0) ? translate(image, dy, dx, fill) : image;
  if (hflip) out = flip_horizontal(out);
  if (vflip) out = flip_vertical(out);
  if (angle != 0.0) out = rotate_nearest(out, angle, fill);
  if (zoom != 1.0) out = zoom_nearest(out, zoom, fill);
  return out;
}

double TrainReport::best_accuracy() const {
  double best = 0.0;
  for (const auto& e : epochs) best = std::max(best, e.test_accuracy);
  return best;
}

TrainReport fit(ParasNet& model, const Dataset& train_set, const Dataset& test_set,
                const FitConfig& cfg, const EpochCallback& on_epoch) {
  if (train_set.empty()) throw std::invalid_argument("fit: empty training set");
  if (test_set.empty()) throw std::invalid_argument("fit: empty test set");
  if (cfg.batch_size == 0) throw std::invalid_argument("fit: batch size must be >= 1");
  const Shape input_shape{kInputHeight, kInputWidth, 1};
  for (const auto* set : {&train_set, &test_set}) {
    for (const auto& s : *set) require_shape(s.pixels, input_shape, s.source_id.c_str());
  }
  if (cfg.augment.enabled) cfg.augment.validate();

  constexpr std::uint64_t kShuffleStream = 0x5348;  // "SH"
  constexpr std::uint64_t kSampleStream = 0x534d;   // "SM"
  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  AdamState state = AdamState::for_params(model.params(), cfg.adam);
  TrainReport report;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(cfg.seed, {kShuffleStream, epoch}));
    shuffle_rng.shuffle(order.begin(), order.end());

    double loss_sum = 0.0;
    std::vector<SampleGradient<float>> per_sample(cfg.batch_size);
    std::vector<Tensor> mean_grads;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t b = std::min(cfg.batch_size, n - start);
      parallel_for(b, cfg.threads, [&](std::size_t i) {
        const auto& sample = train_set[order[start + i]];
        Rng rng(derive_seed(cfg.seed, {kSampleStream, epoch, start + i}));
        const Tensor image =
            cfg.augment.enabled ? augment(sample.pixels, cfg.augment, rng) : sample.pixels;
        per_sample[i] = loss_and_gradients(model, image, sample.label, nn::Mode::kTrain, rng);
      });
      // Fixed sample order with 64-bit accumulation: identical for any worker count.
      mean_grads.resize(model.params().size());
      std::vector<double> acc;
      for (std::size_t p = 0; p < model.params().size(); ++p) {
        const std::size_t len = model.params()[p].size();
        acc.assign(len, 0.0);
        for (std::size_t i = 0; i < b; ++i) {
          const float* g = per_sample[i].grads[p].raw();
          for (std::size_t e = 0; e < len; ++e) acc[e] += g[e];
        }
        mean_grads[p] = Tensor(model.params()[p].shape());
        for (std::size_t e = 0; e < len; ++e) {
          mean_grads[p][e] = static_cast<float>(acc[e] / static_cast<double>(b));
        }
      }
      adam_step(model.params(), mean_grads, state);
      for (std::size_t i = 0; i < b; ++i) loss_sum += per_sample[i].loss;
    }

    const ParasNetClassifier classifier(model);
    report.final_confusion = eval::evaluate(classifier, test_set, cfg.eval_batch_size, cfg.threads);
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.test_accuracy = report.final_confusion.overall_accuracy();
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (cfg.stop_at_accuracy && stats.test_accuracy >= *cfg.stop_at_accuracy) break;
  }
  return report;
}

void write_report_csv(const TrainReport& report, std::ostream& out) {
  out << "epoch,train_loss,test_accuracy,seconds\n";
  char line[128];
  for (const auto& e : report.epochs) {
    std::snprintf(line, sizeof(line), "%zu,%.6f,%.6f,%.3f\n", e.epoch, e.train_loss,
                  e.test_accuracy, e.seconds);
    out << line;
  }
}

}  // namespace parasnet::train
