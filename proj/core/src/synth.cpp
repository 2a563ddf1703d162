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

#include "parasnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <stdexcept>

#include "parasnet/parallel.hpp"

namespace parasnet::synth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_range(const Range& r, const char* name, double min_lo = 0.0) {
  if (!(r.lo <= r.hi) || r.lo < min_lo || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw std::invalid_argument(std::string("GenConfig: invalid range for ") + name + " [" +
                                std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]");
  }
}

// Shared per-sample placement: center, orientation and the elliptical radius.
struct Placement {
  double cx, cy;
  double cos_t, sin_t;
  double minor_scale;  // 1 / (1 - eccentricity)

  /// Elliptical radius and polar angle in the object's own frame.
  std::pair<double, double> polar(double x, double y) const {
    const double dx = x - cx, dy = y - cy;
    const double u = dx * cos_t + dy * sin_t;
    const double v = (-dx * sin_t + dy * cos_t) * minor_scale;
    return {std::sqrt(u * u + v * v), std::atan2(v, u)};
  }
};

Placement place(const GenConfig& cfg, double eccentricity, Rng& rng) {
  const double h = static_cast<double>(cfg.render_height());
  const double w = static_cast<double>(cfg.render_width());
  auto offset = [&](double extent) {
    const double mag = cfg.position_jitter.sample(rng) * extent;
    return rng.bernoulli(0.5) ? mag : -mag;
  };
  Placement p;
  p.cx = 0.5 * w + offset(w);
  p.cy = 0.5 * h + offset(h);
  const double theta = rng.uniform(0.0, std::numbers::pi);
  p.cos_t = std::cos(theta);
  p.sin_t = std::sin(theta);
  p.minor_scale = 1.0 / (1.0 - eccentricity);
  return p;
}

template <typename Profile>
void render_object(Tensor& img, const Placement& pl, Profile&& profile) {
  const std::size_t h = img.dim(0), w = img.dim(1);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto [r, phi] = pl.polar(static_cast<double>(x), static_cast<double>(y));
      img.at(y, x, 0) += static_cast<float>(profile(r, phi));
    }
  }
}

void render_crypto(Tensor& img, const GenConfig& cfg, double scale, double contrast, Rng& rng) {
  const double ecc = cfg.crypto_eccentricity.sample(rng);
  const double outer = cfg.crypto_band_radius.sample(rng) * scale;
  const double inner = outer * (1.0 - cfg.crypto_band_width.sample(rng));
  const double fringes = cfg.crypto_fringe_count.sample(rng);
  const double period = cfg.crypto_fringe_period.sample(rng) * scale;
  // Band and dark-disk densities flicker independently.
  const double band_amp = contrast * rng.uniform(0.3, 1.2);
  const double dark_amp = contrast * rng.uniform(0.3, 1.4);
  const double fringe_amp = 0.5 * contrast * rng.uniform(0.6, 1.0);
  const double edge = 1.5 * scale;
  const double reach = fringes * period;
  const Placement pl = place(cfg, ecc, rng);
  render_object(img, pl, [&](double r, double) {
    const double disk = logistic((inner - r) / edge);
    const double band = logistic((r - inner) / edge) * logistic((outer - r) / edge);
    double v = band_amp * band - dark_amp * disk;
    const double t = r - outer;
    if (t > 0.0 && t < reach) v += fringe_amp * std::cos(kTwoPi * t / period) * (1.0 - t / reach);
    return v;
  });
}

void render_giardia(Tensor& img, const GenConfig& cfg, double scale, double contrast, Rng& rng) {
  const double ecc = cfg.giardia_eccentricity.sample(rng);
  const double core = cfg.giardia_core_radius.sample(rng) * scale;
  const double fringes = cfg.giardia_fringe_count.sample(rng);
  const double period = cfg.giardia_fringe_period.sample(rng) * scale;
  const double core_amp = contrast * rng.uniform(0.4, 0.8);
  const double fringe_amp = contrast * rng.uniform(0.7, 1.1);
  // Fringe phase winds with the polar angle, so fringes run at varying
  // orientations rather than as clean rings.
  const double arms = static_cast<double>(1 + rng.below(3));
  const double phase = rng.uniform(0.0, kTwoPi);
  const double edge = 1.5 * scale;
  const double reach = fringes * period;
  const Placement pl = place(cfg, ecc, rng);
  render_object(img, pl, [&](double r, double phi) {
    double v = -core_amp * logistic((core - r) / edge);
    const double t = r - core;
    if (t > 0.0 && t < reach) {
      v += fringe_amp * std::cos(kTwoPi * t / period + arms * phi + phase) * (1.0 - t / reach);
    }
    return v;
  });
}

void render_others(Tensor& img, double scale, double contrast, Rng& rng) {
  const std::size_t h = img.dim(0), w = img.dim(1);
  // Speckle: coarse Gaussian lattice, bilinearly interpolated.
  const double cell = rng.uniform(5.0, 10.0) * scale;
  const std::size_t gh = static_cast<std::size_t>(std::ceil(h / cell)) + 2;
  const std::size_t gw = static_cast<std::size_t>(std::ceil(w / cell)) + 2;
  std::vector<double> lattice(gh * gw);
  for (double& v : lattice) v = rng.normal();
  const double speckle_amp = 0.5 * contrast * rng.uniform(0.5, 1.0);
  for (std::size_t y = 0; y < h; ++y) {
    const double gy = y / cell;
    const auto y0 = static_cast<std::size_t>(gy);
    const double fy = gy - static_cast<double>(y0);
    for (std::size_t x = 0; x < w; ++x) {
      const double gx = x / cell;
      const auto x0 = static_cast<std::size_t>(gx);
      const double fx = gx - static_cast<double>(x0);
      const double a = lattice[y0 * gw + x0], b = lattice[y0 * gw + x0 + 1];
      const double c = lattice[(y0 + 1) * gw + x0], d = lattice[(y0 + 1) * gw + x0 + 1];
      const double v = (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
      img.at(y, x, 0) += static_cast<float>(speckle_amp * v);
    }
  }
  const auto blobs = 1 + rng.below(4);
  for (std::uint64_t k = 0; k < blobs; ++k) {
    const double bx = rng.uniform(0.0, static_cast<double>(w));
    const double by = rng.uniform(0.0, static_cast<double>(h));
    const double sigma = rng.uniform(4.0, 20.0) * scale;
    const double amp = contrast * rng.uniform(0.3, 0.8) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    const double reach = 4.0 * sigma;
    const auto ylo = static_cast<std::size_t>(std::max(0.0, by - reach));
    const auto yhi = static_cast<std::size_t>(std::min<double>(h, by + reach));
    const auto xlo = static_cast<std::size_t>(std::max(0.0, bx - reach));
    const auto xhi = static_cast<std::size_t>(std::min<double>(w, bx + reach));
    for (std::size_t y = ylo; y < yhi; ++y)
      for (std::size_t x = xlo; x < xhi; ++x) {
        const double dx = x - bx, dy = y - by;
        img.at(y, x, 0) += static_cast<float>(amp * std::exp(-(dx * dx + dy * dy) * inv));
      }
  }
}

}  // namespace

GenConfig GenConfig::full_scale() {
  GenConfig cfg;
  cfg.train_per_class = {5000, 5000, 5000};
  cfg.test_per_class = {1000, 1000, 1000};
  return cfg;
}

void GenConfig::validate() const {
  if (height < 32 || width < 32) throw std::invalid_argument("GenConfig: image too small");
  check_range(crypto_band_radius, "crypto_band_radius", 1.0);
  check_range(crypto_band_width, "crypto_band_width");
  if (crypto_band_width.hi >= 1.0) throw std::invalid_argument("GenConfig: crypto_band_width must be < 1");
  check_range(crypto_eccentricity, "crypto_eccentricity");
  check_range(giardia_eccentricity, "giardia_eccentricity");
  if (crypto_eccentricity.hi >= 1.0 || giardia_eccentricity.hi >= 1.0) {
    throw std::invalid_argument("GenConfig: eccentricity must be < 1");
  }
  check_range(crypto_fringe_count, "crypto_fringe_count");
  check_range(crypto_fringe_period, "crypto_fringe_period", 1.0);
  check_range(giardia_core_radius, "giardia_core_radius");
  check_range(giardia_fringe_count, "giardia_fringe_count");
  check_range(giardia_fringe_period, "giardia_fringe_period", 1.0);
  if (!(giardia_fringe_period.hi < crypto_fringe_period.lo)) {
    throw std::invalid_argument(
        "GenConfig: giardia fringe periods must lie strictly below crypto fringe periods");
  }
  if (!(giardia_fringe_count.lo > crypto_fringe_count.hi)) {
    throw std::invalid_argument("GenConfig: giardia must have more fringes than crypto");
  }
  check_range(contrast, "contrast");
  check_range(background, "background");
  if (background.hi > 1.0) throw std::invalid_argument("GenConfig: background must be <= 1");
  check_range(noise_amplitude, "noise_amplitude");
  check_range(position_jitter, "position_jitter");
  if (position_jitter.hi > 0.5) throw std::invalid_argument("GenConfig: position_jitter must be <= 0.5");
}

LabeledImage gen_sample(ClassLabel label, const GenConfig& cfg, Rng& rng) {
  const auto ci = class_index(label);
  if (ci >= kNumClasses) throw std::invalid_argument("gen_sample: invalid class");
  const std::size_t h = cfg.render_height(), w = cfg.render_width();
  const double scale = cfg.full_resolution ? 2.0 : 1.0;

  const double bg = cfg.background.sample(rng);
  const double contrast = cfg.contrast.sample(rng);
  double noise = cfg.noise_amplitude.sample(rng);
  // Weak illumination gradient shared by every class.
  const double slope_x = rng.uniform(-0.05, 0.05) / static_cast<double>(w);
  const double slope_y = rng.uniform(-0.05, 0.05) / static_cast<double>(h);

  Tensor img({h, w, 1});
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      img.at(y, x, 0) = static_cast<float>(bg + slope_x * (x - 0.5 * w) + slope_y * (y - 0.5 * h));

  switch (label) {
    case ClassLabel::kCrypto: render_crypto(img, cfg, scale, contrast, rng); break;
    case ClassLabel::kGiardia: render_giardia(img, cfg, scale, contrast, rng); break;
    case ClassLabel::kOthers:
      render_others(img, scale, contrast, rng);
      noise *= rng.uniform(1.0, 1.6);
      break;
  }
  for (float& v : img.data()) {
    v = static_cast<float>(std::clamp(v + noise * rng.normal(), 0.0, 1.0));
  }
  return {std::move(img), label, {}};
}

std::uint64_t sample_seed(const GenConfig& cfg, Split split, ClassLabel label, std::size_t index) {
  return derive_seed(cfg.seed, {static_cast<std::uint64_t>(split), class_index(label), index});
}

Dataset gen_split(const GenConfig& cfg, Split split, std::size_t threads) {
  cfg.validate();
  const auto& counts = split == Split::kTrain ? cfg.train_per_class : cfg.test_per_class;
  std::vector<std::pair<ClassLabel, std::size_t>> jobs;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (counts[c] == 0) throw std::invalid_argument("GenConfig: per-class counts must be >= 1");
    for (std::size_t i = 0; i < counts[c]; ++i) jobs.emplace_back(class_from_index(c), i);
  }
  Dataset out(jobs.size());
  const char* split_name = split == Split::kTrain ? "train" : "test";
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const auto [label, index] = jobs[j];
    Rng rng(sample_seed(cfg, split, label, index));
    out[j] = gen_sample(label, cfg, rng);
    out[j].source_id = std::string("gen:") + split_name + ":" +
                       std::string(kClassDirNames[class_index(label)]) + ":" + std::to_string(index);
  });
  return out;
}

std::pair<Dataset, Dataset> gen_dataset(const GenConfig& cfg, std::size_t threads) {
  return {gen_split(cfg, Split::kTrain, threads), gen_split(cfg, Split::kTest, threads)};
}

}  // namespace parasnet::synth
