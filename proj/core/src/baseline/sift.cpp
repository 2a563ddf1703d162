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


#include "parasnet/baseline/sift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace parasnet::baseline {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kBorder = 5;
constexpr int kMaxRefineSteps = 5;
constexpr int kOrientationBins = 36;
constexpr double kOrientationSigmaFactor = 1.5;
constexpr int kDescCells = 4;
constexpr int kDescBins = 8;
constexpr double kDescCellFactor = 3.0;
constexpr double kDescClip = 0.2;

// Bilinear 2x upsampling on the grid x_in = x_out / 2.
Plane upsample(const Plane& in) {
  Plane out(2 * in.height(), 2 * in.width());
  for (std::size_t y = 0; y < out.height(); ++y) {
    const long y0 = static_cast<long>(y / 2);
    const double fy = (y % 2) ? 0.5 : 0.0;
    for (std::size_t x = 0; x < out.width(); ++x) {
      const long x0 = static_cast<long>(x / 2);
      const double fx = (x % 2) ? 0.5 : 0.0;
      const double top = in.clamped(y0, x0) * (1.0 - fx) + in.clamped(y0, x0 + 1) * fx;
      const double bottom = in.clamped(y0 + 1, x0) * (1.0 - fx) + in.clamped(y0 + 1, x0 + 1) * fx;
      out(y, x) = top * (1.0 - fy) + bottom * fy;
    }
  }
  return out;
}

Plane downsample(const Plane& in) {
  Plane out(in.height() / 2, in.width() / 2);
  for (std::size_t y = 0; y < out.height(); ++y)
    for (std::size_t x = 0; x < out.width(); ++x) out(y, x) = in(2 * y, 2 * x);
  return out;
}

// Solves the 3x3 system h * x = b by Gaussian elimination with partial
// pivoting; false when singular.
bool solve3(std::array<std::array<double, 3>, 3> h, std::array<double, 3> b,
            std::array<double, 3>& x) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(h[r][col]) > std::abs(h[piv][col])) piv = r;
    if (std::abs(h[piv][col]) < 1e-12) return false;
    std::swap(h[col], h[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = h[r][col] / h[col][col];
      for (int c = col; c < 3; ++c) h[r][c] -= f * h[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= h[r][c] * x[c];
    x[r] = s / h[r][r];
  }
  return true;
}

bool is_extremum(const std::vector<Plane>& dog, std::size_t l, std::size_t y, std::size_t x) {
  const double v = dog[l](y, x);
  const bool is_max = v > 0.0;
  for (std::size_t dl = l - 1; dl <= l + 1; ++dl)
    for (std::size_t yy = y - 1; yy <= y + 1; ++yy)
      for (std::size_t xx = x - 1; xx <= x + 1; ++xx) {
        if (dl == l && yy == y && xx == x) continue;
        const double n = dog[dl](yy, xx);
        if (is_max ? n >= v : n <= v) return false;
      }
  return true;
}

double dominant_orientation(const Plane& g, double cx, double cy, double sigma) {
  const double sw = kOrientationSigmaFactor * sigma;
  const int radius = static_cast<int>(std::lround(3.0 * sw));
  const long px = std::lround(cx), py = std::lround(cy);
  std::array<double, kOrientationBins> hist{};
  for (int i = -radius; i <= radius; ++i) {
    const long y = py + i;
    if (y < 1 || y >= static_cast<long>(g.height()) - 1) continue;
    for (int j = -radius; j <= radius; ++j) {
      const long x = px + j;
      if (x < 1 || x >= static_cast<long>(g.width()) - 1) continue;
      const double dx = g(y, x + 1) - g(y, x - 1);
      const double dy = g(y + 1, x) - g(y - 1, x);
      const double w = std::exp(-(i * i + j * j) / (2.0 * sw * sw));
      double theta = std::atan2(dy, dx);
      if (theta < 0.0) theta += kTwoPi;
      int bin = static_cast<int>(std::lround(theta / kTwoPi * kOrientationBins)) % kOrientationBins;
      hist[bin] += w * std::hypot(dx, dy);
    }
  }
  std::array<double, kOrientationBins> smooth{};
  for (int b = 0; b < kOrientationBins; ++b) {
    auto at = [&](int k) { return hist[(b + k + kOrientationBins) % kOrientationBins]; };
    smooth[b] = (at(-2) + at(2)) / 16.0 + 4.0 * (at(-1) + at(1)) / 16.0 + 6.0 * at(0) / 16.0;
  }
  const int peak = static_cast<int>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  const double l = smooth[(peak + kOrientationBins - 1) % kOrientationBins];
  const double r = smooth[(peak + 1) % kOrientationBins];
  const double denom = l - 2.0 * smooth[peak] + r;
  const double offset = denom != 0.0 ? 0.5 * (l - r) / denom : 0.0;
  double theta = (peak + offset) * kTwoPi / kOrientationBins;
  theta = std::fmod(theta, kTwoPi);
  return theta < 0.0 ? theta + kTwoPi : theta;
}

}  // namespace

Plane Plane::from_tensor(const Tensor& image) {
  if (image.rank() != 3 || image.dim(2) != 1) {
    throw ShapeError("Plane: expected h x w x 1 image, got " + shape_to_string(image.shape()));
  }
  Plane p(image.dim(0), image.dim(1));
  for (std::size_t i = 0; i < image.size(); ++i) p.v_[i] = image[i];
  return p;
}

double Plane::clamped(long y, long x) const {
  y = std::clamp<long>(y, 0, static_cast<long>(h_) - 1);
  x = std::clamp<long>(x, 0, static_cast<long>(w_) - 1);
  return v_[static_cast<std::size_t>(y) * w_ + static_cast<std::size_t>(x)];
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

Plane gaussian_blur(const Plane& in, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const long r = static_cast<long>(k.size() / 2);
  const std::size_t h = in.height(), w = in.width();
  Plane tmp(h, w), out(h, w);
  std::vector<double> row(w + 2 * r);
  for (std::size_t y = 0; y < h; ++y) {
    for (long x = -r; x < static_cast<long>(w) + r; ++x) row[x + r] = in.clamped(static_cast<long>(y), x);
    for (std::size_t x = 0; x < w; ++x) {
      double s = 0.0;
      for (std::size_t t = 0; t < k.size(); ++t) s += k[t] * row[x + t];
      tmp(y, x) = s;
    }
  }
  for (std::size_t y = 0; y < h; ++y) {
    double* o = &out(y, 0);
    for (std::size_t t = 0; t < k.size(); ++t) {
      const long yy = std::clamp<long>(static_cast<long>(y) + static_cast<long>(t) - r, 0,
                                       static_cast<long>(h) - 1);
      const double* src = &tmp(static_cast<std::size_t>(yy), 0);
      const double kt = k[t];
      for (std::size_t x = 0; x < w; ++x) o[x] += kt * src[x];
    }
  }
  return out;
}

Plane preprocess(const Plane& in) {
  Plane out = gaussian_blur(in, 1.0);
  const auto [lo, hi] = std::minmax_element(out.values().begin(), out.values().end());
  const double min = *lo, span = *hi - *lo;
  for (double& v : out.values()) v = span > 1e-12 ? (v - min) / span : 0.5;
  return out;
}

double ScaleSpace::layer_sigma(double layer) {
  return kBaseSigma * std::pow(2.0, layer / static_cast<double>(kScalesPerOctave));
}

double ScaleSpace::stride(int octave) { return std::ldexp(1.0, octave - 1); }

ScaleSpace::ScaleSpace(const Plane& image) {
  if (image.height() < kMinImageSide || image.width() < kMinImageSide) {
    throw std::invalid_argument("SIFT: image must be at least 32x32, got " +
                                std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
  constexpr std::size_t layers = kScalesPerOctave + 3;
  const double input_blur = 2.0 * kAssumedBlur;
  Plane base = gaussian_blur(upsample(image),
                             std::sqrt(kBaseSigma * kBaseSigma - input_blur * input_blur));
  while (true) {
    std::vector<Plane> g{base};
    for (std::size_t i = 1; i < layers; ++i) {
      const double prev = layer_sigma(static_cast<double>(i - 1));
      const double cur = layer_sigma(static_cast<double>(i));
      g.push_back(gaussian_blur(g.back(), std::sqrt(cur * cur - prev * prev)));
    }
    std::vector<Plane> d;
    for (std::size_t i = 0; i + 1 < layers; ++i) {
      Plane diff(g[i].height(), g[i].width());
      for (std::size_t e = 0; e < diff.values().size(); ++e) {
        diff.values()[e] = g[i + 1].values()[e] - g[i].values()[e];
      }
      d.push_back(std::move(diff));
    }
    const Plane next_base = downsample(g[kScalesPerOctave]);
    gauss_.push_back(std::move(g));
    dog_.push_back(std::move(d));
    if (std::min(next_base.height(), next_base.width()) < kMinOctaveSide) break;
    base = next_base;
  }
}

std::vector<Keypoint> detect_keypoints(const ScaleSpace& space, const SiftConfig& cfg) {
  std::vector<Keypoint> out;
  const double prefilter = 0.5 * cfg.contrast_threshold;
  const double edge_limit = (cfg.edge_ratio + 1.0) * (cfg.edge_ratio + 1.0) / cfg.edge_ratio;
  for (std::size_t o = 0; o < space.octaves(); ++o) {
    const std::vector<Plane>& dog = space.dog_octave(o);
    const long h = static_cast<long>(dog[0].height()), w = static_cast<long>(dog[0].width());
    for (std::size_t l0 = 1; l0 <= kScalesPerOctave; ++l0) {
      for (long y0 = kBorder; y0 < h - kBorder; ++y0) {
        for (long x0 = kBorder; x0 < w - kBorder; ++x0) {
          if (std::abs(dog[l0](y0, x0)) < prefilter || !is_extremum(dog, l0, y0, x0)) continue;

          long x = x0, y = y0;
          long l = static_cast<long>(l0);
          std::array<double, 3> off{}, grad{};
          bool converged = false;
          for (int step = 0; step < kMaxRefineSteps; ++step) {
            const Plane& c = dog[l];
            const Plane& p = dog[l - 1];
            const Plane& n = dog[l + 1];
            const double v2 = 2.0 * c(y, x);
            grad = {0.5 * (c(y, x + 1) - c(y, x - 1)), 0.5 * (c(y + 1, x) - c(y - 1, x)),
                    0.5 * (n(y, x) - p(y, x))};
            const double dxx = c(y, x + 1) + c(y, x - 1) - v2;
            const double dyy = c(y + 1, x) + c(y - 1, x) - v2;
            const double dss = n(y, x) + p(y, x) - v2;
            const double dxy = 0.25 * (c(y + 1, x + 1) - c(y + 1, x - 1) - c(y - 1, x + 1) + c(y - 1, x - 1));
            const double dxs = 0.25 * (n(y, x + 1) - n(y, x - 1) - p(y, x + 1) + p(y, x - 1));
            const double dys = 0.25 * (n(y + 1, x) - n(y - 1, x) - p(y + 1, x) + p(y - 1, x));
            std::array<double, 3> sol{};
            if (!solve3({{{dxx, dxy, dxs}, {dxy, dyy, dys}, {dxs, dys, dss}}},
                        {-grad[0], -grad[1], -grad[2]}, sol)) {
              break;
            }
            off = sol;
            if (std::abs(off[0]) < 0.5 && std::abs(off[1]) < 0.5 && std::abs(off[2]) < 0.5) {
              converged = true;
              break;
            }
            x += std::lround(off[0]);
            y += std::lround(off[1]);
            l += std::lround(off[2]);
            if (l < 1 || l > static_cast<long>(kScalesPerOctave) || x < kBorder || x >= w - kBorder ||
                y < kBorder || y >= h - kBorder) {
              break;
            }
          }
          if (!converged) continue;

          const Plane& c = dog[l];
          const double response =
              c(y, x) + 0.5 * (grad[0] * off[0] + grad[1] * off[1] + grad[2] * off[2]);
          if (std::abs(response) < cfg.contrast_threshold) continue;
          const double dxx = c(y, x + 1) + c(y, x - 1) - 2.0 * c(y, x);
          const double dyy = c(y + 1, x) + c(y - 1, x) - 2.0 * c(y, x);
          const double dxy = 0.25 * (c(y + 1, x + 1) - c(y + 1, x - 1) - c(y - 1, x + 1) + c(y - 1, x - 1));
          const double tr = dxx + dyy, det = dxx * dyy - dxy * dxy;
          if (det <= 0.0 || tr * tr / det >= edge_limit) continue;

          const double stride = ScaleSpace::stride(static_cast<int>(o));
          const double sigma_oct = ScaleSpace::layer_sigma(static_cast<double>(l) + off[2]);
          Keypoint kp;
          kp.x = (static_cast<double>(x) + off[0]) * stride;
          kp.y = (static_cast<double>(y) + off[1]) * stride;
          kp.scale = sigma_oct * stride;
          kp.response = response;
          kp.octave = static_cast<int>(o);
          kp.layer = static_cast<int>(l);
          kp.orientation = dominant_orientation(space.gaussian(o, static_cast<std::size_t>(l)),
                                                static_cast<double>(x) + off[0],
                                                static_cast<double>(y) + off[1], sigma_oct);
          out.push_back(kp);
        }
      }
    }
  }
  if (cfg.max_keypoints != 0 && out.size() > cfg.max_keypoints) {
    std::stable_sort(out.begin(), out.end(), [](const Keypoint& a, const Keypoint& b) {
      return std::abs(a.response) > std::abs(b.response);
    });
    out.resize(cfg.max_keypoints);
  }
  return out;
}

std::vector<Keypoint> detect_keypoints(const Plane& image, const SiftConfig& cfg) {
  return detect_keypoints(ScaleSpace(image), cfg);
}

Descriptor compute_descriptor(const ScaleSpace& space, const Keypoint& kp) {
  if (kp.octave < 0 || static_cast<std::size_t>(kp.octave) >= space.octaves() || kp.layer < 0 ||
      static_cast<std::size_t>(kp.layer) > kScalesPerOctave + 2) {
    throw std::invalid_argument("compute_descriptor: keypoint octave/layer outside the scale space");
  }
  const Plane& g = space.gaussian(static_cast<std::size_t>(kp.octave), static_cast<std::size_t>(kp.layer));
  const double stride = ScaleSpace::stride(kp.octave);
  const double cx = kp.x / stride, cy = kp.y / stride;
  const double sigma = kp.scale / stride;
  const double cell = kDescCellFactor * sigma;
  const long h = static_cast<long>(g.height()), w = static_cast<long>(g.width());
  long radius = std::lround(cell * std::numbers::sqrt2 * (kDescCells + 1) * 0.5);
  radius = std::min<long>(radius, static_cast<long>(std::hypot(h, w)));
  const double cos_t = std::cos(kp.orientation) / cell, sin_t = std::sin(kp.orientation) / cell;
  const long px = std::lround(cx), py = std::lround(cy);

  constexpr int kGrid = kDescCells + 2;
  double hist[kGrid][kGrid][kDescBins + 2] = {};
  for (long i = -radius; i <= radius; ++i) {
    const long y = py + i;
    if (y < 1 || y >= h - 1) continue;
    for (long j = -radius; j <= radius; ++j) {
      const long x = px + j;
      if (x < 1 || x >= w - 1) continue;
      // Offset rotated into the keypoint frame, in cell units.
      const double xr = j * cos_t + i * sin_t;
      const double yr = -j * sin_t + i * cos_t;
      const double rbin = yr + kDescCells / 2.0 - 0.5;
      const double cbin = xr + kDescCells / 2.0 - 0.5;
      if (rbin <= -1.0 || rbin >= kDescCells || cbin <= -1.0 || cbin >= kDescCells) continue;
      const double dx = g(y, x + 1) - g(y, x - 1);
      const double dy = g(y + 1, x) - g(y - 1, x);
      const double weight = std::exp(-(xr * xr + yr * yr) / (0.5 * kDescCells * kDescCells));
      const double mag = std::hypot(dx, dy) * weight;
      double theta = std::atan2(dy, dx) - kp.orientation;
      theta = std::fmod(theta, kTwoPi);
      if (theta < 0.0) theta += kTwoPi;
      const double obin = theta * kDescBins / kTwoPi;

      const int r0 = static_cast<int>(std::floor(rbin));
      const int c0 = static_cast<int>(std::floor(cbin));
      const int o0 = static_cast<int>(std::floor(obin));
      const double fr = rbin - r0, fc = cbin - c0, fo = obin - o0;
      for (int a = 0; a < 2; ++a) {
        const double wr = a ? fr : 1.0 - fr;
        for (int b = 0; b < 2; ++b) {
          const double wc = b ? fc : 1.0 - fc;
          for (int c = 0; c < 2; ++c) {
            const double wo = c ? fo : 1.0 - fo;
            hist[r0 + 1 + a][c0 + 1 + b][(o0 + c) % kDescBins] += mag * wr * wc * wo;
          }
        }
      }
    }
  }

  Descriptor d{};
  std::size_t k = 0;
  for (int r = 1; r <= kDescCells; ++r)
    for (int c = 1; c <= kDescCells; ++c)
      for (int o = 0; o < kDescBins; ++o) d[k++] = hist[r][c][o];
  auto normalize = [&d] {
    double n = 0.0;
    for (double v : d) n += v * v;
    n = std::sqrt(n);
    if (n > 0.0) {
      for (double& v : d) v /= n;
    } else {
      d.fill(1.0 / std::sqrt(static_cast<double>(d.size())));
    }
  };
  normalize();
  for (double& v : d) v = std::min(v, kDescClip);
  normalize();
  return d;
}

Descriptor compute_descriptor(const Plane& image, const Keypoint& kp) {
  return compute_descriptor(ScaleSpace(image), kp);
}

Features extract_features(const Tensor& image, const SiftConfig& cfg) {
  const ScaleSpace space(preprocess(Plane::from_tensor(image)));
  Features f;
  f.keypoints = detect_keypoints(space, cfg);
  f.descriptors.reserve(f.keypoints.size());
  for (const auto& kp : f.keypoints) f.descriptors.push_back(compute_descriptor(space, kp));
  return f;
}

}  // namespace parasnet::baseline
