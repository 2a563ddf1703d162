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


// Scale-invariant keypoints and 128-d descriptors on single-channel images.
//
// Scale space: 3 scales per octave, base sigma 1.6, the input assumed to carry
// a blur of 0.5 and not upsampled. Octaves halve the image until the shorter
// side would drop below 16 pixels.

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "parasnet/tensor.hpp"

namespace parasnet::baseline {

/// Row-major double-precision grey plane.
class Plane {
 public:
  Plane() = default;
  Plane(std::size_t height, std::size_t width, double value = 0.0)
      : h_(height), w_(width), v_(height * width, value) {}

  static Plane from_tensor(const Tensor& image);

  std::size_t height() const noexcept { return h_; }
  std::size_t width() const noexcept { return w_; }
  double& operator()(std::size_t y, std::size_t x) { return v_[y * w_ + x]; }
  double operator()(std::size_t y, std::size_t x) const { return v_[y * w_ + x]; }
  /// Edge-replicating access.
  double clamped(long y, long x) const;
  std::vector<double>& values() noexcept { return v_; }
  const std::vector<double>& values() const noexcept { return v_; }

 private:
  std::size_t h_ = 0;
  std::size_t w_ = 0;
  std::vector<double> v_;
};

/// Normalized 1-D Gaussian taps, radius ceil(4 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable blur (rows then columns) with edge replication.
Plane gaussian_blur(const Plane& in, double sigma);

/// Sigma-1 smoothing followed by a linear stretch to [0, 1]; a constant image
/// maps to 0.5 everywhere.
Plane preprocess(const Plane& in);

struct Keypoint {
  double x = 0.0;  // input-image pixels
  double y = 0.0;
  double scale = 0.0;        // sigma in input-image pixels
  double orientation = 0.0;  // radians in [0, 2 pi)
  double response = 0.0;     // interpolated DoG value
  int octave = 0;  // index into the scale space; octave 0 is the upsampled image
  int layer = 0;
};

using Descriptor = std::array<double, 128>;

struct SiftConfig {
  double contrast_threshold = 0.03;
  double edge_ratio = 10.0;
  /// Keep at most this many keypoints per image (strongest |response|); 0 = all.
  std::size_t max_keypoints = 0;
};

inline constexpr std::size_t kScalesPerOctave = 3;
inline constexpr double kBaseSigma = 1.6;
inline constexpr double kAssumedBlur = 0.5;
inline constexpr std::size_t kMinImageSide = 32;
inline constexpr std::size_t kMinOctaveSide = 16;

/// Gaussian and difference-of-Gaussian pyramids. The input is first upsampled
/// by two, so octave o samples the input every 2^(o-1) pixels.
class ScaleSpace {
 public:
  explicit ScaleSpace(const Plane& image);

  std::size_t octaves() const noexcept { return gauss_.size(); }
  const Plane& gaussian(std::size_t octave, std::size_t layer) const { return gauss_[octave][layer]; }
  const Plane& dog(std::size_t octave, std::size_t layer) const { return dog_[octave][layer]; }
  const std::vector<Plane>& dog_octave(std::size_t octave) const { return dog_[octave]; }
  /// Sigma of a Gaussian layer relative to its own octave's sampling grid.
  static double layer_sigma(double layer);
  /// Input-image pixels per sample in the given octave.
  static double stride(int octave);

 private:
  std::vector<std::vector<Plane>> gauss_;
  std::vector<std::vector<Plane>> dog_;
};

/// DoG extrema with subpixel refinement, contrast and edge rejection, and a
/// single dominant orientation. Throws std::invalid_argument if the image is
/// smaller than 32x32.
std::vector<Keypoint> detect_keypoints(const ScaleSpace& space, const SiftConfig& cfg = {});
std::vector<Keypoint> detect_keypoints(const Plane& image, const SiftConfig& cfg = {});

/// 4x4 cells x 8 orientation bins, rotated to the keypoint orientation,
/// normalized, clipped at 0.2 and renormalized.
Descriptor compute_descriptor(const ScaleSpace& space, const Keypoint& kp);
Descriptor compute_descriptor(const Plane& image, const Keypoint& kp);

struct Features {
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;
};

/// preprocess -> scale space -> keypoints -> descriptors.
Features extract_features(const Tensor& image, const SiftConfig& cfg = {});

}  // namespace parasnet::baseline
