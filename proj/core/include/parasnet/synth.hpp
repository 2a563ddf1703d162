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

// Procedural three-class scattering-image generator.
//
//   Crypto  - bright elliptical grey band around a dark disk, followed by a
//             few widely spaced outer fringes. Band/disk density flickers and
//             the band may be a circle or an ellipse.
//   Giardia - oval concentric fringe pattern with many closely spaced rings.
//   Others  - speckle background plus a few low-contrast blobs.
//
// All geometry is given in pixels at 324x244; full-resolution rendering
// scales it by two.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include "parasnet/dataset.hpp"
#include "parasnet/rng.hpp"

namespace parasnet::synth {

inline constexpr const char* kGeneratorVersion = "parasnet-synth-1";

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double sample(Rng& rng) const { return rng.uniform(lo, hi); }
};

struct GenConfig {
  std::size_t height = 244;
  std::size_t width = 324;
  bool full_resolution = false;  // render 488x648 instead

  std::array<std::size_t, kNumClasses> train_per_class{300, 300, 300};
  std::array<std::size_t, kNumClasses> test_per_class{100, 100, 100};

  Range crypto_band_radius{26.0, 46.0};
  Range crypto_band_width{0.25, 0.45};  // fraction of the band radius
  Range crypto_eccentricity{0.0, 0.35};
  Range crypto_fringe_count{2.0, 4.0};
  Range crypto_fringe_period{13.0, 20.0};
  Range giardia_core_radius{10.0, 18.0};
  Range giardia_eccentricity{0.2, 0.5};
  Range giardia_fringe_count{6.0, 10.0};
  Range giardia_fringe_period{5.5, 9.0};
  Range contrast{0.06, 0.35};
  Range background{0.35, 0.6};
  Range noise_amplitude{0.02, 0.06};
  Range position_jitter{0.0, 0.22};  // fraction of each image axis

  std::uint64_t seed = 7;

  /// 5000 train / 1000 test images per class.
  static GenConfig full_scale();

  /// Throws std::invalid_argument on degenerate or misordered ranges.
  void validate() const;

  std::size_t render_height() const { return full_resolution ? 2 * height : height; }
  std::size_t render_width() const { return full_resolution ? 2 * width : width; }
};

enum class Split : std::uint64_t { kTrain = 0, kTest = 1 };

LabeledImage gen_sample(ClassLabel label, const GenConfig& cfg, Rng& rng);

/// Seed of the stream that renders sample `index` of `label` in `split`.
std::uint64_t sample_seed(const GenConfig& cfg, Split split, ClassLabel label, std::size_t index);

/// Samples are ordered by class, then index. Each sample has its own stream,
/// so the result does not depend on `threads`.
Dataset gen_split(const GenConfig& cfg, Split split, std::size_t threads = 0);

std::pair<Dataset, Dataset> gen_dataset(const GenConfig& cfg, std::size_t threads = 0);

}  // namespace parasnet::synth
