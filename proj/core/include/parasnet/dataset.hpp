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
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "parasnet/classes.hpp"
#include "parasnet/tensor.hpp"

namespace parasnet {

/// Grayscale h x w x 1 image with values in [0, 1].
struct LabeledImage {
  Tensor pixels;
  ClassLabel label = ClassLabel::kOthers;
  std::string source_id;
};

using Dataset = std::vector<LabeledImage>;

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Recorded in <root>/manifest.txt next to the class directories.
struct DatasetManifest {
  std::string generator_version;
  std::uint64_t master_seed = 0;
  std::string split;
};

std::array<std::size_t, kNumClasses> class_counts(const Dataset& dataset);

/// 2x2 area-average downscale (odd trailing row/column dropped).
Tensor downscale_2x(const Tensor& image);

/// Layout: <root>/{others,crypto,giardia}/NNNNN.pgm, P5 maxval 255,
/// sample = round(value * 255).
void write_dataset(const Dataset& dataset, const std::filesystem::path& root,
                   const DatasetManifest& manifest);

/// Reads the layout written by write_dataset. Samples are divided by maxval;
/// 648x488 images are area-downscaled to 324x244. Any other size is rejected.
Dataset read_dataset(const std::filesystem::path& root);

}  // namespace parasnet
