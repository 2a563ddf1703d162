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

#include "parasnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "parasnet/model.hpp"
#include "parasnet/pgm.hpp"

namespace fs = std::filesystem;

namespace parasnet {

std::array<std::size_t, kNumClasses> class_counts(const Dataset& dataset) {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& s : dataset) ++counts[class_index(s.label)];
  return counts;
}

Tensor downscale_2x(const Tensor& image) {
  if (image.rank() != 3 || image.dim(0) < 2 || image.dim(1) < 2) {
    throw ShapeError("downscale_2x: expected h x w x c with h, w >= 2, got " +
                     shape_to_string(image.shape()));
  }
  const std::size_t oh = image.dim(0) / 2, ow = image.dim(1) / 2, ch = image.dim(2);
  Tensor out({oh, ow, ch});
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x)
      for (std::size_t c = 0; c < ch; ++c) {
        const float s = image.at(2 * y, 2 * x, c) + image.at(2 * y, 2 * x + 1, c) +
                        image.at(2 * y + 1, 2 * x, c) + image.at(2 * y + 1, 2 * x + 1, c);
        out.at(y, x, c) = 0.25f * s;
      }
  return out;
}

void write_dataset(const Dataset& dataset, const fs::path& root, const DatasetManifest& manifest) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw DatasetError("cannot create " + root.string() + ": " + ec.message());
  for (auto name : kClassDirNames) {
    fs::create_directories(root / std::string(name), ec);
    if (ec) throw DatasetError("cannot create class directory " + std::string(name));
  }
  std::array<std::size_t, kNumClasses> next{};
  for (const auto& s : dataset) {
    if (s.pixels.rank() != 3 || s.pixels.dim(2) != 1) {
      throw DatasetError("write_dataset: " + s.source_id + " is not single-channel");
    }
    PgmImage img;
    img.height = s.pixels.dim(0);
    img.width = s.pixels.dim(1);
    img.maxval = 255;
    img.samples.resize(s.pixels.size());
    for (std::size_t i = 0; i < s.pixels.size(); ++i) {
      const double v = std::clamp(static_cast<double>(s.pixels[i]), 0.0, 1.0);
      img.samples[i] = static_cast<std::uint16_t>(std::lround(v * 255.0));
    }
    const auto ci = class_index(s.label);
    char file[32];
    std::snprintf(file, sizeof(file), "%05zu.pgm", next[ci]++);
    write_pgm(root / std::string(kClassDirNames[ci]) / file, img);
  }
  std::ofstream mf(root / "manifest.txt", std::ios::trunc);
  if (!mf) throw DatasetError("cannot write manifest in " + root.string());
  mf << "generator_version=" << manifest.generator_version << "\n";
  mf << "master_seed=" << manifest.master_seed << "\n";
  mf << "split=" << manifest.split << "\n";
  for (std::size_t c = 0; c < kNumClasses; ++c) mf << kClassDirNames[c] << "=" << next[c] << "\n";
}

Dataset read_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw DatasetError("dataset root not found: " + root.string());
  Dataset out;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::string cname(kClassDirNames[c]);
    const fs::path dir = root / cname;
    if (!fs::is_directory(dir)) {
      throw DatasetError("missing class directory '" + cname + "' under " + root.string());
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
    }
    if (files.empty()) {
      throw DatasetError("class directory '" + cname + "' contains no .pgm images (" +
                         dir.string() + ")");
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const PgmImage img = read_pgm(f);
      Tensor t({img.height, img.width, 1});
      const float maxval = static_cast<float>(img.maxval);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(img.samples[i]) / maxval;
      if (img.height == 2 * kInputHeight && img.width == 2 * kInputWidth) {
        t = downscale_2x(t);
      } else if (img.height != kInputHeight || img.width != kInputWidth) {
        throw DatasetError(f.string() + ": unsupported image size " + std::to_string(img.width) +
                           "x" + std::to_string(img.height) + " (expected 324x244 or 648x488)");
      }
      out.push_back({std::move(t), static_cast<ClassLabel>(c),
                     cname + "/" + f.filename().string()});
    }
  }
  return out;
}

}  // namespace parasnet
