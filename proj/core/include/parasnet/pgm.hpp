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

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace parasnet {

class PgmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary (P5) greymap. Samples are row-major; 16-bit files are widened.
struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t maxval = 255;
  std::vector<std::uint16_t> samples;
};

PgmImage decode_pgm(std::span<const std::uint8_t> bytes, const std::string& name = "<memory>");
std::vector<std::uint8_t> encode_pgm(const PgmImage& image);

PgmImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const PgmImage& image);

}  // namespace parasnet
