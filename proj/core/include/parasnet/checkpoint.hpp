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

// Checkpoint file layout (all integers little-endian):
//
//   "PNET"            4-byte magic
//   u32 version       currently 1
//   u32 F             filter count
//   f32 x P           parameters in layer order, P = parasnet_parameter_count(F)
//   u32 length        metadata byte count
//   u8 x length       UTF-8 metadata: "init_seed=<n>", "params_fnv1a=<hex>"
//                     (FNV-1a of the parameter bytes), then free text

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parasnet/model.hpp"

namespace parasnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { kIo, kBadMagic, kVersionMismatch, kTruncated, kCorrupt };

  CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct Checkpoint {
  ParasNet model{1};
  std::string metadata;  // free-form text after the init_seed line
  std::size_t stored_values = 0;
};

std::vector<std::uint8_t> encode_checkpoint(const ParasNet& model, std::string_view metadata = {});
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const ParasNet& model, const std::filesystem::path& path,
                     std::string_view metadata = {});
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace parasnet
