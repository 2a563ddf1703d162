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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace parasnet {

inline constexpr std::size_t kNumClasses = 3;

/// Class order is fixed everywhere: confusion matrices, probabilities, files.
enum class ClassLabel : int { kOthers = 0, kCrypto = 1, kGiardia = 2 };

inline constexpr std::array<std::string_view, kNumClasses> kClassDirNames = {"others", "crypto",
                                                                             "giardia"};
inline constexpr std::array<std::string_view, kNumClasses> kClassDisplayNames = {
    "Others", "Crypto.", "Giardia"};

inline std::size_t class_index(ClassLabel c) { return static_cast<std::size_t>(c); }

inline ClassLabel class_from_index(long long i) {
  if (i < 0 || i >= static_cast<long long>(kNumClasses)) {
    throw std::invalid_argument("class index out of range: " + std::to_string(i));
  }
  return static_cast<ClassLabel>(i);
}

}  // namespace parasnet
