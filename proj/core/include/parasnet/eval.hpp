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
#include <ostream>

#include "parasnet/classifier.hpp"
#include "parasnet/dataset.hpp"

namespace parasnet::eval {

/// Rows are actual classes, columns predicted, order (Others, Crypto, Giardia).
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(const std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>& counts)
      : counts_(counts) {}

  void add(ClassLabel actual, ClassLabel predicted) {
    ++counts_[class_index(actual)][class_index(predicted)];
  }

  std::uint64_t at(ClassLabel actual, ClassLabel predicted) const {
    return counts_[class_index(actual)][class_index(predicted)];
  }
  const auto& counts() const noexcept { return counts_; }

  std::uint64_t row_sum(ClassLabel actual) const;
  std::uint64_t total() const;
  std::uint64_t correct() const;
  /// Off-diagonal count of a row (false detections of that actual class).
  std::uint64_t row_errors(ClassLabel actual) const { return row_sum(actual) - at(actual, actual); }
  double overall_accuracy() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts_{};
};

/// Diagonal over row sum; throws std::invalid_argument on an empty row.
std::array<double, kNumClasses> per_class_accuracy(const ConfusionMatrix& cm);

/// Inference over the whole set in chunks of `batch_size` images; images
/// inside a chunk are spread over `threads` workers.
ConfusionMatrix evaluate(const Classifier& classifier, const Dataset& test_set,
                         std::size_t batch_size = 32, std::size_t threads = 1);

/// CSV with header "actual,others,crypto,giardia".
void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out);

}  // namespace parasnet::eval
