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

#include <algorithm>
#include <array>
#include <string>

#include "parasnet/classes.hpp"
#include "parasnet/model.hpp"
#include "parasnet/tensor.hpp"

namespace parasnet {

using ClassProbs = std::array<double, kNumClasses>;

inline ClassLabel argmax_class(const ClassProbs& p) {
  return static_cast<ClassLabel>(std::max_element(p.begin(), p.end()) - p.begin());
}

/// Common inference surface for the CNN and the hand-crafted baseline.
/// Implementations must be safe to call concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::string name() const = 0;
  virtual ClassProbs predict_proba(const Tensor& image) const = 0;
  virtual ClassLabel predict(const Tensor& image) const { return argmax_class(predict_proba(image)); }
};

class ParasNetClassifier final : public Classifier {
 public:
  explicit ParasNetClassifier(const ParasNet& model) : model_(model) {}

  std::string name() const override { return "parasnet-F" + std::to_string(model_.filters()); }

  ClassProbs predict_proba(const Tensor& image) const override {
    const auto r = infer(model_, image);
    return {r.probs[0], r.probs[1], r.probs[2]};
  }

 private:
  const ParasNet& model_;
};

}  // namespace parasnet
