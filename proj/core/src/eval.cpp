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

#include "parasnet/eval.hpp"

#include <stdexcept>
#include <vector>

#include "parasnet/parallel.hpp"

namespace parasnet::eval {

std::uint64_t ConfusionMatrix::row_sum(ClassLabel actual) const {
  std::uint64_t s = 0;
  for (auto v : counts_[class_index(actual)]) s += v;
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (const auto& row : counts_)
    for (auto v : row) s += v;
  return s;
}

std::uint64_t ConfusionMatrix::correct() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) s += counts_[i][i];
  return s;
}

double ConfusionMatrix::overall_accuracy() const {
  const auto t = total();
  return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t i = 0; i < kNumClasses; ++i)
    for (std::size_t j = 0; j < kNumClasses; ++j) counts_[i][j] += other.counts_[i][j];
  return *this;
}

std::array<double, kNumClasses> per_class_accuracy(const ConfusionMatrix& cm) {
  std::array<double, kNumClasses> acc{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto label = class_from_index(c);
    const auto row = cm.row_sum(label);
    if (row == 0) {
      throw std::invalid_argument("per_class_accuracy: no samples for class " +
                                  std::string(kClassDirNames[c]));
    }
    acc[c] = static_cast<double>(cm.at(label, label)) / static_cast<double>(row);
  }
  return acc;
}

ConfusionMatrix evaluate(const Classifier& classifier, const Dataset& test_set,
                         std::size_t batch_size, std::size_t threads) {
  if (test_set.empty()) throw std::invalid_argument("evaluate: empty test set");
  if (batch_size == 0) throw std::invalid_argument("evaluate: batch size must be >= 1");
  ConfusionMatrix cm;
  std::vector<ClassLabel> predicted(batch_size);
  for (std::size_t start = 0; start < test_set.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, test_set.size() - start);
    parallel_for(n, threads, [&](std::size_t i) {
      predicted[i] = classifier.predict(test_set[start + i].pixels);
    });
    for (std::size_t i = 0; i < n; ++i) cm.add(test_set[start + i].label, predicted[i]);
  }
  return cm;
}

void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out) {
  out << "actual,others,crypto,giardia\n";
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    out << kClassDirNames[i];
    for (std::size_t j = 0; j < kNumClasses; ++j) out << ',' << cm.counts()[i][j];
    out << '\n';
  }
}

}  // namespace parasnet::eval
