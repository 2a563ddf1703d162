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


#include "parasnet/embed.hpp"

#include <cstdio>
#include <stdexcept>

#include "parasnet/parallel.hpp"

namespace parasnet::eval {

tsne::Points hidden_features(const ParasNet& model, const Dataset& set, std::size_t threads) {
  tsne::Points out(set.size());
  parallel_for(set.size(), threads, [&](std::size_t i) {
    const auto r = infer(model, set[i].pixels);
    out[i].assign(r.hidden.data().begin(), r.hidden.data().end());
  });
  return out;
}

void write_embedding_csv(const tsne::Embedding& coords, const std::vector<ClassLabel>& labels,
                         std::ostream& out) {
  if (coords.size() != labels.size()) throw std::invalid_argument("embedding CSV: label count mismatch");
  out << "x,y,label\n";
  char buf[64];
  for (std::size_t i = 0; i < coords.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", coords[i][0], coords[i][1]);
    out << buf << kClassDirNames[class_index(labels[i])] << '\n';
  }
}

}  // namespace parasnet::eval
