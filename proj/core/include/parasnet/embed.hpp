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

#include <ostream>
#include <vector>

#include "parasnet/dataset.hpp"
#include "parasnet/model.hpp"
#include "parasnet/tsne.hpp"

namespace parasnet::eval {

/// 128-d dense1 activations (after ReLU, inference mode), one row per image.
tsne::Points hidden_features(const ParasNet& model, const Dataset& set, std::size_t threads = 1);

/// CSV with header "x,y,label"; label is the class directory name.
void write_embedding_csv(const tsne::Embedding& coords, const std::vector<ClassLabel>& labels,
                         std::ostream& out);

}  // namespace parasnet::eval
