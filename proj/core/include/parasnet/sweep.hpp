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
#include <functional>
#include <ostream>
#include <vector>

#include "parasnet/dataset.hpp"
#include "parasnet/trainer.hpp"

namespace parasnet::eval {

struct SweepRow {
  std::size_t filters = 0;
  std::size_t params = 0;
  double accuracy = 0.0;  // best test accuracy over all epochs
};

using SweepProgress = std::function<void(std::size_t filters, const train::EpochStats&)>;

/// Trains one model per filter count with the same initialization seed and
/// fit config. `filters` must be non-empty and strictly ascending.
std::vector<SweepRow> filter_sweep(const std::vector<std::size_t>& filters, const Dataset& train_set,
                                   const Dataset& test_set, const train::FitConfig& cfg,
                                   std::uint64_t init_seed, const SweepProgress& progress = {});

/// CSV with header "filters,params,accuracy".
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace parasnet::eval
