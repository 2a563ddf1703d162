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


#include "parasnet/sweep.hpp"

#include <cstdio>
#include <stdexcept>

namespace parasnet::eval {

std::vector<SweepRow> filter_sweep(const std::vector<std::size_t>& filters, const Dataset& train_set,
                                   const Dataset& test_set, const train::FitConfig& cfg,
                                   std::uint64_t init_seed, const SweepProgress& progress) {
  if (filters.empty()) throw std::invalid_argument("filter_sweep: empty filter list");
  for (std::size_t i = 0; i < filters.size(); ++i) {
    if (filters[i] == 0) throw std::invalid_argument("filter_sweep: filter counts must be >= 1");
    if (i > 0 && filters[i] <= filters[i - 1]) {
      throw std::invalid_argument("filter_sweep: filter counts must be strictly ascending");
    }
  }
  std::vector<SweepRow> rows;
  for (std::size_t f : filters) {
    ParasNet model = build_model(f, init_seed);
    train::EpochCallback cb;
    if (progress) cb = [&](const train::EpochStats& s) { progress(f, s); };
    const train::TrainReport report = train::fit(model, train_set, test_set, cfg, cb);
    rows.push_back({f, model.parameter_count(), report.best_accuracy()});
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "filters,params,accuracy\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6f\n", r.filters, r.params, r.accuracy);
    out << buf;
  }
}

}  // namespace parasnet::eval
