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
#include <string>
#include <vector>

#include "parasnet/classifier.hpp"
#include "parasnet/tensor.hpp"

namespace parasnet::eval {

struct BenchReport {
  std::string classifier;
  double fps = 0.0;
  double p50_ms = 0.0;
  double p90_ms = 0.0;
  double p99_ms = 0.0;
  double mean_ms = 0.0;
  std::size_t batch_size = 1;
  std::size_t warmup = 0;
  std::size_t iterations = 0;
  std::string machine;
};

/// Nearest-rank percentile (q in (0, 1]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

/// CPU model and logical core count, from /proc/cpuinfo when available.
std::string machine_descriptor();

/// Single-image inference timed on the calling thread, cycling through
/// `images`. Throws std::invalid_argument if warmup < 1, iterations < 10 or
/// no images are given.
BenchReport benchmark(const Classifier& classifier, const std::vector<Tensor>& images,
                      std::size_t warmup, std::size_t iterations);

/// CSV with header
/// "classifier,fps,p50_ms,p90_ms,p99_ms,mean_ms,batch_size,warmup,iterations,machine".
void write_bench_csv(const std::vector<BenchReport>& reports, std::ostream& out);

}  // namespace parasnet::eval
