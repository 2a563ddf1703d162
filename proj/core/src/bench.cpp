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


#include "parasnet/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace parasnet::eval {
namespace {

// Stores results so the timed calls cannot be optimized away.
volatile double g_sink = 0.0;

}  // namespace

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

std::string machine_descriptor() {
  std::string model = "unknown cpu";
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        model = line.substr(colon + 1);
        model.erase(0, model.find_first_not_of(' '));
      }
      break;
    }
  }
  return model + " (" + std::to_string(std::thread::hardware_concurrency()) + " logical cores)";
}

BenchReport benchmark(const Classifier& classifier, const std::vector<Tensor>& images,
                      std::size_t warmup, std::size_t iterations) {
  if (warmup < 1) throw std::invalid_argument("benchmark: warmup must be >= 1");
  if (iterations < 10) throw std::invalid_argument("benchmark: iterations must be >= 10");
  if (images.empty()) throw std::invalid_argument("benchmark: no images");

  using Clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < warmup; ++i) g_sink = classifier.predict_proba(images[i % images.size()])[0];

  std::vector<double> ms(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto t0 = Clock::now();
    g_sink = classifier.predict_proba(images[i % images.size()])[0];
    ms[i] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }

  BenchReport r;
  r.classifier = classifier.name();
  const double total_ms = std::accumulate(ms.begin(), ms.end(), 0.0);
  r.mean_ms = total_ms / static_cast<double>(iterations);
  r.fps = 1000.0 * static_cast<double>(iterations) / total_ms;
  r.p50_ms = percentile(ms, 0.50);
  r.p90_ms = percentile(ms, 0.90);
  r.p99_ms = percentile(ms, 0.99);
  r.warmup = warmup;
  r.iterations = iterations;
  r.machine = machine_descriptor();
  return r;
}

void write_bench_csv(const std::vector<BenchReport>& reports, std::ostream& out) {
  out << "classifier,fps,p50_ms,p90_ms,p99_ms,mean_ms,batch_size,warmup,iterations,machine\n";
  char buf[256];
  for (const auto& r : reports) {
    std::string machine = r.machine;
    for (std::size_t pos = 0; (pos = machine.find('"', pos)) != std::string::npos; pos += 2) {
      machine.insert(pos, 1, '"');
    }
    std::snprintf(buf, sizeof(buf), "%.3f,%.4f,%.4f,%.4f,%.4f,%zu,%zu,%zu,", r.fps, r.p50_ms,
                  r.p90_ms, r.p99_ms, r.mean_ms, r.batch_size, r.warmup, r.iterations);
    out << r.classifier << ',' << buf << '"' << machine << "\"\n";
  }
}

}  // namespace parasnet::eval
