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


#include "parasnet/baseline/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "parasnet/io_bytes.hpp"
#include "parasnet/parallel.hpp"
#include "parasnet/rng.hpp"

namespace parasnet::baseline {
namespace {

constexpr char kMagic[4] = {'P', 'B', 'S', 'L'};
constexpr std::uint32_t kMaxCodebook = 1u << 16;

}  // namespace

BaselineModel train_baseline(const Dataset& train_set, const BaselineConfig& cfg,
                             std::size_t threads) {
  if (train_set.empty()) throw std::invalid_argument("train_baseline: empty training set");
  std::vector<Features> feats(train_set.size());
  parallel_for(train_set.size(), threads,
               [&](std::size_t i) { feats[i] = extract_features(train_set[i].pixels, cfg.sift); });

  std::vector<Descriptor> pool;
  for (const auto& f : feats) pool.insert(pool.end(), f.descriptors.begin(), f.descriptors.end());
  if (cfg.codebook_sample != 0 && pool.size() > cfg.codebook_sample) {
    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.kmeans.seed, {0x53414d50}));  // "SAMP"
    rng.shuffle(idx.begin(), idx.end());
    idx.resize(cfg.codebook_sample);
    std::sort(idx.begin(), idx.end());
    std::vector<Descriptor> sample;
    sample.reserve(idx.size());
    for (std::size_t i : idx) sample.push_back(pool[i]);
    pool = std::move(sample);
  }

  BaselineModel model;
  model.sift = cfg.sift;
  model.nb_gap = cfg.nb_gap;
  model.codebook = build_codebook(pool, cfg.kmeans);

  // Images without keypoints are classified by the fixed fallback, so they
  // carry no information for the SVM or naive Bayes stage.
  std::vector<FeatureVector> x;
  std::vector<ClassLabel> y;
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    auto h = bow_histogram(feats[i].descriptors, model.codebook);
    if (h.no_keypoints) continue;
    x.push_back(std::move(h.bins));
    y.push_back(train_set[i].label);
  }
  if (x.empty()) throw std::invalid_argument("train_baseline: no training image produced keypoints");
  model.svm = train_scored_svm(x, y, cfg.svm);
  model.nb = train_naive_bayes(x, y);
  return model;
}

BaselinePrediction classify_baseline(const Tensor& image, const BaselineModel& model) {
  if (!model.trained()) throw std::logic_error("classify_baseline: model is not trained");
  const Features f = extract_features(image, model.sift);
  const BowHistogram h = bow_histogram(f.descriptors, model.codebook);
  BaselinePrediction out;
  if (h.no_keypoints) {
    out.no_keypoints = true;
    out.label = ClassLabel::kOthers;
    out.probs = {1.0, 0.0, 0.0};
    return out;
  }
  out.probs = model.svm.predict_proba(h.bins);
  ClassProbs sorted = out.probs;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  if (sorted[0] - sorted[1] < model.nb_gap) {
    out.used_naive_bayes = true;
    const auto nb = model.nb.log_posterior(h.bins);
    std::array<double, kNumClasses> lp{};
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      lp[c] = 0.5 * (std::log(std::max(out.probs[c], 1e-300)) + nb[c]);
    }
    const double top = *std::max_element(lp.begin(), lp.end());
    double z = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) z += (out.probs[c] = std::exp(lp[c] - top));
    for (double& p : out.probs) p /= z;
  }
  out.label = argmax_class(out.probs);
  return out;
}

std::vector<std::uint8_t> encode_baseline(const BaselineModel& model) {
  if (!model.trained()) throw BaselineModelError("encode_baseline: model is not trained");
  ByteWriter w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kBaselineVersion);
  w.f64(model.sift.contrast_threshold);
  w.f64(model.sift.edge_ratio);
  w.u64(model.sift.max_keypoints);
  w.f64(model.nb_gap);
  const std::size_t k = model.codebook.k();
  w.u32(static_cast<std::uint32_t>(k));
  w.u32(static_cast<std::uint32_t>(std::tuple_size_v<Descriptor>));
  for (const auto& c : model.codebook.centroids)
    for (double v : c) w.f64(v);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (double v : model.svm.machines[c].weights) w.f64(v);
    w.f64(model.svm.machines[c].bias);
    w.f64(model.svm.calibration[c].a);
    w.f64(model.svm.calibration[c].b);
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    w.f64(model.nb.log_prior[c]);
    for (double v : model.nb.mean[c]) w.f64(v);
    for (double v : model.nb.variance[c]) w.f64(v);
  }
  return w.take();
}

BaselineModel decode_baseline(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw BaselineModelError("not a baseline model file (bad magic bytes)");
  }
  ByteReader r(bytes);
  r.skip(sizeof(kMagic));
  const std::uint32_t version = r.u32();
  if (version != kBaselineVersion) {
    throw BaselineModelError("baseline model version " + std::to_string(version) +
                             " unsupported (expected " + std::to_string(kBaselineVersion) + ")");
  }
  BaselineModel m;
  try {
    m.sift.contrast_threshold = r.f64();
    m.sift.edge_ratio = r.f64();
    m.sift.max_keypoints = r.u64();
    m.nb_gap = r.f64();
    const std::uint32_t k = r.u32();
    const std::uint32_t dim = r.u32();
    if (k < 2 || k > kMaxCodebook || dim != std::tuple_size_v<Descriptor>) {
      throw BaselineModelError("baseline model has an invalid codebook shape (k=" +
                               std::to_string(k) + ", dim=" + std::to_string(dim) + ")");
    }
    m.codebook.centroids.resize(k);
    for (auto& c : m.codebook.centroids)
      for (double& v : c) v = r.f64();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      LinearSvm svm;
      svm.weights.resize(k);
      for (double& v : svm.weights) v = r.f64();
      svm.bias = r.f64();
      PlattSigmoid s;
      s.a = r.f64();
      s.b = r.f64();
      m.svm.machines.push_back(std::move(svm));
      m.svm.calibration.push_back(s);
    }
    m.nb.mean.assign(kNumClasses, std::vector<double>(k));
    m.nb.variance.assign(kNumClasses, std::vector<double>(k));
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      m.nb.log_prior.push_back(r.f64());
      for (double& v : m.nb.mean[c]) v = r.f64();
      for (double& v : m.nb.variance[c]) {
        v = r.f64();
        if (!(v > 0.0)) throw BaselineModelError("baseline model has a non-positive variance");
      }
    }
  } catch (const std::out_of_range& e) {
    throw BaselineModelError(std::string("baseline model truncated: ") + e.what());
  }
  if (r.remaining() != 0) {
    throw BaselineModelError("baseline model has " + std::to_string(r.remaining()) +
                             " unexpected trailing bytes");
  }
  return m;
}

void save_baseline(const BaselineModel& model, const std::filesystem::path& path) {
  const auto bytes = encode_baseline(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw BaselineModelError("cannot open baseline model for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw BaselineModelError("failed writing baseline model: " + path.string());
}

BaselineModel load_baseline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BaselineModelError("cannot open baseline model: " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return decode_baseline(bytes);
  } catch (const BaselineModelError& e) {
    throw BaselineModelError(path.string() + ": " + e.what());
  }
}

}  // namespace parasnet::baseline
