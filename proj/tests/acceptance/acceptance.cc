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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. The dataset, the trained F=8 model and
// the baseline model are built once and shared between criteria.
//
//   parasnet_acceptance [--cli PATH] [--work DIR] [--only 1,5,10]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "../unit/test_support.hpp"
#include "parasnet/baseline/pipeline.hpp"
#include "parasnet/bench.hpp"
#include "parasnet/checkpoint.hpp"
#include "parasnet/classifier.hpp"
#include "parasnet/embed.hpp"
#include "parasnet/eval.hpp"
#include "parasnet/layers.hpp"
#include "parasnet/model.hpp"
#include "parasnet/sweep.hpp"
#include "parasnet/synth.hpp"
#include "parasnet/trainer.hpp"
#include "parasnet/tsne.hpp"

namespace parasnet {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using testing::dot;
using testing::numeric_gradient;
using testing::random_tensor;
using testing::relative_error;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename... Args>
std::string strf(const char* fmt, Args... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::string cli;
  fs::path work = "acceptance_work";
  std::set<int> only;
};

void progress(const std::string& line) {
  std::fprintf(stderr, "    %s\n", line.c_str());
  std::fflush(stderr);
}

// ------------------------------------------------------------- shared state

class Fixture {
 public:
  const Dataset& train_set() {
    ensure_data();
    return data_->first;
  }
  const Dataset& test_set() {
    ensure_data();
    return data_->second;
  }

  struct Trained {
    ParasNet model{8};
    train::TrainReport report;
    std::optional<std::size_t> first_epoch_at_95;
    double seconds_to_95 = 0.0;
    double total_seconds = 0.0;
  };

  const Trained& cnn() {
    if (!cnn_) {
      const Dataset& tr = train_set();
      const Dataset& te = test_set();
      cnn_.emplace();
      cnn_->model = build_model(8, 7);
      train::FitConfig cfg;  // 30 epochs, batch 32, seed 7, augmentation on
      const auto t0 = Clock::now();
      cnn_->report = train::fit(cnn_->model, tr, te, cfg, [&](const train::EpochStats& s) {
        progress(strf("F=8 epoch %zu loss %.4f test accuracy %.4f", s.epoch, s.train_loss,
                      s.test_accuracy));
        if (!cnn_->first_epoch_at_95 && s.test_accuracy >= 0.95) {
          cnn_->first_epoch_at_95 = s.epoch;
          cnn_->seconds_to_95 = seconds_since(t0);
        }
      });
      cnn_->total_seconds = seconds_since(t0);
    }
    return *cnn_;
  }

  const baseline::BaselineModel& baseline() {
    if (!baseline_) {
      const Dataset& tr = train_set();
      progress("training the SIFT/BoW/SVM baseline");
      const auto t0 = Clock::now();
      baseline_ = baseline::train_baseline(tr, baseline::BaselineConfig{});
      progress(strf("baseline trained in %.1f s", seconds_since(t0)));
    }
    return *baseline_;
  }

 private:
  void ensure_data() {
    if (!data_) {
      progress("generating the 300/100 per-class synthetic dataset (seed 7)");
      data_ = synth::gen_dataset(synth::GenConfig{});
    }
  }

  std::optional<std::pair<Dataset, Dataset>> data_;
  std::optional<Trained> cnn_;
  std::optional<baseline::BaselineModel> baseline_;
};

// ------------------------------------------------------------- criteria

Outcome parameter_counts() {
  const ParasNet m(8);
  const std::array<std::size_t, kConvLayers + 2> expect{80, 584, 584, 584, 584, 41088, 387};
  const auto got = m.layer_parameter_counts();
  std::string listed;
  for (std::size_t v : got) listed += (listed.empty() ? "" : ",") + std::to_string(v);
  const bool ok = m.parameter_count() == 43891 && got == expect;
  return {ok, strf("total %zu, per layer %s", m.parameter_count(), listed.c_str())};
}

Outcome shape_trace() {
  const std::vector<Shape> expect{{242, 322, 8}, {121, 161, 8}, {119, 159, 8}, {59, 79, 8},
                                  {57, 77, 8},   {28, 38, 8},   {26, 36, 8},   {13, 18, 8},
                                  {11, 16, 8},   {5, 8, 8},     {128},         {3}};
  Rng rng(1);
  const Tensor image = random_tensor({kInputHeight, kInputWidth, 1}, rng, 0.0, 1.0).cast<float>();
  const auto got = forward_trace(build_model(8, 7), image, nn::Mode::kInfer, rng).shape_trace();
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < expect.size(); ++i) {
    if (i >= got.size() || got[i] != expect[i]) ++mismatches;
  }
  const bool ok = got.size() == expect.size() && mismatches == 0;
  return {ok, strf("%zu stages traced, %zu mismatches", got.size(), mismatches)};
}

// Loss of the whole 64-bit network with the dropout mask pinned; the second
// member is the activation pattern (ReLU states and pooling argmaxes).
std::pair<double, std::vector<std::uint32_t>> network_loss(const ParasNetD& model,
                                                           const TensorD& image, ClassLabel label) {
  Rng rng(123);
  const auto tr = forward_trace(model, image, nn::Mode::kTrain, rng);
  std::vector<std::uint32_t> pattern;
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    const TensorD& a = tr.conv_relu[l];
    for (double v : a.data()) pattern.push_back(v > 0.0);
    for (std::size_t i = 0; i < a.dim(0) / 2; ++i)
      for (std::size_t j = 0; j < a.dim(1) / 2; ++j)
        for (std::size_t f = 0; f < a.dim(2); ++f) {
          std::uint32_t arg = 0;
          for (std::uint32_t k = 1; k < 4; ++k) {
            if (a.at(2 * i + k / 2, 2 * j + k % 2, f) > a.at(2 * i + arg / 2, 2 * j + arg % 2, f)) arg = k;
          }
          pattern.push_back(arg);
        }
  }
  for (double v : tr.hidden.data()) pattern.push_back(v > 0.0);
  return {train::bce_loss(tr.probs, train::one_hot<double>(label)).loss, std::move(pattern)};
}

Outcome gradient_suite() {
  constexpr int kInstances = 20;
  constexpr double kTolerance = 1e-6;  // every instance is built away from kinks
  const auto t0 = Clock::now();
  Rng rng(2718);
  struct Row {
    const char* layer;
    int instances = 0;
    double worst = 0.0;
  };
  std::vector<Row> rows;

  {
    Row r{"conv"};
    for (int t = 0; t < kInstances; ++t, ++r.instances) {
      const std::size_t h = 3 + rng.below(5), w = 3 + rng.below(5);
      const std::size_t cin = 1 + rng.below(3), nf = 1 + rng.below(4);
      const TensorD in = random_tensor({h, w, cin}, rng), k = random_tensor({3, 3, cin, nf}, rng);
      const TensorD b = random_tensor({nf}, rng), up = random_tensor({h - 2, w - 2, nf}, rng);
      const auto g = nn::conv2d_backward(in, k, up);
      r.worst = std::max(
          {r.worst,
           relative_error(g.d_input, numeric_gradient(in, [&](const TensorD& x) { return dot(nn::conv2d_valid(x, k, b), up); })),
           relative_error(g.d_params[0], numeric_gradient(k, [&](const TensorD& x) { return dot(nn::conv2d_valid(in, x, b), up); })),
           relative_error(g.d_params[1], numeric_gradient(b, [&](const TensorD& x) { return dot(nn::conv2d_valid(in, k, x), up); }))});
    }
    rows.push_back(r);
  }
  {
    Row r{"relu"};
    for (int t = 0; t < kInstances; ++t, ++r.instances) {
      TensorD x = random_tensor({16}, rng);
      for (double& v : x.data()) v = (v < 0.0 ? -1.0 : 1.0) * (0.05 + std::abs(v));
      const TensorD up = random_tensor({16}, rng);
      r.worst = std::max(r.worst, relative_error(nn::relu_backward(x, up),
                                                 numeric_gradient(x, [&](const TensorD& z) { return dot(nn::relu(z), up); })));
    }
    rows.push_back(r);
  }
  {
    Row r{"maxpool"};
    for (int t = 0; t < kInstances; ++t, ++r.instances) {
      const std::size_t h = 2 + rng.below(6), w = 2 + rng.below(6), c = 1 + rng.below(3);
      TensorD x = random_tensor({h, w, c}, rng);
      // Lift each window's maximum clear of the runner-up.
      for (std::size_t i = 0; i + 1 < h; i += 2)
        for (std::size_t j = 0; j + 1 < w; j += 2)
          for (std::size_t f = 0; f < c; ++f) {
            double* best = &x.at(i, j, f);
            for (std::size_t k = 1; k < 4; ++k) {
              double* cell = &x.at(i + k / 2, j + k % 2, f);
              if (*cell > *best) best = cell;
            }
            *best += 0.05;
          }
      const TensorD up = random_tensor({h / 2, w / 2, c}, rng);
      r.worst = std::max(r.worst, relative_error(nn::maxpool_2x2_backward(x, up),
                                                 numeric_gradient(x, [&](const TensorD& z) { return dot(nn::maxpool_2x2(z), up); })));
    }
    rows.push_back(r);
  }
  {
    Row r{"dense"};
    for (int t = 0; t < kInstances; ++t, ++r.instances) {
      const std::size_t n = 2 + rng.below(12), m = 1 + rng.below(6);
      const TensorD x = random_tensor({n}, rng), w = random_tensor({n, m}, rng);
      const TensorD b = random_tensor({m}, rng), up = random_tensor({m}, rng);
      const auto g = nn::dense_backward(x, w, up);
      r.worst = std::max(
          {r.worst,
           relative_error(g.d_input, numeric_gradient(x, [&](const TensorD& z) { return dot(nn::dense(z, w, b), up); })),
           relative_error(g.d_params[0], numeric_gradient(w, [&](const TensorD& z) { return dot(nn::dense(x, z, b), up); })),
           relative_error(g.d_params[1], numeric_gradient(b, [&](const TensorD& z) { return dot(nn::dense(x, w, z), up); }))});
    }
    rows.push_back(r);
  }
  {
    Row r{"dropout"};
    for (int t = 0; t < kInstances; ++t, ++r.instances) {
      const TensorD x = random_tensor({16}, rng), up = random_tensor({16}, rng);
      const std::uint64_t seed = rng.next_u64();
      Rng fwd(seed);
      const auto res = nn::dropout(x, kDropoutRate, nn::Mode::kTrain, fwd);
      const auto num = numeric_gradient(x, [&](const TensorD& z) {
        Rng again(seed);
        return dot(nn::dropout(z, kDropoutRate, nn::Mode::kTrain, again).output, up);
      });
      r.worst = std::max(r.worst, relative_error(nn::dropout_backward(res.mask, kDropoutRate, up), num));
    }
    rows.push_back(r);
  }
  {
    Row r{"softmax"};
    for (int t = 0; t < kInstances; ++t, ++r.instances) {
      const TensorD z = random_tensor({kNumClasses}, rng, -4.0, 4.0), up = random_tensor({kNumClasses}, rng);
      r.worst = std::max(r.worst, relative_error(nn::softmax_backward(nn::softmax(z), up),
                                                 numeric_gradient(z, [&](const TensorD& v) { return dot(nn::softmax(v), up); })));
    }
    rows.push_back(r);
  }
  {
    Row r{"bce"};
    for (int t = 0; t < kInstances; ++t, ++r.instances) {
      const TensorD p = random_tensor({kNumClasses}, rng, 0.02, 0.98);
      const TensorD y = train::one_hot<double>(static_cast<ClassLabel>(rng.below(kNumClasses)));
      r.worst = std::max(r.worst, relative_error(train::bce_loss(p, y).d_probs,
                                                 numeric_gradient(p, [&](const TensorD& v) { return train::bce_loss(v, y).loss; })));
    }
    rows.push_back(r);
  }
  {
    Row r{"end-to-end"};
    ParasNetD model = build_model(8, 17).cast<double>();
    for (std::size_t p = 1; p < model.params().size(); p += 2) {
      for (double& v : model.params()[p].data()) v = rng.uniform(-0.05, 0.05);
    }
    const TensorD image = random_tensor({kInputHeight, kInputWidth, 1}, rng, 0.0, 1.0);
    const ClassLabel label = ClassLabel::kCrypto;
    Rng fwd(123);
    const auto analytic = train::loss_and_gradients(model, image, label, nn::Mode::kTrain, fwd);
    TensorD numeric({kInstances}), exact({kInstances});
    std::size_t redrawn = 0;
    while (r.instances < kInstances && redrawn < 1000) {
      const std::size_t p = (r.instances + redrawn) % model.params().size();
      const std::size_t e = rng.below(model.params()[p].size());
      double& w = model.params()[p][e];
      const double saved = w;
      w = saved + testing::kFdStep;
      const auto up = network_loss(model, image, label);
      w = saved - testing::kFdStep;
      const auto down = network_loss(model, image, label);
      w = saved;
      if (up.second != down.second) {
        ++redrawn;
        continue;
      }
      numeric[r.instances] = (up.first - down.first) / (2.0 * testing::kFdStep);
      exact[r.instances] = analytic.grads[p][e];
      ++r.instances;
    }
    r.worst = relative_error(exact, numeric);
    rows.push_back(r);
  }

  const double elapsed = seconds_since(t0);
  bool ok = elapsed < 60.0;
  std::string detail;
  for (const Row& r : rows) {
    ok = ok && r.instances >= kInstances && r.worst < kTolerance;
    detail += strf("%s %d x %.1e; ", r.layer, r.instances, r.worst);
  }
  detail += strf("%.1f s", elapsed);
  return {ok, detail};
}

Outcome table_fixtures() {
  using Rows = std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>;
  const eval::ConfusionMatrix baseline_table(Rows{{{1000, 0, 0}, {155, 845, 0}, {5, 0, 995}}});
  const eval::ConfusionMatrix network_table(Rows{{{1000, 0, 0}, {44, 956, 0}, {5, 0, 995}}});
  const auto b = eval::per_class_accuracy(baseline_table);
  const auto n = eval::per_class_accuracy(network_table);
  const bool ok = b[1] == 0.845 && b[2] == 0.995 && n[1] == 0.956 && n[2] == 0.995 && b[0] == 1.0 &&
                  n[0] == 1.0;
  return {ok, strf("baseline crypto %.3f giardia %.3f; network crypto %.3f giardia %.3f", b[1], b[2],
                   n[1], n[2])};
}

Outcome convergence(Fixture& fx) {
  const auto& c = fx.cnn();
  const bool ok = c.first_epoch_at_95.has_value() && c.seconds_to_95 < 900.0 && c.total_seconds < 900.0;
  if (!c.first_epoch_at_95) {
    return {false, strf("best test accuracy %.4f after %zu epochs (%.0f s)", c.report.best_accuracy(),
                        c.report.epochs.size(), c.total_seconds)};
  }
  return {ok, strf("test accuracy >= 0.95 at epoch %zu after %.0f s; 30 epochs in %.0f s, final %.4f",
                   *c.first_epoch_at_95, c.seconds_to_95, c.total_seconds,
                   c.report.epochs.back().test_accuracy)};
}

Outcome filter_sweep(Fixture& fx) {
  train::FitConfig cfg;
  cfg.epochs = 10;
  const auto rows = eval::filter_sweep({2, 4, 8, 16}, fx.train_set(), fx.test_set(), cfg, 7,
                                       [](std::size_t f, const train::EpochStats& s) {
                                         progress(strf("sweep F=%zu epoch %zu test accuracy %.4f", f,
                                                       s.epoch, s.test_accuracy));
                                       });
  const double a2 = rows[0].accuracy, a4 = rows[1].accuracy, a8 = rows[2].accuracy, a16 = rows[3].accuracy;
  const bool ok = a2 < a8 && a16 - a8 <= 0.02;
  return {ok, strf("10 epochs each: F=2 %.4f, F=4 %.4f, F=8 %.4f, F=16 %.4f", a2, a4, a8, a16)};
}

std::vector<Tensor> bench_images(const Dataset& set, std::size_t count) {
  std::vector<Tensor> out;
  const std::size_t stride = std::max<std::size_t>(1, set.size() / count);
  for (std::size_t i = 0; i < set.size() && out.size() < count; i += stride) out.push_back(set[i].pixels);
  return out;
}

Outcome inference_speed(Fixture& fx) {
  const auto images = bench_images(fx.test_set(), 32);
  const ParasNetClassifier cnn(fx.cnn().model);
  const baseline::BaselineClassifier base(fx.baseline());
  const auto rc = eval::benchmark(cnn, images, 5, 50);
  const auto rb = eval::benchmark(base, images, 2, 20);
  const bool ok = rc.fps >= 2.0 * rb.fps && rc.p99_ms < 50.0;
  return {ok, strf("CNN %.1f fps (p50 %.2f ms, p99 %.2f ms), baseline %.1f fps, speedup %.1fx", rc.fps,
                   rc.p50_ms, rc.p99_ms, rb.fps, rc.fps / rb.fps)};
}

Outcome embedding_quality(Fixture& fx) {
  const Dataset& test = fx.test_set();
  const auto features = eval::hidden_features(fx.cnn().model, test);
  std::vector<int> labels;
  for (const auto& s : test) labels.push_back(static_cast<int>(class_index(s.label)));
  const auto emb = tsne::tsne_embed(features);  // perplexity 30, 1000 iterations
  const double s_features = tsne::silhouette(emb.coords, labels);

  Rng rng(99);
  tsne::Points probe;
  std::vector<int> probe_labels;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> centre(128);
    for (double& v : centre) v = rng.normal() * 20.0 / std::sqrt(2.0 * 128.0);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> x = centre;
      for (double& v : x) v += rng.normal();
      probe.push_back(std::move(x));
      probe_labels.push_back(c);
    }
  }
  const double s_probe = tsne::silhouette(tsne::tsne_embed(probe).coords, probe_labels);
  const bool ok = features.size() >= 300 && s_features >= 0.2 && s_probe >= 0.5;
  return {ok, strf("%zu test features: silhouette %.3f (KL %.3f); 3-Gaussian probe silhouette %.3f",
                   features.size(), s_features, emb.kl, s_probe)};
}

// ------------------------------------------------------------- determinism

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> contents for every regular file under root.
std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).string(), read_file(e.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// The report's wall-clock column is the only field allowed to differ.
std::string without_last_column(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

bool run(const std::string& command) {
  progress("$ " + command);
  return std::system((command + " > /dev/null 2>&1").c_str()) == 0;
}

Outcome determinism(const Options& opt) {
  if (opt.cli.empty() || !fs::exists(opt.cli)) return {false, "parasnet CLI not available"};
  const fs::path root = opt.work / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string cli = "'" + opt.cli + "'";
  auto at = [&](const std::string& name) { return "'" + (root / name).string() + "'"; };
  std::vector<std::string> failed;

  // Full default-size generation, twice single-threaded and once with all cores.
  bool ran = run(cli + " --threads 1 gen --out " + at("gen_a")) &&
             run(cli + " --threads 1 gen --out " + at("gen_b")) &&
             run(cli + " gen --out " + at("gen_c"));
  if (!ran) return {false, "gen command failed"};
  const auto ga = snapshot(root / "gen_a");
  if (ga != snapshot(root / "gen_b")) failed.push_back("gen");
  if (ga != snapshot(root / "gen_c")) failed.push_back("gen(default threads)");
  for (const char* d : {"gen_a", "gen_b", "gen_c"}) fs::remove_all(root / d);

  // Small dataset for the training-side commands.
  ran = run(cli + " --threads 1 gen --out " + at("small") + " --train-per-class 16 --test-per-class 8");
  for (const char* tag : {"a", "b"}) {
    const std::string t(tag);
    ran = ran &&
          run(cli + " --threads 1 train --data " + at("small") + " --epochs 2 --ckpt " + at("ckpt_" + t) +
              " --report " + at("report_" + t)) &&
          run(cli + " --threads 1 sweep --data " + at("small") + " --epochs 1 --filters-list 1,2 --out " +
              at("sweep_" + t)) &&
          run(cli + " --threads 1 embed --ckpt " + at("ckpt_a") + " --data " + at("small") +
              " --perplexity 5 --out " + at("embed_" + t));
  }
  if (!ran) return {false, "train/sweep/embed command failed"};
  if (read_file(root / "ckpt_a") != read_file(root / "ckpt_b") ||
      without_last_column(read_file(root / "report_a")) != without_last_column(read_file(root / "report_b")))
    failed.push_back("train");
  if (read_file(root / "sweep_a") != read_file(root / "sweep_b")) failed.push_back("sweep");
  if (read_file(root / "embed_a") != read_file(root / "embed_b")) failed.push_back("embed");

  std::string detail = strf("%zu generated files compared", ga.size());
  if (!failed.empty()) {
    detail += "; differing:";
    for (const auto& f : failed) detail += " " + f;
  } else {
    detail += "; gen, train, sweep and embed outputs byte-identical";
  }
  return {failed.empty(), detail};
}

Outcome baseline_comparison(Fixture& fx) {
  const ParasNetClassifier cnn_clf(fx.cnn().model);
  const baseline::BaselineClassifier base_clf(fx.baseline());
  const auto cnn = eval::evaluate(cnn_clf, fx.test_set());
  const auto base = eval::evaluate(base_clf, fx.test_set());
  const double cnn_crypto = eval::per_class_accuracy(cnn)[1];
  const double base_crypto = eval::per_class_accuracy(base)[1];
  const auto e_others = base.row_errors(ClassLabel::kOthers);
  const auto e_crypto = base.row_errors(ClassLabel::kCrypto);
  const auto e_giardia = base.row_errors(ClassLabel::kGiardia);
  const bool concentrated = e_crypto > e_others && e_crypto > e_giardia;
  const bool ok = base_crypto < cnn_crypto && concentrated;
  return {ok, strf("crypto accuracy baseline %.3f vs CNN %.3f; baseline row errors others %llu, "
                   "crypto %llu, giardia %llu%s",
                   base_crypto, cnn_crypto, static_cast<unsigned long long>(e_others),
                   static_cast<unsigned long long>(e_crypto), static_cast<unsigned long long>(e_giardia),
                   concentrated ? "" : " (not concentrated in crypto)")};
}

Outcome checkpoint_integrity(const Options& opt) {
  ParasNet model = build_model(8, 7);
  Rng rng(5);
  for (auto& t : model.params())
    for (float& v : t.data()) v += static_cast<float>(rng.uniform(-0.01, 0.01));
  const auto bytes = encode_checkpoint(model, "acceptance");
  std::vector<std::string> problems;

  const Checkpoint back = decode_checkpoint(bytes);
  bool exact = back.model.filters() == model.filters() && back.model.params().size() == model.params().size();
  for (std::size_t i = 0; exact && i < model.params().size(); ++i) {
    const auto& a = model.params()[i].data();
    const auto& b = back.model.params()[i].data();
    exact = a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
  }
  if (!exact || encode_checkpoint(back.model, "acceptance") != bytes) problems.push_back("memory round trip");

  fs::create_directories(opt.work);
  const fs::path path = opt.work / "roundtrip.pnet";
  save_checkpoint(model, path, "acceptance");
  if (!(load_checkpoint(path).model == model) || read_file(path).size() != bytes.size())
    problems.push_back("file round trip");

  auto rejected = [&](std::vector<std::uint8_t> b, CheckpointError::Kind want) {
    try {
      decode_checkpoint(b);
    } catch (const CheckpointError& e) {
      return e.kind() == want;
    }
    return false;
  };
  std::size_t cases = 0;
  auto expect_rejected = [&](const char* what, std::vector<std::uint8_t> b, CheckpointError::Kind want) {
    ++cases;
    if (!rejected(std::move(b), want)) problems.push_back(what);
  };
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{11}, bytes.size() / 2, bytes.size() - 1}) {
    expect_rejected("truncation", {bytes.begin(), bytes.begin() + static_cast<long>(cut)},
                    CheckpointError::Kind::kTruncated);
  }
  auto flipped = [&](std::size_t at) {
    auto b = bytes;
    b[at] ^= 0x40;
    return b;
  };
  expect_rejected("magic", flipped(0), CheckpointError::Kind::kBadMagic);
  expect_rejected("version", flipped(4), CheckpointError::Kind::kVersionMismatch);
  expect_rejected("parameter bit flip", flipped(12 + 4 * 1000), CheckpointError::Kind::kCorrupt);
  auto trailing = bytes;
  trailing.push_back(0);
  expect_rejected("trailing bytes", trailing, CheckpointError::Kind::kCorrupt);

  ++cases;
  const fs::path missing = opt.work / "no_such.pnet";
  try {
    load_checkpoint(missing);
    problems.push_back("missing file");
  } catch (const CheckpointError& e) {
    if (std::string(e.what()).find(missing.string()) == std::string::npos) problems.push_back("missing file message");
  }

  std::string detail = strf("round trip of %zu bytes; %zu corrupted inputs", bytes.size(), cases);
  for (const auto& p : problems) detail += "; failed: " + p;
  return {problems.empty(), detail};
}

// ------------------------------------------------------------- driver

Options parse(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto value = [&]() -> std::string {
      if (i + 1 >= argc) throw std::invalid_argument(a + " needs a value");
      return argv[++i];
    };
    if (a == "--cli") {
      o.cli = value();
    } else if (a == "--work") {
      o.work = value();
    } else if (a == "--only") {
      std::stringstream ss(value());
      for (std::string tok; std::getline(ss, tok, ',');) o.only.insert(std::stoi(tok));
    } else {
      throw std::invalid_argument("unknown argument: " + a);
    }
  }
  return o;
}

}  // namespace
}  // namespace parasnet

int main(int argc, char** argv) {
  using namespace parasnet;
  Options opt;
  try {
    opt = parse(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "parasnet_acceptance: %s\n", e.what());
    return 2;
  }
  Fixture fx;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"parameter counts", [] { return parameter_counts(); }},
      {"shape trace", [] { return shape_trace(); }},
      {"gradient check suite", [] { return gradient_suite(); }},
      {"table fixtures", [] { return table_fixtures(); }},
      {"F=8 convergence", [&] { return convergence(fx); }},
      {"filter sweep", [&] { return filter_sweep(fx); }},
      {"inference speed", [&] { return inference_speed(fx); }},
      {"t-SNE separation", [&] { return embedding_quality(fx); }},
      {"determinism", [&] { return determinism(opt); }},
      {"baseline comparison", [&] { return baseline_comparison(fx); }},
      {"checkpoint integrity", [&] { return checkpoint_integrity(opt); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!opt.only.empty() && !opt.only.count(id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%2d] %s  %s: %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
