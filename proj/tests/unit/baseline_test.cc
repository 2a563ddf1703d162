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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "parasnet/baseline/bow.hpp"
#include "parasnet/baseline/pipeline.hpp"
#include "parasnet/baseline/sift.hpp"
#include "parasnet/baseline/svm.hpp"
#include "parasnet/rng.hpp"
#include "parasnet/synth.hpp"

namespace parasnet::baseline {
namespace {

Plane random_plane(std::size_t h, std::size_t w, Rng& rng) {
  Plane p(h, w);
  for (double& v : p.values()) v = rng.uniform();
  return p;
}

void add_blob(Plane& p, double cy, double cx, double sigma, double amp) {
  for (std::size_t y = 0; y < p.height(); ++y)
    for (std::size_t x = 0; x < p.width(); ++x) {
      const double dy = y - cy, dx = x - cx;
      p(y, x) += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
}

Plane rotate90(const Plane& p) {
  Plane out(p.width(), p.height());
  for (std::size_t y = 0; y < p.height(); ++y)
    for (std::size_t x = 0; x < p.width(); ++x) out(x, p.height() - 1 - y) = p(y, x);
  return out;
}

double cosine(const Descriptor& a, const Descriptor& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

Tensor to_tensor(const Plane& p) {
  Tensor t({p.height(), p.width(), 1});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(p.values()[i]);
  return t;
}

TEST(SiftTest, SeparableBlurMatchesBruteForce) {
  Rng rng(1);
  const Plane in = random_plane(16, 16, rng);
  for (double sigma : {0.7, 1.3, 2.5}) {
    const auto k = gaussian_kernel(sigma);
    const long r = static_cast<long>(k.size() / 2);
    const Plane fast = gaussian_blur(in, sigma);
    for (long y = 0; y < 16; ++y)
      for (long x = 0; x < 16; ++x) {
        double s = 0.0;
        for (long i = -r; i <= r; ++i)
          for (long j = -r; j <= r; ++j) s += k[i + r] * k[j + r] * in.clamped(y + i, x + j);
        ASSERT_NEAR(fast(y, x), s, 1e-10) << "sigma " << sigma;
      }
  }
}

TEST(SiftTest, PreprocessRangeAndDegenerateCase) {
  Rng rng(2);
  const Plane out = preprocess(random_plane(40, 50, rng));
  const auto [lo, hi] = std::minmax_element(out.values().begin(), out.values().end());
  EXPECT_DOUBLE_EQ(*lo, 0.0);
  EXPECT_DOUBLE_EQ(*hi, 1.0);
  const Plane flat = preprocess(Plane(40, 50, 0.3));
  for (double v : flat.values()) EXPECT_EQ(v, 0.5);
}

TEST(SiftTest, SmoothingReducesNoiseVariance) {
  Rng rng(3);
  const Plane noise = random_plane(64, 64, rng);
  auto variance = [](const Plane& p) {
    const auto& v = p.values();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / v.size();
  };
  EXPECT_LT(variance(gaussian_blur(noise, 1.0)), 0.25 * variance(noise));
}

TEST(SiftTest, ConstantImageHasNoKeypoints) {
  EXPECT_TRUE(detect_keypoints(Plane(64, 64, 0.4)).empty());
}

TEST(SiftTest, TooSmallImageRejected) {
  EXPECT_THROW(detect_keypoints(Plane(31, 64, 0.4)), std::invalid_argument);
}

TEST(SiftTest, BlobYieldsCentredKeypoint) {
  Plane p(64, 64, 0.2);
  add_blob(p, 32.0, 32.0, 4.0, 0.6);
  const auto kps = detect_keypoints(p);
  ASSERT_FALSE(kps.empty());
  const bool near = std::any_of(kps.begin(), kps.end(), [](const Keypoint& k) {
    return std::hypot(k.x - 32.0, k.y - 32.0) <= 2.0;
  });
  EXPECT_TRUE(near);
}

TEST(SiftTest, RaisingContrastThresholdNeverAddsKeypoints) {
  Rng rng(4);
  const Plane p = preprocess(random_plane(64, 80, rng));
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (double t : {0.0, 0.005, 0.01, 0.02, 0.03, 0.05, 0.1}) {
    SiftConfig cfg;
    cfg.contrast_threshold = t;
    const std::size_t n = detect_keypoints(p, cfg).size();
    EXPECT_LE(n, prev) << "threshold " << t;
    prev = n;
  }
}

TEST(SiftTest, KeypointCountInvariantUnderTranslation) {
  Plane a(96, 96, 0.3), b(96, 96, 0.3);
  add_blob(a, 30.0, 28.0, 3.0, 0.5);
  add_blob(a, 44.0, 50.0, 2.0, -0.4);
  // Shift by a multiple of the coarsest sampling stride so every octave
  // grid sees the same content.
  const double shift = 8.0;
  add_blob(b, 30.0 + shift, 28.0 + shift, 3.0, 0.5);
  add_blob(b, 44.0 + shift, 50.0 + shift, 2.0, -0.4);
  const auto ka = detect_keypoints(a), kb = detect_keypoints(b);
  ASSERT_FALSE(ka.empty());
  ASSERT_EQ(ka.size(), kb.size());
  for (std::size_t i = 0; i < ka.size(); ++i) {
    EXPECT_NEAR(ka[i].x + shift, kb[i].x, 1e-6);
    EXPECT_NEAR(ka[i].y + shift, kb[i].y, 1e-6);
  }
}

TEST(SiftTest, DescriptorsAreUnitLength) {
  Rng rng(5);
  const Plane p = preprocess(random_plane(64, 64, rng));
  const ScaleSpace space(p);
  const auto kps = detect_keypoints(space);
  ASSERT_FALSE(kps.empty());
  for (const auto& kp : kps) {
    const Descriptor d = compute_descriptor(space, kp);
    EXPECT_EQ(d.size(), 128u);
    double n = 0.0;
    for (double v : d) {
      EXPECT_GE(v, 0.0);
      n += v * v;
    }
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-9);
  }
}

TEST(SiftTest, DescriptorSurvivesQuarterTurn) {
  // An asymmetric blob pair gives a well-defined dominant orientation. An odd
  // side of 81 makes the quarter turn map every octave grid onto itself.
  Plane p(81, 81, 0.3);
  add_blob(p, 40.0, 40.0, 4.0, 0.5);
  add_blob(p, 40.0, 47.0, 2.0, 0.3);
  const Plane q = rotate90(p);

  const ScaleSpace sp(p), sq(q);
  const auto kp = detect_keypoints(sp), kq = detect_keypoints(sq);
  ASSERT_FALSE(kp.empty());
  ASSERT_FALSE(kq.empty());
  const Keypoint& a = *std::max_element(kp.begin(), kp.end(), [](const auto& l, const auto& r) {
    return std::abs(l.response) < std::abs(r.response);
  });
  // Where the same point lands after rotating by 90 degrees.
  const double ex = 80.0 - a.y, ey = a.x;
  const Keypoint* best = nullptr;
  for (const auto& k : kq) {
    if (std::hypot(k.x - ex, k.y - ey) > 2.0 || std::abs(std::log(k.scale / a.scale)) > 0.3) continue;
    if (!best || std::abs(k.response) > std::abs(best->response)) best = &k;
  }
  ASSERT_NE(best, nullptr);
  EXPECT_GE(cosine(compute_descriptor(sp, a), compute_descriptor(sq, *best)), 0.7);
}

std::vector<Descriptor> random_descriptors(std::size_t n, Rng& rng) {
  std::vector<Descriptor> out(n);
  for (auto& d : out)
    for (double& v : d) v = rng.uniform();
  return out;
}

TEST(BowTest, ObjectiveNeverIncreases) {
  Rng rng(6);
  const auto d = random_descriptors(400, rng);
  KMeansConfig cfg;
  cfg.k = 8;
  const BowCodebook cb = build_codebook(d, cfg);
  ASSERT_EQ(cb.k(), 8u);
  ASSERT_GE(cb.objective_history.size(), 2u);
  for (std::size_t i = 1; i < cb.objective_history.size(); ++i) {
    EXPECT_LE(cb.objective_history[i], cb.objective_history[i - 1] * (1.0 + 1e-12));
  }
}

TEST(BowTest, ExactlyKPointsGiveZeroObjective) {
  Rng rng(7);
  const auto d = random_descriptors(5, rng);
  KMeansConfig cfg;
  cfg.k = 5;
  EXPECT_DOUBLE_EQ(build_codebook(d, cfg).objective_history.back(), 0.0);
}

TEST(BowTest, TooFewDescriptorsRejected) {
  Rng rng(8);
  const auto d = random_descriptors(4, rng);
  KMeansConfig cfg;
  cfg.k = 5;
  EXPECT_THROW(build_codebook(d, cfg), std::invalid_argument);
}

TEST(BowTest, SameSeedSameCodebook) {
  Rng rng(9);
  const auto d = random_descriptors(300, rng);
  KMeansConfig cfg;
  cfg.k = 6;
  EXPECT_EQ(build_codebook(d, cfg).centroids, build_codebook(d, cfg).centroids);
}

TEST(BowTest, HistogramContract) {
  Rng rng(10);
  const auto train = random_descriptors(200, rng);
  KMeansConfig cfg;
  cfg.k = 6;
  const BowCodebook cb = build_codebook(train, cfg);

  auto d = random_descriptors(37, rng);
  const BowHistogram h = bow_histogram(d, cb);
  EXPECT_FALSE(h.no_keypoints);
  ASSERT_EQ(h.bins.size(), 6u);
  double sum = 0.0;
  for (double v : h.bins) {
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);

  std::reverse(d.begin(), d.end());
  std::rotate(d.begin(), d.begin() + 11, d.end());
  EXPECT_EQ(bow_histogram(d, cb).bins, h.bins);

  const BowHistogram empty = bow_histogram(std::span<const Descriptor>{}, cb);
  EXPECT_TRUE(empty.no_keypoints);
  EXPECT_EQ(empty.bins, std::vector<double>(6, 0.0));
}

struct Toy {
  std::vector<FeatureVector> x;
  std::vector<ClassLabel> labels;
};

Toy toy_set() {
  Toy t;
  Rng rng(11);
  for (int i = 0; i < 60; ++i) {
    const bool pos = i % 2 == 0;
    const double c = pos ? 1.5 : -1.5;
    t.x.push_back({c + rng.uniform(-1.0, 1.0), c + rng.uniform(-1.0, 1.0)});
    t.labels.push_back(pos ? ClassLabel::kCrypto : ClassLabel::kOthers);
  }
  return t;
}

std::size_t argmax(const std::array<double, kNumClasses>& p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

TEST(SvmTest, SeparableToySetIsLearnedExactly) {
  const Toy t = toy_set();
  const ScoredSvmModel m = train_scored_svm(t.x, t.labels, SvmConfig{});
  ASSERT_TRUE(m.trained());
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    const auto p = m.predict_proba(t.x[i]);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    EXPECT_EQ(argmax(p), class_index(t.labels[i])) << "sample " << i;
  }
}

TEST(SvmTest, SingleClassRejected) {
  Toy t = toy_set();
  std::fill(t.labels.begin(), t.labels.end(), ClassLabel::kGiardia);
  EXPECT_THROW(train_scored_svm(t.x, t.labels, SvmConfig{}), std::invalid_argument);
}

TEST(SvmTest, TrainingIsDeterministic) {
  const Toy t = toy_set();
  const ScoredSvmModel a = train_scored_svm(t.x, t.labels, SvmConfig{});
  const ScoredSvmModel b = train_scored_svm(t.x, t.labels, SvmConfig{});
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    EXPECT_EQ(a.machines[c].weights, b.machines[c].weights);
    EXPECT_EQ(a.machines[c].bias, b.machines[c].bias);
    EXPECT_EQ(a.calibration[c].a, b.calibration[c].a);
    EXPECT_EQ(a.calibration[c].b, b.calibration[c].b);
  }
}

TEST(PlattTest, MonotoneCalibrationAndDescendingLikelihood) {
  Rng rng(12);
  std::vector<double> scores;
  std::vector<bool> positive;
  for (int i = 0; i < 200; ++i) {
    const bool pos = rng.bernoulli(0.5);
    scores.push_back((pos ? 0.8 : -0.8) + rng.normal());
    positive.push_back(pos);
  }
  const PlattFit fit = fit_platt(scores, positive);
  ASSERT_GE(fit.nll_history.size(), 2u);
  for (std::size_t i = 1; i < fit.nll_history.size(); ++i) {
    EXPECT_LE(fit.nll_history[i], fit.nll_history[i - 1]);
  }
  EXPECT_LT(fit.sigmoid.a, 0.0);
  double prev = 0.0;
  for (double s = -5.0; s <= 5.0; s += 0.25) {
    const double p = fit.sigmoid(s);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
    EXPECT_GT(p, prev);
    prev = p;
  }
}

TEST(NaiveBayesTest, PrefersClassWithNearestMean) {
  const Toy t = toy_set();
  const GaussianNaiveBayes nb = train_naive_bayes(t.x, t.labels);
  const auto crypto = nb.log_posterior({1.5, 1.5});
  const auto others = nb.log_posterior({-1.5, -1.5});
  EXPECT_EQ(argmax(crypto), class_index(ClassLabel::kCrypto));
  EXPECT_EQ(argmax(others), class_index(ClassLabel::kOthers));
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    synth::GenConfig g;
    g.train_per_class = {12, 12, 12};
    g.test_per_class = {4, 4, 4};
    train_ = new Dataset(synth::gen_split(g, synth::Split::kTrain, 1));
    test_ = new Dataset(synth::gen_split(g, synth::Split::kTest, 1));
    model_ = new BaselineModel(train_baseline(*train_, config(), 1));
  }
  static void TearDownTestSuite() {
    delete model_;
    delete train_;
    delete test_;
  }
  static BaselineConfig config() {
    BaselineConfig cfg;
    cfg.kmeans.k = 8;
    cfg.codebook_sample = 2000;
    cfg.svm.epochs = 20;
    return cfg;
  }

  static Dataset* train_;
  static Dataset* test_;
  static BaselineModel* model_;
};

Dataset* PipelineTest::train_ = nullptr;
Dataset* PipelineTest::test_ = nullptr;
BaselineModel* PipelineTest::model_ = nullptr;

TEST_F(PipelineTest, ProbabilitiesSumToOne) {
  ASSERT_TRUE(model_->trained());
  for (const auto& s : *test_) {
    const BaselinePrediction p = classify_baseline(s.pixels, *model_);
    EXPECT_NEAR(std::accumulate(p.probs.begin(), p.probs.end(), 0.0), 1.0, 1e-6);
    EXPECT_EQ(argmax(p.probs), class_index(p.label));
  }
}

TEST_F(PipelineTest, FeaturelessImageIsOthers) {
  const BaselinePrediction p = classify_baseline(to_tensor(Plane(244, 324, 0.5)), *model_);
  EXPECT_TRUE(p.no_keypoints);
  EXPECT_EQ(p.label, ClassLabel::kOthers);
  EXPECT_EQ(p.probs[class_index(ClassLabel::kOthers)], 1.0);
}

TEST_F(PipelineTest, UntrainedModelRejected) {
  EXPECT_THROW(classify_baseline(test_->front().pixels, BaselineModel{}), std::logic_error);
}

TEST_F(PipelineTest, TrainingIsDeterministicAcrossThreads) {
  const auto ref = encode_baseline(*model_);
  EXPECT_EQ(encode_baseline(train_baseline(*train_, config(), 1)), ref);
  EXPECT_EQ(encode_baseline(train_baseline(*train_, config(), 3)), ref);
}

TEST_F(PipelineTest, ModelFileRoundTrip) {
  const auto bytes = encode_baseline(*model_);
  const BaselineModel back = decode_baseline(bytes);
  EXPECT_EQ(encode_baseline(back), bytes);
  for (const auto& s : *test_) {
    EXPECT_EQ(classify_baseline(s.pixels, back).probs, classify_baseline(s.pixels, *model_).probs);
  }

  const auto path = std::filesystem::temp_directory_path() / "parasnet_baseline_test.bin";
  save_baseline(*model_, path);
  EXPECT_EQ(encode_baseline(load_baseline(path)), bytes);
  std::filesystem::remove(path);
}

TEST_F(PipelineTest, CorruptModelFilesRejected) {
  const auto bytes = encode_baseline(*model_);
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_THROW(decode_baseline(std::span(bytes).first(cut)), BaselineModelError) << "cut " << cut;
  }
  auto bad_magic = bytes;
  bad_magic[0] ^= 0xFF;
  EXPECT_THROW(decode_baseline(bad_magic), BaselineModelError);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(decode_baseline(trailing), BaselineModelError);

  const std::filesystem::path missing = "/nonexistent/baseline.bin";
  try {
    load_baseline(missing);
    FAIL() << "expected BaselineModelError";
  } catch (const BaselineModelError& e) {
    EXPECT_NE(std::string(e.what()).find(missing.string()), std::string::npos);
  }
}

}  // namespace
}  // namespace parasnet::baseline
