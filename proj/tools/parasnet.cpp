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


// parasnet: dataset generation, training, evaluation, filter sweep, t-SNE
// embedding, the SIFT baseline and throughput benchmarks.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "parasnet/baseline/pipeline.hpp"
#include "parasnet/bench.hpp"
#include "parasnet/checkpoint.hpp"
#include "parasnet/classifier.hpp"
#include "parasnet/dataset.hpp"
#include "parasnet/embed.hpp"
#include "parasnet/eval.hpp"
#include "parasnet/sweep.hpp"
#include "parasnet/synth.hpp"
#include "parasnet/trainer.hpp"
#include "parasnet/tsne.hpp"

namespace fs = std::filesystem;

namespace parasnet::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 7;
constexpr const char* kOutDirEnv = "PARASNET_OUT_DIR";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::size_t threads = 0;
  std::string out_dir = ".";
};

fs::path output_path(const Common& common, const std::string& given, const std::string& fallback) {
  fs::path p = given.empty() ? fs::path(common.out_dir) / fallback : fs::path(given);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + p.parent_path().string());
  }
  return p;
}

void require_dir(const fs::path& p, const char* what) {
  if (!fs::is_directory(p)) throw std::runtime_error(std::string(what) + " not found: " + p.string());
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw std::runtime_error(std::string(what) + " not found: " + p.string());
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void print_accuracy(const eval::ConfusionMatrix& cm) {
  const auto acc = eval::per_class_accuracy(cm);
  std::printf("overall accuracy %.4f\n", cm.overall_accuracy());
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::printf("  %-8s accuracy %.4f  (row:", std::string(kClassDirNames[c]).c_str(), acc[c]);
    for (std::size_t j = 0; j < kNumClasses; ++j) std::printf(" %llu", static_cast<unsigned long long>(cm.counts()[c][j]));
    std::printf(")\n");
  }
}

std::string describe_fit(const train::FitConfig& f, std::size_t filters) {
  std::ostringstream s;
  s << "filters=" << filters << "\nepochs=" << f.epochs
    << "\nbatch_size=" << f.batch_size << "\nseed=" << f.seed << "\naugment=" << (f.augment.enabled ? 1 : 0)
    << "\nlearning_rate=" << f.adam.learning_rate << "\nlr_decay=" << f.adam.decay << "\n";
  return s.str();
}

struct TrainOptions {
  std::string data;
  std::size_t filters = 8;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::uint64_t seed = kDefaultSeed;
  bool no_augment = false;
  double learning_rate = 1e-3;
  double lr_decay = 0.9999;
  double stop_at = 0.0;
};

void add_train_options(CLI::App* app, TrainOptions& o) {
  app->add_option("--data", o.data, "Dataset root holding train/ and test/")->required();
  app->add_option("--epochs", o.epochs, "Training epochs")->check(CLI::PositiveNumber);
  app->add_option("--batch-size", o.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "Seed for initialization, shuffling, augmentation and dropout");
  app->add_flag("--no-augment", o.no_augment, "Disable data augmentation");
  app->add_option("--lr", o.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber);
  app->add_option("--lr-decay", o.lr_decay, "Per-step learning-rate decay factor")->check(CLI::Range(0.0, 1.0));
  app->add_option("--stop-at", o.stop_at, "Stop after the first epoch reaching this test accuracy (0 = off)")
      ->check(CLI::Range(0.0, 1.0));
}

train::FitConfig fit_config(const TrainOptions& o, std::size_t threads) {
  train::FitConfig f;
  f.epochs = o.epochs;
  f.batch_size = o.batch_size;
  f.seed = o.seed;
  f.threads = threads;
  if (o.no_augment) f.augment = train::AugmentConfig::disabled();
  f.adam.learning_rate = o.learning_rate;
  f.adam.decay = o.lr_decay;
  if (o.stop_at > 0.0) f.stop_at_accuracy = o.stop_at;
  return f;
}

std::pair<Dataset, Dataset> load_splits(const std::string& root) {
  require_dir(root, "dataset root");
  require_dir(fs::path(root) / "train", "training split");
  require_dir(fs::path(root) / "test", "test split");
  return {read_dataset(fs::path(root) / "train"), read_dataset(fs::path(root) / "test")};
}

Dataset load_split(const std::string& root, const std::string& split) {
  require_dir(root, "dataset root");
  const fs::path p = fs::path(root) / split;
  require_dir(p, "dataset split");
  return read_dataset(p);
}

void print_epoch(const train::EpochStats& s) {
  std::printf("epoch %3zu  loss %.5f  test_acc %.4f  %.1fs\n", s.epoch, s.train_loss, s.test_accuracy,
              s.seconds);
  std::fflush(stdout);
}

void echo_options(const CLI::App& app, const std::string& prefix) {
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "-h,--help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else if (opt->get_expected_min() == 0) {
      value = "false";
    } else {
      value = opt->get_default_str();
    }
    std::string name = opt->get_single_name();
    std::printf("%s%s = %s\n", prefix.c_str(), name.c_str(), value.c_str());
  }
}

void echo_config(const CLI::App& app) {
  std::printf("# resolved configuration\n");
  echo_options(app, "");
  for (const CLI::App* sub : app.get_subcommands()) echo_options(*sub, sub->get_name() + ".");
  std::fflush(stdout);
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"ParasNet: CNN and SIFT+SVM classifiers for scattering images of waterborne parasites",
               "parasnet"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Common common;
  if (const char* env = std::getenv(kOutDirEnv)) common.out_dir = env;
  app.add_option("--threads", common.threads, "Worker threads (0 = all cores; 1 = fully serial)");
  app.add_option("--out-dir", common.out_dir,
                 std::string("Default directory for outputs (env ") + kOutDirEnv + ")");

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset (train/ and test/ PGM trees)");
  std::string gen_out;
  std::uint64_t gen_seed = kDefaultSeed;
  bool gen_full_scale = false, gen_full_res = false;
  std::size_t gen_train = 0, gen_test = 0;
  gen->add_option("--out", gen_out, "Output dataset root")->required();
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_flag("--full-scale", gen_full_scale, "5000/1000 images per class instead of 300/100");
  gen->add_option("--train-per-class", gen_train, "Override training images per class");
  gen->add_option("--test-per-class", gen_test, "Override test images per class");
  gen->add_flag("--full-resolution", gen_full_res, "Write 648x488 images");

  // train
  auto* tr = app.add_subcommand("train", "Train ParasNet; writes a checkpoint and a per-epoch CSV");
  TrainOptions topt;
  std::string tr_ckpt, tr_report;
  add_train_options(tr, topt);
  tr->add_option("--filters", topt.filters, "Filters per conv layer (F)")->check(CLI::PositiveNumber);
  tr->add_option("--ckpt", tr_ckpt, "Checkpoint path (default <out-dir>/parasnet.pnet)");
  tr->add_option("--report", tr_report, "Report CSV (default <out-dir>/train_report.csv)");

  // eval
  auto* ev = app.add_subcommand("eval", "Confusion matrix of a checkpoint on a dataset split");
  std::string ev_ckpt, ev_data, ev_split = "test", ev_out;
  std::size_t ev_batch = 32;
  ev->add_option("--ckpt", ev_ckpt, "Checkpoint")->required();
  ev->add_option("--data", ev_data, "Dataset root")->required();
  ev->add_option("--split", ev_split, "Split directory")->check(CLI::IsMember({"train", "test"}));
  ev->add_option("--batch-size", ev_batch, "Inference batch size")->check(CLI::PositiveNumber);
  ev->add_option("--out", ev_out, "Confusion CSV (default <out-dir>/confusion.csv)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Best test accuracy per filter count");
  TrainOptions sopt;
  sopt.epochs = 10;
  std::vector<std::size_t> sw_filters = {2, 4, 8, 16};
  std::string sw_out;
  add_train_options(sw, sopt);
  sw->add_option("--filters-list", sw_filters, "Ascending filter counts")->delimiter(',');
  sw->add_option("--out", sw_out, "Sweep CSV (default <out-dir>/sweep.csv)");

  // embed
  auto* em = app.add_subcommand("embed", "t-SNE of the last hidden layer on a dataset split");
  std::string em_ckpt, em_data, em_split = "test", em_out;
  tsne::TsneConfig em_cfg;
  em->add_option("--ckpt", em_ckpt, "Checkpoint")->required();
  em->add_option("--data", em_data, "Dataset root")->required();
  em->add_option("--split", em_split, "Split directory")->check(CLI::IsMember({"train", "test"}));
  em->add_option("--perplexity", em_cfg.perplexity, "Perplexity")->check(CLI::PositiveNumber);
  em->add_option("--iterations", em_cfg.iterations, "Gradient-descent iterations")->check(CLI::PositiveNumber);
  em->add_option("--seed", em_cfg.seed, "Seed for the initial layout");
  em->add_option("--out", em_out, "Embedding CSV (default <out-dir>/embedding.csv)");

  // baseline-train
  auto* bt = app.add_subcommand("baseline-train", "Train the SIFT + bag-of-words + SVM + naive Bayes baseline");
  std::string bt_data, bt_out;
  baseline::BaselineConfig bt_cfg;
  std::uint64_t bt_seed = kDefaultSeed;
  bt->add_option("--data", bt_data, "Dataset root")->required();
  bt->add_option("--k", bt_cfg.kmeans.k, "Visual words")->check(CLI::Range(2, 4096));
  bt->add_option("--seed", bt_seed, "Seed for k-means and SVM shuffling");
  bt->add_option("--lambda", bt_cfg.svm.lambda, "SVM L2 regularization")->check(CLI::PositiveNumber);
  bt->add_option("--svm-epochs", bt_cfg.svm.epochs, "SVM passes over the data")->check(CLI::PositiveNumber);
  bt->add_option("--contrast-threshold", bt_cfg.sift.contrast_threshold, "SIFT DoG contrast threshold");
  bt->add_option("--edge-ratio", bt_cfg.sift.edge_ratio, "SIFT edge ratio")->check(CLI::PositiveNumber);
  bt->add_option("--out", bt_out, "Model path (default <out-dir>/baseline.bin)");

  // baseline-eval
  auto* be = app.add_subcommand("baseline-eval", "Confusion matrix of the baseline on a dataset split");
  std::string be_model, be_data, be_split = "test", be_out;
  be->add_option("--model", be_model, "Baseline model")->required();
  be->add_option("--data", be_data, "Dataset root")->required();
  be->add_option("--split", be_split, "Split directory")->check(CLI::IsMember({"train", "test"}));
  be->add_option("--out", be_out, "Confusion CSV (default <out-dir>/baseline_confusion.csv)");

  // bench
  auto* bn = app.add_subcommand("bench", "Single-image inference throughput (single-threaded)");
  std::string bn_ckpt, bn_model, bn_data, bn_out;
  std::size_t bn_warmup = 5, bn_iters = 50, bn_images = 32;
  bn->add_option("--ckpt", bn_ckpt, "ParasNet checkpoint");
  bn->add_option("--baseline", bn_model, "Baseline model");
  bn->add_option("--data", bn_data, "Dataset root (test split images are used)")->required();
  bn->add_option("--warmup", bn_warmup, "Untimed warmup calls")->check(CLI::Range(1, 1000000));
  bn->add_option("--iters", bn_iters, "Timed calls")->check(CLI::Range(10, 100000000));
  bn->add_option("--images", bn_images, "Distinct images cycled through")->check(CLI::PositiveNumber);
  bn->add_option("--out", bn_out, "Report CSV (default <out-dir>/bench.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
      msg = std::string("unknown subcommand: ") + argv[1];
    }
    std::cerr << app.help() << "\nparasnet: error: " << msg << "\n";
    return 2;
  }

  echo_config(app);

  if (gen->parsed()) {
    synth::GenConfig cfg = gen_full_scale ? synth::GenConfig::full_scale() : synth::GenConfig{};
    cfg.seed = gen_seed;
    cfg.full_resolution = gen_full_res;
    if (gen_train > 0) cfg.train_per_class.fill(gen_train);
    if (gen_test > 0) cfg.test_per_class.fill(gen_test);
    cfg.validate();
    for (auto split : {synth::Split::kTrain, synth::Split::kTest}) {
      const std::string name = split == synth::Split::kTrain ? "train" : "test";
      const Dataset d = synth::gen_split(cfg, split, common.threads);
      write_dataset(d, fs::path(gen_out) / name, {synth::kGeneratorVersion, gen_seed, name});
      std::printf("wrote %zu images to %s\n", d.size(), (fs::path(gen_out) / name).string().c_str());
    }
    return 0;
  }

  if (tr->parsed()) {
    const fs::path ckpt = output_path(common, tr_ckpt, "parasnet.pnet");
    const fs::path report_path = output_path(common, tr_report, "train_report.csv");
    const auto [train_set, test_set] = load_splits(topt.data);
    const train::FitConfig fc = fit_config(topt, common.threads);
    ParasNet model = build_model(topt.filters, topt.seed);
    std::printf("training F=%zu (%zu parameters) on %zu images, testing on %zu\n", topt.filters,
                model.parameter_count(), train_set.size(), test_set.size());
    const train::TrainReport report = train::fit(model, train_set, test_set, fc, print_epoch);
    std::ostringstream meta;
    meta << describe_fit(fc, topt.filters) << "best_accuracy=" << report.best_accuracy() << "\n";
    save_checkpoint(model, ckpt, meta.str());
    auto out = open_output(report_path);
    train::write_report_csv(report, out);
    print_accuracy(report.final_confusion);
    std::printf("checkpoint %s\nreport %s\n", ckpt.string().c_str(), report_path.string().c_str());
    return 0;
  }

  if (ev->parsed()) {
    require_file(ev_ckpt, "checkpoint");
    const fs::path out_path = output_path(common, ev_out, "confusion.csv");
    const Checkpoint ck = load_checkpoint(ev_ckpt);
    const Dataset set = load_split(ev_data, ev_split);
    const ParasNetClassifier clf(ck.model);
    const auto cm = eval::evaluate(clf, set, ev_batch, common.threads);
    auto out = open_output(out_path);
    eval::write_confusion_csv(cm, out);
    print_accuracy(cm);
    return 0;
  }

  if (sw->parsed()) {
    const fs::path out_path = output_path(common, sw_out, "sweep.csv");
    const auto [train_set, test_set] = load_splits(sopt.data);
    const auto rows = eval::filter_sweep(
        sw_filters, train_set, test_set, fit_config(sopt, common.threads), sopt.seed,
        [](std::size_t f, const train::EpochStats& s) {
          std::printf("F=%-3zu ", f);
          print_epoch(s);
        });
    auto out = open_output(out_path);
    eval::write_sweep_csv(rows, out);
    for (const auto& r : rows) std::printf("F=%zu params=%zu best_acc=%.4f\n", r.filters, r.params, r.accuracy);
    return 0;
  }

  if (em->parsed()) {
    require_file(em_ckpt, "checkpoint");
    const fs::path out_path = output_path(common, em_out, "embedding.csv");
    const Checkpoint ck = load_checkpoint(em_ckpt);
    const Dataset set = load_split(em_data, em_split);
    const auto features = eval::hidden_features(ck.model, set, common.threads);
    const auto result = tsne::tsne_embed(features, em_cfg);
    std::vector<ClassLabel> labels;
    std::vector<int> ids;
    for (const auto& s : set) {
      labels.push_back(s.label);
      ids.push_back(static_cast<int>(class_index(s.label)));
    }
    auto out = open_output(out_path);
    eval::write_embedding_csv(result.coords, labels, out);
    std::printf("points %zu  KL %.5f  silhouette %.4f\n", set.size(), result.kl,
                tsne::silhouette(result.coords, ids));
    return 0;
  }

  if (bt->parsed()) {
    const fs::path out_path = output_path(common, bt_out, "baseline.bin");
    bt_cfg.kmeans.seed = bt_seed;
    bt_cfg.svm.seed = bt_seed;
    const Dataset train_set = load_split(bt_data, "train");
    const auto model = baseline::train_baseline(train_set, bt_cfg, common.threads);
    baseline::save_baseline(model, out_path);
    std::printf("baseline model %s\n", out_path.string().c_str());
    return 0;
  }

  if (be->parsed()) {
    require_file(be_model, "baseline model");
    const fs::path out_path = output_path(common, be_out, "baseline_confusion.csv");
    const auto model = baseline::load_baseline(be_model);
    const Dataset set = load_split(be_data, be_split);
    const baseline::BaselineClassifier clf(model);
    const auto cm = eval::evaluate(clf, set, 32, common.threads);
    auto out = open_output(out_path);
    eval::write_confusion_csv(cm, out);
    print_accuracy(cm);
    return 0;
  }

  if (bn->parsed()) {
    if (bn_ckpt.empty() && bn_model.empty()) throw UsageError("bench needs --ckpt and/or --baseline");
    if (!bn_ckpt.empty()) require_file(bn_ckpt, "checkpoint");
    if (!bn_model.empty()) require_file(bn_model, "baseline model");
    const fs::path out_path = output_path(common, bn_out, "bench.csv");
    const Dataset set = load_split(bn_data, "test");
    std::vector<Tensor> images;
    for (std::size_t i = 0; i < set.size() && i < bn_images; ++i) images.push_back(set[i].pixels);
    std::vector<eval::BenchReport> reports;
    std::optional<Checkpoint> ck;
    std::optional<baseline::BaselineModel> bm;
    if (!bn_ckpt.empty()) {
      ck = load_checkpoint(bn_ckpt);
      reports.push_back(eval::benchmark(ParasNetClassifier(ck->model), images, bn_warmup, bn_iters));
    }
    if (!bn_model.empty()) {
      bm = baseline::load_baseline(bn_model);
      reports.push_back(eval::benchmark(baseline::BaselineClassifier(*bm), images, bn_warmup, bn_iters));
    }
    auto out = open_output(out_path);
    eval::write_bench_csv(reports, out);
    for (const auto& r : reports) {
      std::printf("%-14s %8.2f fps  p50 %.2f ms  p90 %.2f ms  p99 %.2f ms\n", r.classifier.c_str(), r.fps,
                  r.p50_ms, r.p90_ms, r.p99_ms);
    }
    if (reports.size() == 2) std::printf("speedup %.2fx\n", reports[0].fps / reports[1].fps);
    return 0;
  }
  return 2;
}

}  // namespace parasnet::cli

int main(int argc, char** argv) {
  try {
    return parasnet::cli::run(argc, argv);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "parasnet: error: " << msg << "\n";
    return 1;
  }
}
