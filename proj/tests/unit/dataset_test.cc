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
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "parasnet/dataset.hpp"
#include "parasnet/model.hpp"
#include "parasnet/pgm.hpp"

namespace parasnet {
namespace {

namespace fs = std::filesystem;

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(fs::temp_directory_path() /
              ("parasnet_ds_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST(PgmTest, EncodeDecodeRoundTrip) {
  PgmImage img{3, 2, 255, {0, 1, 2, 253, 254, 255}};
  const auto back = decode_pgm(encode_pgm(img));
  EXPECT_EQ(back.width, 3u);
  EXPECT_EQ(back.height, 2u);
  EXPECT_EQ(back.samples, img.samples);
}

TEST(PgmTest, HeaderCommentsAndSixteenBitSamples) {
  std::string raw = "P5\n# made by hand\n2 1\n# depth\n1000\n";
  raw += std::string{'\x03', '\xe8', '\x00', '\x07'};
  const auto img = decode_pgm(bytes_of(raw));
  EXPECT_EQ(img.maxval, 1000u);
  EXPECT_EQ(img.samples, (std::vector<std::uint16_t>{1000, 7}));
}

TEST(PgmTest, MalformedInputsNamed) {
  for (const std::string raw : {"P2\n1 1\n255\n\x01", "P5\n1\n", "P5\n0 4\n255\n", "P5\n2 2\n255\nab",
                                "P5\n1 1\n70000\n\x01\x01"}) {
    const std::string what = error_of([&] { decode_pgm(bytes_of(raw), "probe.pgm"); });
    EXPECT_NE(what.find("probe.pgm"), std::string::npos) << what;
  }
  const std::string what = error_of([] { decode_pgm(bytes_of("P5\n1 1\n10\n\x0b"), "x.pgm"); });
  EXPECT_NE(what.find("maxval"), std::string::npos);
}

TEST(DownscaleTest, AreaAverage) {
  Tensor t({2, 4, 1}, std::vector<float>{0, 1, 2, 3, 4, 5, 6, 7});
  const Tensor d = downscale_2x(t);
  EXPECT_EQ(d.shape(), (Shape{1, 2, 1}));
  EXPECT_FLOAT_EQ(d[0], 2.5f);
  EXPECT_FLOAT_EQ(d[1], 4.5f);
}

Tensor ramp_image(std::size_t h, std::size_t w, std::uint32_t salt) {
  Tensor t({h, w, 1});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>((i * 31 + salt) % 1000) / 999.0f;
  return t;
}

TEST(DatasetIoTest, WriteReadRoundTripWithinQuantization) {
  TempDir dir("roundtrip");
  Dataset ds;
  for (std::uint32_t i = 0; i < 6; ++i) {
    ds.push_back({ramp_image(kInputHeight, kInputWidth, i), class_from_index(i % 3), "s"});
  }
  write_dataset(ds, dir.path(), {"test-gen", 7, "train"});
  EXPECT_TRUE(fs::exists(dir.path() / "manifest.txt"));
  EXPECT_TRUE(fs::exists(dir.path() / "crypto" / "00000.pgm"));
  const Dataset back = read_dataset(dir.path());
  ASSERT_EQ(back.size(), ds.size());
  EXPECT_EQ(class_counts(back), (std::array<std::size_t, 3>{2, 2, 2}));
  // Files come back class by class, in write order within a class.
  std::array<std::size_t, 3> seen{};
  for (const auto& s : back) {
    const std::size_t c = class_index(s.label);
    const auto& orig = ds[c + 3 * seen[c]++];
    for (std::size_t i = 0; i < orig.pixels.size(); ++i) {
      ASSERT_LE(std::abs(orig.pixels[i] - s.pixels[i]), 0.5f / 255.0f + 1e-6f);
    }
  }
}

TEST(DatasetIoTest, FullResolutionFilesAreDownscaled) {
  TempDir dir("fullres");
  for (const char* c : {"others", "crypto", "giardia"}) {
    fs::create_directories(dir.path() / c);
    PgmImage img{648, 488, 255, std::vector<std::uint16_t>(648 * 488, 51)};
    write_pgm(dir.path() / c / "00000.pgm", img);
  }
  const Dataset back = read_dataset(dir.path());
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].pixels.shape(), (Shape{244, 324, 1}));
  EXPECT_FLOAT_EQ(back[0].pixels[100], 0.2f);
}

TEST(DatasetIoTest, WrongSizeRejectedWithFileName) {
  TempDir dir("badsize");
  for (const char* c : {"others", "crypto", "giardia"}) {
    fs::create_directories(dir.path() / c);
    write_pgm(dir.path() / c / "00000.pgm", PgmImage{324, 244, 255, std::vector<std::uint16_t>(324 * 244)});
  }
  write_pgm(dir.path() / "crypto" / "00001.pgm", PgmImage{10, 10, 255, std::vector<std::uint16_t>(100)});
  const std::string what = error_of([&] { read_dataset(dir.path()); });
  EXPECT_NE(what.find("00001.pgm"), std::string::npos) << what;
}

TEST(DatasetIoTest, EmptyClassDirectoryRejectedWithClassName) {
  TempDir dir("empty");
  for (const char* c : {"others", "crypto", "giardia"}) fs::create_directories(dir.path() / c);
  write_pgm(dir.path() / "others" / "00000.pgm", PgmImage{324, 244, 255, std::vector<std::uint16_t>(324 * 244)});
  const std::string what = error_of([&] { read_dataset(dir.path()); });
  EXPECT_NE(what.find("crypto"), std::string::npos) << what;
}

TEST(DatasetIoTest, MissingRootRejected) {
  EXPECT_THROW(read_dataset("/nonexistent/parasnet/data"), DatasetError);
}

}  // namespace
}  // namespace parasnet
