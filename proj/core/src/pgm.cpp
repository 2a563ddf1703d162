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

#include "parasnet/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <limits>

namespace parasnet {
namespace {

class HeaderParser {
 public:
  HeaderParser(std::span<const std::uint8_t> bytes, const std::string& name)
      : bytes_(bytes), name_(name) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw PgmError(name_ + ": malformed PGM header: " + msg);
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t number(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail(std::string("expected ") + what);
    std::uint64_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > std::numeric_limits<std::uint32_t>::max()) fail(std::string(what) + " too large");
    }
    return v;
  }

  std::size_t pos_ = 0;
  std::span<const std::uint8_t> bytes_;

 private:
  std::string name_;
};

}  // namespace

PgmImage decode_pgm(std::span<const std::uint8_t> bytes, const std::string& name) {
  HeaderParser p(bytes, name);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') p.fail("missing P5 magic");
  p.pos_ = 2;
  PgmImage img;
  img.width = p.number("width");
  img.height = p.number("height");
  const auto maxval = p.number("maxval");
  if (img.width == 0 || img.height == 0) p.fail("zero image dimension");
  if (maxval == 0 || maxval > 65535) p.fail("maxval must be in 1..65535");
  img.maxval = static_cast<std::uint32_t>(maxval);
  if (p.pos_ >= bytes.size() || !std::isspace(bytes[p.pos_])) p.fail("missing whitespace after maxval");
  ++p.pos_;

  const std::size_t bps = img.maxval < 256 ? 1 : 2;
  const std::size_t n = img.width * img.height;
  if (bytes.size() - p.pos_ < n * bps) {
    throw PgmError(name + ": truncated PGM raster: expected " + std::to_string(n * bps) +
                   " bytes, found " + std::to_string(bytes.size() - p.pos_));
  }
  img.samples.resize(n);
  const std::uint8_t* d = bytes.data() + p.pos_;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t v = bps == 1 ? d[i] : static_cast<std::uint16_t>((d[2 * i] << 8) | d[2 * i + 1]);
    if (v > img.maxval) throw PgmError(name + ": sample exceeds maxval");
    img.samples[i] = v;
  }
  return img;
}

std::vector<std::uint8_t> encode_pgm(const PgmImage& image) {
  if (image.samples.size() != image.width * image.height) {
    throw PgmError("encode_pgm: sample count does not match dimensions");
  }
  const std::string header = "P5\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n" + std::to_string(image.maxval) +
                             "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const bool wide = image.maxval >= 256;
  out.reserve(out.size() + image.samples.size() * (wide ? 2 : 1));
  for (std::uint16_t v : image.samples) {
    if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_pgm(bytes, path.string());
}

void write_pgm(const std::filesystem::path& path, const PgmImage& image) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PgmError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PgmError("failed writing " + path.string());
}

}  // namespace parasnet
