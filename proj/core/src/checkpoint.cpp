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

#include "parasnet/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include "parasnet/io_bytes.hpp"

namespace parasnet {
namespace {

constexpr char kMagic[4] = {'P', 'N', 'E', 'T'};
constexpr std::size_t kHeaderBytes = 12;
constexpr std::uint32_t kMaxFilters = 4096;
constexpr std::string_view kSeedKey = "init_seed=";
constexpr std::string_view kDigestKey = "params_fnv1a=";

// FNV-1a over the serialized parameter bytes.
std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Removes and returns the value of `key` if it is the first line of `meta`.
std::optional<std::string> take_line(std::string& meta, std::string_view key) {
  if (!meta.starts_with(key)) return std::nullopt;
  const auto eol = meta.find('\n');
  std::string value = meta.substr(key.size(), eol == std::string::npos ? eol : eol - key.size());
  meta = eol == std::string::npos ? std::string() : meta.substr(eol + 1);
  return value;
}

[[noreturn]] void truncated(std::size_t have, std::size_t need, const char* section) {
  throw CheckpointError(CheckpointError::Kind::kTruncated,
                        "checkpoint truncated in " + std::string(section) + ": missing " +
                            std::to_string(need - have) + " bytes (have " + std::to_string(have) +
                            ", need " + std::to_string(need) + ")");
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const ParasNet& model, std::string_view metadata) {
  ByteWriter w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(model.filters()));
  for (const Tensor& t : model.params()) {
    for (float v : t.data()) w.f32(v);
  }
  const std::uint64_t digest = fnv1a(std::span<const std::uint8_t>(w.buffer()).subspan(kHeaderBytes));
  const std::string meta = std::string(kSeedKey) + std::to_string(model.init_seed()) + "\n" +
                           std::string(kDigestKey) + hex64(digest) + "\n" + std::string(metadata);
  w.u32(static_cast<std::uint32_t>(meta.size()));
  w.bytes(meta.data(), meta.size());
  return w.take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) truncated(bytes.size(), kHeaderBytes, "header");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError(CheckpointError::Kind::kBadMagic,
                          "not a ParasNet checkpoint (bad magic bytes)");
  }
  ByteReader r(bytes);
  r.skip(sizeof(kMagic));
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointError::Kind::kVersionMismatch,
                          "checkpoint version " + std::to_string(version) + " unsupported (expected " +
                              std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint32_t filters = r.u32();
  if (filters == 0 || filters > kMaxFilters) {
    throw CheckpointError(CheckpointError::Kind::kCorrupt,
                          "checkpoint filter count " + std::to_string(filters) + " out of range");
  }
  const std::size_t count = parasnet_parameter_count(filters);
  const std::size_t need_params = kHeaderBytes + 4 * count + 4;
  if (bytes.size() < need_params) truncated(bytes.size(), need_params, "parameters");

  Checkpoint ck;
  ck.model = ParasNet(filters);
  for (Tensor& t : ck.model.params()) {
    for (float& v : t.data()) v = r.f32();
  }
  ck.stored_values = count;
  const std::uint32_t meta_len = r.u32();
  const std::size_t need_total = need_params + meta_len;
  if (bytes.size() < need_total) truncated(bytes.size(), need_total, "metadata");
  if (bytes.size() > need_total) {
    throw CheckpointError(CheckpointError::Kind::kCorrupt,
                          "checkpoint has " + std::to_string(bytes.size() - need_total) +
                              " unexpected trailing bytes");
  }
  std::string meta = r.string(meta_len);
  if (const auto seed = take_line(meta, kSeedKey)) {
    try {
      ck.model.set_init_seed(std::stoull(*seed));
    } catch (const std::exception&) {
      throw CheckpointError(CheckpointError::Kind::kCorrupt, "checkpoint init_seed is malformed");
    }
  }
  if (const auto digest = take_line(meta, kDigestKey)) {
    const std::string actual = hex64(fnv1a(bytes.subspan(kHeaderBytes, 4 * count)));
    if (*digest != actual) {
      throw CheckpointError(CheckpointError::Kind::kCorrupt,
                            "checkpoint parameter digest mismatch (stored " + *digest +
                                ", computed " + actual + ")");
    }
  }
  for (const Tensor& t : ck.model.params()) {
    if (!t.all_finite()) {
      throw CheckpointError(CheckpointError::Kind::kCorrupt, "checkpoint holds non-finite parameters");
    }
  }
  ck.metadata = std::move(meta);
  return ck;
}

void save_checkpoint(const ParasNet& model, const std::filesystem::path& path,
                     std::string_view metadata) {
  const auto bytes = encode_checkpoint(model, metadata);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw CheckpointError(CheckpointError::Kind::kIo,
                          "cannot open checkpoint for writing: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw CheckpointError(CheckpointError::Kind::kIo, "failed writing checkpoint: " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CheckpointError(CheckpointError::Kind::kIo, "cannot open checkpoint: " + path.string());
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    throw CheckpointError(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace parasnet
