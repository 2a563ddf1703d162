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

// Fixed-width lane vectors (GCC/Clang vector extensions). Arithmetic is
// elementwise, so each lane follows exactly the scalar operation order.

#pragma once

#include <cstddef>
#include <cstring>

namespace parasnet::simd {

template <typename T, std::size_t N>
struct Lanes {
  typedef T type __attribute__((vector_size(N * sizeof(T))));
};

template <typename T, std::size_t N>
using lanes_t = typename Lanes<T, N>::type;

template <typename T, std::size_t N>
inline lanes_t<T, N> load(const T* p) {
  lanes_t<T, N> v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

template <typename T, std::size_t N>
inline void store(T* p, const lanes_t<T, N>& v) {
  std::memcpy(p, &v, sizeof(v));
}

}  // namespace parasnet::simd
