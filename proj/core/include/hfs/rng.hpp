/* Copyright 2026 The HFS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace hfs {

using Rng = std::mt19937_64;

// Every random draw in the library comes from a named substream of one u64
// seed, so two runs that differ in one factor (an ablation flag, a resume
// point) consume identical randomness everywhere else.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream, std::uint64_t a = 0, std::uint64_t b = 0);

inline Rng make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t a = 0, std::uint64_t b = 0) {
    return Rng(stream_seed(seed, stream, a, b));
}

// Uniform on the open interval (0, 1).
double uniform_open(Rng& rng);

double standard_normal(Rng& rng);

// Unbiased integer in [0, n); n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace hfs
