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

#include "hfs/rng.hpp"

#include <cmath>

#include "hfs/error.hpp"

namespace hfs {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ fnv1a(stream));
    h = splitmix64(h ^ a);
    return splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
}

double uniform_open(Rng& rng) {
    // 53 random mantissa bits, shifted off zero.
    for (;;) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

double standard_normal(Rng& rng) {
    // Box-Muller, cosine branch only; keeps the draw count per sample fixed.
    const double u1 = uniform_open(rng);
    const double u2 = uniform_open(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
    if (n == 0) throw ValidationError("uniform_index: empty range");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
        const std::uint64_t x = rng();
        if (x < limit) return static_cast<std::size_t>(x % bound);
    }
}

}  // namespace hfs
