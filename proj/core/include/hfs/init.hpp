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

#include <cmath>

#include "hfs/diff/tensor.hpp"
#include "hfs/rng.hpp"

namespace hfs {

inline diff::Tensor random_normal(diff::Shape shape, double stddev, Rng& rng) {
    diff::Tensor t(std::move(shape));
    for (auto& v : t.values()) v = stddev * standard_normal(rng);
    return t;
}

// N(0, 1/fan_in) for a fan_in x fan_out weight.
inline diff::Tensor scaled_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng, double gain = 1.0) {
    return random_normal({fan_in, fan_out}, gain / std::sqrt(static_cast<double>(fan_in)), rng);
}

}  // namespace hfs
