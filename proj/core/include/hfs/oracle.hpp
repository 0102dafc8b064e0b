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
#include <vector>

#include "hfs/config.hpp"
#include "hfs/setobj.hpp"

// Checks that the relaxed selection can actually optimise F: gradient ascent
// through the noiseless relaxed top-k, rounded to a hard set, against the
// exhaustive maximiser.
namespace hfs::oracle {

struct Instance {
    std::vector<double> scores;      // in (0, 1)
    std::vector<double> timestamps;  // sorted
};

// Scores uniform in [0.05, 1); timestamps sorted uniform over [0, 5 gamma].
Instance random_instance(std::size_t n, double gamma, std::uint64_t seed, std::size_t index);

struct AscentOptions {
    std::size_t iterations = 400;
    double step = 0.05;        // Adam step on the logits
    double tau_start = 1.0;
    double tau_end = 0.05;     // geometric anneal between the two
};

struct AscentResult {
    std::vector<std::size_t> selected;  // best top-k rounding along the path, ascending
    setobj::SetTerms terms;             // F on the hard set
};

// Ascent on logits theta (initialised at log s) of F(s, m(theta, tau)); every
// iterate is rounded to its top-k and the best hard set is kept.
AscentResult annealed_ascent(const Instance& instance, const SetObjectiveConfig& cfg, std::size_t k,
                             const AscentOptions& options = {});

struct CheckReport {
    std::size_t trials = 0;
    std::size_t within_tolerance = 0;  // (F* - F) <= tolerance * |F*|
    std::size_t exact = 0;             // same index set as the exhaustive maximiser
    double mean_gap = 0.0;             // mean relative gap
    double fraction() const { return trials == 0 ? 1.0 : static_cast<double>(within_tolerance) / trials; }
};

CheckReport run_check(std::size_t n, std::size_t k, std::size_t trials, std::uint64_t seed,
                      const SetObjectiveConfig& cfg, double tolerance = 0.05, const AscentOptions& options = {});

}  // namespace hfs::oracle
