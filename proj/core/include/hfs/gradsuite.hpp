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

#include <cstdint>
#include <string>
#include <vector>

#include "hfs/config.hpp"
#include "hfs/synthdata.hpp"

// Finite-difference check of every loss term of one episode on a toy model.
namespace hfs::gradsuite {

struct TermResult {
    std::string term;
    double max_relative_error = 0.0;
    std::string worst_parameter;
    std::size_t entries = 0;
};

struct Report {
    std::vector<TermResult> terms;  // ce, kl, sep, rel, cov, red, f_set, total
    double threshold = 1e-4;

    bool passed() const;
    double max_relative_error() const;
};

// Small enough that every parameter entry is probed.
TrainConfig toy_config(std::uint64_t seed);
synth::EpisodeSpec toy_spec(std::uint64_t seed);

// Soft feature path, frozen Gumbel noise, and weights jittered off their
// initial values so no gradient is structurally zero.
Report run(std::uint64_t seed, double threshold = 1e-4);

std::string report_json(const Report& report, int indent = 2);

}  // namespace hfs::gradsuite
