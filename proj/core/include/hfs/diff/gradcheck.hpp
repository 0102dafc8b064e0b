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
#include <map>
#include <string>
#include <vector>

#include "hfs/diff/graph.hpp"

namespace hfs::diff {

struct FiniteDiffOptions {
    double epsilon = 1e-5;
    // 0 checks every entry; otherwise an evenly strided subset per parameter.
    std::size_t max_entries_per_parameter = 0;
    // Empty checks every trainable leaf.
    std::vector<std::string> parameters;
};

struct FiniteDiffReport {
    double max_relative_error = 0.0;
    std::map<std::string, double> per_parameter;
    std::string worst_parameter;
    std::size_t worst_index = 0;
    std::size_t entries_checked = 0;
};

// Compares reverse-mode gradients of a scalar node against central
// differences. Error per entry is |analytic - numeric| / max(1, |analytic|).
// Leaves are restored and the graph replayed before returning.
FiniteDiffReport finite_diff_check(Graph& graph, Var output, const FiniteDiffOptions& options = {});

}  // namespace hfs::diff
