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

#include "hfs/diff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace hfs::diff {

FiniteDiffReport finite_diff_check(Graph& graph, Var output, const FiniteDiffOptions& options) {
    if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
        throw ValidationError("finite_diff_check: epsilon must be positive and finite");
    }
    if (graph.stale()) graph.forward();
    if (output.value().size() != 1) {
        throw ValidationError("finite_diff_check: output node " + std::to_string(output.id) +
                              " is not scalar (shape " + shape_str(output.shape()) + ")");
    }

    const auto analytic = graph.backward(output);
    const auto names = options.parameters.empty() ? graph.parameter_names() : options.parameters;

    FiniteDiffReport report;
    for (const auto& name : names) {
        const Tensor original = graph.parameter_var(name).value();
        const Tensor& grad = analytic.at(name);
        const std::size_t n = original.size();
        std::size_t stride = 1;
        if (options.max_entries_per_parameter > 0 && n > options.max_entries_per_parameter) {
            stride = (n + options.max_entries_per_parameter - 1) / options.max_entries_per_parameter;
        }

        double worst = 0.0;
        for (std::size_t i = 0; i < n; i += stride) {
            Tensor probe = original;
            probe[i] = original[i] + options.epsilon;
            graph.set_parameter(name, probe);
            graph.forward();
            const double plus = output.value()[0];
            probe[i] = original[i] - options.epsilon;
            graph.set_parameter(name, probe);
            graph.forward();
            const double minus = output.value()[0];

            const double numeric = (plus - minus) / (2.0 * options.epsilon);
            const double err = std::abs(grad[i] - numeric) / std::max(1.0, std::abs(grad[i]));
            ++report.entries_checked;
            if (err > worst) worst = err;
            if (err > report.max_relative_error) {
                report.max_relative_error = err;
                report.worst_parameter = name;
                report.worst_index = i;
            }
        }
        graph.set_parameter(name, original);
        report.per_parameter[name] = worst;
    }
    graph.forward();
    return report;
}

}  // namespace hfs::diff
