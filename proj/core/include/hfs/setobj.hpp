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
#include <span>
#include <vector>

#include "hfs/config.hpp"
#include "hfs/diff/graph.hpp"

// Continuous set-quality objective over a soft selection mask:
//   F(m) = l_rel * Rel(m) + l_cov * Cov(m) - l_red * Red(m)
// with Rel = sum s_i m_i, Cov = tau_c * logsumexp(s_i m_i / tau_c) and
// Red = sum_{i != j} m_i m_j K(t_i, t_j), ordered pairs counted.
namespace hfs::setobj {

using diff::Tensor;
using diff::Var;

// exp(-(t_i - t_j)^2 / (2 gamma^2))
double temporal_kernel(double t_i, double t_j, double gamma);

// N x N kernel matrix, diagonal zeroed (self pairs never count).
Tensor off_diagonal_kernel(std::span<const double> timestamps, double gamma);

Var relevance(Var scores, Var mask);
Var coverage(Var scores, Var mask, double tau_c);
Var redundancy(Var mask, std::span<const double> timestamps, double gamma);
Var redundancy(Var mask, Var kernel);  // kernel from off_diagonal_kernel

struct SetTermVars {
    Var f, rel, cov, red;
};

SetTermVars set_objective(Var scores, Var mask, std::span<const double> timestamps, const SetObjectiveConfig& cfg);

// Plain evaluation, no graph.
struct SetTerms {
    double f = 0.0, rel = 0.0, cov = 0.0, red = 0.0;
};

SetTerms evaluate(std::span<const double> scores, std::span<const double> mask, std::span<const double> timestamps,
                  const SetObjectiveConfig& cfg);

// Hard-mask evaluation for an index set.
SetTerms evaluate_set(std::span<const double> scores, std::span<const std::size_t> selected,
                      std::span<const double> timestamps, const SetObjectiveConfig& cfg);

struct BestSet {
    std::vector<std::size_t> selected;
    SetTerms terms;
};

inline constexpr double kMaxEnumeration = 1e6;

// Exhaustive maximiser of F over binary masks with exactly k ones. Ties go to
// the lexicographically smallest index set. Rejects C(N, k) > 1e6.
BestSet brute_force_best_set(std::span<const double> scores, std::span<const double> timestamps,
                             const SetObjectiveConfig& cfg, std::size_t k_sel);

double binomial(std::size_t n, std::size_t k);

}  // namespace hfs::setobj
