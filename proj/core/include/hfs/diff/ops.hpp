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
#include <vector>

#include "hfs/diff/graph.hpp"

// Differentiable primitives. Every op validates shapes up front and reports
// the id the offending node would have received.
namespace hfs::diff {

inline constexpr double kLogEps = 1e-8;

// Linear algebra
Var matmul(Var a, Var b);      // (m x k) * (k x n)
Var matmul_nt(Var a, Var b);   // (m x k) * (n x k)^T
Var transpose(Var a);
Var reshape(Var a, Shape shape);

// Elementwise
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var shift(Var a, double offset);
Var sigmoid(Var a);
Var tanh(Var a);
Var exp(Var a);
Var log(Var a, double eps = kLogEps);   // log(a + eps)
Var log1m(Var a, double eps = kLogEps); // log(1 - min(a, 1 - eps) + eps)
Var clamp01(Var a);
Var stop_gradient(Var a);

// Broadcasting helpers limited to the two patterns the model uses.
Var add_row(Var m, Var v);     // m[i, :] + v
Var scale_rows(Var m, Var w);  // m[i, :] * w[i]

// Reductions
Var sum(Var a);
Var dot(Var a, Var b);
Var squared_norm(Var a);
Var cosine(Var a, Var b, double eps = 1e-12);  // a.b / max(|a| |b|, eps)
Var logsumexp(Var a);
Var mean_rows(Var m);  // mean-pool over axis 0 -> vector of length cols

// Normalisation
Var softmax(Var a, double temperature = 1.0);
Var softmax_rows(Var m);

// Structural
Var concat_cols(Var a, Var b);                 // feature axis
Var concat_rows(const std::vector<Var>& parts);  // sequence axis; vectors count as one row
Var gather_rows(Var m, std::vector<std::size_t> rows);
Var gather(Var v, std::vector<std::size_t> indices);
Var row(Var m, std::size_t r);

}  // namespace hfs::diff
