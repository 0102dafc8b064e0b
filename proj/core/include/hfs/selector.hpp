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

#include "hfs/config.hpp"
#include "hfs/diff/graph.hpp"
#include "hfs/rng.hpp"

namespace hfs::selector {

using diff::Tensor;
using diff::Var;

// Per-frame relevance MLP over [e_i ; fused query]. The first layer is kept
// split by input half so the query projection is computed once per episode.
template <class T>
struct ScorerWeights {
    T w_frame;   // d x h
    T w_query;   // d x h
    T b_hidden;  // h
    T w_out;     // h x 1
    T b_out;     // 1

    template <class Self, class F>
    static void fields(Self& s, F&& f) {
        f("w_frame", s.w_frame);
        f("w_query", s.w_query);
        f("b_hidden", s.b_hidden);
        f("w_out", s.w_out);
        f("b_out", s.b_out);
    }
};

// `prior` sets the initial score level through the output bias, logit(prior).
ScorerWeights<Tensor> init_scorer(std::size_t dim, std::size_t hidden, Rng& rng, double prior = 0.5);

// s_i = sigmoid(MLP([e_i ; q])) for every row of `frames` (N x d).
Var score_frames(Var frames, Var fused_query, const ScorerWeights<Var>& weights);

// Noise for one relaxed top-k draw. Disabled noise is all zeros.
std::vector<double> sample_gumbel(std::size_t n, Rng& rng);

struct Selection {
    Var mask;                       // soft mask m, length N
    Var relaxed;                    // sum of the k round distributions, before clamping
    std::vector<std::size_t> hard;  // S, ascending frame order
    std::vector<double> keys;       // perturbed keys log(s + 1e-8) + g
    std::vector<double> noise;      // g
    double tau = 0.0;
};

// Relaxed top-k without replacement: k tempered-softmax rounds over the
// perturbed keys, each round masking earlier mass with log(1 - p). The hard
// set is the top-k of the same keys. `noise` must have one entry per frame.
Selection gumbel_topk(Var scores, double tau, std::size_t k_sel, std::vector<double> noise);

// Indices of the k largest values; ties go to the smaller index. Ascending.
std::vector<std::size_t> top_k_indices(const std::vector<double>& values, std::size_t k);

// max(floor, initial * decay^step)
double anneal_temperature(std::size_t step, const TemperatureSchedule& schedule = {});

// softmax({s_i / tau_d : i in S}) with S ascending.
Var student_distribution(Var scores, const std::vector<std::size_t>& selected, double tau_d);

}  // namespace hfs::selector
