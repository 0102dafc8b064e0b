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
#include "hfs/rng.hpp"

// Stand-in teacher reasoner, the two importance distributions, and the loss
// terms tying them together.
namespace hfs::mutual {

using diff::Tensor;
using diff::Var;

template <class T>
struct TeacherWeights {
    T w_proj, b_proj;  // frame projection d -> d_h, yields h_i
    T w_ctx, b_ctx;    // question -> h_con
    T w_ans, b_ans;    // [pooled ; h_con] (2 d_h) -> d_h
    T w_opt;           // option embedding d -> d_h, logits are dot products
    T w_imp_frame;     // importance MLP over [h_i ; h_con]: d_h -> d_h
    T w_imp_ctx;       // d_h -> d_h
    T b_imp;           // d_h
    T w_imp_out;       // d_h x 1
    T b_imp_out;       // 1

    template <class Self, class F>
    static void fields(Self& s, F&& f) {
        f("w_proj", s.w_proj);
        f("b_proj", s.b_proj);
        f("w_ctx", s.w_ctx);
        f("b_ctx", s.b_ctx);
        f("w_ans", s.w_ans);
        f("b_ans", s.b_ans);
        f("w_opt", s.w_opt);
        f("w_imp_frame", s.w_imp_frame);
        f("w_imp_ctx", s.w_imp_ctx);
        f("b_imp", s.b_imp);
        f("w_imp_out", s.w_imp_out);
        f("b_imp_out", s.b_imp_out);
    }
};

TeacherWeights<Tensor> init_teacher(std::size_t dim, std::size_t hidden, Rng& rng);

struct TeacherOutput {
    Var logits;         // z, length C
    Var frame_hiddens;  // k_sel x d_h
    Var context;        // h_con, d_h
    Var importance;     // teacher_distribution over the selected frames
};

// Straight-through selected features: rows e_i * (1 + m_i - stopgrad(m_i)),
// i.e. the hard rows in the forward pass with gradients routed to m.
Var straight_through_features(Var frames, Var mask, const std::vector<std::size_t>& selected);

// Soft relaxation of the same path: rows e_i * m_i.
Var soft_features(Var frames, Var mask, const std::vector<std::size_t>& selected);

TeacherOutput teacher_forward(Var selected_features, Var question, Var options, const TeacherWeights<Var>& weights);

// softmax(MLP_t([h_i ; h_con])) over the selected frames, same order as rows.
Var teacher_distribution(Var frame_hiddens, Var context, const TeacherWeights<Var>& weights);

// sum_i p_t,i (log(p_t,i + eps) - log(p_s,i + eps)); both sides differentiable.
Var kl_loss(Var teacher, Var student, double eps = 1e-8);

// -log softmax(z)[label]
Var ce_loss(Var logits, std::size_t label);

// One-hot validation helper for callers holding a label vector.
std::size_t label_from_one_hot(const std::vector<double>& y);

struct LossWeights {
    double lambda_kl = 0.0;
    double lambda_set = 0.0;
    double lambda_sep = 0.0;
};

struct LossBreakdown {
    double ce = 0.0, kl = 0.0, f_set = 0.0, rel = 0.0, cov = 0.0, red = 0.0, sep = 0.0, total = 0.0;
    LossWeights weights;

    double reconstruct() const { return ce + weights.lambda_kl * kl - weights.lambda_set * f_set + weights.lambda_sep * sep; }
};

// total = ce + l_kl * kl - l_set * f_set + l_sep * sep. Terms may be unbound
// Vars, which contribute nothing (ablated components).
Var total_loss(Var ce, Var kl, Var f_set, Var sep, const LossWeights& weights);

// Linear warm-up from `start` to `end` across the first epoch.
double kl_weight(std::size_t step, std::size_t epoch_len, double start = 0.1, double end = 1.0);

}  // namespace hfs::mutual
