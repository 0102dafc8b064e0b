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

#include <functional>
#include <string>
#include <vector>

#include "hfs/config.hpp"
#include "hfs/diff/graph.hpp"
#include "hfs/mutual.hpp"
#include "hfs/querygen.hpp"
#include "hfs/selector.hpp"
#include "hfs/setobj.hpp"
#include "hfs/synthdata.hpp"

namespace hfs {

using diff::Tensor;
using diff::Var;

template <class T>
struct ModelWeights {
    querygen::QueryGenWeights<T> querygen;
    selector::ScorerWeights<T> scorer;
    mutual::TeacherWeights<T> teacher;

    template <class Self, class F>
    static void fields(Self& s, F&& f) {
        querygen::QueryGenWeights<T>::fields(s.querygen, [&](const std::string& n, auto& x) { f("querygen." + n, x); });
        selector::ScorerWeights<T>::fields(s.scorer, [&](const std::string& n, auto& x) { f("scorer." + n, x); });
        mutual::TeacherWeights<T>::fields(s.teacher, [&](const std::string& n, auto& x) { f("teacher." + n, x); });
    }
};

using Model = ModelWeights<Tensor>;
using BoundModel = ModelWeights<Var>;

// Deterministic initialisation from the "init" substream of config.seed.
Model init_model(const TrainConfig& config);

// Every weight as a trainable leaf named by its field path.
BoundModel bind_parameters(diff::Graph& graph, const Model& model);
// Every weight as a constant; for inference graphs.
BoundModel bind_constants(diff::Graph& graph, const Model& model);

void for_each_weight(Model& model, const std::function<void(const std::string&, Tensor&)>& fn);
void for_each_weight(const Model& model, const std::function<void(const std::string&, const Tensor&)>& fn);
std::size_t parameter_count(const Model& model);

enum class FeaturePath {
    straight_through,  // hard rows forward, soft gradient (training)
    soft,              // e_i * m_i both ways (gradient checks)
};

struct StepContext {
    double tau = 2.0;
    double lambda_kl = 0.1;
    std::vector<double> noise;  // Gumbel draw per frame; empty means no noise
    FeaturePath path = FeaturePath::straight_through;
};

struct EpisodeGraph {
    Var total, ce, kl, f_set, rel, cov, red, sep;  // kl and sep unbound when ablated
    Var scores, fused_query, task_queries;
    selector::Selection selection;
    Var logits, teacher_dist, student_dist;
    mutual::LossBreakdown breakdown;
};

// The full per-episode pipeline: task queries -> fused query -> scores ->
// relaxed top-k -> set objective -> teacher -> CE, KL, separation -> total.
EpisodeGraph build_episode(diff::Graph& graph, const BoundModel& model, const synth::Episode& episode,
                           const TrainConfig& config, const StepContext& context);

// The fused query for one set of inputs, given weights already on `graph`.
Var fused_query(diff::Graph& graph, const BoundModel& model, Var frames, Var text, const TrainConfig& config,
                Var* task_queries = nullptr);

struct Inference {
    std::vector<double> scores;
    std::vector<std::size_t> selected;  // noiseless top-k of scores, ascending
};

// Noiseless scoring and hard top-k; `text` holds the question/option rows.
Inference infer(const Model& model, const Tensor& frames, const Tensor& text, const TrainConfig& config, std::size_t k);

}  // namespace hfs
