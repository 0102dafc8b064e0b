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

#include "hfs/model.hpp"

#include "hfs/diff/ops.hpp"

namespace hfs {
namespace {

BoundModel shaped_like(const Model& model) {
    BoundModel out;
    out.querygen.theta1.layers.resize(model.querygen.theta1.layers.size());
    out.querygen.theta2.layers.resize(model.querygen.theta2.layers.size());
    return out;
}

template <class MakeLeaf>
BoundModel bind_with(const Model& model, MakeLeaf&& make) {
    std::vector<const Tensor*> sources;
    Model::fields(model, [&](const std::string&, const Tensor& t) { sources.push_back(&t); });
    BoundModel out = shaped_like(model);
    std::size_t i = 0;
    BoundModel::fields(out, [&](const std::string& name, Var& v) { v = make(name, *sources[i++]); });
    return out;
}

}  // namespace

Model init_model(const TrainConfig& config) {
    config.validate();
    auto rng = make_rng(config.seed, "init");
    Model m;
    m.querygen = querygen::init_querygen({config.dim, config.vocab_size, config.encoder_layers, config.ffn_width}, rng);
    // Start every score at the selection rate k_sel / N.
    const double prior = static_cast<double>(config.k_sel) / static_cast<double>(config.n_frames);
    m.scorer = selector::init_scorer(config.dim, config.scorer_hidden, rng, prior);
    m.teacher = mutual::init_teacher(config.dim, config.teacher_hidden, rng);
    return m;
}

BoundModel bind_parameters(diff::Graph& graph, const Model& model) {
    return bind_with(model, [&](const std::string& name, const Tensor& t) { return graph.parameter(name, t); });
}

BoundModel bind_constants(diff::Graph& graph, const Model& model) {
    return bind_with(model, [&](const std::string&, const Tensor& t) { return graph.constant(t); });
}

void for_each_weight(Model& model, const std::function<void(const std::string&, Tensor&)>& fn) {
    Model::fields(model, [&](const std::string& name, Tensor& t) { fn(name, t); });
}

void for_each_weight(const Model& model, const std::function<void(const std::string&, const Tensor&)>& fn) {
    Model::fields(model, [&](const std::string& name, const Tensor& t) { fn(name, t); });
}

std::size_t parameter_count(const Model& model) {
    std::size_t n = 0;
    for_each_weight(model, [&](const std::string&, const Tensor& t) { n += t.size(); });
    return n;
}

Var fused_query(diff::Graph& graph, const BoundModel& model, Var frames, Var text, const TrainConfig& config,
                Var* task_queries) {
    using namespace diff;
    const auto& qg = model.querygen;
    Var queries;
    if (config.disable_cot_query) {
        queries = reshape(qg.static_query, {1, config.dim});
    } else {
        const auto prompt = querygen::make_cot_prompt(config.prompt_len, config.vocab_size);
        const Var trace_in = concat_rows({querygen::embed_tokens(prompt, qg.embedding), text});
        const Var hidden = querygen::encode_trace(trace_in, qg.theta1);
        queries = gather_rows(hidden, querygen::sample_query_positions(config.num_queries, hidden.value().rows()));
    }
    if (task_queries) *task_queries = queries;
    (void)graph;
    return querygen::aggregate_context(frames, text, queries, qg.q_agg, qg.theta2);
}

EpisodeGraph build_episode(diff::Graph& graph, const BoundModel& model, const synth::Episode& episode,
                           const TrainConfig& config, const StepContext& context) {
    using namespace diff;
    const auto n = episode.n_frames();
    if (config.k_sel > n) {
        throw ValidationError("k_sel = " + std::to_string(config.k_sel) + " exceeds the episode's " +
                              std::to_string(n) + " frames");
    }
    if (episode.dim() != config.dim) {
        throw ValidationError("episode width " + std::to_string(episode.dim()) + " does not match model width " +
                              std::to_string(config.dim));
    }

    EpisodeGraph eg;
    const Var frames = graph.constant(episode.features);
    const Var text = graph.constant(synth::text_embeddings(episode));
    eg.fused_query = fused_query(graph, model, frames, text, config, &eg.task_queries);
    if (!config.disable_cot_query && !config.disable_sep) eg.sep = querygen::separation_loss(eg.task_queries);

    eg.scores = selector::score_frames(frames, eg.fused_query, model.scorer);
    std::vector<double> noise = context.noise.empty() ? std::vector<double>(n, 0.0) : context.noise;
    eg.selection = selector::gumbel_topk(eg.scores, context.tau, config.k_sel, std::move(noise));
    const auto& selected = eg.selection.hard;

    const auto terms = setobj::set_objective(eg.scores, eg.selection.mask, episode.timestamps, config.set);
    eg.f_set = terms.f;
    eg.rel = terms.rel;
    eg.cov = terms.cov;
    eg.red = terms.red;

    const Var features = context.path == FeaturePath::straight_through
                             ? mutual::straight_through_features(frames, eg.selection.mask, selected)
                             : mutual::soft_features(frames, eg.selection.mask, selected);
    const auto teacher = mutual::teacher_forward(features, graph.constant(episode.question),
                                                 graph.constant(episode.options), model.teacher);
    eg.logits = teacher.logits;
    eg.ce = mutual::ce_loss(teacher.logits, episode.answer);

    if (!config.disable_kl) {
        eg.teacher_dist = teacher.importance;
        eg.student_dist = selector::student_distribution(eg.scores, selected, config.tau_d);
        eg.kl = mutual::kl_loss(eg.teacher_dist, eg.student_dist);
    }

    mutual::LossWeights weights;
    weights.lambda_kl = config.disable_kl ? 0.0 : context.lambda_kl;
    weights.lambda_set = config.disable_set_objective ? 0.0 : config.lambda_set;
    weights.lambda_sep = eg.sep.valid() ? config.lambda_sep : 0.0;
    eg.total = mutual::total_loss(eg.ce, eg.kl, config.disable_set_objective ? Var{} : eg.f_set, eg.sep, weights);

    auto& b = eg.breakdown;
    b.ce = eg.ce.value().item();
    b.kl = eg.kl.valid() ? eg.kl.value().item() : 0.0;
    b.f_set = eg.f_set.value().item();
    b.rel = eg.rel.value().item();
    b.cov = eg.cov.value().item();
    b.red = eg.red.value().item();
    b.sep = eg.sep.valid() ? eg.sep.value().item() : 0.0;
    b.total = eg.total.value().item();
    b.weights = weights;
    return eg;
}

Inference infer(const Model& model, const Tensor& frames, const Tensor& text, const TrainConfig& config, std::size_t k) {
    if (frames.rank() != 2 || frames.rows() == 0) throw ValidationError("infer: no frames");
    if (k < 1 || k > frames.rows()) {
        throw ValidationError("k = " + std::to_string(k) + " outside [1, " + std::to_string(frames.rows()) + "]");
    }
    diff::Graph graph;
    const auto bound = bind_constants(graph, model);
    const Var q = fused_query(graph, bound, graph.constant(frames), graph.constant(text), config);
    const Var s = selector::score_frames(graph.constant(frames), q, bound.scorer);
    Inference out;
    out.scores.assign(s.value().values().begin(), s.value().values().end());
    out.selected = selector::top_k_indices(out.scores, k);
    return out;
}

}  // namespace hfs
