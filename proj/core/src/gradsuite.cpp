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

#include "hfs/gradsuite.hpp"

#include <algorithm>
#include <utility>

#include <json.hpp>

#include "hfs/diff/gradcheck.hpp"
#include "hfs/model.hpp"
#include "hfs/rng.hpp"

namespace hfs::gradsuite {

bool Report::passed() const {
    return std::all_of(terms.begin(), terms.end(), [&](const TermResult& t) { return t.max_relative_error < threshold; });
}

double Report::max_relative_error() const {
    double worst = 0.0;
    for (const auto& t : terms) worst = std::max(worst, t.max_relative_error);
    return worst;
}

TrainConfig toy_config(std::uint64_t seed) {
    TrainConfig c;
    c.dim = 8;
    c.vocab_size = 16;
    c.prompt_len = 6;
    c.encoder_layers = 2;
    c.ffn_width = 12;
    c.scorer_hidden = 8;
    c.teacher_hidden = 6;
    c.num_queries = 3;
    c.k_sel = 4;
    c.n_frames = 12;
    c.seed = seed;
    return c;
}

synth::EpisodeSpec toy_spec(std::uint64_t seed) {
    synth::EpisodeSpec s;
    s.n_frames = 12;
    s.dim = 8;
    s.num_options = 3;
    s.k_star = 2;
    s.n_dup = 2;
    s.duplicate_window = 2.0;
    s.seed = seed;
    return s;
}

Report run(std::uint64_t seed, double threshold) {
    const auto config = toy_config(seed);
    const auto spec = toy_spec(seed);
    auto model = init_model(config);
    auto rng = make_rng(seed, "gradcheck");
    for_each_weight(model, [&](const std::string&, Tensor& t) {
        for (auto& x : t.values()) x += 0.1 * standard_normal(rng);
    });
    auto episode_rng = make_rng(seed, "episode");
    const auto episode = synth::generate_episode(spec, episode_rng);

    diff::Graph graph;
    const auto bound = bind_parameters(graph, model);
    StepContext ctx;
    ctx.tau = 1.0;
    ctx.lambda_kl = 0.5;
    ctx.noise = selector::sample_gumbel(config.n_frames, rng);
    ctx.path = FeaturePath::soft;
    auto eg = build_episode(graph, bound, episode, config, ctx);

    Report report;
    report.threshold = threshold;
    const std::pair<const char*, Var> terms[] = {{"ce", eg.ce},   {"kl", eg.kl},       {"sep", eg.sep},
                                                 {"rel", eg.rel}, {"cov", eg.cov},     {"red", eg.red},
                                                 {"f_set", eg.f_set}, {"total", eg.total}};
    for (const auto& [name, var] : terms) {
        const auto fd = diff::finite_diff_check(graph, var);
        report.terms.push_back({name, fd.max_relative_error, fd.worst_parameter, fd.entries_checked});
    }
    return report;
}

std::string report_json(const Report& report, int indent) {
    nlohmann::json j;
    j["threshold"] = report.threshold;
    j["passed"] = report.passed();
    j["max_relative_error"] = report.max_relative_error();
    auto& terms = j["terms"] = nlohmann::json::array();
    for (const auto& t : report.terms) {
        terms.push_back({{"term", t.term},
                         {"max_relative_error", t.max_relative_error},
                         {"worst_parameter", t.worst_parameter},
                         {"entries", t.entries}});
    }
    return j.dump(indent);
}

}  // namespace hfs::gradsuite
