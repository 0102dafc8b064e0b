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

#include "hfs/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hfs/diff/ops.hpp"
#include "hfs/init.hpp"

namespace hfs::selector {

ScorerWeights<Tensor> init_scorer(std::size_t dim, std::size_t hidden, Rng& rng, double prior) {
    if (!(prior > 0.0 && prior < 1.0)) throw ValidationError("scorer prior must lie in (0, 1)");
    ScorerWeights<Tensor> w;
    w.w_frame = scaled_weight(dim, hidden, rng);
    w.w_query = scaled_weight(dim, hidden, rng);
    w.b_hidden = Tensor({hidden});
    w.w_out = scaled_weight(hidden, 1, rng);
    w.b_out = Tensor::vector({std::log(prior / (1.0 - prior))});
    return w;
}

Var score_frames(Var frames, Var fused_query, const ScorerWeights<Var>& weights) {
    using namespace diff;
    const auto& e = frames.value();
    if (e.rank() != 2 || e.rows() == 0) throw ValidationError("score_frames: no frames to score");
    const auto d = e.cols();
    if (fused_query.value().rank() != 1 || fused_query.value().size() != d) {
        throw ValidationError("score_frames: query length " + std::to_string(fused_query.value().size()) +
                              " does not match frame width " + std::to_string(d));
    }
    const auto hidden = weights.b_hidden.value().size();
    const Var query_part = add(reshape(matmul(reshape(fused_query, {1, d}), weights.w_query), {hidden}), weights.b_hidden);
    const Var h = tanh(add_row(matmul(frames, weights.w_frame), query_part));
    const Var logits = add_row(matmul(h, weights.w_out), weights.b_out);
    return sigmoid(reshape(logits, {e.rows()}));
}

std::vector<double> sample_gumbel(std::size_t n, Rng& rng) {
    std::vector<double> g(n);
    for (auto& v : g) v = -std::log(-std::log(uniform_open(rng)));
    return g;
}

std::vector<std::size_t> top_k_indices(const std::vector<double>& values, std::size_t k) {
    if (k > values.size()) {
        throw ValidationError("k = " + std::to_string(k) + " exceeds " + std::to_string(values.size()) + " candidates");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

Selection gumbel_topk(Var scores, double tau, std::size_t k_sel, std::vector<double> noise) {
    using namespace diff;
    const auto n = scores.value().size();
    if (scores.value().rank() != 1 || n == 0) throw ValidationError("gumbel_topk: scores must be a non-empty vector");
    if (k_sel < 1 || k_sel > n) {
        throw ValidationError("gumbel_topk: k_sel = " + std::to_string(k_sel) + " outside [1, " + std::to_string(n) + "]");
    }
    if (!(tau > 0.0)) throw ValidationError("gumbel_topk: temperature must be positive");
    if (noise.size() != n) throw ValidationError("gumbel_topk: noise length does not match frame count");

    Graph& g = *scores.graph;
    const Var keys = add(log(scores, kLogEps), g.constant(Tensor::vector(noise)));

    Selection sel;
    sel.tau = tau;
    sel.keys.assign(keys.value().values().begin(), keys.value().values().end());
    sel.noise = std::move(noise);
    sel.hard = top_k_indices(sel.keys, k_sel);

    Var logits = keys;
    Var total;
    for (std::size_t r = 0; r < k_sel; ++r) {
        const Var p = softmax(logits, tau);
        total = total.valid() ? add(total, p) : p;
        if (r + 1 < k_sel) logits = add(logits, log1m(p, kLogEps));
    }
    sel.relaxed = total;
    sel.mask = clamp01(total);
    return sel;
}

double anneal_temperature(std::size_t step, const TemperatureSchedule& schedule) {
    return std::max(schedule.floor, schedule.initial * std::pow(schedule.decay, static_cast<double>(step)));
}

Var student_distribution(Var scores, const std::vector<std::size_t>& selected, double tau_d) {
    if (!(tau_d > 0.0)) throw ValidationError("student_distribution: tau_d must be positive");
    if (selected.empty()) throw ValidationError("student_distribution: empty selection");
    if (!std::is_sorted(selected.begin(), selected.end())) {
        throw ValidationError("student_distribution: selection must be in ascending frame order");
    }
    return diff::softmax(diff::gather(scores, selected), tau_d);
}

}  // namespace hfs::selector
