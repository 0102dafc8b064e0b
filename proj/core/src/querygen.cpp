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

#include "hfs/querygen.hpp"

#include <cmath>
#include <iostream>
#include <mutex>

#include "hfs/diff/ops.hpp"
#include "hfs/init.hpp"

namespace hfs::querygen {

TokenSequence make_cot_prompt(std::size_t length, std::size_t vocab_size) {
    if (vocab_size == 0) throw ValidationError("vocabulary must be non-empty");
    TokenSequence seq;
    seq.role = TokenRole::cot_prompt;
    seq.ids.reserve(length);
    for (std::size_t i = 0; i < length; ++i) seq.ids.push_back((7 * i + 3) % vocab_size);
    return seq;
}

QueryGenWeights<Tensor> init_querygen(const QueryGenShape& shape, Rng& rng) {
    const auto d = shape.dim;
    const double unit = 1.0 / std::sqrt(static_cast<double>(d));
    QueryGenWeights<Tensor> w;
    w.embedding = random_normal({shape.vocab_size, d}, unit, rng);
    for (auto* enc : {&w.theta1, &w.theta2}) {
        enc->layers.resize(shape.layers);
        for (auto& layer : enc->layers) {
            layer.wq = scaled_weight(d, d, rng);
            layer.wk = scaled_weight(d, d, rng);
            layer.wv = scaled_weight(d, d, rng);
            layer.w1 = scaled_weight(d, shape.ffn_width, rng);
            layer.b1 = Tensor({shape.ffn_width});
            layer.w2 = scaled_weight(shape.ffn_width, d, rng, 0.5);
            layer.b2 = Tensor({d});
        }
    }
    w.q_agg = random_normal({d}, unit, rng);
    w.static_query = random_normal({d}, unit, rng);
    return w;
}

Var embed_tokens(const TokenSequence& seq, Var embedding) {
    const auto vocab = embedding.value().rows();
    for (std::size_t i = 0; i < seq.ids.size(); ++i) {
        if (seq.ids[i] >= vocab) {
            throw ValidationError("token id " + std::to_string(seq.ids[i]) + " at position " + std::to_string(i) +
                                  " outside vocabulary of " + std::to_string(vocab));
        }
    }
    return diff::gather_rows(embedding, seq.ids);
}

Var encode(Var input, const EncoderWeights<Var>& weights, bool last_row_only) {
    using namespace diff;
    if (weights.layers.empty()) throw ValidationError("encoder has no layers");
    const auto& x0 = input.value();
    if (x0.rank() != 2) throw ValidationError("encoder input must be a matrix, got " + shape_str(x0.shape()));
    const auto d = weights.layers.front().wq.value().rows();
    if (x0.cols() != d) {
        throw ValidationError("encoder width " + std::to_string(d) + " does not match input width " +
                              std::to_string(x0.cols()));
    }
    if (x0.rows() == 0) throw ValidationError("encoder input has no rows");

    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    Var x = input;
    for (std::size_t l = 0; l < weights.layers.size(); ++l) {
        const auto& p = weights.layers[l];
        const bool last_only = last_row_only && l + 1 == weights.layers.size();
        const Var queries_in = last_only ? gather_rows(x, {x.value().rows() - 1}) : x;
        const Var q = matmul(queries_in, p.wq);
        const Var k = matmul(x, p.wk);
        const Var v = matmul(x, p.wv);
        const Var attn = softmax_rows(scale(matmul_nt(q, k), inv_sqrt_d));
        const Var mixed = add(queries_in, matmul(attn, v));
        const Var hidden = tanh(add_row(matmul(mixed, p.w1), p.b1));
        x = add(mixed, add_row(matmul(hidden, p.w2), p.b2));
    }
    return x;
}

Var encode_trace(Var input, const EncoderWeights<Var>& theta1) { return encode(input, theta1, false); }

std::vector<std::size_t> sample_query_positions(std::size_t num_queries, std::size_t total_len) {
    if (num_queries == 0) throw ValidationError("number of task queries must be >= 1");
    if (total_len < num_queries) {
        throw ValidationError("sequence length " + std::to_string(total_len) + " shorter than query count " +
                              std::to_string(num_queries));
    }
    if (num_queries == 1) return {total_len - 1};
    std::vector<std::size_t> positions;
    positions.reserve(num_queries);
    for (std::size_t k = 0; k < num_queries; ++k) positions.push_back(k * (total_len - 1) / (num_queries - 1));
    return positions;
}

Var separation_loss(Var task_queries) {
    using namespace diff;
    const auto count = task_queries.value().rows();
    if (task_queries.value().rank() != 2) throw ValidationError("task queries must be a K x d matrix");
    if (count < 2) {
        static std::once_flag noted;
        std::call_once(noted, [] { std::clog << "note: separation loss is 0 with fewer than two task queries\n"; });
        return task_queries.graph->constant(Tensor::scalar(0.0));
    }
    std::vector<Var> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) rows.push_back(row(task_queries, i));
    Var acc;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            const Var c = cosine(rows[i], rows[j]);
            const Var c2 = mul(c, c);
            acc = acc.valid() ? add(acc, c2) : c2;
        }
    }
    return scale(acc, 2.0 / static_cast<double>(count * (count - 1)));
}

Var aggregate_context(Var frames, Var text, Var task_queries, Var q_agg, const EncoderWeights<Var>& theta2) {
    using namespace diff;
    if (frames.value().rank() != 2 || frames.value().rows() == 0) {
        throw ValidationError("aggregate_context: frame embeddings are empty");
    }
    const auto d = frames.value().cols();
    const Var fused = encode(concat_rows({frames, text, task_queries, q_agg}), theta2, true);
    return reshape(fused, {d});
}

}  // namespace hfs::querygen
