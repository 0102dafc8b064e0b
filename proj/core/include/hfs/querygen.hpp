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
#include <string>
#include <vector>

#include "hfs/diff/graph.hpp"
#include "hfs/rng.hpp"

// Query generation: a small full-attention encoder stands in for the student
// language model. theta1 reads the reasoning prompt plus question/options and
// yields task queries; theta2 fuses frames, text, task queries and the
// aggregator token into the fused query.
namespace hfs::querygen {

using diff::Tensor;
using diff::Var;

enum class TokenRole { cot_prompt, question_options };

struct TokenSequence {
    std::vector<std::size_t> ids;
    TokenRole role = TokenRole::cot_prompt;
};

// The fixed synthetic reasoning prompt of `length` tokens.
TokenSequence make_cot_prompt(std::size_t length, std::size_t vocab_size);

template <class T>
struct EncoderLayerWeights {
    T wq, wk, wv;  // d x d, single head
    T w1, b1;      // d x f, f
    T w2, b2;      // f x d, d

    template <class Self, class F>
    static void fields(Self& s, F&& f) {
        f("wq", s.wq);
        f("wk", s.wk);
        f("wv", s.wv);
        f("w1", s.w1);
        f("b1", s.b1);
        f("w2", s.w2);
        f("b2", s.b2);
    }
};

template <class T>
struct EncoderWeights {
    std::vector<EncoderLayerWeights<T>> layers;

    template <class Self, class F>
    static void fields(Self& s, F&& f) {
        for (std::size_t i = 0; i < s.layers.size(); ++i) {
            const std::string prefix = "l" + std::to_string(i) + ".";
            EncoderLayerWeights<T>::fields(s.layers[i], [&](const std::string& name, auto& x) { f(prefix + name, x); });
        }
    }
};

template <class T>
struct QueryGenWeights {
    T embedding;  // vocab x d, token table used for the prompt
    EncoderWeights<T> theta1;
    EncoderWeights<T> theta2;
    T q_agg;         // learnable aggregator token, d
    T static_query;  // replaces the task queries when CoT queries are ablated, d

    template <class Self, class F>
    static void fields(Self& s, F&& f) {
        f("embedding", s.embedding);
        EncoderWeights<T>::fields(s.theta1, [&](const std::string& name, auto& x) { f("theta1." + name, x); });
        EncoderWeights<T>::fields(s.theta2, [&](const std::string& name, auto& x) { f("theta2." + name, x); });
        f("q_agg", s.q_agg);
        f("static_query", s.static_query);
    }
};

struct QueryGenShape {
    std::size_t dim = 64;
    std::size_t vocab_size = 64;
    std::size_t layers = 2;
    std::size_t ffn_width = 128;
};

QueryGenWeights<Tensor> init_querygen(const QueryGenShape& shape, Rng& rng);

struct QueryBundle {
    Var task_queries;  // K x d
    std::vector<std::size_t> positions;
    Var aggregator;  // q_agg leaf, d
    Var fused;       // fused query, d
};

// (len x d) rows of the token table. Out-of-range ids are rejected.
Var embed_tokens(const TokenSequence& seq, Var embedding);

// Full (non-causal) self-attention encoder. With `last_row_only` the final
// layer evaluates only the last position, returning a 1 x d matrix whose
// value equals the last row of the full output.
Var encode(Var input, const EncoderWeights<Var>& weights, bool last_row_only = false);

// theta1 pass over [E_cot ; E_qa].
Var encode_trace(Var input, const EncoderWeights<Var>& theta1);

// j_k = floor((k-1)/(K-1) * (total_len-1)); K = 1 takes the last position.
std::vector<std::size_t> sample_query_positions(std::size_t num_queries, std::size_t total_len);

// Mean squared pairwise cosine of the rows of `task_queries` (K x d).
// Returns a constant 0 for K < 2.
Var separation_loss(Var task_queries);

// Last hidden state of the theta2 encoder over [E_v ; E_qa ; queries ; q_agg].
Var aggregate_context(Var frames, Var text, Var task_queries, Var q_agg, const EncoderWeights<Var>& theta2);

}  // namespace hfs::querygen
