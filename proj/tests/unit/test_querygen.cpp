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

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "hfs/diff/gradcheck.hpp"
#include "hfs/diff/ops.hpp"
#include "hfs/querygen.hpp"

using namespace hfs;
using namespace hfs::querygen;
using diff::Graph;
using diff::Tensor;
using diff::Var;

namespace {

QueryGenWeights<Var> bind(Graph& g, const QueryGenWeights<Tensor>& w) {
    QueryGenWeights<Var> out;
    out.theta1.layers.resize(w.theta1.layers.size());
    out.theta2.layers.resize(w.theta2.layers.size());
    return test::bind_params(g, w, std::move(out));
}

}  // namespace

TEST_SUITE("querygen") {

TEST_CASE("query positions spread across the sequence") {
    CHECK(sample_query_positions(3, 10) == std::vector<std::size_t>{0, 4, 9});
    CHECK(sample_query_positions(1, 10) == std::vector<std::size_t>{9});
    CHECK(sample_query_positions(2, 5) == std::vector<std::size_t>{0, 4});
    CHECK(sample_query_positions(4, 4) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK_THROWS_AS(sample_query_positions(0, 4), ValidationError);
    CHECK_THROWS_AS(sample_query_positions(5, 4), ValidationError);
}

TEST_CASE("cot prompt is fixed and inside the vocabulary") {
    const auto p = make_cot_prompt(32, 64);
    CHECK(p.ids.size() == 32);
    CHECK(p.role == TokenRole::cot_prompt);
    for (auto id : p.ids) CHECK(id < 64);
    CHECK(make_cot_prompt(32, 64).ids == p.ids);
}

TEST_CASE("token embedding gathers table rows and rejects bad ids") {
    Graph g;
    const Var table = g.constant(Tensor::matrix(3, 2, {1, 2, 3, 4, 5, 6}));
    const Var e = embed_tokens({{2, 0}, TokenRole::cot_prompt}, table);
    CHECK(test::to_vector(e.value()) == std::vector<double>{5, 6, 1, 2});
    CHECK_THROWS_AS(embed_tokens({{3}, TokenRole::cot_prompt}, table), ValidationError);
}

TEST_CASE("separation loss values") {
    Graph g;
    const Var same = g.constant(Tensor::matrix(2, 3, {0.3, -1.2, 2.0, 0.3, -1.2, 2.0}));
    CHECK(std::abs(separation_loss(same).value().item() - 1.0) <= 1e-12);
    const Var opposite = g.constant(Tensor::matrix(2, 2, {1, 0, -2, 0}));
    CHECK(std::abs(separation_loss(opposite).value().item() - 1.0) <= 1e-12);
    const Var orth = g.constant(Tensor::matrix(3, 3, {1, 0, 0, 0, 2, 0, 0, 0, 3}));
    CHECK(separation_loss(orth).value().item() == 0.0);
    const Var single = g.constant(Tensor::matrix(1, 3, {1, 2, 3}));
    CHECK(separation_loss(single).value().item() == 0.0);
    // Mean over the three pairs: cos^2 of 45 degrees is 1/2 for one pair.
    const Var mixed = g.constant(Tensor::matrix(3, 2, {1, 0, 1, 1, 0, 1}));
    // pairs: (0,1) 1/2, (0,2) 0, (1,2) 1/2
    CHECK(separation_loss(mixed).value().item() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("encoder output shape and last-row shortcut") {
    auto rng = make_rng(0, "init");
    const auto w = init_querygen({8, 16, 2, 12}, rng);
    Graph g;
    const auto bw = bind(g, w);
    const Var x = g.constant(test::random_tensor({5, 8}, 3));
    const Var full = encode(x, bw.theta1);
    const Var last = encode(x, bw.theta1, true);
    CHECK(full.value().shape() == diff::Shape{5, 8});
    CHECK(last.value().shape() == diff::Shape{1, 8});
    for (std::size_t c = 0; c < 8; ++c) CHECK(last.value().at(0, c) == doctest::Approx(full.value().at(4, c)).epsilon(1e-12));
}

TEST_CASE("encoder is permutation equivariant") {
    auto rng = make_rng(1, "init");
    const auto w = init_querygen({6, 8, 1, 10}, rng);
    Graph g;
    const auto bw = bind(g, w);
    const auto xt = test::random_tensor({4, 6}, 5);
    const Var x = g.constant(xt);
    const Var y = encode(x, bw.theta1);
    const Var xp = diff::gather_rows(x, {2, 0, 3, 1});
    const Var yp = encode(xp, bw.theta1);
    const std::vector<std::size_t> perm = {2, 0, 3, 1};
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 6; ++c) CHECK(yp.value().at(r, c) == doctest::Approx(y.value().at(perm[r], c)).epsilon(1e-12));
}

TEST_CASE("fused query depends on frames and passes a gradient check") {
    auto rng = make_rng(2, "init");
    const auto w = init_querygen({6, 8, 1, 10}, rng);
    Graph g;
    const auto bw = bind(g, w);
    const Var frames = g.constant(test::random_tensor({5, 6}, 7));
    const Var frames2 = g.constant(test::random_tensor({5, 6}, 8));
    const Var text = g.constant(test::random_tensor({3, 6}, 9));
    const Var trace = encode_trace(diff::concat_rows({embed_tokens(make_cot_prompt(4, 8), bw.embedding), text}), bw.theta1);
    const Var queries = diff::gather_rows(trace, sample_query_positions(3, trace.value().rows()));
    const Var fused = aggregate_context(frames, text, queries, bw.q_agg, bw.theta2);
    const Var fused2 = aggregate_context(frames2, text, queries, bw.q_agg, bw.theta2);
    CHECK(fused.value().shape() == diff::Shape{6});
    CHECK_FALSE(fused.value() == fused2.value());
    const Var loss = diff::add(diff::squared_norm(fused), separation_loss(queries));
    CHECK(diff::finite_diff_check(g, loss).max_relative_error < 1e-6);
}

TEST_CASE("shape mismatches are rejected") {
    auto rng = make_rng(3, "init");
    const auto w = init_querygen({6, 8, 1, 10}, rng);
    Graph g;
    const auto bw = bind(g, w);
    const Var frames = g.constant(test::random_tensor({5, 7}, 7));
    const Var text = g.constant(test::random_tensor({3, 6}, 9));
    const Var q = g.constant(test::random_tensor({2, 6}, 10));
    CHECK_THROWS_AS(aggregate_context(frames, text, q, bw.q_agg, bw.theta2), ValidationError);
}

}  // TEST_SUITE
