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
#include <set>

#include "helpers.hpp"
#include "hfs/config.hpp"
#include "hfs/rng.hpp"

using namespace hfs;

TEST_SUITE("rng") {

TEST_CASE("named streams are reproducible and distinct") {
    CHECK(stream_seed(1, "init") == stream_seed(1, "init"));
    std::set<std::uint64_t> seen = {stream_seed(1, "init"), stream_seed(2, "init"), stream_seed(1, "task"),
                                    stream_seed(1, "noise", 1, 0), stream_seed(1, "noise", 0, 1),
                                    stream_seed(1, "noise", 1, 1)};
    CHECK(seen.size() == 6);
    auto a = make_rng(5, "x");
    auto b = make_rng(5, "x");
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("uniform_open stays inside (0, 1) with the right mean") {
    auto rng = make_rng(0, "u");
    double total = 0.0;
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = uniform_open(rng);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        total += u;
    }
    CHECK(total / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("standard_normal has unit moments") {
    auto rng = make_rng(0, "n");
    double s1 = 0.0, s2 = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = standard_normal(rng);
        s1 += z;
        s2 += z * z;
    }
    CHECK(std::abs(s1 / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniform_index covers its range evenly") {
    auto rng = make_rng(0, "i");
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts.at(uniform_index(rng, 7));
    for (int c : counts) CHECK(std::abs(c - 10000) < 400);
    CHECK_THROWS_AS(uniform_index(rng, 0), ValidationError);
}

}  // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("defaults carry the published hyperparameters") {
    const TrainConfig c;
    CHECK(c.lr == 1e-5);
    CHECK(c.weight_decay == 0.01);
    CHECK(c.batch_size == 16);
    CHECK(c.epochs == 3);
    CHECK(c.lambda_set == 1e-4);
    CHECK(c.lambda_sep == 0.01);
    CHECK(c.lambda_kl_start == 0.1);
    CHECK(c.lambda_kl_end == 1.0);
    CHECK(c.tau.initial == 2.0);
    CHECK(c.tau.decay == 0.999);
    CHECK(c.tau.floor == 0.5);
    CHECK(c.tau_d == 0.5);
    CHECK(c.set.lambda_rel == 0.5);
    CHECK(c.set.lambda_cov == 0.3);
    CHECK(c.set.lambda_red == 0.2);
    CHECK(c.set.gamma == 10.0);
    CHECK(c.set.tau_c == 2.0);
    CHECK(c.k_sel == 16);
    CHECK(c.n_frames == 128);
    CHECK(c.num_queries == 3);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("json round trip preserves every field") {
    TrainConfig c = test::tiny_config(42);
    c.disable_kl = true;
    c.set.gamma = 3.5;
    c.tau.floor = 0.25;
    const auto back = train_config_from_json(train_config_to_json(c));
    CHECK(train_config_to_json(back) == train_config_to_json(c));
    CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("missing keys keep defaults; unknown and mistyped keys are rejected") {
    const auto c = train_config_from_json(R"({"lr": 0.001})");
    CHECK(c.lr == 0.001);
    CHECK(c.batch_size == 16);
    CHECK_THROWS_AS(train_config_from_json(R"({"learning_rate": 0.1})"), ValidationError);
    CHECK_THROWS_AS(train_config_from_json(R"({"lr": "fast"})"), ValidationError);
    CHECK_THROWS_AS(train_config_from_json(R"({"batch_size": -1})"), ValidationError);
    CHECK_THROWS_AS(train_config_from_json(R"({"disable_kl": 1})"), ValidationError);
    CHECK_THROWS_AS(train_config_from_json("[1, 2]"), ValidationError);
    CHECK_THROWS_AS(train_config_from_json("{not json"), ValidationError);
    CHECK_THROWS_AS(train_config_from_json(R"({"set": {"colour": 1}})"), ValidationError);
}

TEST_CASE("validation rejects impossible shapes and weights") {
    auto bad = [](auto mutate) {
        TrainConfig c;
        mutate(c);
        return c;
    };
    CHECK_THROWS_AS(bad([](TrainConfig& c) { c.k_sel = 200; }).validate(), ValidationError);
    CHECK_THROWS_AS(bad([](TrainConfig& c) { c.k_sel = 0; }).validate(), ValidationError);
    CHECK_THROWS_AS(bad([](TrainConfig& c) { c.lr = -1; }).validate(), ValidationError);
    CHECK_THROWS_AS(bad([](TrainConfig& c) { c.batch_size = 0; }).validate(), ValidationError);
    CHECK_THROWS_AS(bad([](TrainConfig& c) { c.tau.floor = 0; }).validate(), ValidationError);
    CHECK_THROWS_AS(bad([](TrainConfig& c) { c.set.gamma = 0; }).validate(), ValidationError);
    CHECK_THROWS_AS(bad([](TrainConfig& c) { c.num_queries = 0; }).validate(), ValidationError);
}

TEST_CASE("hash distinguishes configs") {
    TrainConfig a, b;
    b.disable_sep = true;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a) == config_hash(TrainConfig{}));
}

TEST_CASE("missing config file is an io error") {
    CHECK_THROWS_AS(load_train_config("/nonexistent/hfs.json"), IoError);
}

}  // TEST_SUITE
