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

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "hfs/synthdata.hpp"

using namespace hfs;
using namespace hfs::synth;

namespace {

double dot_rows(const diff::Tensor& a, std::size_t i, const diff::Tensor& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) s += a.at(i, c) * b.at(j, c);
    return s;
}

std::vector<double> mean_of(const Episode& e, const std::vector<std::size_t>& rows) {
    std::vector<double> m(e.dim(), 0.0);
    for (auto r : rows)
        for (std::size_t c = 0; c < e.dim(); ++c) m[c] += e.features.at(r, c) / static_cast<double>(rows.size());
    return m;
}

double dot_option(const Episode& e, const std::vector<double>& v, std::size_t opt) {
    double s = 0.0;
    for (std::size_t c = 0; c < e.dim(); ++c) s += v[c] * e.options.at(opt, c);
    return s;
}

// Independent argmax with smallest-index ties.
std::size_t reference_oracle(const Episode& e, const std::vector<std::size_t>& rows) {
    const auto m = mean_of(e, rows);
    std::size_t best = 0;
    for (std::size_t c = 1; c < e.num_options(); ++c)
        if (dot_option(e, m, c) > dot_option(e, m, best)) best = c;
    return best;
}

}  // namespace

TEST_SUITE("synthdata") {

TEST_CASE("default spec matches the published scale") {
    const EpisodeSpec s;
    CHECK(s.n_frames == 128);
    CHECK(s.dim == 64);
    CHECK(s.num_options == 4);
    CHECK(s.k_star == 4);
    CHECK(s.n_dup == 6);
}

TEST_CASE("task prototypes and question probe respect their angle bounds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EpisodeSpec spec;
        spec.seed = seed;
        const auto task = make_task(spec);
        for (std::size_t a = 0; a < spec.num_options; ++a) {
            CHECK(dot_rows(task.options, a, task.options, a) == doctest::Approx(1.0).epsilon(1e-12));
            for (std::size_t b = a + 1; b < spec.num_options; ++b) CHECK(std::abs(dot_rows(task.options, a, task.options, b)) < 0.3);
            double q = 0.0, qq = 0.0;
            for (std::size_t c = 0; c < spec.dim; ++c) {
                q += task.question[c] * task.options.at(a, c);
                qq += task.question[c] * task.question[c];
            }
            CHECK(std::abs(q / std::sqrt(qq)) < 0.2);
        }
    }
}

TEST_CASE("episode structure invariants") {
    const EpisodeSpec spec;
    const auto data = generate_dataset(spec, 200, 3);
    for (const auto& e : data) {
        REQUIRE(e.n_frames() == spec.n_frames);
        REQUIRE(e.dim() == spec.dim);
        CHECK(e.evidence.size() == spec.k_star);
        CHECK(e.duplicates.size() == spec.n_dup);
        CHECK(std::is_sorted(e.evidence.begin(), e.evidence.end()));
        CHECK(std::set<std::size_t>(e.evidence.begin(), e.evidence.end()).size() == spec.k_star);
        CHECK(std::find(e.evidence.begin(), e.evidence.end(), e.lead_evidence) != e.evidence.end());
        std::set<std::size_t> all(e.evidence.begin(), e.evidence.end());
        all.insert(e.duplicates.begin(), e.duplicates.end());
        CHECK(all.size() == spec.k_star + spec.n_dup);  // copies never overwrite evidence
        for (auto d : e.duplicates) CHECK(std::abs(e.timestamps[d] - e.timestamps[e.lead_evidence]) <= spec.duplicate_window);
        for (std::size_t i = 0; i < e.n_frames(); ++i) CHECK(e.timestamps[i] == static_cast<double>(i));
        CHECK(e.answer < spec.num_options);
        // Evidence mean favours the answer by the generation margin.
        const auto m = mean_of(e, e.evidence);
        for (std::size_t c = 0; c < spec.num_options; ++c) {
            if (c != e.answer) CHECK(dot_option(e, m, e.answer) - dot_option(e, m, c) >= kMinMargin);
        }
        CHECK(oracle_answer(e, e.evidence) == e.answer);
    }
}

TEST_CASE("noise-free evidence mean recovers the answer prototype exactly") {
    EpisodeSpec spec;
    spec.noise_sigma = 0.0;
    for (const auto& e : generate_dataset(spec, 20, 9)) {
        const auto m = mean_of(e, e.evidence);
        for (std::size_t c = 0; c < spec.dim; ++c) CHECK(m[c] == doctest::Approx(e.options.at(e.answer, c)).epsilon(1e-12));
    }
}

TEST_CASE("background frames are unit vectors outside the option span") {
    EpisodeSpec spec;
    spec.noise_sigma = 0.0;
    const auto e = generate_dataset(spec, 1, 4).front();
    std::set<std::size_t> planted(e.evidence.begin(), e.evidence.end());
    planted.insert(e.duplicates.begin(), e.duplicates.end());
    for (std::size_t i = 0; i < e.n_frames(); ++i) {
        if (planted.count(i)) continue;
        CHECK(dot_rows(e.features, i, e.features, i) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t c = 0; c < e.num_options(); ++c) CHECK(std::abs(dot_rows(e.features, i, e.options, c)) < 1e-12);
    }
}

TEST_CASE("lead frame and its copies alone mislead the oracle") {
    const EpisodeSpec spec;
    const auto data = generate_dataset(spec, 1000, 21);
    int wrong = 0;
    for (const auto& e : data) {
        std::vector<std::size_t> s = e.duplicates;
        s.push_back(e.lead_evidence);
        std::sort(s.begin(), s.end());
        if (oracle_answer(e, s) != e.answer) ++wrong;
    }
    CHECK(wrong >= 900);
}

TEST_CASE("whole-video mean answers correctly without distractor copies") {
    EpisodeSpec spec;
    spec.noise_sigma = 0.0;
    spec.n_dup = 0;
    std::vector<std::size_t> all(spec.n_frames);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (const auto& e : generate_dataset(spec, 100, 5)) CHECK(oracle_answer(e, all) == e.answer);
}

TEST_CASE("a single background frame answers at chance") {
    const EpisodeSpec spec;
    const auto data = generate_dataset(spec, 1000, 8);
    int correct = 0;
    for (const auto& e : data) {
        std::size_t frame = 0;
        while (std::find(e.evidence.begin(), e.evidence.end(), frame) != e.evidence.end() ||
               std::find(e.duplicates.begin(), e.duplicates.end(), frame) != e.duplicates.end())
            ++frame;
        if (oracle_answer(e, {frame}) == e.answer) ++correct;
    }
    CHECK(std::abs(correct / 1000.0 - 0.25) <= 0.05);
}

TEST_CASE("oracle answer matches an independent argmax") {
    const auto data = generate_dataset(EpisodeSpec{}, 50, 2);
    auto rng = make_rng(0, "subsets");
    for (const auto& e : data) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < e.n_frames(); ++i)
            if (uniform_open(rng) < 0.1) s.push_back(i);
        if (s.empty()) s.push_back(0);
        CHECK(oracle_answer(e, s) == reference_oracle(e, s));
    }
    CHECK_THROWS_AS(oracle_answer(data.front(), {}), ValidationError);
    CHECK_THROWS_AS(oracle_answer(data.front(), {500}), ValidationError);
}

TEST_CASE("evidence recall") {
    CHECK(evidence_recall({1, 2, 3, 4, 9}, {1, 2, 3, 4}) == 1.0);
    CHECK(evidence_recall({5, 6}, {1, 2, 3, 4}) == 0.0);
    CHECK(evidence_recall({1, 2, 3}, {1, 2, 3, 4}) == 0.75);
}

TEST_CASE("uniform grid") {
    CHECK(uniform_grid(128, 16).front() == 0);
    CHECK(uniform_grid(128, 16)[1] == 8);
    CHECK(uniform_grid(10, 3) == std::vector<std::size_t>{0, 3, 6});
    CHECK_THROWS_AS(uniform_grid(3, 4), ValidationError);
}

TEST_CASE("uniform-grid recall sits at k_sel / N") {
    const auto data = generate_dataset(EpisodeSpec{}, 2000, 17);
    const auto grid = uniform_grid(128, 16);
    double total = 0.0;
    for (const auto& e : data) total += evidence_recall(grid, e.evidence);
    CHECK(std::abs(total / 2000.0 - 0.125) <= 0.02);
}

TEST_CASE("generation is deterministic and keyed by index") {
    const EpisodeSpec spec = test::tiny_spec();
    const auto a = generate_dataset(spec, 5, 11);
    const auto b = generate_dataset(spec, 5, 11);
    const auto c = generate_dataset(spec, 8, 11);
    CHECK(a == b);
    for (std::size_t i = 0; i < 5; ++i) CHECK(a[i] == c[i]);
    CHECK_FALSE(a[0] == generate_dataset(spec, 1, 12)[0]);
    CHECK(generate_dataset(spec, 0, 1).empty());
}

TEST_CASE("text embeddings stack the question over the options") {
    const auto e = generate_dataset(test::tiny_spec(), 1, 0).front();
    const auto t = text_embeddings(e);
    CHECK(t.rows() == 1 + e.num_options());
    for (std::size_t c = 0; c < e.dim(); ++c) {
        CHECK(t.at(0, c) == e.question[c]);
        CHECK(t.at(2, c) == e.options.at(1, c));
    }
}

TEST_CASE("spec validation and json round trip") {
    EpisodeSpec s;
    s.num_options = 1;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.k_star = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    CHECK_THROWS_AS(s.validate(200), ValidationError);
    CHECK_THROWS_AS(s.validate(2), ValidationError);  // k_sel < k_star
    s.dim = 4;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    EpisodeSpec t = test::tiny_spec(77);
    t.noise_sigma = 0.125;
    const auto back = spec_from_json(spec_to_json(t));
    CHECK(spec_to_json(back) == spec_to_json(t));
    CHECK_THROWS_AS(spec_from_json(R"({"frames": 3})"), ValidationError);
}

}  // TEST_SUITE
