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
#include <bit>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "hfs/diff/gradcheck.hpp"
#include "hfs/diff/ops.hpp"
#include "hfs/setobj.hpp"

using namespace hfs;
using namespace hfs::setobj;
using diff::Graph;
using diff::Tensor;
using diff::Var;

namespace {

// Direct transcription of F for a mask, kept independent of the library.
struct Ref {
    double f, rel, cov, red;
};

Ref reference_f(const std::vector<double>& s, const std::vector<double>& m, const std::vector<double>& t,
                const SetObjectiveConfig& cfg) {
    Ref r{0, 0, 0, 0};
    double mx = -1e300;
    for (std::size_t i = 0; i < s.size(); ++i) mx = std::max(mx, s[i] * m[i] / cfg.tau_c);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        r.rel += s[i] * m[i];
        acc += std::exp(s[i] * m[i] / cfg.tau_c - mx);
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (i == j) continue;
            const double d = t[i] - t[j];
            r.red += m[i] * m[j] * std::exp(-d * d / (2 * cfg.gamma * cfg.gamma));
        }
    }
    r.cov = cfg.tau_c * (mx + std::log(acc));
    r.f = cfg.lambda_rel * r.rel + cfg.lambda_cov * r.cov - cfg.lambda_red * r.red;
    return r;
}

// Bitmask enumeration of every k-subset; first strict maximum wins.
std::vector<std::size_t> reference_best(const std::vector<double>& s, const std::vector<double>& t,
                                        const SetObjectiveConfig& cfg, std::size_t k) {
    const std::size_t n = s.size();
    double best = -1e300;
    std::vector<std::size_t> best_set;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
        std::vector<double> m(n, 0.0);
        std::vector<std::size_t> set;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                m[i] = 1.0;
                set.push_back(i);
            }
        }
        const double f = reference_f(s, m, t, cfg).f;
        if (f > best + 1e-12 || (std::abs(f - best) <= 1e-12 && set < best_set)) {
            best = f;
            best_set = set;
        }
    }
    return best_set;
}

std::vector<double> uniform_vec(std::size_t n, std::uint64_t seed, double lo, double hi) {
    auto rng = make_rng(seed, "setobj-test");
    std::vector<double> v(n);
    for (auto& x : v) x = lo + (hi - lo) * uniform_open(rng);
    return v;
}

}  // namespace

TEST_SUITE("setobj") {

TEST_CASE("temporal kernel values") {
    CHECK(temporal_kernel(3.0, 3.0, 10.0) == 1.0);
    CHECK(std::abs(temporal_kernel(0.0, 10.0, 10.0) - std::exp(-0.5)) <= 1e-12);
    CHECK(temporal_kernel(0.0, 20.0, 10.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(temporal_kernel(5.0, 1.0, 2.0) == temporal_kernel(1.0, 5.0, 2.0));
    CHECK_THROWS_AS(temporal_kernel(0.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("off-diagonal kernel is symmetric with a zero diagonal") {
    const std::vector<double> t = {0, 1, 4, 9};
    const auto k = off_diagonal_kernel(t, 2.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(k.at(i, i) == 0.0);
        for (std::size_t j = 0; j < 4; ++j) CHECK(k.at(i, j) == k.at(j, i));
    }
    CHECK(k.at(0, 1) == temporal_kernel(0, 1, 2.0));
}

TEST_CASE("coverage of an empty mask is tau_c log N") {
    Graph g;
    const Var s = g.constant(Tensor::vector({0.9, 0.1, 0.5, 0.3}));
    const Var m = g.constant(Tensor::vector({0, 0, 0, 0}));
    CHECK(std::abs(coverage(s, m, 2.0).value().item() - 2.0 * std::log(4.0)) <= 1e-9);
}

TEST_CASE("coverage approaches the max as tau_c shrinks") {
    Graph g;
    const Var s = g.constant(Tensor::vector({0.9, 0.1, 0.5}));
    const Var m = g.constant(Tensor::vector({1, 1, 1}));
    const double c = coverage(s, m, 1e-3).value().item();
    CHECK(c >= 0.9);
    CHECK(c == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("redundancy counts ordered pairs") {
    Graph g;
    const Var m = g.constant(Tensor::vector({1, 1}));
    const std::vector<double> t = {0.0, 10.0};
    CHECK(redundancy(m, t, 10.0).value().item() == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("graph terms match the reference transcription") {
    const SetObjectiveConfig cfg;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = uniform_vec(9, seed, 0.0, 1.0);
        const auto m = uniform_vec(9, seed + 100, 0.0, 1.0);
        const auto t = uniform_vec(9, seed + 200, 0.0, 40.0);
        Graph g;
        const auto terms = set_objective(g.constant(Tensor::vector(s)), g.constant(Tensor::vector(m)), t, cfg);
        const auto ref = reference_f(s, m, t, cfg);
        CHECK(terms.f.value().item() == doctest::Approx(ref.f).epsilon(1e-12));
        CHECK(terms.rel.value().item() == doctest::Approx(ref.rel).epsilon(1e-12));
        CHECK(terms.cov.value().item() == doctest::Approx(ref.cov).epsilon(1e-12));
        CHECK(terms.red.value().item() == doctest::Approx(ref.red).epsilon(1e-12));
        const auto plain = evaluate(s, m, t, cfg);
        CHECK(plain.f == doctest::Approx(ref.f).epsilon(1e-12));
    }
}

TEST_CASE("set objective gradients pass a finite-difference check") {
    const SetObjectiveConfig cfg;
    const auto t = uniform_vec(6, 3, 0.0, 20.0);
    Graph g;
    const Var s = g.parameter("s", Tensor::vector(uniform_vec(6, 1, 0.0, 1.0)));
    const Var m = g.parameter("m", Tensor::vector(uniform_vec(6, 2, 0.0, 1.0)));
    const auto terms = set_objective(s, m, t, cfg);
    for (const Var v : {terms.f, terms.rel, terms.cov, terms.red}) {
        CHECK(diff::finite_diff_check(g, v).max_relative_error < 1e-7);
    }
}

TEST_CASE("evaluate_set matches a binary mask") {
    const SetObjectiveConfig cfg;
    const auto s = uniform_vec(8, 5, 0.0, 1.0);
    const auto t = uniform_vec(8, 6, 0.0, 30.0);
    const std::vector<std::size_t> sel = {1, 4, 6};
    std::vector<double> m(8, 0.0);
    for (auto i : sel) m[i] = 1.0;
    CHECK(evaluate_set(s, sel, t, cfg).f == doctest::Approx(reference_f(s, m, t, cfg).f).epsilon(1e-12));
    CHECK_THROWS_AS(evaluate_set(s, std::vector<std::size_t>{9}, t, cfg), ValidationError);
}

TEST_CASE("brute force agrees with an independent bitmask search") {
    const SetObjectiveConfig cfg;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = uniform_vec(9, seed, 0.05, 1.0);
        auto t = uniform_vec(9, seed + 50, 0.0, 50.0);
        std::sort(t.begin(), t.end());
        const std::size_t k = 1 + seed % 4;
        CHECK(brute_force_best_set(s, t, cfg, k).selected == reference_best(s, t, cfg, k));
    }
}

TEST_CASE("relevance-only optimum is the top-k") {
    SetObjectiveConfig cfg;
    cfg.lambda_cov = 0.0;
    cfg.lambda_red = 0.0;
    const std::vector<double> s = {0.2, 0.9, 0.1, 0.7, 0.5};
    const std::vector<double> t = {0, 1, 2, 3, 4};
    CHECK(brute_force_best_set(s, t, cfg, 2).selected == std::vector<std::size_t>{1, 3});
}

TEST_CASE("redundancy steers the optimum apart in time") {
    // Two equal-score frames side by side and one far away.
    SetObjectiveConfig cfg;
    cfg.lambda_red = 1.0;
    const std::vector<double> s = {0.9, 0.9, 0.85};
    const std::vector<double> t = {0.0, 0.5, 100.0};
    CHECK(brute_force_best_set(s, t, cfg, 2).selected == std::vector<std::size_t>{0, 2});
}

TEST_CASE("brute force argument checks") {
    const SetObjectiveConfig cfg;
    const std::vector<double> s(3, 0.5), t = {0, 1, 2};
    CHECK_THROWS_AS(brute_force_best_set(s, t, cfg, 4), ValidationError);
    CHECK_THROWS_AS(brute_force_best_set(s, std::vector<double>{0, 1}, cfg, 1), ValidationError);
    const std::vector<double> big(60, 0.5), bt(60, 0.0);
    CHECK_THROWS_AS(brute_force_best_set(big, bt, cfg, 30), ValidationError);
    CHECK(binomial(10, 3) == 120.0);
    CHECK(binomial(5, 0) == 1.0);
    CHECK(binomial(3, 5) == 0.0);
}

TEST_CASE("config validation") {
    SetObjectiveConfig cfg;
    cfg.tau_c = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.lambda_red = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

}  // TEST_SUITE
