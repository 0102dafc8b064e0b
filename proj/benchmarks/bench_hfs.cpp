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

// Microbenchmarks for the hot paths at default sizes (N=128, d=64, k_sel=16).
#include <benchmark/benchmark.h>

#include <numeric>

#include "hfs/selector.hpp"
#include "hfs/setobj.hpp"
#include "hfs/synthdata.hpp"
#include "hfs/trainer.hpp"

namespace {

using hfs::diff::Graph;
using hfs::diff::Tensor;

std::vector<double> uniform_scores(std::size_t n, std::uint64_t seed) {
    auto rng = hfs::make_rng(seed, "bench");
    std::vector<double> s(n);
    for (auto& x : s) x = 0.05 + 0.9 * hfs::uniform_open(rng);
    return s;
}

void BM_GumbelTopK(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto scores = uniform_scores(n, 1);
    auto rng = hfs::make_rng(2, "noise");
    for (auto _ : state) {
        Graph g;
        const auto s = g.constant(Tensor::vector(scores));
        auto sel = hfs::selector::gumbel_topk(s, 1.0, 16, hfs::selector::sample_gumbel(n, rng));
        benchmark::DoNotOptimize(sel.hard.data());
    }
}
BENCHMARK(BM_GumbelTopK)->Arg(32)->Arg(128)->Arg(512);

void BM_SetObjectiveBackward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto scores = uniform_scores(n, 3);
    const auto mask = uniform_scores(n, 4);
    std::vector<double> t(n);
    std::iota(t.begin(), t.end(), 0.0);
    const hfs::SetObjectiveConfig cfg;
    for (auto _ : state) {
        Graph g;
        const auto s = g.parameter("s", Tensor::vector(scores));
        const auto m = g.parameter("m", Tensor::vector(mask));
        const auto terms = hfs::setobj::set_objective(s, m, t, cfg);
        auto grads = g.backward(terms.f);
        benchmark::DoNotOptimize(grads);
    }
}
BENCHMARK(BM_SetObjectiveBackward)->Arg(32)->Arg(128)->Arg(512);

void BM_GenerateEpisode(benchmark::State& state) {
    const hfs::synth::EpisodeSpec spec;
    const auto task = hfs::synth::make_task(spec);
    std::uint64_t i = 0;
    for (auto _ : state) {
        auto rng = hfs::make_rng(0, "episode", i++);
        auto ep = hfs::synth::generate_episode(spec, task, rng);
        benchmark::DoNotOptimize(ep.features.data());
    }
}
BENCHMARK(BM_GenerateEpisode);

void BM_TrainStep(benchmark::State& state) {
    hfs::TrainConfig config;
    config.lr = 3e-4;
    const hfs::synth::EpisodeSpec spec;
    const auto data = hfs::synth::generate_dataset(spec, config.batch_size, 0);
    std::vector<std::size_t> batch(config.batch_size);
    std::iota(batch.begin(), batch.end(), 0);
    auto train_state = hfs::train::init_state(config);
    for (auto _ : state) {
        auto report = hfs::train::train_step(train_state, data, batch, config, 1);
        benchmark::DoNotOptimize(report.mean.total);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.batch_size));
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_Inference(benchmark::State& state) {
    hfs::TrainConfig config;
    const hfs::synth::EpisodeSpec spec;
    const auto ep = hfs::synth::generate_dataset(spec, 1, 0).front();
    const auto model = hfs::init_model(config);
    const auto text = hfs::synth::text_embeddings(ep);
    for (auto _ : state) {
        auto inf = hfs::infer(model, ep.features, text, config, config.k_sel);
        benchmark::DoNotOptimize(inf.scores.data());
    }
}
BENCHMARK(BM_Inference)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
