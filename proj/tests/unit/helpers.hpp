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

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "hfs/config.hpp"
#include "hfs/diff/graph.hpp"
#include "hfs/rng.hpp"
#include "hfs/synthdata.hpp"

namespace hfs::test {

inline diff::Tensor random_tensor(diff::Shape shape, std::uint64_t seed, double scale = 1.0) {
    auto rng = make_rng(seed, "test");
    diff::Tensor t(std::move(shape));
    for (auto& v : t.values()) v = scale * standard_normal(rng);
    return t;
}

// Binds a weight struct field by field as trainable leaves. `out` must
// already have any per-layer vectors sized.
template <template <class> class W>
W<diff::Var> bind_params(diff::Graph& g, const W<diff::Tensor>& w, W<diff::Var> out = {}) {
    std::vector<std::pair<std::string, const diff::Tensor*>> src;
    W<diff::Tensor>::fields(w, [&](const std::string& n, const diff::Tensor& t) { src.emplace_back(n, &t); });
    std::size_t i = 0;
    W<diff::Var>::fields(out, [&](const std::string&, diff::Var& v) {
        v = g.parameter(src[i].first, *src[i].second);
        ++i;
    });
    return out;
}

inline std::vector<double> to_vector(const diff::Tensor& t) { return {t.values().begin(), t.values().end()}; }

// Small shapes shared by the model-level tests.
inline TrainConfig tiny_config(std::uint64_t seed = 0) {
    TrainConfig c;
    c.dim = 8;
    c.vocab_size = 16;
    c.prompt_len = 6;
    c.encoder_layers = 1;
    c.ffn_width = 12;
    c.scorer_hidden = 8;
    c.teacher_hidden = 6;
    c.num_queries = 3;
    c.k_sel = 4;
    c.n_frames = 12;
    c.batch_size = 4;
    c.epochs = 2;
    c.metrics_every = 2;
    c.lr = 1e-3;
    c.seed = seed;
    return c;
}

inline synth::EpisodeSpec tiny_spec(std::uint64_t seed = 0) {
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

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() / ("hfs-test-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace hfs::test
