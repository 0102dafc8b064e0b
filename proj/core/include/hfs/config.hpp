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
#include <cstdint>
#include <string>

namespace hfs {

// Weights and temperatures of the set-quality objective F(m).
struct SetObjectiveConfig {
    double lambda_rel = 0.5;
    double lambda_cov = 0.3;
    double lambda_red = 0.2;
    double tau_c = 2.0;   // coverage smoothing temperature
    double gamma = 10.0;  // temporal kernel bandwidth, timestamp units

    void validate() const;
};

// Gumbel temperature: max(floor, initial * decay^step).
struct TemperatureSchedule {
    double initial = 2.0;
    double decay = 0.999;
    double floor = 0.5;

    void validate() const;
};

struct TrainConfig {
    // Model shape.
    std::size_t dim = 64;
    std::size_t vocab_size = 64;
    std::size_t prompt_len = 32;
    std::size_t encoder_layers = 2;
    std::size_t ffn_width = 128;
    std::size_t scorer_hidden = 128;
    std::size_t teacher_hidden = 64;
    std::size_t num_queries = 3;  // K
    std::size_t k_sel = 16;
    std::size_t n_frames = 128;

    // Optimisation.
    double lr = 1e-5;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t batch_size = 16;
    std::size_t epochs = 3;
    std::uint64_t seed = 0;

    // Loss weights and schedules.
    double lambda_set = 1e-4;
    double lambda_sep = 0.01;
    double lambda_kl_start = 0.1;
    double lambda_kl_end = 1.0;
    TemperatureSchedule tau;
    double tau_d = 0.5;
    SetObjectiveConfig set;

    bool gumbel_noise = true;
    std::size_t metrics_every = 50;

    // Ablations.
    bool disable_cot_query = false;
    bool disable_set_objective = false;
    bool disable_kl = false;
    bool disable_sep = false;

    void validate() const;
};

// JSON mirror of TrainConfig. Missing keys keep their defaults; unknown keys
// and wrongly typed values are rejected with ValidationError.
TrainConfig train_config_from_json(const std::string& text);
std::string train_config_to_json(const TrainConfig& config, int indent = 2);
TrainConfig load_train_config(const std::string& path);

// Stable 64-bit hash of the canonical JSON form.
std::uint64_t config_hash(const TrainConfig& config);

}  // namespace hfs
