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
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hfs/config.hpp"
#include "hfs/diff/graph.hpp"
#include "hfs/model.hpp"
#include "hfs/mutual.hpp"
#include "hfs/synthdata.hpp"

namespace hfs::train {

struct OptimizerState {
    std::map<std::string, Tensor> m;  // first moments, keyed like parameters
    std::map<std::string, Tensor> v;  // second moments
    std::uint64_t step = 0;           // completed updates
};

OptimizerState init_optimizer(const Model& model);

struct AdamWParams {
    double lr = 1e-5;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamWParams adamw_params(const TrainConfig& config);

// p <- p - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * p, bias-corrected with
// the post-increment step. Parameters missing from `grads` see a zero gradient.
void adamw_step(Model& model, const diff::GradientMap& grads, OptimizerState& state, const AdamWParams& params);

struct Schedule {
    double tau = 2.0;
    double lambda_kl = 0.1;
};

Schedule schedule(std::size_t step, std::size_t epoch_len, const TrainConfig& config);

std::size_t steps_per_epoch(std::size_t dataset_size, std::size_t batch_size);

// Dataset order for one epoch; a pure function of (seed, epoch).
std::vector<std::size_t> epoch_order(std::uint64_t seed, std::size_t epoch, std::size_t dataset_size);

// Gumbel draw for one episode at one step; zeros when noise is disabled.
std::vector<double> step_noise(const TrainConfig& config, std::uint64_t step, std::size_t episode_index, std::size_t n);

struct StepReport {
    std::uint64_t step = 0;  // index of the update this report describes
    Schedule schedule;
    mutual::LossBreakdown mean;  // batch mean of every term
    std::vector<mutual::LossBreakdown> episodes;
};

struct TrainState {
    Model model;
    OptimizerState optimizer;
};

TrainState init_state(const TrainConfig& config);

// One update over `batch` (dataset indices). Gradients are summed in batch
// order, then one AdamW step is applied.
StepReport train_step(TrainState& state, const std::vector<synth::Episode>& dataset,
                      const std::vector<std::size_t>& batch, const TrainConfig& config, std::size_t epoch_len);

// Batch for global step `step`, derived from the epoch shuffle.
std::vector<std::size_t> batch_for_step(const TrainConfig& config, std::uint64_t step, std::size_t dataset_size);

struct RunOptions {
    std::uint64_t stop_after = 0;  // absolute step to stop at; 0 runs all epochs
    std::ostream* metrics = nullptr;
    std::function<void(const StepReport&)> on_step;
};

// Runs from state.optimizer.step to the end (or stop_after). Metrics lines go
// out after every `metrics_every`-th update and after the run's final update.
void run(TrainState& state, const std::vector<synth::Episode>& dataset, const TrainConfig& config,
         const RunOptions& options = {});

std::string metrics_line(const StepReport& report);

struct EvalReport {
    std::size_t episodes = 0;
    std::size_t k = 0;
    double oracle_accuracy = 0.0;
    double evidence_recall = 0.0;
    double mean_pairwise_kernel_similarity = 0.0;
    double duplicate_fraction = 0.0;  // share of selected frames from the near-copy cluster
    double teacher_accuracy = 0.0;
    double mean_f = 0.0, mean_rel = 0.0, mean_cov = 0.0, mean_red = 0.0;
    // Uniform grid baseline on the same episodes.
    double uniform_recall = 0.0;
    double uniform_accuracy = 0.0;
    double uniform_kernel_similarity = 0.0;
};

// Noiseless hard top-k of the scores; averages over `dataset`.
EvalReport evaluate(const Model& model, const TrainConfig& config, const std::vector<synth::Episode>& dataset);

// Mean of K(t_i, t_j) over unordered pairs of `selected`; 0 below two frames.
double mean_pairwise_kernel_similarity(const std::vector<std::size_t>& selected, const std::vector<double>& timestamps,
                                       double gamma);

std::string eval_report_json(const EvalReport& report, int indent = 2);

// HFSC: "HFSC", u32 version, u64 config hash, u64 step, config JSON, then
// named f64 tensors for every parameter and both Adam moments.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    TrainConfig config;
    TrainState state;
};

std::vector<unsigned char> encode_checkpoint(const TrainConfig& config, const TrainState& state);
Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes, const std::string& source = "<memory>");
void save_checkpoint(const std::string& path, const TrainConfig& config, const TrainState& state);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hfs::train
