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
#include <vector>

#include "hfs/diff/tensor.hpp"
#include "hfs/rng.hpp"

// Synthetic question-answering episodes with planted evidence.
//
// Each task fixes C unit option prototypes and a question probe. An episode
// answers option a: k* evidence frames o_a + p_j carry perturbations
// orthogonal to o_a that sum to zero, so only the full evidence set averages
// back to o_a. The first perturbation leans toward a distractor option and
// is copied n_dup times in a tight temporal cluster; selecting that cluster
// alone points the oracle at the distractor. Background frames are unit
// vectors orthogonal to every option.
namespace hfs::synth {

using diff::Tensor;

struct EpisodeSpec {
    std::size_t n_frames = 128;
    std::size_t dim = 64;
    std::size_t num_options = 4;
    std::size_t k_star = 4;
    std::size_t n_dup = 6;
    double duplicate_window = 4.0;  // max |t_dup - t_v1|, timestamp units
    double noise_sigma = 0.05;      // isotropic per-coordinate noise on every frame
    std::uint64_t seed = 0;         // task seed: prototypes and question probe

    void validate(std::size_t k_sel = 0) const;
};

struct Episode {
    Tensor features;                  // N x d
    std::vector<double> timestamps;   // N, frame slots 0..N-1
    Tensor question;                  // d
    Tensor options;                   // C x d
    std::size_t answer = 0;
    std::vector<std::size_t> evidence;    // k*, ascending
    std::vector<std::size_t> duplicates;  // n_dup near-copies of the first evidence frame, ascending
    std::size_t lead_evidence = 0;        // slot of v_1

    std::size_t n_frames() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
    std::size_t num_options() const { return options.rows(); }
};

bool operator==(const Episode& a, const Episode& b);

struct Task {
    Tensor options;   // C x d unit prototypes, pairwise |cos| < 0.3
    Tensor question;  // d, |cos(question, o_c)| < 0.2
};

// Weight of the distractor direction in the raw lead perturbation.
inline constexpr double kDistractorLean = 1.6;
// Scale of the isotropic part of each raw perturbation.
inline constexpr double kPerturbationScale = 0.5;
// Per-direction scale of each perturbation inside the distractor span.
inline constexpr double kOptionSpread = 0.0;
inline constexpr double kMinMargin = 0.1;
inline constexpr int kMaxResamples = 100;

Task make_task(const EpisodeSpec& spec);

Episode generate_episode(const EpisodeSpec& spec, Rng& rng);
Episode generate_episode(const EpisodeSpec& spec, const Task& task, Rng& rng);

// Episodes keyed by (seed, index) so any subset can be regenerated alone.
std::vector<Episode> generate_dataset(const EpisodeSpec& spec, std::size_t count, std::uint64_t seed);

// argmax_c <mean of features over S, o_c>; ties go to the smallest c.
std::size_t oracle_answer(const Episode& episode, const std::vector<std::size_t>& selected);

double evidence_recall(const std::vector<std::size_t>& selected, const std::vector<std::size_t>& evidence);

// floor(i * N / k) for i = 0..k-1.
std::vector<std::size_t> uniform_grid(std::size_t n_frames, std::size_t k);

// E_qa rows: the question followed by the options, (1 + C) x d.
Tensor text_embeddings(const Episode& episode);

std::string spec_to_json(const EpisodeSpec& spec, int indent = -1);
EpisodeSpec spec_from_json(const std::string& text);

}  // namespace hfs::synth
