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

#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "hfs/gradsuite.hpp"
#include "hfs/io.hpp"
#include "hfs/model.hpp"
#include "hfs/oracle.hpp"
#include "hfs/trainer.hpp"

namespace hfs::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void apply_ablation(TrainConfig& config, const std::string& name) {
    if (name == "cot") config.disable_cot_query = true;
    else if (name == "set") config.disable_set_objective = true;
    else if (name == "kl") config.disable_kl = true;
    else if (name == "sep") config.disable_sep = true;
    else throw ValidationError("unknown ablation '" + name + "' (expected cot, set, kl or sep)");
}

void check_shape(const TrainConfig& config, const synth::EpisodeSpec& spec, const std::string& data_dir) {
    if (config.dim != spec.dim || config.n_frames != spec.n_frames) {
        throw ValidationError("model expects " + std::to_string(config.n_frames) + " x " + std::to_string(config.dim) +
                              " frames but " + data_dir + " holds " + std::to_string(spec.n_frames) + " x " +
                              std::to_string(spec.dim));
    }
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode) {
    std::ofstream f(path, mode);
    if (!f) throw IoError("cannot open " + path + " for writing");
    return f;
}

}  // namespace

void gen_data(const GenDataArgs& args, std::ostream& out) {
    const auto spec = args.spec_path.empty() ? synth::EpisodeSpec{} : synth::spec_from_json(io::read_text_file(args.spec_path));
    spec.validate();
    std::error_code ec;
    if (fs::exists(args.out_dir, ec) && !fs::is_empty(args.out_dir, ec) && !args.force) {
        throw ValidationError(args.out_dir + " exists and is not empty; pass --force to overwrite");
    }
    io::Dataset ds;
    ds.spec = spec;
    ds.seed = args.seed;
    ds.episodes = synth::generate_dataset(spec, args.count, args.seed);
    io::write_dataset(args.out_dir, ds);
    json summary;
    summary["episodes"] = ds.episodes.size();
    summary["seed"] = args.seed;
    summary["out"] = args.out_dir;
    summary["spec"] = json::parse(synth::spec_to_json(spec));
    out << summary.dump(2) << '\n';
}

void train(const TrainArgs& args, std::ostream& out) {
    std::optional<train::Checkpoint> resumed;
    if (!args.resume_path.empty()) resumed = train::load_checkpoint(args.resume_path);

    TrainConfig config;
    if (!args.config_path.empty()) config = load_train_config(args.config_path);
    else if (resumed) config = resumed->config;
    for (const auto& a : args.ablate) apply_ablation(config, a);
    config.validate();
    if (resumed && config_hash(config) != config_hash(resumed->config)) {
        throw ValidationError("config does not match the checkpoint being resumed (" + args.resume_path + ")");
    }

    const auto data = io::read_dataset(args.data_dir);
    check_shape(config, data.spec, args.data_dir);

    auto state = resumed ? std::move(resumed->state) : train::init_state(config);
    const auto metrics_path = args.metrics_path.empty() ? args.out_path + ".metrics.jsonl" : args.metrics_path;
    auto metrics = open_output(metrics_path, resumed ? std::ios::app : std::ios::trunc);

    train::RunOptions options;
    options.stop_after = args.stop_after;
    options.metrics = &metrics;
    train::run(state, data.episodes, config, options);
    if (!metrics) throw IoError("failed writing " + metrics_path);
    train::save_checkpoint(args.out_path, config, state);

    json summary;
    summary["steps"] = state.optimizer.step;
    summary["checkpoint"] = args.out_path;
    summary["metrics"] = metrics_path;
    summary["parameters"] = parameter_count(state.model);
    out << summary.dump(2) << '\n';
}

void eval(const EvalArgs& args, std::ostream& out) {
    const auto ckpt = train::load_checkpoint(args.ckpt_path);
    const auto data = io::read_dataset(args.data_dir);
    check_shape(ckpt.config, data.spec, args.data_dir);
    const auto report = train::eval_report_json(train::evaluate(ckpt.state.model, ckpt.config, data.episodes));
    if (!args.report_path.empty()) io::write_text_file(args.report_path, report + "\n");
    out << report << '\n';
}

void select(const SelectArgs& args, std::ostream& out) {
    const auto ckpt = train::load_checkpoint(args.ckpt_path);
    const auto frames = io::read_feature_file(args.features_path);
    const auto query = io::read_feature_file(args.query_path);
    if (query.features.rows() != 1) {
        throw ValidationError(args.query_path + " must hold exactly one row, found " +
                              std::to_string(query.features.rows()));
    }
    if (frames.features.cols() != ckpt.config.dim || query.features.cols() != ckpt.config.dim) {
        throw ValidationError("feature width does not match the checkpoint's dim " + std::to_string(ckpt.config.dim));
    }
    const auto k = args.k.value_or(ckpt.config.k_sel);
    const auto result = infer(ckpt.state.model, frames.features, query.features, ckpt.config, k);
    json j;
    j["scores"] = result.scores;
    j["selected"] = result.selected;
    out << j.dump() << '\n';
}

bool gradcheck(std::uint64_t seed, std::ostream& out) {
    const auto report = gradsuite::run(seed);
    for (const auto& t : report.terms) {
        out << t.term << "\tmax_rel_err=" << t.max_relative_error << "\tentries=" << t.entries
            << "\tworst=" << t.worst_parameter << (t.max_relative_error < report.threshold ? "" : "\tFAIL") << '\n';
    }
    out << (report.passed() ? "PASS" : "FAIL") << " threshold=" << report.threshold << '\n';
    return report.passed();
}

void oracle_check(const OracleArgs& args, std::ostream& out) {
    if (args.n > 12) throw ValidationError("oracle-check enumerates subsets; --n must be <= 12");
    if (args.k < 1 || args.k > args.n) throw ValidationError("--k must lie in [1, n]");
    SetObjectiveConfig cfg;
    if (args.rel_only) {
        cfg.lambda_cov = 0.0;
        cfg.lambda_red = 0.0;
    }
    const auto r = oracle::run_check(args.n, args.k, args.trials, args.seed, cfg, args.tolerance);
    json j;
    j["trials"] = r.trials;
    j["within_tolerance"] = r.within_tolerance;
    j["fraction_within_tolerance"] = r.fraction();
    j["exact_matches"] = r.exact;
    j["mean_gap"] = r.mean_gap;
    j["tolerance"] = args.tolerance;
    j["rel_only"] = args.rel_only;
    out << j.dump(2) << '\n';
}

}  // namespace hfs::cli
