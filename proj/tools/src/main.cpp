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

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hfs/error.hpp"

int main(int argc, char** argv) {
    using namespace hfs::cli;
    CLI::App app{"Query-aware key-frame selection: data, training, evaluation and checks"};
    app.require_subcommand(1);

    GenDataArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic episode dataset");
    gen_cmd->add_option("--spec", gen.spec_path, "Episode spec JSON (default spec if omitted)")->check(CLI::ExistingFile);
    gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
    gen_cmd->add_option("--count", gen.count, "Number of episodes")->required();
    gen_cmd->add_option("--seed", gen.seed, "Dataset seed")->required();
    gen_cmd->add_flag("--force", gen.force, "Write into a non-empty directory");

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train the selector and teacher");
    train_cmd->add_option("--config", tr.config_path, "Training config JSON")->check(CLI::ExistingFile);
    train_cmd->add_option("--data", tr.data_dir, "Dataset directory")->required();
    train_cmd->add_option("--out", tr.out_path, "Checkpoint path")->required();
    train_cmd->add_option("--ablate", tr.ablate, "Disable a component: cot, set, kl or sep (repeatable)")
        ->check(CLI::IsMember({"cot", "set", "kl", "sep"}));
    train_cmd->add_option("--metrics", tr.metrics_path, "Metrics JSONL path (default <out>.metrics.jsonl)");
    train_cmd->add_option("--resume", tr.resume_path, "Continue from this checkpoint")->check(CLI::ExistingFile);
    train_cmd->add_option("--stop-after", tr.stop_after, "Stop once this many updates are done");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint with noiseless top-k selection");
    eval_cmd->add_option("--ckpt", ev.ckpt_path, "Checkpoint")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--data", ev.data_dir, "Dataset directory")->required();
    eval_cmd->add_option("--report", ev.report_path, "Report JSON path");

    SelectArgs sel;
    std::size_t k = 0;
    auto* select_cmd = app.add_subcommand("select", "Score frames and print the top-k");
    select_cmd->add_option("--ckpt", sel.ckpt_path, "Checkpoint")->required()->check(CLI::ExistingFile);
    select_cmd->add_option("--features", sel.features_path, "HFSF frame features")->required();
    select_cmd->add_option("--query", sel.query_path, "HFSF file with one query row")->required();
    auto* k_opt = select_cmd->add_option("--k", k, "Frames to select (default: checkpoint k_sel)");

    std::uint64_t grad_seed = 0;
    auto* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
    grad_cmd->add_option("--seed", grad_seed, "Seed");

    OracleArgs orc;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Annealed ascent on F against brute force");
    oracle_cmd->add_option("--n", orc.n, "Frames per instance (<= 12)");
    oracle_cmd->add_option("--k", orc.k, "Set size");
    oracle_cmd->add_option("--trials", orc.trials, "Instances");
    oracle_cmd->add_option("--seed", orc.seed, "Seed");
    oracle_cmd->add_option("--tolerance", orc.tolerance, "Relative gap counted as a match");
    oracle_cmd->add_flag("--rel-only", orc.rel_only, "Zero the coverage and redundancy weights");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(hfs::ErrorKind::validation);
    }

    try {
        if (*gen_cmd) gen_data(gen, std::cout);
        else if (*train_cmd) train(tr, std::cout);
        else if (*eval_cmd) eval(ev, std::cout);
        else if (*select_cmd) {
            if (*k_opt) sel.k = k;
            select(sel, std::cout);
        } else if (*grad_cmd) {
            if (!gradcheck(grad_seed, std::cout)) return static_cast<int>(hfs::ErrorKind::numeric);
        } else if (*oracle_cmd) oracle_check(orc, std::cout);
    } catch (const hfs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
