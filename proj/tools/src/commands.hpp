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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// One function per subcommand. Each writes its human/JSON output to `out`
// and throws hfs::Error subclasses, which main() maps onto exit codes.
namespace hfs::cli {

struct GenDataArgs {
    std::string spec_path;  // empty: default spec
    std::string out_dir;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    bool force = false;
};
void gen_data(const GenDataArgs& args, std::ostream& out);

struct TrainArgs {
    std::string config_path;  // empty: defaults, or the resumed checkpoint's config
    std::string data_dir;
    std::string out_path;
    std::vector<std::string> ablate;  // cot | set | kl | sep
    std::string metrics_path;         // empty: <out>.metrics.jsonl
    std::string resume_path;
    std::uint64_t stop_after = 0;     // absolute step; 0 trains to the end
};
void train(const TrainArgs& args, std::ostream& out);

struct EvalArgs {
    std::string ckpt_path;
    std::string data_dir;
    std::string report_path;  // empty: stdout only
};
void eval(const EvalArgs& args, std::ostream& out);

struct SelectArgs {
    std::string ckpt_path;
    std::string features_path;
    std::string query_path;
    std::optional<std::size_t> k;  // default: the checkpoint's k_sel
};
void select(const SelectArgs& args, std::ostream& out);

// Returns false when any term exceeds the threshold.
bool gradcheck(std::uint64_t seed, std::ostream& out);

struct OracleArgs {
    std::size_t n = 10;
    std::size_t k = 3;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    bool rel_only = false;
    double tolerance = 0.05;
};
void oracle_check(const OracleArgs& args, std::ostream& out);

}  // namespace hfs::cli
