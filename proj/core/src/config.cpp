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

#include "hfs/config.hpp"

#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>

#include "hfs/error.hpp"

namespace hfs {
namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError("invalid config: " + what);
}

template <class T>
void read_value(const json& j, const std::string& key, T& dst) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!j.is_boolean()) throw ValidationError("'" + key + "' must be a boolean");
            dst = j.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
                throw ValidationError("'" + key + "' must be a non-negative integer");
            }
            dst = j.get<T>();
        } else {
            if (!j.is_number()) throw ValidationError("'" + key + "' must be a number");
            dst = j.get<T>();
        }
    } catch (const json::exception& e) {
        throw ValidationError("'" + key + "': " + e.what());
    }
}

// Single table of (key, accessor) pairs shared by the reader and writer.
template <class Visitor>
void visit_fields(TrainConfig& c, Visitor&& v) {
    v("dim", c.dim);
    v("vocab_size", c.vocab_size);
    v("prompt_len", c.prompt_len);
    v("encoder_layers", c.encoder_layers);
    v("ffn_width", c.ffn_width);
    v("scorer_hidden", c.scorer_hidden);
    v("teacher_hidden", c.teacher_hidden);
    v("num_queries", c.num_queries);
    v("k_sel", c.k_sel);
    v("n_frames", c.n_frames);
    v("lr", c.lr);
    v("weight_decay", c.weight_decay);
    v("beta1", c.beta1);
    v("beta2", c.beta2);
    v("adam_eps", c.adam_eps);
    v("batch_size", c.batch_size);
    v("epochs", c.epochs);
    v("seed", c.seed);
    v("lambda_set", c.lambda_set);
    v("lambda_sep", c.lambda_sep);
    v("lambda_kl_start", c.lambda_kl_start);
    v("lambda_kl_end", c.lambda_kl_end);
    v("tau_init", c.tau.initial);
    v("tau_decay", c.tau.decay);
    v("tau_min", c.tau.floor);
    v("tau_d", c.tau_d);
    v("tau_c", c.set.tau_c);
    v("gamma", c.set.gamma);
    v("lambda_rel", c.set.lambda_rel);
    v("lambda_cov", c.set.lambda_cov);
    v("lambda_red", c.set.lambda_red);
    v("gumbel_noise", c.gumbel_noise);
    v("metrics_every", c.metrics_every);
    v("disable_cot_query", c.disable_cot_query);
    v("disable_set_objective", c.disable_set_objective);
    v("disable_kl", c.disable_kl);
    v("disable_sep", c.disable_sep);
}

}  // namespace

void SetObjectiveConfig::validate() const {
    require(lambda_rel >= 0.0 && lambda_cov >= 0.0 && lambda_red >= 0.0, "set objective weights must be non-negative");
    require(tau_c > 0.0, "tau_c must be positive");
    require(gamma > 0.0, "gamma must be positive");
}

void TemperatureSchedule::validate() const {
    require(initial > 0.0, "tau_init must be positive");
    require(decay > 0.0 && decay <= 1.0, "tau_decay must lie in (0, 1]");
    require(floor > 0.0, "tau_min must be positive");
}

void TrainConfig::validate() const {
    require(dim > 0 && vocab_size > 0 && encoder_layers > 0, "model dimensions must be positive");
    require(ffn_width > 0 && scorer_hidden > 0 && teacher_hidden > 0, "hidden widths must be positive");
    require(num_queries >= 1, "num_queries must be >= 1");
    require(k_sel >= 1 && k_sel <= n_frames, "k_sel must lie in [1, n_frames]");
    require(lr > 0.0, "lr must be positive");
    require(weight_decay >= 0.0, "weight_decay must be non-negative");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "Adam betas must lie in [0, 1)");
    require(adam_eps > 0.0, "adam_eps must be positive");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(lambda_set >= 0.0 && lambda_sep >= 0.0, "loss weights must be non-negative");
    require(lambda_kl_start >= 0.0 && lambda_kl_end >= 0.0, "KL weights must be non-negative");
    require(tau_d > 0.0, "tau_d must be positive");
    require(metrics_every >= 1, "metrics_every must be >= 1");
    tau.validate();
    set.validate();
}

TrainConfig train_config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");

    TrainConfig config;
    std::map<std::string, bool> known;
    visit_fields(config, [&](const char* key, auto&) { known[key] = true; });
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) throw ValidationError("unknown config key '" + key + "'");
    }
    visit_fields(config, [&](const char* key, auto& field) {
        if (doc.contains(key)) read_value(doc.at(key), key, field);
    });
    config.validate();
    return config;
}

std::string train_config_to_json(const TrainConfig& config, int indent) {
    json doc = json::object();
    TrainConfig copy = config;
    visit_fields(copy, [&](const char* key, auto& field) { doc[key] = field; });
    return doc.dump(indent);
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return train_config_from_json(ss.str());
}

std::uint64_t config_hash(const TrainConfig& config) {
    const std::string canonical = train_config_to_json(config, -1);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace hfs
