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

#include "hfs/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "hfs/diff/ops.hpp"
#include "hfs/io.hpp"
#include "hfs/selector.hpp"
#include "hfs/setobj.hpp"

namespace hfs::train {
using nlohmann::json;

OptimizerState init_optimizer(const Model& model) {
    OptimizerState s;
    for_each_weight(model, [&](const std::string& name, const Tensor& t) {
        s.m.emplace(name, Tensor::zeros_like(t));
        s.v.emplace(name, Tensor::zeros_like(t));
    });
    return s;
}

AdamWParams adamw_params(const TrainConfig& c) {
    return {c.lr, c.weight_decay, c.beta1, c.beta2, c.adam_eps};
}

void adamw_step(Model& model, const diff::GradientMap& grads, OptimizerState& state, const AdamWParams& p) {
    for (const auto& [name, g] : grads) {
        if (!state.m.count(name)) throw ValidationError("gradient for unknown parameter " + name);
    }
    const double t = static_cast<double>(state.step + 1);
    const double bc1 = 1.0 - std::pow(p.beta1, t);
    const double bc2 = 1.0 - std::pow(p.beta2, t);
    for_each_weight(model, [&](const std::string& name, Tensor& w) {
        auto mit = state.m.find(name);
        auto vit = state.v.find(name);
        if (mit == state.m.end() || vit == state.v.end()) throw ValidationError("no optimizer moments for " + name);
        Tensor& m = mit->second;
        Tensor& v = vit->second;
        if (m.shape() != w.shape() || v.shape() != w.shape()) {
            throw ValidationError("optimizer moments for " + name + " have shape " + diff::shape_str(m.shape()) +
                                  ", parameter has " + diff::shape_str(w.shape()));
        }
        const auto git = grads.find(name);
        const Tensor* g = git == grads.end() ? nullptr : &git->second;
        if (g && g->shape() != w.shape()) {
            throw ValidationError("gradient for " + name + " has shape " + diff::shape_str(g->shape()) +
                                  ", parameter has " + diff::shape_str(w.shape()));
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double gi = g ? (*g)[i] : 0.0;
            m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * gi;
            v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * gi * gi;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] = w[i] - p.lr * (mhat / (std::sqrt(vhat) + p.eps)) - p.lr * p.weight_decay * w[i];
        }
    });
    ++state.step;
}

Schedule schedule(std::size_t step, std::size_t epoch_len, const TrainConfig& config) {
    if (epoch_len == 0) throw ValidationError("epoch length must be positive");
    return {selector::anneal_temperature(step, config.tau),
            mutual::kl_weight(step, epoch_len, config.lambda_kl_start, config.lambda_kl_end)};
}

std::size_t steps_per_epoch(std::size_t dataset_size, std::size_t batch_size) {
    if (batch_size == 0) throw ValidationError("batch_size must be positive");
    return (dataset_size + batch_size - 1) / batch_size;
}

std::vector<std::size_t> epoch_order(std::uint64_t seed, std::size_t epoch, std::size_t n) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    auto rng = make_rng(seed, "shuffle", epoch);
    // Fisher-Yates with the portable index draw; std::shuffle is implementation-defined.
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    return order;
}

std::vector<double> step_noise(const TrainConfig& config, std::uint64_t step, std::size_t episode_index, std::size_t n) {
    if (!config.gumbel_noise) return std::vector<double>(n, 0.0);
    auto rng = make_rng(config.seed, "noise", step, episode_index);
    return selector::sample_gumbel(n, rng);
}

TrainState init_state(const TrainConfig& config) {
    TrainState s;
    s.model = init_model(config);
    s.optimizer = init_optimizer(s.model);
    return s;
}

std::vector<std::size_t> batch_for_step(const TrainConfig& config, std::uint64_t step, std::size_t dataset_size) {
    const std::size_t spe = steps_per_epoch(dataset_size, config.batch_size);
    if (spe == 0) throw ValidationError("empty dataset");
    const std::size_t epoch = static_cast<std::size_t>(step / spe);
    const std::size_t b = static_cast<std::size_t>(step % spe);
    const auto order = epoch_order(config.seed, epoch, dataset_size);
    const std::size_t lo = b * config.batch_size;
    const std::size_t hi = std::min(dataset_size, lo + config.batch_size);
    return {order.begin() + static_cast<std::ptrdiff_t>(lo), order.begin() + static_cast<std::ptrdiff_t>(hi)};
}

namespace {

json breakdown_json(const mutual::LossBreakdown& b) {
    return {{"ce", b.ce},   {"kl", b.kl},   {"f_set", b.f_set}, {"rel", b.rel},
            {"cov", b.cov}, {"red", b.red}, {"sep", b.sep},     {"total", b.total}};
}

bool finite(const mutual::LossBreakdown& b) {
    for (double x : {b.ce, b.kl, b.f_set, b.rel, b.cov, b.red, b.sep, b.total}) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

StepReport train_step(TrainState& state, const std::vector<synth::Episode>& dataset,
                      const std::vector<std::size_t>& batch, const TrainConfig& config, std::size_t epoch_len) {
    if (batch.empty()) throw ValidationError("empty batch");
    StepReport report;
    report.step = state.optimizer.step;
    report.schedule = schedule(static_cast<std::size_t>(report.step), epoch_len, config);

    diff::GradientMap total_grad;
    for (const std::size_t idx : batch) {
        if (idx >= dataset.size()) throw ValidationError("batch index out of range");
        const auto& episode = dataset[idx];
        StepContext ctx;
        ctx.tau = report.schedule.tau;
        ctx.lambda_kl = report.schedule.lambda_kl;
        ctx.noise = step_noise(config, report.step, idx, episode.n_frames());

        diff::Graph graph;
        EpisodeGraph eg;
        try {
            eg = build_episode(graph, bind_parameters(graph, state.model), episode, config, ctx);
        } catch (const diff::NonFiniteError& e) {
            throw NumericError("non-finite value at step " + std::to_string(report.step) + ", episode " +
                               std::to_string(idx) + " (node " + std::to_string(e.node_id()) + " '" +
                               std::string(graph.op_name(e.node_id())) + "'): " + e.what());
        }
        if (!finite(eg.breakdown)) {
            throw NumericError("non-finite loss at step " + std::to_string(report.step) + ", episode " +
                               std::to_string(idx) + ": " + breakdown_json(eg.breakdown).dump());
        }
        auto grads = graph.backward(eg.total);
        for (auto& [name, g] : grads) {
            if (!g.all_finite()) {
                throw NumericError("non-finite gradient for " + name + " at step " + std::to_string(report.step) +
                                   ", episode " + std::to_string(idx) + ": " + breakdown_json(eg.breakdown).dump());
            }
            auto it = total_grad.find(name);
            if (it == total_grad.end()) {
                total_grad.emplace(name, std::move(g));
            } else {
                it->second.accumulate(g);
            }
        }
        report.episodes.push_back(eg.breakdown);
    }

    auto& m = report.mean;
    m.weights = report.episodes.front().weights;
    for (const auto& b : report.episodes) {
        m.ce += b.ce;
        m.kl += b.kl;
        m.f_set += b.f_set;
        m.rel += b.rel;
        m.cov += b.cov;
        m.red += b.red;
        m.sep += b.sep;
        m.total += b.total;
    }
    const double n = static_cast<double>(report.episodes.size());
    for (double* x : {&m.ce, &m.kl, &m.f_set, &m.rel, &m.cov, &m.red, &m.sep, &m.total}) *x /= n;

    adamw_step(state.model, total_grad, state.optimizer, adamw_params(config));
    for_each_weight(state.model, [&](const std::string& name, const Tensor& w) {
        if (!w.all_finite()) {
            throw NumericError("parameter " + name + " became non-finite after step " + std::to_string(report.step) +
                               "; batch mean " + breakdown_json(m).dump());
        }
    });
    return report;
}

std::string metrics_line(const StepReport& r) {
    json j = breakdown_json(r.mean);
    j["step"] = r.step;
    j["tau"] = r.schedule.tau;
    j["lambda_kl"] = r.schedule.lambda_kl;
    j["batch"] = r.episodes.size();
    return j.dump();
}

void run(TrainState& state, const std::vector<synth::Episode>& dataset, const TrainConfig& config,
         const RunOptions& options) {
    config.validate();
    if (dataset.empty()) throw ValidationError("training dataset is empty");
    const std::size_t spe = steps_per_epoch(dataset.size(), config.batch_size);
    const std::uint64_t last = static_cast<std::uint64_t>(spe) * config.epochs;
    const std::uint64_t end = options.stop_after != 0 ? std::min(last, options.stop_after) : last;
    while (state.optimizer.step < end) {
        const auto step = state.optimizer.step;
        const auto report = train_step(state, dataset, batch_for_step(config, step, dataset.size()), config, spe);
        // Keyed to the full run, so a stop-and-resume writes the same lines.
        if (options.metrics && ((step + 1) % config.metrics_every == 0 || step + 1 == last)) {
            *options.metrics << metrics_line(report) << '\n';
        }
        if (options.on_step) options.on_step(report);
    }
    if (options.metrics) options.metrics->flush();
}

double mean_pairwise_kernel_similarity(const std::vector<std::size_t>& selected, const std::vector<double>& timestamps,
                                       double gamma) {
    if (selected.size() < 2) return 0.0;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < selected.size(); ++a) {
        for (std::size_t b = a + 1; b < selected.size(); ++b) {
            sum += setobj::temporal_kernel(timestamps.at(selected[a]), timestamps.at(selected[b]), gamma);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

EvalReport evaluate(const Model& model, const TrainConfig& config, const std::vector<synth::Episode>& dataset) {
    if (dataset.empty()) throw ValidationError("evaluation dataset is empty");
    EvalReport r;
    r.episodes = dataset.size();
    r.k = config.k_sel;
    for (const auto& e : dataset) {
        if (config.k_sel > e.n_frames()) throw ValidationError("k_sel exceeds episode length");
        diff::Graph graph;
        const auto bound = bind_constants(graph, model);
        const Var frames = graph.constant(e.features);
        const Var q = fused_query(graph, bound, frames, graph.constant(synth::text_embeddings(e)), config);
        const Var s = selector::score_frames(frames, q, bound.scorer);
        const std::vector<double> scores(s.value().values().begin(), s.value().values().end());
        const auto selected = selector::top_k_indices(scores, config.k_sel);

        r.oracle_accuracy += synth::oracle_answer(e, selected) == e.answer ? 1.0 : 0.0;
        r.evidence_recall += synth::evidence_recall(selected, e.evidence);
        r.mean_pairwise_kernel_similarity +=
            mean_pairwise_kernel_similarity(selected, e.timestamps, config.set.gamma);
        std::size_t dup = 0;
        for (auto i : selected) dup += std::binary_search(e.duplicates.begin(), e.duplicates.end(), i) ? 1 : 0;
        r.duplicate_fraction += static_cast<double>(dup) / static_cast<double>(selected.size());

        const auto terms = setobj::evaluate_set(scores, selected, e.timestamps, config.set);
        r.mean_f += terms.f;
        r.mean_rel += terms.rel;
        r.mean_cov += terms.cov;
        r.mean_red += terms.red;

        const Var feats = diff::gather_rows(frames, selected);
        const auto t = mutual::teacher_forward(feats, graph.constant(e.question), graph.constant(e.options),
                                               bound.teacher);
        const auto& z = t.logits.value().values();
        const auto pred = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
        r.teacher_accuracy += pred == e.answer ? 1.0 : 0.0;

        const auto grid = synth::uniform_grid(e.n_frames(), config.k_sel);
        r.uniform_recall += synth::evidence_recall(grid, e.evidence);
        r.uniform_accuracy += synth::oracle_answer(e, grid) == e.answer ? 1.0 : 0.0;
        r.uniform_kernel_similarity += mean_pairwise_kernel_similarity(grid, e.timestamps, config.set.gamma);
    }
    const double n = static_cast<double>(dataset.size());
    for (double* x : {&r.oracle_accuracy, &r.evidence_recall, &r.mean_pairwise_kernel_similarity,
                      &r.duplicate_fraction, &r.teacher_accuracy, &r.mean_f, &r.mean_rel, &r.mean_cov, &r.mean_red,
                      &r.uniform_recall, &r.uniform_accuracy, &r.uniform_kernel_similarity}) {
        *x /= n;
    }
    return r;
}

std::string eval_report_json(const EvalReport& r, int indent) {
    json j = {{"episodes", r.episodes},
              {"k", r.k},
              {"oracle_accuracy", r.oracle_accuracy},
              {"evidence_recall", r.evidence_recall},
              {"teacher_accuracy", r.teacher_accuracy},
              {"redundancy",
               {{"mean_pairwise_kernel_similarity", r.mean_pairwise_kernel_similarity},
                {"duplicate_fraction", r.duplicate_fraction}}},
              {"set_terms", {{"f", r.mean_f}, {"rel", r.mean_rel}, {"cov", r.mean_cov}, {"red", r.mean_red}}},
              {"uniform_baseline",
               {{"evidence_recall", r.uniform_recall},
                {"oracle_accuracy", r.uniform_accuracy},
                {"mean_pairwise_kernel_similarity", r.uniform_kernel_similarity}}}};
    return j.dump(indent);
}

namespace {

void put_named(io::ByteWriter& w, const std::string& name, const Tensor& t) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u64(d);
    for (double x : t.values()) w.f64(x);
}

}  // namespace

std::vector<unsigned char> encode_checkpoint(const TrainConfig& config, const TrainState& state) {
    io::ByteWriter w;
    w.bytes("HFSC", 4);
    w.u32(kCheckpointVersion);
    w.u64(config_hash(config));
    w.u64(state.optimizer.step);
    w.str(train_config_to_json(config, -1));
    std::vector<std::pair<std::string, const Tensor*>> named;
    for_each_weight(state.model, [&](const std::string& name, const Tensor& t) {
        named.emplace_back("param/" + name, &t);
        named.emplace_back("adam.m/" + name, &state.optimizer.m.at(name));
        named.emplace_back("adam.v/" + name, &state.optimizer.v.at(name));
    });
    w.u32(static_cast<std::uint32_t>(named.size()));
    for (const auto& [name, t] : named) put_named(w, name, *t);
    return w.buffer();
}

Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes, const std::string& source) {
    io::ByteReader r(bytes.data(), bytes.size(), source);
    r.expect_magic("HFSC");
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
        r.fail(io::FormatErrc::bad_version,
               "version " + std::to_string(version) + ", expected " + std::to_string(kCheckpointVersion));
    }
    const auto hash = r.u64();
    const auto step = r.u64();
    Checkpoint ck;
    try {
        ck.config = train_config_from_json(r.str());
    } catch (const ValidationError& e) {
        r.fail(io::FormatErrc::malformed, std::string("embedded config: ") + e.what());
    }
    if (config_hash(ck.config) != hash) r.fail(io::FormatErrc::malformed, "config hash does not match its config");

    std::map<std::string, Tensor> tensors;
    const auto count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        std::string name = r.str(4096);
        const auto rank = r.u32();
        if (rank > 2) r.fail(io::FormatErrc::malformed, "tensor " + name + " has rank " + std::to_string(rank));
        diff::Shape shape(rank);
        std::uint64_t size = 1;
        for (auto& d : shape) {
            d = r.u64();
            size *= d;
        }
        if (size > r.remaining() / 8) r.fail(io::FormatErrc::truncated, "tensor " + name + " payload");
        Tensor t(shape);
        for (auto& x : t.values()) x = r.f64();
        if (!tensors.emplace(std::move(name), std::move(t)).second) {
            r.fail(io::FormatErrc::malformed, "duplicate tensor name");
        }
    }
    if (r.remaining() != 0) r.fail(io::FormatErrc::malformed, std::to_string(r.remaining()) + " trailing bytes");

    // Shapes come from the embedded config; every slot must be filled exactly.
    ck.state = init_state(ck.config);
    ck.state.optimizer.step = step;
    std::size_t used = 0;
    auto take = [&](const std::string& key, Tensor& slot) {
        auto it = tensors.find(key);
        if (it == tensors.end()) r.fail(io::FormatErrc::malformed, "missing tensor " + key);
        if (it->second.shape() != slot.shape()) {
            r.fail(io::FormatErrc::malformed, "tensor " + key + " has shape " + diff::shape_str(it->second.shape()) +
                                                  ", config implies " + diff::shape_str(slot.shape()));
        }
        slot = std::move(it->second);
        ++used;
    };
    for_each_weight(ck.state.model, [&](const std::string& name, Tensor& t) {
        take("param/" + name, t);
        take("adam.m/" + name, ck.state.optimizer.m.at(name));
        take("adam.v/" + name, ck.state.optimizer.v.at(name));
    });
    if (used != tensors.size()) r.fail(io::FormatErrc::malformed, "unexpected extra tensors");
    return ck;
}

void save_checkpoint(const std::string& path, const TrainConfig& config, const TrainState& state) {
    io::write_file(path, encode_checkpoint(config, state));
}

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(io::read_file(path), path); }

}  // namespace hfs::train
