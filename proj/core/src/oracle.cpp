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

#include "hfs/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "hfs/diff/ops.hpp"
#include "hfs/error.hpp"
#include "hfs/rng.hpp"
#include "hfs/selector.hpp"

namespace hfs::oracle {

using diff::Tensor;
using diff::Var;

Instance random_instance(std::size_t n, double gamma, std::uint64_t seed, std::size_t index) {
    auto rng = make_rng(seed, "oracle", index);
    Instance inst;
    inst.scores.resize(n);
    inst.timestamps.resize(n);
    for (auto& s : inst.scores) s = 0.05 + 0.95 * uniform_open(rng);
    for (auto& t : inst.timestamps) t = 5.0 * gamma * uniform_open(rng);
    std::sort(inst.timestamps.begin(), inst.timestamps.end());
    return inst;
}

AscentResult annealed_ascent(const Instance& inst, const SetObjectiveConfig& cfg, std::size_t k,
                             const AscentOptions& opt) {
    const auto n = inst.scores.size();
    if (k < 1 || k > n) throw ValidationError("oracle: k must lie in [1, N]");
    if (opt.iterations == 0) throw ValidationError("oracle: need at least one iteration");
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = std::log(inst.scores[i]);
    std::vector<double> m1(n, 0.0), m2(n, 0.0);
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const std::vector<double> zeros(n, 0.0);
    // Best hard rounding seen along the trajectory, including the start.
    AscentResult out;
    const auto consider = [&] {
        auto sel = selector::top_k_indices(theta, k);
        auto terms = setobj::evaluate_set(inst.scores, sel, inst.timestamps, cfg);
        if (out.selected.empty() || terms.f > out.terms.f) {
            out.selected = std::move(sel);
            out.terms = terms;
        }
    };
    consider();

    for (std::size_t it = 0; it < opt.iterations; ++it) {
        const double frac = opt.iterations == 1 ? 1.0 : static_cast<double>(it) / static_cast<double>(opt.iterations - 1);
        const double tau = opt.tau_start * std::pow(opt.tau_end / opt.tau_start, frac);
        diff::Graph g;
        const Var th = g.parameter("theta", Tensor::vector(theta));
        // exp(theta) as the score input makes the relaxation keys equal theta
        // up to the 1e-8 guard.
        const auto sel = selector::gumbel_topk(diff::exp(th), tau, k, zeros);
        const auto terms = setobj::set_objective(g.constant(Tensor::vector(inst.scores)), sel.mask, inst.timestamps, cfg);
        const auto grad = g.backward(diff::scale(terms.f, -1.0)).at("theta");
        const double t = static_cast<double>(it + 1);
        for (std::size_t i = 0; i < n; ++i) {
            m1[i] = b1 * m1[i] + (1 - b1) * grad[i];
            m2[i] = b2 * m2[i] + (1 - b2) * grad[i] * grad[i];
            const double mh = m1[i] / (1 - std::pow(b1, t));
            const double vh = m2[i] / (1 - std::pow(b2, t));
            theta[i] -= opt.step * mh / (std::sqrt(vh) + eps);
        }
        consider();
    }
    return out;
}

CheckReport run_check(std::size_t n, std::size_t k, std::size_t trials, std::uint64_t seed,
                      const SetObjectiveConfig& cfg, double tolerance, const AscentOptions& options) {
    cfg.validate();
    CheckReport r;
    r.trials = trials;
    double gap_sum = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
        const auto inst = random_instance(n, cfg.gamma, seed, i);
        const auto best = setobj::brute_force_best_set(inst.scores, inst.timestamps, cfg, k);
        const auto got = annealed_ascent(inst, cfg, k, options);
        const double scale = std::max(std::abs(best.terms.f), 1e-12);
        const double gap = std::max(0.0, best.terms.f - got.terms.f) / scale;
        gap_sum += gap;
        if (gap <= tolerance) ++r.within_tolerance;
        if (got.selected == best.selected) ++r.exact;
    }
    r.mean_gap = trials == 0 ? 0.0 : gap_sum / static_cast<double>(trials);
    return r;
}

}  // namespace hfs::oracle
