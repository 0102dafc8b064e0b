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

#include "hfs/setobj.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfs/diff/ops.hpp"

namespace hfs::setobj {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ValidationError(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw ValidationError(std::string(what) + " must be positive");
}

}  // namespace

double temporal_kernel(double t_i, double t_j, double gamma) {
    require_positive(gamma, "gamma");
    const double dt = t_i - t_j;
    return std::exp(-(dt * dt) / (2.0 * gamma * gamma));
}

Tensor off_diagonal_kernel(std::span<const double> timestamps, double gamma) {
    require_positive(gamma, "gamma");
    const auto n = timestamps.size();
    Tensor k({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = temporal_kernel(timestamps[i], timestamps[j], gamma);
            k.at(i, j) = v;
            k.at(j, i) = v;
        }
    }
    return k;
}

Var relevance(Var scores, Var mask) {
    require_same_length(scores.value().size(), mask.value().size(), "relevance");
    return diff::dot(scores, mask);
}

Var coverage(Var scores, Var mask, double tau_c) {
    require_positive(tau_c, "coverage: tau_c");
    require_same_length(scores.value().size(), mask.value().size(), "coverage");
    return diff::scale(diff::logsumexp(diff::scale(diff::mul(scores, mask), 1.0 / tau_c)), tau_c);
}

Var redundancy(Var mask, Var kernel) {
    using namespace diff;
    const auto n = mask.value().size();
    if (kernel.value().rows() != n || kernel.value().cols() != n) {
        throw ValidationError("redundancy: kernel shape does not match mask length " + std::to_string(n));
    }
    const Var spread = reshape(matmul(kernel, reshape(mask, {n, 1})), {n});
    return dot(mask, spread);
}

Var redundancy(Var mask, std::span<const double> timestamps, double gamma) {
    require_same_length(mask.value().size(), timestamps.size(), "redundancy");
    return redundancy(mask, mask.graph->constant(off_diagonal_kernel(timestamps, gamma)));
}

SetTermVars set_objective(Var scores, Var mask, std::span<const double> timestamps, const SetObjectiveConfig& cfg) {
    using namespace diff;
    cfg.validate();
    SetTermVars t;
    t.rel = relevance(scores, mask);
    t.cov = coverage(scores, mask, cfg.tau_c);
    t.red = redundancy(mask, timestamps, cfg.gamma);
    t.f = sub(add(scale(t.rel, cfg.lambda_rel), scale(t.cov, cfg.lambda_cov)), scale(t.red, cfg.lambda_red));
    return t;
}

SetTerms evaluate(std::span<const double> scores, std::span<const double> mask, std::span<const double> timestamps,
                  const SetObjectiveConfig& cfg) {
    cfg.validate();
    const auto n = scores.size();
    require_same_length(n, mask.size(), "set objective");
    require_same_length(n, timestamps.size(), "set objective");
    if (n == 0) throw ValidationError("set objective over zero frames");

    SetTerms t;
    double mx = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        t.rel += scores[i] * mask[i];
        mx = std::max(mx, scores[i] * mask[i] / cfg.tau_c);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(scores[i] * mask[i] / cfg.tau_c - mx);
    t.cov = cfg.tau_c * (mx + std::log(acc));
    for (std::size_t i = 0; i < n; ++i) {
        if (mask[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) t.red += mask[i] * mask[j] * temporal_kernel(timestamps[i], timestamps[j], cfg.gamma);
        }
    }
    t.f = cfg.lambda_rel * t.rel + cfg.lambda_cov * t.cov - cfg.lambda_red * t.red;
    return t;
}

SetTerms evaluate_set(std::span<const double> scores, std::span<const std::size_t> selected,
                      std::span<const double> timestamps, const SetObjectiveConfig& cfg) {
    std::vector<double> mask(scores.size(), 0.0);
    for (auto i : selected) {
        if (i >= scores.size()) throw ValidationError("selected index " + std::to_string(i) + " out of range");
        mask[i] = 1.0;
    }
    return evaluate(scores, mask, timestamps, cfg);
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

BestSet brute_force_best_set(std::span<const double> scores, std::span<const double> timestamps,
                             const SetObjectiveConfig& cfg, std::size_t k_sel) {
    cfg.validate();
    const auto n = scores.size();
    require_same_length(n, timestamps.size(), "brute_force_best_set");
    if (k_sel < 1 || k_sel > n) {
        throw ValidationError("brute_force_best_set: k_sel = " + std::to_string(k_sel) + " outside [1, " +
                              std::to_string(n) + "]");
    }
    const double count = binomial(n, k_sel);
    if (count > kMaxEnumeration) {
        throw ValidationError("brute_force_best_set: C(" + std::to_string(n) + ", " + std::to_string(k_sel) +
                              ") = " + std::to_string(static_cast<long long>(count)) + " exceeds the budget of 1e6");
    }

    const Tensor kernel = off_diagonal_kernel(timestamps, cfg.gamma);
    // Unselected frames contribute exp(0) = 1 each to the coverage sum.
    const double unselected = static_cast<double>(n - k_sel);

    std::vector<std::size_t> idx(k_sel);
    for (std::size_t i = 0; i < k_sel; ++i) idx[i] = i;

    BestSet best;
    double best_f = -INFINITY;
    for (;;) {
        double rel = 0.0, red = 0.0, mx = 0.0;
        for (std::size_t a = 0; a < k_sel; ++a) {
            rel += scores[idx[a]];
            mx = std::max(mx, scores[idx[a]] / cfg.tau_c);
            for (std::size_t b = a + 1; b < k_sel; ++b) red += 2.0 * kernel.at(idx[a], idx[b]);
        }
        double acc = unselected * std::exp(-mx);
        for (std::size_t a = 0; a < k_sel; ++a) acc += std::exp(scores[idx[a]] / cfg.tau_c - mx);
        const double cov = cfg.tau_c * (mx + std::log(acc));
        const double f = cfg.lambda_rel * rel + cfg.lambda_cov * cov - cfg.lambda_red * red;
        if (f > best_f) {
            best_f = f;
            best.selected = idx;
            best.terms = {f, rel, cov, red};
        }

        // Next combination in lexicographic order.
        std::size_t pos = k_sel;
        while (pos > 0 && idx[pos - 1] == n - k_sel + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < k_sel; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
}

}  // namespace hfs::setobj
