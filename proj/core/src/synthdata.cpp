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

#include "hfs/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <numeric>

#include "hfs/error.hpp"

namespace hfs::synth {
namespace {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void normalize(Vec& v) {
    const double n = std::sqrt(dot(v, v));
    for (auto& x : v) x /= n;
}

Vec gaussian(std::size_t d, Rng& rng) {
    Vec v(d);
    for (auto& x : v) x = standard_normal(rng);
    return v;
}

// Removes the components along each (orthonormal) basis vector.
void project_out(Vec& v, const std::vector<Vec>& basis) {
    for (const auto& b : basis) {
        const double c = dot(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
}

std::vector<Vec> orthonormal_basis(const Tensor& rows) {
    std::vector<Vec> basis;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        Vec v(rows.row(r).begin(), rows.row(r).end());
        project_out(v, basis);
        if (std::sqrt(dot(v, v)) > 1e-9) {
            normalize(v);
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

// Lead slot with room for the duplicate cluster, cluster slots, then the
// remaining evidence slots uniformly among free frames.
struct Placement {
    std::size_t lead = 0;
    std::vector<std::size_t> duplicates;
    std::vector<std::size_t> others;
};

std::vector<std::size_t> neighbours(std::size_t lead, std::size_t n, std::size_t reach) {
    std::vector<std::size_t> out;
    const std::size_t lo = lead >= reach ? lead - reach : 0;
    const std::size_t hi = std::min(n - 1, lead + reach);
    for (std::size_t j = lo; j <= hi; ++j) {
        if (j != lead) out.push_back(j);
    }
    return out;
}

Placement place_frames(const EpisodeSpec& spec, Rng& rng) {
    const auto n = spec.n_frames;
    const auto reach = static_cast<std::size_t>(std::floor(spec.duplicate_window));
    std::vector<std::size_t> leads;
    for (std::size_t i = 0; i < n; ++i) {
        if (neighbours(i, n, reach).size() >= spec.n_dup) leads.push_back(i);
    }
    Placement p;
    p.lead = leads[uniform_index(rng, leads.size())];

    auto pool = neighbours(p.lead, n, reach);
    for (std::size_t i = 0; i < spec.n_dup; ++i) {
        const auto j = i + uniform_index(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
        p.duplicates.push_back(pool[i]);
    }

    std::vector<char> used(n, 0);
    used[p.lead] = 1;
    for (auto j : p.duplicates) used[j] = 1;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
        if (!used[i]) free.push_back(i);
    }
    for (std::size_t i = 0; i + 1 < spec.k_star; ++i) {
        const auto j = i + uniform_index(rng, free.size() - i);
        std::swap(free[i], free[j]);
        p.others.push_back(free[i]);
    }
    std::sort(p.duplicates.begin(), p.duplicates.end());
    return p;
}

}  // namespace

void EpisodeSpec::validate(std::size_t k_sel) const {
    auto fail = [](const std::string& what) { throw ValidationError("invalid episode spec: " + what); };
    if (n_frames == 0 || dim == 0) fail("n_frames and dim must be positive");
    if (num_options < 2) fail("num_options must be >= 2");
    if (dim <= num_options) fail("dim must exceed num_options so background frames can avoid the option span");
    if (k_star < 1) fail("k_star must be >= 1");
    if (k_star + n_dup > n_frames) fail("k_star + n_dup exceeds n_frames");
    if (k_sel != 0 && (k_star > k_sel || k_sel > n_frames)) fail("need k_star <= k_sel <= n_frames");
    if (!(noise_sigma >= 0.0)) fail("noise_sigma must be non-negative");
    if (!(duplicate_window >= 0.0)) fail("duplicate_window must be non-negative");
    const auto reach = static_cast<std::size_t>(std::floor(duplicate_window));
    if (n_dup > 0 && std::min(2 * reach, n_frames - 1) < n_dup) fail("duplicate_window too narrow for n_dup copies");
}

bool operator==(const Episode& a, const Episode& b) {
    return a.features == b.features && a.timestamps == b.timestamps && a.question == b.question &&
           a.options == b.options && a.answer == b.answer && a.evidence == b.evidence &&
           a.duplicates == b.duplicates && a.lead_evidence == b.lead_evidence;
}

Task make_task(const EpisodeSpec& spec) {
    spec.validate();
    auto rng = make_rng(spec.seed, "task");
    const auto d = spec.dim;
    const auto c = spec.num_options;
    constexpr int kAttempts = 100000;

    std::vector<Vec> protos;
    for (int attempt = 0; protos.size() < c; ++attempt) {
        if (attempt >= kAttempts) throw ValidationError("cannot draw option prototypes with pairwise |cos| < 0.3");
        Vec v = gaussian(d, rng);
        normalize(v);
        const bool ok = std::all_of(protos.begin(), protos.end(), [&](const Vec& o) { return std::abs(dot(v, o)) < 0.3; });
        if (ok) protos.push_back(std::move(v));
    }

    Vec question;
    for (int attempt = 0;; ++attempt) {
        if (attempt >= kAttempts) throw ValidationError("cannot draw a question probe with |cos| < 0.2 to every option");
        question = gaussian(d, rng);
        normalize(question);
        const bool ok =
            std::all_of(protos.begin(), protos.end(), [&](const Vec& o) { return std::abs(dot(question, o)) < 0.2; });
        if (ok) break;
    }

    Task task;
    task.options = Tensor({c, d});
    for (std::size_t i = 0; i < c; ++i) std::copy(protos[i].begin(), protos[i].end(), task.options.row(i).begin());
    task.question = Tensor::vector(std::move(question));
    return task;
}

Episode generate_episode(const EpisodeSpec& spec, Rng& rng) { return generate_episode(spec, make_task(spec), rng); }

Episode generate_episode(const EpisodeSpec& spec, const Task& task, Rng& rng) {
    spec.validate();
    const auto n = spec.n_frames;
    const auto d = spec.dim;
    const auto c = spec.num_options;
    const auto option_basis = orthonormal_basis(task.options);

    for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
        Episode ep;
        ep.answer = uniform_index(rng, c);
        std::size_t distractor = uniform_index(rng, c - 1);
        if (distractor >= ep.answer) ++distractor;

        const auto oa = task.options.row(ep.answer);
        Vec lean(task.options.row(distractor).begin(), task.options.row(distractor).end());
        project_out(lean, {Vec(oa.begin(), oa.end())});
        normalize(lean);

        // Distractor directions orthogonal to o_a; perturbations mix them so
        // that a lone evidence frame is ambiguous between options.
        Tensor others({c - 1, d});
        for (std::size_t o = 0, r = 0; o < c; ++o) {
            if (o == ep.answer) continue;
            Vec u(task.options.row(o).begin(), task.options.row(o).end());
            project_out(u, {Vec(oa.begin(), oa.end())});
            std::copy(u.begin(), u.end(), others.row(r++).begin());
        }
        const auto spread_basis = orthonormal_basis(others);

        // Perturbations orthogonal to o_a, then mean-centred.
        std::vector<Vec> perturb(spec.k_star);
        const double iso = kPerturbationScale / std::sqrt(static_cast<double>(d));
        Vec mean(d, 0.0);
        for (std::size_t j = 0; j < spec.k_star; ++j) {
            perturb[j] = gaussian(d, rng);
            for (auto& x : perturb[j]) x *= iso;
            for (const auto& u : spread_basis) {
                const double z = kOptionSpread * standard_normal(rng);
                for (std::size_t i = 0; i < d; ++i) perturb[j][i] += z * u[i];
            }
            if (j == 0) {
                for (std::size_t i = 0; i < d; ++i) perturb[j][i] += kDistractorLean * lean[i];
            }
            project_out(perturb[j], {Vec(oa.begin(), oa.end())});
            for (std::size_t i = 0; i < d; ++i) mean[i] += perturb[j][i] / static_cast<double>(spec.k_star);
        }
        for (auto& p : perturb) {
            for (std::size_t i = 0; i < d; ++i) p[i] -= mean[i];
        }

        const Placement place = place_frames(spec, rng);
        ep.features = Tensor({n, d});
        ep.timestamps.resize(n);
        std::iota(ep.timestamps.begin(), ep.timestamps.end(), 0.0);

        std::vector<char> planted(n, 0);
        auto write_row = [&](std::size_t slot, const Vec& v) {
            std::copy(v.begin(), v.end(), ep.features.row(slot).begin());
            planted[slot] = 1;
        };

        Vec lead(d);
        for (std::size_t i = 0; i < d; ++i) lead[i] = oa[i] + perturb[0][i];
        write_row(place.lead, lead);
        for (std::size_t j = 1; j < spec.k_star; ++j) {
            Vec v(d);
            for (std::size_t i = 0; i < d; ++i) v[i] = oa[i] + perturb[j][i];
            write_row(place.others[j - 1], v);
        }
        for (auto slot : place.duplicates) {
            Vec v = lead;
            for (auto& x : v) x += 0.25 * spec.noise_sigma * standard_normal(rng);
            write_row(slot, v);
        }
        for (std::size_t slot = 0; slot < n; ++slot) {
            if (planted[slot]) continue;
            Vec v = gaussian(d, rng);
            project_out(v, option_basis);
            normalize(v);
            std::copy(v.begin(), v.end(), ep.features.row(slot).begin());
        }
        // Isotropic noise on everything except the duplicate copies, which
        // already carry their own smaller jitter.
        std::vector<char> is_dup(n, 0);
        for (auto slot : place.duplicates) is_dup[slot] = 1;
        if (spec.noise_sigma > 0.0) {
            for (std::size_t slot = 0; slot < n; ++slot) {
                if (is_dup[slot]) continue;
                for (auto& x : ep.features.row(slot)) x += spec.noise_sigma * standard_normal(rng);
            }
        }

        ep.lead_evidence = place.lead;
        ep.evidence = place.others;
        ep.evidence.push_back(place.lead);
        std::sort(ep.evidence.begin(), ep.evidence.end());
        ep.duplicates = place.duplicates;
        ep.question = task.question;
        ep.options = task.options;

        // Enforce the evidence-mean margin.
        Vec centroid(d, 0.0);
        for (auto slot : ep.evidence) {
            for (std::size_t i = 0; i < d; ++i) centroid[i] += ep.features.at(slot, i);
        }
        const double right = dot(centroid, oa) / static_cast<double>(spec.k_star);
        double best_wrong = -INFINITY;
        for (std::size_t o = 0; o < c; ++o) {
            if (o != ep.answer) best_wrong = std::max(best_wrong, dot(centroid, task.options.row(o)) / static_cast<double>(spec.k_star));
        }
        if (right - best_wrong >= kMinMargin) return ep;
    }
    throw ValidationError("evidence margin unreachable after 100 resamples (task seed " + std::to_string(spec.seed) + ")");
}

std::vector<Episode> generate_dataset(const EpisodeSpec& spec, std::size_t count, std::uint64_t seed) {
    const Task task = make_task(spec);
    std::vector<Episode> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto rng = make_rng(seed, "episode", i);
        out.push_back(generate_episode(spec, task, rng));
    }
    return out;
}

std::size_t oracle_answer(const Episode& episode, const std::vector<std::size_t>& selected) {
    if (selected.empty()) throw ValidationError("oracle_answer: empty selection");
    const auto d = episode.dim();
    Vec centroid(d, 0.0);
    for (auto slot : selected) {
        if (slot >= episode.n_frames()) throw ValidationError("oracle_answer: frame " + std::to_string(slot) + " out of range");
        for (std::size_t i = 0; i < d; ++i) centroid[i] += episode.features.at(slot, i);
    }
    for (auto& x : centroid) x /= static_cast<double>(selected.size());
    std::size_t best = 0;
    double best_score = -INFINITY;
    for (std::size_t c = 0; c < episode.num_options(); ++c) {
        const double s = dot(centroid, episode.options.row(c));
        if (s > best_score) {
            best_score = s;
            best = c;
        }
    }
    return best;
}

double evidence_recall(const std::vector<std::size_t>& selected, const std::vector<std::size_t>& evidence) {
    if (evidence.empty()) return 0.0;
    std::size_t hits = 0;
    for (auto e : evidence) {
        if (std::find(selected.begin(), selected.end(), e) != selected.end()) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(evidence.size());
}

std::vector<std::size_t> uniform_grid(std::size_t n_frames, std::size_t k) {
    if (k > n_frames) throw ValidationError("uniform_grid: k exceeds frame count");
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = i * n_frames / k;
    return out;
}

Tensor text_embeddings(const Episode& episode) {
    const auto d = episode.dim();
    Tensor out({episode.num_options() + 1, d});
    std::copy(episode.question.values().begin(), episode.question.values().end(), out.row(0).begin());
    for (std::size_t c = 0; c < episode.num_options(); ++c) {
        std::copy(episode.options.row(c).begin(), episode.options.row(c).end(), out.row(c + 1).begin());
    }
    return out;
}

std::string spec_to_json(const EpisodeSpec& spec, int indent) {
    nlohmann::json j = {{"n_frames", spec.n_frames}, {"dim", spec.dim},
                        {"num_options", spec.num_options}, {"k_star", spec.k_star},
                        {"n_dup", spec.n_dup}, {"duplicate_window", spec.duplicate_window},
                        {"noise_sigma", spec.noise_sigma}, {"seed", spec.seed}};
    return j.dump(indent);
}

EpisodeSpec spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("episode spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("episode spec must be a JSON object");
    EpisodeSpec spec;
    const std::map<std::string, int> known = {{"n_frames", 0}, {"dim", 0}, {"num_options", 0}, {"k_star", 0},
                                              {"n_dup", 0}, {"duplicate_window", 1}, {"noise_sigma", 1}, {"seed", 0}};
    for (const auto& [key, value] : j.items()) {
        auto it = known.find(key);
        if (it == known.end()) throw ValidationError("unknown episode spec key '" + key + "'");
        if (it->second == 0 && !value.is_number_unsigned()) throw ValidationError("'" + key + "' must be a non-negative integer");
        if (it->second == 1 && !value.is_number()) throw ValidationError("'" + key + "' must be a number");
    }
    auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    };
    get("n_frames", spec.n_frames);
    get("dim", spec.dim);
    get("num_options", spec.num_options);
    get("k_star", spec.k_star);
    get("n_dup", spec.n_dup);
    get("duplicate_window", spec.duplicate_window);
    get("noise_sigma", spec.noise_sigma);
    get("seed", spec.seed);
    spec.validate();
    return spec;
}

}  // namespace hfs::synth
