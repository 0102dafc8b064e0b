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

#include "hfs/mutual.hpp"

#include <algorithm>

#include "hfs/diff/ops.hpp"
#include "hfs/init.hpp"

namespace hfs::mutual {

TeacherWeights<Tensor> init_teacher(std::size_t dim, std::size_t hidden, Rng& rng) {
    TeacherWeights<Tensor> w;
    w.w_proj = scaled_weight(dim, hidden, rng);
    w.b_proj = Tensor({hidden});
    w.w_ctx = scaled_weight(dim, hidden, rng);
    w.b_ctx = Tensor({hidden});
    w.w_ans = scaled_weight(2 * hidden, hidden, rng);
    w.b_ans = Tensor({hidden});
    w.w_opt = scaled_weight(dim, hidden, rng);
    w.w_imp_frame = scaled_weight(hidden, hidden, rng);
    w.w_imp_ctx = scaled_weight(hidden, hidden, rng);
    w.b_imp = Tensor({hidden});
    // Zero output layer: the teacher's importance starts uniform, so early KL
    // pulls selected scores together instead of toward a random preference.
    w.w_imp_out = Tensor({hidden, 1});
    w.b_imp_out = Tensor({1});
    return w;
}

Var straight_through_features(Var frames, Var mask, const std::vector<std::size_t>& selected) {
    using namespace diff;
    const Var m = gather(mask, selected);
    const Var gate = shift(sub(m, stop_gradient(m)), 1.0);
    return scale_rows(gather_rows(frames, selected), gate);
}

Var soft_features(Var frames, Var mask, const std::vector<std::size_t>& selected) {
    using namespace diff;
    return scale_rows(gather_rows(frames, selected), gather(mask, selected));
}

namespace {

// Row vector x (length n) times W (n x m), returned as a length-m vector.
Var vec_mat(Var x, Var w) {
    using namespace diff;
    const auto n = x.value().size();
    return reshape(matmul(reshape(x, {1, n}), w), {w.value().cols()});
}

}  // namespace

TeacherOutput teacher_forward(Var selected_features, Var question, Var options, const TeacherWeights<Var>& w) {
    using namespace diff;
    const auto& opts = options.value();
    if (opts.rank() != 2 || opts.rows() < 2) {
        throw ValidationError("teacher_forward: need at least two answer options, got shape " + shape_str(opts.shape()));
    }
    if (selected_features.value().rank() != 2 || selected_features.value().rows() == 0) {
        throw ValidationError("teacher_forward: no selected frames");
    }

    TeacherOutput out;
    out.frame_hiddens = tanh(add_row(matmul(selected_features, w.w_proj), w.b_proj));
    out.context = tanh(add(vec_mat(question, w.w_ctx), w.b_ctx));
    // The teacher reads the frames through its own importance distribution,
    // so CE shapes the importance that KL later hands to the student.
    out.importance = teacher_distribution(out.frame_hiddens, out.context, w);
    const auto k = out.frame_hiddens.value().rows();
    const Var pooled = reshape(matmul(reshape(out.importance, {1, k}), out.frame_hiddens), {w.b_proj.value().size()});
    const Var summary = tanh(add(vec_mat(concat_cols(pooled, out.context), w.w_ans), w.b_ans));
    const Var option_keys = matmul(options, w.w_opt);
    out.logits = reshape(matmul(option_keys, reshape(summary, {summary.value().size(), 1})), {opts.rows()});
    return out;
}

Var teacher_distribution(Var frame_hiddens, Var context, const TeacherWeights<Var>& w) {
    using namespace diff;
    const auto k = frame_hiddens.value().rows();
    const Var ctx = add(vec_mat(context, w.w_imp_ctx), w.b_imp);
    const Var h = tanh(add_row(matmul(frame_hiddens, w.w_imp_frame), ctx));
    const Var logits = reshape(add_row(matmul(h, w.w_imp_out), w.b_imp_out), {k});
    return softmax(logits);
}

Var kl_loss(Var teacher, Var student, double eps) {
    using namespace diff;
    if (teacher.value().size() != student.value().size()) {
        throw ValidationError("kl_loss: distributions over " + std::to_string(teacher.value().size()) + " and " +
                              std::to_string(student.value().size()) + " frames");
    }
    return sum(mul(teacher, sub(log(teacher, eps), log(student, eps))));
}

Var ce_loss(Var logits, std::size_t label) {
    using namespace diff;
    if (label >= logits.value().size()) {
        throw ValidationError("ce_loss: label " + std::to_string(label) + " outside " +
                              std::to_string(logits.value().size()) + " classes");
    }
    return sub(logsumexp(logits), reshape(gather(logits, {label}), {}));
}

std::size_t label_from_one_hot(const std::vector<double>& y) {
    std::size_t hot = y.size();
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1.0) {
            if (hot != y.size()) throw ValidationError("label vector has more than one hot entry");
            hot = i;
        } else if (y[i] != 0.0) {
            throw ValidationError("label vector entries must be 0 or 1");
        }
    }
    if (hot == y.size()) throw ValidationError("label vector has no hot entry");
    return hot;
}

Var total_loss(Var ce, Var kl, Var f_set, Var sep, const LossWeights& weights) {
    using namespace diff;
    Var total = ce;
    if (kl.valid()) total = add(total, scale(kl, weights.lambda_kl));
    if (f_set.valid()) total = sub(total, scale(f_set, weights.lambda_set));
    if (sep.valid()) total = add(total, scale(sep, weights.lambda_sep));
    return total;
}

double kl_weight(std::size_t step, std::size_t epoch_len, double start, double end) {
    if (epoch_len == 0) throw ValidationError("epoch length must be positive");
    const double progress = std::min(1.0, static_cast<double>(step) / static_cast<double>(epoch_len));
    return start + (end - start) * progress;
}

}  // namespace hfs::mutual
