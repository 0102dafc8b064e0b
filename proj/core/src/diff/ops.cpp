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

#include "hfs/diff/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

namespace hfs::diff {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

MapC view(const Tensor& t) {
    return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

Map view(Tensor& t) { return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())}; }

Graph& graph_of(const Var& a) {
    if (!a.valid()) throw ValidationError("op applied to an unbound Var");
    return *a.graph;
}

Graph& graph_of(const Var& a, const Var& b) {
    if (a.graph != b.graph) throw ValidationError("op mixes Vars from different graphs");
    return graph_of(a);
}

void require_rank(Graph& g, std::string_view op, const Var& v, std::size_t rank) {
    if (v.value().rank() != rank) {
        g.fail_shape(op, "expected rank " + std::to_string(rank) + ", got shape " + shape_str(v.shape()));
    }
}

void require_same_shape(Graph& g, std::string_view op, const Var& a, const Var& b) {
    if (a.shape() != b.shape()) g.fail_shape(op, "shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

// Elementwise unary op with derivative expressed through (input, output).
template <class F, class D>
Var unary(std::string_view op, Var a, F f, D dfdx) {
    auto& g = graph_of(a);
    return g.apply(
        op, {a},
        [f](std::span<const Tensor* const> in) {
            Tensor out = *in[0];
            for (auto& v : out.values()) v = f(v);
            return out;
        },
        [dfdx](std::span<const Tensor* const> in, const Tensor& out, const Tensor& gout,
               std::span<Tensor* const> gin) {
            if (!gin[0]) return;
            auto& gx = *gin[0];
            const auto& x = *in[0];
            for (std::size_t i = 0; i < x.size(); ++i) gx[i] += gout[i] * dfdx(x[i], out[i]);
        });
}

}  // namespace

Var matmul(Var a, Var b) {
    auto& g = graph_of(a, b);
    require_rank(g, "matmul", a, 2);
    require_rank(g, "matmul", b, 2);
    if (a.value().cols() != b.value().rows()) {
        g.fail_shape("matmul", "inner dimensions differ: " + shape_str(a.shape()) + " * " + shape_str(b.shape()));
    }
    return g.apply(
        "matmul", {a, b},
        [](std::span<const Tensor* const> in) {
            Tensor out({in[0]->rows(), in[1]->cols()});
            if (out.size()) view(out).noalias() = view(*in[0]) * view(*in[1]);
            return out;
        },
        [](std::span<const Tensor* const> in, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (gout.empty()) return;
            if (gin[0]) view(*gin[0]).noalias() += view(gout) * view(*in[1]).transpose();
            if (gin[1]) view(*gin[1]).noalias() += view(*in[0]).transpose() * view(gout);
        });
}

Var matmul_nt(Var a, Var b) {
    auto& g = graph_of(a, b);
    require_rank(g, "matmul_nt", a, 2);
    require_rank(g, "matmul_nt", b, 2);
    if (a.value().cols() != b.value().cols()) {
        g.fail_shape("matmul_nt", "feature dimensions differ: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
    return g.apply(
        "matmul_nt", {a, b},
        [](std::span<const Tensor* const> in) {
            Tensor out({in[0]->rows(), in[1]->rows()});
            if (out.size()) view(out).noalias() = view(*in[0]) * view(*in[1]).transpose();
            return out;
        },
        [](std::span<const Tensor* const> in, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (gout.empty()) return;
            if (gin[0]) view(*gin[0]).noalias() += view(gout) * view(*in[1]);
            if (gin[1]) view(*gin[1]).noalias() += view(gout).transpose() * view(*in[0]);
        });
}

Var transpose(Var a) {
    auto& g = graph_of(a);
    require_rank(g, "transpose", a, 2);
    return g.apply(
        "transpose", {a},
        [](std::span<const Tensor* const> in) {
            Tensor out({in[0]->cols(), in[0]->rows()});
            if (out.size()) view(out) = view(*in[0]).transpose();
            return out;
        },
        [](std::span<const Tensor* const>, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (gin[0] && gout.size()) view(*gin[0]) += view(gout).transpose();
        });
}

Var reshape(Var a, Shape shape) {
    auto& g = graph_of(a);
    if (shape.size() > 2 || shape_size(shape) != a.value().size()) {
        g.fail_shape("reshape", "cannot reshape " + shape_str(a.shape()) + " to " + shape_str(shape));
    }
    return g.apply(
        "reshape", {a}, [shape](std::span<const Tensor* const> in) { return in[0]->reshaped(shape); },
        [](std::span<const Tensor* const>, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (!gin[0]) return;
            for (std::size_t i = 0; i < gout.size(); ++i) (*gin[0])[i] += gout[i];
        });
}

Var add(Var a, Var b) {
    auto& g = graph_of(a, b);
    require_same_shape(g, "add", a, b);
    return g.apply(
        "add", {a, b},
        [](std::span<const Tensor* const> in) {
            Tensor out = *in[0];
            out.accumulate(*in[1]);
            return out;
        },
        [](std::span<const Tensor* const>, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (gin[0]) gin[0]->accumulate(gout);
            if (gin[1]) gin[1]->accumulate(gout);
        });
}

Var sub(Var a, Var b) {
    auto& g = graph_of(a, b);
    require_same_shape(g, "sub", a, b);
    return g.apply(
        "sub", {a, b},
        [](std::span<const Tensor* const> in) {
            Tensor out = *in[0];
            for (std::size_t i = 0; i < out.size(); ++i) out[i] -= (*in[1])[i];
            return out;
        },
        [](std::span<const Tensor* const>, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (gin[0]) gin[0]->accumulate(gout);
            if (gin[1]) {
                for (std::size_t i = 0; i < gout.size(); ++i) (*gin[1])[i] -= gout[i];
            }
        });
}

Var mul(Var a, Var b) {
    auto& g = graph_of(a, b);
    require_same_shape(g, "mul", a, b);
    return g.apply(
        "mul", {a, b},
        [](std::span<const Tensor* const> in) {
            Tensor out = *in[0];
            for (std::size_t i = 0; i < out.size(); ++i) out[i] *= (*in[1])[i];
            return out;
        },
        [](std::span<const Tensor* const> in, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (gin[0]) {
                for (std::size_t i = 0; i < gout.size(); ++i) (*gin[0])[i] += gout[i] * (*in[1])[i];
            }
            if (gin[1]) {
                for (std::size_t i = 0; i < gout.size(); ++i) (*gin[1])[i] += gout[i] * (*in[0])[i];
            }
        });
}

Var scale(Var a, double factor) {
    return unary("scale", a, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Var shift(Var a, double offset) {
    return unary("shift", a, [offset](double x) { return x + offset; }, [](double, double) { return 1.0; });
}

Var sigmoid(Var a) {
    return unary(
        "sigmoid", a,
        [](double x) {
            if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
            const double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
    return unary("tanh", a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var exp(Var a) {
    return unary("exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(Var a, double eps) {
    return unary("log", a, [eps](double x) { return std::log(x + eps); },
                 [eps](double x, double) { return 1.0 / (x + eps); });
}

Var log1m(Var a, double eps) {
    const double cap = 1.0 - eps;
    return unary(
        "log1m", a, [cap, eps](double x) { return std::log(1.0 - std::min(x, cap) + eps); },
        [cap, eps](double x, double) { return x < cap ? -1.0 / (1.0 - x + eps) : 0.0; });
}

Var clamp01(Var a) {
    return unary("clamp01", a, [](double x) { return std::clamp(x, 0.0, 1.0); },
                 [](double x, double) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; });
}

Var stop_gradient(Var a) {
    auto& g = graph_of(a);
    return g.apply("stop_gradient", {a}, [](std::span<const Tensor* const> in) { return *in[0]; }, nullptr);
}

Var add_row(Var m, Var v) {
    auto& g = graph_of(m, v);
    require_rank(g, "add_row", m, 2);
    require_rank(g, "add_row", v, 1);
    if (m.value().cols() != v.value().size()) {
        g.fail_shape("add_row", "row length " + std::to_string(m.value().cols()) + " vs vector " +
                                    shape_str(v.shape()));
    }
    return g.apply(
        "add_row", {m, v},
        [](std::span<const Tensor* const> in) {
            Tensor out = *in[0];
            const auto& bias = *in[1];
            for (std::size_t r = 0; r < out.rows(); ++r) {
                auto row = out.row(r);
                for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
            }
            return out;
        },
        [](std::span<const Tensor* const>, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (gin[0]) gin[0]->accumulate(gout);
            if (gin[1]) {
                auto& gb = *gin[1];
                for (std::size_t r = 0; r < gout.rows(); ++r) {
                    auto row = gout.row(r);
                    for (std::size_t c = 0; c < row.size(); ++c) gb[c] += row[c];
                }
            }
        });
}

Var scale_rows(Var m, Var w) {
    auto& g = graph_of(m, w);
    require_rank(g, "scale_rows", m, 2);
    require_rank(g, "scale_rows", w, 1);
    if (m.value().rows() != w.value().size()) {
        g.fail_shape("scale_rows", "rows " + std::to_string(m.value().rows()) + " vs weights " + shape_str(w.shape()));
    }
    return g.apply(
        "scale_rows", {m, w},
        [](std::span<const Tensor* const> in) {
            Tensor out = *in[0];
            for (std::size_t r = 0; r < out.rows(); ++r) {
                for (auto& v : out.row(r)) v *= (*in[1])[r];
            }
            return out;
        },
        [](std::span<const Tensor* const> in, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            const auto& x = *in[0];
            const auto& w = *in[1];
            for (std::size_t r = 0; r < x.rows(); ++r) {
                auto grow = gout.row(r);
                if (gin[0]) {
                    auto dx = gin[0]->row(r);
                    for (std::size_t c = 0; c < grow.size(); ++c) dx[c] += grow[c] * w[r];
                }
                if (gin[1]) {
                    auto xrow = x.row(r);
                    double acc = 0.0;
                    for (std::size_t c = 0; c < grow.size(); ++c) acc += grow[c] * xrow[c];
                    (*gin[1])[r] += acc;
                }
            }
        });
}

Var sum(Var a) {
    auto& g = graph_of(a);
    return g.apply(
        "sum", {a},
        [](std::span<const Tensor* const> in) {
            double acc = 0.0;
            for (double v : in[0]->values()) acc += v;
            return Tensor::scalar(acc);
        },
        [](std::span<const Tensor* const>, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (!gin[0]) return;
            for (auto& v : gin[0]->values()) v += gout[0];
        });
}

Var dot(Var a, Var b) {
    auto& g = graph_of(a, b);
    require_same_shape(g, "dot", a, b);
    return g.apply(
        "dot", {a, b},
        [](std::span<const Tensor* const> in) {
            double acc = 0.0;
            for (std::size_t i = 0; i < in[0]->size(); ++i) acc += (*in[0])[i] * (*in[1])[i];
            return Tensor::scalar(acc);
        },
        [](std::span<const Tensor* const> in, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            const double go = gout[0];
            if (gin[0]) {
                for (std::size_t i = 0; i < in[0]->size(); ++i) (*gin[0])[i] += go * (*in[1])[i];
            }
            if (gin[1]) {
                for (std::size_t i = 0; i < in[0]->size(); ++i) (*gin[1])[i] += go * (*in[0])[i];
            }
        });
}

Var squared_norm(Var a) {
    auto& g = graph_of(a);
    return g.apply(
        "squared_norm", {a},
        [](std::span<const Tensor* const> in) {
            double acc = 0.0;
            for (double v : in[0]->values()) acc += v * v;
            return Tensor::scalar(acc);
        },
        [](std::span<const Tensor* const> in, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (!gin[0]) return;
            for (std::size_t i = 0; i < in[0]->size(); ++i) (*gin[0])[i] += 2.0 * gout[0] * (*in[0])[i];
        });
}

Var cosine(Var a, Var b, double eps) {
    auto& g = graph_of(a, b);
    require_same_shape(g, "cosine", a, b);
    struct Parts {
        double dot, na, nb;
    };
    auto parts = [](const Tensor& x, const Tensor& y) {
        Parts p{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < x.size(); ++i) {
            p.dot += x[i] * y[i];
            p.na += x[i] * x[i];
            p.nb += y[i] * y[i];
        }
        p.na = std::sqrt(p.na);
        p.nb = std::sqrt(p.nb);
        return p;
    };
    return g.apply(
        "cosine", {a, b},
        [parts, eps](std::span<const Tensor* const> in) {
            const auto p = parts(*in[0], *in[1]);
            return Tensor::scalar(p.dot / std::max(p.na * p.nb, eps));
        },
        [parts, eps](std::span<const Tensor* const> in, const Tensor& out, const Tensor& gout,
                     std::span<Tensor* const> gin) {
            const auto p = parts(*in[0], *in[1]);
            const bool floored = p.na * p.nb <= eps;
            const double denom = floored ? eps : p.na * p.nb;
            const double c = out[0];
            const double go = gout[0];
            // Below the floor the denominator is a constant.
            auto grad_side = [&](const Tensor& self, const Tensor& other, double n_self, Tensor& dst) {
                const double radial = floored ? 0.0 : c / (n_self * n_self);
                for (std::size_t i = 0; i < self.size(); ++i) dst[i] += go * (other[i] / denom - radial * self[i]);
            };
            if (gin[0]) grad_side(*in[0], *in[1], p.na, *gin[0]);
            if (gin[1]) grad_side(*in[1], *in[0], p.nb, *gin[1]);
        });
}

Var logsumexp(Var a) {
    auto& g = graph_of(a);
    if (a.value().empty()) g.fail_shape("logsumexp", "empty input");
    return g.apply(
        "logsumexp", {a},
        [](std::span<const Tensor* const> in) {
            const auto vals = in[0]->values();
            const double mx = *std::max_element(vals.begin(), vals.end());
            double acc = 0.0;
            for (double v : vals) acc += std::exp(v - mx);
            return Tensor::scalar(mx + std::log(acc));
        },
        [](std::span<const Tensor* const> in, const Tensor& out, const Tensor& gout, std::span<Tensor* const> gin) {
            if (!gin[0]) return;
            const double lse = out[0];
            for (std::size_t i = 0; i < in[0]->size(); ++i) (*gin[0])[i] += gout[0] * std::exp((*in[0])[i] - lse);
        });
}

Var mean_rows(Var m) {
    auto& g = graph_of(m);
    require_rank(g, "mean_rows", m, 2);
    if (m.value().rows() == 0) g.fail_shape("mean_rows", "mean over zero rows");
    return g.apply(
        "mean_rows", {m},
        [](std::span<const Tensor* const> in) {
            const auto& x = *in[0];
            Tensor out({x.cols()});
            for (std::size_t r = 0; r < x.rows(); ++r) {
                auto row = x.row(r);
                for (std::size_t c = 0; c < row.size(); ++c) out[c] += row[c];
            }
            const double inv = 1.0 / static_cast<double>(x.rows());
            for (auto& v : out.values()) v *= inv;
            return out;
        },
        [](std::span<const Tensor* const> in, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (!gin[0]) return;
            const double inv = 1.0 / static_cast<double>(in[0]->rows());
            for (std::size_t r = 0; r < in[0]->rows(); ++r) {
                auto dst = gin[0]->row(r);
                for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += gout[c] * inv;
            }
        });
}

namespace {

void softmax_inplace(std::span<double> v, double inv_temperature) {
    double mx = -INFINITY;
    for (double x : v) mx = std::max(mx, x * inv_temperature);
    double acc = 0.0;
    for (auto& x : v) {
        x = std::exp(x * inv_temperature - mx);
        acc += x;
    }
    for (auto& x : v) x /= acc;
}

void softmax_backward(std::span<const double> y, std::span<const double> gy, std::span<double> gx,
                      double inv_temperature) {
    double inner = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) inner += y[i] * gy[i];
    for (std::size_t i = 0; i < y.size(); ++i) gx[i] += inv_temperature * y[i] * (gy[i] - inner);
}

}  // namespace

Var softmax(Var a, double temperature) {
    auto& g = graph_of(a);
    require_rank(g, "softmax", a, 1);
    if (a.value().empty()) g.fail_shape("softmax", "empty input");
    if (!(temperature > 0.0)) g.fail_shape("softmax", "temperature must be positive");
    const double inv = 1.0 / temperature;
    return g.apply(
        "softmax", {a},
        [inv](std::span<const Tensor* const> in) {
            Tensor out = *in[0];
            softmax_inplace(out.values(), inv);
            return out;
        },
        [inv](std::span<const Tensor* const>, const Tensor& out, const Tensor& gout, std::span<Tensor* const> gin) {
            if (gin[0]) softmax_backward(out.values(), gout.values(), gin[0]->values(), inv);
        });
}

Var softmax_rows(Var m) {
    auto& g = graph_of(m);
    require_rank(g, "softmax_rows", m, 2);
    return g.apply(
        "softmax_rows", {m},
        [](std::span<const Tensor* const> in) {
            Tensor out = *in[0];
            for (std::size_t r = 0; r < out.rows(); ++r) softmax_inplace(out.row(r), 1.0);
            return out;
        },
        [](std::span<const Tensor* const>, const Tensor& out, const Tensor& gout, std::span<Tensor* const> gin) {
            if (!gin[0]) return;
            for (std::size_t r = 0; r < out.rows(); ++r) softmax_backward(out.row(r), gout.row(r), gin[0]->row(r), 1.0);
        });
}

Var concat_cols(Var a, Var b) {
    auto& g = graph_of(a, b);
    const auto ra = a.value().rank();
    const auto rb = b.value().rank();
    if (ra != rb || ra == 0) g.fail_shape("concat_cols", "incompatible shapes " + shape_str(a.shape()) + ", " + shape_str(b.shape()));
    if (ra == 2 && a.value().rows() != b.value().rows()) {
        g.fail_shape("concat_cols", "row counts differ: " + shape_str(a.shape()) + ", " + shape_str(b.shape()));
    }
    return g.apply(
        "concat_cols", {a, b},
        [](std::span<const Tensor* const> in) {
            const auto& x = *in[0];
            const auto& y = *in[1];
            if (x.rank() == 1) {
                std::vector<double> v(x.values().begin(), x.values().end());
                v.insert(v.end(), y.values().begin(), y.values().end());
                return Tensor::vector(std::move(v));
            }
            Tensor out({x.rows(), x.cols() + y.cols()});
            for (std::size_t r = 0; r < x.rows(); ++r) {
                auto dst = out.row(r);
                std::copy(x.row(r).begin(), x.row(r).end(), dst.begin());
                std::copy(y.row(r).begin(), y.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(x.cols()));
            }
            return out;
        },
        [](std::span<const Tensor* const> in, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            const auto& x = *in[0];
            const std::size_t rows = x.rank() == 1 ? 1 : x.rows();
            const std::size_t cx = x.rank() == 1 ? x.size() : x.cols();
            const std::size_t cy = in[1]->rank() == 1 ? in[1]->size() : in[1]->cols();
            for (std::size_t r = 0; r < rows; ++r) {
                const double* src = gout.data() + r * (cx + cy);
                if (gin[0]) {
                    double* dst = gin[0]->data() + r * cx;
                    for (std::size_t c = 0; c < cx; ++c) dst[c] += src[c];
                }
                if (gin[1]) {
                    double* dst = gin[1]->data() + r * cy;
                    for (std::size_t c = 0; c < cy; ++c) dst[c] += src[cx + c];
                }
            }
        });
}

Var concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw ValidationError("concat_rows of zero parts");
    auto& g = graph_of(parts.front());
    std::size_t width = 0;
    bool have_width = false;
    for (const auto& p : parts) {
        graph_of(parts.front(), p);
        const auto& v = p.value();
        if (v.rank() == 0) g.fail_shape("concat_rows", "scalar part");
        const std::size_t w = v.rank() == 1 ? v.size() : v.cols();
        if (have_width && w != width) g.fail_shape("concat_rows", "row widths differ: " + std::to_string(width) + " vs " + std::to_string(w));
        width = w;
        have_width = true;
    }
    return g.apply(
        "concat_rows", parts,
        [width](std::span<const Tensor* const> in) {
            std::size_t rows = 0;
            for (const auto* t : in) rows += t->rank() == 1 ? 1 : t->rows();
            Tensor out({rows, width});
            double* dst = out.data();
            for (const auto* t : in) dst = std::copy(t->data(), t->data() + t->size(), dst);
            return out;
        },
        [](std::span<const Tensor* const> in, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            const double* src = gout.data();
            for (std::size_t i = 0; i < in.size(); ++i) {
                const std::size_t n = in[i]->size();
                if (gin[i]) {
                    for (std::size_t k = 0; k < n; ++k) (*gin[i])[k] += src[k];
                }
                src += n;
            }
        });
}

Var gather_rows(Var m, std::vector<std::size_t> rows) {
    auto& g = graph_of(m);
    require_rank(g, "gather_rows", m, 2);
    for (auto r : rows) {
        if (r >= m.value().rows()) {
            g.fail_shape("gather_rows", "row " + std::to_string(r) + " out of range for " + shape_str(m.shape()));
        }
    }
    return g.apply(
        "gather_rows", {m},
        [rows](std::span<const Tensor* const> in) {
            const auto& x = *in[0];
            Tensor out({rows.size(), x.cols()});
            for (std::size_t i = 0; i < rows.size(); ++i) {
                std::copy(x.row(rows[i]).begin(), x.row(rows[i]).end(), out.row(i).begin());
            }
            return out;
        },
        [rows](std::span<const Tensor* const>, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (!gin[0]) return;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                auto dst = gin[0]->row(rows[i]);
                auto src = gout.row(i);
                for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
            }
        });
}

Var gather(Var v, std::vector<std::size_t> indices) {
    auto& g = graph_of(v);
    require_rank(g, "gather", v, 1);
    for (auto i : indices) {
        if (i >= v.value().size()) {
            g.fail_shape("gather", "index " + std::to_string(i) + " out of range for " + shape_str(v.shape()));
        }
    }
    return g.apply(
        "gather", {v},
        [indices](std::span<const Tensor* const> in) {
            std::vector<double> out(indices.size());
            for (std::size_t i = 0; i < indices.size(); ++i) out[i] = (*in[0])[indices[i]];
            return Tensor::vector(std::move(out));
        },
        [indices](std::span<const Tensor* const>, const Tensor&, const Tensor& gout, std::span<Tensor* const> gin) {
            if (!gin[0]) return;
            for (std::size_t i = 0; i < indices.size(); ++i) (*gin[0])[indices[i]] += gout[i];
        });
}

Var row(Var m, std::size_t r) {
    auto& g = graph_of(m);
    require_rank(g, "row", m, 2);
    if (r >= m.value().rows()) g.fail_shape("row", "row " + std::to_string(r) + " out of range for " + shape_str(m.shape()));
    return reshape(gather_rows(m, {r}), {m.value().cols()});
}

}  // namespace hfs::diff
