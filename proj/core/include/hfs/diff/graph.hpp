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

#include <deque>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hfs/diff/tensor.hpp"
#include "hfs/error.hpp"

namespace hfs::diff {

class Graph;

// Handle to a node recorded on a Graph.
struct Var {
    Graph* graph = nullptr;
    int id = -1;

    bool valid() const noexcept { return graph != nullptr && id >= 0; }
    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
};

// Gradient per trainable leaf, keyed by parameter name.
using GradientMap = std::map<std::string, Tensor>;

using ForwardFn = std::function<Tensor(std::span<const Tensor* const> inputs)>;
// grad_inputs[i] is null when input i does not require a gradient.
using BackwardFn = std::function<void(std::span<const Tensor* const> inputs, const Tensor& output,
                                      const Tensor& grad_output, std::span<Tensor* const> grad_inputs)>;

class ShapeError : public ValidationError {
public:
    ShapeError(int node_id, const std::string& what) : ValidationError(what), node_id_(node_id) {}
    int node_id() const noexcept { return node_id_; }

private:
    int node_id_;
};

class NonFiniteError : public NumericError {
public:
    NonFiniteError(int node_id, const std::string& what) : NumericError(what), node_id_(node_id) {}
    int node_id() const noexcept { return node_id_; }

private:
    int node_id_;
};

// Define-by-run tape. Recording an op evaluates it immediately; forward()
// replays the tape after leaf values change, keeping every data-dependent
// choice (gather indices, noise draws) that was made while recording.
// Backward visits nodes in exact reverse recording order.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Var constant(Tensor value);
    // Trainable leaf. Names are unique within a graph.
    Var parameter(const std::string& name, Tensor value);
    Var apply(std::string_view op, std::vector<Var> inputs, ForwardFn forward, BackwardFn backward);

    const Tensor& value(Var v) const;
    std::size_t size() const noexcept { return nodes_.size(); }
    int next_id() const noexcept { return static_cast<int>(nodes_.size()); }
    std::string_view op_name(int id) const { return nodes_.at(static_cast<std::size_t>(id)).op; }

    bool has_parameter(const std::string& name) const { return params_.count(name) != 0; }
    Var parameter_var(const std::string& name);
    std::vector<std::string> parameter_names() const;

    // Overwrite a leaf's value. The graph is stale until forward() runs.
    void set_parameter(const std::string& name, Tensor value);

    void forward();
    bool stale() const noexcept { return stale_; }

    // Reverse-mode gradients of a scalar node w.r.t. every trainable leaf.
    // Leaves unreachable from `loss` receive zero tensors.
    GradientMap backward(Var loss) const;

    [[noreturn]] void fail_shape(std::string_view op, const std::string& detail) const;

private:
    struct Node {
        std::string_view op;
        std::vector<int> inputs;
        Tensor value;
        ForwardFn forward;
        BackwardFn backward;
        bool requires_grad = false;
        bool leaf = false;
    };

    void check(const Var& v) const;
    void check_finite(int id) const;

    // deque: references returned by value() stay valid as the tape grows.
    std::deque<Node> nodes_;
    std::map<std::string, int> params_;
    bool stale_ = false;
};

}  // namespace hfs::diff
