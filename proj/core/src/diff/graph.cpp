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

#include "hfs/diff/graph.hpp"

namespace hfs::diff {

const Tensor& Var::value() const {
    if (!valid()) throw ValidationError("use of an unbound Var");
    return graph->value(*this);
}

Var Graph::constant(Tensor value) {
    Node node;
    node.op = "constant";
    node.value = std::move(value);
    node.leaf = true;
    nodes_.push_back(std::move(node));
    check_finite(next_id() - 1);
    return {this, next_id() - 1};
}

Var Graph::parameter(const std::string& name, Tensor value) {
    if (params_.count(name)) throw ValidationError("duplicate parameter '" + name + "'");
    Node node;
    node.op = "parameter";
    node.value = std::move(value);
    node.leaf = true;
    node.requires_grad = true;
    nodes_.push_back(std::move(node));
    const int id = next_id() - 1;
    params_.emplace(name, id);
    check_finite(id);
    return {this, id};
}

Var Graph::apply(std::string_view op, std::vector<Var> inputs, ForwardFn forward, BackwardFn backward) {
    Node node;
    node.op = op;
    node.inputs.reserve(inputs.size());
    std::vector<const Tensor*> in_values;
    in_values.reserve(inputs.size());
    for (const auto& v : inputs) {
        check(v);
        node.inputs.push_back(v.id);
        in_values.push_back(&nodes_[static_cast<std::size_t>(v.id)].value);
        if (backward && nodes_[static_cast<std::size_t>(v.id)].requires_grad) node.requires_grad = true;
    }
    node.value = forward(in_values);
    node.forward = std::move(forward);
    node.backward = std::move(backward);
    nodes_.push_back(std::move(node));
    check_finite(next_id() - 1);
    return {this, next_id() - 1};
}

const Tensor& Graph::value(Var v) const {
    check(v);
    return nodes_[static_cast<std::size_t>(v.id)].value;
}

Var Graph::parameter_var(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ValidationError("unknown parameter '" + name + "'");
    return {this, it->second};
}

std::vector<std::string> Graph::parameter_names() const {
    std::vector<std::string> names;
    names.reserve(params_.size());
    for (const auto& [name, id] : params_) names.push_back(name);
    return names;
}

void Graph::set_parameter(const std::string& name, Tensor value) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ValidationError("unknown parameter '" + name + "'");
    auto& node = nodes_[static_cast<std::size_t>(it->second)];
    if (value.shape() != node.value.shape()) {
        throw ShapeError(it->second, "parameter '" + name + "' expects shape " + shape_str(node.value.shape()) +
                                         ", got " + shape_str(value.shape()));
    }
    node.value = std::move(value);
    stale_ = true;
}

void Graph::forward() {
    std::vector<const Tensor*> in_values;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        auto& node = nodes_[id];
        if (node.leaf) {
            check_finite(static_cast<int>(id));
            continue;
        }
        in_values.clear();
        for (int in : node.inputs) in_values.push_back(&nodes_[static_cast<std::size_t>(in)].value);
        node.value = node.forward(in_values);
        check_finite(static_cast<int>(id));
    }
    stale_ = false;
}

GradientMap Graph::backward(Var loss) const {
    if (nodes_.empty()) throw ValidationError("backward on an empty graph");
    if (stale_) throw ValidationError("backward called before forward on modified leaves");
    check(loss);
    const auto& out = nodes_[static_cast<std::size_t>(loss.id)];
    if (out.value.size() != 1) {
        throw ValidationError("backward requires a scalar loss, node " + std::to_string(loss.id) + " has shape " +
                              shape_str(out.value.shape()));
    }

    std::vector<Tensor> grads(static_cast<std::size_t>(loss.id) + 1);
    grads[static_cast<std::size_t>(loss.id)] = Tensor(out.value.shape(), {1.0});

    std::vector<const Tensor*> in_values;
    std::vector<Tensor*> in_grads;
    for (int id = loss.id; id >= 0; --id) {
        const auto& node = nodes_[static_cast<std::size_t>(id)];
        auto& g = grads[static_cast<std::size_t>(id)];
        if (node.leaf || !node.requires_grad || g.empty()) continue;
        in_values.clear();
        in_grads.clear();
        for (int in : node.inputs) {
            const auto& in_node = nodes_[static_cast<std::size_t>(in)];
            in_values.push_back(&in_node.value);
            if (in_node.requires_grad) {
                auto& ig = grads[static_cast<std::size_t>(in)];
                if (ig.size() != in_node.value.size() || ig.shape() != in_node.value.shape()) {
                    ig = Tensor::zeros_like(in_node.value);
                }
                in_grads.push_back(&ig);
            } else {
                in_grads.push_back(nullptr);
            }
        }
        node.backward(in_values, node.value, g, in_grads);
    }

    GradientMap result;
    for (const auto& [name, id] : params_) {
        const auto& node = nodes_[static_cast<std::size_t>(id)];
        if (id <= loss.id && grads[static_cast<std::size_t>(id)].shape() == node.value.shape() &&
            grads[static_cast<std::size_t>(id)].size() == node.value.size()) {
            result.emplace(name, grads[static_cast<std::size_t>(id)]);
        } else {
            result.emplace(name, Tensor::zeros_like(node.value));
        }
    }
    return result;
}

void Graph::fail_shape(std::string_view op, const std::string& detail) const {
    throw ShapeError(next_id(), "node " + std::to_string(next_id()) + " (" + std::string(op) + "): " + detail);
}

void Graph::check(const Var& v) const {
    if (v.graph != this) throw ValidationError("Var belongs to a different graph");
    if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
        throw ValidationError("Var id " + std::to_string(v.id) + " out of range");
    }
}

void Graph::check_finite(int id) const {
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.value.all_finite()) {
        throw NonFiniteError(id, "node " + std::to_string(id) + " (" + std::string(node.op) +
                                     ") produced a non-finite value");
    }
}

}  // namespace hfs::diff
