#pragma once

#include <string>
#include <vector>

#include "imperceptor/layers.hpp"
#include "imperceptor/tensor.hpp"

namespace imperceptor {

// Per-layer parameter gradients; `present` is false for stateless layers.
struct LayerGrads {
    bool present = false;
    Tensor weights;
    Tensor bias;
};

// Activation tape recorded by a forward pass; owned by the caller so that
// concurrent passes over the same network never share state.
struct Tape {
    std::vector<Tensor> inputs;  // input seen by each layer, in order
    Tensor logits;
};

// An ordered layer stack mapping an {H, W, C} input to N logits.
struct Network {
    std::vector<int> input_shape;  // {H, W, C}
    std::vector<Layer> layers;

    int num_outputs() const {
        const auto& last = layers.back();
        return std::get<Dense>(last).out_dim;
    }

    std::vector<int> expected_shape(std::size_t layer_idx,
                                    const std::vector<int>& incoming) const {
        const Layer& layer = layers[layer_idx];
        if (const auto* conv = std::get_if<Conv2d>(&layer)) {
            return conv->in_shape();
        }
        if (const auto* dense = std::get_if<Dense>(&layer)) {
            if (Tensor::count(incoming) != dense->in_dim) {
                return {dense->in_dim};  // mismatch reported by caller
            }
            return incoming;
        }
        return incoming;
    }

    void check_input(std::size_t layer_idx, const Tensor& x) const {
        const Layer& layer = layers[layer_idx];
        if (const auto* conv = std::get_if<Conv2d>(&layer)) {
            if (x.shape != conv->in_shape()) {
                throw ShapeError("layer " + std::to_string(layer_idx) + " (conv): expected input " +
                                 Tensor::shape_string(conv->in_shape()) + ", got " +
                                 Tensor::shape_string(x.shape));
            }
        } else if (const auto* dense = std::get_if<Dense>(&layer)) {
            if (x.numel() != dense->in_dim) {
                throw ShapeError("layer " + std::to_string(layer_idx) + " (dense): expected " +
                                 std::to_string(dense->in_dim) + " inputs, got " +
                                 std::to_string(x.numel()));
            }
        } else if (std::holds_alternative<MaxPool2d>(layer)) {
            if (x.shape.size() != 3) {
                throw ShapeError("layer " + std::to_string(layer_idx) +
                                 " (maxpool): expected a 3-d input, got " +
                                 Tensor::shape_string(x.shape));
            }
        }
    }

    Tensor apply(std::size_t layer_idx, const Tensor& x) const {
        check_input(layer_idx, x);
        const Layer& layer = layers[layer_idx];
        if (const auto* conv = std::get_if<Conv2d>(&layer)) return conv->forward(x);
        if (const auto* pool = std::get_if<MaxPool2d>(&layer)) return pool->forward(x);
        if (const auto* relu = std::get_if<Relu>(&layer)) return relu->forward(x);
        return std::get<Dense>(layer).forward(x);
    }

    Tensor forward(const Tensor& input) const {
        if (input.shape != input_shape) {
            throw ShapeError("network input: expected " + Tensor::shape_string(input_shape) +
                             ", got " + Tensor::shape_string(input.shape));
        }
        Tensor x = input;
        for (std::size_t i = 0; i < layers.size(); ++i) x = apply(i, x);
        return x;
    }

    Tape forward_tape(const Tensor& input) const {
        if (input.shape != input_shape) {
            throw ShapeError("network input: expected " + Tensor::shape_string(input_shape) +
                             ", got " + Tensor::shape_string(input.shape));
        }
        Tape tape;
        tape.inputs.reserve(layers.size());
        Tensor x = input;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            tape.inputs.push_back(x);
            x = apply(i, x);
        }
        tape.logits = std::move(x);
        return tape;
    }

    // Back-propagates d(loss)/d(logits) through the recorded pass and returns
    // d(loss)/d(input). When `wgrads` is non-null, per-layer parameter grads
    // are accumulated into it (it is sized and zeroed if empty).
    Tensor backward(const Tape& tape, const Tensor& logit_grad,
                    std::vector<LayerGrads>* wgrads = nullptr) const {
        if (tape.inputs.size() != layers.size()) {
            throw Error("backward: no recorded forward pass for this network");
        }
        if (wgrads && wgrads->empty()) *wgrads = make_grads();
        Tensor g = logit_grad;
        for (std::size_t i = layers.size(); i-- > 0;) {
            const Layer& layer = layers[i];
            const Tensor& x = tape.inputs[i];
            if (const auto* conv = std::get_if<Conv2d>(&layer)) {
                Tensor* wg = wgrads ? &(*wgrads)[i].weights : nullptr;
                Tensor* bg = wgrads ? &(*wgrads)[i].bias : nullptr;
                g = conv->backward(x, g, wg, bg);
            } else if (const auto* pool = std::get_if<MaxPool2d>(&layer)) {
                g = pool->backward(x, g);
            } else if (const auto* relu = std::get_if<Relu>(&layer)) {
                g = relu->backward(x, g);
            } else {
                const auto& dense = std::get<Dense>(layer);
                Tensor* wg = wgrads ? &(*wgrads)[i].weights : nullptr;
                Tensor* bg = wgrads ? &(*wgrads)[i].bias : nullptr;
                g = dense.backward(x, g, wg, bg);
            }
        }
        return g;
    }

    std::vector<LayerGrads> make_grads() const {
        std::vector<LayerGrads> grads(layers.size());
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (const auto* conv = std::get_if<Conv2d>(&layers[i])) {
                grads[i].present = true;
                grads[i].weights = Tensor::zeros(conv->weights.shape);
                grads[i].bias = Tensor::zeros(conv->bias.shape);
            } else if (const auto* dense = std::get_if<Dense>(&layers[i])) {
                grads[i].present = true;
                grads[i].weights = Tensor::zeros(dense->weights.shape);
                grads[i].bias = Tensor::zeros(dense->bias.shape);
            }
        }
        return grads;
    }
};

}  // namespace imperceptor
