#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "imperceptor/errors.hpp"
#include "imperceptor/tensor.hpp"

namespace imperceptor {

inline void check_label(const Tensor& logits, int target) {
    if (target < 0 || target >= static_cast<int>(logits.data.size())) {
        throw ConfigError("target label " + std::to_string(target) + " out of range [0, " +
                          std::to_string(logits.data.size()) + ")");
    }
}

// Softmax cross-entropy against a one-hot target, computed with
// max-subtraction so large logits stay finite. Always >= 0.
inline double softmaxloss(const Tensor& logits, int target) {
    check_label(logits, target);
    double m = logits.data[0];
    for (double v : logits.data) m = std::max(m, v);
    double sum = 0.0;
    for (double v : logits.data) sum += std::exp(v - m);
    return std::log(sum) - (logits.data[static_cast<std::size_t>(target)] - m);
}

// d(softmaxloss)/d(logits) = softmax(logits) - onehot(target)
inline Tensor softmaxloss_grad(const Tensor& logits, int target) {
    check_label(logits, target);
    double m = logits.data[0];
    for (double v : logits.data) m = std::max(m, v);
    Tensor g(logits.shape);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.data.size(); ++i) {
        g.data[i] = std::exp(logits.data[i] - m);
        sum += g.data[i];
    }
    for (double& v : g.data) v /= sum;
    g.data[static_cast<std::size_t>(target)] -= 1.0;
    return g;
}

// Ties break to the lowest index, so classification is deterministic.
inline int argmax_label(const Tensor& logits) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(logits.data.size()); ++i) {
        if (logits.data[static_cast<std::size_t>(i)] > logits.data[static_cast<std::size_t>(best)]) {
            best = i;
        }
    }
    return best;
}

}  // namespace imperceptor
