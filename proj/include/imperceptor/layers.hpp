#pragma once

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "imperceptor/tensor.hpp"

namespace imperceptor {

// Activations are {H, W, C} row-major with channel innermost, matching the
// byte order of PPM images. Dense layers flatten that order implicitly.

// 2-D convolution, valid padding, square stride.
struct Conv2d {
    int in_h = 0, in_w = 0, in_c = 0;
    int out_c = 0, kh = 0, kw = 0, stride = 1;
    Tensor weights;  // {kh, kw, in_c, out_c}
    Tensor bias;     // {out_c}

    Conv2d() = default;
    Conv2d(int in_h_, int in_w_, int in_c_, int out_c_, int kh_, int kw_, int stride_)
        : in_h(in_h_), in_w(in_w_), in_c(in_c_), out_c(out_c_), kh(kh_), kw(kw_),
          stride(stride_),
          weights(Tensor::zeros({kh_, kw_, in_c_, out_c_})),
          bias(Tensor::zeros({out_c_})) {}

    int out_h() const { return (in_h - kh) / stride + 1; }
    int out_w() const { return (in_w - kw) / stride + 1; }

    std::vector<int> in_shape() const { return {in_h, in_w, in_c}; }
    std::vector<int> out_shape() const { return {out_h(), out_w(), out_c}; }

    Tensor forward(const Tensor& x) const {
        const int oh = out_h(), ow = out_w();
        Tensor y({oh, ow, out_c});
        for (int i = 0; i < oh; ++i) {
            for (int j = 0; j < ow; ++j) {
                const int si = i * stride, sj = j * stride;
                for (int co = 0; co < out_c; ++co) {
                    double acc = bias.data[static_cast<std::size_t>(co)];
                    for (int ki = 0; ki < kh; ++ki) {
                        const double* xrow =
                            &x.data[(static_cast<std::size_t>(si + ki) * in_w + sj) * in_c];
                        const double* wrow =
                            &weights.data[((static_cast<std::size_t>(ki) * kw) * in_c) * out_c];
                        for (int kj = 0; kj < kw; ++kj) {
                            for (int ci = 0; ci < in_c; ++ci) {
                                acc += xrow[kj * in_c + ci] *
                                       wrow[(static_cast<std::size_t>(kj) * in_c + ci) * out_c + co];
                            }
                        }
                    }
                    y.data[(static_cast<std::size_t>(i) * ow + j) * out_c + co] = acc;
                }
            }
        }
        return y;
    }

    // grad_out has out_shape(). Returns grad wrt input; accumulates weight and
    // bias grads into wgrad/bgrad when given (shapes must match).
    Tensor backward(const Tensor& x, const Tensor& grad_out, Tensor* wgrad,
                    Tensor* bgrad) const {
        const int oh = out_h(), ow = out_w();
        Tensor gx(x.shape);
        for (int i = 0; i < oh; ++i) {
            for (int j = 0; j < ow; ++j) {
                const int si = i * stride, sj = j * stride;
                for (int co = 0; co < out_c; ++co) {
                    const double g =
                        grad_out.data[(static_cast<std::size_t>(i) * ow + j) * out_c + co];
                    if (bgrad) bgrad->data[static_cast<std::size_t>(co)] += g;
                    for (int ki = 0; ki < kh; ++ki) {
                        for (int kj = 0; kj < kw; ++kj) {
                            for (int ci = 0; ci < in_c; ++ci) {
                                const std::size_t xi =
                                    (static_cast<std::size_t>(si + ki) * in_w + (sj + kj)) * in_c + ci;
                                const std::size_t wi =
                                    ((static_cast<std::size_t>(ki) * kw + kj) * in_c + ci) * out_c + co;
                                gx.data[xi] += g * weights.data[wi];
                                if (wgrad) wgrad->data[wi] += g * x.data[xi];
                            }
                        }
                    }
                }
            }
        }
        return gx;
    }
};

// Max pooling with window == stride; trailing rows/cols that do not fill a
// window are dropped. Ties route the gradient to the first maximum in scan
// order, keeping backward deterministic.
struct MaxPool2d {
    int size = 2;

    std::vector<int> out_shape(const std::vector<int>& in) const {
        return {in[0] / size, in[1] / size, in[2]};
    }

    Tensor forward(const Tensor& x) const {
        const int h = x.shape[0], w = x.shape[1], c = x.shape[2];
        const int oh = h / size, ow = w / size;
        Tensor y({oh, ow, c});
        for (int i = 0; i < oh; ++i) {
            for (int j = 0; j < ow; ++j) {
                for (int ch = 0; ch < c; ++ch) {
                    double best = x.data[(static_cast<std::size_t>(i * size) * w + j * size) * c + ch];
                    for (int ki = 0; ki < size; ++ki) {
                        for (int kj = 0; kj < size; ++kj) {
                            const double v =
                                x.data[(static_cast<std::size_t>(i * size + ki) * w + (j * size + kj)) * c + ch];
                            if (v > best) best = v;
                        }
                    }
                    y.data[(static_cast<std::size_t>(i) * ow + j) * c + ch] = best;
                }
            }
        }
        return y;
    }

    Tensor backward(const Tensor& x, const Tensor& grad_out) const {
        const int h = x.shape[0], w = x.shape[1], c = x.shape[2];
        const int oh = h / size, ow = w / size;
        Tensor gx(x.shape);
        for (int i = 0; i < oh; ++i) {
            for (int j = 0; j < ow; ++j) {
                for (int ch = 0; ch < c; ++ch) {
                    double best = x.data[(static_cast<std::size_t>(i * size) * w + j * size) * c + ch];
                    std::size_t best_idx =
                        (static_cast<std::size_t>(i * size) * w + j * size) * c + ch;
                    for (int ki = 0; ki < size; ++ki) {
                        for (int kj = 0; kj < size; ++kj) {
                            const std::size_t idx =
                                (static_cast<std::size_t>(i * size + ki) * w + (j * size + kj)) * c + ch;
                            if (x.data[idx] > best) {
                                best = x.data[idx];
                                best_idx = idx;
                            }
                        }
                    }
                    gx.data[best_idx] +=
                        grad_out.data[(static_cast<std::size_t>(i) * ow + j) * c + ch];
                }
            }
        }
        return gx;
    }
};

struct Relu {
    Tensor forward(const Tensor& x) const {
        Tensor y(x.shape);
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            y.data[i] = x.data[i] > 0.0 ? x.data[i] : 0.0;
        }
        return y;
    }

    Tensor backward(const Tensor& x, const Tensor& grad_out) const {
        Tensor gx(x.shape);
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            gx.data[i] = x.data[i] > 0.0 ? grad_out.data[i] : 0.0;
        }
        return gx;
    }
};

// Fully connected over the flattened input.
struct Dense {
    int in_dim = 0, out_dim = 0;
    Tensor weights;  // {out_dim, in_dim}
    Tensor bias;     // {out_dim}

    Dense() = default;
    Dense(int in_dim_, int out_dim_)
        : in_dim(in_dim_), out_dim(out_dim_),
          weights(Tensor::zeros({out_dim_, in_dim_})),
          bias(Tensor::zeros({out_dim_})) {}

    Tensor forward(const Tensor& x) const {
        Tensor y({out_dim});
        for (int o = 0; o < out_dim; ++o) {
            double acc = bias.data[static_cast<std::size_t>(o)];
            const double* wrow = &weights.data[static_cast<std::size_t>(o) * in_dim];
            for (int i = 0; i < in_dim; ++i) acc += wrow[i] * x.data[static_cast<std::size_t>(i)];
            y.data[static_cast<std::size_t>(o)] = acc;
        }
        return y;
    }

    Tensor backward(const Tensor& x, const Tensor& grad_out, Tensor* wgrad,
                    Tensor* bgrad) const {
        Tensor gx(x.shape);
        for (int o = 0; o < out_dim; ++o) {
            const double g = grad_out.data[static_cast<std::size_t>(o)];
            if (bgrad) bgrad->data[static_cast<std::size_t>(o)] += g;
            const double* wrow = &weights.data[static_cast<std::size_t>(o) * in_dim];
            double* wgrow = wgrad ? &wgrad->data[static_cast<std::size_t>(o) * in_dim] : nullptr;
            for (int i = 0; i < in_dim; ++i) {
                gx.data[static_cast<std::size_t>(i)] += g * wrow[i];
                if (wgrow) wgrow[i] += g * x.data[static_cast<std::size_t>(i)];
            }
        }
        return gx;
    }
};

using Layer = std::variant<Conv2d, MaxPool2d, Relu, Dense>;

inline const char* layer_name(const Layer& layer) {
    switch (layer.index()) {
        case 0: return "conv";
        case 1: return "maxpool";
        case 2: return "relu";
        default: return "dense";
    }
}

inline bool layer_has_params(const Layer& layer) {
    return std::holds_alternative<Conv2d>(layer) || std::holds_alternative<Dense>(layer);
}

}  // namespace imperceptor
