#include "hycass/nn_core.hpp"

#include <cmath>

#include "hycass/parallel.hpp"

namespace hycass {

namespace {

inline int wrap(int v, int size) {
    int m = v % size;
    return m < 0 ? m + size : m;
}

/// out[h][w] = x[(h+s) mod H][(w+s) mod W]; s may be negative.
template <typename T>
Tensor<T> roll2d(const Tensor<T>& x, int s) {
    if (s == 0) return x;
    const int H = x.dim(0), W = x.dim(1), C = x.dim(2);
    Tensor<T> out(x.shape);
    for (int h = 0; h < H; ++h) {
        int sh = wrap(h + s, H);
        for (int w = 0; w < W; ++w) {
            int sw = wrap(w + s, W);
            const T* src = &x.data[(size_t(sh) * W + sw) * C];
            T* dst = &out.data[(size_t(h) * W + w) * C];
            for (int c = 0; c < C; ++c) dst[c] = src[c];
        }
    }
    return out;
}

template <typename T>
void check_feature_map(const Tensor<T>& x) {
    require(x.rank() == 3, Err::shape_mismatch, "feature map must be H x W x Ch");
}

}  // namespace

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

template <typename T>
void ConvParams<T>::validate() const {
    require(kernel.rank() == 4, Err::shape_mismatch, "conv kernel must be 4-d");
    int k = kernel.dim(2);
    require(k == kernel.dim(3), Err::shape_mismatch, "conv kernel must be square");
    require(k == 1 || k == 3, Err::invalid_argument, "kernel size must be 1 or 3");
    require(stride == 1 || stride == 2, Err::invalid_argument, "stride must be 1 or 2");
    if (k == 1) require(stride == 1 && !transposed, Err::invalid_argument,
                        "1x1 convs are stride-1 non-transposed");
    if (transposed) require(k == 3 && stride == 2, Err::invalid_argument,
                            "transposed convs are 3x3 stride-2");
    require(bias.rank() == 1 && bias.dim(0) == kernel.dim(0), Err::shape_mismatch,
            "conv bias must match out channels");
}

template <typename T>
void AttentionParams<T>::validate() const {
    int ch = channels();
    require(heads >= 1 && ch % heads == 0, Err::head_divisibility,
            "channels must be divisible by heads");
    require(window >= 2 && window % 2 == 0, Err::invalid_argument,
            "window must be even and >= 2");
    require(qkv_weight.rank() == 2 && qkv_weight.dim(0) == 3 * ch &&
                qkv_weight.dim(1) == ch,
            Err::shape_mismatch, "qkv weight must be {3ch, ch}");
    require(qkv_bias.rank() == 1 && qkv_bias.dim(0) == 3 * ch, Err::shape_mismatch,
            "qkv bias must be {3ch}");
    require(proj_weight.rank() == 2 && proj_weight.dim(1) == ch, Err::shape_mismatch,
            "proj weight must be {ch, ch}");
    require(proj_bias.rank() == 1 && proj_bias.dim(0) == ch, Err::shape_mismatch,
            "proj bias must be {ch}");
    int span = 2 * window - 1;
    require(rel_bias.rank() == 2 && rel_bias.dim(0) == span * span &&
                rel_bias.dim(1) == heads,
            Err::shape_mismatch, "relative bias table must be {(2w-1)^2, heads}");
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
    Tensor<T> out(x.shape);
    for (int64_t i = 0; i < x.numel(); ++i) {
        T v = x[i];
        out[i] = v > T(0) ? v : slope * v;
    }
    return out;
}

template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& preact, T slope, const Tensor<T>& grad_out) {
    require(preact.same_shape(grad_out), Err::shape_mismatch, "leaky_relu grad shape");
    Tensor<T> gx(preact.shape);
    for (int64_t i = 0; i < preact.numel(); ++i)
        gx[i] = grad_out[i] * (preact[i] > T(0) ? T(1) : slope);
    return gx;
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
    Tensor<T> out(x.shape);
    for (int64_t i = 0; i < x.numel(); ++i) out[i] = T(1) / (T(1) + std::exp(-x[i]));
    return out;
}

template <typename T>
Tensor<T> sigmoid_backward(const Tensor<T>& output, const Tensor<T>& grad_out) {
    require(output.same_shape(grad_out), Err::shape_mismatch, "sigmoid grad shape");
    Tensor<T> gx(output.shape);
    for (int64_t i = 0; i < output.numel(); ++i)
        gx[i] = grad_out[i] * output[i] * (T(1) - output[i]);
    return gx;
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
    Tensor<T> out(x.shape);
    const T inv_sqrt2 = T(0.70710678118654752440);
    for (int64_t i = 0; i < x.numel(); ++i) {
        T v = x[i];
        out[i] = T(0.5) * v * (T(1) + std::erf(v * inv_sqrt2));
    }
    return out;
}

template <typename T>
Tensor<T> gelu_backward(const Tensor<T>& preact, const Tensor<T>& grad_out) {
    require(preact.same_shape(grad_out), Err::shape_mismatch, "gelu grad shape");
    Tensor<T> gx(preact.shape);
    const T inv_sqrt2 = T(0.70710678118654752440);
    const T inv_sqrt2pi = T(0.39894228040143267794);
    for (int64_t i = 0; i < preact.numel(); ++i) {
        T v = preact[i];
        T cdf = T(0.5) * (T(1) + std::erf(v * inv_sqrt2));
        T pdf = inv_sqrt2pi * std::exp(T(-0.5) * v * v);
        gx[i] = grad_out[i] * (cdf + v * pdf);
    }
    return gx;
}

// ---------------------------------------------------------------------------
// conv2d
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const ConvParams<T>& p) {
    check_feature_map(x);
    p.validate();
    const int H = x.dim(0), W = x.dim(1), Cin = x.dim(2);
    require(Cin == p.in_channels(), Err::channel_mismatch,
            "input has " + std::to_string(Cin) + " channels, kernel expects " +
                std::to_string(p.in_channels()));
    const int Cout = p.out_channels();
    const int k = p.kernel_size();

    if (k == 1) {
        // pointwise
        Tensor<T> y({H, W, Cout});
        const T* kw = p.kernel.data.data();  // {Cout, Cin}
        parallel_for(H, [&](int64_t h) {
            for (int w = 0; w < W; ++w) {
                const T* xi = &x.data[(size_t(h) * W + w) * Cin];
                T* yo = &y.data[(size_t(h) * W + w) * Cout];
                for (int co = 0; co < Cout; ++co) {
                    T acc = p.bias[co];
                    const T* kr = kw + size_t(co) * Cin;
                    for (int ci = 0; ci < Cin; ++ci) acc += kr[ci] * xi[ci];
                    yo[co] = acc;
                }
            }
        });
        return y;
    }

    if (!p.transposed) {
        const int s = p.stride;
        if (s == 2)
            require(H % 2 == 0 && W % 2 == 0, Err::odd_dims,
                    "stride-2 convolution needs even spatial dims");
        const int Ho = s == 2 ? H / 2 : H;
        const int Wo = s == 2 ? W / 2 : W;
        Tensor<T> y({Ho, Wo, Cout});
        parallel_for(Ho, [&](int64_t oh) {
            for (int ow = 0; ow < Wo; ++ow) {
                T* yo = &y.data[(size_t(oh) * Wo + ow) * Cout];
                for (int co = 0; co < Cout; ++co) yo[co] = p.bias[co];
                for (int kh = 0; kh < 3; ++kh) {
                    int ih = int(oh) * s - 1 + kh;
                    if (ih < 0 || ih >= H) continue;
                    for (int kw2 = 0; kw2 < 3; ++kw2) {
                        int iw = ow * s - 1 + kw2;
                        if (iw < 0 || iw >= W) continue;
                        const T* xi = &x.data[(size_t(ih) * W + iw) * Cin];
                        for (int co = 0; co < Cout; ++co) {
                            const T* kr = &p.kernel.data[((size_t(co) * Cin) * 3 + kh) * 3 + kw2];
                            T acc = T(0);
                            for (int ci = 0; ci < Cin; ++ci) acc += kr[size_t(ci) * 9] * xi[ci];
                            yo[co] += acc;
                        }
                    }
                }
            }
        });
        return y;
    }

    // transposed 3x3 stride-2, sized to exactly double: oh = 2*ih - 1 + kh
    const int Ho = 2 * H, Wo = 2 * W;
    Tensor<T> y({Ho, Wo, Cout});
    parallel_for(Ho, [&](int64_t oh) {
        for (int ow = 0; ow < Wo; ++ow) {
            T* yo = &y.data[(size_t(oh) * Wo + ow) * Cout];
            for (int co = 0; co < Cout; ++co) yo[co] = p.bias[co];
            for (int kh = 0; kh < 3; ++kh) {
                int th = int(oh) + 1 - kh;
                if (th < 0 || th % 2 != 0) continue;
                int ih = th / 2;
                if (ih >= H) continue;
                for (int kw2 = 0; kw2 < 3; ++kw2) {
                    int tw = ow + 1 - kw2;
                    if (tw < 0 || tw % 2 != 0) continue;
                    int iw = tw / 2;
                    if (iw >= W) continue;
                    const T* xi = &x.data[(size_t(ih) * W + iw) * Cin];
                    for (int co = 0; co < Cout; ++co) {
                        const T* kr = &p.kernel.data[((size_t(co) * Cin) * 3 + kh) * 3 + kw2];
                        T acc = T(0);
                        for (int ci = 0; ci < Cin; ++ci) acc += kr[size_t(ci) * 9] * xi[ci];
                        yo[co] += acc;
                    }
                }
            }
        }
    });
    return y;
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const ConvParams<T>& p,
                             const Tensor<T>& grad_out) {
    check_feature_map(x);
    check_feature_map(grad_out);
    p.validate();
    const int H = x.dim(0), W = x.dim(1), Cin = x.dim(2);
    const int Cout = p.out_channels();
    const int k = p.kernel_size();
    require(grad_out.dim(2) == Cout, Err::channel_mismatch, "grad_out channels");

    ConvGrads<T> g;
    g.input = Tensor<T>(x.shape);
    g.kernel = Tensor<T>(p.kernel.shape);
    g.bias = Tensor<T>(p.bias.shape);

    if (k == 1) {
        require(grad_out.dim(0) == H && grad_out.dim(1) == W, Err::shape_mismatch,
                "grad_out spatial dims");
        // input grads, parallel over rows
        parallel_for(H, [&](int64_t h) {
            for (int w = 0; w < W; ++w) {
                const T* go = &grad_out.data[(size_t(h) * W + w) * Cout];
                T* gi = &g.input.data[(size_t(h) * W + w) * Cin];
                for (int co = 0; co < Cout; ++co) {
                    const T* kr = &p.kernel.data[size_t(co) * Cin];
                    T gv = go[co];
                    for (int ci = 0; ci < Cin; ++ci) gi[ci] += gv * kr[ci];
                }
            }
        });
        // kernel/bias grads, parallel over out channels
        parallel_for(Cout, [&](int64_t co) {
            T* gk = &g.kernel.data[size_t(co) * Cin];
            T gb = T(0);
            for (int h = 0; h < H; ++h)
                for (int w = 0; w < W; ++w) {
                    const T* xi = &x.data[(size_t(h) * W + w) * Cin];
                    T gv = grad_out.data[(size_t(h) * W + w) * Cout + co];
                    gb += gv;
                    for (int ci = 0; ci < Cin; ++ci) gk[ci] += gv * xi[ci];
                }
            g.bias[co] = gb;
        });
        return g;
    }

    if (!p.transposed) {
        const int s = p.stride;
        const int Ho = grad_out.dim(0), Wo = grad_out.dim(1);
        require(Ho == (s == 2 ? H / 2 : H) && Wo == (s == 2 ? W / 2 : W),
                Err::shape_mismatch, "grad_out spatial dims");
        // gx gathered per input pixel: ih = oh*s - 1 + kh  =>  oh = (ih + 1 - kh)/s
        parallel_for(H, [&](int64_t ih) {
            for (int iw = 0; iw < W; ++iw) {
                T* gi = &g.input.data[(size_t(ih) * W + iw) * Cin];
                for (int kh = 0; kh < 3; ++kh) {
                    int th = int(ih) + 1 - kh;
                    if (th < 0 || th % s != 0) continue;
                    int oh = th / s;
                    if (oh >= Ho) continue;
                    for (int kw2 = 0; kw2 < 3; ++kw2) {
                        int tw = iw + 1 - kw2;
                        if (tw < 0 || tw % s != 0) continue;
                        int ow = tw / s;
                        if (ow >= Wo) continue;
                        const T* go = &grad_out.data[(size_t(oh) * Wo + ow) * Cout];
                        for (int co = 0; co < Cout; ++co) {
                            const T* kr = &p.kernel.data[((size_t(co) * Cin) * 3 + kh) * 3 + kw2];
                            T gv = go[co];
                            for (int ci = 0; ci < Cin; ++ci) gi[ci] += gv * kr[size_t(ci) * 9];
                        }
                    }
                }
            }
        });
        parallel_for(Cout, [&](int64_t co) {
            T gb = T(0);
            for (int oh = 0; oh < Ho; ++oh)
                for (int ow = 0; ow < Wo; ++ow) {
                    T gv = grad_out.data[(size_t(oh) * Wo + ow) * Cout + co];
                    gb += gv;
                    for (int kh = 0; kh < 3; ++kh) {
                        int ih = oh * s - 1 + kh;
                        if (ih < 0 || ih >= H) continue;
                        for (int kw2 = 0; kw2 < 3; ++kw2) {
                            int iw = ow * s - 1 + kw2;
                            if (iw < 0 || iw >= W) continue;
                            const T* xi = &x.data[(size_t(ih) * W + iw) * Cin];
                            T* gk = &g.kernel.data[((size_t(co) * Cin) * 3 + kh) * 3 + kw2];
                            for (int ci = 0; ci < Cin; ++ci) gk[size_t(ci) * 9] += gv * xi[ci];
                        }
                    }
                }
            g.bias[co] = gb;
        });
        return g;
    }

    // transposed: y[oh=2ih-1+kh][ow=2iw-1+kw]
    const int Ho = grad_out.dim(0), Wo = grad_out.dim(1);
    require(Ho == 2 * H && Wo == 2 * W, Err::shape_mismatch, "grad_out spatial dims");
    parallel_for(H, [&](int64_t ih) {
        for (int iw = 0; iw < W; ++iw) {
            T* gi = &g.input.data[(size_t(ih) * W + iw) * Cin];
            for (int kh = 0; kh < 3; ++kh) {
                int oh = 2 * int(ih) - 1 + kh;
                if (oh < 0 || oh >= Ho) continue;
                for (int kw2 = 0; kw2 < 3; ++kw2) {
                    int ow = 2 * iw - 1 + kw2;
                    if (ow < 0 || ow >= Wo) continue;
                    const T* go = &grad_out.data[(size_t(oh) * Wo + ow) * Cout];
                    for (int co = 0; co < Cout; ++co) {
                        const T* kr = &p.kernel.data[((size_t(co) * Cin) * 3 + kh) * 3 + kw2];
                        T gv = go[co];
                        for (int ci = 0; ci < Cin; ++ci) gi[ci] += gv * kr[size_t(ci) * 9];
                    }
                }
            }
        }
    });
    parallel_for(Cout, [&](int64_t co) {
        T gb = T(0);
        for (int oh = 0; oh < Ho; ++oh)
            for (int ow = 0; ow < Wo; ++ow)
                gb += grad_out.data[(size_t(oh) * Wo + ow) * Cout + co];
        g.bias[co] = gb;
        for (int ih = 0; ih < H; ++ih)
            for (int iw = 0; iw < W; ++iw) {
                const T* xi = &x.data[(size_t(ih) * W + iw) * Cin];
                for (int kh = 0; kh < 3; ++kh) {
                    int oh = 2 * ih - 1 + kh;
                    if (oh < 0 || oh >= Ho) continue;
                    for (int kw2 = 0; kw2 < 3; ++kw2) {
                        int ow = 2 * iw - 1 + kw2;
                        if (ow < 0 || ow >= Wo) continue;
                        T gv = grad_out.data[(size_t(oh) * Wo + ow) * Cout + co];
                        T* gk = &g.kernel.data[((size_t(co) * Cin) * 3 + kh) * 3 + kw2];
                        for (int ci = 0; ci < Cin; ++ci) gk[size_t(ci) * 9] += gv * xi[ci];
                    }
                }
            }
    });
    return g;
}

// ---------------------------------------------------------------------------
// linear
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
    require(x.rank() >= 1, Err::shape_mismatch, "linear input rank");
    const int in = x.dim(x.rank() - 1);
    require(weight.rank() == 2 && weight.dim(1) == in, Err::shape_mismatch,
            "linear weight must be {out, in}");
    const int out = weight.dim(0);
    require(bias.rank() == 1 && bias.dim(0) == out, Err::shape_mismatch, "linear bias");
    const int64_t rows = x.numel() / in;

    std::vector<int> out_shape = x.shape;
    out_shape.back() = out;
    Tensor<T> y(out_shape);
    parallel_for(rows, [&](int64_t r) {
        const T* xi = &x.data[size_t(r) * in];
        T* yo = &y.data[size_t(r) * out];
        for (int o = 0; o < out; ++o) {
            const T* wr = &weight.data[size_t(o) * in];
            T acc = bias[o];
            for (int i = 0; i < in; ++i) acc += wr[i] * xi[i];
            yo[o] = acc;
        }
    });
    return y;
}

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& x, const Tensor<T>& weight,
                               const Tensor<T>& grad_out) {
    const int in = x.dim(x.rank() - 1);
    const int out = weight.dim(0);
    require(grad_out.dim(grad_out.rank() - 1) == out, Err::shape_mismatch,
            "linear grad_out channels");
    const int64_t rows = x.numel() / in;
    require(grad_out.numel() / out == rows, Err::shape_mismatch, "linear grad_out rows");

    LinearGrads<T> g;
    g.input = Tensor<T>(x.shape);
    g.weight = Tensor<T>(weight.shape);
    g.bias = Tensor<T>({out});

    parallel_for(rows, [&](int64_t r) {
        const T* go = &grad_out.data[size_t(r) * out];
        T* gi = &g.input.data[size_t(r) * in];
        for (int o = 0; o < out; ++o) {
            const T* wr = &weight.data[size_t(o) * in];
            T gv = go[o];
            for (int i = 0; i < in; ++i) gi[i] += gv * wr[i];
        }
    });
    parallel_for(out, [&](int64_t o) {
        T* gw = &g.weight.data[size_t(o) * in];
        T gb = T(0);
        for (int64_t r = 0; r < rows; ++r) {
            T gv = grad_out.data[size_t(r) * out + o];
            gb += gv;
            const T* xi = &x.data[size_t(r) * in];
            for (int i = 0; i < in; ++i) gw[i] += gv * xi[i];
        }
        g.bias[o] = gb;
    });
    return g;
}

// ---------------------------------------------------------------------------
// layer norm
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const LayerNormParams<T>& p) {
    const int ch = x.dim(x.rank() - 1);
    require(p.gamma.rank() == 1 && p.gamma.dim(0) == ch && p.beta.dim(0) == ch,
            Err::shape_mismatch, "layer norm params");
    const int64_t rows = x.numel() / ch;
    Tensor<T> y(x.shape);
    parallel_for(rows, [&](int64_t r) {
        const T* xi = &x.data[size_t(r) * ch];
        T* yo = &y.data[size_t(r) * ch];
        double mean = 0.0;
        for (int c = 0; c < ch; ++c) mean += double(xi[c]);
        mean /= ch;
        double var = 0.0;
        for (int c = 0; c < ch; ++c) {
            double d = double(xi[c]) - mean;
            var += d * d;
        }
        var /= ch;
        double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        for (int c = 0; c < ch; ++c)
            yo[c] = p.gamma[c] * T((double(xi[c]) - mean) * inv) + p.beta[c];
    });
    return y;
}

template <typename T>
LayerNormGrads<T> layer_norm_backward(const Tensor<T>& x, const LayerNormParams<T>& p,
                                      const Tensor<T>& grad_out) {
    require(x.same_shape(grad_out), Err::shape_mismatch, "layer norm grad shapes");
    const int ch = x.dim(x.rank() - 1);
    const int64_t rows = x.numel() / ch;

    LayerNormGrads<T> g;
    g.input = Tensor<T>(x.shape);
    g.gamma = Tensor<T>(p.gamma.shape);
    g.beta = Tensor<T>(p.beta.shape);

    // per-row input grads; gamma/beta accumulated per-row into thread-safe
    // partials would complicate things, so accumulate serially afterwards.
    std::vector<double> xhat(static_cast<size_t>(x.numel()));
    parallel_for(rows, [&](int64_t r) {
        const T* xi = &x.data[size_t(r) * ch];
        const T* go = &grad_out.data[size_t(r) * ch];
        T* gi = &g.input.data[size_t(r) * ch];
        double mean = 0.0;
        for (int c = 0; c < ch; ++c) mean += double(xi[c]);
        mean /= ch;
        double var = 0.0;
        for (int c = 0; c < ch; ++c) {
            double d = double(xi[c]) - mean;
            var += d * d;
        }
        var /= ch;
        double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        double* xh = &xhat[size_t(r) * ch];
        for (int c = 0; c < ch; ++c) xh[c] = (double(xi[c]) - mean) * inv;

        double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
        for (int c = 0; c < ch; ++c) {
            double dxh = double(go[c]) * double(p.gamma[c]);
            mean_dxhat += dxh;
            mean_dxhat_xhat += dxh * xh[c];
        }
        mean_dxhat /= ch;
        mean_dxhat_xhat /= ch;
        for (int c = 0; c < ch; ++c) {
            double dxh = double(go[c]) * double(p.gamma[c]);
            gi[c] = T(inv * (dxh - mean_dxhat - xh[c] * mean_dxhat_xhat));
        }
    });
    for (int64_t r = 0; r < rows; ++r) {
        const T* go = &grad_out.data[size_t(r) * ch];
        const double* xh = &xhat[size_t(r) * ch];
        for (int c = 0; c < ch; ++c) {
            g.gamma[c] += go[c] * T(xh[c]);
            g.beta[c] += go[c];
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// window partition / reverse
// ---------------------------------------------------------------------------

template <typename T>
std::vector<Tensor<T>> window_partition(const Tensor<T>& x, int window, int shift) {
    check_feature_map(x);
    const int H = x.dim(0), W = x.dim(1), C = x.dim(2);
    require(window >= 1 && H % window == 0 && W % window == 0, Err::indivisible,
            "spatial dims must be divisible by the window size");
    require(shift == 0 || shift == window / 2, Err::invalid_argument,
            "shift must be 0 or window/2");

    Tensor<T> xs = roll2d(x, shift);
    const int ny = H / window, nx = W / window;
    std::vector<Tensor<T>> wins;
    wins.reserve(size_t(ny) * nx);
    for (int wy = 0; wy < ny; ++wy)
        for (int wx = 0; wx < nx; ++wx) {
            Tensor<T> win({window * window, C});
            for (int ty = 0; ty < window; ++ty)
                for (int tx = 0; tx < window; ++tx) {
                    const T* src = &xs.data[((size_t(wy) * window + ty) * W +
                                             size_t(wx) * window + tx) * C];
                    T* dst = &win.data[(size_t(ty) * window + tx) * C];
                    for (int c = 0; c < C; ++c) dst[c] = src[c];
                }
            wins.push_back(std::move(win));
        }
    return wins;
}

template <typename T>
Tensor<T> window_reverse(const std::vector<Tensor<T>>& windows, int height, int width,
                         int window, int shift) {
    require(!windows.empty(), Err::empty_input, "no windows to merge");
    const int C = windows.front().dim(1);
    const int ny = height / window, nx = width / window;
    require(int64_t(windows.size()) == int64_t(ny) * nx, Err::shape_mismatch,
            "window count does not match dims");
    Tensor<T> xs({height, width, C});
    for (int wy = 0; wy < ny; ++wy)
        for (int wx = 0; wx < nx; ++wx) {
            const Tensor<T>& win = windows[size_t(wy) * nx + wx];
            require(win.dim(0) == window * window && win.dim(1) == C, Err::shape_mismatch,
                    "window tensor shape");
            for (int ty = 0; ty < window; ++ty)
                for (int tx = 0; tx < window; ++tx) {
                    const T* src = &win.data[(size_t(ty) * window + tx) * C];
                    T* dst = &xs.data[((size_t(wy) * window + ty) * width +
                                       size_t(wx) * window + tx) * C];
                    for (int c = 0; c < C; ++c) dst[c] = src[c];
                }
        }
    return roll2d(xs, -shift);
}

// ---------------------------------------------------------------------------
// window attention
// ---------------------------------------------------------------------------

namespace {

// Region id in the shifted frame; token pairs from different regions must not
// attend to each other when shift > 0.
inline int region_id(int t, int size, int window, int shift) {
    if (t < size - window) return 0;
    if (t < size - shift) return 1;
    return 2;
}

struct WinGeom {
    int H, W, C, window, shift, heads, head_dim, ny, nx, tokens;
};

template <typename T>
WinGeom win_geometry(const Tensor<T>& x, const AttentionParams<T>& p, int shift) {
    WinGeom g;
    g.H = x.dim(0);
    g.W = x.dim(1);
    g.C = x.dim(2);
    g.window = p.window;
    g.shift = shift;
    g.heads = p.heads;
    g.head_dim = g.C / p.heads;
    require(g.C == p.channels(), Err::channel_mismatch, "attention channel mismatch");
    require(g.H % g.window == 0 && g.W % g.window == 0, Err::indivisible,
            "spatial dims must be divisible by the window size");
    require(shift == 0 || shift == g.window / 2, Err::invalid_argument,
            "shift must be 0 or window/2");
    g.ny = g.H / g.window;
    g.nx = g.W / g.window;
    g.tokens = g.window * g.window;
    return g;
}

}  // namespace

template <typename T>
Tensor<T> window_attention_forward(const Tensor<T>& x, const AttentionParams<T>& p,
                                   int shift, AttentionCache<T>* cache) {
    check_feature_map(x);
    p.validate();
    WinGeom g = win_geometry(x, p, shift);
    const int M = g.tokens, C = g.C, w = g.window, hd = g.head_dim;
    const T inv_sqrt_d = T(1.0 / std::sqrt(double(hd)));
    const int span = 2 * w - 1;

    Tensor<T> xs = roll2d(x, shift);
    Tensor<T> qkv = linear(xs, p.qkv_weight, p.qkv_bias);  // {H, W, 3C}

    Tensor<T> merged({g.H, g.W, C});
    std::vector<Tensor<T>> attn_store;
    if (cache) attn_store.assign(size_t(g.ny) * g.nx, Tensor<T>());

    parallel_for(int64_t(g.ny) * g.nx, [&](int64_t widx) {
        const int wy = int(widx) / g.nx;
        const int wx = int(widx) % g.nx;
        Tensor<T> attn({g.heads, M, M});

        // token -> flat offset of its pixel in qkv / merged
        std::vector<size_t> tok_off(static_cast<size_t>(M));
        for (int ty = 0; ty < w; ++ty)
            for (int tx = 0; tx < w; ++tx)
                tok_off[size_t(ty) * w + tx] =
                    (size_t(wy * w + ty) * g.W + size_t(wx * w + tx));

        // region ids for masking
        std::vector<int> region(static_cast<size_t>(M), 0);
        if (shift > 0) {
            for (int ty = 0; ty < w; ++ty)
                for (int tx = 0; tx < w; ++tx) {
                    int gh = wy * w + ty, gw = wx * w + tx;
                    region[size_t(ty) * w + tx] =
                        3 * region_id(gh, g.H, w, shift) + region_id(gw, g.W, w, shift);
                }
        }

        for (int h = 0; h < g.heads; ++h) {
            const int qo = h * hd, ko = C + h * hd, vo = 2 * C + h * hd;
            T* A = &attn.data[size_t(h) * M * M];
            for (int i = 0; i < M; ++i) {
                const T* qi = &qkv.data[tok_off[size_t(i)] * 3 * C + qo];
                T* row = A + size_t(i) * M;
                T row_max = T(-1e30);
                for (int j = 0; j < M; ++j) {
                    const T* kj = &qkv.data[tok_off[size_t(j)] * 3 * C + ko];
                    T s = T(0);
                    for (int d = 0; d < hd; ++d) s += qi[d] * kj[d];
                    s *= inv_sqrt_d;
                    if (p.use_rel_bias) {
                        int dy = i / w - j / w + w - 1;
                        int dx = i % w - j % w + w - 1;
                        s += p.rel_bias.at(dy * span + dx, h);
                    }
                    if (shift > 0 && region[size_t(i)] != region[size_t(j)])
                        s += T(kAttentionMask);
                    row[j] = s;
                    if (s > row_max) row_max = s;
                }
                // softmax
                T sum = T(0);
                for (int j = 0; j < M; ++j) {
                    row[j] = std::exp(row[j] - row_max);
                    sum += row[j];
                }
                T inv_sum = T(1) / sum;
                for (int j = 0; j < M; ++j) row[j] *= inv_sum;
                // weighted sum of values
                T* out = &merged.data[tok_off[size_t(i)] * C + h * hd];
                for (int d = 0; d < hd; ++d) out[d] = T(0);
                for (int j = 0; j < M; ++j) {
                    const T* vj = &qkv.data[tok_off[size_t(j)] * 3 * C + vo];
                    T a = row[j];
                    for (int d = 0; d < hd; ++d) out[d] += a * vj[d];
                }
            }
        }
        if (cache) attn_store[size_t(widx)] = std::move(attn);
    });

    Tensor<T> projected = linear(merged, p.proj_weight, p.proj_bias);
    Tensor<T> y = roll2d(projected, -shift);

    if (cache) {
        cache->shifted_input = std::move(xs);
        cache->qkv = std::move(qkv);
        cache->attn = std::move(attn_store);
        cache->merged = std::move(merged);
    }
    return y;
}

template <typename T>
Tensor<T> window_attention(const Tensor<T>& x, const AttentionParams<T>& p, int shift) {
    return window_attention_forward(x, p, shift);
}

template <typename T>
AttentionGrads<T> window_attention_backward(const AttentionCache<T>& cache,
                                            const AttentionParams<T>& p, int shift,
                                            const Tensor<T>& grad_out) {
    WinGeom g = win_geometry(cache.shifted_input, p, shift);
    const int M = g.tokens, C = g.C, w = g.window, hd = g.head_dim;
    const T inv_sqrt_d = T(1.0 / std::sqrt(double(hd)));
    const int span = 2 * w - 1;

    AttentionGrads<T> out;
    out.params = zero_grads_like(p);

    // y = roll(proj(merged), -shift)  =>  g_proj_out = roll(gy, +shift)
    Tensor<T> g_proj_out = roll2d(grad_out, shift);
    LinearGrads<T> proj_g = linear_backward(cache.merged, p.proj_weight, g_proj_out);
    out.params.proj_weight = std::move(proj_g.weight);
    out.params.proj_bias = std::move(proj_g.bias);
    Tensor<T>& g_merged = proj_g.input;

    Tensor<T> g_qkv(cache.qkv.shape);
    const int64_t nwin = int64_t(g.ny) * g.nx;
    std::vector<Tensor<T>> rel_partials(static_cast<size_t>(nwin));

    parallel_for(nwin, [&](int64_t widx) {
        const int wy = int(widx) / g.nx;
        const int wx = int(widx) % g.nx;
        const Tensor<T>& attn = cache.attn[size_t(widx)];
        Tensor<T> rel_part(p.rel_bias.shape);

        std::vector<size_t> tok_off(static_cast<size_t>(M));
        for (int ty = 0; ty < w; ++ty)
            for (int tx = 0; tx < w; ++tx)
                tok_off[size_t(ty) * w + tx] =
                    (size_t(wy * w + ty) * g.W + size_t(wx * w + tx));

        std::vector<T> gS(static_cast<size_t>(M) * M);
        for (int h = 0; h < g.heads; ++h) {
            const int qo = h * hd, ko = C + h * hd, vo = 2 * C + h * hd;
            const T* A = &attn.data[size_t(h) * M * M];

            // dA and dV
            for (int i = 0; i < M; ++i) {
                const T* go = &g_merged.data[tok_off[size_t(i)] * C + h * hd];
                const T* Ai = A + size_t(i) * M;
                T* gSi = gS.data() + size_t(i) * M;
                // gV[j] += A[i][j] * gO[i]
                for (int j = 0; j < M; ++j) {
                    T* gv = &g_qkv.data[tok_off[size_t(j)] * 3 * C + vo];
                    T a = Ai[j];
                    for (int d = 0; d < hd; ++d) gv[d] += a * go[d];
                }
                // gA[i][j] = dot(gO[i], V[j]); then softmax backward in place
                T dot_sum = T(0);
                for (int j = 0; j < M; ++j) {
                    const T* vj = &cache.qkv.data[tok_off[size_t(j)] * 3 * C + vo];
                    T ga = T(0);
                    for (int d = 0; d < hd; ++d) ga += go[d] * vj[d];
                    gSi[j] = ga;
                    dot_sum += ga * Ai[j];
                }
                for (int j = 0; j < M; ++j) gSi[j] = Ai[j] * (gSi[j] - dot_sum);
            }

            // bias table grads and gQ/gK
            for (int i = 0; i < M; ++i) {
                const T* gSi = gS.data() + size_t(i) * M;
                T* gq = &g_qkv.data[tok_off[size_t(i)] * 3 * C + qo];
                for (int j = 0; j < M; ++j) {
                    T gs = gSi[j];
                    if (p.use_rel_bias) {
                        int dy = i / w - j / w + w - 1;
                        int dx = i % w - j % w + w - 1;
                        rel_part.at(dy * span + dx, h) += gs;
                    }
                    const T* kj = &cache.qkv.data[tok_off[size_t(j)] * 3 * C + ko];
                    const T* qi = &cache.qkv.data[tok_off[size_t(i)] * 3 * C + qo];
                    T* gk = &g_qkv.data[tok_off[size_t(j)] * 3 * C + ko];
                    T gs_scaled = gs * inv_sqrt_d;
                    for (int d = 0; d < hd; ++d) {
                        gq[d] += gs_scaled * kj[d];
                        gk[d] += gs_scaled * qi[d];
                    }
                }
            }
        }
        rel_partials[size_t(widx)] = std::move(rel_part);
    });

    if (p.use_rel_bias) {
        // deterministic reduction in window order
        for (const Tensor<T>& part : rel_partials)
            for (int64_t i = 0; i < part.numel(); ++i) out.params.rel_bias[i] += part[i];
    }

    LinearGrads<T> qkv_g = linear_backward(cache.shifted_input, p.qkv_weight, g_qkv);
    out.params.qkv_weight = std::move(qkv_g.weight);
    out.params.qkv_bias = std::move(qkv_g.bias);
    out.input = roll2d(qkv_g.input, -shift);
    return out;
}

// ---------------------------------------------------------------------------
// STL
// ---------------------------------------------------------------------------

namespace {

template <typename T>
Tensor<T> mlp_forward(const Tensor<T>& x, const MlpParams<T>& p, MlpCache<T>* cache) {
    Tensor<T> pre = linear(x, p.w1, p.b1);
    Tensor<T> act = gelu(pre);
    Tensor<T> y = linear(act, p.w2, p.b2);
    if (cache) {
        cache->input = x;
        cache->hidden_pre = std::move(pre);
        cache->hidden_act = std::move(act);
    }
    return y;
}

template <typename T>
struct MlpGrads {
    Tensor<T> input;
    MlpParams<T> params;
};

template <typename T>
MlpGrads<T> mlp_backward(const MlpCache<T>& cache, const MlpParams<T>& p,
                         const Tensor<T>& grad_out) {
    MlpGrads<T> g;
    LinearGrads<T> g2 = linear_backward(cache.hidden_act, p.w2, grad_out);
    Tensor<T> g_pre = gelu_backward(cache.hidden_pre, g2.input);
    LinearGrads<T> g1 = linear_backward(cache.input, p.w1, g_pre);
    g.params.w2 = std::move(g2.weight);
    g.params.b2 = std::move(g2.bias);
    g.params.w1 = std::move(g1.weight);
    g.params.b1 = std::move(g1.bias);
    g.input = std::move(g1.input);
    return g;
}

template <typename T>
void add_inplace(Tensor<T>& dst, const Tensor<T>& src) {
    require(dst.same_shape(src), Err::shape_mismatch, "residual add shapes");
    for (int64_t i = 0; i < dst.numel(); ++i) dst[i] += src[i];
}

}  // namespace

template <typename T>
Tensor<T> stl_forward(const Tensor<T>& x, const StlParams<T>& p, StlCache<T>* cache) {
    const int shift = p.swa.window / 2;

    Tensor<T> x0 = x;
    Tensor<T> a = window_attention_forward(layer_norm(x0, p.ln1), p.wa, 0,
                                           cache ? &cache->wa : nullptr);
    add_inplace(a, x0);  // x1 = x0 + WA(LN(x0))

    Tensor<T> x1 = a;
    Tensor<T> m = mlp_forward(layer_norm(x1, p.ln2), p.mlp1, cache ? &cache->mlp1 : nullptr);
    add_inplace(m, x1);  // x2 = x1 + MLP(LN(x1))

    Tensor<T> x2 = m;
    Tensor<T> s = window_attention_forward(layer_norm(x2, p.ln3), p.swa, shift,
                                           cache ? &cache->swa : nullptr);
    add_inplace(s, x2);  // x3 = x2 + SWA(LN(x2))

    Tensor<T> x3 = s;
    Tensor<T> m2 = mlp_forward(layer_norm(x3, p.ln4), p.mlp2, cache ? &cache->mlp2 : nullptr);
    add_inplace(m2, x3);  // y = x3 + MLP(LN(x3))

    if (cache) {
        cache->x0 = std::move(x0);
        cache->x1 = std::move(x1);
        cache->x2 = std::move(x2);
        cache->x3 = std::move(x3);
    }
    return m2;
}

template <typename T>
Tensor<T> stl_apply(const Tensor<T>& x, const StlParams<T>& p) {
    return stl_forward(x, p);
}

template <typename T>
StlGrads<T> stl_backward(const StlCache<T>& cache, const StlParams<T>& p,
                         const Tensor<T>& grad_out) {
    const int shift = p.swa.window / 2;
    StlGrads<T> g;
    g.params = zero_grads_like(p);

    // y = x3 + MLP2(LN4(x3))
    Tensor<T> gx3 = grad_out;
    {
        MlpGrads<T> mg = mlp_backward(cache.mlp2, p.mlp2, grad_out);
        g.params.mlp2 = std::move(mg.params);
        LayerNormGrads<T> lg = layer_norm_backward(cache.x3, p.ln4, mg.input);
        g.params.ln4.gamma = std::move(lg.gamma);
        g.params.ln4.beta = std::move(lg.beta);
        add_inplace(gx3, lg.input);
    }
    // x3 = x2 + SWA(LN3(x2))
    Tensor<T> gx2 = gx3;
    {
        AttentionGrads<T> ag = window_attention_backward(cache.swa, p.swa, shift, gx3);
        g.params.swa = std::move(ag.params);
        LayerNormGrads<T> lg = layer_norm_backward(cache.x2, p.ln3, ag.input);
        g.params.ln3.gamma = std::move(lg.gamma);
        g.params.ln3.beta = std::move(lg.beta);
        add_inplace(gx2, lg.input);
    }
    // x2 = x1 + MLP1(LN2(x1))
    Tensor<T> gx1 = gx2;
    {
        MlpGrads<T> mg = mlp_backward(cache.mlp1, p.mlp1, gx2);
        g.params.mlp1 = std::move(mg.params);
        LayerNormGrads<T> lg = layer_norm_backward(cache.x1, p.ln2, mg.input);
        g.params.ln2.gamma = std::move(lg.gamma);
        g.params.ln2.beta = std::move(lg.beta);
        add_inplace(gx1, lg.input);
    }
    // x1 = x0 + WA(LN1(x0))
    Tensor<T> gx0 = gx1;
    {
        AttentionGrads<T> ag = window_attention_backward(cache.wa, p.wa, 0, gx1);
        g.params.wa = std::move(ag.params);
        LayerNormGrads<T> lg = layer_norm_backward(cache.x0, p.ln1, ag.input);
        g.params.ln1.gamma = std::move(lg.gamma);
        g.params.ln1.beta = std::move(lg.beta);
        add_inplace(gx0, lg.input);
    }
    g.input = std::move(gx0);
    return g;
}

// ---------------------------------------------------------------------------
// RSTB
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> rstb_forward(const Tensor<T>& x, const RstbParams<T>& p, RstbCache<T>* cache) {
    require(p.fe.out_channels() == p.fe.in_channels() &&
                p.fu.out_channels() == p.fu.in_channels(),
            Err::channel_mismatch, "FE/FU must preserve channel count");
    if (cache) cache->stls.resize(p.stls.size());

    Tensor<T> h = conv2d(x, p.fe);
    if (cache) cache->fe_out = h;
    for (size_t i = 0; i < p.stls.size(); ++i)
        h = stl_forward(h, p.stls[i], cache ? &cache->stls[i] : nullptr);
    if (cache) cache->stl_out = h;
    Tensor<T> y = conv2d(h, p.fu);
    add_inplace(y, x);
    if (cache) cache->input = x;
    return y;
}

template <typename T>
Tensor<T> rstb_apply(const Tensor<T>& x, const RstbParams<T>& p) {
    return rstb_forward(x, p);
}

template <typename T>
RstbGrads<T> rstb_backward(const RstbCache<T>& cache, const RstbParams<T>& p,
                           const Tensor<T>& grad_out) {
    RstbGrads<T> g;
    g.params = zero_grads_like(p);

    ConvGrads<T> fu_g = conv2d_backward(cache.stl_out, p.fu, grad_out);
    g.params.fu.kernel = std::move(fu_g.kernel);
    g.params.fu.bias = std::move(fu_g.bias);

    Tensor<T> gh = std::move(fu_g.input);
    for (size_t i = p.stls.size(); i-- > 0;) {
        StlGrads<T> sg = stl_backward(cache.stls[i], p.stls[i], gh);
        g.params.stls[i] = std::move(sg.params);
        gh = std::move(sg.input);
    }

    ConvGrads<T> fe_g = conv2d_backward(cache.input, p.fe, gh);
    g.params.fe.kernel = std::move(fe_g.kernel);
    g.params.fe.bias = std::move(fe_g.bias);

    g.input = std::move(fe_g.input);
    add_inplace(g.input, grad_out);  // outer residual
    return g;
}

// ---------------------------------------------------------------------------
// gradient holders
// ---------------------------------------------------------------------------

template <typename T>
ConvParams<T> zero_grads_like(const ConvParams<T>& p) {
    ConvParams<T> g;
    g.kernel = Tensor<T>(p.kernel.shape);
    g.bias = Tensor<T>(p.bias.shape);
    g.stride = p.stride;
    g.transposed = p.transposed;
    return g;
}

template <typename T>
AttentionParams<T> zero_grads_like(const AttentionParams<T>& p) {
    AttentionParams<T> g;
    g.qkv_weight = Tensor<T>(p.qkv_weight.shape);
    g.qkv_bias = Tensor<T>(p.qkv_bias.shape);
    g.proj_weight = Tensor<T>(p.proj_weight.shape);
    g.proj_bias = Tensor<T>(p.proj_bias.shape);
    g.rel_bias = Tensor<T>(p.rel_bias.shape);
    g.heads = p.heads;
    g.window = p.window;
    g.use_rel_bias = p.use_rel_bias;
    return g;
}

template <typename T>
MlpParams<T> zero_grads_like(const MlpParams<T>& p) {
    MlpParams<T> g;
    g.w1 = Tensor<T>(p.w1.shape);
    g.b1 = Tensor<T>(p.b1.shape);
    g.w2 = Tensor<T>(p.w2.shape);
    g.b2 = Tensor<T>(p.b2.shape);
    return g;
}

template <typename T>
LayerNormParams<T> zero_grads_like(const LayerNormParams<T>& p) {
    LayerNormParams<T> g;
    g.gamma = Tensor<T>(p.gamma.shape);
    g.beta = Tensor<T>(p.beta.shape);
    return g;
}

template <typename T>
StlParams<T> zero_grads_like(const StlParams<T>& p) {
    StlParams<T> g;
    g.ln1 = zero_grads_like(p.ln1);
    g.ln2 = zero_grads_like(p.ln2);
    g.ln3 = zero_grads_like(p.ln3);
    g.ln4 = zero_grads_like(p.ln4);
    g.wa = zero_grads_like(p.wa);
    g.swa = zero_grads_like(p.swa);
    g.mlp1 = zero_grads_like(p.mlp1);
    g.mlp2 = zero_grads_like(p.mlp2);
    return g;
}

template <typename T>
RstbParams<T> zero_grads_like(const RstbParams<T>& p) {
    RstbParams<T> g;
    g.fe = zero_grads_like(p.fe);
    g.stls.reserve(p.stls.size());
    for (const auto& s : p.stls) g.stls.push_back(zero_grads_like(s));
    g.fu = zero_grads_like(p.fu);
    return g;
}

// ---------------------------------------------------------------------------
// explicit instantiation for float and double
// ---------------------------------------------------------------------------

#define HYCASS_INSTANTIATE_NN(T)                                                          \
    template struct ConvParams<T>;                                                        \
    template struct AttentionParams<T>;                                                   \
    template Tensor<T> leaky_relu<T>(const Tensor<T>&, T);                                \
    template Tensor<T> leaky_relu_backward<T>(const Tensor<T>&, T, const Tensor<T>&);     \
    template Tensor<T> sigmoid<T>(const Tensor<T>&);                                      \
    template Tensor<T> sigmoid_backward<T>(const Tensor<T>&, const Tensor<T>&);           \
    template Tensor<T> gelu<T>(const Tensor<T>&);                                         \
    template Tensor<T> gelu_backward<T>(const Tensor<T>&, const Tensor<T>&);              \
    template Tensor<T> conv2d<T>(const Tensor<T>&, const ConvParams<T>&);                 \
    template ConvGrads<T> conv2d_backward<T>(const Tensor<T>&, const ConvParams<T>&,      \
                                             const Tensor<T>&);                           \
    template Tensor<T> linear<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);   \
    template LinearGrads<T> linear_backward<T>(const Tensor<T>&, const Tensor<T>&,        \
                                               const Tensor<T>&);                         \
    template Tensor<T> layer_norm<T>(const Tensor<T>&, const LayerNormParams<T>&);        \
    template LayerNormGrads<T> layer_norm_backward<T>(                                    \
        const Tensor<T>&, const LayerNormParams<T>&, const Tensor<T>&);                   \
    template std::vector<Tensor<T>> window_partition<T>(const Tensor<T>&, int, int);      \
    template Tensor<T> window_reverse<T>(const std::vector<Tensor<T>>&, int, int, int,    \
                                         int);                                            \
    template Tensor<T> window_attention_forward<T>(                                       \
        const Tensor<T>&, const AttentionParams<T>&, int, AttentionCache<T>*);            \
    template Tensor<T> window_attention<T>(const Tensor<T>&, const AttentionParams<T>&,   \
                                           int);                                          \
    template AttentionGrads<T> window_attention_backward<T>(                              \
        const AttentionCache<T>&, const AttentionParams<T>&, int, const Tensor<T>&);      \
    template Tensor<T> stl_forward<T>(const Tensor<T>&, const StlParams<T>&,              \
                                      StlCache<T>*);                                      \
    template Tensor<T> stl_apply<T>(const Tensor<T>&, const StlParams<T>&);               \
    template StlGrads<T> stl_backward<T>(const StlCache<T>&, const StlParams<T>&,         \
                                         const Tensor<T>&);                               \
    template Tensor<T> rstb_forward<T>(const Tensor<T>&, const RstbParams<T>&,            \
                                       RstbCache<T>*);                                    \
    template Tensor<T> rstb_apply<T>(const Tensor<T>&, const RstbParams<T>&);             \
    template RstbGrads<T> rstb_backward<T>(const RstbCache<T>&, const RstbParams<T>&,     \
                                           const Tensor<T>&);                             \
    template ConvParams<T> zero_grads_like<T>(const ConvParams<T>&);                      \
    template AttentionParams<T> zero_grads_like<T>(const AttentionParams<T>&);            \
    template MlpParams<T> zero_grads_like<T>(const MlpParams<T>&);                        \
    template LayerNormParams<T> zero_grads_like<T>(const LayerNormParams<T>&);            \
    template StlParams<T> zero_grads_like<T>(const StlParams<T>&);                        \
    template RstbParams<T> zero_grads_like<T>(const RstbParams<T>&);

HYCASS_INSTANTIATE_NN(float)
HYCASS_INSTANTIATE_NN(double)

#undef HYCASS_INSTANTIATE_NN

}  // namespace hycass
