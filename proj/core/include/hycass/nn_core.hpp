#pragma once

#include <vector>

#include "hycass/tensor.hpp"

namespace hycass {

// ---------------------------------------------------------------------------
// Parameter structures. The same structs double as gradient holders: a
// gradient bundle has identical shapes with the hyperparameter fields copied.
// ---------------------------------------------------------------------------

/// 2-D convolution. kernel {out, in, k, k}; k in {1,3}; stride in {1,2}.
/// k=3 uses symmetric padding 1. transposed stride-2 doubles H and W exactly.
template <typename T>
struct ConvParams {
    Tensor<T> kernel;  // {out, in, k, k}
    Tensor<T> bias;    // {out}
    int stride = 1;
    bool transposed = false;

    int out_channels() const { return kernel.dim(0); }
    int in_channels() const { return kernel.dim(1); }
    int kernel_size() const { return kernel.dim(2); }
    void validate() const;
};

template <typename T>
struct LayerNormParams {
    Tensor<T> gamma;  // {ch}
    Tensor<T> beta;   // {ch}
};

/// Windowed multi-head self-attention with relative position bias.
template <typename T>
struct AttentionParams {
    Tensor<T> qkv_weight;   // {3*ch, ch}
    Tensor<T> qkv_bias;     // {3*ch}
    Tensor<T> proj_weight;  // {ch, ch}
    Tensor<T> proj_bias;    // {ch}
    Tensor<T> rel_bias;     // {(2w-1)^2, heads}
    int heads = 1;
    int window = 8;
    bool use_rel_bias = true;

    int channels() const { return proj_weight.dim(0); }
    void validate() const;
};

/// Token MLP: linear -> GELU -> linear.
template <typename T>
struct MlpParams {
    Tensor<T> w1;  // {hidden, ch}
    Tensor<T> b1;  // {hidden}
    Tensor<T> w2;  // {ch, hidden}
    Tensor<T> b2;  // {ch}
};

/// Swin transformer layer: two pre-norm residual attention+MLP pairs,
/// plain windows first, shifted windows second.
template <typename T>
struct StlParams {
    LayerNormParams<T> ln1, ln2, ln3, ln4;
    AttentionParams<T> wa;   // shift 0
    AttentionParams<T> swa;  // shift window/2
    MlpParams<T> mlp1, mlp2;
};

/// Residual Swin transformer block: x + FU(STL...(FE(x))), FE/FU 1x1 convs.
template <typename T>
struct RstbParams {
    ConvParams<T> fe;
    std::vector<StlParams<T>> stls;
    ConvParams<T> fu;
};

// ---------------------------------------------------------------------------
// Elementwise ops
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope);
/// grad wrt input given the pre-activation values.
template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& preact, T slope, const Tensor<T>& grad_out);

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);
/// grad wrt input given the forward output y = sigmoid(x).
template <typename T>
Tensor<T> sigmoid_backward(const Tensor<T>& output, const Tensor<T>& grad_out);

template <typename T>
Tensor<T> gelu(const Tensor<T>& x);
template <typename T>
Tensor<T> gelu_backward(const Tensor<T>& preact, const Tensor<T>& grad_out);

// ---------------------------------------------------------------------------
// Convolution
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const ConvParams<T>& p);

template <typename T>
struct ConvGrads {
    Tensor<T> input;
    Tensor<T> kernel;
    Tensor<T> bias;
};

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const ConvParams<T>& p,
                             const Tensor<T>& grad_out);

// ---------------------------------------------------------------------------
// Token linear layer (shared by MLP and attention projections). x {..., in}.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

template <typename T>
struct LinearGrads {
    Tensor<T> input, weight, bias;
};

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& x, const Tensor<T>& weight,
                               const Tensor<T>& grad_out);

// ---------------------------------------------------------------------------
// Layer normalization over the channel (last) axis, eps = 1e-5.
// ---------------------------------------------------------------------------

inline constexpr double kLayerNormEps = 1e-5;

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const LayerNormParams<T>& p);

template <typename T>
struct LayerNormGrads {
    Tensor<T> input, gamma, beta;
};

template <typename T>
LayerNormGrads<T> layer_norm_backward(const Tensor<T>& x, const LayerNormParams<T>& p,
                                      const Tensor<T>& grad_out);

// ---------------------------------------------------------------------------
// Window partitioning. Cyclic-shifts by (-shift, -shift), then tiles the map
// into w x w windows of w^2 tokens each ({w*w, ch} tensors, row-major both
// across windows and within a window). window_reverse is the exact inverse.
// ---------------------------------------------------------------------------

template <typename T>
std::vector<Tensor<T>> window_partition(const Tensor<T>& x, int window, int shift);

template <typename T>
Tensor<T> window_reverse(const std::vector<Tensor<T>>& windows, int height, int width,
                         int window, int shift);

// ---------------------------------------------------------------------------
// Windowed multi-head self-attention. For shift > 0 the window grid is
// cyclically shifted by window/2 and cross-region token pairs get -1e9 added
// to their logits before softmax.
// ---------------------------------------------------------------------------

inline constexpr double kAttentionMask = -1e9;

template <typename T>
struct AttentionCache {
    Tensor<T> shifted_input;         // {H, W, ch} after cyclic shift
    Tensor<T> qkv;                   // {H, W, 3*ch}
    std::vector<Tensor<T>> attn;     // per window {heads, M, M} softmax output
    Tensor<T> merged;                // {H, W, ch} pre-projection, still shifted
};

template <typename T>
Tensor<T> window_attention_forward(const Tensor<T>& x, const AttentionParams<T>& p,
                                   int shift, AttentionCache<T>* cache = nullptr);

template <typename T>
Tensor<T> window_attention(const Tensor<T>& x, const AttentionParams<T>& p, int shift);

template <typename T>
struct AttentionGrads {
    Tensor<T> input;
    AttentionParams<T> params;
};

template <typename T>
AttentionGrads<T> window_attention_backward(const AttentionCache<T>& cache,
                                            const AttentionParams<T>& p, int shift,
                                            const Tensor<T>& grad_out);

// ---------------------------------------------------------------------------
// STL and RSTB
// ---------------------------------------------------------------------------

template <typename T>
struct MlpCache {
    Tensor<T> input;       // post-LN tokens
    Tensor<T> hidden_pre;  // before GELU
    Tensor<T> hidden_act;  // after GELU
};

template <typename T>
struct StlCache {
    Tensor<T> x0, x1, x2, x3;  // residual branch inputs
    AttentionCache<T> wa, swa;
    MlpCache<T> mlp1, mlp2;
};

template <typename T>
Tensor<T> stl_forward(const Tensor<T>& x, const StlParams<T>& p, StlCache<T>* cache = nullptr);

template <typename T>
Tensor<T> stl_apply(const Tensor<T>& x, const StlParams<T>& p);

template <typename T>
struct StlGrads {
    Tensor<T> input;
    StlParams<T> params;
};

template <typename T>
StlGrads<T> stl_backward(const StlCache<T>& cache, const StlParams<T>& p,
                         const Tensor<T>& grad_out);

template <typename T>
struct RstbCache {
    Tensor<T> input;
    Tensor<T> fe_out;
    std::vector<StlCache<T>> stls;
    Tensor<T> stl_out;
};

template <typename T>
Tensor<T> rstb_forward(const Tensor<T>& x, const RstbParams<T>& p, RstbCache<T>* cache = nullptr);

template <typename T>
Tensor<T> rstb_apply(const Tensor<T>& x, const RstbParams<T>& p);

template <typename T>
struct RstbGrads {
    Tensor<T> input;
    RstbParams<T> params;
};

template <typename T>
RstbGrads<T> rstb_backward(const RstbCache<T>& cache, const RstbParams<T>& p,
                           const Tensor<T>& grad_out);

// ---------------------------------------------------------------------------
// Zero-filled gradient holders mirroring a parameter struct.
// ---------------------------------------------------------------------------

template <typename T>
ConvParams<T> zero_grads_like(const ConvParams<T>& p);
template <typename T>
AttentionParams<T> zero_grads_like(const AttentionParams<T>& p);
template <typename T>
MlpParams<T> zero_grads_like(const MlpParams<T>& p);
template <typename T>
LayerNormParams<T> zero_grads_like(const LayerNormParams<T>& p);
template <typename T>
StlParams<T> zero_grads_like(const StlParams<T>& p);
template <typename T>
RstbParams<T> zero_grads_like(const RstbParams<T>& p);

}  // namespace hycass
