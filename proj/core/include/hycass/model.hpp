#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hycass/digest.hpp"
#include "hycass/hsi_data.hpp"
#include "hycass/io_util.hpp"
#include "hycass/nn_core.hpp"

namespace hycass {

/// Architecture knobs; together with the band count these fully determine
/// model shape and compression ratio.
struct HycassConfig {
    int bands = 202;          // C, input spectral bands
    int features = 128;       // N, feature channels
    int latent_channels = 51; // Gamma; may exceed bands
    int stages = 0;           // S, spatial stages (0 = spectral-only model)
    int window = 8;           // attention window size
    int heads = 8;
    double mlp_ratio = 4.0;
    int stl_depth = 1;        // STLs per RSTB
    double leaky_slope = 0.01;
    bool rel_bias = true;

    int mlp_hidden() const;
    void validate() const;
    bool operator==(const HycassConfig&) const = default;
};

struct LatentInfo {
    int sigma = 0;   // H / 2^S
    int omega = 0;   // W / 2^S
    int gamma = 0;
};

struct CrBreakdown {
    double cr = 0.0;
    double cr_spec = 0.0;
    double cr_spat = 0.0;
};

/// CR = CR_spec * CR_spat = (C / Gamma) * 4^S.
CrBreakdown achieved_cr(const HycassConfig& cfg);

/// Smallest-error latent channel count for a target CR:
/// Gamma = max(1, round(C * 4^S / target)), ties away from zero.
int gamma_for_target_cr(int bands, int stages, double target_cr);

/// Rejects inputs whose dims break stride-2 downsampling or window tiling.
void validate_input_dims(const HycassConfig& cfg, int height, int width);

LatentInfo latent_shape(const HycassConfig& cfg, int height, int width);

/// One spatial stage: an RSTB paired with a stride-2 resampling convolution.
/// Encoder stages run RSTB first then downsample; decoder stages upsample
/// first then run the RSTB.
template <typename T>
struct NtuParams {
    RstbParams<T> rstb;
    ConvParams<T> resample;
};

template <typename T>
struct ModelParams {
    HycassConfig cfg;
    ConvParams<T> spectral_encoder;             // C -> N, 1x1
    std::vector<NtuParams<T>> encoder_stages;   // S entries
    ConvParams<T> cr_adapter_encoder;           // N -> Gamma, 1x1
    ConvParams<T> cr_adapter_decoder;           // Gamma -> N, 1x1
    std::vector<NtuParams<T>> decoder_stages;   // S entries
    ConvParams<T> spectral_decoder;             // N -> C, 1x1

    /// MD5 over the canonical f32 serialization of all weights.
    Digest16 content_hash() const;
};

// Visitation helpers; const-ness of the tensors follows the params argument.
namespace detail {

template <typename ConvP, typename Fn>
void visit_conv(ConvP& p, const std::string& path, Fn&& fn) {
    fn(path + ".kernel", p.kernel);
    fn(path + ".bias", p.bias);
}

template <typename LnP, typename Fn>
void visit_ln(LnP& p, const std::string& path, Fn&& fn) {
    fn(path + ".gamma", p.gamma);
    fn(path + ".beta", p.beta);
}

template <typename AttnP, typename Fn>
void visit_attention(AttnP& p, const std::string& path, Fn&& fn) {
    fn(path + ".qkv_w", p.qkv_weight);
    fn(path + ".qkv_b", p.qkv_bias);
    fn(path + ".proj_w", p.proj_weight);
    fn(path + ".proj_b", p.proj_bias);
    fn(path + ".rel_bias", p.rel_bias);
}

template <typename MlpP, typename Fn>
void visit_mlp(MlpP& p, const std::string& path, Fn&& fn) {
    fn(path + ".w1", p.w1);
    fn(path + ".b1", p.b1);
    fn(path + ".w2", p.w2);
    fn(path + ".b2", p.b2);
}

template <typename StlP, typename Fn>
void visit_stl(StlP& p, const std::string& path, Fn&& fn) {
    visit_ln(p.ln1, path + ".ln1", fn);
    visit_attention(p.wa, path + ".wa", fn);
    visit_ln(p.ln2, path + ".ln2", fn);
    visit_mlp(p.mlp1, path + ".mlp1", fn);
    visit_ln(p.ln3, path + ".ln3", fn);
    visit_attention(p.swa, path + ".swa", fn);
    visit_ln(p.ln4, path + ".ln4", fn);
    visit_mlp(p.mlp2, path + ".mlp2", fn);
}

template <typename RstbP, typename Fn>
void visit_rstb(RstbP& p, const std::string& path, Fn&& fn) {
    visit_conv(p.fe, path + ".fe", fn);
    for (size_t i = 0; i < p.stls.size(); ++i)
        visit_stl(p.stls[i], path + ".stl." + std::to_string(i), fn);
    visit_conv(p.fu, path + ".fu", fn);
}

}  // namespace detail

/// Visits every tensor in canonical (checkpoint) order with fn(path, tensor).
template <typename ModelP, typename Fn>
void for_each_tensor(ModelP& params, Fn&& fn) {
    detail::visit_conv(params.spectral_encoder, "spec_enc", fn);
    for (size_t k = 0; k < params.encoder_stages.size(); ++k) {
        std::string base = "enc." + std::to_string(k);
        detail::visit_rstb(params.encoder_stages[k].rstb, base + ".rstb", fn);
        detail::visit_conv(params.encoder_stages[k].resample, base + ".down", fn);
    }
    detail::visit_conv(params.cr_adapter_encoder, "adapter_enc", fn);
    detail::visit_conv(params.cr_adapter_decoder, "adapter_dec", fn);
    for (size_t k = 0; k < params.decoder_stages.size(); ++k) {
        std::string base = "dec." + std::to_string(k);
        detail::visit_conv(params.decoder_stages[k].resample, base + ".up", fn);
        detail::visit_rstb(params.decoder_stages[k].rstb, base + ".rstb", fn);
    }
    detail::visit_conv(params.spectral_decoder, "spec_dec", fn);
}

/// Zero-filled parameter set of the right shapes.
template <typename T>
ModelParams<T> make_model_params(const HycassConfig& cfg);

/// Kaiming-uniform convolutions (LeakyReLU gain), truncated-normal (sigma
/// 0.02) attention and MLP weights, unit layer norms, zero biases and
/// relative-position tables. Deterministic per seed.
template <typename T>
ModelParams<T> init_params(const HycassConfig& cfg, uint64_t seed);

template <typename To, typename From>
ModelParams<To> convert_params(const ModelParams<From>& p);

// ---------------------------------------------------------------------------
// Forward pipelines. All feature maps are {H, W, ch}; inputs and outputs of
// the full pipelines live in [0, 1].
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> spectral_encode(const Tensor<T>& x, const ModelParams<T>& p);
template <typename T>
Tensor<T> spatial_encode(const Tensor<T>& x, const ModelParams<T>& p);
template <typename T>
Tensor<T> cr_adapt_encode(const Tensor<T>& x, const ModelParams<T>& p);
template <typename T>
Tensor<T> cr_adapt_decode(const Tensor<T>& y, const ModelParams<T>& p);
template <typename T>
Tensor<T> spatial_decode(const Tensor<T>& x, const ModelParams<T>& p);
template <typename T>
Tensor<T> spectral_decode(const Tensor<T>& x, const ModelParams<T>& p);

template <typename T>
struct EncodeCache {
    Tensor<T> input;
    Tensor<T> spec_pre;   // spectral conv output before LeakyReLU
    Tensor<T> spec_act;
    struct Stage {
        RstbCache<T> rstb;
        Tensor<T> rstb_out;
        Tensor<T> down_pre;
        Tensor<T> down_act;
    };
    std::vector<Stage> stages;
    Tensor<T> adapter_pre;
    Tensor<T> latent;
};

template <typename T>
struct DecodeCache {
    Tensor<T> latent_in;
    Tensor<T> adapter_pre;
    Tensor<T> adapter_act;
    struct Stage {
        Tensor<T> up_pre;
        Tensor<T> up_act;
        RstbCache<T> rstb;
        Tensor<T> rstb_out;
    };
    std::vector<Stage> stages;
    Tensor<T> spec_pre;
    Tensor<T> output;
};

template <typename T>
Tensor<T> encode_forward(const Tensor<T>& x, const ModelParams<T>& p, EncodeCache<T>* cache = nullptr);
template <typename T>
Tensor<T> decode_forward(const Tensor<T>& y, const ModelParams<T>& p, DecodeCache<T>* cache = nullptr);

/// encode: cr_adapt_encode . spatial_encode . spectral_encode
template <typename T>
Tensor<T> encode(const Tensor<T>& x, const ModelParams<T>& p);
/// decode: spectral_decode . spatial_decode . cr_adapt_decode
template <typename T>
Tensor<T> decode(const Tensor<T>& y, const ModelParams<T>& p);

/// Backward through decode: fills decoder gradients, returns dL/dlatent.
template <typename T>
Tensor<T> decode_backward(const DecodeCache<T>& cache, const ModelParams<T>& p,
                          const Tensor<T>& grad_output, ModelParams<T>& grads);
/// Backward through encode: fills encoder gradients, returns dL/dinput.
template <typename T>
Tensor<T> encode_backward(const EncodeCache<T>& cache, const ModelParams<T>& p,
                          const Tensor<T>& grad_latent, ModelParams<T>& grads);

// ---------------------------------------------------------------------------
// Cube <-> tensor adapters
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> cube_to_tensor(const HsiCube& cube);
HsiCube tensor_to_unit_cube(const Tensor<float>& t);
HsiCube tensor_to_unit_cube(const Tensor<double>& t);

// ---------------------------------------------------------------------------
// HYW1 model checkpoint container:
//   "HYW1" | u16 version | config record | u32 tensor count |
//   per tensor (u16 path len | path | u8 ndims | u32 dims[] | f32 payload) |
//   16-byte content hash
// Config record: u32 bands, features, latent_channels, stages, window,
// heads, stl_depth | f64 mlp_ratio | f64 leaky_slope | u8 rel_bias.
// ---------------------------------------------------------------------------

inline constexpr uint16_t kModelFormatVersion = 1;

void serialize_config(const HycassConfig& cfg, ByteWriter& w);
HycassConfig parse_config(ByteReader& r);

std::vector<uint8_t> serialize_model(const ModelParams<float>& params);
ModelParams<float> parse_model(ByteReader& r);

void save_model(const ModelParams<float>& params, const std::string& path);
ModelParams<float> load_model(const std::string& path);

}  // namespace hycass
