#include "hycass/model.hpp"

#include <cmath>
#include <cstring>

#include "hycass/rng.hpp"

namespace hycass {

namespace {

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

int HycassConfig::mlp_hidden() const {
    return std::max(1, int(std::lround(features * mlp_ratio)));
}

void HycassConfig::validate() const {
    require(bands >= 1 && features >= 1 && latent_channels >= 1, Err::invalid_argument,
            "C, N and Gamma must be >= 1");
    require(stages >= 0, Err::invalid_argument, "stages must be >= 0");
    require(window >= 2 && window % 2 == 0, Err::invalid_argument,
            "window must be even and >= 2");
    require(heads >= 1 && features % heads == 0, Err::head_divisibility,
            "N must be divisible by heads");
    require(mlp_ratio > 0.0, Err::invalid_argument, "mlp_ratio must be positive");
    require(stl_depth >= 1, Err::invalid_argument, "stl_depth must be >= 1");
}

CrBreakdown achieved_cr(const HycassConfig& cfg) {
    CrBreakdown out;
    out.cr_spec = double(cfg.bands) / double(cfg.latent_channels);
    out.cr_spat = std::ldexp(1.0, 2 * cfg.stages);  // 4^S
    out.cr = out.cr_spec * out.cr_spat;
    return out;
}

int gamma_for_target_cr(int bands, int stages, double target_cr) {
    require(bands >= 1 && stages >= 0, Err::invalid_argument, "bad bands/stages");
    require(target_cr > 0.0, Err::invalid_argument, "target CR must be positive");
    double ideal = double(bands) * std::ldexp(1.0, 2 * stages) / target_cr;
    long long g = std::llround(ideal);  // ties away from zero
    return int(std::max(1ll, g));
}

void validate_input_dims(const HycassConfig& cfg, int height, int width) {
    cfg.validate();
    require(height >= 1 && width >= 1, Err::invalid_argument, "empty input");
    if (cfg.stages == 0) return;
    int div = 1 << cfg.stages;
    require(height % div == 0 && width % div == 0, Err::indivisible,
            "input dims must be divisible by 2^S = " + std::to_string(div));
    for (int k = 0; k < cfg.stages; ++k) {
        int h = height >> k, w = width >> k;
        require(h % cfg.window == 0 && w % cfg.window == 0, Err::indivisible,
                "stage " + std::to_string(k) + " resolution " + std::to_string(h) + "x" +
                    std::to_string(w) + " not divisible by window " +
                    std::to_string(cfg.window));
    }
}

LatentInfo latent_shape(const HycassConfig& cfg, int height, int width) {
    validate_input_dims(cfg, height, width);
    return {height >> cfg.stages, width >> cfg.stages, cfg.latent_channels};
}

// ---------------------------------------------------------------------------
// construction / init
// ---------------------------------------------------------------------------

namespace {

template <typename T>
ConvParams<T> make_conv(int out_ch, int in_ch, int k, int stride, bool transposed) {
    ConvParams<T> p;
    p.kernel = Tensor<T>({out_ch, in_ch, k, k});
    p.bias = Tensor<T>({out_ch});
    p.stride = stride;
    p.transposed = transposed;
    return p;
}

template <typename T>
AttentionParams<T> make_attention(const HycassConfig& cfg) {
    AttentionParams<T> p;
    int ch = cfg.features;
    p.qkv_weight = Tensor<T>({3 * ch, ch});
    p.qkv_bias = Tensor<T>({3 * ch});
    p.proj_weight = Tensor<T>({ch, ch});
    p.proj_bias = Tensor<T>({ch});
    int span = 2 * cfg.window - 1;
    p.rel_bias = Tensor<T>({span * span, cfg.heads});
    p.heads = cfg.heads;
    p.window = cfg.window;
    p.use_rel_bias = cfg.rel_bias;
    return p;
}

template <typename T>
StlParams<T> make_stl(const HycassConfig& cfg) {
    StlParams<T> p;
    int ch = cfg.features, hidden = cfg.mlp_hidden();
    auto ln = [ch] {
        LayerNormParams<T> l;
        l.gamma = Tensor<T>({ch});
        l.beta = Tensor<T>({ch});
        return l;
    };
    p.ln1 = ln();
    p.ln2 = ln();
    p.ln3 = ln();
    p.ln4 = ln();
    p.wa = make_attention<T>(cfg);
    p.swa = make_attention<T>(cfg);
    auto mlp = [ch, hidden] {
        MlpParams<T> m;
        m.w1 = Tensor<T>({hidden, ch});
        m.b1 = Tensor<T>({hidden});
        m.w2 = Tensor<T>({ch, hidden});
        m.b2 = Tensor<T>({ch});
        return m;
    };
    p.mlp1 = mlp();
    p.mlp2 = mlp();
    return p;
}

template <typename T>
RstbParams<T> make_rstb(const HycassConfig& cfg) {
    RstbParams<T> p;
    p.fe = make_conv<T>(cfg.features, cfg.features, 1, 1, false);
    p.stls.reserve(size_t(cfg.stl_depth));
    for (int i = 0; i < cfg.stl_depth; ++i) p.stls.push_back(make_stl<T>(cfg));
    p.fu = make_conv<T>(cfg.features, cfg.features, 1, 1, false);
    return p;
}

}  // namespace

template <typename T>
ModelParams<T> make_model_params(const HycassConfig& cfg) {
    cfg.validate();
    ModelParams<T> p;
    p.cfg = cfg;
    p.spectral_encoder = make_conv<T>(cfg.features, cfg.bands, 1, 1, false);
    for (int k = 0; k < cfg.stages; ++k) {
        NtuParams<T> ntu;
        ntu.rstb = make_rstb<T>(cfg);
        ntu.resample = make_conv<T>(cfg.features, cfg.features, 3, 2, false);
        p.encoder_stages.push_back(std::move(ntu));
    }
    p.cr_adapter_encoder = make_conv<T>(cfg.latent_channels, cfg.features, 1, 1, false);
    p.cr_adapter_decoder = make_conv<T>(cfg.features, cfg.latent_channels, 1, 1, false);
    for (int k = 0; k < cfg.stages; ++k) {
        NtuParams<T> ntu;
        ntu.resample = make_conv<T>(cfg.features, cfg.features, 3, 2, true);
        ntu.rstb = make_rstb<T>(cfg);
        p.decoder_stages.push_back(std::move(ntu));
    }
    p.spectral_decoder = make_conv<T>(cfg.bands, cfg.features, 1, 1, false);
    return p;
}

namespace {

// Kaiming-uniform with LeakyReLU gain; empirical std ~ gain / sqrt(fan_in).
template <typename T>
void fill_kaiming_uniform(Tensor<T>& kernel, uint64_t seed, double slope) {
    int in_ch = kernel.dim(1), k = kernel.dim(2);
    double fan_in = double(in_ch) * k * k;
    double gain = std::sqrt(2.0 / (1.0 + slope * slope));
    double bound = gain * std::sqrt(3.0 / fan_in);
    Rng rng(seed);
    for (int64_t i = 0; i < kernel.numel(); ++i) kernel[i] = T(rng.uniform(-bound, bound));
}

template <typename T>
void fill_trunc_normal(Tensor<T>& t, uint64_t seed, double sigma) {
    Rng rng(seed);
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = T(rng.trunc_normal(sigma, 2.0 * sigma));
}

template <typename T>
void fill_ones(Tensor<T>& t) {
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = T(1);
}

}  // namespace

template <typename T>
ModelParams<T> init_params(const HycassConfig& cfg, uint64_t seed) {
    ModelParams<T> p = make_model_params<T>(cfg);
    for_each_tensor(p, [&](const std::string& path, Tensor<T>& t) {
        uint64_t s = derive_seed(seed, fnv1a64(path));
        bool is_conv_kernel = t.rank() == 4;
        bool is_linear_weight = t.rank() == 2 && path.find("rel_bias") == std::string::npos;
        bool is_gamma = path.size() >= 6 && path.rfind(".gamma") == path.size() - 6;
        if (is_conv_kernel) {
            fill_kaiming_uniform(t, s, cfg.leaky_slope);
        } else if (is_linear_weight) {
            fill_trunc_normal(t, s, 0.02);
        } else if (is_gamma) {
            fill_ones(t);
        }
        // biases, betas and relative-position tables stay zero
    });
    return p;
}

template <typename To, typename From>
ModelParams<To> convert_params(const ModelParams<From>& src) {
    ModelParams<To> dst = make_model_params<To>(src.cfg);
    auto src_it = std::vector<const Tensor<From>*>();
    for_each_tensor(src, [&](const std::string&, const Tensor<From>& t) {
        src_it.push_back(&t);
    });
    size_t i = 0;
    for_each_tensor(dst, [&](const std::string&, Tensor<To>& t) {
        t = tensor_cast<To>(*src_it[i++]);
    });
    return dst;
}

// ---------------------------------------------------------------------------
// forward / backward
// ---------------------------------------------------------------------------

namespace {

template <typename T>
void check_unit_range(const Tensor<T>& x, const char* what) {
    for (int64_t i = 0; i < x.numel(); ++i)
        require(x[i] >= T(0) && x[i] <= T(1), Err::invalid_argument,
                std::string(what) + " must lie in [0,1]");
}

}  // namespace

template <typename T>
Tensor<T> spectral_encode(const Tensor<T>& x, const ModelParams<T>& p) {
    require(x.rank() == 3 && x.dim(2) == p.cfg.bands, Err::channel_mismatch,
            "spectral_encode expects C input channels");
    return leaky_relu(conv2d(x, p.spectral_encoder), T(p.cfg.leaky_slope));
}

template <typename T>
Tensor<T> spatial_encode(const Tensor<T>& x, const ModelParams<T>& p) {
    validate_input_dims(p.cfg, x.dim(0), x.dim(1));
    Tensor<T> h = x;
    for (const auto& stage : p.encoder_stages) {
        h = rstb_apply(h, stage.rstb);
        h = leaky_relu(conv2d(h, stage.resample), T(p.cfg.leaky_slope));
    }
    return h;
}

template <typename T>
Tensor<T> cr_adapt_encode(const Tensor<T>& x, const ModelParams<T>& p) {
    require(x.dim(2) == p.cfg.features, Err::channel_mismatch,
            "cr_adapt_encode expects N input channels");
    return sigmoid(conv2d(x, p.cr_adapter_encoder));
}

template <typename T>
Tensor<T> cr_adapt_decode(const Tensor<T>& y, const ModelParams<T>& p) {
    require(y.dim(2) == p.cfg.latent_channels, Err::channel_mismatch,
            "cr_adapt_decode expects Gamma input channels");
    return leaky_relu(conv2d(y, p.cr_adapter_decoder), T(p.cfg.leaky_slope));
}

template <typename T>
Tensor<T> spatial_decode(const Tensor<T>& x, const ModelParams<T>& p) {
    Tensor<T> h = x;
    for (const auto& stage : p.decoder_stages) {
        h = leaky_relu(conv2d(h, stage.resample), T(p.cfg.leaky_slope));
        h = rstb_apply(h, stage.rstb);
    }
    return h;
}

template <typename T>
Tensor<T> spectral_decode(const Tensor<T>& x, const ModelParams<T>& p) {
    require(x.dim(2) == p.cfg.features, Err::channel_mismatch,
            "spectral_decode expects N input channels");
    return sigmoid(conv2d(x, p.spectral_decoder));
}

template <typename T>
Tensor<T> encode_forward(const Tensor<T>& x, const ModelParams<T>& p, EncodeCache<T>* cache) {
    require(x.rank() == 3 && x.dim(2) == p.cfg.bands, Err::channel_mismatch,
            "encode expects H x W x C input");
    validate_input_dims(p.cfg, x.dim(0), x.dim(1));
    const T slope = T(p.cfg.leaky_slope);

    Tensor<T> pre = conv2d(x, p.spectral_encoder);
    Tensor<T> h = leaky_relu(pre, slope);
    if (cache) {
        cache->input = x;
        cache->spec_pre = pre;
        cache->spec_act = h;
        cache->stages.resize(p.encoder_stages.size());
    }
    for (size_t k = 0; k < p.encoder_stages.size(); ++k) {
        const auto& stage = p.encoder_stages[k];
        auto* sc = cache ? &cache->stages[k] : nullptr;
        Tensor<T> r = rstb_forward(h, stage.rstb, sc ? &sc->rstb : nullptr);
        Tensor<T> dpre = conv2d(r, stage.resample);
        h = leaky_relu(dpre, slope);
        if (sc) {
            sc->rstb_out = std::move(r);
            sc->down_pre = std::move(dpre);
            sc->down_act = h;
        }
    }
    Tensor<T> apre = conv2d(h, p.cr_adapter_encoder);
    Tensor<T> latent = sigmoid(apre);
    if (cache) {
        cache->adapter_pre = std::move(apre);
        cache->latent = latent;
    }
    return latent;
}

template <typename T>
Tensor<T> decode_forward(const Tensor<T>& y, const ModelParams<T>& p, DecodeCache<T>* cache) {
    require(y.rank() == 3 && y.dim(2) == p.cfg.latent_channels, Err::channel_mismatch,
            "decode expects Sigma x Omega x Gamma latent");
    const T slope = T(p.cfg.leaky_slope);

    Tensor<T> apre = conv2d(y, p.cr_adapter_decoder);
    Tensor<T> h = leaky_relu(apre, slope);
    if (cache) {
        cache->latent_in = y;
        cache->adapter_pre = std::move(apre);
        cache->adapter_act = h;
        cache->stages.resize(p.decoder_stages.size());
    }
    for (size_t k = 0; k < p.decoder_stages.size(); ++k) {
        const auto& stage = p.decoder_stages[k];
        auto* sc = cache ? &cache->stages[k] : nullptr;
        Tensor<T> upre = conv2d(h, stage.resample);
        Tensor<T> uact = leaky_relu(upre, slope);
        h = rstb_forward(uact, stage.rstb, sc ? &sc->rstb : nullptr);
        if (sc) {
            sc->up_pre = std::move(upre);
            sc->up_act = std::move(uact);
            sc->rstb_out = h;
        }
    }
    Tensor<T> spre = conv2d(h, p.spectral_decoder);
    Tensor<T> out = sigmoid(spre);
    if (cache) {
        cache->spec_pre = std::move(spre);
        cache->output = out;
    }
    return out;
}

template <typename T>
Tensor<T> encode(const Tensor<T>& x, const ModelParams<T>& p) {
    check_unit_range(x, "encoder input");
    return encode_forward(x, p);
}

template <typename T>
Tensor<T> decode(const Tensor<T>& y, const ModelParams<T>& p) {
    check_unit_range(y, "latent");
    return decode_forward(y, p);
}

template <typename T>
Tensor<T> decode_backward(const DecodeCache<T>& cache, const ModelParams<T>& p,
                          const Tensor<T>& grad_output, ModelParams<T>& grads) {
    const T slope = T(p.cfg.leaky_slope);

    Tensor<T> g = sigmoid_backward(cache.output, grad_output);
    ConvGrads<T> cg = conv2d_backward(
        cache.stages.empty() ? cache.adapter_act : cache.stages.back().rstb_out,
        p.spectral_decoder, g);
    grads.spectral_decoder.kernel = std::move(cg.kernel);
    grads.spectral_decoder.bias = std::move(cg.bias);
    g = std::move(cg.input);

    for (size_t k = p.decoder_stages.size(); k-- > 0;) {
        const auto& stage = p.decoder_stages[k];
        const auto& sc = cache.stages[k];
        RstbGrads<T> rg = rstb_backward(sc.rstb, stage.rstb, g);
        grads.decoder_stages[k].rstb = std::move(rg.params);
        Tensor<T> g_uact = std::move(rg.input);
        Tensor<T> g_upre = leaky_relu_backward(sc.up_pre, slope, g_uact);
        const Tensor<T>& up_in = k == 0 ? cache.adapter_act : cache.stages[k - 1].rstb_out;
        ConvGrads<T> ug = conv2d_backward(up_in, stage.resample, g_upre);
        grads.decoder_stages[k].resample.kernel = std::move(ug.kernel);
        grads.decoder_stages[k].resample.bias = std::move(ug.bias);
        g = std::move(ug.input);
    }

    Tensor<T> g_apre = leaky_relu_backward(cache.adapter_pre, slope, g);
    ConvGrads<T> ag = conv2d_backward(cache.latent_in, p.cr_adapter_decoder, g_apre);
    grads.cr_adapter_decoder.kernel = std::move(ag.kernel);
    grads.cr_adapter_decoder.bias = std::move(ag.bias);
    return std::move(ag.input);
}

template <typename T>
Tensor<T> encode_backward(const EncodeCache<T>& cache, const ModelParams<T>& p,
                          const Tensor<T>& grad_latent, ModelParams<T>& grads) {
    const T slope = T(p.cfg.leaky_slope);

    Tensor<T> g = sigmoid_backward(cache.latent, grad_latent);
    ConvGrads<T> ag = conv2d_backward(
        cache.stages.empty() ? cache.spec_act : cache.stages.back().down_act,
        p.cr_adapter_encoder, g);
    grads.cr_adapter_encoder.kernel = std::move(ag.kernel);
    grads.cr_adapter_encoder.bias = std::move(ag.bias);
    g = std::move(ag.input);

    for (size_t k = p.encoder_stages.size(); k-- > 0;) {
        const auto& stage = p.encoder_stages[k];
        const auto& sc = cache.stages[k];
        Tensor<T> g_dpre = leaky_relu_backward(sc.down_pre, slope, g);
        ConvGrads<T> dg = conv2d_backward(sc.rstb_out, stage.resample, g_dpre);
        grads.encoder_stages[k].resample.kernel = std::move(dg.kernel);
        grads.encoder_stages[k].resample.bias = std::move(dg.bias);
        RstbGrads<T> rg = rstb_backward(sc.rstb, stage.rstb, dg.input);
        grads.encoder_stages[k].rstb = std::move(rg.params);
        g = std::move(rg.input);
    }

    Tensor<T> g_spre = leaky_relu_backward(cache.spec_pre, slope, g);
    ConvGrads<T> sg = conv2d_backward(cache.input, p.spectral_encoder, g_spre);
    grads.spectral_encoder.kernel = std::move(sg.kernel);
    grads.spectral_encoder.bias = std::move(sg.bias);
    return std::move(sg.input);
}

// ---------------------------------------------------------------------------
// cube adapters
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> cube_to_tensor(const HsiCube& cube) {
    Tensor<T> t({cube.height, cube.width, cube.bands});
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = T(cube.values[size_t(i)]);
    return t;
}

namespace {

template <typename T>
HsiCube tensor_to_unit_cube_impl(const Tensor<T>& t) {
    require(t.rank() == 3, Err::shape_mismatch, "cube tensor must be 3-d");
    HsiCube cube;
    cube.height = t.dim(0);
    cube.width = t.dim(1);
    cube.bands = t.dim(2);
    cube.bit_depth = 32;
    cube.norm_state = NormState::unit;
    cube.values.resize(size_t(t.numel()));
    for (int64_t i = 0; i < t.numel(); ++i) cube.values[size_t(i)] = double(t[i]);
    return cube;
}

}  // namespace

HsiCube tensor_to_unit_cube(const Tensor<float>& t) { return tensor_to_unit_cube_impl(t); }
HsiCube tensor_to_unit_cube(const Tensor<double>& t) { return tensor_to_unit_cube_impl(t); }

// ---------------------------------------------------------------------------
// hashing and HYW1 container
// ---------------------------------------------------------------------------

namespace {

template <typename T>
void write_tensor_record(ByteWriter& w, const std::string& path, const Tensor<T>& t) {
    w.str(path);
    w.u8(uint8_t(t.rank()));
    for (int d : t.shape) w.u32(uint32_t(d));
    for (int64_t i = 0; i < t.numel(); ++i) w.f32(float(t[i]));
}

template <typename T>
std::vector<uint8_t> canonical_weight_bytes(const ModelParams<T>& p) {
    ByteWriter w;
    for_each_tensor(p, [&w](const std::string& path, const Tensor<T>& t) {
        write_tensor_record(w, path, t);
    });
    return w.take();
}

}  // namespace

template <typename T>
Digest16 ModelParams<T>::content_hash() const {
    return md5(canonical_weight_bytes(*this));
}

void serialize_config(const HycassConfig& cfg, ByteWriter& w) {
    w.u32(uint32_t(cfg.bands));
    w.u32(uint32_t(cfg.features));
    w.u32(uint32_t(cfg.latent_channels));
    w.u32(uint32_t(cfg.stages));
    w.u32(uint32_t(cfg.window));
    w.u32(uint32_t(cfg.heads));
    w.u32(uint32_t(cfg.stl_depth));
    w.f64(cfg.mlp_ratio);
    w.f64(cfg.leaky_slope);
    w.u8(cfg.rel_bias ? 1 : 0);
}

HycassConfig parse_config(ByteReader& r) {
    HycassConfig cfg;
    cfg.bands = int(r.u32());
    cfg.features = int(r.u32());
    cfg.latent_channels = int(r.u32());
    cfg.stages = int(r.u32());
    cfg.window = int(r.u32());
    cfg.heads = int(r.u32());
    cfg.stl_depth = int(r.u32());
    cfg.mlp_ratio = r.f64();
    cfg.leaky_slope = r.f64();
    cfg.rel_bias = r.u8() != 0;
    cfg.validate();
    return cfg;
}

std::vector<uint8_t> serialize_model(const ModelParams<float>& params) {
    ByteWriter w;
    w.bytes("HYW1", 4);
    w.u16(kModelFormatVersion);
    serialize_config(params.cfg, w);
    uint32_t count = 0;
    for_each_tensor(params, [&count](const std::string&, const Tensor<float>&) { ++count; });
    w.u32(count);
    std::vector<uint8_t> weights = canonical_weight_bytes(params);
    Digest16 hash = md5(weights);
    w.bytes(weights.data(), weights.size());
    w.bytes(hash.data(), hash.size());
    return w.take();
}

ModelParams<float> parse_model(ByteReader& r) {
    char magic[4];
    r.bytes(magic, 4);
    require(std::memcmp(magic, "HYW1", 4) == 0, Err::malformed_magic, "missing HYW1 magic");
    uint16_t version = r.u16();
    require(version == kModelFormatVersion, Err::version_mismatch,
            "unsupported model format version " + std::to_string(version));
    HycassConfig cfg = parse_config(r);

    ModelParams<float> params = make_model_params<float>(cfg);
    uint32_t expected = 0;
    for_each_tensor(params,
                    [&expected](const std::string&, const Tensor<float>&) { ++expected; });
    uint32_t count = r.u32();
    require(count == expected, Err::corrupt_header,
            "tensor count mismatch: file has " + std::to_string(count));

    size_t weights_begin = r.position();
    for_each_tensor(params, [&r](const std::string& path, Tensor<float>& t) {
        std::string got = r.str();
        require(got == path, Err::corrupt_header,
                "unexpected tensor '" + got + "', wanted '" + path + "'");
        uint8_t ndims = r.u8();
        require(ndims == t.rank(), Err::corrupt_header, "rank mismatch for " + path);
        for (int i = 0; i < t.rank(); ++i) {
            uint32_t d = r.u32();
            require(int(d) == t.dim(i), Err::corrupt_header, "dim mismatch for " + path);
        }
        for (int64_t i = 0; i < t.numel(); ++i) t[i] = r.f32();
    });
    size_t weights_end = r.position();

    Digest16 stored;
    r.bytes(stored.data(), stored.size());
    // hash is over the canonical serialization, identical to the file bytes
    std::vector<uint8_t> weights = canonical_weight_bytes(params);
    require(weights.size() == weights_end - weights_begin, Err::corrupt_header,
            "weight section size mismatch");
    Digest16 computed = md5(weights);
    require(computed == stored, Err::hash_mismatch, "weight hash mismatch (corrupt file?)");
    return params;
}

void save_model(const ModelParams<float>& params, const std::string& path) {
    write_file(path, serialize_model(params));
}

ModelParams<float> load_model(const std::string& path) {
    std::vector<uint8_t> bytes = read_file(path);
    ByteReader r(bytes);
    return parse_model(r);
}

// ---------------------------------------------------------------------------
// explicit instantiation
// ---------------------------------------------------------------------------

#define HYCASS_INSTANTIATE_MODEL(T)                                                      \
    template struct ModelParams<T>;                                                      \
    template ModelParams<T> make_model_params<T>(const HycassConfig&);                   \
    template ModelParams<T> init_params<T>(const HycassConfig&, uint64_t);               \
    template Tensor<T> spectral_encode<T>(const Tensor<T>&, const ModelParams<T>&);      \
    template Tensor<T> spatial_encode<T>(const Tensor<T>&, const ModelParams<T>&);       \
    template Tensor<T> cr_adapt_encode<T>(const Tensor<T>&, const ModelParams<T>&);      \
    template Tensor<T> cr_adapt_decode<T>(const Tensor<T>&, const ModelParams<T>&);      \
    template Tensor<T> spatial_decode<T>(const Tensor<T>&, const ModelParams<T>&);       \
    template Tensor<T> spectral_decode<T>(const Tensor<T>&, const ModelParams<T>&);      \
    template Tensor<T> encode_forward<T>(const Tensor<T>&, const ModelParams<T>&,        \
                                         EncodeCache<T>*);                               \
    template Tensor<T> decode_forward<T>(const Tensor<T>&, const ModelParams<T>&,        \
                                         DecodeCache<T>*);                               \
    template Tensor<T> encode<T>(const Tensor<T>&, const ModelParams<T>&);               \
    template Tensor<T> decode<T>(const Tensor<T>&, const ModelParams<T>&);               \
    template Tensor<T> decode_backward<T>(const DecodeCache<T>&, const ModelParams<T>&,  \
                                          const Tensor<T>&, ModelParams<T>&);            \
    template Tensor<T> encode_backward<T>(const EncodeCache<T>&, const ModelParams<T>&,  \
                                          const Tensor<T>&, ModelParams<T>&);            \
    template Tensor<T> cube_to_tensor<T>(const HsiCube&);

HYCASS_INSTANTIATE_MODEL(float)
HYCASS_INSTANTIATE_MODEL(double)

template ModelParams<double> convert_params<double, float>(const ModelParams<float>&);
template ModelParams<float> convert_params<float, double>(const ModelParams<double>&);
template ModelParams<float> convert_params<float, float>(const ModelParams<float>&);
template ModelParams<double> convert_params<double, double>(const ModelParams<double>&);

#undef HYCASS_INSTANTIATE_MODEL

}  // namespace hycass
