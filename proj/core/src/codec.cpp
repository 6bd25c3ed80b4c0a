#include "hycass/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace hycass {

LatentBitstream compress(const HsiCube& cube, const ModelParams<float>& params,
                         LatentDtype dtype) {
    const HycassConfig& cfg = params.cfg;
    require(cube.bands == cfg.bands, Err::config_mismatch,
            "cube has " + std::to_string(cube.bands) + " bands, model expects " +
                std::to_string(cfg.bands));
    validate_input_dims(cfg, cube.height, cube.width);

    NormalizationParams norm{0.0, 1.0};
    Tensor<float> unit;
    if (cube.norm_state == NormState::raw) {
        auto [normalized, p] = min_max_normalize(cube);
        norm = p;
        unit = cube_to_tensor<float>(normalized);
    } else {
        norm = cube.norm.value_or(NormalizationParams{0.0, 1.0});
        unit = cube_to_tensor<float>(cube);
    }

    Tensor<float> latent = encode(unit, params);

    LatentBitstream s;
    s.sigma = uint32_t(latent.dim(0));
    s.omega = uint32_t(latent.dim(1));
    s.gamma = uint32_t(latent.dim(2));
    s.stages = uint8_t(cfg.stages);
    s.features = uint32_t(cfg.features);
    s.window = uint8_t(cfg.window);
    s.orig_height = uint32_t(cube.height);
    s.orig_width = uint32_t(cube.width);
    s.orig_bands = uint32_t(cube.bands);
    s.input_bit_depth = uint8_t(cube.bit_depth);
    s.payload_dtype = uint8_t(dtype);
    s.v_min = float(norm.v_min);
    s.v_max = float(norm.v_max);
    s.model_hash = params.content_hash();

    ByteWriter w;
    if (dtype == LatentDtype::f32) {
        for (int64_t i = 0; i < latent.numel(); ++i) w.f32(latent[i]);
    } else {
        float lo = 1.0f, hi = 0.0f;
        for (int64_t i = 0; i < latent.numel(); ++i) {
            lo = std::min(lo, latent[i]);
            hi = std::max(hi, latent[i]);
        }
        if (hi <= lo) hi = lo + 1.0f;  // constant latent
        w.f32(lo);
        w.f32(hi);
        float scale = 65535.0f / (hi - lo);
        for (int64_t i = 0; i < latent.numel(); ++i) {
            float q = std::round((latent[i] - lo) * scale);
            w.u16(uint16_t(std::clamp(q, 0.0f, 65535.0f)));
        }
    }
    s.payload = w.take();
    return s;
}

HsiCube decompress(const LatentBitstream& s, const ModelParams<float>& params) {
    const HycassConfig& cfg = params.cfg;
    require(s.model_hash == params.content_hash(), Err::hash_mismatch,
            "bitstream was produced by a different model");
    require(s.stages == cfg.stages && s.features == uint32_t(cfg.features) &&
                s.window == uint32_t(cfg.window) &&
                s.gamma == uint32_t(cfg.latent_channels) &&
                s.orig_bands == uint32_t(cfg.bands),
            Err::config_mismatch, "bitstream architecture fields do not match the model");
    require(s.orig_height >> s.stages == s.sigma && s.orig_width >> s.stages == s.omega,
            Err::corrupt_header, "latent dims inconsistent with original dims");
    require(s.v_max > s.v_min, Err::corrupt_header, "header range must satisfy v_max > v_min");

    const int64_t n = s.latent_elements();
    Tensor<float> latent({int(s.sigma), int(s.omega), int(s.gamma)});
    ByteReader r(s.payload);
    if (s.payload_dtype == uint8_t(LatentDtype::f32)) {
        require(s.payload.size() == size_t(n) * 4, Err::truncated_payload,
                "payload length does not match latent dims");
        for (int64_t i = 0; i < n; ++i) latent[i] = r.f32();
    } else if (s.payload_dtype == uint8_t(LatentDtype::u16)) {
        require(s.payload.size() == 8 + size_t(n) * 2, Err::truncated_payload,
                "payload length does not match latent dims");
        float lo = r.f32(), hi = r.f32();
        require(hi > lo, Err::corrupt_header, "quantized payload range invalid");
        float scale = (hi - lo) / 65535.0f;
        for (int64_t i = 0; i < n; ++i) latent[i] = lo + float(r.u16()) * scale;
    } else {
        raise(Err::corrupt_header, "unknown payload dtype");
    }

    Tensor<float> recon = decode(latent, params);
    HsiCube unit = tensor_to_unit_cube(recon);
    HsiCube out = denormalize(unit, NormalizationParams{double(s.v_min), double(s.v_max)});
    out.bit_depth = s.input_bit_depth;
    return out;
}

std::vector<uint8_t> serialize_bitstream(const LatentBitstream& s) {
    ByteWriter w;
    w.bytes("HYL1", 4);
    w.u16(s.version);
    w.u32(s.sigma);
    w.u32(s.omega);
    w.u32(s.gamma);
    w.u8(s.stages);
    w.u32(s.features);
    w.u8(s.window);
    w.u32(s.orig_height);
    w.u32(s.orig_width);
    w.u32(s.orig_bands);
    w.u8(s.input_bit_depth);
    w.u8(s.payload_dtype);
    w.f32(s.v_min);
    w.f32(s.v_max);
    w.bytes(s.model_hash.data(), s.model_hash.size());
    w.bytes(s.payload.data(), s.payload.size());
    return w.take();
}

LatentBitstream parse_bitstream(const std::vector<uint8_t>& bytes) {
    require(bytes.size() >= kHyl1HeaderBytes, Err::truncated_payload,
            "stream shorter than header");
    require(std::memcmp(bytes.data(), "HYL1", 4) == 0, Err::malformed_magic,
            "missing HYL1 magic");
    ByteReader r(bytes.data() + 4, bytes.size() - 4);
    LatentBitstream s;
    s.version = r.u16();
    require(s.version == kBitstreamVersion, Err::version_mismatch,
            "unsupported bitstream version " + std::to_string(s.version));
    s.sigma = r.u32();
    s.omega = r.u32();
    s.gamma = r.u32();
    s.stages = r.u8();
    s.features = r.u32();
    s.window = r.u8();
    s.orig_height = r.u32();
    s.orig_width = r.u32();
    s.orig_bands = r.u32();
    s.input_bit_depth = r.u8();
    s.payload_dtype = r.u8();
    s.v_min = r.f32();
    s.v_max = r.f32();
    r.bytes(s.model_hash.data(), s.model_hash.size());

    require(s.sigma >= 1 && s.omega >= 1 && s.gamma >= 1, Err::corrupt_header,
            "zero latent dimension");
    require(s.payload_dtype <= 1, Err::corrupt_header, "unknown payload dtype");
    require(s.input_bit_depth == 16 || s.input_bit_depth == 32, Err::corrupt_header,
            "unsupported input bit depth");
    size_t expect = s.payload_dtype == 0 ? size_t(s.latent_elements()) * 4
                                         : 8 + size_t(s.latent_elements()) * 2;
    require(r.remaining() == expect, Err::truncated_payload,
            "payload length does not match header dims");
    s.payload.resize(expect);
    r.bytes(s.payload.data(), expect);
    return s;
}

void write_bitstream(const LatentBitstream& stream, const std::string& path) {
    write_file(path, serialize_bitstream(stream));
}

LatentBitstream read_bitstream(const std::string& path) {
    return parse_bitstream(read_file(path));
}

CrReport measured_cr(const LatentBitstream& s) {
    CrReport rep;
    double orig_elems = double(s.orig_height) * s.orig_width * s.orig_bands;
    double latent_elems = double(s.latent_elements());
    rep.element_ratio = orig_elems / latent_elems;
    rep.bit_accounted = (double(s.input_bit_depth) * orig_elems) /
                        (double(s.latent_bit_depth()) * latent_elems);
    rep.header_overhead = kHyl1HeaderBytes + (s.payload_dtype == 1 ? 8 : 0);
    return rep;
}

CrReport measured_cr(const LatentBitstream& s, const HsiCube& original) {
    require(uint32_t(original.height) == s.orig_height &&
                uint32_t(original.width) == s.orig_width &&
                uint32_t(original.bands) == s.orig_bands,
            Err::shape_mismatch, "original cube dims do not match the stream header");
    require(uint32_t(original.bit_depth) == s.input_bit_depth, Err::shape_mismatch,
            "original cube bit depth does not match the stream header");
    return measured_cr(s);
}

}  // namespace hycass
