#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hycass/model.hpp"

namespace hycass {

enum class LatentDtype : uint8_t { f32 = 0, u16 = 1 };

// HYL1 latent bitstream. Little-endian layout, bit-exact:
//   "HYL1" | u16 version | u32 Sigma | u32 Omega | u32 Gamma | u8 S | u32 N |
//   u8 window | u32 H | u32 W | u32 C | u8 N_b | u8 payload dtype |
//   f32 v_min | f32 v_max | 16-byte model hash | payload
// N_b is the input bit depth in bits (16 or 32). f32 payloads are the raw
// latent words; u16 payloads start with the f32 latent min/max used for the
// linear quantization, then one u16 per latent element.
inline constexpr uint16_t kBitstreamVersion = 1;
inline constexpr size_t kHyl1HeaderBytes = 4 + 2 + 12 + 1 + 4 + 1 + 12 + 1 + 1 + 8 + 16;

struct LatentBitstream {
    uint16_t version = kBitstreamVersion;
    uint32_t sigma = 0;
    uint32_t omega = 0;
    uint32_t gamma = 0;
    uint8_t stages = 0;
    uint32_t features = 0;
    uint8_t window = 0;
    uint32_t orig_height = 0;
    uint32_t orig_width = 0;
    uint32_t orig_bands = 0;
    uint8_t input_bit_depth = 16;  // N_b
    uint8_t payload_dtype = 0;     // LatentDtype
    float v_min = 0.0f;
    float v_max = 1.0f;
    Digest16 model_hash{};
    std::vector<uint8_t> payload;

    int64_t latent_elements() const { return int64_t(sigma) * omega * gamma; }
    int latent_bit_depth() const { return payload_dtype == 0 ? 32 : 16; }  // N_b hat
};

/// Normalizes (if raw), encodes and serializes. The header alone determines
/// decodability with a matching model.
LatentBitstream compress(const HsiCube& cube, const ModelParams<float>& params,
                         LatentDtype dtype = LatentDtype::f32);

/// Inverse of compress: checks the model hash, decodes and denormalizes
/// back to the raw sample domain.
HsiCube decompress(const LatentBitstream& stream, const ModelParams<float>& params);

std::vector<uint8_t> serialize_bitstream(const LatentBitstream& stream);
LatentBitstream parse_bitstream(const std::vector<uint8_t>& bytes);

void write_bitstream(const LatentBitstream& stream, const std::string& path);
LatentBitstream read_bitstream(const std::string& path);

struct CrReport {
    /// (N_b * H * W * C) / (N_b_hat * Sigma * Omega * Gamma)
    double bit_accounted = 0.0;
    /// (H * W * C) / (Sigma * Omega * Gamma); equals achieved_cr of the config
    double element_ratio = 0.0;
    /// header bytes, excluded from both ratios
    size_t header_overhead = 0;
};

CrReport measured_cr(const LatentBitstream& stream);
/// Cross-checks the original cube's dims and bit depth against the header.
CrReport measured_cr(const LatentBitstream& stream, const HsiCube& original);

}  // namespace hycass
