#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hycass/rng.hpp"

namespace hycass {

enum class NormState : uint8_t { raw, unit };

/// Global min/max of a cube in raw sample units; v_max > v_min always.
struct NormalizationParams {
    double v_min = 0.0;
    double v_max = 1.0;
};

/// A hyperspectral cube: H x W x C samples in pixel-major [h][w][c] order.
/// bit_depth is the storage depth of the source samples (16 for sensor
/// words, 32 for float data) and drives compression-ratio accounting.
struct HsiCube {
    int height = 0;
    int width = 0;
    int bands = 0;
    int bit_depth = 16;
    NormState norm_state = NormState::raw;
    std::optional<NormalizationParams> norm;
    std::vector<double> values;

    double& at(int h, int w, int c) {
        return values[(size_t(h) * width + w) * bands + c];
    }
    double at(int h, int w, int c) const {
        return values[(size_t(h) * width + w) * bands + c];
    }
    int64_t sample_count() const { return int64_t(height) * width * bands; }

    void validate() const;  // throws on broken invariants
};

struct SplitSpec {
    double train_fraction = 0.7;
    double val_fraction = 0.2;
    double test_fraction = 0.1;
    uint64_t seed = 0;

    void validate() const;
};

struct SyntheticSpec {
    int count = 1;
    int height = 32;
    int width = 32;
    int bands = 16;
    double smoothness = 4.0;  // spatial correlation length in pixels
    int endmembers = 3;
    uint64_t seed = 0;

    void validate() const;
};

// HSC1 cube container. Little-endian layout:
//   "HSC1" | u32 H | u32 W | u32 C | u8 dtype | f32 v_min | f32 v_max | payload
// dtype: 0 = u16 raw, 1 = f32 raw, 2 = f32 unit-normalized.
// Payload is [h][w][c] order. Header is 25 bytes.
inline constexpr size_t kHsc1HeaderBytes = 25;

HsiCube read_cube(const std::string& path);
void write_cube(const HsiCube& cube, const std::string& path);

std::vector<uint8_t> serialize_cube(const HsiCube& cube);
HsiCube parse_cube(const std::vector<uint8_t>& bytes);

/// Maps values affinely onto [0,1] using the cube-global min/max.
/// Rejects constant cubes (degenerate_range).
std::pair<HsiCube, NormalizationParams> min_max_normalize(const HsiCube& cube);

/// Per-band variant (one params entry per band). Not used by the codec path,
/// whose header carries a single global pair.
std::pair<HsiCube, std::vector<NormalizationParams>> min_max_normalize_per_band(const HsiCube& cube);

HsiCube denormalize(const HsiCube& cube, const NormalizationParams& params);

/// Central h x w window; offsets floor((H-h)/2), floor((W-w)/2).
HsiCube center_crop(const HsiCube& cube, int h, int w);

/// Uniformly random size x size patch (full spectrum kept).
HsiCube sample_patch(const HsiCube& cube, int size, Rng& rng);

/// Low-rank linear mixing model: smooth random endmember spectra weighted by
/// spatially smoothed abundance maps, small noise, quantized to u16 counts.
std::vector<HsiCube> synth_dataset(const SyntheticSpec& spec);

struct SplitIndices {
    std::vector<int> train, val, test;
    bool degenerate = false;  // val or test came out empty
};

SplitIndices split_indices(int count, const SplitSpec& spec);

struct SplitCubes {
    std::vector<HsiCube> train, val, test;
    bool degenerate = false;
};

SplitCubes split_dataset(std::vector<HsiCube> cubes, const SplitSpec& spec);

}  // namespace hycass
