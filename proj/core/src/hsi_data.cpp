#include "hycass/hsi_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "hycass/io_util.hpp"

namespace hycass {

namespace {

constexpr uint8_t kDtypeU16Raw = 0;
constexpr uint8_t kDtypeF32Raw = 1;
constexpr uint8_t kDtypeF32Unit = 2;

uint8_t dtype_of(const HsiCube& cube) {
    if (cube.norm_state == NormState::unit) return kDtypeF32Unit;
    return cube.bit_depth == 16 ? kDtypeU16Raw : kDtypeF32Raw;
}

}  // namespace

void HsiCube::validate() const {
    require(height >= 1 && width >= 1 && bands >= 1, Err::invalid_argument,
            "cube dims must be >= 1");
    require(bit_depth == 16 || bit_depth == 32, Err::invalid_argument,
            "bit_depth must be 16 or 32");
    require(int64_t(values.size()) == sample_count(), Err::shape_mismatch,
            "value count does not match H*W*C");
    if (norm_state == NormState::unit) {
        for (double v : values)
            require(v >= 0.0 && v <= 1.0, Err::invalid_argument,
                    "unit cube has value outside [0,1]");
    }
}

void SplitSpec::validate() const {
    auto frac_ok = [](double f) { return f > 0.0 && f < 1.0; };
    require(frac_ok(train_fraction) && frac_ok(val_fraction) && frac_ok(test_fraction),
            Err::invalid_argument, "split fractions must lie in (0,1)");
    double sum = train_fraction + val_fraction + test_fraction;
    require(std::abs(sum - 1.0) <= 1e-9, Err::invalid_argument,
            "split fractions must sum to 1");
}

void SyntheticSpec::validate() const {
    require(count >= 1 && height >= 1 && width >= 1 && bands >= 1, Err::invalid_argument,
            "synthetic spec dims must be >= 1");
    require(endmembers >= 1 && endmembers <= bands, Err::invalid_argument,
            "endmembers must be in [1, bands]");
    require(smoothness >= 0.0, Err::invalid_argument, "smoothness must be >= 0");
}

std::vector<uint8_t> serialize_cube(const HsiCube& cube) {
    cube.validate();
    uint8_t dtype = dtype_of(cube);
    ByteWriter w;
    w.bytes("HSC1", 4);
    w.u32(uint32_t(cube.height));
    w.u32(uint32_t(cube.width));
    w.u32(uint32_t(cube.bands));
    w.u8(dtype);
    NormalizationParams np = cube.norm.value_or(NormalizationParams{0.0, 1.0});
    w.f32(float(np.v_min));
    w.f32(float(np.v_max));
    if (dtype == kDtypeU16Raw) {
        // u16 payloads can only carry integral sensor words
        for (double v : cube.values) {
            require(v >= 0.0 && v <= 65535.0 && v == std::floor(v), Err::invalid_argument,
                    "u16 cube payload requires integral samples in [0,65535]; "
                    "quantize before writing");
            w.u16(uint16_t(v));
        }
    } else {
        for (double v : cube.values) w.f32(float(v));
    }
    return w.take();
}

HsiCube parse_cube(const std::vector<uint8_t>& bytes) {
    require(bytes.size() >= kHsc1HeaderBytes, Err::truncated_payload, "file shorter than header");
    require(std::memcmp(bytes.data(), "HSC1", 4) == 0, Err::malformed_magic,
            "missing HSC1 magic");
    ByteReader r(bytes.data() + 4, bytes.size() - 4);
    HsiCube cube;
    uint32_t h = r.u32(), wd = r.u32(), c = r.u32();
    uint8_t dtype = r.u8();
    float v_min = r.f32(), v_max = r.f32();
    require(dtype <= kDtypeF32Unit, Err::corrupt_header, "unknown dtype code");
    require(h >= 1 && wd >= 1 && c >= 1, Err::corrupt_header, "zero dimension in header");

    uint64_t n = uint64_t(h) * wd * c;
    uint64_t elem_bytes = dtype == kDtypeU16Raw ? 2 : 4;
    require(n <= (uint64_t(1) << 31) / elem_bytes, Err::dimension_overflow,
            "declared dims exceed supported payload size");
    require(r.remaining() >= n * elem_bytes, Err::truncated_payload,
            "payload shorter than H*W*C samples");

    cube.height = int(h);
    cube.width = int(wd);
    cube.bands = int(c);
    cube.bit_depth = dtype == kDtypeU16Raw ? 16 : 32;
    cube.norm_state = dtype == kDtypeF32Unit ? NormState::unit : NormState::raw;
    if (dtype == kDtypeF32Unit) {
        require(v_max > v_min, Err::corrupt_header, "unit cube needs v_max > v_min");
        cube.norm = NormalizationParams{double(v_min), double(v_max)};
    }
    cube.values.resize(size_t(n));
    if (dtype == kDtypeU16Raw) {
        for (uint64_t i = 0; i < n; ++i) cube.values[i] = double(r.u16());
    } else {
        for (uint64_t i = 0; i < n; ++i) cube.values[i] = double(r.f32());
    }
    return cube;
}

HsiCube read_cube(const std::string& path) {
    return parse_cube(read_file(path));
}

void write_cube(const HsiCube& cube, const std::string& path) {
    write_file(path, serialize_cube(cube));
}

std::pair<HsiCube, NormalizationParams> min_max_normalize(const HsiCube& cube) {
    require(cube.norm_state == NormState::raw, Err::invalid_argument,
            "cube already normalized");
    require(!cube.values.empty(), Err::empty_input, "empty cube");
    auto [lo_it, hi_it] = std::minmax_element(cube.values.begin(), cube.values.end());
    double lo = *lo_it, hi = *hi_it;
    require(hi > lo, Err::degenerate_range, "constant cube cannot be normalized");

    NormalizationParams params{lo, hi};
    HsiCube out = cube;
    double scale = 1.0 / (hi - lo);
    for (double& v : out.values) v = (v - lo) * scale;
    out.norm_state = NormState::unit;
    out.norm = params;
    return {std::move(out), params};
}

std::pair<HsiCube, std::vector<NormalizationParams>> min_max_normalize_per_band(
    const HsiCube& cube) {
    require(cube.norm_state == NormState::raw, Err::invalid_argument,
            "cube already normalized");
    require(!cube.values.empty(), Err::empty_input, "empty cube");
    int C = cube.bands;
    std::vector<NormalizationParams> params(static_cast<size_t>(C));
    for (int c = 0; c < C; ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int h = 0; h < cube.height; ++h)
            for (int w = 0; w < cube.width; ++w) {
                double v = cube.at(h, w, c);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        require(hi > lo, Err::degenerate_range,
                "band " + std::to_string(c) + " is constant");
        params[size_t(c)] = {lo, hi};
    }
    HsiCube out = cube;
    for (int h = 0; h < cube.height; ++h)
        for (int w = 0; w < cube.width; ++w)
            for (int c = 0; c < C; ++c) {
                const auto& p = params[size_t(c)];
                out.at(h, w, c) = (cube.at(h, w, c) - p.v_min) / (p.v_max - p.v_min);
            }
    out.norm_state = NormState::unit;
    out.norm.reset();  // scalar header field cannot carry per-band params
    return {std::move(out), std::move(params)};
}

HsiCube denormalize(const HsiCube& cube, const NormalizationParams& params) {
    require(cube.norm_state == NormState::unit, Err::invalid_argument,
            "denormalize expects a unit cube");
    require(params.v_max > params.v_min, Err::degenerate_range, "v_max must exceed v_min");
    HsiCube out = cube;
    double span = params.v_max - params.v_min;
    for (double& v : out.values) v = v * span + params.v_min;
    out.norm_state = NormState::raw;
    out.norm.reset();
    return out;
}

HsiCube center_crop(const HsiCube& cube, int h, int w) {
    require(h >= 1 && w >= 1 && h <= cube.height && w <= cube.width, Err::crop_too_large,
            "crop window exceeds source dims");
    int oy = (cube.height - h) / 2;
    int ox = (cube.width - w) / 2;
    HsiCube out;
    out.height = h;
    out.width = w;
    out.bands = cube.bands;
    out.bit_depth = cube.bit_depth;
    out.norm_state = cube.norm_state;
    out.norm = cube.norm;
    out.values.resize(size_t(h) * w * cube.bands);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < cube.bands; ++c)
                out.at(y, x, c) = cube.at(oy + y, ox + x, c);
    return out;
}

HsiCube sample_patch(const HsiCube& cube, int size, Rng& rng) {
    require(size >= 1 && size <= std::min(cube.height, cube.width), Err::patch_too_large,
            "patch exceeds source dims");
    int oy = rng.uniform_int(cube.height - size + 1);
    int ox = rng.uniform_int(cube.width - size + 1);
    HsiCube out;
    out.height = size;
    out.width = size;
    out.bands = cube.bands;
    out.bit_depth = cube.bit_depth;
    out.norm_state = cube.norm_state;
    out.norm = cube.norm;
    out.values.resize(size_t(size) * size * cube.bands);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < cube.bands; ++c)
                out.at(y, x, c) = cube.at(oy + y, ox + x, c);
    return out;
}

namespace {

// Separable box blur, clamped at borders, applied twice for a roughly
// Gaussian kernel. radius <= 0 is a no-op.
void box_blur_2d(std::vector<double>& img, int H, int W, int radius) {
    if (radius <= 0) return;
    std::vector<double> tmp(img.size());
    for (int pass = 0; pass < 2; ++pass) {
        // horizontal
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int xx = std::clamp(x + k, 0, W - 1);
                    acc += img[size_t(y) * W + xx];
                }
                tmp[size_t(y) * W + x] = acc / (2 * radius + 1);
            }
        }
        // vertical
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int yy = std::clamp(y + k, 0, H - 1);
                    acc += tmp[size_t(yy) * W + x];
                }
                img[size_t(y) * W + x] = acc / (2 * radius + 1);
            }
        }
    }
}

}  // namespace

std::vector<HsiCube> synth_dataset(const SyntheticSpec& spec) {
    spec.validate();
    const int H = spec.height, W = spec.width, C = spec.bands, E = spec.endmembers;
    const int radius = int(std::min(spec.smoothness, double(std::max(H, W))));
    std::vector<HsiCube> cubes;
    cubes.reserve(size_t(spec.count));

    for (int idx = 0; idx < spec.count; ++idx) {
        Rng rng(derive_seed(spec.seed, uint64_t(idx)));

        // Smooth positive endmember spectra: a few Gaussian bumps on a floor.
        std::vector<double> spectra(static_cast<size_t>(E) * C);
        for (int e = 0; e < E; ++e) {
            int bumps = 3;
            std::vector<double> amp(bumps), mu(bumps), sg(bumps);
            for (int b = 0; b < bumps; ++b) {
                amp[b] = rng.uniform(0.3, 1.0);
                mu[b] = rng.uniform(0.0, double(C - 1));
                sg[b] = rng.uniform(std::max(1.0, C / 16.0), std::max(2.0, C / 4.0));
            }
            for (int c = 0; c < C; ++c) {
                double v = 0.15;
                for (int b = 0; b < bumps; ++b) {
                    double d = (c - mu[b]) / sg[b];
                    v += amp[b] * std::exp(-0.5 * d * d);
                }
                spectra[size_t(e) * C + c] = v;
            }
        }

        // Smoothed nonnegative abundance maps.
        std::vector<double> abundance(static_cast<size_t>(E) * H * W);
        for (int e = 0; e < E; ++e) {
            std::vector<double> map(static_cast<size_t>(H) * W);
            for (double& v : map) v = rng.uniform();
            box_blur_2d(map, H, W, radius);
            std::copy(map.begin(), map.end(), abundance.begin() + size_t(e) * H * W);
        }

        HsiCube cube;
        cube.height = H;
        cube.width = W;
        cube.bands = C;
        cube.bit_depth = 16;
        cube.norm_state = NormState::raw;
        cube.values.assign(size_t(H) * W * C, 0.0);
        double peak = 0.0;
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                for (int c = 0; c < C; ++c) {
                    double v = 0.0;
                    for (int e = 0; e < E; ++e)
                        v += abundance[(size_t(e) * H + y) * W + x] * spectra[size_t(e) * C + c];
                    cube.at(y, x, c) = v;
                    peak = std::max(peak, v);
                }

        // Scale to sensor counts, add small noise, quantize to exact u16 words.
        double scale = 48000.0 / peak;
        double noise_sd = 1e-3 * 48000.0;
        for (double& v : cube.values) {
            double n = v * scale + rng.normal() * noise_sd;
            v = std::round(std::clamp(n, 0.0, 65535.0));
        }
        cubes.push_back(std::move(cube));
    }
    return cubes;
}

SplitIndices split_indices(int count, const SplitSpec& spec) {
    spec.validate();
    require(count >= 1, Err::empty_input, "cannot split an empty dataset");

    std::vector<int> order(static_cast<size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(spec.seed, 0xdead5eedull));
    // Fisher-Yates with our own rng for cross-stdlib determinism.
    for (int i = count - 1; i > 0; --i) {
        int j = rng.uniform_int(i + 1);
        std::swap(order[size_t(i)], order[size_t(j)]);
    }

    int n_val = int(std::llround(count * spec.val_fraction));
    int n_test = int(std::llround(count * spec.test_fraction));
    while (n_val + n_test > count - 1 && n_test > 0) --n_test;
    while (n_val + n_test > count - 1 && n_val > 0) --n_val;
    int n_train = count - n_val - n_test;  // remainder goes to train

    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + n_train);
    out.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    out.test.assign(order.begin() + n_train + n_val, order.end());
    out.degenerate = out.val.empty() || out.test.empty();
    return out;
}

SplitCubes split_dataset(std::vector<HsiCube> cubes, const SplitSpec& spec) {
    SplitIndices idx = split_indices(int(cubes.size()), spec);
    SplitCubes out;
    out.degenerate = idx.degenerate;
    auto move_set = [&cubes](const std::vector<int>& ids, std::vector<HsiCube>& dst) {
        dst.reserve(ids.size());
        for (int i : ids) dst.push_back(std::move(cubes[size_t(i)]));
    };
    move_set(idx.train, out.train);
    move_set(idx.val, out.val);
    move_set(idx.test, out.test);
    return out;
}

}  // namespace hycass
