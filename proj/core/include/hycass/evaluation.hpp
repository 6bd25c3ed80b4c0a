#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "hycass/hsi_data.hpp"
#include "hycass/model.hpp"
#include "hycass/training.hpp"

namespace hycass {

struct PsnrResult {
    double db = 0.0;
    bool infinite = false;  // MSE was exactly zero
};

/// PSNR = 10 log10(MAX^2 / MSE), in dB.
PsnrResult psnr(const HsiCube& x, const HsiCube& xhat, double max_val = 1.0);
PsnrResult psnr(const Tensor<double>& x, const Tensor<double>& xhat, double max_val = 1.0);

struct SaResult {
    double mean_deg = 0.0;
    int64_t excluded = 0;  // zero-spectrum pixels left out of the mean
};

/// Mean per-pixel angle between spectra, in degrees. Cosines are clamped to
/// [-1, 1]; pixels with a zero spectrum on either side are excluded.
SaResult spectral_angle(const HsiCube& x, const HsiCube& xhat);

struct SaMapResult {
    Tensor<double> degrees;  // {H, W}; NaN where undefined
    int64_t excluded = 0;
    double mean_deg = 0.0;
    double min_deg = 0.0;
    double max_deg = 0.0;
};

SaMapResult sa_error_map(const HsiCube& x, const HsiCube& xhat);

/// 16-bit PGM, linear 0-10 degrees clamped, plus a "<path>.txt" sidecar with
/// min/max/mean and the excluded-pixel count.
void write_sa_map_pgm(const SaMapResult& map, const std::string& path);

// ---------------------------------------------------------------------------
// PCA spectral baseline
// ---------------------------------------------------------------------------

struct PcaModel {
    std::vector<double> mean;  // length C
    Tensor<double> axes;       // {C, gamma}, orthonormal columns
    int gamma = 0;
};

/// Mean-centered principal axes of a {n, C} pixel matrix: top-gamma
/// eigenvectors of the sample covariance, signs fixed so each axis's
/// largest-magnitude entry is positive.
PcaModel pca_fit(const Tensor<double>& pixels, int gamma);

/// Keeps the leading `gamma` axes (nested basis, no refit).
PcaModel pca_truncate(const PcaModel& model, int gamma);

struct PcaCodecResult {
    HsiCube reconstruction;
    double cr_spec = 0.0;  // C / gamma
};

/// Projects each pixel onto the axes and back.
PcaCodecResult pca_codec(const HsiCube& cube, const PcaModel& model);

/// Uniform random subsample of at most max_pixels spectra across the cubes.
Tensor<double> collect_pixels(const std::vector<HsiCube>& cubes, int64_t max_pixels,
                              uint64_t seed);

// ---------------------------------------------------------------------------
// rate-distortion sweep
// ---------------------------------------------------------------------------

struct RdGridPoint {
    int stages = 0;
    int gamma = 0;          // used when explicit_gamma
    double target_cr = 0.0; // used otherwise
    bool explicit_gamma = true;
};

/// Grid file: one point per line, "S,gamma" or "S,target_cr=X".
/// '#' starts a comment; blank lines are skipped.
std::vector<RdGridPoint> parse_grid_file(const std::string& path);

struct RdRecord {
    std::string dataset_id;
    int stages = 0;
    int gamma = 0;
    double cr = 0.0;
    double cr_spec = 0.0;
    double cr_spat = 0.0;
    double psnr_db = 0.0;
    double sa_deg = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

std::string rd_csv_header();
std::string rd_csv_row(const RdRecord& r);

struct RdSweepOptions {
    HycassConfig base_model;  // stages/latent_channels overridden per point
    TrainConfig train;        // per-point seed derived from train.seed and index
    std::string dataset_id = "dataset";
    int jobs = 1;
    std::string csv_path;     // optional; existing (S,gamma) rows are skipped
    bool sa_on_raw = false;   // compute SA on denormalized data instead
};

/// Trains and evaluates one model per grid point. Metrics come from the test
/// split, falling back to val then train. Failed points are recorded with an
/// error marker and the sweep continues. Results are ordered by grid index
/// regardless of job count.
std::vector<RdRecord> rd_sweep(const SplitCubes& data, const std::vector<RdGridPoint>& grid,
                               const RdSweepOptions& opt,
                               std::vector<TrainHistory>* histories = nullptr,
                               std::FILE* log = nullptr);

}  // namespace hycass
