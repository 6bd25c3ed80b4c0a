#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "hycass/model.hpp"

namespace hycass {

struct TrainConfig {
    int epochs = 100;
    double learning_rate = 1e-4;
    int batch_size = 16;
    int patch_size = 32;
    uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int checkpoint_every = 0;        // epochs between periodic saves; 0 = off
    std::string checkpoint_path;
    int steps_per_epoch = 0;         // 0 = ceil(total train pixels / (batch * patch^2))
    double grad_clip = 0.0;          // global-norm clip; 0 = off
    double target_val_psnr = 0.0;    // early stop once reached; 0 = off

    void validate() const;
};

template <typename T>
struct MseResult {
    double value = 0.0;
    Tensor<T> grad;  // d loss / d xhat
};

/// MSE = mean squared elementwise difference; grad = 2 (xhat - x) / n.
template <typename T>
MseResult<T> mse_loss(const Tensor<T>& x, const Tensor<T>& xhat);

/// First/second Adam moments mirroring the parameter layout, plus the step
/// counter t (incremented before each update).
template <typename T>
struct AdamState {
    ModelParams<T> m;
    ModelParams<T> v;
    int64_t t = 0;
};

template <typename T>
AdamState<T> make_adam_state(const HycassConfig& cfg);

/// Standard bias-corrected Adam. Value semantics: pass the old state in,
/// get the new one back. Throws nonfinite_gradient on NaN/Inf gradients.
template <typename T>
std::pair<ModelParams<T>, AdamState<T>> adam_step(ModelParams<T> params,
                                                  const ModelParams<T>& grads,
                                                  AdamState<T> state,
                                                  const TrainConfig& cfg);

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_psnr_db = 0.0;
    double seconds = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

void write_history_csv(const TrainHistory& history, const std::string& path);

/// Complete training state; everything needed to resume bit-exactly.
struct TrainerState {
    ModelParams<float> params;
    AdamState<float> adam;
    int epochs_completed = 0;
    int64_t global_step = 0;
    ModelParams<float> best_params;
    double best_val_psnr = 0.0;
    bool has_best = false;
    int best_epoch = -1;
    TrainHistory history;
};

struct TrainResult {
    ModelParams<float> best_params;  // by validation PSNR
    TrainHistory history;
    double best_val_psnr = 0.0;
    int best_epoch = -1;
    bool validated_on_train = false;  // empty val set; train cubes stood in
    TrainerState final_state;
};

/// Trains from a fresh init_params(seed). Each step samples batch_size
/// random patches (per-step counter-derived RNG, so runs are deterministic
/// and resumable), normalizes per cube, and applies Adam on the MSE.
TrainResult train(const HycassConfig& model_cfg, const TrainConfig& train_cfg,
                  const std::vector<HsiCube>& train_cubes,
                  const std::vector<HsiCube>& val_cubes, std::FILE* log = nullptr);

/// Continues a loaded TrainerState up to train_cfg.epochs total epochs.
TrainResult train_continue(TrainerState state, const HycassConfig& model_cfg,
                           const TrainConfig& train_cfg,
                           const std::vector<HsiCube>& train_cubes,
                           const std::vector<HsiCube>& val_cubes,
                           std::FILE* log = nullptr);

// Training checkpoint = HYW1 model container + optimizer, best-params and
// history sections + trailing MD5 over the whole file.
void save_checkpoint(const TrainerState& state, const std::string& path);
TrainerState load_checkpoint(const std::string& path);

}  // namespace hycass
