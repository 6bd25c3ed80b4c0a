#include "hycass/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>

#include "hycass/rng.hpp"

namespace hycass {

void TrainConfig::validate() const {
    require(epochs >= 0, Err::invalid_argument, "epochs must be >= 0");
    require(learning_rate >= 0.0, Err::invalid_argument, "learning rate must be >= 0");
    require(batch_size >= 1, Err::invalid_argument, "batch size must be >= 1");
    require(patch_size >= 1, Err::invalid_argument, "patch size must be >= 1");
    require(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0, Err::invalid_argument,
            "Adam betas must lie in (0,1)");
    require(adam_eps > 0.0, Err::invalid_argument, "Adam eps must be positive");
    require(checkpoint_every == 0 || !checkpoint_path.empty(), Err::invalid_argument,
            "checkpoint_every needs a checkpoint_path");
}

template <typename T>
MseResult<T> mse_loss(const Tensor<T>& x, const Tensor<T>& xhat) {
    require(x.same_shape(xhat), Err::shape_mismatch, "mse_loss operand shapes differ");
    require(x.numel() > 0, Err::empty_input, "mse_loss on empty tensors");
    MseResult<T> out;
    out.grad = Tensor<T>(x.shape);
    const double inv_n = 1.0 / double(x.numel());
    double acc = 0.0;
    for (int64_t i = 0; i < x.numel(); ++i) {
        double d = double(xhat[i]) - double(x[i]);
        acc += d * d;
        out.grad[i] = T(2.0 * d * inv_n);
    }
    out.value = acc * inv_n;
    return out;
}

template <typename T>
AdamState<T> make_adam_state(const HycassConfig& cfg) {
    AdamState<T> s;
    s.m = make_model_params<T>(cfg);
    s.v = make_model_params<T>(cfg);
    s.t = 0;
    return s;
}

template <typename T>
std::pair<ModelParams<T>, AdamState<T>> adam_step(ModelParams<T> params,
                                                  const ModelParams<T>& grads,
                                                  AdamState<T> state,
                                                  const TrainConfig& cfg) {
    state.t += 1;
    const double b1 = cfg.beta1, b2 = cfg.beta2;
    const double bc1 = 1.0 - std::pow(b1, double(state.t));
    const double bc2 = 1.0 - std::pow(b2, double(state.t));
    const double lr = cfg.learning_rate, eps = cfg.adam_eps;

    std::vector<const Tensor<T>*> gs;
    for_each_tensor(grads, [&gs](const std::string&, const Tensor<T>& t) { gs.push_back(&t); });
    std::vector<Tensor<T>*> ms, vs;
    for_each_tensor(state.m, [&ms](const std::string&, Tensor<T>& t) { ms.push_back(&t); });
    for_each_tensor(state.v, [&vs](const std::string&, Tensor<T>& t) { vs.push_back(&t); });

    size_t idx = 0;
    for_each_tensor(params, [&](const std::string& path, Tensor<T>& p) {
        const Tensor<T>& g = *gs[idx];
        Tensor<T>& m = *ms[idx];
        Tensor<T>& v = *vs[idx];
        require(g.same_shape(p), Err::shape_mismatch, "gradient shape mismatch at " + path);
        for (int64_t i = 0; i < p.numel(); ++i) {
            double gi = double(g[i]);
            if (!std::isfinite(gi))
                raise(Err::nonfinite_gradient,
                      "non-finite gradient in " + path + " at element " + std::to_string(i));
            double mi = b1 * double(m[i]) + (1.0 - b1) * gi;
            double vi = b2 * double(v[i]) + (1.0 - b2) * gi * gi;
            m[i] = T(mi);
            v[i] = T(vi);
            double update = lr * (mi / bc1) / (std::sqrt(vi / bc2) + eps);
            p[i] = T(double(p[i]) - update);
        }
        ++idx;
    });
    return {std::move(params), std::move(state)};
}

// ---------------------------------------------------------------------------
// training loop
// ---------------------------------------------------------------------------

namespace {

struct PreparedData {
    std::vector<Tensor<float>> train;  // unit-normalized
    std::vector<Tensor<float>> val;
    int64_t total_train_pixels = 0;
    bool val_is_train = false;
};

Tensor<float> to_unit_tensor(const HsiCube& cube) {
    if (cube.norm_state == NormState::unit) return cube_to_tensor<float>(cube);
    auto [unit, params] = min_max_normalize(cube);
    (void)params;
    return cube_to_tensor<float>(unit);
}

PreparedData prepare_data(const HycassConfig& model_cfg, const TrainConfig& cfg,
                          const std::vector<HsiCube>& train_cubes,
                          const std::vector<HsiCube>& val_cubes) {
    require(!train_cubes.empty(), Err::empty_input, "no training cubes");
    validate_input_dims(model_cfg, cfg.patch_size, cfg.patch_size);

    PreparedData data;
    for (const HsiCube& cube : train_cubes) {
        require(cube.bands == model_cfg.bands, Err::channel_mismatch,
                "training cube band count does not match the model");
        require(cfg.patch_size <= std::min(cube.height, cube.width), Err::patch_too_large,
                "patch size exceeds a training cube");
        data.total_train_pixels += int64_t(cube.height) * cube.width;
        data.train.push_back(to_unit_tensor(cube));
    }
    const std::vector<HsiCube>& vals = val_cubes.empty() ? train_cubes : val_cubes;
    data.val_is_train = val_cubes.empty();
    for (const HsiCube& cube : vals) {
        require(cube.bands == model_cfg.bands, Err::channel_mismatch,
                "validation cube band count does not match the model");
        validate_input_dims(model_cfg, cube.height, cube.width);
        data.val.push_back(to_unit_tensor(cube));
    }
    return data;
}

Tensor<float> slice_patch(const Tensor<float>& map, int oy, int ox, int size) {
    const int W = map.dim(1), C = map.dim(2);
    Tensor<float> out({size, size, C});
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const float* src = &map.data[((size_t(oy) + y) * W + size_t(ox) + x) * C];
            float* dst = &out.data[(size_t(y) * size + x) * C];
            std::memcpy(dst, src, sizeof(float) * size_t(C));
        }
    return out;
}

void accumulate_grads(ModelParams<float>& into, const ModelParams<float>& delta) {
    std::vector<const Tensor<float>*> src;
    for_each_tensor(delta,
                    [&src](const std::string&, const Tensor<float>& t) { src.push_back(&t); });
    size_t idx = 0;
    for_each_tensor(into, [&](const std::string&, Tensor<float>& t) {
        const Tensor<float>& d = *src[idx++];
        for (int64_t i = 0; i < t.numel(); ++i) t[i] += d[i];
    });
}

void clip_grads(ModelParams<float>& grads, double max_norm) {
    double sq = 0.0;
    for_each_tensor(grads, [&sq](const std::string&, const Tensor<float>& t) {
        for (int64_t i = 0; i < t.numel(); ++i) sq += double(t[i]) * double(t[i]);
    });
    double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    float scale = float(max_norm / norm);
    for_each_tensor(grads, [scale](const std::string&, Tensor<float>& t) {
        for (int64_t i = 0; i < t.numel(); ++i) t[i] *= scale;
    });
}

struct ValScore {
    double loss = 0.0;
    double psnr_db = 0.0;
};

ValScore validate_model(const ModelParams<float>& params,
                        const std::vector<Tensor<float>>& val) {
    ValScore score;
    double psnr_sum = 0.0;
    for (const Tensor<float>& cube : val) {
        Tensor<float> latent = encode_forward(cube, params);
        Tensor<float> recon = decode_forward(latent, params);
        MseResult<float> mse = mse_loss(cube, recon);
        score.loss += mse.value;
        psnr_sum += mse.value > 0.0 ? -10.0 * std::log10(mse.value)
                                    : std::numeric_limits<double>::infinity();
    }
    score.loss /= double(val.size());
    score.psnr_db = psnr_sum / double(val.size());
    return score;
}

TrainResult run_training(TrainerState state, const HycassConfig& model_cfg,
                         const TrainConfig& cfg, const PreparedData& data,
                         std::FILE* log) {
    const int n_train = int(data.train.size());
    int steps_per_epoch = cfg.steps_per_epoch;
    if (steps_per_epoch <= 0) {
        int64_t budget = int64_t(cfg.batch_size) * cfg.patch_size * cfg.patch_size;
        steps_per_epoch = int((data.total_train_pixels + budget - 1) / budget);
        steps_per_epoch = std::max(1, steps_per_epoch);
    }

    for (int epoch = state.epochs_completed; epoch < cfg.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        double loss_sum = 0.0;

        for (int step = 0; step < steps_per_epoch; ++step) {
            // Counter-derived stream: resuming at this global step replays
            // exactly the same patches.
            Rng rng(derive_seed(cfg.seed, 0x7261696e00000000ull ^ uint64_t(state.global_step)));
            ModelParams<float> grads = make_model_params<float>(model_cfg);
            double batch_loss = 0.0;
            const float inv_batch = 1.0f / float(cfg.batch_size);

            for (int b = 0; b < cfg.batch_size; ++b) {
                const Tensor<float>& map = data.train[size_t(rng.uniform_int(n_train))];
                int oy = rng.uniform_int(map.dim(0) - cfg.patch_size + 1);
                int ox = rng.uniform_int(map.dim(1) - cfg.patch_size + 1);
                Tensor<float> patch = slice_patch(map, oy, ox, cfg.patch_size);

                EncodeCache<float> ec;
                DecodeCache<float> dc;
                Tensor<float> latent = encode_forward(patch, state.params, &ec);
                Tensor<float> recon = decode_forward(latent, state.params, &dc);
                MseResult<float> mse = mse_loss(patch, recon);
                batch_loss += mse.value * inv_batch;

                for (int64_t i = 0; i < mse.grad.numel(); ++i) mse.grad[i] *= inv_batch;
                ModelParams<float> sample_grads = make_model_params<float>(model_cfg);
                Tensor<float> g_latent =
                    decode_backward(dc, state.params, mse.grad, sample_grads);
                encode_backward(ec, state.params, g_latent, sample_grads);
                accumulate_grads(grads, sample_grads);
            }

            if (!std::isfinite(batch_loss)) {
                if (!cfg.checkpoint_path.empty()) save_checkpoint(state, cfg.checkpoint_path);
                raise(Err::nonfinite_loss,
                      "loss diverged at step " + std::to_string(state.global_step));
            }
            if (cfg.grad_clip > 0.0) clip_grads(grads, cfg.grad_clip);
            std::tie(state.params, state.adam) =
                adam_step(std::move(state.params), grads, std::move(state.adam), cfg);
            loss_sum += batch_loss;
            ++state.global_step;
        }

        ValScore val = validate_model(state.params, data.val);
        auto t1 = std::chrono::steady_clock::now();
        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.train_loss = loss_sum / steps_per_epoch;
        rec.val_loss = val.loss;
        rec.val_psnr_db = val.psnr_db;
        rec.seconds = std::chrono::duration<double>(t1 - t0).count();
        state.history.epochs.push_back(rec);
        state.epochs_completed = epoch + 1;

        if (!state.has_best || val.psnr_db > state.best_val_psnr) {
            state.best_params = state.params;
            state.best_val_psnr = val.psnr_db;
            state.best_epoch = epoch + 1;
            state.has_best = true;
        }
        if (log)
            std::fprintf(log, "epoch %d/%d train_loss %.6e val_loss %.6e val_psnr %.3f dB %.2f s\n",
                         rec.epoch, cfg.epochs, rec.train_loss, rec.val_loss, rec.val_psnr_db,
                         rec.seconds);
        if (cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0)
            save_checkpoint(state, cfg.checkpoint_path);
        if (cfg.target_val_psnr > 0.0 && val.psnr_db >= cfg.target_val_psnr) break;
    }

    TrainResult result;
    result.best_params = state.has_best ? state.best_params : state.params;
    result.history = state.history;
    result.best_val_psnr = state.best_val_psnr;
    result.best_epoch = state.best_epoch;
    result.validated_on_train = data.val_is_train;
    result.final_state = std::move(state);
    return result;
}

}  // namespace

TrainResult train(const HycassConfig& model_cfg, const TrainConfig& train_cfg,
                  const std::vector<HsiCube>& train_cubes,
                  const std::vector<HsiCube>& val_cubes, std::FILE* log) {
    model_cfg.validate();
    train_cfg.validate();
    PreparedData data = prepare_data(model_cfg, train_cfg, train_cubes, val_cubes);

    TrainerState state;
    state.params = init_params<float>(model_cfg, train_cfg.seed);
    state.adam = make_adam_state<float>(model_cfg);
    TrainResult result = run_training(std::move(state), model_cfg, train_cfg, data, log);
    if (result.validated_on_train && log)
        std::fprintf(log, "warning: empty validation set, validated on training cubes\n");
    return result;
}

TrainResult train_continue(TrainerState state, const HycassConfig& model_cfg,
                           const TrainConfig& train_cfg,
                           const std::vector<HsiCube>& train_cubes,
                           const std::vector<HsiCube>& val_cubes, std::FILE* log) {
    model_cfg.validate();
    train_cfg.validate();
    require(state.params.cfg == model_cfg, Err::config_mismatch,
            "checkpoint config does not match requested model config");
    PreparedData data = prepare_data(model_cfg, train_cfg, train_cubes, val_cubes);
    return run_training(std::move(state), model_cfg, train_cfg, data, log);
}

// ---------------------------------------------------------------------------
// history CSV and training checkpoint container
// ---------------------------------------------------------------------------

void write_history_csv(const TrainHistory& history, const std::string& path) {
    std::string text = "epoch,train_loss,val_loss,val_psnr_db,seconds\n";
    char buf[160];
    for (const EpochRecord& r : history.epochs) {
        std::snprintf(buf, sizeof(buf), "%d,%.9e,%.9e,%.3f,%.3f\n", r.epoch, r.train_loss,
                      r.val_loss, r.val_psnr_db, r.seconds);
        text += buf;
    }
    write_file(path, std::vector<uint8_t>(text.begin(), text.end()));
}

namespace {

void write_param_payload(ByteWriter& w, const ModelParams<float>& p) {
    for_each_tensor(p, [&w](const std::string&, const Tensor<float>& t) {
        for (int64_t i = 0; i < t.numel(); ++i) w.f32(t[i]);
    });
}

void read_param_payload(ByteReader& r, ModelParams<float>& p) {
    for_each_tensor(p, [&r](const std::string&, Tensor<float>& t) {
        for (int64_t i = 0; i < t.numel(); ++i) t[i] = r.f32();
    });
}

}  // namespace

void save_checkpoint(const TrainerState& state, const std::string& path) {
    ByteWriter w;
    std::vector<uint8_t> model_bytes = serialize_model(state.params);
    w.bytes(model_bytes.data(), model_bytes.size());

    w.bytes("OPT1", 4);
    w.u64(uint64_t(state.adam.t));
    w.u64(uint64_t(state.global_step));
    w.u32(uint32_t(state.epochs_completed));
    write_param_payload(w, state.adam.m);
    write_param_payload(w, state.adam.v);

    w.bytes("BST1", 4);
    w.u8(state.has_best ? 1 : 0);
    w.f64(state.best_val_psnr);
    w.i32(state.best_epoch);
    if (state.has_best) write_param_payload(w, state.best_params);

    w.bytes("HST1", 4);
    w.u32(uint32_t(state.history.epochs.size()));
    for (const EpochRecord& r : state.history.epochs) {
        w.u32(uint32_t(r.epoch));
        w.f64(r.train_loss);
        w.f64(r.val_loss);
        w.f64(r.val_psnr_db);
        w.f64(r.seconds);
    }

    Digest16 file_hash = md5(w.buffer());
    w.bytes(file_hash.data(), file_hash.size());
    write_file(path, w.buffer());
}

TrainerState load_checkpoint(const std::string& path) {
    std::vector<uint8_t> bytes = read_file(path);
    require(bytes.size() > 16, Err::truncated_payload, "checkpoint too small");

    Digest16 stored;
    std::memcpy(stored.data(), bytes.data() + bytes.size() - 16, 16);
    Digest16 computed = md5(bytes.data(), bytes.size() - 16);
    require(stored == computed, Err::hash_mismatch, "checkpoint integrity hash mismatch");

    ByteReader r(bytes.data(), bytes.size() - 16);
    TrainerState state;
    state.params = parse_model(r);
    const HycassConfig& cfg = state.params.cfg;

    char magic[4];
    r.bytes(magic, 4);
    require(std::memcmp(magic, "OPT1", 4) == 0, Err::corrupt_header, "missing OPT1 section");
    state.adam = make_adam_state<float>(cfg);
    state.adam.t = int64_t(r.u64());
    state.global_step = int64_t(r.u64());
    state.epochs_completed = int(r.u32());
    read_param_payload(r, state.adam.m);
    read_param_payload(r, state.adam.v);

    r.bytes(magic, 4);
    require(std::memcmp(magic, "BST1", 4) == 0, Err::corrupt_header, "missing BST1 section");
    state.has_best = r.u8() != 0;
    state.best_val_psnr = r.f64();
    state.best_epoch = r.i32();
    if (state.has_best) {
        state.best_params = make_model_params<float>(cfg);
        read_param_payload(r, state.best_params);
        state.best_params.cfg = cfg;
    }

    r.bytes(magic, 4);
    require(std::memcmp(magic, "HST1", 4) == 0, Err::corrupt_header, "missing HST1 section");
    uint32_t n = r.u32();
    state.history.epochs.resize(n);
    for (uint32_t i = 0; i < n; ++i) {
        EpochRecord& rec = state.history.epochs[i];
        rec.epoch = int(r.u32());
        rec.train_loss = r.f64();
        rec.val_loss = r.f64();
        rec.val_psnr_db = r.f64();
        rec.seconds = r.f64();
    }
    return state;
}

// ---------------------------------------------------------------------------
// explicit instantiation
// ---------------------------------------------------------------------------

template MseResult<float> mse_loss<float>(const Tensor<float>&, const Tensor<float>&);
template MseResult<double> mse_loss<double>(const Tensor<double>&, const Tensor<double>&);
template AdamState<float> make_adam_state<float>(const HycassConfig&);
template AdamState<double> make_adam_state<double>(const HycassConfig&);
template std::pair<ModelParams<float>, AdamState<float>> adam_step<float>(
    ModelParams<float>, const ModelParams<float>&, AdamState<float>, const TrainConfig&);
template std::pair<ModelParams<double>, AdamState<double>> adam_step<double>(
    ModelParams<double>, const ModelParams<double>&, AdamState<double>, const TrainConfig&);

}  // namespace hycass
