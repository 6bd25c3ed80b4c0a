#include "hycass/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "hycass/rng.hpp"
#include "hycass/training.hpp"

namespace hycass {

GradCheckReport run_grad_check(FdProblem& problem, const GradCheckOptions& opt) {
    GradCheckReport report;
    report.tolerance = opt.tolerance;

    std::vector<Tensor<double>> analytic = problem.analytic();
    require(analytic.size() == problem.tensors.size(), Err::shape_mismatch,
            "analytic gradient count mismatch");
    if (opt.sabotage != 0.0) {
        for (Tensor<double>& g : analytic)
            if (g.numel() > 0) {
                g[0] += opt.sabotage;
                break;
            }
    }

    const double h = opt.fd_step;
    for (size_t ti = 0; ti < problem.tensors.size(); ++ti) {
        auto& [name, tensor] = problem.tensors[ti];
        const Tensor<double>& grad = analytic[ti];
        require(grad.same_shape(*tensor), Err::shape_mismatch,
                "analytic gradient shape mismatch for " + name);
        GradCheckEntry entry;
        entry.name = name;
        entry.elements = tensor->numel();
        for (int64_t i = 0; i < tensor->numel(); ++i) {
            double saved = (*tensor)[i];
            (*tensor)[i] = saved + h;
            double up = problem.forward();
            (*tensor)[i] = saved - h;
            double down = problem.forward();
            (*tensor)[i] = saved;
            double fd = (up - down) / (2.0 * h);
            double a = grad[i];
            double abs_err = std::abs(a - fd);
            double rel = abs_err / std::max({std::abs(a), std::abs(fd), opt.rel_floor});
            entry.max_abs_err = std::max(entry.max_abs_err, abs_err);
            entry.max_rel_err = std::max(entry.max_rel_err, rel);
        }
        report.worst_rel_err = std::max(report.worst_rel_err, entry.max_rel_err);
        report.entries.push_back(std::move(entry));
    }
    report.passed = report.worst_rel_err < opt.tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// primitives
// ---------------------------------------------------------------------------

const char* primitive_name(Primitive p) {
    switch (p) {
        case Primitive::conv1x1: return "conv1x1";
        case Primitive::conv3x3_down: return "conv3x3_down";
        case Primitive::conv3x3_up: return "conv3x3_up";
        case Primitive::leaky_relu_op: return "leaky_relu";
        case Primitive::sigmoid_op: return "sigmoid";
        case Primitive::gelu_op: return "gelu";
        case Primitive::linear_op: return "linear";
        case Primitive::layer_norm_op: return "layer_norm";
        case Primitive::attention: return "window_attention";
        case Primitive::attention_shifted: return "window_attention_shifted";
        case Primitive::stl: return "stl";
        case Primitive::rstb: return "rstb";
        case Primitive::mse: return "mse_loss";
    }
    return "?";
}

const std::vector<Primitive>& all_primitives() {
    static const std::vector<Primitive> all = {
        Primitive::conv1x1,      Primitive::conv3x3_down,     Primitive::conv3x3_up,
        Primitive::leaky_relu_op, Primitive::sigmoid_op,      Primitive::gelu_op,
        Primitive::linear_op,    Primitive::layer_norm_op,    Primitive::attention,
        Primitive::attention_shifted, Primitive::stl,         Primitive::rstb,
        Primitive::mse,
    };
    return all;
}

namespace {

Tensor<double> random_tensor(std::vector<int> shape, Rng& rng, double lo, double hi) {
    Tensor<double> t(std::move(shape));
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

/// Values bounded away from zero (both signs), for kink-free LeakyReLU checks.
Tensor<double> random_tensor_away_from_zero(std::vector<int> shape, Rng& rng) {
    Tensor<double> t(std::move(shape));
    for (int64_t i = 0; i < t.numel(); ++i) {
        double mag = rng.uniform(0.2, 1.0);
        t[i] = rng.uniform() < 0.5 ? -mag : mag;
    }
    return t;
}

double dot_all(const Tensor<double>& r, const Tensor<double>& y) {
    require(r.same_shape(y), Err::shape_mismatch, "projection shape");
    double acc = 0.0;
    for (int64_t i = 0; i < r.numel(); ++i) acc += r[i] * y[i];
    return acc;
}

StlParams<double> random_stl(const HycassConfig& cfg, Rng& rng) {
    StlParams<double> p;
    ModelParams<double> scratch = init_params<double>(cfg, rng.next_u64());
    require(!scratch.encoder_stages.empty(), Err::invalid_argument, "need stages");
    p = scratch.encoder_stages[0].rstb.stls[0];
    // non-trivial LN and bias-table entries so their gradients are exercised
    auto jitter = [&rng](Tensor<double>& t, double scale) {
        for (int64_t i = 0; i < t.numel(); ++i) t[i] += rng.uniform(-scale, scale);
    };
    jitter(p.ln1.gamma, 0.2);
    jitter(p.ln2.gamma, 0.2);
    jitter(p.ln3.gamma, 0.2);
    jitter(p.ln4.gamma, 0.2);
    jitter(p.ln1.beta, 0.1);
    jitter(p.ln2.beta, 0.1);
    jitter(p.ln3.beta, 0.1);
    jitter(p.ln4.beta, 0.1);
    jitter(p.wa.rel_bias, 0.1);
    jitter(p.swa.rel_bias, 0.1);
    return p;
}

}  // namespace

GradCheckReport grad_check_primitive(Primitive prim, uint64_t seed,
                                     const GradCheckOptions& opt) {
    Rng rng(derive_seed(seed, uint64_t(prim) + 0x6772616463686bull));
    FdProblem problem;

    switch (prim) {
        case Primitive::conv1x1:
        case Primitive::conv3x3_down:
        case Primitive::conv3x3_up: {
            auto x = std::make_shared<Tensor<double>>();
            auto p = std::make_shared<ConvParams<double>>();
            int in = 3, out = 4;
            if (prim == Primitive::conv1x1) {
                *x = random_tensor({5, 4, in}, rng, -1.0, 1.0);
                p->kernel = random_tensor({out, in, 1, 1}, rng, -0.7, 0.7);
                p->stride = 1;
                p->transposed = false;
            } else if (prim == Primitive::conv3x3_down) {
                *x = random_tensor({6, 4, in}, rng, -1.0, 1.0);
                p->kernel = random_tensor({out, in, 3, 3}, rng, -0.5, 0.5);
                p->stride = 2;
                p->transposed = false;
            } else {
                *x = random_tensor({3, 4, in}, rng, -1.0, 1.0);
                p->kernel = random_tensor({out, in, 3, 3}, rng, -0.5, 0.5);
                p->stride = 2;
                p->transposed = true;
            }
            p->bias = random_tensor({out}, rng, -0.3, 0.3);
            auto r = std::make_shared<Tensor<double>>(random_tensor(
                conv2d(*x, *p).shape, rng, -1.0, 1.0));
            problem.tensors = {{"input", x.get()}, {"kernel", &p->kernel}, {"bias", &p->bias}};
            problem.forward = [x, p, r] { return dot_all(*r, conv2d(*x, *p)); };
            problem.analytic = [x, p, r] {
                ConvGrads<double> g = conv2d_backward(*x, *p, *r);
                return std::vector<Tensor<double>>{g.input, g.kernel, g.bias};
            };
            break;
        }
        case Primitive::leaky_relu_op: {
            auto x = std::make_shared<Tensor<double>>(random_tensor_away_from_zero({4, 3, 2}, rng));
            auto r = std::make_shared<Tensor<double>>(random_tensor({4, 3, 2}, rng, -1.0, 1.0));
            double slope = 0.01;
            problem.tensors = {{"input", x.get()}};
            problem.forward = [x, r, slope] { return dot_all(*r, leaky_relu(*x, slope)); };
            problem.analytic = [x, r, slope] {
                return std::vector<Tensor<double>>{leaky_relu_backward(*x, slope, *r)};
            };
            break;
        }
        case Primitive::sigmoid_op: {
            auto x = std::make_shared<Tensor<double>>(random_tensor({4, 3, 2}, rng, -2.0, 2.0));
            auto r = std::make_shared<Tensor<double>>(random_tensor({4, 3, 2}, rng, -1.0, 1.0));
            problem.tensors = {{"input", x.get()}};
            problem.forward = [x, r] { return dot_all(*r, sigmoid(*x)); };
            problem.analytic = [x, r] {
                return std::vector<Tensor<double>>{sigmoid_backward(sigmoid(*x), *r)};
            };
            break;
        }
        case Primitive::gelu_op: {
            auto x = std::make_shared<Tensor<double>>(random_tensor({4, 3, 2}, rng, -2.0, 2.0));
            auto r = std::make_shared<Tensor<double>>(random_tensor({4, 3, 2}, rng, -1.0, 1.0));
            problem.tensors = {{"input", x.get()}};
            problem.forward = [x, r] { return dot_all(*r, gelu(*x)); };
            problem.analytic = [x, r] {
                return std::vector<Tensor<double>>{gelu_backward(*x, *r)};
            };
            break;
        }
        case Primitive::linear_op: {
            auto x = std::make_shared<Tensor<double>>(random_tensor({6, 4}, rng, -1.0, 1.0));
            auto w = std::make_shared<Tensor<double>>(random_tensor({3, 4}, rng, -0.7, 0.7));
            auto b = std::make_shared<Tensor<double>>(random_tensor({3}, rng, -0.3, 0.3));
            auto r = std::make_shared<Tensor<double>>(random_tensor({6, 3}, rng, -1.0, 1.0));
            problem.tensors = {{"input", x.get()}, {"weight", w.get()}, {"bias", b.get()}};
            problem.forward = [x, w, b, r] { return dot_all(*r, linear(*x, *w, *b)); };
            problem.analytic = [x, w, r] {
                LinearGrads<double> g = linear_backward(*x, *w, *r);
                return std::vector<Tensor<double>>{g.input, g.weight, g.bias};
            };
            break;
        }
        case Primitive::layer_norm_op: {
            auto x = std::make_shared<Tensor<double>>(random_tensor({2, 3, 5}, rng, -1.0, 1.0));
            auto p = std::make_shared<LayerNormParams<double>>();
            p->gamma = random_tensor({5}, rng, 0.5, 1.5);
            p->beta = random_tensor({5}, rng, -0.5, 0.5);
            auto r = std::make_shared<Tensor<double>>(random_tensor({2, 3, 5}, rng, -1.0, 1.0));
            problem.tensors = {{"input", x.get()}, {"gamma", &p->gamma}, {"beta", &p->beta}};
            problem.forward = [x, p, r] { return dot_all(*r, layer_norm(*x, *p)); };
            problem.analytic = [x, p, r] {
                LayerNormGrads<double> g = layer_norm_backward(*x, *p, *r);
                return std::vector<Tensor<double>>{g.input, g.gamma, g.beta};
            };
            break;
        }
        case Primitive::attention:
        case Primitive::attention_shifted: {
            HycassConfig cfg;
            cfg.bands = 4;
            cfg.features = 4;
            cfg.latent_channels = 2;
            cfg.stages = 1;
            cfg.window = 2;
            cfg.heads = 2;
            cfg.mlp_ratio = 2.0;
            auto x = std::make_shared<Tensor<double>>(random_tensor({4, 4, 4}, rng, -1.0, 1.0));
            auto p = std::make_shared<AttentionParams<double>>(random_stl(cfg, rng).wa);
            int shift = prim == Primitive::attention_shifted ? cfg.window / 2 : 0;
            // init leaves projections near zero; spread them out
            for (int64_t i = 0; i < p->qkv_weight.numel(); ++i)
                p->qkv_weight[i] = rng.uniform(-0.5, 0.5);
            for (int64_t i = 0; i < p->proj_weight.numel(); ++i)
                p->proj_weight[i] = rng.uniform(-0.5, 0.5);
            for (int64_t i = 0; i < p->qkv_bias.numel(); ++i)
                p->qkv_bias[i] = rng.uniform(-0.2, 0.2);
            for (int64_t i = 0; i < p->proj_bias.numel(); ++i)
                p->proj_bias[i] = rng.uniform(-0.2, 0.2);
            auto r = std::make_shared<Tensor<double>>(random_tensor({4, 4, 4}, rng, -1.0, 1.0));
            problem.tensors = {{"input", x.get()},
                               {"qkv_w", &p->qkv_weight},
                               {"qkv_b", &p->qkv_bias},
                               {"proj_w", &p->proj_weight},
                               {"proj_b", &p->proj_bias},
                               {"rel_bias", &p->rel_bias}};
            problem.forward = [x, p, r, shift] {
                return dot_all(*r, window_attention(*x, *p, shift));
            };
            problem.analytic = [x, p, r, shift] {
                AttentionCache<double> cache;
                window_attention_forward(*x, *p, shift, &cache);
                AttentionGrads<double> g = window_attention_backward(cache, *p, shift, *r);
                return std::vector<Tensor<double>>{g.input,          g.params.qkv_weight,
                                                   g.params.qkv_bias, g.params.proj_weight,
                                                   g.params.proj_bias, g.params.rel_bias};
            };
            break;
        }
        case Primitive::stl:
        case Primitive::rstb: {
            HycassConfig cfg;
            cfg.bands = 4;
            cfg.features = 4;
            cfg.latent_channels = 2;
            cfg.stages = 1;
            cfg.window = 2;
            cfg.heads = 2;
            cfg.mlp_ratio = 2.0;
            auto x = std::make_shared<Tensor<double>>(random_tensor({4, 4, 4}, rng, -0.5, 0.5));
            auto r = std::make_shared<Tensor<double>>(random_tensor({4, 4, 4}, rng, -1.0, 1.0));
            if (prim == Primitive::stl) {
                auto p = std::make_shared<StlParams<double>>(random_stl(cfg, rng));
                problem.forward = [x, p, r] { return dot_all(*r, stl_apply(*x, *p)); };
                problem.analytic = [x, p, r] {
                    StlCache<double> cache;
                    stl_forward(*x, *p, &cache);
                    StlGrads<double> g = stl_backward(cache, *p, *r);
                    std::vector<Tensor<double>> out{g.input};
                    detail::visit_stl(g.params, "stl", [&out](const std::string&,
                                                              Tensor<double>& t) {
                        out.push_back(t);
                    });
                    return out;
                };
                problem.tensors.emplace_back("input", x.get());
                detail::visit_stl(*p, "stl",
                                  [&problem](const std::string& path, Tensor<double>& t) {
                                      problem.tensors.emplace_back(path, &t);
                                  });
            } else {
                ModelParams<double> scratch = init_params<double>(cfg, rng.next_u64());
                auto p = std::make_shared<RstbParams<double>>(scratch.encoder_stages[0].rstb);
                for (int64_t i = 0; i < p->fe.kernel.numel(); ++i)
                    p->fe.kernel[i] += rng.uniform(-0.2, 0.2);
                for (int64_t i = 0; i < p->fu.kernel.numel(); ++i)
                    p->fu.kernel[i] += rng.uniform(-0.2, 0.2);
                problem.forward = [x, p, r] { return dot_all(*r, rstb_apply(*x, *p)); };
                problem.analytic = [x, p, r] {
                    RstbCache<double> cache;
                    rstb_forward(*x, *p, &cache);
                    RstbGrads<double> g = rstb_backward(cache, *p, *r);
                    std::vector<Tensor<double>> out{g.input};
                    detail::visit_rstb(g.params, "rstb", [&out](const std::string&,
                                                                Tensor<double>& t) {
                        out.push_back(t);
                    });
                    return out;
                };
                problem.tensors.emplace_back("input", x.get());
                detail::visit_rstb(*p, "rstb",
                                   [&problem](const std::string& path, Tensor<double>& t) {
                                       problem.tensors.emplace_back(path, &t);
                                   });
            }
            break;
        }
        case Primitive::mse: {
            auto x = std::make_shared<Tensor<double>>(random_tensor({3, 3, 2}, rng, 0.0, 1.0));
            auto xhat = std::make_shared<Tensor<double>>(random_tensor({3, 3, 2}, rng, 0.0, 1.0));
            problem.tensors = {{"xhat", xhat.get()}};
            problem.forward = [x, xhat] { return mse_loss(*x, *xhat).value; };
            problem.analytic = [x, xhat] {
                return std::vector<Tensor<double>>{mse_loss(*x, *xhat).grad};
            };
            break;
        }
    }
    return run_grad_check(problem, opt);
}

// ---------------------------------------------------------------------------
// full model
// ---------------------------------------------------------------------------

HycassConfig grad_check_default_config() {
    HycassConfig cfg;
    cfg.bands = 6;
    cfg.features = 8;
    cfg.latent_channels = 3;
    cfg.stages = 1;
    cfg.window = 4;
    cfg.heads = 8;
    cfg.mlp_ratio = 4.0;
    cfg.stl_depth = 1;
    return cfg;
}

namespace {

template <typename T>
double tensor_min_abs(const Tensor<T>& t) {
    double m = std::numeric_limits<double>::infinity();
    for (int64_t i = 0; i < t.numel(); ++i) m = std::min(m, std::abs(double(t[i])));
    return m;
}

/// min |pre-activation| across every LeakyReLU input in one forward pass.
double kink_margin(const EncodeCache<double>& ec, const DecodeCache<double>& dc) {
    double m = tensor_min_abs(ec.spec_pre);
    for (const auto& s : ec.stages) m = std::min(m, tensor_min_abs(s.down_pre));
    m = std::min(m, tensor_min_abs(dc.adapter_pre));
    for (const auto& s : dc.stages) m = std::min(m, tensor_min_abs(s.up_pre));
    return m;
}

}  // namespace

GradCheckReport grad_check_full_model(const HycassConfig& cfg, uint64_t seed,
                                      const GradCheckOptions& opt) {
    cfg.validate();
    auto params = std::make_shared<ModelParams<double>>(init_params<double>(cfg, seed));
    Rng rng(derive_seed(seed, 0xf00dull));
    auto input = std::make_shared<Tensor<double>>();
    auto target = std::make_shared<Tensor<double>>();
    int H = 16, W = 16;
    validate_input_dims(cfg, H, W);
    *input = Tensor<double>({H, W, cfg.bands});
    *target = Tensor<double>({H, W, cfg.bands});
    for (int64_t i = 0; i < input->numel(); ++i) (*input)[i] = rng.uniform(0.05, 0.95);
    for (int64_t i = 0; i < target->numel(); ++i) (*target)[i] = rng.uniform(0.05, 0.95);

    FdProblem problem;
    for_each_tensor(*params, [&problem](const std::string& path, Tensor<double>& t) {
        problem.tensors.emplace_back(path, &t);
    });
    problem.tensors.emplace_back("input", input.get());

    problem.forward = [params, input, target] {
        Tensor<double> latent = encode_forward(*input, *params);
        Tensor<double> recon = decode_forward(latent, *params);
        return mse_loss(*target, recon).value;
    };
    problem.analytic = [params, input, target] {
        EncodeCache<double> ec;
        DecodeCache<double> dc;
        Tensor<double> latent = encode_forward(*input, *params, &ec);
        Tensor<double> recon = decode_forward(latent, *params, &dc);
        MseResult<double> mse = mse_loss(*target, recon);
        ModelParams<double> grads = make_model_params<double>(params->cfg);
        Tensor<double> g_latent = decode_backward(dc, *params, mse.grad, grads);
        Tensor<double> g_input = encode_backward(ec, *params, g_latent, grads);
        std::vector<Tensor<double>> out;
        for_each_tensor(grads, [&out](const std::string&, Tensor<double>& t) {
            out.push_back(std::move(t));
        });
        out.push_back(std::move(g_input));
        return out;
    };

    // margin of the nominal forward, for kink-awareness in reports
    EncodeCache<double> ec;
    DecodeCache<double> dc;
    Tensor<double> latent = encode_forward(*input, *params, &ec);
    decode_forward(latent, *params, &dc);

    GradCheckReport report = run_grad_check(problem, opt);
    report.kink_margin = kink_margin(ec, dc);
    return report;
}

}  // namespace hycass
