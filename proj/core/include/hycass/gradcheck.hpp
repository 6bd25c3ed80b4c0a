#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hycass/model.hpp"

namespace hycass {

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;
    int64_t elements = 0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;  // one per checked tensor
    double worst_rel_err = 0.0;
    double tolerance = 1e-4;
    double kink_margin = -1.0;  // min |LeakyReLU pre-activation|; -1 = n/a
    bool passed = false;
};

struct GradCheckOptions {
    double fd_step = 1e-5;
    double tolerance = 1e-4;
    /// Relative error uses denominator max(|analytic|, |fd|, rel_floor), so
    /// near-zero gradients are judged on the FD noise scale instead.
    double rel_floor = 1e-3;
    /// Added to the first analytic gradient entry; forces a failure so the
    /// harness itself can be tested. 0 = off.
    double sabotage = 0.0;
};

/// A finite-difference problem: leaf tensors (double), a scalar forward
/// reading their current contents, and the analytic gradients in the same
/// order. Central differences with step fd_step check every element.
struct FdProblem {
    std::vector<std::pair<std::string, Tensor<double>*>> tensors;
    std::function<double()> forward;
    std::function<std::vector<Tensor<double>>()> analytic;
};

GradCheckReport run_grad_check(FdProblem& problem, const GradCheckOptions& opt);

enum class Primitive {
    conv1x1,
    conv3x3_down,
    conv3x3_up,
    leaky_relu_op,
    sigmoid_op,
    gelu_op,
    linear_op,
    layer_norm_op,
    attention,
    attention_shifted,
    stl,
    rstb,
    mse,
};

const char* primitive_name(Primitive p);
const std::vector<Primitive>& all_primitives();

/// FD check of one primitive on a small random instance; the scalar loss is
/// a fixed random projection of the output.
GradCheckReport grad_check_primitive(Primitive prim, uint64_t seed,
                                     const GradCheckOptions& opt);

/// FD check of MSE(decode(encode(x)), target) over every parameter tensor
/// and the input. kink_margin reports the closest LeakyReLU pre-activation
/// to its kink during the nominal forward; seeds with a comfortable margin
/// keep central differences on one smooth branch.
GradCheckReport grad_check_full_model(const HycassConfig& cfg, uint64_t seed,
                                      const GradCheckOptions& opt);

/// The tiny full-model configuration used by the verification harness.
HycassConfig grad_check_default_config();

}  // namespace hycass
