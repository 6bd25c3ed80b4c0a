#pragma once

#include <stdexcept>
#include <string>

namespace hycass {

/// Error codes for every failure mode the library distinguishes.
enum class Err {
    malformed_magic,
    truncated_payload,
    dimension_overflow,
    io_failure,
    degenerate_range,
    crop_too_large,
    patch_too_large,
    empty_input,
    channel_mismatch,
    odd_dims,
    indivisible,
    head_divisibility,
    shape_mismatch,
    nonfinite_gradient,
    nonfinite_loss,
    version_mismatch,
    hash_mismatch,
    corrupt_header,
    config_mismatch,
    insufficient_rank,
    band_mismatch,
    invalid_argument,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& what)
        : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, Err code, const std::string& what) {
    if (!cond) raise(code, what);
}

}  // namespace hycass
