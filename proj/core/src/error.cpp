#include "hycass/error.hpp"

namespace hycass {

const char* err_name(Err e) {
    switch (e) {
        case Err::malformed_magic: return "malformed-magic";
        case Err::truncated_payload: return "truncated-payload";
        case Err::dimension_overflow: return "dimension-overflow";
        case Err::io_failure: return "io-failure";
        case Err::degenerate_range: return "degenerate-range";
        case Err::crop_too_large: return "crop-larger-than-source";
        case Err::patch_too_large: return "patch-larger-than-source";
        case Err::empty_input: return "empty-input";
        case Err::channel_mismatch: return "channel-mismatch";
        case Err::odd_dims: return "odd-dims-for-downsample";
        case Err::indivisible: return "indivisible-dims";
        case Err::head_divisibility: return "head-divisibility";
        case Err::shape_mismatch: return "shape-mismatch";
        case Err::nonfinite_gradient: return "nonfinite-gradient";
        case Err::nonfinite_loss: return "nonfinite-loss";
        case Err::version_mismatch: return "version-mismatch";
        case Err::hash_mismatch: return "hash-mismatch";
        case Err::corrupt_header: return "corrupt-header";
        case Err::config_mismatch: return "config-mismatch";
        case Err::insufficient_rank: return "insufficient-rank";
        case Err::band_mismatch: return "band-mismatch";
        case Err::invalid_argument: return "invalid-argument";
    }
    return "unknown-error";
}

}  // namespace hycass
