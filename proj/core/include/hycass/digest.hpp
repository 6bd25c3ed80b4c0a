#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hycass {

using Digest16 = std::array<uint8_t, 16>;

/// MD5 of a byte buffer (content identification, not security).
Digest16 md5(const uint8_t* data, size_t n);
Digest16 md5(const std::vector<uint8_t>& data);

std::string digest_hex(const Digest16& d);

}  // namespace hycass
