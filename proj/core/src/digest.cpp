#include "hycass/digest.hpp"

#include <openssl/evp.h>

#include "hycass/error.hpp"

namespace hycass {

Digest16 md5(const uint8_t* data, size_t n) {
    Digest16 out{};
    unsigned int len = 0;
    int rc = EVP_Digest(data, n, out.data(), &len, EVP_md5(), nullptr);
    require(rc == 1 && len == out.size(), Err::io_failure, "MD5 digest failed");
    return out;
}

Digest16 md5(const std::vector<uint8_t>& data) {
    return md5(data.data(), data.size());
}

std::string digest_hex(const Digest16& d) {
    static const char* hex = "0123456789abcdef";
    std::string s;
    s.reserve(32);
    for (uint8_t b : d) {
        s.push_back(hex[b >> 4]);
        s.push_back(hex[b & 0xf]);
    }
    return s;
}

}  // namespace hycass
