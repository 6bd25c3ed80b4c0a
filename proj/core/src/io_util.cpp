#include "hycass/io_util.hpp"

#include <cstdio>

namespace hycass {

std::vector<uint8_t> read_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    require(f != nullptr, Err::io_failure, "cannot open " + path);
    std::fseek(f, 0, SEEK_END);
    long size = std::ftell(f);
    if (size < 0) {
        std::fclose(f);
        raise(Err::io_failure, "cannot stat " + path);
    }
    std::fseek(f, 0, SEEK_SET);
    std::vector<uint8_t> bytes(static_cast<size_t>(size), uint8_t(0));
    size_t got = size ? std::fread(bytes.data(), 1, bytes.size(), f) : 0;
    std::fclose(f);
    require(got == bytes.size(), Err::io_failure, "short read from " + path);
    return bytes;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    require(f != nullptr, Err::io_failure, "cannot open " + path + " for writing");
    size_t put = bytes.empty() ? 0 : std::fwrite(bytes.data(), 1, bytes.size(), f);
    int rc = std::fclose(f);
    require(put == bytes.size() && rc == 0, Err::io_failure, "short write to " + path);
}

}  // namespace hycass
