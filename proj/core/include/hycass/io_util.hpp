#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "hycass/error.hpp"

namespace hycass {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swaps");

/// Append-only little-endian byte sink backing all file formats.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) { raw(&v, 2); }
    void u32(uint32_t v) { raw(&v, 4); }
    void u64(uint64_t v) { raw(&v, 8); }
    void i32(int32_t v) { raw(&v, 4); }
    void f32(float v) { raw(&v, 4); }
    void f64(double v) { raw(&v, 8); }
    void bytes(const void* p, size_t n) { raw(p, n); }

    void str(const std::string& s) {
        require(s.size() <= UINT16_MAX, Err::invalid_argument, "string too long");
        u16(uint16_t(s.size()));
        raw(s.data(), s.size());
    }

    const std::vector<uint8_t>& buffer() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }
    size_t size() const { return buf_.size(); }

private:
    void raw(const void* p, size_t n) {
        const uint8_t* b = static_cast<const uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    std::vector<uint8_t> buf_;
};

/// Bounds-checked little-endian reader; throws truncated_payload past the end.
class ByteReader {
public:
    ByteReader(const uint8_t* p, size_t n) : p_(p), n_(n) {}
    explicit ByteReader(const std::vector<uint8_t>& v) : p_(v.data()), n_(v.size()) {}

    uint8_t u8() { return *take(1); }
    uint16_t u16() { return load<uint16_t>(); }
    uint32_t u32() { return load<uint32_t>(); }
    uint64_t u64() { return load<uint64_t>(); }
    int32_t i32() { return load<int32_t>(); }
    float f32() { return load<float>(); }
    double f64() { return load<double>(); }

    void bytes(void* dst, size_t n) { std::memcpy(dst, take(n), n); }

    std::string str() {
        uint16_t len = u16();
        std::string s(len, '\0');
        bytes(s.data(), len);
        return s;
    }

    size_t remaining() const { return n_ - pos_; }
    size_t position() const { return pos_; }

private:
    template <typename T>
    T load() {
        T v;
        std::memcpy(&v, take(sizeof(T)), sizeof(T));
        return v;
    }
    const uint8_t* take(size_t n) {
        require(pos_ + n <= n_, Err::truncated_payload, "unexpected end of data");
        const uint8_t* p = p_ + pos_;
        pos_ += n;
        return p;
    }
    const uint8_t* p_;
    size_t n_;
    size_t pos_ = 0;
};

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<uint8_t>& bytes);

}  // namespace hycass
