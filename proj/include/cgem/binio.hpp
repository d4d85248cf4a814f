#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgem/crc32.hpp"

namespace cgem::io {

/// Little-endian binary writer with a running CRC-32 over everything
/// written. The CRC trailer itself is appended with write_trailer().
class BinWriter {
  public:
    explicit BinWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
        path_ = path;
    }

    void bytes(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        crc_.update(p, n);
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u16(std::uint16_t v) { bytes(&v, 2); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void f64_array(const double* p, std::size_t n) { bytes(p, n * sizeof(double)); }
    void str(const std::string& s) {
        if (s.size() > UINT16_MAX) throw std::runtime_error("string too long for format");
        u16(static_cast<std::uint16_t>(s.size()));
        bytes(s.data(), s.size());
    }

    /// Appends the CRC of everything written so far and closes the file.
    void write_trailer() {
        const std::uint32_t crc = crc_.value();
        out_.write(reinterpret_cast<const char*>(&crc), 4);
        out_.close();
        if (!out_) throw std::runtime_error("write failed: " + path_);
    }

  private:
    std::ofstream out_;
    std::string path_;
    Crc32 crc_;
};

/// Matching reader. Verifies the CRC trailer against all payload bytes,
/// including any sections the caller skipped.
class BinReader {
  public:
    explicit BinReader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open for reading: " + path);
        path_ = path;
        in_.seekg(0, std::ios::end);
        file_size_ = static_cast<std::size_t>(in_.tellg());
        if (file_size_ < 4) throw std::runtime_error("file too short: " + path);
        payload_size_ = file_size_ - 4;
        in_.seekg(0);
    }

    void bytes(void* p, std::size_t n) {
        check_remaining(n);
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in_) throw std::runtime_error("read failed: " + path_);
        crc_.update(p, n);
        pos_ += n;
    }
    std::uint8_t u8() { return read_scalar<std::uint8_t>(); }
    std::uint16_t u16() { return read_scalar<std::uint16_t>(); }
    std::uint32_t u32() { return read_scalar<std::uint32_t>(); }
    std::uint64_t u64() { return read_scalar<std::uint64_t>(); }
    double f64() { return read_scalar<double>(); }
    void f64_array(double* p, std::size_t n) { bytes(p, n * sizeof(double)); }
    std::string str() {
        const std::uint16_t n = u16();
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

    /// Streams n bytes through the CRC without materializing them.
    void skip_through_crc(std::size_t n) {
        std::vector<char> buf(std::min<std::size_t>(n, 1 << 20));
        while (n > 0) {
            const std::size_t chunk = std::min(n, buf.size());
            bytes(buf.data(), chunk);
            n -= chunk;
        }
    }

    std::size_t payload_remaining() const { return payload_size_ - pos_; }

    /// Consumes the trailer and throws on mismatch.
    void verify_trailer() {
        if (pos_ != payload_size_)
            throw std::runtime_error("format error, trailing bytes in " + path_);
        std::uint32_t stored = 0;
        in_.read(reinterpret_cast<char*>(&stored), 4);
        if (!in_) throw std::runtime_error("read failed: " + path_);
        if (stored != crc_.value())
            throw std::runtime_error("CRC mismatch in " + path_ + " (corrupt file)");
    }

  private:
    template <typename T>
    T read_scalar() {
        T v;
        bytes(&v, sizeof(T));
        return v;
    }
    void check_remaining(std::size_t n) {
        if (pos_ + n > payload_size_)
            throw std::runtime_error("truncated file: " + path_);
    }

    std::ifstream in_;
    std::string path_;
    std::size_t file_size_ = 0;
    std::size_t payload_size_ = 0;
    std::size_t pos_ = 0;
    Crc32 crc_;
};

}  // namespace cgem::io
