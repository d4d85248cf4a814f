#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace cgem {

namespace detail {
inline const std::array<std::uint32_t, 256>& crc32_table() {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    return table;
}
}  // namespace detail

/// Incremental CRC-32 (IEEE, reflected). Feed chunks in order, then value().
class Crc32 {
  public:
    void update(const void* bytes, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(bytes);
        const auto& t = detail::crc32_table();
        for (std::size_t i = 0; i < n; ++i) state_ = t[(state_ ^ p[i]) & 0xffu] ^ (state_ >> 8);
    }
    std::uint32_t value() const { return state_ ^ 0xffffffffu; }

  private:
    std::uint32_t state_ = 0xffffffffu;
};

inline std::uint32_t crc32_of(const void* bytes, std::size_t n) {
    Crc32 c;
    c.update(bytes, n);
    return c.value();
}

}  // namespace cgem
