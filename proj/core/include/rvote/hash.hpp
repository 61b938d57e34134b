#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace rvote {

// FNV-1a, used for cache keys and seed derivation tags. Not cryptographic.
class Fnv1a64 {
public:
    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            value_ ^= p[i];
            value_ *= 0x100000001B3ull;
        }
    }

    void update(std::string_view s) { update(s.data(), s.size()); }

    template <class T>
    void update_value(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        update(&v, sizeof(T));
    }

    std::uint64_t value() const { return value_; }

private:
    std::uint64_t value_ = 0xCBF29CE484222325ull;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    Fnv1a64 h;
    h.update(s);
    return h.value();
}

std::string hex16(std::uint64_t v);  // 16 lowercase hex digits

}  // namespace rvote
