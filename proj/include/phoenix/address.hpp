#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace phoenix {

// 20-byte account identifier, canonically rendered as 0x + 40 lowercase hex
// digits. The zero address is reserved: it is never a valid tier member or
// withdrawal recipient, only a probe value.
struct Address {
    std::array<std::uint8_t, 20> bytes{};

    constexpr Address() = default;

    // Convenience for tests and address universes: the low 8 bytes hold v.
    static constexpr Address from_index(std::uint64_t v) {
        Address a;
        for (int i = 0; i < 8; ++i)
            a.bytes[19 - i] = static_cast<std::uint8_t>(v >> (8 * i));
        return a;
    }

    static constexpr Address zero() { return {}; }

    constexpr bool is_zero() const {
        for (auto b : bytes)
            if (b != 0)
                return false;
        return true;
    }

    friend constexpr bool operator==(const Address&, const Address&) = default;
    friend constexpr auto operator<=>(const Address&, const Address&) = default;

    std::string to_string() const {
        static const char* hex = "0123456789abcdef";
        std::string s = "0x";
        s.reserve(42);
        for (auto b : bytes) {
            s.push_back(hex[b >> 4]);
            s.push_back(hex[b & 0xf]);
        }
        return s;
    }

    // Accepts 0x followed by 1..40 hex digits (either case); shorter strings
    // are left-padded with zeros so CLI users can write 0xa1.
    static std::optional<Address> parse(std::string_view s) {
        if (s.size() < 3 || s.size() > 42 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
            return std::nullopt;
        std::string_view digits = s.substr(2);
        Address a;
        std::size_t nibble = 40 - digits.size(); // position of first digit
        for (char c : digits) {
            int v;
            if (c >= '0' && c <= '9')
                v = c - '0';
            else if (c >= 'a' && c <= 'f')
                v = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F')
                v = c - 'A' + 10;
            else
                return std::nullopt;
            auto& byte = a.bytes[nibble / 2];
            byte = (nibble % 2 == 0) ? static_cast<std::uint8_t>(v << 4)
                                     : static_cast<std::uint8_t>(byte | v);
            ++nibble;
        }
        return a;
    }
};

// The vault's own account. Requests naming it as recipient are rejected;
// user-facing addresses should simply avoid the all-ones pattern.
inline Address vault_self_address() {
    Address a;
    a.bytes.fill(0xff);
    return a;
}

} // namespace phoenix
