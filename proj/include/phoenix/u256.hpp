#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace phoenix {

// Unsigned 256-bit integer with explicit wrapping and checked arithmetic.
// Little-endian limb order: limb[0] holds the least significant 64 bits.
//
// Only the operations the vault model needs are provided: add/sub in both
// wrapping and overflow-reporting flavours, comparison, and decimal string
// conversion (the wire format carries amounts as decimal strings).
struct U256 {
    std::array<std::uint64_t, 4> limb{0, 0, 0, 0};

    constexpr U256() = default;
    constexpr explicit U256(std::uint64_t v) : limb{v, 0, 0, 0} {}

    static constexpr U256 max() {
        U256 m;
        m.limb = {~0ull, ~0ull, ~0ull, ~0ull};
        return m;
    }

    constexpr bool is_zero() const {
        return (limb[0] | limb[1] | limb[2] | limb[3]) == 0;
    }

    friend constexpr bool operator==(const U256&, const U256&) = default;

    friend constexpr std::strong_ordering operator<=>(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i) {
            if (a.limb[i] != b.limb[i])
                return a.limb[i] <=> b.limb[i];
        }
        return std::strong_ordering::equal;
    }

    // a + b mod 2^256; carry_out reports whether the true sum overflowed.
    static constexpr U256 add_with_carry(const U256& a, const U256& b, bool& carry_out) {
        U256 r;
        unsigned __int128 carry = 0;
        for (int i = 0; i < 4; ++i) {
            unsigned __int128 s = carry + a.limb[i] + b.limb[i];
            r.limb[i] = static_cast<std::uint64_t>(s);
            carry = s >> 64;
        }
        carry_out = carry != 0;
        return r;
    }

    static constexpr U256 add_wrap(const U256& a, const U256& b) {
        bool c;
        return add_with_carry(a, b, c);
    }

    // Empty when a + b does not fit in 256 bits.
    static constexpr std::optional<U256> add_checked(const U256& a, const U256& b) {
        bool c;
        U256 r = add_with_carry(a, b, c);
        if (c)
            return std::nullopt;
        return r;
    }

    // a - b mod 2^256; borrow_out reports a < b.
    static constexpr U256 sub_with_borrow(const U256& a, const U256& b, bool& borrow_out) {
        U256 r;
        unsigned __int128 borrow = 0;
        for (int i = 0; i < 4; ++i) {
            unsigned __int128 d = (unsigned __int128)a.limb[i] - b.limb[i] - borrow;
            r.limb[i] = static_cast<std::uint64_t>(d);
            borrow = (d >> 64) & 1; // nonzero iff the subtraction wrapped
        }
        borrow_out = borrow != 0;
        return r;
    }

    static constexpr U256 sub_wrap(const U256& a, const U256& b) {
        bool bo;
        return sub_with_borrow(a, b, bo);
    }

    // r = this * 10 + digit, reporting overflow. Used by the decimal parser.
    constexpr bool mul10_add(std::uint64_t digit) {
        unsigned __int128 carry = digit;
        for (int i = 0; i < 4; ++i) {
            unsigned __int128 p = (unsigned __int128)limb[i] * 10 + carry;
            limb[i] = static_cast<std::uint64_t>(p);
            carry = p >> 64;
        }
        return carry != 0;
    }

    // Divides in place by a small divisor, returns the remainder.
    constexpr std::uint64_t divmod_small(std::uint64_t div) {
        unsigned __int128 rem = 0;
        for (int i = 3; i >= 0; --i) {
            unsigned __int128 cur = (rem << 64) | limb[i];
            limb[i] = static_cast<std::uint64_t>(cur / div);
            rem = cur % div;
        }
        return static_cast<std::uint64_t>(rem);
    }

    std::string to_decimal() const {
        if (is_zero())
            return "0";
        U256 v = *this;
        std::string out;
        while (!v.is_zero())
            out.push_back(static_cast<char>('0' + v.divmod_small(10)));
        return {out.rbegin(), out.rend()};
    }

    // Strict parse: digits only, no sign, no leading '+', overflow rejected.
    // Leading zeros are tolerated so hand-written fixtures stay forgiving.
    static std::optional<U256> from_decimal(std::string_view s) {
        if (s.empty())
            return std::nullopt;
        U256 v;
        for (char c : s) {
            if (c < '0' || c > '9')
                return std::nullopt;
            if (v.mul10_add(static_cast<std::uint64_t>(c - '0')))
                return std::nullopt;
        }
        return v;
    }
};

struct U256Hash {
    std::size_t operator()(const U256& v) const {
        // FNV-1a over the limbs; plenty for hash-map bucketing.
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t l : v.limb) {
            h ^= l;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace phoenix
