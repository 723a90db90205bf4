#pragma once

// Prime-field arithmetic on native integers for moduli below 2^63.
// Shares nothing with the GMP-backed Felt.

#include <cstdint>

namespace oracle {

struct SmallField {
    std::uint64_t p;

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % p; }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + p - b) % p; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const
    {
        return static_cast<std::uint64_t>((unsigned __int128)a * b % p);
    }
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p - a; }
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const
    {
        std::uint64_t r = 1;
        while (e) {
            if (e & 1)
                r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    // Fermat; a must be nonzero.
    std::uint64_t inv(std::uint64_t a) const { return pow(a, p - 2); }
    std::int64_t to_signed(std::uint64_t a) const
    {
        return a > p / 2 ? -static_cast<std::int64_t>(p - a) : static_cast<std::int64_t>(a);
    }
};

}  // namespace oracle
