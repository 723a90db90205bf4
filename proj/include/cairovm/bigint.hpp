#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace cairovm {

/// Arbitrary-precision signed integer used for all host-side arithmetic.
using BigInt = mpz_class;

/// Parses decimal or `0x` hexadecimal text with an optional leading `-`.
/// Throws std::invalid_argument on malformed input.
BigInt parse_bigint(std::string_view text);

std::string to_hex(const BigInt& v);
std::string to_dec(const BigInt& v);

BigInt pow2(unsigned k);

/// Residue of `a` in [0, m) for m > 0.
BigInt mod_floor(const BigInt& a, const BigInt& m);

/// Exact conversion; throws std::out_of_range when `v` does not fit.
std::uint64_t to_u64(const BigInt& v);
std::int64_t to_i64(const BigInt& v);

BigInt from_u64(std::uint64_t v);
BigInt from_i64(std::int64_t v);

}  // namespace cairovm
