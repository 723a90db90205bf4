#pragma once

// Straight bit-slicing of an instruction word, read off the layout table
// without going through the library decoder.

#include <cstdint>

namespace oracle {

struct RawWord {
    std::int32_t off_dst, off_op0, off_op1;
    unsigned flags;  // 15 bits

    bool bit(unsigned i) const { return (flags >> i) & 1u; }
};

inline RawWord slice(std::uint64_t w)
{
    RawWord r;
    r.off_dst = static_cast<std::int32_t>(w & 0xffff) - 0x8000;
    r.off_op0 = static_cast<std::int32_t>((w >> 16) & 0xffff) - 0x8000;
    r.off_op1 = static_cast<std::int32_t>((w >> 32) & 0xffff) - 0x8000;
    r.flags = static_cast<unsigned>((w >> 48) & 0x7fff);
    return r;
}

inline std::uint64_t pack(std::int32_t dst, std::int32_t op0, std::int32_t op1, unsigned flags)
{
    return static_cast<std::uint64_t>(dst + 0x8000) | static_cast<std::uint64_t>(op0 + 0x8000) << 16 |
           static_cast<std::uint64_t>(op1 + 0x8000) << 32 | static_cast<std::uint64_t>(flags) << 48;
}

// Flag bit positions counted from bit 48.
enum Bit : unsigned {
    DstFp = 0,
    Op0Fp = 1,
    Op1Imm = 2,
    Op1Fp = 3,
    Op1Ap = 4,
    ResAdd = 5,
    ResMul = 6,
    JumpAbs = 7,
    JumpRel = 8,
    Jnz = 9,
    ApAdd = 10,
    ApAdd1 = 11,
    Call = 12,
    Ret = 13,
    AssertEq = 14,
};

}  // namespace oracle
