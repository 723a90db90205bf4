#include "cairovm/isa.hpp"

#include "../oracles/isa_bits.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cairovm;
using oracle::Bit;

namespace {

int ones(unsigned flags, unsigned first, unsigned width)
{
    return __builtin_popcount((flags >> first) & ((1u << width) - 1));
}

// Validity read straight off the flag bits.
bool raw_valid(unsigned f)
{
    if (ones(f, Bit::Op1Imm, 3) > 1 || ones(f, Bit::ResAdd, 2) > 1 || ones(f, Bit::JumpAbs, 3) > 1 ||
        ones(f, Bit::ApAdd, 2) > 1 || ones(f, Bit::Call, 3) > 1)
        return false;
    auto b = [f](unsigned i) { return ((f >> i) & 1u) != 0; };
    const bool unconstrained_res = b(Bit::Jnz) && !b(Bit::ResAdd) && !b(Bit::ResMul);
    if (b(Bit::Jnz) && (b(Bit::ResAdd) || b(Bit::ResMul)))
        return false;
    if (b(Bit::Call) && (!(b(Bit::JumpAbs) || b(Bit::JumpRel)) || b(Bit::ApAdd) || b(Bit::ApAdd1)))
        return false;
    if (b(Bit::Ret) && (!b(Bit::JumpAbs) || b(Bit::ApAdd) || b(Bit::ApAdd1)))
        return false;
    if (b(Bit::AssertEq) && unconstrained_res)
        return false;
    return true;
}

void expect_matches_raw(const Instruction& i, std::uint64_t word)
{
    const oracle::RawWord r = oracle::slice(word);
    EXPECT_EQ(i.off_dst, r.off_dst);
    EXPECT_EQ(i.off_op0, r.off_op0);
    EXPECT_EQ(i.off_op1, r.off_op1);
    EXPECT_EQ(i.dst_reg == Register::FP, r.bit(Bit::DstFp));
    EXPECT_EQ(i.op0_reg == Register::FP, r.bit(Bit::Op0Fp));
    EXPECT_EQ(i.op1_src == Op1Source::Imm, r.bit(Bit::Op1Imm));
    EXPECT_EQ(i.op1_src == Op1Source::FpDeref, r.bit(Bit::Op1Fp));
    EXPECT_EQ(i.op1_src == Op1Source::ApDeref, r.bit(Bit::Op1Ap));
    EXPECT_EQ(i.res == ResLogic::Add, r.bit(Bit::ResAdd));
    EXPECT_EQ(i.res == ResLogic::Mul, r.bit(Bit::ResMul));
    EXPECT_EQ(i.pc_update == PcUpdate::Jnz, r.bit(Bit::Jnz));
    EXPECT_EQ(i.pc_update == PcUpdate::JumpAbs, r.bit(Bit::JumpAbs));
    EXPECT_EQ(i.pc_update == PcUpdate::JumpRel, r.bit(Bit::JumpRel));
    EXPECT_EQ(i.ap_update == ApUpdate::AddRes, r.bit(Bit::ApAdd));
    EXPECT_EQ(i.ap_update == ApUpdate::Add1, r.bit(Bit::ApAdd1));
    EXPECT_EQ(i.opcode == Opcode::Call, r.bit(Bit::Call));
    EXPECT_EQ(i.opcode == Opcode::Ret, r.bit(Bit::Ret));
    EXPECT_EQ(i.opcode == Opcode::AssertEq, r.bit(Bit::AssertEq));
}

}  // namespace

TEST(Isa, ValidCombinationCountMatchesRawEnumeration)
{
    std::size_t expected = 0;
    for (unsigned f = 0; f < (1u << 15); ++f)
        expected += raw_valid(f);
    EXPECT_EQ(expected, 1056u);
    EXPECT_EQ(valid_flag_combinations().size(), expected);
}

TEST(Isa, DecodeAgreesWithBitSlicingOnEveryFlagPattern)
{
    std::mt19937_64 rng(4);
    for (unsigned f = 0; f < (1u << 15); ++f) {
        const auto dst = static_cast<std::int32_t>(rng() % 65536) - 32768;
        const auto op0 = static_cast<std::int32_t>(rng() % 65536) - 32768;
        const auto op1 = static_cast<std::int32_t>(rng() % 65536) - 32768;
        const std::uint64_t w = oracle::pack(dst, op0, op1, f);
        const Decoded d = decode(from_u64(w));
        if (!raw_valid(f)) {
            ASSERT_TRUE(std::holds_alternative<IllFormed>(d)) << "flags " << f;
            continue;
        }
        const auto* ins = std::get_if<Instruction>(&d);
        ASSERT_NE(ins, nullptr) << "flags " << f;
        expect_matches_raw(*ins, w);
        ASSERT_EQ(encode(*ins), w);
    }
}

TEST(Isa, HighBitsAreIllFormed)
{
    const std::uint64_t nop = oracle::pack(0, 0, 0, 1u << Bit::AssertEq | 1u << Bit::Op1Imm);
    ASSERT_TRUE(std::holds_alternative<Instruction>(decode(from_u64(nop))));
    for (unsigned b : {63u, 64u, 100u, 250u})
        EXPECT_TRUE(std::holds_alternative<IllFormed>(decode(from_u64(nop) + pow2(b)))) << b;
    EXPECT_TRUE(std::holds_alternative<IllFormed>(decode(BigInt(-1))));
}

TEST(Isa, FeltDecodeUsesTheResidue)
{
    const FieldConfig& cfg = FieldConfig::default_config();
    const std::uint64_t w = encode(make_ret());
    EXPECT_EQ(std::get<Instruction>(decode(Felt(from_u64(w), cfg))), make_ret());
}

TEST(Isa, EncodeRejectsInvalid)
{
    Instruction i = make_call_rel_imm();
    i.ap_update = ApUpdate::Add1;
    EXPECT_TRUE(i.violation().has_value());
    EXPECT_THROW(encode(i), std::invalid_argument);
    Instruction j;
    j.opcode = Opcode::AssertEq;
    j.pc_update = PcUpdate::Jnz;
    j.res = ResLogic::Unconstrained;
    EXPECT_THROW(encode(j), std::invalid_argument);
}

TEST(Isa, KnownWords)
{
    // ret = [fp - 2] is the old fp, jump abs to [fp - 1].
    EXPECT_EQ(encode(make_ret()), 0x208b7fff7fff7ffeull);
    // call rel imm.
    EXPECT_EQ(encode(make_call_rel_imm()), 0x1104800180018000ull);
    // jmp rel imm.
    EXPECT_EQ(encode(make_jmp_rel_imm()), 0x010780017fff7fffull);
    EXPECT_TRUE(is_halting_jump(make_jmp_rel_imm(), 0));
    EXPECT_FALSE(is_halting_jump(make_jmp_rel_imm(), 1));
    EXPECT_EQ(make_call_rel_imm().size(), 2u);
    EXPECT_EQ(make_ret().size(), 1u);
}

TEST(Isa, ProgramOffsets)
{
    Program p;
    p.words = {from_u64(encode(make_call_rel_imm())), 5, from_u64(encode(make_ret()))};
    EXPECT_EQ(p.instruction_offsets(), (std::vector<std::size_t>{0, 2}));
    p.words.pop_back();
    p.words.pop_back();
    EXPECT_THROW(p.instruction_offsets(), std::runtime_error);
}
