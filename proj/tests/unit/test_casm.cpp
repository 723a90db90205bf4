#include "cairovm/casm.hpp"
#include "cairovm/stdlib.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cairovm;

namespace {

const FieldConfig& F()
{
    return FieldConfig::default_config();
}

}  // namespace

TEST(Casm, LibraryRoundTrip)
{
    const Program p = stdlib::assemble_library(F());
    ASSERT_EQ(p.words.size(), stdlib::kLibrarySize);
    const std::string text = print_casm(p, F());
    const Program q = parse_casm(text, F());
    EXPECT_EQ(q.words, p.words);
    EXPECT_EQ(q.functions, p.functions);
    EXPECT_EQ(print_casm(q, F()), text);
}

TEST(Casm, LabelsResolveToRelativeAndAbsoluteTargets)
{
    const Program p = parse_casm("start:\n[ap] = 1; ap++\njmp rel start\njmp abs start\n", F(), 100);
    ASSERT_EQ(p.words.size(), 6u);
    EXPECT_EQ(p.labels.at("start"), 0u);
    EXPECT_EQ(Felt(p.words[3], F()).to_signed(), -2);
    EXPECT_EQ(p.words[5], 100);
    EXPECT_EQ(p.base_pc, 100);
}

TEST(Casm, FunctionHeader)
{
    const Program p = parse_casm("func f{range_check_ptr}(x, y) -> (z):\nret\n", F());
    const FunctionDecl* f = p.function_named("f");
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(f->implicit_args, std::vector<std::string>{"range_check_ptr"});
    EXPECT_EQ(f->args, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(f->rets, std::vector<std::string>{"z"});
    EXPECT_EQ(f->arity(), 3u);
    EXPECT_EQ(f->return_count(), 2u);
}

TEST(Casm, ImmediatesReduceIntoTheField)
{
    const Program p = parse_casm("[ap] = -1; ap++\n", F());
    EXPECT_EQ(p.words[1], F().modulus - 1);
    const Program q = parse_casm("[ap] = 12290; ap++\n", FieldConfig::small_test_config());
    EXPECT_EQ(q.words[1], 1);
}

TEST(Casm, RawWordsSurviveUnprintableInstructions)
{
    const std::string src = "[ap] = 5; ap++\ndw 0x7fffffffffffffff\nret\n";
    const Program p = parse_casm(src, F());
    const Program q = parse_casm(print_casm(p, F()), F());
    EXPECT_EQ(q.words, p.words);
}

TEST(Casm, EveryValidFlagCombinationPrintsOrFallsBackToDw)
{
    std::mt19937_64 rng(6);
    for (Instruction i : valid_flag_combinations()) {
        i.off_dst = static_cast<std::int16_t>(rng());
        i.off_op0 = static_cast<std::int16_t>(rng());
        i.off_op1 = static_cast<std::int16_t>(rng());
        Program p;
        p.words.push_back(from_u64(encode(i)));
        if (i.size() == 2)
            p.words.push_back(from_u64(rng() >> 4));
        const Program q = parse_casm(print_casm(p, F()), F());
        ASSERT_EQ(q.words, p.words) << print_casm(p, F());
    }
}

TEST(Casm, SyntaxErrorsCarryPosition)
{
    try {
        parse_casm("ret\n[ap] = [fp + ; ap++\n", F());
        FAIL() << "accepted malformed text";
    } catch (const CasmSyntaxError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_GT(e.column(), 0u);
    }
    EXPECT_THROW(parse_casm("jmp rel nowhere\n", F()), CasmSyntaxError);
    EXPECT_THROW(parse_casm("frobnicate\n", F()), CasmSyntaxError);
    EXPECT_THROW(parse_casm("[ap] = [fp + 40000]\n", F()), CasmSyntaxError);
}

TEST(Casm, CommentsAndBlankLines)
{
    const Program p = parse_casm("// header\n\nret  // done\n", F());
    EXPECT_EQ(p.words.size(), 1u);
}
