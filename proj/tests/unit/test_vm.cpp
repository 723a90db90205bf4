#include "cairovm/casm.hpp"
#include "cairovm/stdlib.hpp"
#include "cairovm/vm.hpp"

#include "../oracles/small_field.hpp"

#include <gtest/gtest.h>

using namespace cairovm;

namespace {

// (x, y, n) -> (y, x + y, n - 1) until n = 0.
constexpr const char* kFib = R"(
[ap] = 1; ap++
[ap] = 1; ap++
[ap] = [fp + (-3)]; ap++
loop:
[ap] = [ap + (-2)]; ap++
[ap] = [ap + (-4)] + [ap + (-3)]; ap++
[ap] = [ap + (-3)] + -1; ap++
jmp rel loop if [ap + (-1)] != 0
jmp rel 0
)";

struct Fixture {
    const FieldConfig& cfg;
    Program prog;
    Memory mem;

    Fixture(const FieldConfig& c, const std::string& src) : cfg(c), prog(parse_casm(src, c)), mem(c)
    {
        load_program(mem, prog);
    }
    MachineState at(long pc, long ap, long fp) const { return {Felt(pc, cfg), Felt(ap, cfg), Felt(fp, cfg)}; }
    RunOutcome go(long ap = 100, std::size_t max_steps = 10000)
    {
        return run_collect(prog, at(0, ap, ap), mem, {}, max_steps);
    }
};

Felt felt(long v, const FieldConfig& cfg = FieldConfig::default_config())
{
    return Felt(v, cfg);
}

}  // namespace

TEST(Vm, FibonacciMatchesNativeRecurrence)
{
    for (const FieldConfig* cfg : {&FieldConfig::default_config(), &FieldConfig::small_test_config()}) {
        for (long n : {1L, 2L, 10L, 40L}) {
            Fixture f(*cfg, kFib);
            f.mem.write(felt(97, *cfg), felt(n, *cfg));
            const RunOutcome out = f.go();
            ASSERT_TRUE(out.halted()) << (out.error ? out.error->what() : "");
            EXPECT_EQ(out.trace.steps(), 3 + 4 * static_cast<std::size_t>(n));

            const bool small = cfg->modulus < 1000000;
            const oracle::SmallField o{small ? to_u64(cfg->modulus) : 0};
            std::uint64_t x = 1, y = 1;
            for (long k = 0; k < n; ++k) {
                const std::uint64_t t = small ? o.add(x, y) : x + y;
                x = y;
                y = t;
            }
            const Felt final_ap = out.trace.final_state().ap;
            EXPECT_EQ(f.mem.at(final_ap - 2).value(), from_u64(y)) << "n = " << n;
        }
    }
}

TEST(Vm, MemoryIsWriteOnce)
{
    const FieldConfig& cfg = FieldConfig::default_config();
    Memory m(cfg);
    m.write(felt(5), felt(7));
    m.write(felt(5), felt(7));
    EXPECT_EQ(m.write_log().size(), 1u);
    try {
        m.write(felt(5), felt(8));
        FAIL();
    } catch (const ExecError& e) {
        EXPECT_EQ(e.kind(), ExecErrorKind::WriteConflict);
    }
    EXPECT_FALSE(m.get(felt(6)).has_value());
    EXPECT_THROW(m.at(felt(6)), ExecError);
    // Addresses are residues.
    m.write(Felt(cfg.modulus + 9, cfg), felt(1));
    EXPECT_TRUE(m.assigned(felt(9)));
}

TEST(Vm, RangeCheckSegmentRejectsLargeValues)
{
    const FieldConfig& cfg = FieldConfig::small_test_config();
    Memory m(cfg);
    m.add_range_check_segment(felt(1000, cfg), 4);
    EXPECT_TRUE(m.in_range_check_segment(felt(1003, cfg)));
    EXPECT_FALSE(m.in_range_check_segment(felt(1004, cfg)));
    m.write(felt(1000, cfg), felt(63, cfg));
    try {
        m.write(felt(1001, cfg), felt(64, cfg));
        FAIL();
    } catch (const ExecError& e) {
        EXPECT_EQ(e.kind(), ExecErrorKind::AssertFailed);
    }
    m.write(felt(1004, cfg), felt(64, cfg));
}

TEST(Vm, ErrorKinds)
{
    const FieldConfig& cfg = FieldConfig::default_config();
    {
        Fixture f(cfg, "[ap + 1] = [ap] * [ap + 2]\njmp rel 0\n");
        f.mem.write(felt(100), felt(0));
        f.mem.write(felt(101), felt(7));
        const RunOutcome out = f.go();
        ASSERT_TRUE(out.error);
        EXPECT_EQ(out.error->kind(), ExecErrorKind::DivisionByZero);
        EXPECT_EQ(out.error->step(), 0u);
    }
    {
        Fixture f(cfg, "[ap + 1] = [ap] * [ap + 2]\njmp rel 0\n");
        f.mem.write(felt(100), felt(3));
        f.mem.write(felt(101), felt(12));
        const RunOutcome out = f.go();
        ASSERT_TRUE(out.halted());
        EXPECT_EQ(f.mem.at(felt(102)), felt(4));
    }
    {
        Fixture f(cfg, "[ap] = [ap + 5] + [ap + 6]\njmp rel 0\n");
        const RunOutcome out = f.go();
        ASSERT_TRUE(out.error);
        EXPECT_EQ(out.error->kind(), ExecErrorKind::UnassignedRead);
    }
    {
        Fixture f(cfg, "[ap] = 1\n[ap] = 2\njmp rel 0\n");
        const RunOutcome out = f.go();
        ASSERT_TRUE(out.error);
        EXPECT_EQ(out.error->kind(), ExecErrorKind::AssertFailed);
        EXPECT_EQ(out.error->step(), 1u);
        EXPECT_EQ(out.trace.states.size(), 2u);
    }
    {
        Fixture f(cfg, "a:\njmp rel b\nb:\njmp rel a\n");
        const RunOutcome out = f.go(100, 50);
        ASSERT_TRUE(out.error);
        EXPECT_EQ(out.error->kind(), ExecErrorKind::StepBudgetExceeded);
        EXPECT_EQ(out.trace.steps(), 50u);
        EXPECT_THROW(run(f.prog, f.at(0, 100, 100), f.mem, {}, 50), ExecError);
    }
    {
        Fixture f(cfg, "dw 0x7fffffffffffffff\n");
        const RunOutcome out = f.go();
        ASSERT_TRUE(out.error);
        EXPECT_EQ(out.error->kind(), ExecErrorKind::IllFormedInstruction);
    }
}

TEST(Vm, HaltingJumpIsNotExecuted)
{
    Fixture f(FieldConfig::default_config(), "jmp rel 0\n");
    const RunOutcome out = f.go();
    EXPECT_TRUE(out.halted());
    EXPECT_EQ(out.trace.steps(), 0u);
}

TEST(Vm, HintsFillMemoryBeforeTheStep)
{
    const FieldConfig& cfg = FieldConfig::default_config();
    Fixture f(cfg, "[ap] = [ap] * [ap]; ap++\njmp rel 0\n");
    const std::vector<Hint> hints{{0, [&](const MachineState& s, Memory& m) { m.write(s.ap, felt(1)); }}};
    const Trace t = run(f.prog, f.at(0, 100, 100), f.mem, hints, 10);
    EXPECT_TRUE(t.halted);
    EXPECT_EQ(f.mem.at(felt(100)), felt(1));
}

TEST(Vm, CallAndRetFrames)
{
    const FieldConfig& cfg = FieldConfig::default_config();
    const auto run = stdlib::run_stdlib("assert_nn_le", {felt(3), felt(5)}, cfg);
    ASSERT_TRUE(run->halted());
    const Trace& t = run->trace();
    EXPECT_EQ(run->invocation().kappa(), 17u);
    EXPECT_TRUE(audit_frames(t, run->program, run->mem).ok);
    // The driver's call saved fp and the return address at the frame base.
    const Felt frame = t.states[0].ap;
    EXPECT_EQ(run->mem.at(frame), t.states[0].fp);
    EXPECT_EQ(run->mem.at(frame + 1), t.states[0].pc + 2);
    EXPECT_EQ(t.states[1].fp, frame + 2);
    // Range-check cells hold a and b - a.
    EXPECT_EQ(run->mem.at(felt(1000)), felt(3));
    EXPECT_EQ(run->mem.at(felt(1001)), felt(2));
}

TEST(Vm, EnsuresCheck)
{
    const FieldConfig& cfg = FieldConfig::default_config();
    const auto run = stdlib::run_stdlib("assert_nn_le", {felt(3), felt(5)}, cfg);
    const Trace& t = run->trace();
    const Felt entry_ap = t.states[0].ap;
    EXPECT_TRUE(ensures_check(t, run->mem, [&](std::size_t, const MachineState& s, const Memory&) {
        return s.ap == entry_ap + 16;
    }));
    EXPECT_FALSE(ensures_check(t, run->mem, [&](std::size_t k, const MachineState&, const Memory&) { return k > 100; }));

    const auto bad = stdlib::run_stdlib("assert_nn_le", {felt(5), felt(3)}, cfg);
    ASSERT_FALSE(bad->halted());
    EXPECT_THROW(ensures_check(bad->trace(), bad->mem, [](auto, auto&, auto&) { return true; }), ContractViolation);
}

TEST(Vm, RcEnsuresCheck)
{
    const FieldConfig& cfg = FieldConfig::small_test_config();
    const auto run = stdlib::run_stdlib("assert_nn_le", {felt(3, cfg), felt(5, cfg)}, cfg);
    ASSERT_TRUE(run->halted());
    const Felt start = run->rc_base, end = run->rets.at(0);
    EXPECT_TRUE(rc_ensures_check(run->mem, cfg.rc_bound, 2, start, end, 17).ok);
    EXPECT_FALSE(rc_ensures_check(run->mem, cfg.rc_bound, 3, start, end, 17).ok);
    EXPECT_FALSE(rc_ensures_check(run->mem, cfg.rc_bound, 2, start, end, 1).ok);
    EXPECT_FALSE(rc_ensures_check(run->mem, cfg.rc_bound, 2 + cfg.modulus, start, end, 17).ok);
    // A cell that was never range checked.
    EXPECT_FALSE(rc_ensures_check(run->mem, cfg.rc_bound, 3, start, start + 3, 17).ok);
    EXPECT_THROW(rc_ensures_check(run->mem, cfg.rc_bound, 2, start, end, cfg.modulus), ContractViolation);
}

TEST(Vm, ProgramImageIsFetchedOnSmallFields)
{
    // Instruction words exceed 12289, so code lives only in the program image.
    const FieldConfig& cfg = FieldConfig::small_test_config();
    Fixture f(cfg, kFib);
    EXPECT_FALSE(load_program(f.mem, f.prog));
    f.mem.write(felt(97, cfg), felt(5, cfg));
    EXPECT_TRUE(f.go().halted());
}
