#include "cairovm/casm.hpp"
#include "cairovm/specgen.hpp"
#include "cairovm/stdlib.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace cairovm;

namespace {

const FieldConfig& F()
{
    return FieldConfig::default_config();
}

std::string golden(const std::string& name)
{
    std::ifstream in(std::string(CAIROVM_TEST_GOLDEN_DIR) + "/" + name);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

constexpr const char* kBranchy = R"(func pick(x) -> (y):
jmp rel nz if [fp + (-3)] != 0
[ap] = 1; ap++
jmp rel done
nz:
[ap] = 2; ap++
done:
[ap] = [ap + (-1)] + 1; ap++
ret
func use(x) -> (y):
[ap] = [fp + (-3)]; ap++
call rel pick
[ap] = [ap + (-1)] * 3; ap++
ret
)";

struct Traced {
    Program prog;
    Memory mem;
    RunOutcome out;
};

// Calls `fn` with one argument from an appended driver.
Traced call_one(const std::string& src, const std::string& fn, const Felt& arg)
{
    Traced t{parse_casm(src + "main:\ncall rel " + fn + "\njmp rel 0\n", F()), Memory(F()), {}};
    load_program(t.mem, t.prog);
    t.mem.write(Felt(100L, F()), arg);
    const MachineState s{Felt(from_u64(t.prog.labels.at("main")), F()), Felt(101L, F()), Felt(101L, F())};
    t.out = run_collect(t.prog, s, t.mem, {}, 1000);
    return t;
}

BigInt pick_value(const Felt& x)
{
    return x.is_zero() ? 2 : 3;
}

spec::UserSpecs branchy_specs()
{
    spec::UserSpecs us;
    us.functions["pick"] = [](const Memory&, std::size_t, const std::vector<Felt>& a, const std::vector<Felt>& r) {
        return r.at(0).value() == pick_value(a.at(0));
    };
    us.functions["use"] = [](const Memory&, std::size_t, const std::vector<Felt>& a, const std::vector<Felt>& r) {
        return r.at(0).value() == 3 * pick_value(a.at(0));
    };
    return us;
}

}  // namespace

TEST(Specgen, LibraryGoldenFiles)
{
    const spec::Extraction ex = spec::extract_auto_specs(stdlib::assemble_library(F()), F());
    for (const char* fn : {"assert_nn", "assert_le", "assert_nn_le"}) {
        const spec::FunctionSpec* fs = ex.spec_named(fn);
        ASSERT_NE(fs, nullptr) << fn;
        EXPECT_EQ(spec::render_spec(*fs), golden(std::string(fn) + "_auto_spec.txt")) << fn;
    }
    EXPECT_EQ(spec::cfg_to_json(ex), golden("assert_nn_le_cfg.json"));
}

TEST(Specgen, RenderingIsDeterministic)
{
    const Program p = parse_casm(kBranchy, F());
    const auto a = spec::extract_auto_specs(p, F());
    const auto b = spec::extract_auto_specs(p, F());
    ASSERT_EQ(a.specs.size(), b.specs.size());
    for (std::size_t i = 0; i < a.specs.size(); ++i)
        EXPECT_EQ(spec::render_spec(a.specs[i]), spec::render_spec(b.specs[i]));
}

TEST(Specgen, ApFlowOfTheLibrary)
{
    const Program p = stdlib::assemble_library(F());
    const spec::Cfg cfg = spec::build_cfg(p, F());
    const spec::ApFlow flow = spec::track_ap(cfg);
    EXPECT_EQ(flow.delta.at(stdlib::kAssertNnOffset), 1);
    EXPECT_EQ(flow.delta.at(stdlib::kAssertLeOffset), 5);
    EXPECT_EQ(flow.delta.at(stdlib::kAssertNnLeOffset), 14);
    EXPECT_EQ(cfg.functions.size(), 3u);
    EXPECT_TRUE(cfg.back_edges.empty());
}

TEST(Specgen, BranchAndJoinBlocks)
{
    const Program p = parse_casm(kBranchy, F());
    const spec::Cfg cfg = spec::build_cfg(p, F());
    const std::size_t join = p.labels.at("done");
    const spec::BasicBlock& entry = cfg.block_containing(0);
    EXPECT_EQ(entry.term, spec::Terminator::Jnz);
    EXPECT_EQ(entry.succs.size(), 2u);
    EXPECT_TRUE(cfg.blocks.at(join).join);
    EXPECT_EQ(cfg.blocks.at(join).preds.size(), 2u);
    EXPECT_EQ(cfg.blocks.at(join).term, spec::Terminator::Ret);

    const spec::ApFlow flow = spec::track_ap(cfg);
    EXPECT_EQ(flow.at.at(join), 1);
    EXPECT_EQ(flow.delta.at(0), 2);
    EXPECT_EQ(flow.delta.at(p.function_named("use")->offset), 1 + 2 + 2 + 1);

    const spec::Extraction ex = spec::extract_auto_specs(p, F());
    const spec::FunctionSpec* pick = ex.spec_named("pick");
    ASSERT_NE(pick, nullptr);
    EXPECT_NE(spec::render_spec(*pick).find("x = 0"), std::string::npos);
    EXPECT_NE(spec::render_spec(*pick).find("x ≠ 0"), std::string::npos);
    const auto block = std::find_if(ex.specs.begin(), ex.specs.end(), [](const auto& s) { return s.is_block; });
    ASSERT_NE(block, ex.specs.end());
    EXPECT_EQ(block->entry, join);
}

TEST(Specgen, AutoSpecsHoldOnTracesAndImplyUserSpecs)
{
    const Program p = parse_casm(kBranchy, F());
    const spec::UserSpecs us = branchy_specs();
    for (long x : {0L, 1L, 2L, -1L, 1000L}) {
        for (const char* fn : {"pick", "use"}) {
            Traced t = call_one(kBranchy, fn, Felt(x, F()));
            ASSERT_TRUE(t.out.halted());
            const spec::Extraction ex = spec::extract_auto_specs(t.prog, F());
            const auto invs = spec::find_invocations(t.out.trace, t.prog, t.mem, t.prog.function_named(fn)->offset);
            ASSERT_EQ(invs.size(), 1u);
            const auto r = spec::eval_spec_on_trace(*ex.spec_named(fn), t.out.trace, t.mem, t.prog, invs[0], us);
            EXPECT_TRUE(r.value) << fn << "(" << x << "): " << r.diagnostic;
            const auto* decl = t.prog.function_named(fn);
            const auto args = spec::invocation_args(*decl, t.out.trace, t.mem, invs[0]);
            const auto rets = spec::invocation_rets(*decl, t.out.trace, t.mem, invs[0]);
            EXPECT_TRUE(us.functions.at(fn)(t.mem, invs[0].kappa(), args, rets));
        }
    }
}

TEST(Specgen, EvaluationConsultsCalleeSpecs)
{
    spec::UserSpecs wrong = branchy_specs();
    wrong.functions["pick"] = [](const Memory&, std::size_t, const std::vector<Felt>&, const std::vector<Felt>&) {
        return false;
    };
    Traced t = call_one(kBranchy, "use", Felt(4L, F()));
    const spec::Extraction ex = spec::extract_auto_specs(t.prog, F());
    const auto invs = spec::find_invocations(t.out.trace, t.prog, t.mem, t.prog.function_named("use")->offset);
    ASSERT_EQ(invs.size(), 1u);
    const auto r = spec::eval_spec_on_trace(*ex.spec_named("use"), t.out.trace, t.mem, t.prog, invs[0], wrong);
    EXPECT_FALSE(r.value);
    EXPECT_FALSE(r.diagnostic.empty());
}

TEST(Specgen, StepBoundsAreTight)
{
    // assert_nn_le(3, 5): kappa 17 = 3 (assert_nn) + 7 (assert_le) + 7.
    const auto run = stdlib::run_stdlib("assert_nn_le", {Felt(3L, F()), Felt(5L, F())}, F());
    const auto& t = run->trace();
    const auto nn = spec::find_invocations(t, run->program, run->mem, stdlib::kAssertNnOffset);
    const auto le = spec::find_invocations(t, run->program, run->mem, stdlib::kAssertLeOffset);
    ASSERT_EQ(nn.size(), 2u);  // once directly, once through assert_le
    ASSERT_EQ(le.size(), 1u);
    EXPECT_EQ(nn[0].kappa(), 3u);
    EXPECT_EQ(le[0].kappa(), 7u);
    EXPECT_EQ(run->invocation().kappa(), 3u + 7u + 7u);
}

TEST(Specgen, RevokedApIsAnError)
{
    const char* src = "func skew(x) -> ():\n"
                      "jmp rel nz if [fp + (-3)] != 0\n"
                      "[ap] = 1; ap++\n"
                      "nz:\n"
                      "[ap] = 2; ap++\n"
                      "[ap] = [ap + (-1)]; ap++\n"
                      "ret\n";
    try {
        spec::extract_auto_specs(parse_casm(src, F()), F());
        FAIL() << "extraction succeeded";
    } catch (const spec::SpecError& e) {
        EXPECT_EQ(e.kind(), spec::SpecErrorKind::RevokedReference);
    }
    const spec::ApFlow flow = spec::track_ap(spec::build_cfg(parse_casm(src, F()), F()));
    EXPECT_FALSE(flow.delta.at(0).has_value());
}

TEST(Specgen, ExternalCallees)
{
    const char* src = "func f() -> ():\ncall abs 1000\nret\n";
    const Program p = parse_casm(src, F());
    try {
        spec::extract_auto_specs(p, F());
        FAIL() << "unknown callee accepted";
    } catch (const spec::SpecError& e) {
        EXPECT_EQ(e.kind(), spec::SpecErrorKind::UnknownCallee);
    }
    spec::ExtractOptions opts;
    opts.externals[1000] = {"g", FunctionDecl{"g", 1000, {}, {}, {}}, 0};
    const spec::Extraction ex = spec::extract_auto_specs(p, F(), opts);
    EXPECT_NE(spec::render_spec(*ex.spec_named("f")).find("spec_g"), std::string::npos);
}

TEST(Specgen, MalformedControlFlow)
{
    auto kind_of = [](const std::string& src) {
        try {
            spec::build_cfg(parse_casm(src, F()), F());
        } catch (const spec::SpecError& e) {
            return e.kind();
        }
        return spec::SpecErrorKind::IllFormed;  // sentinel: no error
    };
    EXPECT_EQ(kind_of("jmp rel 40\n"), spec::SpecErrorKind::OutOfBounds);
    EXPECT_EQ(kind_of("jmp abs [fp + (-1)]\n"), spec::SpecErrorKind::UnsupportedControlFlow);
    Program bad;
    bad.words = {pow2(63)};
    EXPECT_THROW(spec::build_cfg(bad, F()), spec::SpecError);
}
