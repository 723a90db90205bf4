#pragma once

#include "cairovm/casm.hpp"
#include "cairovm/field.hpp"
#include "cairovm/specgen.hpp"
#include "cairovm/vm.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cairovm::stdlib {

// Word offsets inside the assembled library. assert_nn and assert_le are
// reconstructions pinned by the assert_nn_le listing: its two `call rel -11`
// land 9 and 5 words before its entry, and Δap is 1 (assert_nn), 5
// (assert_le) and 14 (assert_nn_le).
inline constexpr std::size_t kAssertNnOffset = 0;
inline constexpr std::size_t kAssertLeOffset = 4;
inline constexpr std::size_t kAssertNnLeOffset = 9;
inline constexpr std::size_t kLibrarySize = 18;

/// Casm text of each function, header included.
const std::map<std::string, std::string>& sources();
/// The three functions in layout order.
std::string library_source();

Program assemble_library(const FieldConfig& cfg);

/// Library followed by a driver `call rel <fn>` / `jmp rel 0`.
Program assemble_with_driver(const std::string& fn, const FieldConfig& cfg);
/// Offset of the driver call in a program from assemble_with_driver.
inline constexpr std::size_t kDriverOffset = kLibrarySize;

/// Where the driver's frame starts; arguments sit at kStackBase onward.
inline constexpr long kStackBase = 100;
inline constexpr long kDefaultRcBase = 1000;
inline constexpr std::size_t kRcSegmentSize = 256;

struct StdlibRun {
    std::string function;
    const FieldConfig* cfg;
    Program program;
    Memory mem;
    RunOutcome outcome;
    std::vector<Felt> args;  // including range_check_ptr
    std::vector<Felt> rets;  // set when halted
    Felt rc_base;

    bool halted() const { return outcome.halted(); }
    const Trace& trace() const { return outcome.trace; }
    /// The function's own invocation (entry at trace index 1).
    spec::Invocation invocation() const;
    const FunctionDecl& decl() const;
};

/// Runs one library function on `args` (explicit arguments only; the range
/// check pointer rc_base is prepended). The rc segment at rc_base is
/// registered in memory so writes above rc_bound fail.
std::unique_ptr<StdlibRun> run_stdlib(const std::string& fn, const std::vector<Felt>& args, const FieldConfig& cfg,
                                      const BigInt& rc_base = kDefaultRcBase, std::size_t max_steps = 1000);

// User specifications.
bool spec_assert_nn(const FieldConfig& cfg, const Felt& a);
bool spec_assert_le(const FieldConfig& cfg, const Felt& a, const Felt& b);
bool spec_assert_nn_le(const FieldConfig& cfg, const Felt& a, const Felt& b);

/// Registry form used by spec evaluation: args include range_check_ptr.
spec::UserSpecs user_specs();

}  // namespace cairovm::stdlib
