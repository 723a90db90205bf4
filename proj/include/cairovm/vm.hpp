#pragma once

#include "cairovm/field.hpp"
#include "cairovm/isa.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cairovm {

struct MachineState {
    Felt pc;
    Felt ap;
    Felt fp;

    bool operator==(const MachineState& o) const { return pc == o.pc && ap == o.ap && fp == o.fp; }
};

enum class ExecErrorKind {
    IllFormedInstruction,
    AssertFailed,
    UnassignedRead,
    WriteConflict,
    DivisionByZero,
    StepBudgetExceeded,
};

const char* to_string(ExecErrorKind kind);

class ExecError : public std::runtime_error {
public:
    ExecError(ExecErrorKind kind, const std::string& detail, std::optional<std::size_t> step = std::nullopt);

    ExecErrorKind kind() const { return kind_; }
    const std::string& detail() const { return detail_; }
    /// Index of the state whose instruction failed, when known.
    std::optional<std::size_t> step() const { return step_; }
    ExecError at_step(std::size_t step) const { return ExecError(kind_, detail_, step); }

private:
    ExecErrorKind kind_;
    std::string detail_;
    std::optional<std::size_t> step_;
};

/// Raised when a checker is used outside its contract (e.g. ensures on a
/// non-halting trace).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Write-once partial map from addresses to values.
///
/// Cells inside a registered range-check segment only accept values whose
/// canonical residue is below rc_bound; anything else is AssertFailed.
class Memory {
public:
    explicit Memory(const FieldConfig& cfg) : cfg_(&cfg) {}

    const FieldConfig& config() const { return *cfg_; }

    std::optional<Felt> get(const Felt& addr) const;
    bool assigned(const Felt& addr) const { return cells_.count(addr.value()) != 0; }
    /// Throws ExecError(UnassignedRead).
    Felt at(const Felt& addr) const;

    /// Equal rewrite is a no-op; a different value is WriteConflict.
    void write(const Felt& addr, const Felt& value);

    void add_range_check_segment(const Felt& base, const BigInt& size);
    bool in_range_check_segment(const Felt& addr) const;

    std::size_t size() const { return cells_.size(); }
    /// Canonical address -> canonical value.
    const std::map<BigInt, BigInt>& cells() const { return cells_; }
    /// Every effective write in order (no-op rewrites are not logged).
    const std::vector<std::pair<BigInt, BigInt>>& write_log() const { return log_; }

private:
    struct Segment {
        BigInt base;
        BigInt size;
    };

    const FieldConfig* cfg_;
    std::map<BigInt, BigInt> cells_;
    std::vector<std::pair<BigInt, BigInt>> log_;
    std::vector<Segment> rc_segments_;
};

/// Writes the program image into memory at base_pc when every word is a
/// residue of the memory's field. Returns whether it did. Instruction fetch
/// reads the program directly, so this only matters for code-as-data reads.
bool load_program(Memory& mem, const Program& prog);

struct Fetched {
    Instruction instr;
    std::optional<BigInt> imm;
};

/// Decodes the instruction at pc: from the program image when pc lies in it,
/// otherwise from memory. Throws ExecError(IllFormedInstruction / UnassignedRead).
Fetched fetch(const Program& prog, const Memory& mem, const Felt& pc);

struct Halted {};

using StepResult = std::variant<MachineState, Halted>;

/// One step. Writes deduced cells into `mem`; throws ExecError on failure.
StepResult next_state(Memory& mem, const MachineState& s, const Program& prog);

struct Hint {
    std::size_t offset;  // program word offset
    std::function<void(const MachineState&, Memory&)> action;
};

struct Trace {
    std::vector<MachineState> states;
    bool halted = false;

    std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
    const MachineState& final_state() const { return states.back(); }
};

/// Runs until the halting self-jump, an error, or max_steps executed steps.
/// Throws ExecError carrying the step index.
Trace run(const Program& prog, const MachineState& entry, Memory& mem, const std::vector<Hint>& hints,
          std::size_t max_steps);

struct RunOutcome {
    Trace trace;
    std::optional<ExecError> error;

    bool halted() const { return !error && trace.halted; }
};

/// Same as run, keeping the partial trace when execution fails.
RunOutcome run_collect(const Program& prog, const MachineState& entry, Memory& mem, const std::vector<Hint>& hints,
                       std::size_t max_steps);

using StatePredicate = std::function<bool(std::size_t kappa, const MachineState&, const Memory&)>;

/// True iff some index i has P(i, states[i], mem). P must be monotone in its
/// kappa argument: only kappa' = i is tried.
bool ensures_check(const Trace& trace, const Memory& mem, const StatePredicate& p);

struct CheckResult {
    bool ok = true;
    std::string reason;

    explicit operator bool() const { return ok; }
    static CheckResult pass() { return {}; }
    static CheckResult fail(std::string why) { return {false, std::move(why)}; }
};

/// mu <= kappa, end = start + mu in the field, and every mem[start + j]
/// (j < mu) is assigned with canonical value < rc_bound. Requires
/// kappa < modulus (ContractViolation otherwise).
CheckResult rc_ensures_check(const Memory& mem, const BigInt& rc_bound, const BigInt& mu, const Felt& start,
                             const Felt& end, const BigInt& kappa);

/// Call/return discipline over a trace: each call at step i returning at
/// step j leaves states[j+1].fp = states[i].fp and states[j+1].pc = pc_i + size.
CheckResult audit_frames(const Trace& trace, const Program& prog, const Memory& mem);

}  // namespace cairovm
