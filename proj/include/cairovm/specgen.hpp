#pragma once

#include "cairovm/field.hpp"
#include "cairovm/isa.hpp"
#include "cairovm/vm.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cairovm::spec {

enum class SpecErrorKind { IllFormed, OutOfBounds, UnsupportedControlFlow, RevokedReference, UnknownCallee };

const char* to_string(SpecErrorKind kind);

class SpecError : public std::runtime_error {
public:
    SpecError(SpecErrorKind kind, const std::string& what);
    SpecErrorKind kind() const { return kind_; }

private:
    SpecErrorKind kind_;
};

// ---------------------------------------------------------------- cfg

enum class Terminator { Ret, Jmp, Jnz, FallThrough, Halt };

const char* to_string(Terminator t);

struct BasicBlock {
    std::size_t start = 0;
    std::size_t end = 0;  // one past the last word
    Terminator term = Terminator::FallThrough;
    std::vector<std::size_t> succs;
    std::vector<std::size_t> preds;
    bool join = false;
    std::size_t function = 0;  // entry offset of the owning function
};

struct CallSite {
    std::size_t at = 0;       // offset of the call instruction
    std::int64_t target = 0;  // word offset, may lie outside the program
    bool external = false;
};

struct CfgFunction {
    std::string name;
    std::size_t entry = 0;
    std::optional<FunctionDecl> decl;
    std::vector<std::size_t> blocks;     // block starts in ascending order
    std::vector<CallSite> calls;
};

struct Cfg {
    /// Only dereferenced while building; may dangle afterwards.
    const Program* program = nullptr;
    const FieldConfig* field = nullptr;
    std::map<std::size_t, BasicBlock> blocks;
    std::vector<CfgFunction> functions;
    /// Edges u -> v with v dominating u (loops).
    std::vector<std::pair<std::size_t, std::size_t>> back_edges;

    const CfgFunction* function_at(std::size_t entry) const;
    const CfgFunction* function_named(const std::string& name) const;
    const BasicBlock& block_containing(std::size_t offset) const;
    std::size_t edge_count() const;
};

/// Function entries are the declared functions, every in-program call
/// target, and word 0 when the program declares nothing. Throws SpecError
/// for ill-formed words, jumps leaving the program, computed jumps and
/// irreducible loops. Immediates are read as signed residues of `cfg`.
Cfg build_cfg(const Program& prog, const FieldConfig& cfg);

// ---------------------------------------------------------------- ap flow

/// Callee facts for calls that leave the program (or to override).
struct ExternalCallee {
    std::string name;
    FunctionDecl decl;
    std::optional<std::int64_t> ap_delta;
};

struct ApFlow {
    /// ap - fp before each instruction, relative to the function frame;
    /// nullopt where incoming paths disagree (revoked).
    std::map<std::size_t, std::optional<std::int64_t>> at;
    /// Whole-function ap change by entry offset, nullopt when unknown.
    std::map<std::size_t, std::optional<std::int64_t>> delta;
};

/// `externals` is keyed by call target offset (relative to word 0).
ApFlow track_ap(const Cfg& cfg, const std::map<std::int64_t, ExternalCallee>& externals = {});

// ---------------------------------------------------------------- spec ast

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Const, Var, Mem, Add, Mul } kind = Kind::Const;
    BigInt value;      // Const (signed, rendered as is)
    std::string name;  // Var
    ExprPtr a, b;      // Mem uses a; Add/Mul use both

    static ExprPtr constant(BigInt v);
    static ExprPtr var(std::string n);
    static ExprPtr mem(ExprPtr addr);
    static ExprPtr add(ExprPtr x, ExprPtr y);
    static ExprPtr mul(ExprPtr x, ExprPtr y);
};

std::string render(const ExprPtr& e);

/// Where the evaluator finds the witness for an existential binder.
struct Locator {
    enum class Kind { FrameCell, CallSteps, BlockSteps } kind = Kind::FrameCell;
    std::int64_t frame_offset = 0;  // FrameCell: fp-relative
    std::size_t pc_offset = 0;      // CallSteps: call instruction; BlockSteps: block start
};

struct Binder {
    std::string name;
    bool natural = false;  // κ variables range over ℕ, the rest over F
    Locator loc;
};

struct Spec;
using SpecPtr = std::shared_ptr<const Spec>;

struct Spec {
    enum class Kind { True, Exists, Eq, Ne, RangeChecked, And, Or, CallSpec, StepLowerBound, BlockRef } kind =
        Kind::True;
    std::vector<Binder> binders;  // Exists
    SpecPtr body;                 // Exists
    ExprPtr lhs, rhs;             // Eq, Ne; RangeChecked uses lhs
    std::vector<SpecPtr> parts;   // And, Or
    std::string callee;           // CallSpec: function name
    std::string kappa;            // CallSpec, BlockRef: step variable
    std::vector<ExprPtr> args;    // CallSpec, BlockRef
    std::vector<ExprPtr> rets;    // CallSpec
    BigInt constant;              // StepLowerBound
    std::vector<std::string> kappas;  // StepLowerBound
    std::size_t block = 0;        // BlockRef
    std::string function;         // BlockRef: owning function

    static SpecPtr truth();
    static SpecPtr exists(std::vector<Binder> binders, SpecPtr body);
    static SpecPtr eq(ExprPtr l, ExprPtr r);
    static SpecPtr ne(ExprPtr l, ExprPtr r);
    static SpecPtr range_checked(ExprPtr x);
    static SpecPtr conj(std::vector<SpecPtr> parts);
    static SpecPtr disj(std::vector<SpecPtr> parts);
    static SpecPtr call(std::string callee, std::string kappa, std::vector<ExprPtr> args, std::vector<ExprPtr> rets);
    static SpecPtr steps(BigInt constant, std::vector<std::string> kappas);
    static SpecPtr block_ref(std::string function, std::size_t block, std::string kappa, std::vector<ExprPtr> args);
};

/// Flattened top-level conjuncts, looking through nested And and Exists.
std::vector<SpecPtr> atoms(const SpecPtr& s);

struct FunctionSpec {
    std::string name;  // function name; block units use "<fn>_block<start>"
    std::size_t entry = 0;
    bool is_block = false;
    std::vector<std::string> params;  // argument names, implicit first
    std::vector<std::string> rets;    // ρ_ names
    SpecPtr body;
};

struct ExtractOptions {
    std::map<std::int64_t, ExternalCallee> externals;
    /// Names of implicit arguments treated as range-check pointers.
    std::set<std::string> rc_pointer_names{"range_check_ptr"};
};

struct Extraction {
    Cfg cfg;
    ApFlow flow;
    std::vector<FunctionSpec> specs;  // functions first (program order), then join-block units

    const FunctionSpec* spec_named(const std::string& name) const;
};

/// Weakest-precondition style extraction for every function. Throws
/// SpecError(RevokedReference) when a needed ap offset is unknown.
Extraction extract_auto_specs(const Program& prog, const FieldConfig& cfg, const ExtractOptions& opts = {});

/// Lean-like text, deterministic.
std::string render_spec(const FunctionSpec& fs);
std::string render_spec_body(const SpecPtr& s);

/// cfg.json document: blocks, edges, calls, ap offsets.
std::string cfg_to_json(const Extraction& ex);

// ---------------------------------------------------------------- evaluation

/// User spec: (mem, κ, args including implicit ones, return values).
using UserSpecFn = std::function<bool(const Memory& mem, std::size_t kappa, const std::vector<Felt>& args,
                                      const std::vector<Felt>& rets)>;

struct UserSpecs {
    /// Keyed by function name (CallSpec callee).
    std::map<std::string, UserSpecFn> functions;
    /// Keyed by FunctionSpec name of a block unit; missing means `true`.
    std::map<std::string, UserSpecFn> blocks;
};

struct Invocation {
    std::size_t entry_index = 0;  // trace index of the first instruction
    std::size_t ret_index = 0;    // trace index of the executed ret
    std::size_t kappa() const { return ret_index + 1 - entry_index; }
};

/// All completed invocations of the function starting at `entry`.
std::vector<Invocation> find_invocations(const Trace& trace, const Program& prog, const Memory& mem, std::size_t entry);

struct EvalResult {
    bool value = false;
    std::string diagnostic;  // set when false
};

/// Evaluates an auto-spec on one invocation. Arguments and return values are
/// read from the frame; existentials are witnessed by trace memory and
/// sub-trace step counts.
EvalResult eval_spec_on_trace(const FunctionSpec& fs, const Trace& trace, const Memory& mem, const Program& prog,
                              const Invocation& inv, const UserSpecs& user_specs);

/// Arguments and return values of an invocation, in declaration order.
std::vector<Felt> invocation_args(const FunctionDecl& decl, const Trace& trace, const Memory& mem,
                                  const Invocation& inv);
std::vector<Felt> invocation_rets(const FunctionDecl& decl, const Trace& trace, const Memory& mem,
                                  const Invocation& inv);

}  // namespace cairovm::spec
