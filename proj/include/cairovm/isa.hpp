#pragma once

#include "cairovm/bigint.hpp"
#include "cairovm/field.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cairovm {

// Instruction word layout (63 bits, little-endian bit numbering):
//
//   bits  0..15  off_dst + 2^15
//   bits 16..31  off_op0 + 2^15
//   bits 32..47  off_op1 + 2^15
//   bit  48      dst_reg       0 = ap, 1 = fp
//   bit  49      op0_reg       0 = ap, 1 = fp
//   bit  50      op1_imm       op1 = [pc + off_op1]
//   bit  51      op1_fp        op1 = [fp + off_op1]
//   bit  52      op1_ap        op1 = [ap + off_op1]
//                (no op1 bit)  op1 = [op0 + off_op1]
//   bit  53      res_add
//   bit  54      res_mul       (neither: res = op1, or unconstrained under jnz)
//   bit  55      pc_jump_abs
//   bit  56      pc_jump_rel
//   bit  57      pc_jnz
//   bit  58      ap_add        ap += res
//   bit  59      ap_add1       ap += 1
//   bit  60      opcode_call
//   bit  61      opcode_ret
//   bit  62      opcode_assert_eq
//
// Each flag group is one-hot or empty; any other pattern, a set bit 63 or
// above, or a semantically invalid combination decodes to IllFormed.
namespace flag_bit {
inline constexpr unsigned kDstReg = 0;
inline constexpr unsigned kOp0Reg = 1;
inline constexpr unsigned kOp1Imm = 2;
inline constexpr unsigned kOp1Fp = 3;
inline constexpr unsigned kOp1Ap = 4;
inline constexpr unsigned kResAdd = 5;
inline constexpr unsigned kResMul = 6;
inline constexpr unsigned kPcJumpAbs = 7;
inline constexpr unsigned kPcJumpRel = 8;
inline constexpr unsigned kPcJnz = 9;
inline constexpr unsigned kApAdd = 10;
inline constexpr unsigned kApAdd1 = 11;
inline constexpr unsigned kOpcodeCall = 12;
inline constexpr unsigned kOpcodeRet = 13;
inline constexpr unsigned kOpcodeAssertEq = 14;
inline constexpr unsigned kFlagCount = 15;
inline constexpr unsigned kFlagsShift = 48;
}  // namespace flag_bit

enum class Register : std::uint8_t { AP, FP };
enum class Op1Source : std::uint8_t { Op0Deref, Imm, FpDeref, ApDeref };
enum class ResLogic : std::uint8_t { Op1, Add, Mul, Unconstrained };
enum class PcUpdate : std::uint8_t { Regular, JumpAbs, JumpRel, Jnz };
enum class ApUpdate : std::uint8_t { Regular, AddRes, Add1 };
enum class Opcode : std::uint8_t { Nop, AssertEq, Call, Ret };

struct Instruction {
    std::int16_t off_dst = 0;
    std::int16_t off_op0 = 0;
    std::int16_t off_op1 = 0;
    Register dst_reg = Register::AP;
    Register op0_reg = Register::AP;
    Op1Source op1_src = Op1Source::Imm;
    ResLogic res = ResLogic::Op1;
    PcUpdate pc_update = PcUpdate::Regular;
    ApUpdate ap_update = ApUpdate::Regular;
    Opcode opcode = Opcode::Nop;

    std::size_t size() const { return op1_src == Op1Source::Imm ? 2 : 1; }

    /// Reason the flag combination is not a valid instruction, if any.
    std::optional<std::string> violation() const;
    bool valid() const { return !violation().has_value(); }

    bool operator==(const Instruction&) const = default;
};

struct IllFormed {
    std::string reason;
};

using Decoded = std::variant<Instruction, IllFormed>;

/// Throws std::invalid_argument for an invalid instruction.
std::uint64_t encode(const Instruction& instr);
Decoded decode(const BigInt& word);
Decoded decode(const Felt& word);

/// Every valid (flags) combination with all offsets zero.
std::vector<Instruction> valid_flag_combinations();

// Canonical forms used by the assembler.
Instruction make_ret();
Instruction make_call_rel_imm();
Instruction make_call_abs_imm();
Instruction make_jmp_rel_imm();
Instruction make_jmp_abs_imm();
Instruction make_jnz_imm(Register cond_reg, std::int16_t cond_off);
Instruction make_ap_add_imm();

/// A `jmp rel 0` self-loop: the halting convention.
bool is_halting_jump(const Instruction& instr, const BigInt& immediate);

struct FunctionDecl {
    std::string name;
    std::size_t offset = 0;
    /// Implicit arguments (e.g. range_check_ptr); also returned first.
    std::vector<std::string> implicit_args;
    std::vector<std::string> args;
    std::vector<std::string> rets;

    std::size_t arity() const { return implicit_args.size() + args.size(); }
    std::size_t return_count() const { return implicit_args.size() + rets.size(); }
    std::vector<std::string> all_args() const;
    std::vector<std::string> all_rets() const;
    bool operator==(const FunctionDecl&) const = default;
};

/// Encoded instructions and immediates. Words are canonical naturals: an
/// instruction word is < 2^63, an immediate is a residue of the VM field it
/// was assembled for.
struct Program {
    std::vector<BigInt> words;
    BigInt base_pc = 0;
    std::map<std::string, std::size_t> labels;
    std::vector<FunctionDecl> functions;

    /// Word offsets of instruction starts. Throws std::runtime_error when a
    /// word is ill-formed or the last instruction runs past the end.
    std::vector<std::size_t> instruction_offsets() const;

    const FunctionDecl* function_at(std::size_t offset) const;
    const FunctionDecl* function_named(const std::string& name) const;
    /// Label or function name at `offset`, if any.
    std::optional<std::string> label_at(std::size_t offset) const;
};

}  // namespace cairovm
