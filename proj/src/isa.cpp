#include "cairovm/isa.hpp"

#include <stdexcept>

namespace cairovm {

namespace {

constexpr std::uint64_t kOffsetBias = 1u << 15;

std::uint64_t bit(unsigned flag)
{
    return std::uint64_t{1} << (flag_bit::kFlagsShift + flag);
}

std::int16_t unbias(std::uint64_t field)
{
    return static_cast<std::int16_t>(static_cast<std::int64_t>(field & 0xffff) - static_cast<std::int64_t>(kOffsetBias));
}

}  // namespace

std::optional<std::string> Instruction::violation() const
{
    if ((res == ResLogic::Unconstrained) != (pc_update == PcUpdate::Jnz))
        return "res is unconstrained exactly when pc_update is jnz";
    if (opcode == Opcode::Call) {
        if (pc_update != PcUpdate::JumpAbs && pc_update != PcUpdate::JumpRel)
            return "call must jump (abs or rel)";
        if (ap_update != ApUpdate::Regular)
            return "call advances ap by 2 implicitly; ap_update must be regular";
    }
    if (opcode == Opcode::Ret) {
        if (pc_update != PcUpdate::JumpAbs)
            return "ret takes its pc from memory (pc_update must be jump_abs)";
        if (ap_update != ApUpdate::Regular)
            return "ret must not update ap";
    }
    if (opcode == Opcode::AssertEq && res == ResLogic::Unconstrained)
        return "assert_eq needs a constrained res";
    return std::nullopt;
}

std::uint64_t encode(const Instruction& instr)
{
    if (auto why = instr.violation())
        throw std::invalid_argument("cannot encode invalid instruction: " + *why);

    std::uint64_t w = 0;
    w |= (static_cast<std::uint64_t>(static_cast<std::int64_t>(instr.off_dst) + kOffsetBias) & 0xffff);
    w |= (static_cast<std::uint64_t>(static_cast<std::int64_t>(instr.off_op0) + kOffsetBias) & 0xffff) << 16;
    w |= (static_cast<std::uint64_t>(static_cast<std::int64_t>(instr.off_op1) + kOffsetBias) & 0xffff) << 32;

    using namespace flag_bit;
    if (instr.dst_reg == Register::FP)
        w |= bit(kDstReg);
    if (instr.op0_reg == Register::FP)
        w |= bit(kOp0Reg);
    switch (instr.op1_src) {
    case Op1Source::Op0Deref: break;
    case Op1Source::Imm: w |= bit(kOp1Imm); break;
    case Op1Source::FpDeref: w |= bit(kOp1Fp); break;
    case Op1Source::ApDeref: w |= bit(kOp1Ap); break;
    }
    switch (instr.res) {
    case ResLogic::Op1:
    case ResLogic::Unconstrained: break;
    case ResLogic::Add: w |= bit(kResAdd); break;
    case ResLogic::Mul: w |= bit(kResMul); break;
    }
    switch (instr.pc_update) {
    case PcUpdate::Regular: break;
    case PcUpdate::JumpAbs: w |= bit(kPcJumpAbs); break;
    case PcUpdate::JumpRel: w |= bit(kPcJumpRel); break;
    case PcUpdate::Jnz: w |= bit(kPcJnz); break;
    }
    switch (instr.ap_update) {
    case ApUpdate::Regular: break;
    case ApUpdate::AddRes: w |= bit(kApAdd); break;
    case ApUpdate::Add1: w |= bit(kApAdd1); break;
    }
    switch (instr.opcode) {
    case Opcode::Nop: break;
    case Opcode::Call: w |= bit(kOpcodeCall); break;
    case Opcode::Ret: w |= bit(kOpcodeRet); break;
    case Opcode::AssertEq: w |= bit(kOpcodeAssertEq); break;
    }
    return w;
}

Decoded decode(const BigInt& word)
{
    if (word < 0 || mpz_sizeinbase(word.get_mpz_t(), 2) > 63)
        return IllFormed{"word does not fit in 63 bits"};
    const std::uint64_t w = to_u64(word);

    Instruction instr;
    instr.off_dst = unbias(w);
    instr.off_op0 = unbias(w >> 16);
    instr.off_op1 = unbias(w >> 32);

    using namespace flag_bit;
    auto has = [w](unsigned flag) { return (w & bit(flag)) != 0; };

    instr.dst_reg = has(kDstReg) ? Register::FP : Register::AP;
    instr.op0_reg = has(kOp0Reg) ? Register::FP : Register::AP;

    const int op1_bits = has(kOp1Imm) + has(kOp1Fp) + has(kOp1Ap);
    if (op1_bits > 1)
        return IllFormed{"more than one op1 source flag"};
    instr.op1_src = has(kOp1Imm) ? Op1Source::Imm
                  : has(kOp1Fp)  ? Op1Source::FpDeref
                  : has(kOp1Ap)  ? Op1Source::ApDeref
                                 : Op1Source::Op0Deref;

    if (has(kResAdd) && has(kResMul))
        return IllFormed{"both res_add and res_mul set"};

    const int pc_bits = has(kPcJumpAbs) + has(kPcJumpRel) + has(kPcJnz);
    if (pc_bits > 1)
        return IllFormed{"more than one pc_update flag"};
    instr.pc_update = has(kPcJumpAbs) ? PcUpdate::JumpAbs
                    : has(kPcJumpRel) ? PcUpdate::JumpRel
                    : has(kPcJnz)     ? PcUpdate::Jnz
                                      : PcUpdate::Regular;

    if (has(kResAdd))
        instr.res = ResLogic::Add;
    else if (has(kResMul))
        instr.res = ResLogic::Mul;
    else
        instr.res = instr.pc_update == PcUpdate::Jnz ? ResLogic::Unconstrained : ResLogic::Op1;

    if (has(kApAdd) && has(kApAdd1))
        return IllFormed{"both ap_add and ap_add1 set"};
    instr.ap_update = has(kApAdd) ? ApUpdate::AddRes : has(kApAdd1) ? ApUpdate::Add1 : ApUpdate::Regular;

    const int op_bits = has(kOpcodeCall) + has(kOpcodeRet) + has(kOpcodeAssertEq);
    if (op_bits > 1)
        return IllFormed{"more than one opcode flag"};
    instr.opcode = has(kOpcodeCall)       ? Opcode::Call
                 : has(kOpcodeRet)        ? Opcode::Ret
                 : has(kOpcodeAssertEq)   ? Opcode::AssertEq
                                          : Opcode::Nop;

    if (auto why = instr.violation())
        return IllFormed{*why};
    return instr;
}

Decoded decode(const Felt& word)
{
    return decode(word.value());
}

std::vector<Instruction> valid_flag_combinations()
{
    std::vector<Instruction> out;
    for (auto dst : {Register::AP, Register::FP})
        for (auto op0 : {Register::AP, Register::FP})
            for (auto op1 : {Op1Source::Op0Deref, Op1Source::Imm, Op1Source::FpDeref, Op1Source::ApDeref})
                for (auto res : {ResLogic::Op1, ResLogic::Add, ResLogic::Mul, ResLogic::Unconstrained})
                    for (auto pc : {PcUpdate::Regular, PcUpdate::JumpAbs, PcUpdate::JumpRel, PcUpdate::Jnz})
                        for (auto ap : {ApUpdate::Regular, ApUpdate::AddRes, ApUpdate::Add1})
                            for (auto op : {Opcode::Nop, Opcode::AssertEq, Opcode::Call, Opcode::Ret}) {
                                Instruction i;
                                i.dst_reg = dst;
                                i.op0_reg = op0;
                                i.op1_src = op1;
                                i.res = res;
                                i.pc_update = pc;
                                i.ap_update = ap;
                                i.opcode = op;
                                if (i.valid())
                                    out.push_back(i);
                            }
    return out;
}

Instruction make_ret()
{
    Instruction i;
    i.off_dst = -2;
    i.off_op0 = -1;
    i.off_op1 = -1;
    i.dst_reg = Register::FP;
    i.op0_reg = Register::FP;
    i.op1_src = Op1Source::FpDeref;
    i.res = ResLogic::Op1;
    i.pc_update = PcUpdate::JumpAbs;
    i.opcode = Opcode::Ret;
    return i;
}

namespace {

Instruction call_imm(PcUpdate pc)
{
    Instruction i;
    i.off_dst = 0;
    i.off_op0 = 1;
    i.off_op1 = 1;
    i.dst_reg = Register::AP;
    i.op0_reg = Register::AP;
    i.op1_src = Op1Source::Imm;
    i.res = ResLogic::Op1;
    i.pc_update = pc;
    i.opcode = Opcode::Call;
    return i;
}

Instruction nop_imm()
{
    Instruction i;
    i.off_dst = -1;
    i.off_op0 = -1;
    i.off_op1 = 1;
    i.dst_reg = Register::FP;
    i.op0_reg = Register::FP;
    i.op1_src = Op1Source::Imm;
    i.res = ResLogic::Op1;
    return i;
}

}  // namespace

Instruction make_call_rel_imm() { return call_imm(PcUpdate::JumpRel); }
Instruction make_call_abs_imm() { return call_imm(PcUpdate::JumpAbs); }

Instruction make_jmp_rel_imm()
{
    Instruction i = nop_imm();
    i.pc_update = PcUpdate::JumpRel;
    return i;
}

Instruction make_jmp_abs_imm()
{
    Instruction i = nop_imm();
    i.pc_update = PcUpdate::JumpAbs;
    return i;
}

Instruction make_jnz_imm(Register cond_reg, std::int16_t cond_off)
{
    Instruction i = nop_imm();
    i.dst_reg = cond_reg;
    i.off_dst = cond_off;
    i.res = ResLogic::Unconstrained;
    i.pc_update = PcUpdate::Jnz;
    return i;
}

Instruction make_ap_add_imm()
{
    Instruction i = nop_imm();
    i.ap_update = ApUpdate::AddRes;
    return i;
}

bool is_halting_jump(const Instruction& instr, const BigInt& immediate)
{
    return instr.opcode == Opcode::Nop && instr.pc_update == PcUpdate::JumpRel && instr.res == ResLogic::Op1 &&
           instr.op1_src == Op1Source::Imm && instr.off_op1 == 1 && instr.ap_update == ApUpdate::Regular &&
           immediate == 0;
}

std::vector<std::string> FunctionDecl::all_args() const
{
    std::vector<std::string> out = implicit_args;
    out.insert(out.end(), args.begin(), args.end());
    return out;
}

std::vector<std::string> FunctionDecl::all_rets() const
{
    std::vector<std::string> out = implicit_args;
    out.insert(out.end(), rets.begin(), rets.end());
    return out;
}

std::vector<std::size_t> Program::instruction_offsets() const
{
    std::vector<std::size_t> out;
    std::size_t at = 0;
    while (at < words.size()) {
        Decoded d = decode(words[at]);
        if (auto* bad = std::get_if<IllFormed>(&d))
            throw std::runtime_error("ill-formed word at offset " + std::to_string(at) + ": " + bad->reason);
        const auto& instr = std::get<Instruction>(d);
        if (at + instr.size() > words.size())
            throw std::runtime_error("instruction at offset " + std::to_string(at) + " runs past program end");
        out.push_back(at);
        at += instr.size();
    }
    return out;
}

const FunctionDecl* Program::function_at(std::size_t offset) const
{
    for (const auto& f : functions)
        if (f.offset == offset)
            return &f;
    return nullptr;
}

const FunctionDecl* Program::function_named(const std::string& name) const
{
    for (const auto& f : functions)
        if (f.name == name)
            return &f;
    return nullptr;
}

std::optional<std::string> Program::label_at(std::size_t offset) const
{
    if (const auto* f = function_at(offset))
        return f->name;
    for (const auto& [name, off] : labels)
        if (off == offset)
            return name;
    return std::nullopt;
}

}  // namespace cairovm
