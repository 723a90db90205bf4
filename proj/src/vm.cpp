#include "cairovm/vm.hpp"

namespace cairovm {

const char* to_string(ExecErrorKind kind)
{
    switch (kind) {
    case ExecErrorKind::IllFormedInstruction: return "IllFormedInstruction";
    case ExecErrorKind::AssertFailed: return "AssertFailed";
    case ExecErrorKind::UnassignedRead: return "UnassignedRead";
    case ExecErrorKind::WriteConflict: return "WriteConflict";
    case ExecErrorKind::DivisionByZero: return "DivisionByZero";
    case ExecErrorKind::StepBudgetExceeded: return "StepBudgetExceeded";
    }
    return "?";
}

namespace {

std::string describe(ExecErrorKind kind, const std::string& detail, std::optional<std::size_t> step)
{
    std::string s = to_string(kind);
    if (step)
        s += " at step " + std::to_string(*step);
    if (!detail.empty())
        s += ": " + detail;
    return s;
}

}  // namespace

ExecError::ExecError(ExecErrorKind kind, const std::string& detail, std::optional<std::size_t> step)
    : std::runtime_error(describe(kind, detail, step)), kind_(kind), detail_(detail), step_(step)
{
}

std::optional<Felt> Memory::get(const Felt& addr) const
{
    auto it = cells_.find(addr.value());
    if (it == cells_.end())
        return std::nullopt;
    return Felt(it->second, *cfg_);
}

Felt Memory::at(const Felt& addr) const
{
    auto v = get(addr);
    if (!v)
        throw ExecError(ExecErrorKind::UnassignedRead, "address " + to_dec(addr.value()));
    return *v;
}

void Memory::write(const Felt& addr, const Felt& value)
{
    auto it = cells_.find(addr.value());
    if (it != cells_.end()) {
        if (it->second != value.value())
            throw ExecError(ExecErrorKind::WriteConflict, "address " + to_dec(addr.value()) + " holds " +
                                                              to_dec(it->second) + ", write of " +
                                                              to_dec(value.value()));
        return;
    }
    if (value.value() >= cfg_->rc_bound && in_range_check_segment(addr))
        throw ExecError(ExecErrorKind::AssertFailed, "range check: " + to_dec(value.value()) + " at address " +
                                                         to_dec(addr.value()) + " is not below rc_bound");
    cells_.emplace(addr.value(), value.value());
    log_.emplace_back(addr.value(), value.value());
}

void Memory::add_range_check_segment(const Felt& base, const BigInt& size)
{
    rc_segments_.push_back({base.value(), size});
}

bool Memory::in_range_check_segment(const Felt& addr) const
{
    for (const auto& seg : rc_segments_)
        if (mod_floor(addr.value() - seg.base, cfg_->modulus) < seg.size)
            return true;
    return false;
}

bool load_program(Memory& mem, const Program& prog)
{
    for (const auto& w : prog.words)
        if (w >= mem.config().modulus)
            return false;
    const Felt base(prog.base_pc, mem.config());
    for (std::size_t i = 0; i < prog.words.size(); ++i)
        mem.write(base + Felt(from_u64(i), mem.config()), Felt(prog.words[i], mem.config()));
    return true;
}

namespace {

std::optional<BigInt> program_word(const Program& prog, const Memory& mem, const Felt& addr)
{
    const BigInt off = mod_floor(addr.value() - prog.base_pc, mem.config().modulus);
    if (off < from_u64(prog.words.size()))
        return prog.words[to_u64(off)];
    if (auto v = mem.get(addr))
        return v->value();
    return std::nullopt;
}

}  // namespace

Fetched fetch(const Program& prog, const Memory& mem, const Felt& pc)
{
    auto word = program_word(prog, mem, pc);
    if (!word)
        throw ExecError(ExecErrorKind::UnassignedRead, "no instruction at pc " + to_dec(pc.value()));
    Decoded d = decode(*word);
    if (auto* bad = std::get_if<IllFormed>(&d))
        throw ExecError(ExecErrorKind::IllFormedInstruction, "pc " + to_dec(pc.value()) + ": " + bad->reason);
    Fetched f{std::get<Instruction>(d), std::nullopt};
    if (f.instr.op1_src == Op1Source::Imm) {
        auto imm = program_word(prog, mem, pc + Felt(long{f.instr.off_op1}, mem.config()));
        if (!imm)
            throw ExecError(ExecErrorKind::UnassignedRead, "no immediate after pc " + to_dec(pc.value()));
        f.imm = mod_floor(*imm, mem.config().modulus);
    }
    return f;
}

StepResult next_state(Memory& mem, const MachineState& s, const Program& prog)
{
    const FieldConfig& cfg = mem.config();
    const Fetched f = fetch(prog, mem, s.pc);
    const Instruction& i = f.instr;
    if (f.imm && is_halting_jump(i, *f.imm))
        return Halted{};

    const Felt size(static_cast<long>(i.size()), cfg);
    const Felt dst_addr = (i.dst_reg == Register::AP ? s.ap : s.fp) + Felt(long{i.off_dst}, cfg);
    const Felt op0_addr = (i.op0_reg == Register::AP ? s.ap : s.fp) + Felt(long{i.off_op0}, cfg);

    std::optional<Felt> dst = mem.get(dst_addr);
    std::optional<Felt> op0 = mem.get(op0_addr);

    if (i.opcode == Opcode::Call) {
        // The call frame: [ap + off_dst] <- fp, [ap + off_op0] <- return pc.
        mem.write(dst_addr, s.fp);
        mem.write(op0_addr, s.pc + size);
        dst = s.fp;
        op0 = s.pc + size;
    }

    auto need = [&](const std::optional<Felt>& v, const Felt& addr, const char* what) -> Felt {
        if (!v)
            throw ExecError(ExecErrorKind::UnassignedRead, std::string(what) + " at address " + to_dec(addr.value()));
        return *v;
    };

    std::optional<Felt> op1_addr;
    std::optional<Felt> op1;
    switch (i.op1_src) {
    case Op1Source::Imm:
        op1 = Felt(*f.imm, cfg);
        break;
    case Op1Source::FpDeref:
        op1_addr = s.fp + Felt(long{i.off_op1}, cfg);
        break;
    case Op1Source::ApDeref:
        op1_addr = s.ap + Felt(long{i.off_op1}, cfg);
        break;
    case Op1Source::Op0Deref:
        op1_addr = need(op0, op0_addr, "op0") + Felt(long{i.off_op1}, cfg);
        break;
    }
    if (op1_addr)
        op1 = mem.get(*op1_addr);

    const bool binary = i.res == ResLogic::Add || i.res == ResLogic::Mul;

    if (i.opcode == Opcode::AssertEq) {
        // dst = res with at most one unknown among the operands res uses.
        const int unknown = !dst + (binary && !op0) + !op1;
        if (unknown > 1)
            throw ExecError(ExecErrorKind::UnassignedRead, "more than one unknown operand");
        if (!dst) {
            Felt res = !binary ? *op1 : i.res == ResLogic::Add ? *op0 + *op1 : *op0 * *op1;
            mem.write(dst_addr, res);
            dst = res;
        } else if (!op1) {
            Felt v = *dst;
            if (i.res == ResLogic::Add)
                v = *dst - *op0;
            else if (i.res == ResLogic::Mul) {
                if (op0->is_zero())
                    throw ExecError(ExecErrorKind::DivisionByZero, "deducing op1 through a zero factor");
                v = *dst / *op0;
            }
            mem.write(*op1_addr, v);
            op1 = v;
        } else if (binary && !op0) {
            Felt v = *dst - *op1;
            if (i.res == ResLogic::Mul) {
                if (op1->is_zero())
                    throw ExecError(ExecErrorKind::DivisionByZero, "deducing op0 through a zero factor");
                v = *dst / *op1;
            }
            mem.write(op0_addr, v);
            op0 = v;
        }
    }

    std::optional<Felt> res;
    switch (i.res) {
    case ResLogic::Op1:
        if (i.opcode == Opcode::AssertEq || i.pc_update == PcUpdate::JumpAbs || i.pc_update == PcUpdate::JumpRel ||
            i.ap_update == ApUpdate::AddRes)
            res = need(op1, op1_addr.value_or(s.pc), "op1");
        break;
    case ResLogic::Add: res = need(op0, op0_addr, "op0") + need(op1, op1_addr.value_or(s.pc), "op1"); break;
    case ResLogic::Mul: res = need(op0, op0_addr, "op0") * need(op1, op1_addr.value_or(s.pc), "op1"); break;
    case ResLogic::Unconstrained: break;
    }

    if (i.opcode == Opcode::AssertEq && *dst != *res)
        throw ExecError(ExecErrorKind::AssertFailed, "dst " + to_dec(dst->value()) + " != res " +
                                                         to_dec(res->value()));

    MachineState t = s;
    switch (i.pc_update) {
    case PcUpdate::Regular: t.pc = s.pc + size; break;
    case PcUpdate::JumpAbs: t.pc = *res; break;
    case PcUpdate::JumpRel: t.pc = s.pc + *res; break;
    case PcUpdate::Jnz:
        if (need(dst, dst_addr, "jnz condition").is_zero())
            t.pc = s.pc + size;
        else
            t.pc = s.pc + need(op1, op1_addr.value_or(s.pc), "op1");
        break;
    }

    switch (i.opcode) {
    case Opcode::Call:
        t.ap = s.ap + 2;
        t.fp = s.ap + 2;
        break;
    case Opcode::Ret:
        t.fp = need(dst, dst_addr, "saved fp");
        break;
    default: break;
    }
    switch (i.ap_update) {
    case ApUpdate::Regular: break;
    case ApUpdate::AddRes: t.ap = s.ap + *res; break;
    case ApUpdate::Add1: t.ap = s.ap + 1; break;
    }
    return t;
}

namespace {

void fire_hints(const Program& prog, const MachineState& s, Memory& mem, const std::vector<Hint>& hints)
{
    if (hints.empty())
        return;
    const BigInt off = mod_floor(s.pc.value() - prog.base_pc, mem.config().modulus);
    if (off >= from_u64(prog.words.size()))
        return;
    const std::size_t o = to_u64(off);
    for (const auto& h : hints)
        if (h.offset == o)
            h.action(s, mem);
}

}  // namespace

RunOutcome run_collect(const Program& prog, const MachineState& entry, Memory& mem, const std::vector<Hint>& hints,
                       std::size_t max_steps)
{
    if (max_steps == 0)
        throw std::invalid_argument("max_steps must be at least 1");
    RunOutcome out;
    out.trace.states.push_back(entry);
    for (;;) {
        const std::size_t step = out.trace.steps();
        const MachineState& s = out.trace.states.back();
        try {
            const Fetched f = fetch(prog, mem, s.pc);
            if (f.imm && is_halting_jump(f.instr, *f.imm)) {
                out.trace.halted = true;
                return out;
            }
            if (step >= max_steps)
                throw ExecError(ExecErrorKind::StepBudgetExceeded,
                                "no halt within " + std::to_string(max_steps) + " steps");
            fire_hints(prog, s, mem, hints);
            StepResult r = next_state(mem, s, prog);
            out.trace.states.push_back(std::get<MachineState>(r));
        } catch (const ExecError& e) {
            out.error = e.at_step(step);
            return out;
        } catch (const DivisionByZero& e) {
            out.error = ExecError(ExecErrorKind::DivisionByZero, e.what(), step);
            return out;
        }
    }
}

Trace run(const Program& prog, const MachineState& entry, Memory& mem, const std::vector<Hint>& hints,
          std::size_t max_steps)
{
    RunOutcome out = run_collect(prog, entry, mem, hints, max_steps);
    if (out.error)
        throw *out.error;
    return std::move(out.trace);
}

bool ensures_check(const Trace& trace, const Memory& mem, const StatePredicate& p)
{
    if (!trace.halted)
        throw ContractViolation("ensures_check needs a halting trace");
    for (std::size_t i = 0; i < trace.states.size(); ++i)
        if (p(i, trace.states[i], mem))
            return true;
    return false;
}

CheckResult rc_ensures_check(const Memory& mem, const BigInt& rc_bound, const BigInt& mu, const Felt& start,
                             const Felt& end, const BigInt& kappa)
{
    const FieldConfig& cfg = mem.config();
    if (kappa >= cfg.modulus)
        throw ContractViolation("step count " + to_dec(kappa) + " is not below the modulus");
    if (mu < 0 || mu > kappa)
        return CheckResult::fail("mu = " + to_dec(mu) + " exceeds kappa = " + to_dec(kappa));
    if (end != start + Felt(mu, cfg))
        return CheckResult::fail("end pointer is not start + mu");
    for (BigInt j = 0; j < mu; ++j) {
        const Felt addr = start + Felt(j, cfg);
        auto v = mem.get(addr);
        if (!v)
            return CheckResult::fail("range-check cell " + to_dec(addr.value()) + " is unassigned");
        if (v->value() >= rc_bound)
            return CheckResult::fail("range-check cell " + to_dec(addr.value()) + " holds " + to_dec(v->value()));
    }
    return CheckResult::pass();
}

CheckResult audit_frames(const Trace& trace, const Program& prog, const Memory& mem)
{
    std::vector<std::size_t> open;
    const std::size_t n = trace.states.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Fetched f = fetch(prog, mem, trace.states[i].pc);
        if (f.instr.opcode == Opcode::Call) {
            open.push_back(i);
        } else if (f.instr.opcode == Opcode::Ret) {
            if (open.empty())
                continue;  // return from the entry frame
            const std::size_t c = open.back();
            open.pop_back();
            const MachineState& before = trace.states[c];
            const MachineState& after = trace.states[i + 1];
            const Fetched call = fetch(prog, mem, before.pc);
            if (after.fp != before.fp)
                return CheckResult::fail("ret at step " + std::to_string(i) + " restores fp " +
                                         to_dec(after.fp.value()) + ", caller had " + to_dec(before.fp.value()));
            if (after.pc != before.pc + Felt(static_cast<long>(call.instr.size()), mem.config()))
                return CheckResult::fail("ret at step " + std::to_string(i) + " does not resume after the call at step " +
                                         std::to_string(c));
        }
    }
    return CheckResult::pass();
}

}  // namespace cairovm
